//! Self-selected treatment arms: patients take the pill iff a latent trait
//! exceeds a threshold, and the same trait drives the outcome.

use rand::Rng;
use rand_distr::{Beta, Distribution};
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::StreamFactory;
use crate::error::{Error, Result};

/// z for a two-sided 95% normal interval.
const Z_95: f64 = 1.959963984540054;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TraitDistribution {
    Uniform,
    Beta { alpha: f64, beta: f64 },
}

/// Monotone map from trait to pass probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OutcomeRule {
    /// 1 if `t ≥ threshold`, else 0.
    Indicator { threshold: f64 },
    Constant { p: f64 },
    /// `intercept + slope·t`
    Linear { intercept: f64, slope: f64 },
    /// `1 / (1 + exp(−steepness·(t − midpoint)))`
    Logistic { midpoint: f64, steepness: f64 },
}

impl OutcomeRule {
    pub fn pass_probability(&self, t: f64) -> f64 {
        match *self {
            OutcomeRule::Indicator { threshold } => {
                if t >= threshold {
                    1.0
                } else {
                    0.0
                }
            }
            OutcomeRule::Constant { p } => p,
            OutcomeRule::Linear { intercept, slope } => intercept + slope * t,
            OutcomeRule::Logistic { midpoint, steepness } => 1.0 / (1.0 + (-steepness * (t - midpoint)).exp()),
        }
    }

    fn validate(&self) -> Result<()> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        let ok = match *self {
            OutcomeRule::Indicator { threshold } => threshold.is_finite(),
            OutcomeRule::Constant { p } => unit(p),
            // monotone and inside [0,1] at both ends of the trait range
            OutcomeRule::Linear { intercept, slope } => slope >= 0.0 && unit(intercept) && unit(intercept + slope),
            OutcomeRule::Logistic { midpoint, steepness } => midpoint.is_finite() && steepness >= 0.0 && steepness.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("outcome rule {self:?} is not a monotone map into [0, 1]")))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BreilmannConfig {
    pub n_patients: u64,
    pub trait_distribution: TraitDistribution,
    /// Patients with trait `t ≥ threshold` take the pill.
    pub compliance_threshold: f64,
    pub outcome_rule: OutcomeRule,
    /// True causal effect of the pill on pass probability.
    pub pill_effect: f64,
    pub seed: u64,
}

impl BreilmannConfig {
    /// The extreme story: compliance and a perfect test result share one cause,
    /// the pill does nothing.
    pub fn indicator(n_patients: u64, threshold: f64, seed: u64) -> Self {
        BreilmannConfig {
            n_patients,
            trait_distribution: TraitDistribution::Uniform,
            compliance_threshold: threshold,
            outcome_rule: OutcomeRule::Indicator { threshold },
            pill_effect: 0.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_patients == 0 {
            return Err(Error::Config("n_patients must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.compliance_threshold) {
            return Err(Error::Config(format!("compliance threshold {} outside [0, 1]", self.compliance_threshold)));
        }
        if let TraitDistribution::Beta { alpha, beta } = self.trait_distribution {
            if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
                return Err(Error::Config(format!("beta({alpha}, {beta}) needs positive finite parameters")));
            }
        }
        if !self.pill_effect.is_finite() {
            return Err(Error::Config("pill effect must be finite".into()));
        }
        self.outcome_rule.validate()
    }
}

/// Arm × outcome counts with derived rates. Arms with no patients have no rate.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    /// `[[treated pass, treated fail], [control pass, control fail]]`
    pub counts: [[u64; 2]; 2],
    pub observed_rate_treated: Option<f64>,
    pub observed_rate_control: Option<f64>,
    pub apparent_effect: Option<f64>,
    pub true_causal_effect: f64,
    /// Normal-approximation 95% half-width of `apparent_effect`.
    pub ci_halfwidth: Option<f64>,
}

impl TrialResult {
    pub fn from_counts(counts: [[u64; 2]; 2], true_causal_effect: f64) -> Self {
        let rate = |row: [u64; 2]| {
            let n = row[0] + row[1];
            (n > 0).then(|| row[0] as f64 / n as f64)
        };
        let treated = rate(counts[0]);
        let control = rate(counts[1]);
        let apparent_effect = treated.zip(control).map(|(t, c)| t - c);
        let ci_halfwidth = Self::standard_error_of(counts).map(|se| Z_95 * se);
        TrialResult {
            counts,
            observed_rate_treated: treated,
            observed_rate_control: control,
            apparent_effect,
            true_causal_effect,
            ci_halfwidth,
        }
    }

    fn standard_error_of(counts: [[u64; 2]; 2]) -> Option<f64> {
        let n1 = (counts[0][0] + counts[0][1]) as f64;
        let n2 = (counts[1][0] + counts[1][1]) as f64;
        if n1 == 0.0 || n2 == 0.0 {
            return None;
        }
        let p1 = counts[0][0] as f64 / n1;
        let p2 = counts[1][0] as f64 / n2;
        Some((p1 * (1.0 - p1) / n1 + p2 * (1.0 - p2) / n2).sqrt())
    }

    /// Unpooled binomial standard error of the rate difference.
    pub fn standard_error(&self) -> Option<f64> {
        Self::standard_error_of(self.counts)
    }

    /// One of the arms is empty.
    pub fn is_degenerate(&self) -> bool {
        self.apparent_effect.is_none()
    }

    pub fn n_treated(&self) -> u64 {
        self.counts[0][0] + self.counts[0][1]
    }

    pub fn n_control(&self) -> u64 {
        self.counts[1][0] + self.counts[1][1]
    }
}

#[derive(Serialize)]
struct Rates {
    treated: Option<f64>,
    control: Option<f64>,
}

impl Serialize for TrialResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("TrialResult", 5)?;
        st.serialize_field("counts", &self.counts)?;
        st.serialize_field("rates", &Rates { treated: self.observed_rate_treated, control: self.observed_rate_control })?;
        st.serialize_field("apparent_effect", &self.apparent_effect)?;
        st.serialize_field("true_causal_effect", &self.true_causal_effect)?;
        st.serialize_field("ci_halfwidth", &self.ci_halfwidth)?;
        st.end()
    }
}

/// Runs the self-selected trial. Compliant patients form the treated arm.
pub fn breilmann_trial(cfg: &BreilmannConfig) -> Result<TrialResult> {
    cfg.validate()?;
    let factory = StreamFactory::new(cfg.seed);
    let beta = match cfg.trait_distribution {
        TraitDistribution::Beta { alpha, beta } => {
            Some(Beta::new(alpha, beta).map_err(|e| Error::Config(e.to_string()))?)
        }
        TraitDistribution::Uniform => None,
    };

    let counts = (0..cfg.n_patients)
        .into_par_iter()
        .fold(
            || [[0u64; 2]; 2],
            |mut acc, i| {
                let mut rng = factory.stream(i);
                let t: f64 = match &beta {
                    Some(d) => d.sample(&mut rng),
                    None => rng.random(),
                };
                let complied = t >= cfg.compliance_threshold;
                let boost = if complied { cfg.pill_effect } else { 0.0 };
                let p = (cfg.outcome_rule.pass_probability(t) + boost).clamp(0.0, 1.0);
                let passed = rng.random::<f64>() < p;
                acc[usize::from(!complied)][usize::from(!passed)] += 1;
                acc
            },
        )
        .reduce(
            || [[0u64; 2]; 2],
            |mut x, y| {
                for (rx, ry) in x.iter_mut().zip(y) {
                    rx[0] += ry[0];
                    rx[1] += ry[1];
                }
                x
            },
        );
    Ok(TrialResult::from_counts(counts, cfg.pill_effect))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_rule_gives_perfect_compliers() {
        let r = breilmann_trial(&BreilmannConfig::indicator(50_000, 0.6, 1)).unwrap();
        assert_eq!(r.observed_rate_treated, Some(1.0));
        assert_eq!(r.observed_rate_control, Some(0.0));
        assert_eq!(r.true_causal_effect, 0.0);
        assert_eq!(r.apparent_effect, Some(1.0));
    }

    #[test]
    fn everyone_complies_is_degenerate() {
        let r = breilmann_trial(&BreilmannConfig::indicator(1000, 0.0, 1)).unwrap();
        assert!(r.is_degenerate());
        assert_eq!(r.observed_rate_control, None);
        assert_eq!(r.ci_halfwidth, None);
        assert_eq!(r.n_treated(), 1000);
        let json = serde_json::to_value(&r).unwrap();
        assert!(json["apparent_effect"].is_null());
        assert!(json["rates"]["control"].is_null());
    }

    #[test]
    fn monotone_rule_produces_bias() {
        let cfg = BreilmannConfig {
            n_patients: 100_000,
            trait_distribution: TraitDistribution::Beta { alpha: 2.0, beta: 2.0 },
            compliance_threshold: 0.5,
            outcome_rule: OutcomeRule::Linear { intercept: 0.1, slope: 0.8 },
            pill_effect: 0.0,
            seed: 4,
        };
        let r = breilmann_trial(&cfg).unwrap();
        let effect = r.apparent_effect.unwrap();
        assert!(effect > 10.0 * r.standard_error().unwrap(), "{effect}");
    }

    #[test]
    fn pill_effect_is_reported_as_truth() {
        let cfg = BreilmannConfig {
            n_patients: 100_000,
            trait_distribution: TraitDistribution::Uniform,
            compliance_threshold: 0.3,
            outcome_rule: OutcomeRule::Constant { p: 0.4 },
            pill_effect: 0.2,
            seed: 8,
        };
        let r = breilmann_trial(&cfg).unwrap();
        assert_eq!(r.true_causal_effect, 0.2);
        assert!((r.apparent_effect.unwrap() - 0.2).abs() < 4.0 * r.standard_error().unwrap());
    }

    #[test]
    fn rules_are_validated() {
        let mut cfg = BreilmannConfig::indicator(10, 0.5, 0);
        cfg.outcome_rule = OutcomeRule::Linear { intercept: 0.5, slope: -0.1 };
        assert!(breilmann_trial(&cfg).is_err());
        cfg.outcome_rule = OutcomeRule::Constant { p: 1.5 };
        assert!(breilmann_trial(&cfg).is_err());
        cfg.outcome_rule = OutcomeRule::Constant { p: 0.5 };
        cfg.compliance_threshold = 1.5;
        assert!(breilmann_trial(&cfg).is_err());
        cfg.compliance_threshold = 0.5;
        cfg.trait_distribution = TraitDistribution::Beta { alpha: 0.0, beta: 1.0 };
        assert!(breilmann_trial(&cfg).is_err());
    }

    #[test]
    fn logistic_rule_is_monotone() {
        let r = OutcomeRule::Logistic { midpoint: 0.5, steepness: 6.0 };
        assert!(r.pass_probability(0.2) < r.pass_probability(0.8));
        assert!((r.pass_probability(0.5) - 0.5).abs() < 1e-15);
    }
}
