use std::f64::consts::TAU;

use rand::Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::{cell_for_uniform, StreamFactory};
use crate::correlation::{Angle, CorrelationModel, JointDistribution, Settings4};
use crate::error::{Error, Result};

/// Minimum patients per setting before an estimate counts as powered.
pub const MIN_SAMPLES_PER_SETTING: u64 = 10;

/// How each patient's analyzer angles are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum AngleMode {
    /// Every patient uses one of the same four settings.
    FixedFour(Settings4),
    /// Each of a patient's two angles is offset from its nominal setting by an
    /// independent uniform draw on `[−spread/2, spread/2]`.
    Jittered { settings: Settings4, spread: f64 },
    /// Both angles uniform on `[0, 2π)`; the setting label carries no information.
    PerPatientRandom,
}

impl AngleMode {
    pub fn nominal_settings(&self) -> Option<Settings4> {
        match self {
            AngleMode::FixedFour(s) | AngleMode::Jittered { settings: s, .. } => Some(*s),
            AngleMode::PerPatientRandom => None,
        }
    }
}

/// How patients are allotted to the four setting pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Assignment {
    #[default]
    Uniform,
    RoundRobin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PopulationConfig {
    pub n_patients: u64,
    pub angle_mode: AngleMode,
    pub source_model: CorrelationModel,
    pub seed: u64,
    pub assignment: Assignment,
}

impl PopulationConfig {
    pub fn fixed(source_model: CorrelationModel, settings: Settings4, n_patients: u64, seed: u64) -> Self {
        PopulationConfig {
            n_patients,
            angle_mode: AngleMode::FixedFour(settings),
            source_model,
            seed,
            assignment: Assignment::Uniform,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_patients == 0 {
            return Err(Error::Config("n_patients must be at least 1".into()));
        }
        if let AngleMode::Jittered { spread, .. } = self.angle_mode {
            if !(spread >= 0.0) || !spread.is_finite() {
                return Err(Error::Config(format!("jitter spread {spread} must be finite and nonnegative")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Violation,
    NoViolation,
}

impl Verdict {
    /// Violation iff `|s_hat| − 2·stderr > 2`.
    pub fn from_estimate(s_hat: f64, stderr: f64) -> Self {
        if s_hat.abs() - 2.0 * stderr > 2.0 {
            Verdict::Violation
        } else {
            Verdict::NoViolation
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Violation => "violates classical bound",
            Verdict::NoViolation => "no violation",
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChshEstimate {
    pub e_hat: [f64; 4],
    pub s_hat: f64,
    pub stderr: f64,
    pub verdict: Verdict,
    /// Cells uu, ud, du, dd for the pairs (a,b), (a,b′), (a′,b), (a′,b′).
    pub per_setting_counts: [[u64; 4]; 4],
    /// Some setting received fewer than [`MIN_SAMPLES_PER_SETTING`] patients.
    pub underpowered: bool,
}

impl ChshEstimate {
    pub fn from_counts(counts: [[u64; 4]; 4]) -> Self {
        let mut e_hat = [0.0; 4];
        let mut variance = 0.0;
        let mut underpowered = false;
        for (i, c) in counts.iter().enumerate() {
            let n: u64 = c.iter().sum();
            if n < MIN_SAMPLES_PER_SETTING {
                underpowered = true;
            }
            if n == 0 {
                continue;
            }
            let nf = n as f64;
            let e = ((c[0] + c[3]) as f64 - (c[1] + c[2]) as f64) / nf;
            e_hat[i] = e;
            // the ±1 product has multinomial variance 1 − E²
            variance += (1.0 - e * e) / nf;
        }
        let s_hat = e_hat[0] - e_hat[1] + e_hat[2] + e_hat[3];
        let stderr = variance.sqrt();
        ChshEstimate {
            e_hat,
            s_hat,
            stderr,
            verdict: Verdict::from_estimate(s_hat, stderr),
            per_setting_counts: counts,
            underpowered,
        }
    }

    pub fn setting_sizes(&self) -> [u64; 4] {
        self.per_setting_counts.map(|c| c.iter().sum())
    }
}

/// Simulates `cfg.n_patients` pair measurements and estimates the four
/// correlations and the CHSH combination.
///
/// Patients run in parallel on the current rayon pool; patient `i` draws only
/// from substream `i`, so the result does not depend on the thread count.
pub fn estimate_chsh(cfg: &PopulationConfig) -> Result<ChshEstimate> {
    cfg.validate()?;
    let factory = StreamFactory::new(cfg.seed);
    let fixed: Option<[JointDistribution; 4]> = match &cfg.angle_mode {
        AngleMode::FixedFour(s) => {
            let pairs = s.pairs();
            let mut joints = [JointDistribution::uniform(); 4];
            for (j, (a, b)) in joints.iter_mut().zip(pairs) {
                *j = cfg.source_model.joint(a, b)?;
            }
            Some(joints)
        }
        _ => None,
    };

    let patient = |i: u64| -> Result<(usize, usize)> {
        let mut rng = factory.stream(i);
        let setting = match cfg.assignment {
            Assignment::Uniform => rng.random_range(0..4usize),
            Assignment::RoundRobin => (i % 4) as usize,
        };
        let joint = match (&fixed, &cfg.angle_mode) {
            (Some(j), _) => j[setting],
            (None, AngleMode::Jittered { settings, spread }) => {
                let (a, b) = settings.pairs()[setting];
                let da = (rng.random::<f64>() - 0.5) * spread;
                let db = (rng.random::<f64>() - 0.5) * spread;
                cfg.source_model.joint(a + da, b + db)?
            }
            (None, _) => {
                let a = Angle(rng.random::<f64>() * TAU);
                let b = Angle(rng.random::<f64>() * TAU);
                cfg.source_model.joint(a, b)?
            }
        };
        Ok((setting, cell_for_uniform(&joint, rng.random::<f64>())))
    };

    let counts = (0..cfg.n_patients)
        .into_par_iter()
        .try_fold(
            || [[0u64; 4]; 4],
            |mut acc, i| {
                let (s, c) = patient(i)?;
                acc[s][c] += 1;
                Ok::<_, Error>(acc)
            },
        )
        .try_reduce(|| [[0u64; 4]; 4], |mut x, y| {
            for (rx, ry) in x.iter_mut().zip(y) {
                for (a, b) in rx.iter_mut().zip(ry) {
                    *a += b;
                }
            }
            Ok(x)
        })?;
    Ok(ChshEstimate::from_counts(counts))
}
