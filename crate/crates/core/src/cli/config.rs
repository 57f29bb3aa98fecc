//! Versioned JSON configuration files. Unknown keys are rejected.

use std::path::Path;

use serde::Deserialize;

use crate::correlation::{CorrelationModel, Settings4, SpinConvention};
use crate::distortion::DistortionParams;
use crate::error::{Error, Result};
use crate::quantum_state::{werner_state, DensityMatrix, Visibility};
use crate::trial_sim::{AngleMode, Assignment, BreilmannConfig, OutcomeRule, PopulationConfig, TraitDistribution};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingsSpec {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
}

impl SettingsSpec {
    fn to_settings(self, angle_scale: f64) -> Settings4 {
        Settings4::new(self.a * angle_scale, self.a_prime * angle_scale, self.b * angle_scale, self.b_prime * angle_scale)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum AngleModeSpec {
    FixedFour(SettingsSpec),
    Jittered { settings: SettingsSpec, spread: f64 },
    PerPatientRandom,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    ClassicalLinear,
    QuantumHalf,
    QuantumPhoton,
    Werner { visibility: f64 },
    State(DensityMatrix),
    /// Offset `b` of the four-outcome affine map.
    Distorted { inner: Box<ModelSpec>, b_coef: f64 },
    /// White noise of the given visibility on top of `inner`.
    Noisy { inner: Box<ModelSpec>, visibility: f64 },
}

impl ModelSpec {
    pub fn to_model(&self) -> Result<CorrelationModel> {
        Ok(match self {
            ModelSpec::ClassicalLinear => CorrelationModel::ClassicalLinear,
            ModelSpec::QuantumHalf => CorrelationModel::Quantum(SpinConvention::Half),
            ModelSpec::QuantumPhoton => CorrelationModel::Quantum(SpinConvention::Photon),
            ModelSpec::Werner { visibility } => CorrelationModel::StateModel(werner_state(Visibility::new(*visibility)?)),
            ModelSpec::State(rho) => CorrelationModel::StateModel(*rho),
            ModelSpec::Distorted { inner, b_coef } => {
                CorrelationModel::distorted(inner.to_model()?, DistortionParams::new(*b_coef, 4)?)?
            }
            ModelSpec::Noisy { inner, visibility } => CorrelationModel::with_visibility(inner.to_model()?, *visibility)?,
        })
    }
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssignmentSpec {
    #[default]
    Uniform,
    RoundRobin,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationFile {
    pub version: u32,
    pub n_patients: u64,
    pub angle_mode: AngleModeSpec,
    pub source_model: ModelSpec,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub assignment: AssignmentSpec,
}

impl PopulationFile {
    /// `angle_scale` converts file angles to radians; the fallback seed applies
    /// when the file has none.
    pub fn to_config(&self, angle_scale: f64, seed: Option<u64>, fallback_seed: u64) -> Result<PopulationConfig> {
        check_version(self.version)?;
        let angle_mode = match &self.angle_mode {
            AngleModeSpec::FixedFour(s) => AngleMode::FixedFour(s.to_settings(angle_scale)),
            AngleModeSpec::Jittered { settings, spread } => {
                AngleMode::Jittered { settings: settings.to_settings(angle_scale), spread: spread * angle_scale }
            }
            AngleModeSpec::PerPatientRandom => AngleMode::PerPatientRandom,
        };
        let cfg = PopulationConfig {
            n_patients: self.n_patients,
            angle_mode,
            source_model: self.source_model.to_model()?,
            seed: seed.or(self.seed).unwrap_or(fallback_seed),
            assignment: match self.assignment {
                AssignmentSpec::Uniform => Assignment::Uniform,
                AssignmentSpec::RoundRobin => Assignment::RoundRobin,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TraitSpec {
    #[default]
    Uniform,
    Beta { alpha: f64, beta: f64 },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum OutcomeRuleSpec {
    Indicator { threshold: f64 },
    Constant { p: f64 },
    Linear { intercept: f64, slope: f64 },
    Logistic { midpoint: f64, steepness: f64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BreilmannFile {
    pub version: u32,
    pub n_patients: u64,
    #[serde(default)]
    pub trait_distribution: TraitSpec,
    pub compliance_threshold: f64,
    pub outcome_rule: OutcomeRuleSpec,
    #[serde(default)]
    pub pill_effect: f64,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl BreilmannFile {
    pub fn to_config(&self, seed: Option<u64>, fallback_seed: u64) -> Result<BreilmannConfig> {
        check_version(self.version)?;
        let cfg = BreilmannConfig {
            n_patients: self.n_patients,
            trait_distribution: match self.trait_distribution {
                TraitSpec::Uniform => TraitDistribution::Uniform,
                TraitSpec::Beta { alpha, beta } => TraitDistribution::Beta { alpha, beta },
            },
            compliance_threshold: self.compliance_threshold,
            outcome_rule: match self.outcome_rule {
                OutcomeRuleSpec::Indicator { threshold } => OutcomeRule::Indicator { threshold },
                OutcomeRuleSpec::Constant { p } => OutcomeRule::Constant { p },
                OutcomeRuleSpec::Linear { intercept, slope } => OutcomeRule::Linear { intercept, slope },
                OutcomeRuleSpec::Logistic { midpoint, steepness } => OutcomeRule::Logistic { midpoint, steepness },
            },
            pill_effect: self.pill_effect,
            seed: seed.or(self.seed).unwrap_or(fallback_seed),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn check_version(v: u32) -> Result<()> {
    if v != CONFIG_VERSION {
        return Err(Error::Config(format!("unsupported config version {v}, expected {CONFIG_VERSION}")));
    }
    Ok(())
}

pub fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
}

pub fn load<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}
