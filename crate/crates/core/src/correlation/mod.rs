//! Analytic probability models for two-outcome pair experiments.
//!
//! Two analyzers at angles `a` and `b` each report `up` or `down`. The
//! classical hidden-variable model gives joint probabilities that are linear
//! in the angle between the analyzers, the quantum singlet gives the
//! `sin²` law. Both produce the same correlation at 0, π/2 and π and differ
//! everywhere in between.

mod chsh;
mod optimize;

pub use chsh::{chsh, maximize_chsh, ChshMaximum};
pub use optimize::{nelder_mead, NelderMeadOptions, NelderMeadResult};

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::distortion::{affine_distort, DistortionParams, SignedDistribution};
use crate::error::{Error, Result};
use crate::quantum_state::{born_probabilities, DensityMatrix};

/// Tolerance on normalization and sign of a [`JointDistribution`].
pub const PROBABILITY_TOL: f64 = 1e-12;

/// An analyzer angle in radians. Any real value is accepted.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(pub f64);

impl Angle {
    pub const fn new(radians: f64) -> Self {
        Angle(radians)
    }

    pub fn from_degrees(degrees: f64) -> Self {
        Angle(degrees.to_radians())
    }

    pub fn radians(self) -> f64 {
        self.0
    }
}

impl From<f64> for Angle {
    fn from(radians: f64) -> Self {
        Angle(radians)
    }
}

impl std::ops::Add<f64> for Angle {
    type Output = Angle;

    fn add(self, rhs: f64) -> Angle {
        Angle(self.0 + rhs)
    }
}

/// Angle between two analyzer directions, folded into `[0, π]`.
pub fn wrapped_difference(a: Angle, b: Angle) -> f64 {
    wrap_delta(a.0 - b.0)
}

/// Folds an arbitrary difference into `[0, π]`: `π − |(|d| mod 2π) − π|`.
pub fn wrap_delta(delta: f64) -> f64 {
    let m = delta.abs().rem_euclid(TAU);
    // same value as the formula above, without its cancellation for small m
    if m <= PI {
        m
    } else {
        (TAU - m).max(0.0)
    }
}

/// Spin of the measured particles. Photons see every angle doubled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpinConvention {
    Half,
    Photon,
}

impl SpinConvention {
    /// Multiplier applied to the analyzer angle: 1 for spin-½, 2 for photons.
    pub fn angle_factor(self) -> f64 {
        match self {
            SpinConvention::Half => 1.0,
            SpinConvention::Photon => 2.0,
        }
    }
}

/// Probabilities of the four outcome pairs, in the order uu, ud, du, dd.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    pub p_uu: f64,
    pub p_ud: f64,
    pub p_du: f64,
    pub p_dd: f64,
}

impl JointDistribution {
    /// Validates normalization and nonnegativity to within [`PROBABILITY_TOL`].
    pub fn new(p_uu: f64, p_ud: f64, p_du: f64, p_dd: f64) -> Result<Self> {
        Self::from_array([p_uu, p_ud, p_du, p_dd])
    }

    pub fn from_array(p: [f64; 4]) -> Result<Self> {
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidDistribution(format!("non-finite entry in {p:?}")));
        }
        if let Some(x) = p.iter().find(|&&x| x < -PROBABILITY_TOL) {
            return Err(Error::InvalidDistribution(format!("negative probability {x}")));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > PROBABILITY_TOL {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {sum}")));
        }
        Ok(Self::from_array_unchecked(p))
    }

    pub(crate) fn from_array_unchecked(p: [f64; 4]) -> Self {
        JointDistribution { p_uu: p[0], p_ud: p[1], p_du: p[2], p_dd: p[3] }
    }

    pub fn uniform() -> Self {
        Self::from_array_unchecked([0.25; 4])
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.p_uu, self.p_ud, self.p_du, self.p_dd]
    }

    /// `P(uu) + P(dd) − P(du) − P(ud)`, the expectation of the product of ±1 outcomes.
    pub fn correlation(&self) -> f64 {
        correlation_of(&self.as_array())
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &JointDistribution) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn correlation_of(p: &[f64; 4]) -> f64 {
    p[0] + p[3] - p[2] - p[1]
}

/// Free function form of [`JointDistribution::correlation`].
pub fn correlation(d: &JointDistribution) -> f64 {
    d.correlation()
}

/// The four analyzer settings of a CHSH experiment.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Settings4 {
    pub a: Angle,
    pub a_prime: Angle,
    pub b: Angle,
    pub b_prime: Angle,
}

impl Settings4 {
    pub fn new(a: f64, a_prime: f64, b: f64, b_prime: f64) -> Self {
        Settings4 { a: Angle(a), a_prime: Angle(a_prime), b: Angle(b), b_prime: Angle(b_prime) }
    }

    /// `a = 0, a′ = π/2, b = π/4, b′ = 3π/4`; optimal for the spin-½ singlet.
    pub fn standard() -> Self {
        Settings4::new(0.0, PI / 2.0, PI / 4.0, 3.0 * PI / 4.0)
    }

    /// The four (alice, bob) pairs in CHSH order: (a,b), (a,b′), (a′,b), (a′,b′).
    pub fn pairs(&self) -> [(Angle, Angle); 4] {
        [(self.a, self.b), (self.a, self.b_prime), (self.a_prime, self.b), (self.a_prime, self.b_prime)]
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.a.0, self.a_prime.0, self.b.0, self.b_prime.0]
    }

    pub fn from_array(x: [f64; 4]) -> Self {
        Settings4::new(x[0], x[1], x[2], x[3])
    }
}

/// Rule generating the joint distribution for a pair of analyzer angles.
#[derive(Debug, Clone, PartialEq)]
pub enum CorrelationModel {
    /// Bell's ad hoc hidden-variable model, linear in the angle.
    ClassicalLinear,
    Quantum(SpinConvention),
    /// Born-rule probabilities of an explicit two-qubit state.
    StateModel(DensityMatrix),
    /// One affine distortion applied on top of a non-distorted model.
    /// Build it with [`CorrelationModel::distorted`].
    Distorted { inner: Box<CorrelationModel>, params: DistortionParams },
}

impl CorrelationModel {
    pub fn quantum_half() -> Self {
        CorrelationModel::Quantum(SpinConvention::Half)
    }

    /// Wraps `inner` in a single distortion layer. `params` must act on four
    /// outcomes and `inner` may not already be distorted.
    pub fn distorted(inner: CorrelationModel, params: DistortionParams) -> Result<Self> {
        if matches!(inner, CorrelationModel::Distorted { .. }) {
            return Err(Error::domain(
                "distortions do not nest; compose the parameters with DistortionParams::then",
            ));
        }
        if params.k() != 4 {
            return Err(Error::domain(format!(
                "pair experiments have 4 outcomes, distortion acts on {}",
                params.k()
            )));
        }
        Ok(CorrelationModel::Distorted { inner: Box::new(inner), params })
    }

    /// White-noise admixture with visibility `v`, expressed as a distortion.
    pub fn with_visibility(inner: CorrelationModel, v: f64) -> Result<Self> {
        Self::distorted(inner, DistortionParams::from_visibility(v, 4)?)
    }

    /// Possibly signed joint probabilities. Only a distortion can make them negative.
    pub fn signed_joint(&self, a: Angle, b: Angle) -> [f64; 4] {
        match self {
            CorrelationModel::ClassicalLinear => classical_joint(a, b).as_array(),
            CorrelationModel::Quantum(spin) => quantum_joint(a, b, *spin).as_array(),
            CorrelationModel::StateModel(rho) => born_probabilities(rho, a, b).as_array(),
            CorrelationModel::Distorted { inner, params } => params.apply4(&inner.signed_joint(a, b)),
        }
    }

    /// Joint distribution as a probability vector; fails if a distortion pushed
    /// some cell negative.
    pub fn joint(&self, a: Angle, b: Angle) -> Result<JointDistribution> {
        JointDistribution::from_array(self.signed_joint(a, b))
    }

    pub fn signed_distribution(&self, a: Angle, b: Angle) -> SignedDistribution {
        match self {
            CorrelationModel::Distorted { inner, params } => {
                affine_distort(&inner.signed_joint(a, b), params)
                    .expect("inner model produces a normalized 4-vector")
            }
            _ => SignedDistribution::from_entries_unchecked(self.signed_joint(a, b).to_vec()),
        }
    }
}

/// Bell's classical model: `P(uu) = P(dd) = Δ/2π`, `P(ud) = P(du) = 1/2 − Δ/2π`.
pub fn classical_joint(a: Angle, b: Angle) -> JointDistribution {
    classical_joint_delta(wrapped_difference(a, b))
}

fn classical_joint_delta(delta: f64) -> JointDistribution {
    let same = delta / TAU;
    let diff = 0.5 - same;
    JointDistribution::from_array_unchecked([same, diff, diff, same])
}

/// Singlet probabilities: `P(uu) = P(dd) = sin²(gΔ/2)/2`.
pub fn quantum_joint(a: Angle, b: Angle, spin: SpinConvention) -> JointDistribution {
    let delta = wrapped_difference(a, b);
    let half = 0.5 * spin.angle_factor() * delta;
    let same = 0.5 * half.sin().powi(2);
    let diff = 0.5 - same;
    JointDistribution::from_array_unchecked([same, diff, diff, same])
}

/// Correlation of model `m` at analyzer angles `(a, b)`.
pub fn model_correlation(m: &CorrelationModel, a: Angle, b: Angle) -> f64 {
    correlation_of(&m.signed_joint(a, b))
}

/// Classical angle difference whose joint distribution equals the quantum one
/// at `delta_q`: `Δc = π·sin²(g·Δq/2)`.
pub fn classical_match_delta(delta_q: f64, spin: SpinConvention) -> f64 {
    let delta_q = wrap_delta(delta_q);
    PI * (0.5 * spin.angle_factor() * delta_q).sin().powi(2)
}

/// Classical angle difference producing correlation `target`: `π(target + 1)/2`.
pub fn classical_angles_for_correlation(target: f64) -> Result<f64> {
    if !target.is_finite() || target.abs() > 1.0 {
        return Err(Error::domain(format!("target correlation {target} outside [-1, 1]")));
    }
    Ok(PI * (target + 1.0) / 2.0)
}
