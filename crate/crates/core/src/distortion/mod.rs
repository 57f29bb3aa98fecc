//! Affine distortion of outcome probabilities, `p′ₖ = s·pₖ − b`.
//!
//! The scale is tied to the offset by `s = 1 + K·b`, so a distorted vector of
//! K probabilities still sums to one. Mixing a two-qubit state with white
//! noise is the same map on its Born probabilities with `s = V`, which is why
//! correlations and CHSH values shrink by exactly `V`.

mod inhibition;

pub use inhibition::{inhibition_steady_state, InhibitionNetwork, SteadyStateOptions};

use serde::Serialize;

use crate::correlation::{maximize_chsh, CorrelationModel};
use crate::error::{Error, Result};
use crate::quantum_state::{DensityMatrix, Visibility};

/// Offset `b` over `K` outcomes; the scale `s = 1 + K·b` is derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistortionParams {
    b_coef: f64,
    k: usize,
}

impl DistortionParams {
    pub fn new(b_coef: f64, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::domain(format!("need at least two outcomes, got {k}")));
        }
        if !b_coef.is_finite() {
            return Err(Error::domain("distortion offset must be finite"));
        }
        Ok(DistortionParams { b_coef, k })
    }

    /// White-noise admixture: `s = V`, `b = (V − 1)/K`.
    pub fn from_visibility(v: f64, k: usize) -> Result<Self> {
        let v = Visibility::new(v)?;
        Self::new((v.value() - 1.0) / k as f64, k)
    }

    pub fn identity(k: usize) -> Result<Self> {
        Self::new(0.0, k)
    }

    pub fn b_coef(&self) -> f64 {
        self.b_coef
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn s(&self) -> f64 {
        1.0 + self.k as f64 * self.b_coef
    }

    /// Applies `self` first, then `next`. Affine maps of this family are closed
    /// under composition: `b = s₂·b₁ + b₂`.
    pub fn then(&self, next: &DistortionParams) -> Result<Self> {
        if self.k != next.k {
            return Err(Error::domain(format!("cannot compose distortions on {} and {} outcomes", self.k, next.k)));
        }
        Self::new(next.s() * self.b_coef + next.b_coef, self.k)
    }

    pub fn apply(&self, p: f64) -> f64 {
        self.s() * p - self.b_coef
    }

    pub(crate) fn apply4(&self, p: &[f64; 4]) -> [f64; 4] {
        p.map(|x| self.apply(x))
    }
}

/// The same map written as `p′ = a·p − b·(1 − p)` with `a = s − b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplementForm {
    pub a_coef: f64,
    pub b_coef: f64,
}

impl ComplementForm {
    pub fn apply(&self, p: f64) -> f64 {
        self.a_coef * p - self.b_coef * (1.0 - p)
    }
}

pub fn to_complement_form(d: &DistortionParams) -> ComplementForm {
    ComplementForm { a_coef: d.s() - d.b_coef, b_coef: d.b_coef }
}

/// A normalized vector whose entries may be negative.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignedDistribution {
    entries: Vec<f64>,
}

impl SignedDistribution {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        check_normalized(&entries)?;
        Ok(SignedDistribution { entries })
    }

    pub(crate) fn from_entries_unchecked(entries: Vec<f64>) -> Self {
        SignedDistribution { entries }
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn has_negative(&self) -> bool {
        self.entries.iter().any(|&x| x < 0.0)
    }

    pub fn negative_indices(&self) -> Vec<usize> {
        self.entries.iter().enumerate().filter(|(_, &x)| x < 0.0).map(|(i, _)| i).collect()
    }

    /// Correlation `p_uu + p_dd − p_du − p_ud`; only defined for four outcomes.
    pub fn correlation(&self) -> Result<f64> {
        match self.entries[..] {
            [uu, ud, du, dd] => Ok(uu + dd - du - ud),
            _ => Err(Error::domain(format!("correlation needs 4 outcomes, have {}", self.entries.len()))),
        }
    }

    /// Clamps negative entries to zero and rescales to unit sum.
    pub fn clamp_renormalize(&self) -> Vec<f64> {
        let clamped: Vec<f64> = self.entries.iter().map(|&x| x.max(0.0)).collect();
        let total: f64 = clamped.iter().sum();
        // sum of entries is 1, so at least one is positive and total > 0
        clamped.into_iter().map(|x| x / total).collect()
    }
}

fn check_normalized(p: &[f64]) -> Result<()> {
    if p.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidDistribution("non-finite entry".into()));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidDistribution(format!("entries sum to {sum}")));
    }
    Ok(())
}

/// `p′ₖ = s·pₖ − b` entrywise. Negative results are kept; see
/// [`SignedDistribution::has_negative`].
pub fn affine_distort(p: &[f64], d: &DistortionParams) -> Result<SignedDistribution> {
    if p.len() != d.k {
        return Err(Error::domain(format!("distortion acts on {} outcomes, input has {}", d.k, p.len())));
    }
    check_normalized(p)?;
    Ok(SignedDistribution { entries: p.iter().map(|&x| d.apply(x)).collect() })
}

/// `V·ρ + (1 − V)·I/4`.
pub fn distort_state(rho: &DensityMatrix, v: f64) -> Result<DensityMatrix> {
    let v = Visibility::new(v)?;
    Ok(rho.mix(&DensityMatrix::maximally_mixed(), v.value()))
}

/// Factor by which white noise of visibility `v` scales correlations and CHSH values.
pub fn correlation_scaling(v: Visibility) -> f64 {
    v.value()
}

/// Round-off allowance when comparing a CHSH maximum with the bound 2.
const BOUND_SLACK: f64 = 1e-9;

/// Largest visibility at which the maximal CHSH value of the distorted
/// model does not exceed the classical bound 2.
pub fn critical_visibility(model: &CorrelationModel, tol: f64) -> Result<Visibility> {
    if !(tol > 0.0) {
        return Err(Error::domain(format!("bisection tolerance {tol} must be positive")));
    }
    let within_bound = |v: f64| -> Result<bool> {
        let m = CorrelationModel::with_visibility(model.clone(), v)?;
        Ok(maximize_chsh(&m).value <= 2.0 + BOUND_SLACK)
    };
    if within_bound(1.0)? {
        return Visibility::new(1.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if within_bound(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Visibility::new(0.5 * (lo + hi))
}

/// [`critical_visibility`] of the spin-½ singlet, `1/√2`.
pub fn critical_visibility_chsh(tol: f64) -> Result<Visibility> {
    critical_visibility(&CorrelationModel::quantum_half(), tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AffineFit {
    pub params: DistortionParams,
    pub max_residual: f64,
}

/// Least-squares fit of `p_out ≈ s·p_in − b` under `s = 1 + K·b`.
///
/// Substituting the constraint gives `p_out − p_in = b·(K·p_in − 1)`, a
/// one-parameter regression through the origin.
pub fn fit_affine(pairs: &[(f64, f64)], k: usize) -> Result<AffineFit> {
    if pairs.len() < 2 {
        return Err(Error::Unidentifiable(format!("need at least 2 pairs, got {}", pairs.len())));
    }
    if pairs.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::domain("non-finite pair"));
    }
    let first = pairs[0].0;
    if pairs.iter().all(|(x, _)| *x == first) {
        return Err(Error::Unidentifiable("all input probabilities are equal".into()));
    }
    let kf = k as f64;
    let (num, den) = pairs.iter().fold((0.0, 0.0), |(n, d), &(x, y)| {
        let z = kf * x - 1.0;
        (n + z * (y - x), d + z * z)
    });
    if den == 0.0 {
        return Err(Error::Unidentifiable(format!("all inputs sit at the fixed point 1/{k}")));
    }
    let params = DistortionParams::new(num / den, k)?;
    let max_residual = pairs.iter().map(|&(x, y)| (y - params.apply(x)).abs()).fold(0.0, f64::max);
    Ok(AffineFit { params, max_residual })
}
