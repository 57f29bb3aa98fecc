//! Two-qubit density matrices, Born-rule probabilities and the PPT test.

mod linalg;

pub use linalg::Matrix4;

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::correlation::{Angle, JointDistribution};
use crate::error::{Error, Result};

/// Hermiticity and trace tolerance for [`DensityMatrix`].
pub const STATE_TOL: f64 = 1e-12;
/// Default tolerance on negative eigenvalues in PSD and PPT checks.
pub const DEFAULT_PSD_TOL: f64 = 1e-10;

/// Weight of the signal in a white-noise mixture, in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Visibility(f64);

impl Visibility {
    pub fn new(v: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::domain(format!("visibility {v} outside [0, 1]")));
        }
        Ok(Visibility(v))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Hermitian, unit-trace, positive semidefinite 4×4 matrix.
///
/// The basis index is `2i + j` for `|i⟩ ⊗ |j⟩`, with `0 = up` along z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[[f64; 2]; 4]; 4]", into = "[[[f64; 2]; 4]; 4]")]
pub struct DensityMatrix(Matrix4);

impl DensityMatrix {
    pub fn new(m: Matrix4) -> Result<Self> {
        Self::with_tolerance(m, DEFAULT_PSD_TOL)
    }

    pub fn with_tolerance(m: Matrix4, psd_tol: f64) -> Result<Self> {
        if m.0.iter().flatten().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        if !m.is_hermitian(STATE_TOL) {
            return Err(Error::InvalidState("not Hermitian".into()));
        }
        let tr = m.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min = m.hermitian_eigenvalues()[0];
        if min < -psd_tol {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(DensityMatrix(m))
    }

    /// `G·G† / tr(G·G†)`; valid for any nonzero `g`.
    pub fn from_gram(g: &Matrix4) -> Result<Self> {
        let m = *g * g.adjoint();
        let tr = m.trace().re;
        if tr <= 0.0 || !tr.is_finite() {
            return Err(Error::InvalidState("zero matrix has no normalized Gram state".into()));
        }
        let mut m = m.scale(1.0 / tr);
        // force exact Hermiticity against round-off in the product
        m = (m + m.adjoint()).scale(0.5);
        Self::new(m)
    }

    pub fn pure(psi: &[Complex64; 4]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        Self::new(Matrix4::outer(&psi.map(|x| x / norm)))
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix(Matrix4::identity().scale(0.25))
    }

    pub fn matrix(&self) -> &Matrix4 {
        &self.0
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        self.0.hermitian_eigenvalues()
    }

    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    /// `w·self + (1 − w)·other`; convex combinations stay valid states.
    pub(crate) fn mix(&self, other: &DensityMatrix, w: f64) -> DensityMatrix {
        DensityMatrix(self.0.scale(w) + other.0.scale(1.0 - w))
    }
}

impl TryFrom<[[[f64; 2]; 4]; 4]> for DensityMatrix {
    type Error = Error;

    fn try_from(raw: [[[f64; 2]; 4]; 4]) -> Result<Self> {
        DensityMatrix::new(Matrix4(raw.map(|r| r.map(|[re, im]| Complex64::new(re, im)))))
    }
}

impl From<DensityMatrix> for [[[f64; 2]; 4]; 4] {
    fn from(rho: DensityMatrix) -> Self {
        rho.0 .0.map(|r| r.map(|x| [x.re, x.im]))
    }
}

/// `|ψ⁻⟩⟨ψ⁻|` with `|ψ⁻⟩ = (|up,down⟩ − |down,up⟩)/√2`.
pub fn singlet_state() -> DensityMatrix {
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    DensityMatrix(Matrix4::outer(&[zero, s, -s, zero]))
}

/// `V·singlet + (1 − V)·I/4`.
pub fn werner_state(v: Visibility) -> DensityMatrix {
    singlet_state().mix(&DensityMatrix::maximally_mixed(), v.value())
}

/// Projectors onto `up` and `down` for an analyzer at `theta` in the x–z plane:
/// `P_up = (I + sinθ·σx + cosθ·σz)/2`.
fn analyzer_projectors(theta: f64) -> [[[f64; 2]; 2]; 2] {
    let (s, c) = theta.sin_cos();
    let up = [[0.5 * (1.0 + c), 0.5 * s], [0.5 * s, 0.5 * (1.0 - c)]];
    let down = [[0.5 * (1.0 - c), -0.5 * s], [-0.5 * s, 0.5 * (1.0 + c)]];
    [up, down]
}

/// `tr(ρ·(P_x(a) ⊗ P_y(b)))` for the four outcome pairs in order uu, ud, du, dd.
pub fn born_probabilities(rho: &DensityMatrix, a: Angle, b: Angle) -> JointDistribution {
    let pa = analyzer_projectors(a.radians());
    let pb = analyzer_projectors(b.radians());
    let m = rho.matrix();
    let mut out = [0.0; 4];
    for (x, px) in pa.iter().enumerate() {
        for (y, py) in pb.iter().enumerate() {
            // projectors are real symmetric, so tr(ρM) = Σ Re(ρ_rc)·M_rc
            let mut p = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    for k in 0..2 {
                        for l in 0..2 {
                            p += m.get(2 * i + j, 2 * k + l).re * px[i][k] * py[j][l];
                        }
                    }
                }
            }
            out[2 * x + y] = p;
        }
    }
    JointDistribution::from_array_unchecked(out)
}

/// Transposes the second subsystem: `((i,j),(k,l)) → ((i,l),(k,j))`.
pub fn partial_transpose(rho: &DensityMatrix) -> Matrix4 {
    partial_transpose_matrix(rho.matrix())
}

pub fn partial_transpose_matrix(m: &Matrix4) -> Matrix4 {
    let mut out = Matrix4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out.0[2 * i + j][2 * k + l] = m.get(2 * i + l, 2 * k + j);
                }
            }
        }
    }
    out
}

pub fn min_partial_transpose_eigenvalue(rho: &DensityMatrix) -> f64 {
    partial_transpose(rho).hermitian_eigenvalues()[0]
}

/// PPT verdict, conclusive for two qubits.
pub fn is_separable_2x2(rho: &DensityMatrix, tol: f64) -> bool {
    min_partial_transpose_eigenvalue(rho) >= -tol
}

/// Boundary visibility of a one-parameter family between separable (low V)
/// and entangled (high V), located by bisection to within `tol`.
///
/// Returns 1 when the whole family is separable and 0 when even `V = 0` is
/// entangled.
pub fn separability_threshold<F>(family: F, tol: f64) -> Result<Visibility>
where
    F: Fn(Visibility) -> DensityMatrix,
{
    if !(tol > 0.0) {
        return Err(Error::domain(format!("bisection tolerance {tol} must be positive")));
    }
    let separable = |v: f64| is_separable_2x2(&family(Visibility(v)), DEFAULT_PSD_TOL);
    if separable(1.0) {
        return Ok(Visibility(1.0));
    }
    if !separable(0.0) {
        return Ok(Visibility(0.0));
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if separable(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Visibility(0.5 * (lo + hi)))
}

/// Visibility below which Werner states are separable (1/3).
pub fn werner_separability_threshold(tol: f64) -> Result<Visibility> {
    separability_threshold(werner_state, tol)
}
