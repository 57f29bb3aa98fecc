//! Fixed-size 4×4 complex matrices and a Hermitian eigenvalue solver.

use std::ops::{Add, Mul};

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix4(pub [[Complex64; 4]; 4]);

impl Matrix4 {
    pub fn zeros() -> Self {
        Matrix4([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_real(rows: [[f64; 4]; 4]) -> Self {
        Matrix4(rows.map(|r| r.map(|x| Complex64::new(x, 0.0))))
    }

    /// `|ψ⟩⟨ψ|`
    pub fn outer(psi: &[Complex64; 4]) -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = psi[i] * psi[j].conj();
            }
        }
        m
    }

    /// Kronecker product of two 2×2 matrices; index `2i + j` addresses `|i⟩ ⊗ |j⟩`.
    pub fn kron(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> Self {
        let mut m = Self::zeros();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        m.0[2 * i + j][2 * k + l] = a[i][k] * b[j][l];
                    }
                }
            }
        }
        m
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[row][col]
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Matrix4(self.0.map(|r| r.map(|x| x * s)))
    }

    pub fn max_abs_diff(&self, other: &Matrix4) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                d = d.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        d
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    ///
    /// `H = A + iB` is embedded as the real symmetric block matrix
    /// `[[A, −B], [B, A]]`, whose spectrum is that of `H` with every value
    /// doubled; cyclic Jacobi then diagonalizes the 8×8 real matrix.
    pub fn hermitian_eigenvalues(&self) -> [f64; 4] {
        let mut s = [[0.0; 8]; 8];
        for i in 0..4 {
            for j in 0..4 {
                // symmetrize so round-off in the input cannot break the embedding
                let h = 0.5 * (self.0[i][j] + self.0[j][i].conj());
                s[i][j] = h.re;
                s[i + 4][j + 4] = h.re;
                s[i][j + 4] = -h.im;
                s[i + 4][j] = h.im;
            }
        }
        let mut ev = jacobi_eigenvalues(s);
        ev.sort_by(f64::total_cmp);
        // eigenvalues of the embedding come in equal pairs
        [ev[0], ev[2], ev[4], ev[6]]
    }
}

impl Add for Matrix4 {
    type Output = Matrix4;

    fn add(self, rhs: Matrix4) -> Matrix4 {
        let mut m = self;
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] += rhs.0[i][j];
            }
        }
        m
    }
}

impl Mul for Matrix4 {
    type Output = Matrix4;

    fn mul(self, rhs: Matrix4) -> Matrix4 {
        let mut m = Matrix4::zeros();
        for i in 0..4 {
            for k in 0..4 {
                let a = self.0[i][k];
                for j in 0..4 {
                    m.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        m
    }
}

/// Cyclic Jacobi rotations on a real symmetric matrix.
fn jacobi_eigenvalues<const N: usize>(mut a: [[f64; N]; N]) -> [f64; N] {
    for _sweep in 0..100 {
        let off: f64 = (0..N)
            .flat_map(|i| (0..N).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let diag: f64 = (0..N).map(|i| a[i][i] * a[i][i]).sum();
        if off <= 1e-32 * diag.max(1e-300) || off == 0.0 {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..N {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..N {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    std::array::from_fn(|i| a[i][i])
}
