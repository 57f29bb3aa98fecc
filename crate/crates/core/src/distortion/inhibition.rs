//! Lateral inhibition: each unit's output is its input minus weighted outputs
//! of the others, `y = x − W·y`, optionally rectified at zero.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InhibitionNetwork {
    inputs: Vec<f64>,
    weights: Vec<Vec<f64>>,
    rectified: bool,
    spectral_radius: f64,
}

impl InhibitionNetwork {
    pub fn new(inputs: Vec<f64>, weights: Vec<Vec<f64>>, rectified: bool) -> Result<Self> {
        let n = inputs.len();
        if n == 0 {
            return Err(Error::domain("network needs at least one unit"));
        }
        if inputs.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(Error::domain("inputs must be finite and nonnegative"));
        }
        if weights.len() != n || weights.iter().any(|r| r.len() != n) {
            return Err(Error::domain(format!("weight matrix must be {n}x{n}")));
        }
        for (i, row) in weights.iter().enumerate() {
            if row.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
                return Err(Error::domain("weights must be finite and nonnegative"));
            }
            if row[i] != 0.0 {
                return Err(Error::domain(format!("self-inhibition w[{i}][{i}] must be zero")));
            }
        }
        let spectral_radius = spectral_radius(&weights);
        if !rectified && spectral_radius >= 1.0 {
            return Err(Error::domain(format!(
                "linear network needs spectral radius < 1, estimated {spectral_radius}"
            )));
        }
        Ok(InhibitionNetwork { inputs, weights, rectified, spectral_radius })
    }

    /// Every off-diagonal weight equal to `w`.
    pub fn uniform(inputs: Vec<f64>, w: f64, rectified: bool) -> Result<Self> {
        let n = inputs.len();
        let weights = (0..n).map(|i| (0..n).map(|j| if i == j { 0.0 } else { w }).collect()).collect();
        Self::new(inputs, weights, rectified)
    }

    pub fn inputs(&self) -> &[f64] {
        &self.inputs
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn rectified(&self) -> bool {
        self.rectified
    }

    /// Perron root upper bound of `W` from power iteration.
    pub fn spectral_radius(&self) -> f64 {
        self.spectral_radius
    }

    fn step(&self, y: &[f64]) -> Vec<f64> {
        self.inputs
            .iter()
            .zip(&self.weights)
            .map(|(x, row)| {
                let v = x - row.iter().zip(y).map(|(w, yj)| w * yj).sum::<f64>();
                if self.rectified {
                    v.max(0.0)
                } else {
                    v
                }
            })
            .collect()
    }

    pub fn steady_state(&self, opts: SteadyStateOptions) -> Result<Vec<f64>> {
        let contraction = self.spectral_radius.min(0.999);
        let step_tol = opts.tol * (1.0 - contraction);
        let mut y = vec![0.0; self.inputs.len()];
        let mut damping = 1.0;
        let mut last = f64::INFINITY;
        for _ in 0..opts.max_iterations {
            let next = self.step(&y);
            let delta = max_abs_diff(&next, &y);
            if delta <= step_tol {
                return Ok(next);
            }
            if self.rectified && delta >= last {
                // oscillating, fall back to half steps
                damping = 0.5;
            }
            last = delta;
            for (yi, ni) in y.iter_mut().zip(&next) {
                *yi += damping * (ni - *yi);
            }
        }
        let residual = max_abs_diff(&self.step(&y), &y);
        Err(Error::NonConvergence { iterations: opts.max_iterations, residual })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SteadyStateOptions {
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for SteadyStateOptions {
    fn default() -> Self {
        SteadyStateOptions { tol: 1e-10, max_iterations: 100_000 }
    }
}

/// Fixed point of the network with default tolerance `1e-10` and `10⁵` iterations.
pub fn inhibition_steady_state(net: &InhibitionNetwork) -> Result<Vec<f64>> {
    net.steady_state(SteadyStateOptions::default())
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Power iteration on `I + W`, which is aperiodic with the same Perron vector;
/// the Collatz–Wielandt maximum ratio bounds `1 + ρ(W)` from above.
fn spectral_radius(w: &[Vec<f64>]) -> f64 {
    let n = w.len();
    let mut v = vec![1.0; n];
    let mut upper = f64::INFINITY;
    for _ in 0..10_000 {
        let next: Vec<f64> = (0..n).map(|i| v[i] + w[i].iter().zip(&v).map(|(a, b)| a * b).sum::<f64>()).collect();
        let ratios = next.iter().zip(&v).map(|(a, b)| a / b);
        let (lo, hi) = ratios.fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r), hi.max(r)));
        upper = hi;
        let norm = next.iter().cloned().fold(0.0, f64::max);
        v = next.into_iter().map(|x| x / norm).collect();
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    upper - 1.0
}
