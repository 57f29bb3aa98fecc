use std::f64::consts::TAU;

use serde::Serialize;

use super::optimize::{nelder_mead, NelderMeadOptions};
use super::{model_correlation, Angle, CorrelationModel, Settings4};

/// Grid resolution for the exhaustive stage of [`maximize_chsh`]: 2°.
const GRID_POINTS: usize = 180;

/// `E(a,b) − E(a,b′) + E(a′,b) + E(a′,b′)`.
pub fn chsh(m: &CorrelationModel, s: &Settings4) -> f64 {
    let e = |x: Angle, y: Angle| model_correlation(m, x, y);
    e(s.a, s.b) - e(s.a, s.b_prime) + e(s.a_prime, s.b) + e(s.a_prime, s.b_prime)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChshMaximum {
    pub settings: Settings4,
    /// Largest `|chsh|` found.
    pub value: f64,
}

/// Maximizes `|chsh|` over all four angles.
///
/// Every combination of angles on a 2° grid over `[0, 2π)` is scored exactly:
/// the correlation table is computed once, and for each pair of Bob settings
/// the two Alice settings are optimized independently since the sum
/// separates. The best grid point is then polished with Nelder–Mead.
pub fn maximize_chsh(m: &CorrelationModel) -> ChshMaximum {
    let n = GRID_POINTS;
    let grid: Vec<f64> = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
    let table: Vec<f64> = grid
        .iter()
        .flat_map(|&x| grid.iter().map(move |&y| (x, y)))
        .map(|(x, y)| model_correlation(m, Angle(x), Angle(y)))
        .collect();
    let e = |i: usize, j: usize| table[i * n + j];

    let mut best = (f64::NEG_INFINITY, [0usize; 4]);
    for j in 0..n {
        for k in 0..n {
            let (mut d_max, mut d_min) = ((f64::NEG_INFINITY, 0), (f64::INFINITY, 0));
            let (mut s_max, mut s_min) = ((f64::NEG_INFINITY, 0), (f64::INFINITY, 0));
            for i in 0..n {
                let d = e(i, j) - e(i, k);
                let s = e(i, j) + e(i, k);
                if d > d_max.0 {
                    d_max = (d, i);
                }
                if d < d_min.0 {
                    d_min = (d, i);
                }
                if s > s_max.0 {
                    s_max = (s, i);
                }
                if s < s_min.0 {
                    s_min = (s, i);
                }
            }
            let hi = d_max.0 + s_max.0;
            let lo = d_min.0 + s_min.0;
            if hi > best.0 {
                best = (hi, [d_max.1, s_max.1, j, k]);
            }
            if -lo > best.0 {
                best = (-lo, [d_min.1, s_min.1, j, k]);
            }
        }
    }

    let start = best.1.map(|i| grid[i]);
    let objective = |x: &[f64]| -chsh(m, &Settings4::new(x[0], x[1], x[2], x[3])).abs();
    let opts = NelderMeadOptions { initial_step: TAU / n as f64 / 2.0, ..Default::default() };
    let refined = nelder_mead(objective, &start, opts);

    let x = if -refined.f >= best.0 { refined.x } else { start.to_vec() };
    let settings = Settings4::new(x[0], x[1], x[2], x[3]);
    ChshMaximum { settings, value: chsh(m, &settings).abs() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlation::SpinConvention;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::SQRT_2;

    #[test]
    fn standard_settings() {
        let s = Settings4::standard();
        assert_abs_diff_eq!(chsh(&CorrelationModel::quantum_half(), &s).abs(), 2.0 * SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(chsh(&CorrelationModel::ClassicalLinear, &s).abs(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_settings_collapse() {
        let s = Settings4::new(0.4, 0.4, 1.3, 1.3);
        for m in [CorrelationModel::ClassicalLinear, CorrelationModel::quantum_half()] {
            let e = model_correlation(&m, Angle(0.4), Angle(1.3));
            assert_abs_diff_eq!(chsh(&m, &s), 2.0 * e, epsilon = 1e-12);
        }
    }

    #[test]
    fn maxima() {
        let q = maximize_chsh(&CorrelationModel::quantum_half());
        assert_abs_diff_eq!(q.value, 2.0 * SQRT_2, epsilon = 1e-6);
        let c = maximize_chsh(&CorrelationModel::ClassicalLinear);
        assert_abs_diff_eq!(c.value, 2.0, epsilon = 1e-6);
        let p = maximize_chsh(&CorrelationModel::Quantum(SpinConvention::Photon));
        assert_abs_diff_eq!(p.value, 2.0 * SQRT_2, epsilon = 1e-6);
    }

    #[test]
    fn half_visibility_halves_the_maximum() {
        let m = CorrelationModel::with_visibility(CorrelationModel::quantum_half(), 0.5).unwrap();
        assert_abs_diff_eq!(maximize_chsh(&m).value, SQRT_2, epsilon = 1e-6);
    }

    #[test]
    fn reported_settings_reproduce_value() {
        let q = maximize_chsh(&CorrelationModel::quantum_half());
        assert_abs_diff_eq!(chsh(&CorrelationModel::quantum_half(), &q.settings).abs(), q.value);
    }
}
