//! Seeded Monte Carlo of pair experiments and clinical-trial scenarios.

mod breilmann;
mod estimate;
mod masking;
mod rng;

pub use breilmann::{breilmann_trial, BreilmannConfig, OutcomeRule, TraitDistribution, TrialResult};
pub use estimate::{estimate_chsh, Assignment, AngleMode, ChshEstimate, PopulationConfig, Verdict};
pub use masking::{masking_report, masking_report_with, MaskingReport, MaskingRow, DEFAULT_JITTER_SPREAD};
pub use rng::StreamFactory;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::correlation::{Angle, CorrelationModel, JointDistribution};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Up,
    Down,
}

/// Index of an outcome pair in the fixed cell order uu, ud, du, dd.
pub fn cell_index(pair: (Outcome, Outcome)) -> usize {
    match pair {
        (Outcome::Up, Outcome::Up) => 0,
        (Outcome::Up, Outcome::Down) => 1,
        (Outcome::Down, Outcome::Up) => 2,
        (Outcome::Down, Outcome::Down) => 3,
    }
}

const CELLS: [(Outcome, Outcome); 4] = [
    (Outcome::Up, Outcome::Up),
    (Outcome::Up, Outcome::Down),
    (Outcome::Down, Outcome::Up),
    (Outcome::Down, Outcome::Down),
];

/// Inverse CDF over the cells in order uu, ud, du, dd for a uniform `u ∈ [0, 1)`.
pub(crate) fn cell_for_uniform(d: &JointDistribution, u: f64) -> usize {
    let p = d.as_array();
    let mut acc = 0.0;
    for (i, pi) in p.iter().enumerate().take(3) {
        acc += pi;
        if u < acc {
            return i;
        }
    }
    3
}

/// Draws one outcome pair from the model's joint distribution.
pub fn sample_pair<R: Rng + ?Sized>(m: &CorrelationModel, a: Angle, b: Angle, rng: &mut R) -> Result<(Outcome, Outcome)> {
    let d = m.joint(a, b)?;
    Ok(CELLS[cell_for_uniform(&d, rng.random::<f64>())])
}
