//! Classical and quantum models of two-outcome pair experiments, and the ways
//! noise, distortion and heterogeneous populations make them indistinguishable.
//!
//! - [`correlation`]: joint distributions of Bell's linear hidden-variable
//!   model and of the singlet, correlation functions, CHSH evaluation and
//!   maximization, and classical angles that imitate quantum ones.
//! - [`quantum_state`]: two-qubit density matrices, Born probabilities,
//!   Werner states and the partial-transpose separability test.
//! - [`distortion`]: the normalized affine map `p′ = s·p − b`, its white-noise
//!   form on states, critical visibilities, affine fitting and lateral
//!   inhibition networks.
//! - [`trial_sim`]: seeded, thread-count independent Monte Carlo of CHSH
//!   experiments and of self-selected clinical trials.
//! - [`cli`]: the `bellnoise` command-line front end.

pub mod cli;
pub mod correlation;
pub mod distortion;
pub mod error;
pub mod quantum_state;
pub mod trial_sim;

pub use error::{Error, Result};
