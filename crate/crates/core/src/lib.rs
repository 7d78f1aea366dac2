//! Classical simulation and postprocessing for the hidden-cut algorithm.
//!
//! The output distribution of the hidden-cut circuit run with `t` pairs of
//! state copies is the inverse ℤ₂ⁿ Fourier transform of the subsystem purity
//! function raised to the `t`-th power. This crate computes that distribution
//! exactly (and by brute-force circuit simulation for small registers),
//! samples from it, and implements two postprocessing heuristics for finding
//! weakly entangled bipartitions: early-stopped nullspace elimination and a
//! classical purity estimator built from the measurement matrix.

pub mod abelianhsp;
pub mod binmath;
pub mod error;
pub mod experiments;
pub mod hcsim;
pub mod heuristics;
pub mod qstate;
pub mod seeding;

pub use error::{Error, Result};
