//! Hidden-cut circuit output distributions: exact through the Fourier
//! identity `p_t = F⁻¹[Pᵗ]`, by repeated self-convolution, and by brute-force
//! gate-level simulation; plus sampling and the swap-test model.

mod circuit;
mod distribution;
mod sampling;

pub use circuit::{
    simulate_circuit_direct, simulate_circuit_direct_capped, DEFAULT_CIRCUIT_QUBIT_CAP,
};
pub use distribution::{
    all_zeros_probability, distribution_by_convolution, exact_distribution, DistributionRecord,
    OutcomeDistribution, DEFAULT_SUPPORT_THRESHOLD, NEGATIVE_ERROR_THRESHOLD,
    RENORMALIZE_THRESHOLD,
};
pub use sampling::{sample, swap_test_bernoulli, SampleSet};
