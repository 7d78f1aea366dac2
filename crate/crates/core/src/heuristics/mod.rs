//! Classical postprocessing of hidden-cut samples: early-stopping cut search
//! and the reusable purity estimator.

mod cuts;
mod early_stopping;
mod estimator;
mod planted;

pub use crate::binmath::MeasurementMatrix;
pub use cuts::{
    aggregate_cuts, early_stopping_trial, extract_cut, run_early_stopping_heuristic, CutCandidate,
    CutFrequency, CutReport, HeuristicParams, Partition, DEFAULT_MERGE_THRESHOLD, DEFAULT_RUNS,
    DEFAULT_SHOTS_PER_RUN,
};
pub use early_stopping::{
    early_stopping_run, early_stopping_run_capped, unique_by_frequency, SurvivorSet,
    DEFAULT_EARLY_STOP_CAP,
};
pub use estimator::{
    estimate_purity_t, estimator_distribution, estimator_stats, export_two_layer_network,
    hidden_cut_estimates, ks_two_sample, mean_and_variance, swap_test_estimates, EstimatorPmf,
    EstimatorStats, KsResult, TwoLayerNetwork, KS_CRITICAL_COEFF_1PCT,
};
pub use planted::{
    find_planted_cut_probability, precision_repetitions, survival_frequencies, PlantedCutEstimate,
    PlantedCutSpec, SurvivalFrequencies, PLANTED_QUBIT_CAP,
};
