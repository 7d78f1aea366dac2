//! Seeded, config-driven experiment pipelines that emit plot-ready CSV/JSON.

mod artifact;
mod config;
mod runs;

use std::fmt;
use std::str::FromStr;

pub use artifact::{write_artifacts, Artifact};
pub use config::{ExperimentConfig, StateRecipe};
pub use runs::{
    run_abelian_demo, run_distribution_scan, run_estimator_demo, run_planted_cut_sweep,
    run_purity_scan,
};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verb {
    PurityScan,
    DistScan,
    PlantedSweep,
    EstimatorDemo,
    AbelianDemo,
}

impl Verb {
    pub const ALL: [Verb; 5] = [
        Verb::PurityScan,
        Verb::DistScan,
        Verb::PlantedSweep,
        Verb::EstimatorDemo,
        Verb::AbelianDemo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Verb::PurityScan => "purity-scan",
            Verb::DistScan => "dist-scan",
            Verb::PlantedSweep => "planted-sweep",
            Verb::EstimatorDemo => "estimator-demo",
            Verb::AbelianDemo => "abelian-demo",
        }
    }

    pub fn run(self, cfg: &ExperimentConfig) -> Result<Vec<Artifact>> {
        match self {
            Verb::PurityScan => run_purity_scan(cfg),
            Verb::DistScan => run_distribution_scan(cfg),
            Verb::PlantedSweep => run_planted_cut_sweep(cfg),
            Verb::EstimatorDemo => run_estimator_demo(cfg),
            Verb::AbelianDemo => run_abelian_demo(cfg),
        }
    }
}

impl fmt::Display for Verb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Verb {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Verb::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment {s:?}")))
    }
}
