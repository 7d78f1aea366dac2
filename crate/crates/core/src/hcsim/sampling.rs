use rand::distr::weighted::WeightedIndex;
use rand::distr::{Bernoulli, Distribution};
use serde::{Deserialize, Serialize};

use super::distribution::OutcomeDistribution;
use crate::binmath::{pow_u32, MeasurementMatrix, SubsystemMask};
use crate::error::{Error, Result};
use crate::seeding::rng_from_seed;

/// `m` measured `n`-bit outcomes together with the seed that produced them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSet {
    n: usize,
    seed: u64,
    samples: Vec<SubsystemMask>,
}

impl SampleSet {
    pub fn new(n: usize, seed: u64, samples: Vec<SubsystemMask>) -> Result<Self> {
        SubsystemMask::zeros(n)?;
        if let Some(bad) = samples.iter().find(|s| s.len() != n) {
            return Err(Error::Dimension(format!(
                "sample {bad} in a set of {n}-bit outcomes"
            )));
        }
        Ok(Self { n, seed, samples })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn shot_count(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[SubsystemMask] {
        &self.samples
    }

    /// Stacks the samples as rows of a measurement matrix.
    pub fn to_matrix(&self) -> MeasurementMatrix {
        MeasurementMatrix::from_rows(self.n, &self.samples).expect("samples share the width")
    }

    /// Fraction of single-bit samples equal to 1 (meaningful when `n = 1`).
    pub fn mean_of_ones(&self) -> f64 {
        let ones = self.samples.iter().filter(|s| !s.is_empty()).count();
        ones as f64 / self.samples.len().max(1) as f64
    }
}

/// `shots` i.i.d. categorical draws from `dist`.
pub fn sample(dist: &OutcomeDistribution, shots: usize, seed: u64) -> Result<SampleSet> {
    if shots == 0 {
        return Err(Error::Domain("shot count must be positive".into()));
    }
    let n = dist.n();
    let index = WeightedIndex::new(dist.probs().values())
        .map_err(|e| Error::NumericalConsistency(format!("cannot sample: {e}")))?;
    let mut rng = rng_from_seed(seed);
    let samples = (0..shots)
        .map(|_| SubsystemMask::from_index(n, index.sample(&mut rng)))
        .collect();
    SampleSet::new(n, seed, samples)
}

/// Swap-test model: `shots` single-bit outcomes, each 1 with probability
/// `(1 − Pᵗ)/2`.
pub fn swap_test_bernoulli(
    purity_value: f64,
    t: u32,
    shots: usize,
    seed: u64,
) -> Result<SampleSet> {
    if !(0.0..=1.0).contains(&purity_value) {
        return Err(Error::Domain(format!(
            "purity {purity_value} outside [0, 1]"
        )));
    }
    if t == 0 || shots == 0 {
        return Err(Error::Domain(
            "t and the shot count must be positive".into(),
        ));
    }
    let mu = 0.5 * (1.0 - pow_u32(purity_value, t));
    let coin = Bernoulli::new(mu).map_err(|e| Error::Domain(e.to_string()))?;
    let mut rng = rng_from_seed(seed);
    let one = SubsystemMask::ones(1)?;
    let zero = SubsystemMask::zeros(1)?;
    let samples = (0..shots)
        .map(|_| if coin.sample(&mut rng) { one } else { zero })
        .collect();
    SampleSet::new(1, seed, samples)
}
