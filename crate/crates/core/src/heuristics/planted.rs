use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::early_stopping::early_stopping_run;
use crate::binmath::{RealTable, SubsystemMask};
use crate::error::{Error, Result};
use crate::hcsim::{sample, OutcomeDistribution};
use crate::qstate::{apply_controlled_rx, haar_random_state, tensor_product, StateVector};
use crate::seeding::derive_seed;

/// Register width up to which planted-cut probabilities are estimated.
pub const PLANTED_QUBIT_CAP: usize = 12;

/// Two Haar-random blocks joined by a controlled `Rx(φ)`; `φ = 0` leaves an
/// exact cut between them, `φ = π` can fully entangle the blocks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantedCutSpec {
    pub left: usize,
    pub right: usize,
    pub phi: f64,
    /// Defaults to qubit 0, the first qubit of the left block.
    #[serde(default)]
    pub control: Option<usize>,
    /// Defaults to qubit `n − 1`, the last qubit of the right block.
    #[serde(default)]
    pub target: Option<usize>,
}

impl PlantedCutSpec {
    pub fn new(left: usize, right: usize, phi: f64) -> Self {
        Self {
            left,
            right,
            phi,
            control: None,
            target: None,
        }
    }

    pub fn n(&self) -> usize {
        self.left + self.right
    }

    pub fn control(&self) -> usize {
        self.control.unwrap_or(0)
    }

    pub fn target(&self) -> usize {
        self.target.unwrap_or(self.n().saturating_sub(1))
    }

    /// The mask selecting the right block, e.g. `000111` for 3 + 3 qubits.
    pub fn planted_mask(&self) -> Result<SubsystemMask> {
        let qubits: Vec<usize> = (self.left..self.n()).collect();
        SubsystemMask::from_qubits(self.n(), &qubits)
    }

    /// Builds the state; the two blocks use child seeds 0 and 1 of `seed`.
    pub fn build(&self, seed: u64) -> Result<StateVector> {
        if self.left == 0 || self.right == 0 {
            return Err(Error::Config(
                "both planted blocks need at least one qubit".into(),
            ));
        }
        if !self.phi.is_finite() {
            return Err(Error::Config(format!(
                "rotation angle {} is not finite",
                self.phi
            )));
        }
        let a = haar_random_state(self.left, derive_seed(seed, 0))?;
        let b = haar_random_state(self.right, derive_seed(seed, 1))?;
        let product = tensor_product(&[a, b])?;
        apply_controlled_rx(&product, self.control(), self.target(), self.phi)
    }
}

/// Repetitions needed to estimate all `2ⁿ` survival probabilities to precision `eps`.
pub fn precision_repetitions(n: usize, eps: f64) -> Result<usize> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Domain(format!("precision {eps} must be positive")));
    }
    let reps = ((1u64 << n) as f64 / (eps * eps)).ceil();
    Ok(reps as usize)
}

/// Per-mask fraction of repetitions whose early-stopping survivors contain the mask.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurvivalFrequencies {
    pub repetitions: usize,
    pub shots: usize,
    pub t: u32,
    pub fractions: RealTable,
}

impl SurvivalFrequencies {
    pub fn probability(&self, mask: &SubsystemMask) -> Result<f64> {
        self.fractions.get(mask)
    }

    /// Binomial standard error of the fraction at `mask`.
    pub fn std_error(&self, mask: &SubsystemMask) -> Result<f64> {
        let p = self.probability(mask)?;
        Ok((p * (1.0 - p) / self.repetitions as f64).sqrt())
    }

    /// Nontrivial masks ordered by descending survival fraction, ties lexicographic.
    pub fn ranked_nontrivial(&self) -> Vec<(SubsystemMask, f64)> {
        let n = self.fractions.n();
        let mut out: Vec<(SubsystemMask, f64)> = self
            .fractions
            .values()
            .iter()
            .enumerate()
            .map(|(i, &f)| (SubsystemMask::from_index(n, i), f))
            .filter(|(m, _)| !m.is_trivial())
            .collect();
        out.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        out
    }
}

/// Runs the early-stopping filter `repetitions` times on `shots` fresh samples each (run `r`
/// seeded with `derive_seed(seed, r)`) and counts how often each mask survives.
pub fn survival_frequencies(
    dist: &OutcomeDistribution,
    shots: usize,
    repetitions: usize,
    seed: u64,
) -> Result<SurvivalFrequencies> {
    let n = dist.n();
    if n > PLANTED_QUBIT_CAP {
        return Err(Error::Capacity {
            what: "qubits for survival frequencies",
            requested: n,
            cap: PLANTED_QUBIT_CAP,
        });
    }
    if repetitions == 0 || shots == 0 {
        return Err(Error::Config(
            "repetitions and shots must be positive".into(),
        ));
    }
    let size = 1usize << n;
    let counts = (0..repetitions)
        .into_par_iter()
        .map(|r| -> Result<Vec<u32>> {
            let samples = sample(dist, shots, derive_seed(seed, r as u64))?;
            let survivors = early_stopping_run(&samples)?;
            let mut c = vec![0u32; size];
            for m in survivors.members() {
                c[m.index()] += 1;
            }
            Ok(c)
        })
        .try_reduce(
            || vec![0u32; size],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )?;
    let fractions = counts
        .into_iter()
        .map(|c| c as f64 / repetitions as f64)
        .collect();
    Ok(SurvivalFrequencies {
        repetitions,
        shots,
        t: dist.t(),
        fractions: RealTable::new(fractions)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantedCutEstimate {
    pub probability: f64,
    pub std_error: f64,
    pub repetitions: usize,
}

/// Fraction of early-stopping repetitions whose survivor set contains `target`.
pub fn find_planted_cut_probability(
    dist: &OutcomeDistribution,
    target: &SubsystemMask,
    shots: usize,
    repetitions: usize,
    seed: u64,
) -> Result<PlantedCutEstimate> {
    if target.len() != dist.n() {
        return Err(Error::Dimension(format!(
            "target {target} does not match the {}-qubit register",
            dist.n()
        )));
    }
    let freq = survival_frequencies(dist, shots, repetitions, seed)?;
    Ok(PlantedCutEstimate {
        probability: freq.probability(target)?,
        std_error: freq.std_error(target)?,
        repetitions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hcsim::exact_distribution;
    use crate::qstate::purity_table;

    fn planted_dist(phi: f64, t: u32, seed: u64) -> (OutcomeDistribution, SubsystemMask) {
        let spec = PlantedCutSpec::new(3, 3, phi);
        let state = spec.build(seed).unwrap();
        let dist = exact_distribution(&purity_table(&state).unwrap(), t).unwrap();
        (dist, spec.planted_mask().unwrap())
    }

    #[test]
    fn planted_mask_and_defaults() {
        let spec = PlantedCutSpec::new(3, 3, 0.1);
        assert_eq!(spec.planted_mask().unwrap().to_string(), "000111");
        assert_eq!((spec.control(), spec.target()), (0, 5));
        assert!(PlantedCutSpec::new(0, 3, 0.1).build(0).is_err());
    }

    #[test]
    fn exact_cut_always_survives() {
        for t in 1..=3 {
            let (dist, mask) = planted_dist(0.0, t, 11);
            let est = find_planted_cut_probability(&dist, &mask, 64, 400, 5).unwrap();
            assert_eq!(est.probability, 1.0, "t = {t}");
            assert_eq!(est.std_error, 0.0);
        }
    }

    #[test]
    fn frequencies_are_seeded_and_bounded() {
        let (dist, _) = planted_dist(1.0, 2, 3);
        let a = survival_frequencies(&dist, 32, 200, 9).unwrap();
        let b = survival_frequencies(&dist, 32, 200, 9).unwrap();
        assert_eq!(a, b);
        assert!(a
            .fractions
            .values()
            .iter()
            .all(|&f| (0.0..=1.0).contains(&f)));
        // the zero mask is orthogonal to everything
        assert_eq!(a.fractions[0], 1.0);
        assert_eq!(a.ranked_nontrivial().len(), 62);
    }

    #[test]
    fn precision_recipe() {
        assert_eq!(precision_repetitions(6, 0.05).unwrap(), 25_600);
        assert_eq!(precision_repetitions(6, 0.1).unwrap(), 6_400);
        assert!(precision_repetitions(6, 0.0).is_err());
    }
}
