use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::binmath::{parity, SubsystemMask};
use crate::error::{Error, Result};
use crate::hcsim::SampleSet;

/// Register width up to which survivor sets are stored explicitly.
pub const DEFAULT_EARLY_STOP_CAP: usize = 20;

/// Candidate set left after early-stopped elimination.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurvivorSet {
    n: usize,
    members: Vec<SubsystemMask>,
    /// Unique samples applied before stopping.
    processed: usize,
    /// True when elimination halted because the next sample would have left
    /// only the trivial masks; false when the unique samples ran out.
    collapsed: bool,
}

impl SurvivorSet {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Surviving masks in lexicographic order.
    pub fn members(&self) -> &[SubsystemMask] {
        &self.members
    }

    pub fn into_members(self) -> Vec<SubsystemMask> {
        self.members
    }

    pub fn contains(&self, s: &SubsystemMask) -> bool {
        self.members.binary_search(s).is_ok()
    }

    pub fn processed(&self) -> usize {
        self.processed
    }

    pub fn collapsed(&self) -> bool {
        self.collapsed
    }

    /// False when nothing was eliminated: either every sample was 0ⁿ or the
    /// very first informative sample already forced the trivial set.
    pub fn is_informative(&self) -> bool {
        self.members.len() < 1 << self.n
    }
}

/// Unique samples ordered by descending count, ties lexicographic.
pub fn unique_by_frequency(samples: &SampleSet) -> Vec<(SubsystemMask, usize)> {
    let mut counts: BTreeMap<SubsystemMask, usize> = BTreeMap::new();
    for s in samples.samples() {
        *counts.entry(*s).or_default() += 1;
    }
    let mut ordered: Vec<(SubsystemMask, usize)> = counts.into_iter().collect();
    ordered.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    ordered
}

/// One early-stopping pass over the samples with the default cap.
pub fn early_stopping_run(samples: &SampleSet) -> Result<SurvivorSet> {
    early_stopping_run_capped(samples, DEFAULT_EARLY_STOP_CAP)
}

/// Processes the unique samples from most to least frequent, keeping only
/// candidates `s` with `x·s = 0`, and stops just before the candidate set
/// would shrink to the trivial masks {0ⁿ, 1ⁿ} or when the samples run out.
pub fn early_stopping_run_capped(samples: &SampleSet, cap: usize) -> Result<SurvivorSet> {
    let n = samples.n();
    if n > cap {
        return Err(Error::Capacity {
            what: "qubits for explicit candidate sets",
            requested: n,
            cap,
        });
    }
    if samples.shot_count() == 0 {
        return Err(Error::Domain(
            "early stopping needs at least one sample".into(),
        ));
    }
    let ones = SubsystemMask::ones(n)?.bits();
    let mut current: Vec<u64> = (0..1u64 << n).collect();
    let mut processed = 0;
    let mut collapsed = false;
    let mut next = Vec::with_capacity(current.len());
    for (x, _) in unique_by_frequency(samples) {
        let x = x.bits();
        next.clear();
        next.extend(current.iter().copied().filter(|&s| parity(x & s) == 0));
        if next.iter().all(|&s| s == 0 || s == ones) {
            collapsed = true;
            break;
        }
        std::mem::swap(&mut current, &mut next);
        processed += 1;
    }
    Ok(SurvivorSet {
        n,
        members: current
            .into_iter()
            .map(|b| SubsystemMask::new(n, b).expect("in range"))
            .collect(),
        processed,
        collapsed,
    })
}
