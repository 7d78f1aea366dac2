use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::early_stopping::{early_stopping_run, SurvivorSet};
use crate::binmath::{basis_gf2, span_gf2, SubsystemMask};
use crate::error::{Error, Result};
use crate::hcsim::{sample, OutcomeDistribution};
use crate::seeding::derive_seed;

/// Default merge threshold: cuts seen in more than this fraction of runs are merged.
pub const DEFAULT_MERGE_THRESHOLD: f64 = 0.1;
/// Default number of shots per early-stopping run.
pub const DEFAULT_SHOTS_PER_RUN: usize = 64;
/// Default number of early-stopping runs aggregated into a report.
pub const DEFAULT_RUNS: usize = 50;

/// A set of disjoint qubit blocks covering `0..n`, kept in canonical order
/// (blocks sorted by their smallest qubit).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "PartitionRecord", into = "PartitionRecord")]
pub struct Partition {
    n: usize,
    blocks: Vec<SubsystemMask>,
}

#[derive(Serialize, Deserialize)]
struct PartitionRecord {
    n: usize,
    blocks: Vec<SubsystemMask>,
}

impl TryFrom<PartitionRecord> for Partition {
    type Error = Error;

    fn try_from(r: PartitionRecord) -> Result<Self> {
        Partition::new(r.n, r.blocks)
    }
}

impl From<Partition> for PartitionRecord {
    fn from(p: Partition) -> Self {
        PartitionRecord {
            n: p.n,
            blocks: p.blocks,
        }
    }
}

fn first_qubit(m: &SubsystemMask) -> usize {
    m.qubits().next().unwrap_or(usize::MAX)
}

impl Partition {
    pub fn new(n: usize, mut blocks: Vec<SubsystemMask>) -> Result<Self> {
        let mut covered = SubsystemMask::zeros(n)?;
        for b in &blocks {
            if b.len() != n || b.is_empty() {
                return Err(Error::Domain(format!("invalid block {b} for {n} qubits")));
            }
            if !covered.and(b)?.is_empty() {
                return Err(Error::Domain(format!("block {b} overlaps another block")));
            }
            covered = covered.xor(b)?;
        }
        if !covered.is_all_ones() {
            return Err(Error::Domain(format!(
                "blocks cover {covered}, not every qubit"
            )));
        }
        blocks.sort_by_key(first_qubit);
        Ok(Self { n, blocks })
    }

    /// The trivial partition with every qubit in one block.
    pub fn single_block(n: usize) -> Result<Self> {
        Ok(Self {
            n,
            blocks: vec![SubsystemMask::ones(n)?],
        })
    }

    /// Builds a partition from qubit lists such as `[[0, 1, 3], [2]]`.
    pub fn from_qubit_lists(n: usize, lists: &[&[usize]]) -> Result<Self> {
        let blocks = lists
            .iter()
            .map(|l| SubsystemMask::from_qubits(n, l))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, blocks)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[SubsystemMask] {
        &self.blocks
    }

    pub fn is_trivial(&self) -> bool {
        self.blocks.len() == 1
    }

    /// Common refinement: all nonempty pairwise block intersections.
    pub fn refine(&self, other: &Partition) -> Result<Partition> {
        if self.n != other.n {
            return Err(Error::Dimension(format!(
                "cannot refine a {}-qubit partition with a {}-qubit one",
                self.n, other.n
            )));
        }
        let mut blocks = Vec::new();
        for a in &self.blocks {
            for b in &other.blocks {
                let c = a.and(b)?;
                if !c.is_empty() {
                    blocks.push(c);
                }
            }
        }
        Partition::new(self.n, blocks)
    }
}

impl fmt::Display for Partition {
    /// `{013}{2}` style; qubit labels are comma-separated once any exceeds 9.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.n > 10 { "," } else { "" };
        for b in &self.blocks {
            let labels: Vec<String> = b.qubits().map(|q| q.to_string()).collect();
            write!(f, "{{{}}}", labels.join(sep))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Partition({self})")
    }
}

/// A cut suggested by one early-stopping run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutCandidate {
    pub nullspace_basis: Vec<SubsystemMask>,
    pub partition: Partition,
}

impl CutCandidate {
    /// Whether every block is itself a member of the spanned group, i.e.
    /// the state would factor exactly along this partition if the members
    /// were a true hidden subgroup.
    pub fn blocks_in_span(&self) -> bool {
        let span = match span_gf2(self.partition.n, &self.nullspace_basis) {
            Ok(s) => s,
            Err(_) => return false,
        };
        self.partition
            .blocks
            .iter()
            .all(|b| span.binary_search(b).is_ok())
    }
}

/// Finest partition consistent with a set of masks: qubits `i` and `j` share
/// a block iff every member of the spanned group has equal bits at `i` and `j`.
/// The input is closed under xor first; an empty input yields one block.
pub fn extract_cut(n: usize, members: &[SubsystemMask]) -> Result<CutCandidate> {
    let basis = basis_gf2(n, members)?;
    // agreement over the generators is agreement over the whole span
    let signature = |q: usize| -> Vec<bool> { basis.iter().map(|b| b.contains(q)).collect() };
    let mut groups: BTreeMap<Vec<bool>, Vec<usize>> = BTreeMap::new();
    for q in 0..n {
        groups.entry(signature(q)).or_default().push(q);
    }
    let blocks = groups
        .values()
        .map(|qs| SubsystemMask::from_qubits(n, qs))
        .collect::<Result<Vec<_>>>()?;
    Ok(CutCandidate {
        nullspace_basis: basis,
        partition: Partition::new(n, blocks)?,
    })
}

/// Run configuration of the full early-stopping heuristic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeuristicParams {
    pub t: u32,
    /// Shots per run (`l`).
    pub shots: usize,
    /// Number of runs (`k`).
    pub runs: usize,
    pub threshold: f64,
}

impl HeuristicParams {
    pub fn with_defaults(t: u32) -> Self {
        Self {
            t,
            shots: DEFAULT_SHOTS_PER_RUN,
            runs: DEFAULT_RUNS,
            threshold: DEFAULT_MERGE_THRESHOLD,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutFrequency {
    pub label: String,
    pub partition: Partition,
    pub fraction: f64,
}

/// Aggregated outcome of `k` early-stopping runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutReport {
    pub runs: usize,
    pub threshold: f64,
    /// Every observed partition with its fraction of runs, most frequent first.
    pub candidate_frequencies: Vec<CutFrequency>,
    /// Partitions above the threshold, most frequent first. Reading these in
    /// order exposes hierarchical structure among the merged cuts.
    pub hierarchy: Vec<CutFrequency>,
    pub merged_partition: Partition,
    pub merged_label: String,
    pub no_confident_cut: bool,
    pub params: Option<HeuristicParams>,
}

/// Counts partitions over the runs and merges those observed in more than
/// `threshold` of them by taking their common refinement.
pub fn aggregate_cuts(candidates: &[CutCandidate], threshold: f64) -> Result<CutReport> {
    let first = candidates
        .first()
        .ok_or_else(|| Error::Domain("aggregation needs at least one run".into()))?;
    let n = first.partition.n;
    let k = candidates.len();
    let mut counts: BTreeMap<&Partition, usize> = BTreeMap::new();
    for c in candidates {
        if c.partition.n != n {
            return Err(Error::Dimension(
                "candidates over different registers".into(),
            ));
        }
        *counts.entry(&c.partition).or_default() += 1;
    }
    let mut frequencies: Vec<CutFrequency> = counts
        .into_iter()
        .map(|(p, c)| CutFrequency {
            label: p.to_string(),
            partition: p.clone(),
            fraction: c as f64 / k as f64,
        })
        .collect();
    frequencies.sort_by(|a, b| {
        b.fraction
            .total_cmp(&a.fraction)
            .then_with(|| a.partition.cmp(&b.partition))
    });
    let hierarchy: Vec<CutFrequency> = frequencies
        .iter()
        .filter(|f| f.fraction > threshold)
        .cloned()
        .collect();
    let mut merged = Partition::single_block(n)?;
    for f in &hierarchy {
        merged = merged.refine(&f.partition)?;
    }
    Ok(CutReport {
        runs: k,
        threshold,
        candidate_frequencies: frequencies,
        no_confident_cut: hierarchy.is_empty(),
        hierarchy,
        merged_label: merged.to_string(),
        merged_partition: merged,
        params: None,
    })
}

/// One early-stopping run on fresh samples: returns the survivors and the cut they suggest.
pub fn early_stopping_trial(
    dist: &OutcomeDistribution,
    shots: usize,
    seed: u64,
) -> Result<(SurvivorSet, CutCandidate)> {
    let samples = sample(dist, shots, seed)?;
    let survivors = early_stopping_run(&samples)?;
    let cut = extract_cut(dist.n(), survivors.members())?;
    Ok((survivors, cut))
}

/// All six steps: `k` seeded runs of sampling + early stopping + cut
/// extraction, then aggregation. Run `r` uses `derive_seed(seed, r)`.
pub fn run_early_stopping_heuristic(
    dist: &OutcomeDistribution,
    params: &HeuristicParams,
    seed: u64,
) -> Result<CutReport> {
    if params.runs == 0 || params.shots == 0 {
        return Err(Error::Config("runs and shots must be positive".into()));
    }
    if params.t != dist.t() {
        return Err(Error::Config(format!(
            "parameters request t = {} but the distribution has t = {}",
            params.t,
            dist.t()
        )));
    }
    let candidates = (0..params.runs)
        .into_par_iter()
        .map(|r| {
            early_stopping_trial(dist, params.shots, derive_seed(seed, r as u64)).map(|(_, c)| c)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = aggregate_cuts(&candidates, params.threshold)?;
    report.params = Some(params.clone());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn masks(v: &[&str]) -> Vec<SubsystemMask> {
        v.iter().map(|s| s.parse().unwrap()).collect()
    }

    fn candidate(n: usize, lists: &[&[usize]]) -> CutCandidate {
        CutCandidate {
            nullspace_basis: vec![],
            partition: Partition::from_qubit_lists(n, lists).unwrap(),
        }
    }

    #[test]
    fn extract_example_cut() {
        let c = extract_cut(4, &masks(&["0000", "0010", "1101", "1111"])).unwrap();
        assert_eq!(c.partition.to_string(), "{013}{2}");
        assert!(c.blocks_in_span());
    }

    #[test]
    fn extract_trivial_and_product_cuts() {
        assert!(extract_cut(4, &masks(&["0000", "1111"]))
            .unwrap()
            .partition
            .is_trivial());
        assert!(extract_cut(3, &[]).unwrap().partition.is_trivial());
        let c = extract_cut(4, &masks(&["0000", "0011", "1100", "1111"])).unwrap();
        assert_eq!(c.partition.to_string(), "{01}{23}");
        // generators alone give the same cut
        assert_eq!(
            extract_cut(4, &masks(&["0011", "1100"])).unwrap().partition,
            c.partition
        );
    }

    #[test]
    fn extraction_of_non_factorizing_group() {
        // even-weight subgroup of Z_2^3: every pair of qubits is separated,
        // yet the singleton blocks are not group members
        let c = extract_cut(3, &masks(&["110", "011"])).unwrap();
        assert_eq!(c.partition.to_string(), "{0}{1}{2}");
        assert!(!c.blocks_in_span());
    }

    #[test]
    fn merge_example() {
        let mut runs = Vec::new();
        runs.extend(std::iter::repeat_n(candidate(4, &[&[0, 1, 3], &[2]]), 4));
        runs.extend(std::iter::repeat_n(candidate(4, &[&[0, 1, 2], &[3]]), 6));
        let report = aggregate_cuts(&runs, 0.1).unwrap();
        assert_eq!(report.merged_label, "{01}{2}{3}");
        assert!(!report.no_confident_cut);
        assert_eq!(report.hierarchy[0].label, "{012}{3}");
        assert!((report.hierarchy[0].fraction - 0.6).abs() < 1e-15);
        assert!((report.hierarchy[1].fraction - 0.4).abs() < 1e-15);
    }

    #[test]
    fn merge_single_and_none() {
        let one = aggregate_cuts(&[candidate(3, &[&[0], &[1, 2]])], 0.1).unwrap();
        assert_eq!(one.merged_label, "{0}{12}");

        let runs: Vec<CutCandidate> = (0..20)
            .map(|i| match i % 20 {
                0 => candidate(3, &[&[0], &[1, 2]]),
                1 => candidate(3, &[&[1], &[0, 2]]),
                _ => candidate(3, &[&[0, 1, 2]]),
            })
            .collect();
        // trivial cut dominates but refines nothing; the rare cuts are filtered
        let report = aggregate_cuts(&runs, 0.1).unwrap();
        assert!(report.merged_partition.is_trivial());

        let sparse: Vec<CutCandidate> = (0..20)
            .map(|i| match i % 4 {
                0 => candidate(4, &[&[0], &[1, 2, 3]]),
                1 => candidate(4, &[&[1], &[0, 2, 3]]),
                2 => candidate(4, &[&[2], &[0, 1, 3]]),
                _ => candidate(4, &[&[3], &[0, 1, 2]]),
            })
            .collect();
        let none = aggregate_cuts(&sparse, 0.3).unwrap();
        assert!(none.no_confident_cut);
        assert!(none.merged_partition.is_trivial());
        let total: f64 = none.candidate_frequencies.iter().map(|f| f.fraction).sum();
        assert!(total <= 1.0 + 1e-12);
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::from_qubit_lists(3, &[&[0, 1], &[1, 2]]).is_err());
        assert!(Partition::from_qubit_lists(3, &[&[0, 1]]).is_err());
        let p = Partition::from_qubit_lists(3, &[&[2], &[0, 1]]).unwrap();
        assert_eq!(p.to_string(), "{01}{2}");
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<Partition>(&json).unwrap(), p);
        assert!(serde_json::from_str::<Partition>(r#"{"n":3,"blocks":["110"]}"#).is_err());
    }
}
