use serde::{Deserialize, Serialize};

use super::mask::{low_bits, parity, SubsystemMask, MAX_MASK_QUBITS};
use crate::error::{Error, Result};

/// Default register width up to which [`min_syndrome_weight`] enumerates.
pub const DEFAULT_SYNDROME_CAP: usize = 20;

/// An `m × n` binary matrix whose rows are circuit samples. Rows are packed
/// into one word each, with the same bit layout as [`SubsystemMask`].
///
/// In coding-theory terms this is a parity-check matrix and `M·s` is the
/// syndrome of `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementMatrix {
    n: usize,
    rows: Vec<u64>,
}

impl MeasurementMatrix {
    /// Empty matrix (zero rows) over `n` columns.
    pub fn new(n: usize) -> Result<Self> {
        SubsystemMask::zeros(n)?;
        Ok(Self {
            n,
            rows: Vec::new(),
        })
    }

    pub fn from_rows(n: usize, rows: &[SubsystemMask]) -> Result<Self> {
        let mut m = Self::new(n)?;
        for row in rows {
            m.push(row)?;
        }
        Ok(m)
    }

    pub fn push(&mut self, row: &SubsystemMask) -> Result<()> {
        if row.len() != self.n {
            return Err(Error::Dimension(format!(
                "row of width {} pushed into a matrix with {} columns",
                row.len(),
                self.n
            )));
        }
        self.rows.push(row.bits());
        Ok(())
    }

    /// Number of rows.
    pub fn m(&self) -> usize {
        self.rows.len()
    }

    /// Number of columns.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> SubsystemMask {
        SubsystemMask::from_index(self.n, self.rows[i] as usize)
    }

    pub fn rows(&self) -> impl Iterator<Item = SubsystemMask> + '_ {
        self.rows
            .iter()
            .map(move |&r| SubsystemMask::from_index(self.n, r as usize))
    }

    /// `M·s` over GF(2), one bit per row.
    pub fn syndrome(&self, s: &SubsystemMask) -> Result<Vec<u8>> {
        self.check_width(s)?;
        Ok(self.rows.iter().map(|&r| parity(r & s.bits())).collect())
    }

    /// Hamming weight `|M·s|`.
    pub fn syndrome_weight(&self, s: &SubsystemMask) -> Result<usize> {
        self.check_width(s)?;
        Ok(self.syndrome_weight_unchecked(s.bits()))
    }

    #[inline]
    pub(crate) fn syndrome_weight_unchecked(&self, s: u64) -> usize {
        self.rows.iter().map(|&r| parity(r & s) as usize).sum()
    }

    fn check_width(&self, s: &SubsystemMask) -> Result<()> {
        if s.len() != self.n {
            return Err(Error::Dimension(format!(
                "mask of width {} against a matrix with {} columns",
                s.len(),
                self.n
            )));
        }
        Ok(())
    }
}

/// Reduced row echelon form; pivots are chosen column by column from qubit 0
/// (the most significant packed bit) rightwards. Returns the nonzero reduced
/// rows together with their pivot columns.
fn row_reduce(n: usize, rows: &[u64]) -> Vec<(usize, u64)> {
    let mut work: Vec<u64> = rows.iter().copied().filter(|&r| r != 0).collect();
    let mut pivots: Vec<(usize, u64)> = Vec::new();
    let mut next = 0;
    for col in 0..n {
        let bit = 1u64 << (n - 1 - col);
        let Some(found) = (next..work.len()).find(|&i| work[i] & bit != 0) else {
            continue;
        };
        work.swap(next, found);
        let pivot_row = work[next];
        for (i, row) in work.iter_mut().enumerate() {
            if i != next && *row & bit != 0 {
                *row ^= pivot_row;
            }
        }
        pivots.push((col, pivot_row));
        next += 1;
        if next == work.len() {
            break;
        }
    }
    // later pivots may have been reduced after earlier rows were recorded
    pivots
        .iter()
        .enumerate()
        .map(|(i, &(col, _))| (col, work[i]))
        .collect()
}

/// Rank of `M` over GF(2).
pub fn rank_gf2(m: &MeasurementMatrix) -> usize {
    row_reduce(m.n, &m.rows).len()
}

/// A basis of `{s : M·s = 0}` over GF(2). With no rows this is the standard
/// basis of the whole space.
pub fn nullspace_gf2(m: &MeasurementMatrix) -> Vec<SubsystemMask> {
    let n = m.n;
    let reduced = row_reduce(n, &m.rows);
    let mut is_pivot = vec![false; n];
    for &(col, _) in &reduced {
        is_pivot[col] = true;
    }
    (0..n)
        .filter(|&col| !is_pivot[col])
        .map(|free| {
            let free_bit = 1u64 << (n - 1 - free);
            let mut v = free_bit;
            for &(pcol, row) in &reduced {
                if row & free_bit != 0 {
                    v |= 1u64 << (n - 1 - pcol);
                }
            }
            SubsystemMask::from_index(n, v as usize)
        })
        .collect()
}

/// A reduced (hence linearly independent) generating set of the span of
/// `vectors`, sorted.
pub fn basis_gf2(n: usize, vectors: &[SubsystemMask]) -> Result<Vec<SubsystemMask>> {
    SubsystemMask::zeros(n)?;
    if let Some(v) = vectors.iter().find(|v| v.len() != n) {
        return Err(Error::Dimension(format!(
            "vector {v} in a span over {n} bits"
        )));
    }
    let packed: Vec<u64> = vectors.iter().map(|v| v.bits()).collect();
    let mut basis: Vec<SubsystemMask> = row_reduce(n, &packed)
        .into_iter()
        .map(|(_, r)| SubsystemMask::from_index(n, r as usize))
        .collect();
    basis.sort();
    Ok(basis)
}

/// All elements of the GF(2) span of `basis`, sorted. Duplicated or dependent
/// generators are tolerated.
pub fn span_gf2(n: usize, basis: &[SubsystemMask]) -> Result<Vec<SubsystemMask>> {
    SubsystemMask::zeros(n)?;
    let mut gens: Vec<u64> = Vec::with_capacity(basis.len());
    for b in basis {
        if b.len() != n {
            return Err(Error::Dimension(format!(
                "generator of width {} in a span over {n} bits",
                b.len()
            )));
        }
        gens.push(b.bits());
    }
    let independent: Vec<u64> = row_reduce(n, &gens).into_iter().map(|(_, r)| r).collect();
    if independent.len() > 24 {
        return Err(Error::Capacity {
            what: "span dimension",
            requested: independent.len(),
            cap: 24,
        });
    }
    let mut out = Vec::with_capacity(1 << independent.len());
    for combo in 0u64..(1u64 << independent.len()) {
        let v = independent
            .iter()
            .enumerate()
            .filter(|(i, _)| combo >> i & 1 == 1)
            .fold(0u64, |acc, (_, r)| acc ^ r);
        out.push(SubsystemMask::from_index(n, v as usize));
    }
    out.sort();
    Ok(out)
}

/// Exhaustive minimum-syndrome-weight search with the default cap.
pub fn min_syndrome_weight(m: &MeasurementMatrix) -> Result<(SubsystemMask, usize)> {
    min_syndrome_weight_capped(m, DEFAULT_SYNDROME_CAP)
}

/// The nontrivial `s` (neither 0ⁿ nor 1ⁿ) minimising `|M·s|`, found by
/// enumerating all 2ⁿ − 2 candidates. Ties go to the lexicographically
/// smallest bitstring.
pub fn min_syndrome_weight_capped(
    m: &MeasurementMatrix,
    cap: usize,
) -> Result<(SubsystemMask, usize)> {
    let n = m.n;
    if n > cap.min(MAX_MASK_QUBITS) {
        return Err(Error::Capacity {
            what: "qubits for brute-force syndrome search",
            requested: n,
            cap,
        });
    }
    if n < 2 {
        return Err(Error::Domain(
            "a nontrivial mask needs at least two qubits".into(),
        ));
    }
    let all_ones = low_bits(n);
    let mut best = (1u64, usize::MAX);
    for s in 1..all_ones {
        let w = m.syndrome_weight_unchecked(s);
        if w < best.1 {
            best = (s, w);
            if w == 0 {
                break;
            }
        }
    }
    Ok((SubsystemMask::from_index(n, best.0 as usize), best.1))
}

/// Flat, serializable view of a matrix (row-major 0/1 entries).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub n: usize,
    pub m: usize,
    pub rows: Vec<Vec<u8>>,
}

impl From<&MeasurementMatrix> for MatrixRecord {
    fn from(mat: &MeasurementMatrix) -> Self {
        MatrixRecord {
            n: mat.n,
            m: mat.m(),
            rows: mat
                .rows()
                .map(|r| r.to_bools().into_iter().map(u8::from).collect())
                .collect(),
        }
    }
}
