use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::state::{tensor_product, StateVector};
use crate::binmath::{RealTable, SubsystemMask};
use crate::error::{Error, Result};

/// Default register width up to which [`purity_table`] is evaluated.
pub const DEFAULT_PURITY_TABLE_CAP: usize = 12;

/// Reduced state `ρ_s = Tr_{s̄} |ψ⟩⟨ψ|` on the qubits of `mask`, stored
/// row-major. Row/column indices order the kept qubits ascending, the first
/// kept qubit being the most significant bit.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mask: SubsystemMask,
    dim: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn mask(&self) -> &SubsystemMask {
        &self.mask
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.entry(i, i)).sum()
    }

    /// `Tr(ρ²) = Σ_ij |ρ_ij|²` for Hermitian ρ.
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|e| e.norm_sqr()).sum()
    }

    /// Largest `|ρ_ij − conj(ρ_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self.entry(i, j) - self.entry(j, i).conj()).norm());
            }
        }
        worst
    }
}

/// Splits every amplitude index into (kept-qubit index, traced-qubit index).
fn split_indices(n: usize, mask: &SubsystemMask) -> Vec<(usize, usize)> {
    (0..1usize << n)
        .map(|idx| {
            let (mut kept, mut traced) = (0usize, 0usize);
            for q in 0..n {
                let bit = (idx >> (n - 1 - q)) & 1;
                if mask.contains(q) {
                    kept = (kept << 1) | bit;
                } else {
                    traced = (traced << 1) | bit;
                }
            }
            (kept, traced)
        })
        .collect()
}

fn check_mask(state: &StateVector, mask: &SubsystemMask) -> Result<()> {
    if mask.len() != state.n() {
        return Err(Error::Dimension(format!(
            "mask of width {} on a {}-qubit state",
            mask.len(),
            state.n()
        )));
    }
    Ok(())
}

/// Rows of the `2^|s| × 2^|s̄|` coefficient matrix `A` with `ψ = Σ A_ab |a⟩|b⟩`.
fn coefficient_rows(state: &StateVector, mask: &SubsystemMask) -> Vec<Vec<Complex64>> {
    let n = state.n();
    let k = mask.weight();
    let zero = Complex64::new(0.0, 0.0);
    let mut rows = vec![vec![zero; 1 << (n - k)]; 1 << k];
    for (idx, (a, b)) in split_indices(n, mask).into_iter().enumerate() {
        rows[a][b] = state.amplitudes()[idx];
    }
    rows
}

fn dot_conj(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

/// Partial trace over the qubits outside `mask`. An empty mask gives the
/// 1×1 matrix `[1]`.
pub fn reduced_density(state: &StateVector, mask: &SubsystemMask) -> Result<DensityMatrix> {
    check_mask(state, mask)?;
    let rows = coefficient_rows(state, mask);
    let dim = rows.len();
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for j in i..dim {
            let v = dot_conj(&rows[i], &rows[j]);
            entries[i * dim + j] = v;
            entries[j * dim + i] = v.conj();
        }
    }
    Ok(DensityMatrix {
        mask: *mask,
        dim,
        entries,
    })
}

/// `Tr(ρ_s²)`. Works on whichever side of the cut is smaller, which is
/// legitimate because both marginals of a pure state share a spectrum.
pub fn purity(state: &StateVector, mask: &SubsystemMask) -> Result<f64> {
    check_mask(state, mask)?;
    if mask.is_trivial() {
        return Ok(1.0);
    }
    let small = if 2 * mask.weight() <= state.n() {
        *mask
    } else {
        mask.complement()
    };
    let rows = coefficient_rows(state, &small);
    let mut total = 0.0;
    for i in 0..rows.len() {
        total += dot_conj(&rows[i], &rows[i]).norm_sqr();
        for j in i + 1..rows.len() {
            total += 2.0 * dot_conj(&rows[i], &rows[j]).norm_sqr();
        }
    }
    // rounding can push an exact cut a few ulps above 1
    Ok(total.min(1.0))
}

/// `P(s)` for every mask `s`: the reward function of the hidden-cut problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PurityTable {
    table: RealTable,
}

impl PurityTable {
    /// Validates a user-supplied table: unit value on 0ⁿ and 1ⁿ, entries in
    /// `[2^{−|s|}, 1]` and complement symmetry, each within 1e−10.
    pub fn from_table(table: RealTable) -> Result<Self> {
        const TOL: f64 = 1e-10;
        let n = table.n();
        if n == 0 {
            return Err(Error::Dimension("purity table over zero qubits".into()));
        }
        for s in SubsystemMask::all(n)? {
            let v = table[s.index()];
            let lower = 0.5f64.powi(s.weight().min(n - s.weight()) as i32);
            if v > 1.0 + TOL || v < lower - TOL {
                return Err(Error::Domain(format!(
                    "purity {v} at {s} outside [{lower}, 1]"
                )));
            }
            if (v - table[s.complement().index()]).abs() > TOL {
                return Err(Error::Domain(format!(
                    "purity table is not complement-symmetric at {s}"
                )));
            }
        }
        let mut values: Vec<f64> = table
            .into_values()
            .into_iter()
            .map(|v| v.min(1.0))
            .collect();
        values[0] = 1.0;
        let last = values.len() - 1;
        values[last] = 1.0;
        Ok(Self {
            table: RealTable::new(values)?,
        })
    }

    pub fn n(&self) -> usize {
        self.table.n()
    }

    pub fn table(&self) -> &RealTable {
        &self.table
    }

    pub fn get(&self, s: &SubsystemMask) -> Result<f64> {
        self.table.get(s)
    }

    /// Elementwise `Pᵗ`.
    pub fn powi(&self, t: u32) -> RealTable {
        self.table.powi(t)
    }

    /// Masks whose purity is within `tol` of 1 (the hidden subgroup H).
    pub fn pure_masks(&self, tol: f64) -> Vec<SubsystemMask> {
        (0..self.table.len())
            .filter(|&i| self.table[i] >= 1.0 - tol)
            .map(|i| SubsystemMask::from_index(self.n(), i))
            .collect()
    }
}

/// All 2ⁿ subsystem purities with the default cap of 12 qubits.
pub fn purity_table(state: &StateVector) -> Result<PurityTable> {
    purity_table_capped(state, DEFAULT_PURITY_TABLE_CAP)
}

pub fn purity_table_capped(state: &StateVector, cap: usize) -> Result<PurityTable> {
    let n = state.n();
    if n > cap {
        return Err(Error::Capacity {
            what: "qubits for a full purity table",
            requested: n,
            cap,
        });
    }
    let size = 1usize << n;
    // masks without qubit 0 are evaluated; their complements are mirrored
    let half: Vec<f64> = (0..size / 2)
        .into_par_iter()
        .map(|i| purity(state, &SubsystemMask::from_index(n, i)))
        .collect::<Result<_>>()?;
    let mut values = vec![0.0; size];
    for (i, v) in half.into_iter().enumerate() {
        values[i] = v;
        values[(size - 1) ^ i] = v;
    }
    values[0] = 1.0;
    values[size - 1] = 1.0;
    Ok(PurityTable {
        table: RealTable::new(values)?,
    })
}

/// `|ψ⟩|ψ⟩` on `2n` qubits; copy one holds qubits `0..n`.
pub fn pair_state(state: &StateVector) -> Result<StateVector> {
    tensor_product(&[state.clone(), state.clone()])
}

/// Swaps qubit `i` of the first copy with qubit `i` of the second copy for
/// every `i` in `mask`.
pub fn apply_swap_mask(pair: &StateVector, mask: &SubsystemMask) -> Result<StateVector> {
    let n = mask.len();
    if pair.n() != 2 * n {
        return Err(Error::Dimension(format!(
            "swap mask of width {n} needs a {}-qubit pair state, got {}",
            2 * n,
            pair.n()
        )));
    }
    // bit of qubit i (copy one) and qubit n + i (copy two)
    let pairs: Vec<(usize, usize)> = mask.qubits().map(|i| (2 * n - 1 - i, n - 1 - i)).collect();
    let amps = pair.amplitudes();
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    for (idx, a) in amps.iter().enumerate() {
        let mut j = idx;
        for &(p1, p2) in &pairs {
            if (j >> p1) & 1 != (j >> p2) & 1 {
                j ^= (1 << p1) | (1 << p2);
            }
        }
        out[j] = *a;
    }
    StateVector::from_amplitudes(out)
}

/// `⟨ψψ| SWAP_s |ψψ⟩`, the swap-test expectation value.
pub fn swap_overlap(state: &StateVector, mask: &SubsystemMask) -> Result<Complex64> {
    check_mask(state, mask)?;
    let pair = pair_state(state)?;
    pair.inner(&apply_swap_mask(&pair, mask)?)
}
