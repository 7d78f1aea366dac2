use num_complex::Complex64;

use super::distribution::OutcomeDistribution;
use crate::binmath::RealTable;
use crate::error::{Error, Result};
use crate::qstate::{tensor_product, StateVector};

/// Default cap on the total register width `n·(2t+1)` of the gate-level simulation.
pub const DEFAULT_CIRCUIT_QUBIT_CAP: usize = 20;

/// Dense gate-level simulator over a fixed register, qubit 0 most significant.
struct Register {
    width: usize,
    amps: Vec<Complex64>,
}

impl Register {
    fn bit(&self, qubit: usize) -> usize {
        1 << (self.width - 1 - qubit)
    }

    fn hadamard(&mut self, qubit: usize) {
        let b = self.bit(qubit);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..self.amps.len() {
            if i & b == 0 {
                let (x, y) = (self.amps[i], self.amps[i | b]);
                self.amps[i] = (x + y) * h;
                self.amps[i | b] = (x - y) * h;
            }
        }
    }

    /// Controlled swap (Fredkin).
    fn cswap(&mut self, control: usize, a: usize, b: usize) {
        let (cb, ab, bb) = (self.bit(control), self.bit(a), self.bit(b));
        for i in 0..self.amps.len() {
            if i & cb != 0 && i & ab != 0 && i & bb == 0 {
                self.amps.swap(i, i ^ ab ^ bb);
            }
        }
    }

    /// Probabilities of the leading `k` qubits, tracing out the rest.
    fn marginal_leading(&self, k: usize) -> Vec<f64> {
        let rest = self.width - k;
        let mut out = vec![0.0; 1 << k];
        for (i, a) in self.amps.iter().enumerate() {
            out[i >> rest] += a.norm_sqr();
        }
        out
    }
}

/// Brute-force simulation of the `t`-copy hidden-cut circuit with the default cap.
pub fn simulate_circuit_direct(state: &StateVector, t: u32) -> Result<OutcomeDistribution> {
    simulate_circuit_direct_capped(state, t, DEFAULT_CIRCUIT_QUBIT_CAP)
}

/// Builds the group register (`n` qubits, in |0⟩) followed by `2t` copies of
/// the input state, applies Hadamards to the group register, a controlled
/// `SWAP_s` on every copy pair (one Fredkin gate per group qubit `i` and pair,
/// swapping qubit `i` of the two copies), Hadamards again, and returns the
/// exact marginal of the group register.
pub fn simulate_circuit_direct_capped(
    state: &StateVector,
    t: u32,
    cap: usize,
) -> Result<OutcomeDistribution> {
    if t == 0 {
        return Err(Error::Domain(
            "the copy-pair count t must be at least 1".into(),
        ));
    }
    let n = state.n();
    let width = n * (2 * t as usize + 1);
    if width > cap {
        return Err(Error::Capacity {
            what: "total qubits of the direct circuit simulation",
            requested: width,
            cap,
        });
    }
    let mut parts = vec![StateVector::basis(n, 0)?];
    parts.extend(std::iter::repeat_n(state.clone(), 2 * t as usize));
    let initial = tensor_product(&parts)?;
    let mut reg = Register {
        width,
        amps: initial.amplitudes().to_vec(),
    };

    let copy_qubit = |copy: usize, i: usize| n + copy * n + i;
    for g in 0..n {
        reg.hadamard(g);
    }
    for pair in 0..t as usize {
        for i in 0..n {
            reg.cswap(i, copy_qubit(2 * pair, i), copy_qubit(2 * pair + 1, i));
        }
    }
    for g in 0..n {
        reg.hadamard(g);
    }
    OutcomeDistribution::new(t, RealTable::new(reg.marginal_leading(n))?)
}
