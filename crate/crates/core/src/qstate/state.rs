use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeding::rng_from_seed;

/// Largest register a dense statevector may hold.
pub const MAX_STATE_QUBITS: usize = 26;

/// Tolerance on `Σ|aᵢ|² = 1` accepted when importing amplitudes.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// A normalized pure state of `n` qubits.
///
/// Amplitude index bit `n − 1 − q` holds the computational-basis value of
/// qubit `q`, so qubit 0 is the most significant bit and the basis state
/// written `01` (qubit 0 in |0⟩, qubit 1 in |1⟩) sits at index 1.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Dimension("a state needs at least one qubit".into()));
    }
    if n > MAX_STATE_QUBITS {
        return Err(Error::Capacity {
            what: "statevector qubits",
            requested: n,
            cap: MAX_STATE_QUBITS,
        });
    }
    Ok(())
}

fn norm_sqr(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

impl StateVector {
    /// Wraps amplitudes that are already normalized (within [`NORM_TOLERANCE`]).
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Dimension(format!(
                "amplitude count must be a power of two ≥ 2, got {len}"
            )));
        }
        let n = len.trailing_zeros() as usize;
        check_qubits(n)?;
        let norm = norm_sqr(&amps);
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Domain(format!("state norm² is {norm}, expected 1")));
        }
        Ok(Self { n, amps })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<Self> {
        let norm = norm_sqr(&amps).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Degeneracy("cannot normalize a zero vector".into()));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Self::from_amplitudes(amps)
    }

    /// Computational basis state; `index` uses the layout described on the type.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_qubits(n)?;
        if index >= 1 << n {
            return Err(Error::Dimension(format!(
                "basis index {index} out of range for {n} qubits"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::Dimension(format!(
                "inner product of {}- and {}-qubit states",
                self.n, other.n
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&StateRecord::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str::<StateRecord>(s)?.try_into()
    }

    /// Raw export: `(re, im)` pairs as little-endian `f64`, amplitude index
    /// ascending. The qubit count is implied by the byte length.
    pub fn to_le_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 * self.amps.len());
        for a in &self.amps {
            out.extend_from_slice(&a.re.to_le_bytes());
            out.extend_from_slice(&a.im.to_le_bytes());
        }
        out
    }

    pub fn from_le_bytes(bytes: &[u8]) -> Result<Self> {
        if !bytes.len().is_multiple_of(16) {
            return Err(Error::Dimension(format!(
                "byte length {} is not a whole number of complex f64 values",
                bytes.len()
            )));
        }
        let amps = bytes
            .chunks_exact(16)
            .map(|c| {
                let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
                let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
                Complex64::new(re, im)
            })
            .collect();
        Self::from_amplitudes(amps)
    }
}

/// JSON form of a state: `{"n": .., "amplitudes": [[re, im], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateRecord {
    pub n: usize,
    pub amplitudes: Vec<(f64, f64)>,
}

impl From<&StateVector> for StateRecord {
    fn from(s: &StateVector) -> Self {
        StateRecord {
            n: s.n,
            amplitudes: s.amps.iter().map(|a| (a.re, a.im)).collect(),
        }
    }
}

impl TryFrom<StateRecord> for StateVector {
    type Error = Error;

    fn try_from(r: StateRecord) -> Result<Self> {
        let s = StateVector::from_amplitudes(
            r.amplitudes
                .into_iter()
                .map(|(re, im)| Complex64::new(re, im))
                .collect(),
        )?;
        if s.n != r.n {
            return Err(Error::Dimension(format!(
                "record declares n = {} but holds {} amplitudes",
                r.n,
                s.dim()
            )));
        }
        Ok(s)
    }
}

/// Haar-random pure state: i.i.d. standard complex Gaussian amplitudes,
/// normalized.
pub fn haar_random_state(n: usize, seed: u64) -> Result<StateVector> {
    check_qubits(n)?;
    let mut rng = rng_from_seed(seed);
    let amps: Vec<Complex64> = (0..1usize << n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re, im)
        })
        .collect();
    StateVector::normalized(amps)
}

/// Kronecker product; the first part occupies the lowest qubit indices.
pub fn tensor_product(parts: &[StateVector]) -> Result<StateVector> {
    let (first, rest) = parts
        .split_first()
        .ok_or_else(|| Error::Dimension("tensor product of no states".into()))?;
    let total: usize = parts.iter().map(|p| p.n).sum();
    check_qubits(total)?;
    let mut amps = first.amps.clone();
    for part in rest {
        amps = amps
            .iter()
            .flat_map(|a| part.amps.iter().map(move |b| a * b))
            .collect();
    }
    Ok(StateVector { n: total, amps })
}

/// `normalize(√(1−ε)·a + √ε·b)`.
pub fn mix_states(a: &StateVector, b: &StateVector, eps: f64) -> Result<StateVector> {
    if a.n != b.n {
        return Err(Error::Dimension(format!(
            "cannot mix {}- and {}-qubit states",
            a.n, b.n
        )));
    }
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Domain(format!("mixing weight {eps} outside [0, 1]")));
    }
    let (wa, wb) = ((1.0 - eps).sqrt(), eps.sqrt());
    let amps = a
        .amps
        .iter()
        .zip(&b.amps)
        .map(|(x, y)| x * wa + y * wb)
        .collect();
    StateVector::normalized(amps)
}

/// Applies `|0⟩⟨0|⊗I + |1⟩⟨1|⊗Rx(φ)` with `Rx(φ) = exp(−iφX/2)`.
pub fn apply_controlled_rx(
    state: &StateVector,
    control: usize,
    target: usize,
    phi: f64,
) -> Result<StateVector> {
    let n = state.n;
    if control >= n || target >= n {
        return Err(Error::Dimension(format!(
            "control {control} / target {target} out of range for {n} qubits"
        )));
    }
    if control == target {
        return Err(Error::Dimension(
            "control and target must be distinct qubits".into(),
        ));
    }
    let cbit = 1usize << (n - 1 - control);
    let tbit = 1usize << (n - 1 - target);
    let c = Complex64::new((phi / 2.0).cos(), 0.0);
    let s = Complex64::new(0.0, -(phi / 2.0).sin());
    let mut amps = state.amps.clone();
    for i in 0..amps.len() {
        if i & cbit != 0 && i & tbit == 0 {
            let j = i | tbit;
            let (a0, a1) = (amps[i], amps[j]);
            amps[i] = c * a0 + s * a1;
            amps[j] = s * a0 + c * a1;
        }
    }
    Ok(StateVector { n, amps })
}
