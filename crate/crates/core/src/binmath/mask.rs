use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest register width a mask can describe.
pub const MAX_MASK_QUBITS: usize = 63;

/// An `n`-bit string marking a subset of qubits, and equally an element of
/// the group ℤ₂ⁿ.
///
/// Qubit `i` is the `i`-th character of the string rendering (qubit 0 is the
/// leftmost character). The packed integer stores qubit 0 in the most
/// significant of the `n` bits, so [`SubsystemMask::index`] of `"0011"` is 3
/// and integer order coincides with lexicographic string order.
///
/// The subsystem written `11000` with 1-indexed qubits `{1, 2}` is, in this
/// crate's 0-indexed convention, the subsystem `{0, 1}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsystemMask {
    n: usize,
    bits: u64,
}

#[inline]
pub(crate) fn parity(word: u64) -> u8 {
    (word.count_ones() & 1) as u8
}

#[inline]
pub(crate) fn low_bits(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl SubsystemMask {
    /// Builds a mask from its packed integer form (qubit 0 = most significant bit).
    pub fn new(n: usize, bits: u64) -> Result<Self> {
        if n == 0 || n > MAX_MASK_QUBITS {
            return Err(Error::Dimension(format!(
                "mask width must be in 1..={MAX_MASK_QUBITS}, got {n}"
            )));
        }
        if bits & !low_bits(n) != 0 {
            return Err(Error::Dimension(format!(
                "bits {bits:#x} do not fit in a {n}-qubit mask"
            )));
        }
        Ok(Self { n, bits })
    }

    /// Same as [`SubsystemMask::new`] for table indices already known to be in range.
    pub(crate) fn from_index(n: usize, index: usize) -> Self {
        debug_assert!((1..=MAX_MASK_QUBITS).contains(&n));
        debug_assert!((index as u64) & !low_bits(n) == 0);
        Self {
            n,
            bits: index as u64,
        }
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(n, 0)
    }

    pub fn ones(n: usize) -> Result<Self> {
        Self::new(n, low_bits(n.min(64)))
    }

    /// Mask with a 1 at each listed qubit.
    pub fn from_qubits(n: usize, qubits: &[usize]) -> Result<Self> {
        let mut mask = Self::zeros(n)?;
        for &q in qubits {
            if q >= n {
                return Err(Error::Dimension(format!(
                    "qubit {q} out of range for {n} qubits"
                )));
            }
            mask.bits |= 1u64 << (n - 1 - q);
        }
        Ok(mask)
    }

    pub fn from_bools(bits: &[bool]) -> Result<Self> {
        let n = bits.len();
        let mut mask = Self::zeros(n)?;
        for (q, &b) in bits.iter().enumerate() {
            if b {
                mask.bits |= 1u64 << (n - 1 - q);
            }
        }
        Ok(mask)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Position of this mask in a 2ⁿ-entry table.
    #[inline]
    pub fn index(&self) -> usize {
        self.bits as usize
    }

    /// Whether qubit `i` belongs to the subset.
    #[inline]
    pub fn contains(&self, qubit: usize) -> bool {
        qubit < self.n && (self.bits >> (self.n - 1 - qubit)) & 1 == 1
    }

    pub fn weight(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_all_ones(&self) -> bool {
        self.bits == low_bits(self.n)
    }

    /// True for the two masks that describe no cut at all: 0ⁿ and 1ⁿ.
    pub fn is_trivial(&self) -> bool {
        self.bits == 0 || self.is_all_ones()
    }

    pub fn complement(&self) -> Self {
        Self {
            n: self.n,
            bits: !self.bits & low_bits(self.n),
        }
    }

    pub fn xor(&self, other: &Self) -> Result<Self> {
        self.check_width(other)?;
        Ok(Self {
            n: self.n,
            bits: self.bits ^ other.bits,
        })
    }

    pub fn and(&self, other: &Self) -> Result<Self> {
        self.check_width(other)?;
        Ok(Self {
            n: self.n,
            bits: self.bits & other.bits,
        })
    }

    /// Qubit indices set in the mask, ascending.
    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&q| self.contains(q))
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.n).map(|q| self.contains(q)).collect()
    }

    /// Iterates over all 2ⁿ masks in table order.
    pub fn all(n: usize) -> Result<impl Iterator<Item = SubsystemMask>> {
        Self::zeros(n)?;
        Ok((0..(1u64 << n)).map(move |bits| SubsystemMask { n, bits }))
    }

    fn check_width(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Dimension(format!(
                "mask widths differ: {} vs {}",
                self.n, other.n
            )));
        }
        Ok(())
    }
}

/// Inner product of two masks over GF(2).
pub fn dot_mod2(x: &SubsystemMask, s: &SubsystemMask) -> Result<u8> {
    x.check_width(s)?;
    Ok(parity(x.bits & s.bits))
}

impl fmt::Display for SubsystemMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            f.write_str(if self.contains(q) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for SubsystemMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SubsystemMask({self})")
    }
}

impl FromStr for SubsystemMask {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Dimension(format!(
                    "invalid character {other:?} in bitstring {s:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_bools(&bits)
    }
}

impl Serialize for SubsystemMask {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SubsystemMask {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
