use std::ops::Index;

use serde::{Deserialize, Serialize};

use super::mask::SubsystemMask;
use crate::error::{Error, Result};

/// A real function over ℤ₂ⁿ stored as a 2ⁿ-entry vector in mask-index order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealTable {
    n: usize,
    values: Vec<f64>,
}

impl RealTable {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let len = values.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::Dimension(format!(
                "table length must be a power of two, got {len}"
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "non-finite table entry at index {i}"
            )));
        }
        Ok(Self {
            n: len.trailing_zeros() as usize,
            values,
        })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            values: vec![0.0; 1 << n],
        }
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Self {
            n,
            values: vec![value; 1 << n],
        }
    }

    /// Unit mass at `at`.
    pub fn delta(at: &SubsystemMask) -> Self {
        let mut t = Self::zeros(at.len());
        t.values[at.index()] = 1.0;
        t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, mask: &SubsystemMask) -> Result<f64> {
        if mask.len() != self.n {
            return Err(Error::Dimension(format!(
                "mask of width {} used on a {}-bit table",
                mask.len(),
                self.n
            )));
        }
        Ok(self.values[mask.index()])
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Elementwise integer power.
    pub fn powi(&self, t: u32) -> Self {
        Self {
            n: self.n,
            values: self.values.iter().map(|v| pow_u32(*v, t)).collect(),
        }
    }

    /// Elementwise product.
    pub fn hadamard_product(&self, other: &Self) -> Result<Self> {
        self.check_same_len(other)?;
        Ok(Self {
            n: self.n,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_len(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    fn check_same_len(&self, other: &Self) -> Result<()> {
        if self.values.len() != other.values.len() {
            return Err(Error::Dimension(format!(
                "table lengths differ: {} vs {}",
                self.values.len(),
                other.values.len()
            )));
        }
        Ok(())
    }
}

impl Index<usize> for RealTable {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.values[index]
    }
}

/// Exponentiation by squaring; exact for the small integer powers used here
/// in the sense that it never routes through `exp`/`ln`.
pub(crate) fn pow_u32(mut base: f64, mut exp: u32) -> f64 {
    let mut acc = 1.0;
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= base;
        }
        base *= base;
        exp >>= 1;
    }
    acc
}

/// In-place unnormalized butterfly: `v[s] <- Σ_x (-1)^{x·s} v[x]`.
pub(crate) fn fwht_in_place(values: &mut [f64]) {
    let len = values.len();
    debug_assert!(len.is_power_of_two());
    let mut half = 1;
    while half < len {
        for block in values.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        half <<= 1;
    }
}

/// Forward ℤ₂ⁿ Fourier transform `F[f](s) = Σ_x (-1)^{x·s} f(x)` (no prefactor).
pub fn walsh_transform(f: &RealTable) -> RealTable {
    let mut values = f.values.clone();
    fwht_in_place(&mut values);
    RealTable { n: f.n, values }
}

/// Inverse transform `F⁻¹[g](x) = 2⁻ⁿ Σ_s (-1)^{x·s} g(s)`.
pub fn inverse_walsh(f_hat: &RealTable) -> RealTable {
    let mut values = f_hat.values.clone();
    fwht_in_place(&mut values);
    let scale = 1.0 / values.len() as f64;
    values.iter_mut().for_each(|v| *v *= scale);
    RealTable { n: f_hat.n, values }
}

/// Group convolution `(f ∗ g)(x) = Σ_{x'} f(x') g(x ⊕ x')`, evaluated through
/// the transform domain.
pub fn convolve(f: &RealTable, g: &RealTable) -> Result<RealTable> {
    f.check_same_len(g)?;
    let product = walsh_transform(f).hadamard_product(&walsh_transform(g))?;
    Ok(inverse_walsh(&product))
}
