use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest group order accepted by default.
pub const DEFAULT_GROUP_ORDER_CAP: usize = 4096;

/// `ℤ_{N₁} × … × ℤ_{N_m}` with every `Nᵢ ≥ 2`. Moduli need not be prime.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct AbelianGroupSpec {
    moduli: Vec<u64>,
    order: usize,
    /// Least common multiple of the moduli: every pairing phase is a power of `e^{2πi/lcm}`.
    lcm: u64,
}

impl TryFrom<Vec<u64>> for AbelianGroupSpec {
    type Error = Error;

    fn try_from(moduli: Vec<u64>) -> Result<Self> {
        Self::new(moduli)
    }
}

impl From<AbelianGroupSpec> for Vec<u64> {
    fn from(g: AbelianGroupSpec) -> Self {
        g.moduli
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl AbelianGroupSpec {
    pub fn new(moduli: Vec<u64>) -> Result<Self> {
        Self::new_capped(moduli, DEFAULT_GROUP_ORDER_CAP)
    }

    pub fn new_capped(moduli: Vec<u64>, cap: usize) -> Result<Self> {
        if moduli.is_empty() {
            return Err(Error::Domain("a group needs at least one modulus".into()));
        }
        if let Some(bad) = moduli.iter().find(|&&n| n < 2) {
            return Err(Error::Domain(format!("modulus {bad} is below 2")));
        }
        let mut order: usize = 1;
        for &n in &moduli {
            order = order
                .checked_mul(n as usize)
                .filter(|&o| o <= cap)
                .ok_or(Error::Capacity {
                    what: "group order",
                    requested: moduli
                        .iter()
                        .fold(1usize, |a, &n| a.saturating_mul(n as usize)),
                    cap,
                })?;
        }
        let lcm = moduli.iter().fold(1u64, |a, &n| a / gcd(a, n) * n);
        Ok(Self { moduli, order, lcm })
    }

    /// `ℤ₂ⁿ`, the group of the hidden-cut circuit on `n` qubits.
    pub fn binary(n: usize) -> Result<Self> {
        Self::new(vec![2; n])
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            coords: vec![0; self.moduli.len()],
        }
    }

    pub fn element(&self, coords: Vec<u64>) -> Result<GroupElement> {
        let g = GroupElement { coords };
        self.check(&g)?;
        Ok(g)
    }

    pub(crate) fn check(&self, g: &GroupElement) -> Result<()> {
        if g.coords.len() != self.moduli.len() {
            return Err(Error::Dimension(format!(
                "element {g} has {} coordinates, group has {}",
                g.coords.len(),
                self.moduli.len()
            )));
        }
        if g.coords.iter().zip(&self.moduli).any(|(c, n)| c >= n) {
            return Err(Error::Domain(format!(
                "element {g} out of range for moduli {:?}",
                self.moduli
            )));
        }
        Ok(())
    }

    /// Mixed-radix linear index, first modulus most significant.
    pub fn index_of(&self, g: &GroupElement) -> Result<usize> {
        self.check(g)?;
        Ok(g.coords
            .iter()
            .zip(&self.moduli)
            .fold(0usize, |acc, (&c, &n)| acc * n as usize + c as usize))
    }

    pub fn element_at(&self, mut index: usize) -> Result<GroupElement> {
        if index >= self.order {
            return Err(Error::Domain(format!(
                "index {index} out of range for a group of order {}",
                self.order
            )));
        }
        let mut coords = vec![0u64; self.moduli.len()];
        for (c, &n) in coords.iter_mut().zip(&self.moduli).rev() {
            *c = (index % n as usize) as u64;
            index /= n as usize;
        }
        Ok(GroupElement { coords })
    }

    /// All elements in linear-index order.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order).map(|i| self.element_at(i).expect("index below order"))
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        self.check(b)?;
        let coords = a
            .coords
            .iter()
            .zip(&b.coords)
            .zip(&self.moduli)
            .map(|((x, y), n)| (x + y) % n)
            .collect();
        Ok(GroupElement { coords })
    }

    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        let coords = g
            .coords
            .iter()
            .zip(&self.moduli)
            .map(|(&c, &n)| (n - c) % n)
            .collect();
        Ok(GroupElement { coords })
    }

    /// `Σ kᵢgᵢ/Nᵢ` expressed in units of `1/lcm`, reduced mod `lcm`.
    pub(crate) fn pairing_units(&self, k: &GroupElement, g: &GroupElement) -> u64 {
        k.coords
            .iter()
            .zip(&g.coords)
            .zip(&self.moduli)
            .fold(0u64, |acc, ((&a, &b), &n)| {
                (acc + (a * b % n) * (self.lcm / n)) % self.lcm
            })
    }

    pub(crate) fn lcm(&self) -> u64 {
        self.lcm
    }

    /// `e^{2πi j/lcm}` for `j = 0..lcm`.
    pub(crate) fn roots_of_unity(&self) -> Vec<Complex64> {
        (0..self.lcm)
            .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / self.lcm as f64))
            .collect()
    }
}

/// Coordinates `(g₁, …, g_m)` of a group element.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement {
    coords: Vec<u64>,
}

impl GroupElement {
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupElement{self}")
    }
}

/// `F_kg = |G|^{−1/2} e^{−2πi Σ kᵢgᵢ/Nᵢ}`.
pub fn fourier_entry(
    k: &GroupElement,
    g: &GroupElement,
    group: &AbelianGroupSpec,
) -> Result<Complex64> {
    group.check(k)?;
    group.check(g)?;
    let units = group.pairing_units(k, g);
    let angle = -2.0 * PI * units as f64 / group.lcm() as f64;
    Ok(Complex64::from_polar(
        1.0 / (group.order() as f64).sqrt(),
        angle,
    ))
}
