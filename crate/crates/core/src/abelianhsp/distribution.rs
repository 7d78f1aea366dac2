use num_complex::Complex64;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::group::AbelianGroupSpec;
use crate::error::{Error, Result};
use crate::hcsim::NEGATIVE_ERROR_THRESHOLD;
use crate::seeding::rng_from_seed;

/// Tolerance on the overlap invariants (identity value, conjugate symmetry, modulus).
pub const OVERLAP_TOLERANCE: f64 = 1e-10;
/// Largest imaginary part tolerated in a computed probability.
pub const IMAGINARY_RESIDUE_THRESHOLD: f64 = 1e-9;

/// JSON layout shared by overlaps and distributions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupTableRecord {
    pub moduli: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<u32>,
    pub values: Vec<(f64, f64)>,
}

/// `g ↦ ⟨Ψ|U(g)|Ψ⟩`, indexed by the group's linear index.
#[derive(Clone, Debug, PartialEq)]
pub struct OverlapFunction {
    group: AbelianGroupSpec,
    values: Vec<Complex64>,
}

impl OverlapFunction {
    /// Checks value 1 at the identity, `O(g⁻¹) = conj O(g)` and `|O(g)| ≤ 1`.
    pub fn new(group: AbelianGroupSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != group.order() {
            return Err(Error::Dimension(format!(
                "{} overlap values for a group of order {}",
                values.len(),
                group.order()
            )));
        }
        if values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::Domain("overlap values must be finite".into()));
        }
        if (values[0] - Complex64::new(1.0, 0.0)).norm() > OVERLAP_TOLERANCE {
            return Err(Error::Domain(format!(
                "overlap at the identity is {}, not 1",
                values[0]
            )));
        }
        for (i, g) in group.elements().enumerate() {
            let v = values[i];
            if v.norm() > 1.0 + OVERLAP_TOLERANCE {
                return Err(Error::Domain(format!(
                    "overlap |O{g}| = {} exceeds 1",
                    v.norm()
                )));
            }
            let j = group.index_of(&group.inverse(&g)?)?;
            if (values[j] - v.conj()).norm() > OVERLAP_TOLERANCE {
                return Err(Error::Domain(format!(
                    "overlap is not conjugate symmetric at {g}"
                )));
            }
        }
        Ok(Self { group, values })
    }

    pub fn group(&self) -> &AbelianGroupSpec {
        &self.group
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn to_record(&self) -> GroupTableRecord {
        GroupTableRecord {
            moduli: self.group.moduli().to_vec(),
            t: None,
            values: self.values.iter().map(|v| (v.re, v.im)).collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_record())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let r: GroupTableRecord = serde_json::from_str(s)?;
        let group = AbelianGroupSpec::new(r.moduli)?;
        Self::new(
            group,
            r.values
                .into_iter()
                .map(|(re, im)| Complex64::new(re, im))
                .collect(),
        )
    }
}

/// `Σ_k w_k e^{+2πi k·g/N}`: a convex mixture of characters, whose
/// single-copy output distribution is exactly `w`.
pub fn character_mixture_overlap(
    group: &AbelianGroupSpec,
    weights: &[f64],
) -> Result<OverlapFunction> {
    if weights.len() != group.order() {
        return Err(Error::Dimension(format!(
            "{} weights for a group of order {}",
            weights.len(),
            group.order()
        )));
    }
    if weights.iter().any(|&w| !(w >= 0.0 && w.is_finite())) {
        return Err(Error::Domain(
            "mixture weights must be finite and nonnegative".into(),
        ));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::Domain(format!(
            "mixture weights sum to {total}, not 1"
        )));
    }
    let values = characteristic_function(group, weights)?;
    OverlapFunction::new(group.clone(), values)
}

/// Random convex weights (normalized exponentials) and their character mixture.
pub fn random_character_mixture(
    group: &AbelianGroupSpec,
    seed: u64,
) -> Result<(Vec<f64>, OverlapFunction)> {
    let mut rng = rng_from_seed(seed);
    let raw: Vec<f64> = (0..group.order()).map(|_| Exp1.sample(&mut rng)).collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    let overlap = character_mixture_overlap(group, &weights)?;
    Ok((weights, overlap))
}

/// `f̂(g) = Σ_k f(k) e^{+2πi k·g/N}`; turns convolution into pointwise products.
pub fn characteristic_function(group: &AbelianGroupSpec, f: &[f64]) -> Result<Vec<Complex64>> {
    check_len(group, f.len())?;
    let roots = group.roots_of_unity();
    let els: Vec<_> = group.elements().collect();
    Ok(els
        .par_iter()
        .map(|g| {
            els.iter()
                .zip(f)
                .map(|(k, &fk)| roots[group.pairing_units(k, g) as usize] * fk)
                .sum()
        })
        .collect())
}

fn check_len(group: &AbelianGroupSpec, len: usize) -> Result<()> {
    if len != group.order() {
        return Err(Error::Dimension(format!(
            "table of length {len} over a group of order {}",
            group.order()
        )));
    }
    Ok(())
}

/// Output distribution of the `t`-copy circuit over `G`, indexed like the group.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupDistribution {
    group: AbelianGroupSpec,
    t: u32,
    probs: Vec<f64>,
}

impl GroupDistribution {
    pub fn group(&self) -> &AbelianGroupSpec {
        &self.group
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn to_record(&self) -> GroupTableRecord {
        GroupTableRecord {
            moduli: self.group.moduli().to_vec(),
            t: Some(self.t),
            values: self.probs.iter().map(|&p| (p, 0.0)).collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_record())?)
    }
}

/// `p_t(k) = |G|⁻¹ Σ_g e^{−2πi k·g/N} O(g)ᵗ`, by direct summation.
pub fn distribution_from_overlap(overlap: &OverlapFunction, t: u32) -> Result<GroupDistribution> {
    if t == 0 {
        return Err(Error::Domain("t must be positive".into()));
    }
    let group = overlap.group();
    let powered: Vec<Complex64> = overlap.values.iter().map(|v| v.powu(t)).collect();
    let roots = group.roots_of_unity();
    let lcm = group.lcm();
    let scale = 1.0 / group.order() as f64;
    let els: Vec<_> = group.elements().collect();
    let raw: Vec<Complex64> = els
        .par_iter()
        .map(|k| {
            let sum: Complex64 = els
                .iter()
                .zip(&powered)
                .map(|(g, &o)| {
                    let u = group.pairing_units(k, g);
                    roots[((lcm - u) % lcm) as usize] * o
                })
                .sum();
            sum * scale
        })
        .collect();
    let mut probs = Vec::with_capacity(raw.len());
    for (k, z) in els.iter().zip(&raw) {
        if z.im.abs() > IMAGINARY_RESIDUE_THRESHOLD {
            return Err(Error::NumericalConsistency(format!(
                "p_{t}{k} has imaginary part {:e}",
                z.im
            )));
        }
        if z.re < -NEGATIVE_ERROR_THRESHOLD {
            return Err(Error::NumericalConsistency(format!(
                "p_{t}{k} = {:e} is negative; the overlap is not realizable",
                z.re
            )));
        }
        probs.push(z.re.max(0.0));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::NumericalConsistency(format!(
            "distribution sums to {total}"
        )));
    }
    Ok(GroupDistribution {
        group: group.clone(),
        t,
        probs,
    })
}

/// `(f ∗ h)(k) = Σ_{k'} f(k') h(k − k')`.
pub fn group_convolve(f: &[f64], h: &[f64], group: &AbelianGroupSpec) -> Result<Vec<f64>> {
    check_len(group, f.len())?;
    check_len(group, h.len())?;
    let els: Vec<_> = group.elements().collect();
    let inv: Vec<_> = els
        .iter()
        .map(|e| group.inverse(e))
        .collect::<Result<Vec<_>>>()?;
    els.par_iter()
        .map(|k| {
            els.iter()
                .zip(f)
                .zip(&inv)
                .map(|((_, &fk), kinv)| Ok(fk * h[group.index_of(&group.add(k, kinv)?)?]))
                .sum::<Result<f64>>()
        })
        .collect()
}

/// `p₁^{∗t}` by repeated convolution.
pub fn convolution_power(p1: &[f64], t: u32, group: &AbelianGroupSpec) -> Result<Vec<f64>> {
    if t == 0 {
        return Err(Error::Domain("t must be positive".into()));
    }
    let mut acc = p1.to_vec();
    for _ in 1..t {
        acc = group_convolve(&acc, p1, group)?;
    }
    Ok(acc)
}
