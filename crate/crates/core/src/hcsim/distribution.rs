use serde::{Deserialize, Serialize};

use crate::binmath::{fwht_in_place, inverse_walsh, pow_u32, RealTable, SubsystemMask};
use crate::error::{Error, Result};
use crate::qstate::PurityTable;

/// Entries above this magnitude are treated as nonzero when reading off a support.
pub const DEFAULT_SUPPORT_THRESHOLD: f64 = 1e-9;

/// Negative round-off tolerated (and clamped to zero) after a transform.
pub const NEGATIVE_ERROR_THRESHOLD: f64 = 1e-9;

/// Normalization drift beyond which a distribution is rescaled.
pub const RENORMALIZE_THRESHOLD: f64 = 1e-12;

/// Output distribution `p_t(x)` of the hidden-cut circuit over `n`-bit outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeDistribution {
    t: u32,
    probs: RealTable,
}

/// JSON form: `{"n": .., "t": .., "probs": [...]}` with `probs` in outcome-index order.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DistributionRecord {
    pub n: usize,
    pub t: u32,
    pub probs: Vec<f64>,
}

impl OutcomeDistribution {
    /// Validates a probability table: entries must be ≥ −1e−9 (small
    /// negatives are clamped) and sum to 1 within 1e−10.
    pub fn new(t: u32, probs: RealTable) -> Result<Self> {
        let dist = Self::finalize(t, probs)?;
        let total = dist.probs.sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::NumericalConsistency(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(dist)
    }

    /// Clamps round-off negatives and rescales drifted mass. Errors when an
    /// entry is clearly negative, which means the input was not a valid
    /// purity table or distribution.
    pub(crate) fn finalize(t: u32, probs: RealTable) -> Result<Self> {
        if probs.n() == 0 {
            return Err(Error::Dimension("distribution over zero bits".into()));
        }
        let n = probs.n();
        let mut values = probs.into_values();
        for (i, v) in values.iter_mut().enumerate() {
            if *v < -NEGATIVE_ERROR_THRESHOLD {
                return Err(Error::NumericalConsistency(format!(
                    "probability {v} at outcome {}",
                    SubsystemMask::from_index(n, i)
                )));
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let total: f64 = values.iter().sum();
        if total.is_nan() || total <= 0.0 {
            return Err(Error::NumericalConsistency(
                "distribution has no mass".into(),
            ));
        }
        if (total - 1.0).abs() > RENORMALIZE_THRESHOLD {
            values.iter_mut().for_each(|v| *v /= total);
        }
        Ok(Self {
            t,
            probs: RealTable::new(values)?,
        })
    }

    pub fn n(&self) -> usize {
        self.probs.n()
    }

    /// Number of copy pairs the distribution belongs to.
    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn probs(&self) -> &RealTable {
        &self.probs
    }

    pub fn get(&self, x: &SubsystemMask) -> Result<f64> {
        self.probs.get(x)
    }

    /// Outcomes with probability above `threshold`, in index order.
    pub fn support(&self, threshold: f64) -> Vec<SubsystemMask> {
        let n = self.n();
        self.probs
            .values()
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > threshold)
            .map(|(i, _)| SubsystemMask::from_index(n, i))
            .collect()
    }

    /// Shannon entropy in bits.
    pub fn entropy_bits(&self) -> f64 {
        -self
            .probs
            .values()
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|p| p * p.log2())
            .sum::<f64>()
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.probs.max_abs_diff(&other.probs)
    }

    pub fn to_record(&self) -> DistributionRecord {
        DistributionRecord {
            n: self.n(),
            t: self.t,
            probs: self.probs.values().to_vec(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_record())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let r: DistributionRecord = serde_json::from_str(s)?;
        let dist = Self::new(r.t, RealTable::new(r.probs)?)?;
        if dist.n() != r.n {
            return Err(Error::Dimension(format!(
                "record declares n = {} but holds {} probabilities",
                r.n,
                dist.probs.len()
            )));
        }
        Ok(dist)
    }

    /// `bitstring,probability` rows with a header, in outcome-index order.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["bitstring", "probability"])?;
        for (i, p) in self.probs.values().iter().enumerate() {
            w.write_record([
                SubsystemMask::from_index(self.n(), i).to_string(),
                format!("{p:e}"),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn check_t(t: u32) -> Result<()> {
    if t == 0 {
        return Err(Error::Domain(
            "the copy-pair count t must be at least 1".into(),
        ));
    }
    Ok(())
}

/// `p_t = F⁻¹[Pᵗ]`: the hidden-cut output distribution from the purity table.
pub fn exact_distribution(purities: &PurityTable, t: u32) -> Result<OutcomeDistribution> {
    check_t(t)?;
    OutcomeDistribution::finalize(t, inverse_walsh(&purities.powi(t)))
}

/// `p₁^{∗t}`, the `t`-fold self-convolution, computed as `F⁻¹[F[p₁]ᵗ]` with
/// the power taken by repeated squaring.
pub fn distribution_by_convolution(
    p1: &OutcomeDistribution,
    t: u32,
) -> Result<OutcomeDistribution> {
    check_t(t)?;
    let mut spectrum = p1.probs.values().to_vec();
    fwht_in_place(&mut spectrum);
    spectrum.iter_mut().for_each(|v| *v = pow_u32(*v, t));
    let raw = inverse_walsh(&RealTable::new(spectrum)?);
    OutcomeDistribution::finalize(p1.t * t, raw)
}

/// `p_t(0ⁿ) = 2⁻ⁿ Σ_s Pᵗ(s)`.
pub fn all_zeros_probability(purities: &PurityTable, t: u32) -> Result<f64> {
    check_t(t)?;
    let powered = purities.powi(t);
    Ok(powered.sum() / powered.len() as f64)
}
