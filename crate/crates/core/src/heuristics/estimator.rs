use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, Discrete};

use crate::binmath::{parity, pow_u32, MeasurementMatrix, SubsystemMask};
use crate::error::{Error, Result};
use crate::hcsim::{swap_test_bernoulli, OutcomeDistribution};
use crate::seeding::{derive_seed, rng_from_seed};

/// Coefficient of the asymptotic two-sample KS critical value at the 1% level.
pub const KS_CRITICAL_COEFF_1PCT: f64 = 1.628;

/// `1 − 2k/m`, written so that the network export reproduces it bit for bit.
fn estimate_from_count(k: usize, m: usize) -> f64 {
    1.0 - (2.0 / m as f64) * k as f64
}

/// `P̂ᵗ(s) = 1 − 2|Ms|/m`: one batch of samples gives an unbiased estimate
/// of `Pᵗ(s)` for every mask `s`.
pub fn estimate_purity_t(m: &MeasurementMatrix, s: &SubsystemMask) -> Result<f64> {
    if m.m() == 0 {
        return Err(Error::Degeneracy(
            "estimator needs at least one sample row".into(),
        ));
    }
    Ok(estimate_from_count(m.syndrome_weight(s)?, m.m()))
}

fn check_inputs(p_true: f64, t: u32, m: usize) -> Result<()> {
    if !(0.0..=1.0).contains(&p_true) {
        return Err(Error::Domain(format!("purity {p_true} outside [0, 1]")));
    }
    if t == 0 || m == 0 {
        return Err(Error::Domain("t and m must be positive".into()));
    }
    Ok(())
}

/// Exact law of the estimator: `m·μ̂ ~ Binomial(m, (1 − Pᵗ)/2)` mapped to
/// values `1 − 2k/m`. Entry `k` of both vectors belongs to `k` odd syndromes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorPmf {
    pub values: Vec<f64>,
    pub probs: Vec<f64>,
}

impl EstimatorPmf {
    pub fn mean(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.probs)
            .map(|(v, p)| v * p)
            .sum()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.values
            .iter()
            .zip(&self.probs)
            .map(|(v, p)| p * (v - mu) * (v - mu))
            .sum()
    }

    /// Draws `trials` estimator values directly from the pmf.
    pub fn sample(&self, trials: usize, seed: u64) -> Result<Vec<f64>> {
        let index = WeightedIndex::new(&self.probs)
            .map_err(|e| Error::NumericalConsistency(format!("cannot sample pmf: {e}")))?;
        let mut rng = rng_from_seed(seed);
        Ok((0..trials)
            .map(|_| self.values[index.sample(&mut rng)])
            .collect())
    }
}

pub fn estimator_distribution(p_true: f64, t: u32, m: usize) -> Result<EstimatorPmf> {
    check_inputs(p_true, t, m)?;
    let mu = 0.5 * (1.0 - pow_u32(p_true, t));
    let binom = Binomial::new(mu, m as u64).map_err(|e| Error::Domain(e.to_string()))?;
    let values = (0..=m).map(|k| estimate_from_count(k, m)).collect();
    let probs = (0..=m as u64).map(|k| binom.pmf(k)).collect();
    Ok(EstimatorPmf { values, probs })
}

mod inf_as_string {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_infinite() && *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*x)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Repr::Text(t) => Err(de::Error::custom(format!("expected a number, got {t:?}"))),
        }
    }
}

/// Analytic moments of the estimator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorStats {
    pub mean: f64,
    pub variance: f64,
    /// Infinite (serialized as `"inf"`) when the variance vanishes.
    #[serde(with = "inf_as_string")]
    pub snr: f64,
    pub m: usize,
    pub t: u32,
}

/// Mean `Pᵗ`, variance `(1 − P²ᵗ)/m` and `SNR = √m·Pᵗ/√(1 − P²ᵗ)`.
pub fn estimator_stats(p_true: f64, t: u32, m: usize) -> Result<EstimatorStats> {
    check_inputs(p_true, t, m)?;
    let mean = pow_u32(p_true, t);
    let spread = 1.0 - mean * mean;
    let variance = spread / m as f64;
    let snr = if spread == 0.0 {
        f64::INFINITY
    } else {
        (m as f64).sqrt() * mean / spread.sqrt()
    };
    Ok(EstimatorStats {
        mean,
        variance,
        snr,
        m,
        t,
    })
}

/// `trials` estimates of `Pᵗ(s)`, each from `m` fresh samples of the
/// hidden-cut output distribution. Trial `i` uses `derive_seed(seed, i)`.
pub fn hidden_cut_estimates(
    dist: &OutcomeDistribution,
    s: &SubsystemMask,
    m: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if s.len() != dist.n() {
        return Err(Error::Dimension(format!(
            "mask {s} does not match the {}-qubit register",
            dist.n()
        )));
    }
    if m == 0 {
        return Err(Error::Degeneracy(
            "estimator needs at least one sample".into(),
        ));
    }
    let index = WeightedIndex::new(dist.probs().values())
        .map_err(|e| Error::NumericalConsistency(format!("cannot sample: {e}")))?;
    let sbits = s.bits();
    Ok((0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(derive_seed(seed, i as u64));
            let odd = (0..m)
                .filter(|_| parity(index.sample(&mut rng) as u64 & sbits) == 1)
                .count();
            estimate_from_count(odd, m)
        })
        .collect())
}

/// The same estimates obtained from `m` swap tests per trial.
pub fn swap_test_estimates(
    p_true: f64,
    t: u32,
    m: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let shots = swap_test_bernoulli(p_true, t, m, derive_seed(seed, i as u64))?;
            let ones = shots.samples().iter().filter(|x| !x.is_empty()).count();
            Ok(estimate_from_count(ones, m))
        })
        .collect()
}

/// Sample mean and unbiased sample variance.
pub fn mean_and_variance(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub critical_value_1pct: f64,
}

impl KsResult {
    /// True when the samples cannot be told apart at the 1% level.
    pub fn indistinguishable(&self) -> bool {
        self.statistic < self.critical_value_1pct
    }
}

/// Two-sample Kolmogorov–Smirnov distance; ties are handled by comparing the
/// empirical CDFs only after every copy of a value has been consumed.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Domain("KS test needs two nonempty samples".into()));
    }
    if a.iter().chain(b).any(|x| x.is_nan()) {
        return Err(Error::Domain("KS test got NaN".into()));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(KsResult {
        statistic: d,
        critical_value_1pct: KS_CRITICAL_COEFF_1PCT * ((na + nb) / (na * nb)).sqrt(),
    })
}

/// The estimator as a fixed two-layer network: hidden layer `W1 = M` with
/// zero bias and mod-2 activation, output weight `−2/m` on every hidden unit
/// and output bias 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoLayerNetwork {
    pub n: usize,
    pub m: usize,
    #[serde(rename = "W1")]
    pub w1: Vec<Vec<u8>>,
    #[serde(rename = "W2_scale")]
    pub w2_scale: f64,
    pub b2: f64,
}

pub fn export_two_layer_network(m: &MeasurementMatrix) -> Result<TwoLayerNetwork> {
    if m.m() == 0 || m.n() == 0 {
        return Err(Error::Degeneracy("network export needs m, n ≥ 1".into()));
    }
    Ok(TwoLayerNetwork {
        n: m.n(),
        m: m.m(),
        w1: m
            .rows()
            .map(|r| r.to_bools().into_iter().map(u8::from).collect())
            .collect(),
        w2_scale: -(2.0 / m.m() as f64),
        b2: 1.0,
    })
}

impl TwoLayerNetwork {
    /// Forward pass on the bits of `s`.
    pub fn evaluate(&self, s: &SubsystemMask) -> Result<f64> {
        if s.len() != self.n {
            return Err(Error::Dimension(format!(
                "input {s} for a network with {} inputs",
                self.n
            )));
        }
        let input = s.to_bools();
        let hidden: usize = self
            .w1
            .iter()
            .map(|row| {
                let pre: usize = row
                    .iter()
                    .zip(&input)
                    .map(|(&w, &x)| usize::from(w) * usize::from(x))
                    .sum();
                pre % 2
            })
            .sum();
        Ok(self.b2 + self.w2_scale * hidden as f64)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let net: Self = serde_json::from_str(s)?;
        if net.w1.len() != net.m
            || net
                .w1
                .iter()
                .any(|r| r.len() != net.n || r.iter().any(|&b| b > 1))
        {
            return Err(Error::Dimension(
                "W1 does not match the declared m × n bit matrix".into(),
            ));
        }
        Ok(net)
    }
}
