use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::binmath::SubsystemMask;
use crate::error::{Error, Result};
use crate::heuristics::{PlantedCutSpec, PLANTED_QUBIT_CAP};
use crate::qstate::{haar_random_state, mix_states, tensor_product, StateVector};
use crate::seeding::derive_seed;

/// How the input state is prepared from a state seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateRecipe {
    /// Tensor product of Haar-random factors of the given sizes; factor `i`
    /// uses child seed `i`.
    Product {
        factors: Vec<usize>,
    },
    Haar {
        n: usize,
    },
    /// A product state superposed with a Haar-random state of squared
    /// weight `eps`; the Haar part uses child seed `factors.len()`.
    Mixed {
        factors: Vec<usize>,
        eps: f64,
    },
    /// Two Haar blocks joined by a controlled `Rx(φ)`.
    Planted {
        left: usize,
        right: usize,
        phi: f64,
        #[serde(default)]
        control: Option<usize>,
        #[serde(default)]
        target: Option<usize>,
    },
}

impl StateRecipe {
    pub fn n(&self) -> usize {
        match self {
            StateRecipe::Product { factors } | StateRecipe::Mixed { factors, .. } => {
                factors.iter().sum()
            }
            StateRecipe::Haar { n } => *n,
            StateRecipe::Planted { left, right, .. } => left + right,
        }
    }

    pub fn planted_spec(&self) -> Option<PlantedCutSpec> {
        match self {
            StateRecipe::Planted {
                left,
                right,
                phi,
                control,
                target,
            } => Some(PlantedCutSpec {
                left: *left,
                right: *right,
                phi: *phi,
                control: *control,
                target: *target,
            }),
            _ => None,
        }
    }

    /// The mask marking the intended cut, when the recipe plants one.
    pub fn marked_mask(&self) -> Result<Option<SubsystemMask>> {
        match self {
            StateRecipe::Planted { .. } => {
                Ok(Some(self.planted_spec().expect("planted").planted_mask()?))
            }
            StateRecipe::Product { factors } | StateRecipe::Mixed { factors, .. }
                if factors.len() == 2 =>
            {
                let n = self.n();
                let qubits: Vec<usize> = (factors[0]..n).collect();
                Ok(Some(SubsystemMask::from_qubits(n, &qubits)?))
            }
            _ => Ok(None),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if n == 0 || n > PLANTED_QUBIT_CAP {
            return Err(Error::Config(format!(
                "recipe describes {n} qubits; supported range is 1..={PLANTED_QUBIT_CAP}"
            )));
        }
        match self {
            StateRecipe::Product { factors } | StateRecipe::Mixed { factors, .. } => {
                if factors.is_empty() || factors.contains(&0) {
                    return Err(Error::Config(
                        "every factor needs at least one qubit".into(),
                    ));
                }
            }
            StateRecipe::Haar { .. } => {}
            StateRecipe::Planted {
                left, right, phi, ..
            } => {
                if *left == 0 || *right == 0 || !phi.is_finite() {
                    return Err(Error::Config(
                        "planted recipe needs two nonempty blocks and a finite angle".into(),
                    ));
                }
                let spec = self.planted_spec().expect("planted");
                if spec.control() >= n || spec.target() >= n || spec.control() == spec.target() {
                    return Err(Error::Config(
                        "planted control/target must be distinct qubits in range".into(),
                    ));
                }
            }
        }
        if let StateRecipe::Mixed { eps, .. } = self {
            if !(0.0..=1.0).contains(eps) {
                return Err(Error::Config(format!("mixing weight {eps} outside [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn build(&self, state_seed: u64) -> Result<StateVector> {
        self.validate()?;
        let product = |factors: &[usize]| -> Result<StateVector> {
            let parts = factors
                .iter()
                .enumerate()
                .map(|(i, &k)| haar_random_state(k, derive_seed(state_seed, i as u64)))
                .collect::<Result<Vec<_>>>()?;
            tensor_product(&parts)
        };
        match self {
            StateRecipe::Product { factors } => product(factors),
            StateRecipe::Haar { n } => haar_random_state(*n, state_seed),
            StateRecipe::Mixed { factors, eps } => {
                let a = product(factors)?;
                let b = haar_random_state(self.n(), derive_seed(state_seed, factors.len() as u64))?;
                mix_states(&a, &b, *eps)
            }
            StateRecipe::Planted { .. } => self.planted_spec().expect("planted").build(state_seed),
        }
    }
}

fn default_name() -> String {
    "experiment".into()
}
fn default_recipe() -> StateRecipe {
    StateRecipe::Planted {
        left: 3,
        right: 3,
        phi: 0.1,
        control: None,
        target: None,
    }
}
fn default_t() -> Vec<u32> {
    vec![1, 2, 3]
}
fn default_shots() -> usize {
    crate::heuristics::DEFAULT_SHOTS_PER_RUN
}
fn default_runs() -> usize {
    crate::heuristics::DEFAULT_RUNS
}
fn default_precision() -> f64 {
    0.1
}
fn default_threshold() -> f64 {
    crate::heuristics::DEFAULT_MERGE_THRESHOLD
}
fn default_state_seeds() -> usize {
    6
}
fn default_ns() -> Vec<usize> {
    vec![4, 6, 8]
}
fn default_phis() -> Vec<f64> {
    vec![0.1, 1.0, PI]
}
fn default_trials() -> usize {
    10_000
}
fn default_moduli() -> Vec<u64> {
    vec![3, 2]
}

/// One JSON document drives every experiment; fields irrelevant to a verb are ignored by it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default = "default_recipe")]
    pub recipe: StateRecipe,
    /// Optional check against the recipe's qubit count.
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default = "default_t")]
    pub t: Vec<u32>,
    /// Shots per early-stopping run, or per estimate in the estimator demo.
    #[serde(default = "default_shots")]
    pub shots: usize,
    #[serde(default = "default_runs")]
    pub runs: usize,
    /// Early-stopping repetitions per data point; derived from `precision` when absent.
    #[serde(default)]
    pub repetitions: Option<usize>,
    #[serde(default = "default_precision")]
    pub precision: f64,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default)]
    pub seed: u64,
    /// Number of independently seeded states per sweep point.
    #[serde(default = "default_state_seeds")]
    pub state_seeds: usize,
    /// Register sizes of the planted-cut sweep (split into equal halves).
    #[serde(default = "default_ns")]
    pub ns: Vec<usize>,
    #[serde(default = "default_phis")]
    pub phis: Vec<f64>,
    /// Masks for the estimator demo; empty means every nontrivial mask.
    #[serde(default)]
    pub masks: Vec<SubsystemMask>,
    /// Monte Carlo trials in the estimator demo.
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_moduli")]
    pub moduli: Vec<u64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Applies `key=value` overrides (dotted keys reach into the recipe);
    /// values are parsed as JSON and fall back to plain strings.
    pub fn with_overrides(&self, overrides: &[String]) -> Result<Self> {
        let mut doc = serde_json::to_value(self)?;
        for ov in overrides {
            let (key, raw) = ov
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override {ov:?} is not KEY=VALUE")))?;
            let value =
                serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
            let mut slot = &mut doc;
            for part in key.split('.') {
                let obj = slot.as_object_mut().ok_or_else(|| {
                    Error::Config(format!("override key {key:?} does not name a field"))
                })?;
                slot = obj.entry(part.to_string()).or_insert(Value::Null);
            }
            *slot = value;
        }
        let cfg: Self = serde_json::from_value(doc).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.recipe.validate()?;
        if let Some(n) = self.n {
            if n != self.recipe.n() {
                return Err(Error::Config(format!(
                    "n = {n} but the recipe describes {} qubits",
                    self.recipe.n()
                )));
            }
        }
        if self.t.is_empty() || self.t.contains(&0) {
            return Err(Error::Config("t list must be nonempty and positive".into()));
        }
        let counts = [
            ("shots", self.shots),
            ("runs", self.runs),
            ("state_seeds", self.state_seeds),
            ("trials", self.trials),
            ("repetitions", self.repetitions.unwrap_or(1)),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, c)| *c == 0) {
            return Err(Error::Config(format!("{name} must be positive")));
        }
        if !(self.precision > 0.0 && self.precision.is_finite()) {
            return Err(Error::Config("precision must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.threshold) {
            return Err(Error::Config("threshold must lie in [0, 1)".into()));
        }
        if self.ns.iter().any(|&n| !(2..=PLANTED_QUBIT_CAP).contains(&n)) {
            return Err(Error::Config(format!(
                "sweep sizes must lie in 2..={PLANTED_QUBIT_CAP}"
            )));
        }
        if self.phis.iter().any(|p| !p.is_finite()) {
            return Err(Error::Config("rotation angles must be finite".into()));
        }
        if let Some(m) = self.masks.iter().find(|m| m.len() != self.recipe.n()) {
            return Err(Error::Config(format!(
                "mask {m} does not match the {}-qubit recipe",
                self.recipe.n()
            )));
        }
        Ok(())
    }

    /// Compact JSON of the resolved config, embedded in every artifact.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}
