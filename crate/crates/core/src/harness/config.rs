use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::code::CodeRef;
use crate::decoder::{Beta, ConstantsLedger, Variant};
use crate::error::{param, Result};
use crate::graph::{sample_biregular, BipartiteGraph};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphSpec {
    /// Random `(d_A, d_B)`-biregular graph with `n_A` left vertices.
    Random { n_a: usize, d_a: usize, d_b: usize, seed: u64 },
    /// Graph text file, relative to the config file.
    File { path: PathBuf },
    /// Code reference JSON, relative to the config file.
    Code { path: PathBuf },
    /// The 13-qubit code of the seed `[[1,1,0],[0,1,1]]`.
    Toy,
}

impl GraphSpec {
    pub fn build(&self, base: &Path) -> Result<BipartiteGraph> {
        match self {
            GraphSpec::Random { n_a, d_a, d_b, seed } => sample_biregular(*n_a, *d_a, *d_b, *seed),
            GraphSpec::File { path } => BipartiteGraph::read(base.join(path)),
            GraphSpec::Code { path } => {
                let text = std::fs::read_to_string(base.join(path))?;
                let code_ref: CodeRef = serde_json::from_str(&text)?;
                let dir = base.join(path);
                let dir = dir.parent().unwrap_or(base);
                code_ref.load(dir).map(|c| c.graph().clone())
            }
            GraphSpec::Toy => BipartiteGraph::from_parity_check(&[vec![1, 1, 0], vec![0, 1, 1]]),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerInputs {
    pub delta: f64,
    pub beta: Beta,
    pub c: f64,
    pub gamma: f64,
}

impl LedgerInputs {
    pub fn ledger(&self, d_a: usize, d_b: usize) -> ConstantsLedger {
        ConstantsLedger::new(d_a, d_b, self.delta, self.beta.value(), self.c, self.gamma)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StoppingRule {
    #[default]
    Fixpoint,
    F0,
}

impl std::str::FromStr for StoppingRule {
    type Err = crate::error::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixpoint" => Ok(StoppingRule::Fixpoint),
            "f0" => Ok(StoppingRule::F0),
            _ => Err(crate::error::Error::Parse(format!("unknown stopping rule `{s}`"))),
        }
    }
}

/// How a stalled decode (nonzero final syndrome) counts in sweep aggregates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FailurePolicy {
    /// Every `syndrome_nonzero` outcome is a failure.
    #[default]
    Strict,
    /// `syndrome_nonzero` fails only when the residual exceeds `max_weight`.
    ResidualThreshold { max_weight: usize },
}

/// Deliberate corruption used to check that the audit catches it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaultInjection {
    /// Give generator 0 and its first conflicting neighbor the same color.
    ConflictingColors,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub graph: GraphSpec,
    pub ledger: LedgerInputs,
    pub p_phys: Vec<f64>,
    #[serde(default = "zero_grid")]
    pub p_synd: Vec<f64>,
    #[serde(default = "default_variant")]
    pub variant: Variant,
    #[serde(default)]
    pub stopping: StoppingRule,
    pub trials: usize,
    #[serde(default = "one")]
    pub cycles: usize,
    /// Residuals above this fraction of `n` flag a blow-up in cycle runs.
    #[serde(default = "default_blowup")]
    pub blowup_fraction: f64,
    /// First cycle (1-based) of the trend test window.
    #[serde(default = "default_trend_from")]
    pub trend_from: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub failure_policy: FailurePolicy,
    #[serde(default)]
    pub fault: Option<FaultInjection>,
}

fn zero_grid() -> Vec<f64> {
    vec![0.0]
}
fn default_variant() -> Variant {
    Variant::Beta
}
fn one() -> usize {
    1
}
fn default_blowup() -> f64 {
    0.1
}
fn default_trend_from() -> usize {
    10
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Reads a config; relative paths inside it resolve against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<(Self, PathBuf)> {
        let path = path.as_ref();
        let mut cfg = Self::from_json(&std::fs::read_to_string(path)?)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        if let Some(out) = &mut cfg.output {
            *out = base.join(&*out);
        }
        Ok((cfg, base))
    }

    /// `(p_phys, p_synd)` in row-major order over the two lists.
    pub fn grid(&self) -> Vec<(f64, f64)> {
        self.p_phys
            .iter()
            .flat_map(|&p| self.p_synd.iter().map(move |&q| (p, q)))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.p_phys.is_empty() || self.p_synd.is_empty() {
            return Err(param("noise grid is empty"));
        }
        for &x in self.p_phys.iter().chain(&self.p_synd) {
            if !(0.0..=1.0).contains(&x) {
                return Err(param(format!("{x} is not a probability")));
            }
        }
        if self.trials == 0 {
            return Err(param("trials must be at least 1"));
        }
        if self.cycles == 0 {
            return Err(param("cycles must be at least 1"));
        }
        if self.grid().len() as u64 > u32::MAX as u64 || self.trials as u64 > u32::MAX as u64 {
            return Err(param("grid or trial count exceeds the 32-bit stream layout"));
        }
        // Degrees only scale constants; the preconditions depend on δ, β, c.
        self.ledger.ledger(1, 1).check_preconditions()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
        "graph": {"kind": "random", "n_a": 20, "d_a": 5, "d_b": 10, "seed": 3},
        "ledger": {"delta": 0.025, "beta": "1/2", "c": 18, "gamma": 0.1},
        "p_phys": [0.001, 0.01],
        "p_synd": [0, 0.0001],
        "trials": 10,
        "master_seed": 7
    }"#;

    #[test]
    fn parses_with_defaults() {
        let cfg = ExperimentConfig::from_json(SAMPLE).unwrap();
        assert_eq!(cfg.variant, Variant::Beta);
        assert_eq!(cfg.stopping, StoppingRule::Fixpoint);
        assert_eq!(cfg.cycles, 1);
        assert_eq!(cfg.failure_policy, FailurePolicy::Strict);
        assert_eq!(cfg.grid(), vec![(0.001, 0.0), (0.001, 0.0001), (0.01, 0.0), (0.01, 0.0001)]);
        cfg.validate().unwrap();
        let back = ExperimentConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_bad_configs() {
        let mut cfg = ExperimentConfig::from_json(SAMPLE).unwrap();
        cfg.trials = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::from_json(SAMPLE).unwrap();
        cfg.p_phys.clear();
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::from_json(SAMPLE).unwrap();
        cfg.ledger.c = 10.0;
        assert!(cfg.validate().is_err());
        assert!(ExperimentConfig::from_json(&SAMPLE.replace("1/2", "3/2")).is_err());
    }
}
