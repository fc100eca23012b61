//! Small-set-flip decoding: ratio-greedy, β-threshold and color-parallel.

mod coloring;
mod flips;
mod ledger;
mod parallel;
mod replay;
mod sequential;

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{param, Error, Result};

pub use coloring::{color_generators, Coloring};
pub use flips::{
    delta, in_filtered_family, lex_less, local_delta, precompute_flips, FlipEntry, FlipTable, FlipTemplate,
    GeneratorFrame, DEFAULT_ENUMERATION_CAP, MAX_LOCAL_CHECKS,
};
pub use ledger::{chi, f0_steps, ConstantsLedger};
pub use parallel::decode_parallel;
pub use replay::{replay_flips, support_bound, ReplayReport, SupportBound};
pub use sequential::{decode_beta, decode_beta_with, decode_ratio, decode_ratio_with, Rescan};

/// Threshold `β = num/den ∈ (0, 1]`, kept rational so flip decisions use
/// integer arithmetic only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Beta {
    num: u32,
    den: u32,
}

impl Beta {
    pub fn new(num: u32, den: u32) -> Result<Self> {
        if den == 0 || num == 0 || num > den {
            return Err(param(format!("beta={num}/{den} must lie in (0, 1]")));
        }
        Ok(Beta { num, den })
    }

    pub fn num(&self) -> u32 {
        self.num
    }

    pub fn den(&self) -> u32 {
        self.den
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `Δ ≥ β·w`, i.e. `Δ·den ≥ num·w`.
    #[inline]
    pub fn admits(&self, delta: i64, weight: u32) -> bool {
        delta * self.den as i64 >= self.num as i64 * weight as i64
    }
}

impl FromStr for Beta {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (n, d) = s.split_once('/').unwrap_or((s, "1"));
        let parse = |t: &str| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| Error::Parse(format!("beta `{s}` is not num/denom")))
        };
        Beta::new(parse(n)?, parse(d)?)
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl Serialize for Beta {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Beta {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Ratio,
    Beta,
    Parallel,
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ratio" => Ok(Variant::Ratio),
            "beta" => Ok(Variant::Beta),
            "parallel" => Ok(Variant::Parallel),
            _ => Err(Error::Parse(format!("unknown variant `{s}`"))),
        }
    }
}

/// When the parallel decoder stops.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Stopping {
    /// After a full color sweep without any flip.
    Fixpoint,
    /// After exactly `f₀(|σ|)` steps.
    F0Budget { steps: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Terminated {
    NoFlipAvailable,
    StepBudget,
}

/// One applied flip. The parallel decoder logs one record per generator,
/// sharing the step index and color.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlipRecord {
    pub step: usize,
    pub color: Option<usize>,
    pub generator: usize,
    pub qubits: Vec<usize>,
    /// `Δ(σ_step, F)` against the syndrome at the start of the step.
    pub delta: i64,
    /// `|σ_X(F)|`
    pub weight: u32,
}

#[derive(Clone, Debug)]
pub struct DecodeOutcome {
    /// `Ê`
    pub correction: BitSet,
    pub flips: Vec<FlipRecord>,
    /// `F_0 ∪ … ∪ F_{f−1}`; the execution support is this plus `E`.
    pub flip_support: BitSet,
    /// `|σ_0|, |σ_1|, …, |σ_f|`
    pub syndrome_trace: Vec<usize>,
    pub final_syndrome: BitSet,
    pub steps: u64,
    pub terminated_by: Terminated,
    /// Color sweeps started (parallel decoder only).
    pub sweeps: Option<u64>,
}

impl DecodeOutcome {
    pub(crate) fn start(n: usize, sigma: &BitSet) -> Self {
        DecodeOutcome {
            correction: BitSet::new(n),
            flips: Vec::new(),
            flip_support: BitSet::new(n),
            syndrome_trace: vec![sigma.weight()],
            final_syndrome: sigma.clone(),
            steps: 0,
            terminated_by: Terminated::NoFlipAvailable,
            sweeps: None,
        }
    }

    /// `U = E ∪ F_0 ∪ … ∪ F_{f−1}`.
    pub fn execution_support(&self, e: &BitSet) -> BitSet {
        self.flip_support.or(e)
    }

    /// Text flip log: `step color generator qubits... delta` per line; the
    /// color column is `-` for sequential runs.
    pub fn flip_log_text(&self) -> String {
        let mut s = String::new();
        for r in &self.flips {
            let color = r.color.map_or("-".to_string(), |c| c.to_string());
            let _ = write!(s, "{} {} {}", r.step, color, r.generator);
            for q in &r.qubits {
                let _ = write!(s, " {q}");
            }
            let _ = writeln!(s, " {}", r.delta);
        }
        s
    }
}

/// Parses the text flip log back into records (weights are not stored and
/// come back as zero).
pub fn parse_flip_log(text: &str) -> Result<Vec<FlipRecord>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() < 4 {
                return Err(Error::Parse(format!("short flip log line `{line}`")));
            }
            let num = |t: &str| t.parse::<i64>().map_err(|_| Error::Parse(format!("bad token `{t}`")));
            let color = if toks[1] == "-" { None } else { Some(num(toks[1])? as usize) };
            let qubits = toks[3..toks.len() - 1]
                .iter()
                .map(|t| num(t).map(|x| x as usize))
                .collect::<Result<Vec<_>>>()?;
            Ok(FlipRecord {
                step: num(toks[0])? as usize,
                color,
                generator: num(toks[2])? as usize,
                qubits,
                delta: num(toks[toks.len() - 1])?,
                weight: 0,
            })
        })
        .collect()
}
