//! Monte Carlo experiment driver: sweeps, repeated-cycle runs and invariant
//! audits over one code.

mod audit;
mod config;
mod cycles;
mod stats;
mod sweep;

use std::path::Path;

use serde::Serialize;

use crate::analysis::Classifier;
use crate::bitset::BitSet;
use crate::code::{build_code, CssCode};
use crate::decoder::{
    color_generators, decode_beta, decode_parallel, decode_ratio, f0_steps, precompute_flips, Beta, Coloring,
    ConstantsLedger, DecodeOutcome, FlipTable, Stopping, Variant,
};
use crate::error::Result;

pub use audit::{run_invariant_audit, AuditReport, AuditTrial, CheckResult};
pub use config::{ExperimentConfig, FailurePolicy, FaultInjection, GraphSpec, LedgerInputs, StoppingRule};
pub use cycles::{run_cycles, CycleRecord, CyclesPointSummary, CyclesReport, CYCLES_FORMAT};
pub use stats::{mann_kendall, wilson_interval, MannKendall};
pub use sweep::{replay_trial, run_sweep, PointSummary, SweepReport, TrialRecord, SWEEP_FORMAT};

/// Everything shared read-only across the trials of one experiment.
pub struct Experiment {
    pub config: ExperimentConfig,
    pub code: CssCode,
    pub table: FlipTable,
    pub coloring: Coloring,
    pub classifier: Classifier,
    pub ledger: ConstantsLedger,
}

impl Experiment {
    /// Validates the config, builds the code and its decoder tables.
    pub fn prepare(config: ExperimentConfig, base: &Path) -> Result<Self> {
        config.validate()?;
        let graph = config.graph.build(base)?;
        let code = build_code(&graph);
        let ledger = config.ledger.ledger(code.d_a(), code.d_b());
        ledger.check_preconditions()?;
        let table = precompute_flips(&code)?;
        let mut coloring = color_generators(&table);
        if let Some(FaultInjection::ConflictingColors) = config.fault {
            if let Some(h) = (1..code.num_generators()).find(|&h| {
                table.frame(0).checks.iter().any(|c| table.frame(h).checks.contains(c))
            }) {
                coloring = coloring.with_merged(0, h);
            }
        }
        let classifier = Classifier::new(&code);
        Ok(Experiment {
            config,
            code,
            table,
            coloring,
            classifier,
            ledger,
        })
    }

    pub fn beta(&self) -> Beta {
        self.config.ledger.beta
    }

    /// Decodes with the configured variant and stopping rule.
    pub fn decode(&self, sigma: &BitSet) -> Result<DecodeOutcome> {
        Ok(match self.config.variant {
            Variant::Ratio => decode_ratio(&self.code, &self.table, sigma),
            Variant::Beta => decode_beta(&self.code, &self.table, sigma, self.beta()),
            Variant::Parallel => {
                let stopping = match self.config.stopping {
                    StoppingRule::Fixpoint => Stopping::Fixpoint,
                    StoppingRule::F0 => Stopping::F0Budget {
                        steps: f0_steps(sigma.weight(), &self.ledger)?,
                    },
                };
                decode_parallel(&self.code, &self.table, &self.coloring, sigma, self.beta(), stopping)
            }
        })
    }

    pub fn info(&self) -> CodeInfo {
        CodeInfo {
            n: self.code.n(),
            k: self.code.dimension(),
            n_a: self.code.graph().n_a(),
            n_b: self.code.graph().n_b(),
            d_a: self.code.d_a(),
            d_b: self.code.d_b(),
            num_checks: self.code.num_checks(),
            num_generators: self.code.num_generators(),
            num_colors: self.coloring.num_colors(),
            ledger: self.ledger.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CodeInfo {
    pub n: usize,
    pub k: usize,
    pub n_a: usize,
    pub n_b: usize,
    pub d_a: usize,
    pub d_b: usize,
    pub num_checks: usize,
    pub num_generators: usize,
    pub num_colors: usize,
    pub ledger: ConstantsLedger,
}

/// RNG stream of trial `t` at grid point `gp`.
pub fn trial_stream(gp: usize, t: usize) -> u64 {
    ((gp as u64) << 32) | t as u64
}
