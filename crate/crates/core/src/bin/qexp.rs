use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use qexpander::decoder::{Beta, Variant};
use qexpander::harness::{
    run_cycles, run_invariant_audit, run_sweep, Experiment, ExperimentConfig, FailurePolicy, GraphSpec, LedgerInputs,
    StoppingRule,
};
use qexpander::{sample_biregular, BitSet, CodeRef};

#[derive(Parser)]
#[command(name = "qexp", version, about = "Quantum expander codes and small-set-flip decoding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a biregular graph; writes the graph file and a code reference.
    GenGraph {
        #[arg(long)]
        n_a: usize,
        #[arg(long, default_value_t = 5)]
        d_a: usize,
        #[arg(long, default_value_t = 10)]
        d_b: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Graph file; the code reference goes next to it as `<stem>.code.json`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Print code parameters and the constants ledger as JSON.
    BuildInfo(#[command(flatten)] Common),
    /// Decode one syndrome given as whitespace-separated check indices.
    Decode {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        syndrome: PathBuf,
    },
    /// Monte Carlo failure-rate sweep; CSV plus `.summary.json`.
    Sweep(#[command(flatten)] Common),
    /// Repeated noisy correction cycles; CSV plus `.summary.json`.
    Cycles(#[command(flatten)] Common),
    /// Invariant audit as JSON lines; exits nonzero on any violation.
    Audit(#[command(flatten)] Common),
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Code reference JSON, used when no config is given.
    #[arg(long, conflicts_with = "graph")]
    code: Option<PathBuf>,
    /// Graph file, used when no config is given.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Threshold as `num/denom`.
    #[arg(long)]
    beta: Option<Beta>,
    #[arg(long)]
    variant: Option<Variant>,
    #[arg(long)]
    stopping: Option<StoppingRule>,
}

impl Common {
    fn config(&self) -> Result<(ExperimentConfig, PathBuf)> {
        let (mut cfg, base) = match (&self.config, &self.code, &self.graph) {
            (Some(path), _, _) => ExperimentConfig::load(path).with_context(|| format!("loading {}", path.display()))?,
            (None, Some(path), _) => (standalone(GraphSpec::Code { path: path.clone() }), PathBuf::new()),
            (None, None, Some(path)) => (standalone(GraphSpec::File { path: path.clone() }), PathBuf::new()),
            (None, None, None) => bail!("one of --config, --code or --graph is required"),
        };
        if let Some(seed) = self.seed {
            cfg.master_seed = seed;
        }
        if let Some(beta) = self.beta {
            cfg.ledger.beta = beta;
        }
        if let Some(variant) = self.variant {
            cfg.variant = variant;
        }
        if let Some(stopping) = self.stopping {
            cfg.stopping = stopping;
        }
        if let Some(out) = &self.out {
            cfg.output = Some(out.clone());
        }
        Ok((cfg, base))
    }

    fn experiment(&self) -> Result<Experiment> {
        let (cfg, base) = self.config()?;
        Ok(Experiment::prepare(cfg, &base)?)
    }
}

/// Config for commands that only need a code and decoder settings.
fn standalone(graph: GraphSpec) -> ExperimentConfig {
    ExperimentConfig {
        graph,
        ledger: LedgerInputs {
            delta: 0.025,
            beta: Beta::new(1, 2).expect("valid"),
            c: 18.0,
            gamma: 0.1,
        },
        p_phys: vec![0.0],
        p_synd: vec![0.0],
        variant: Variant::Beta,
        stopping: StoppingRule::Fixpoint,
        trials: 1,
        cycles: 1,
        blowup_fraction: 0.1,
        trend_from: 10,
        master_seed: 0,
        output: None,
        failure_policy: FailurePolicy::Strict,
        fault: None,
    }
}

fn read_syndrome(path: &Path, m: usize) -> Result<BitSet> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut sigma = BitSet::new(m);
    for tok in text.split_whitespace() {
        let c: usize = tok.parse().with_context(|| format!("bad check index `{tok}`"))?;
        if c >= m {
            bail!("check index {c} out of range (code has {m} checks)");
        }
        sigma.toggle(c);
    }
    Ok(sigma)
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::GenGraph { n_a, d_a, d_b, seed, out } => {
            let g = sample_biregular(n_a, d_a, d_b, seed)?;
            g.write(&out)?;
            let code_path = out.with_extension("code.json");
            let name = out.file_name().context("--out must name a file")?;
            let code_ref = CodeRef::new(PathBuf::from(name));
            std::fs::write(&code_path, serde_json::to_string_pretty(&code_ref)? + "\n")?;
            print_json(&json!({
                "graph": out,
                "code": code_path,
                "n_a": g.n_a(),
                "n_b": g.n_b(),
                "d_a": g.d_a(),
                "d_b": g.d_b(),
                "seed": seed,
            }))?;
        }
        Command::BuildInfo(common) => print_json(&common.experiment()?.info())?,
        Command::Decode { common, syndrome } => {
            let exp = common.experiment()?;
            let sigma = read_syndrome(&syndrome, exp.code.num_checks())?;
            let out = exp.decode(&sigma)?;
            let log = out.flip_log_text();
            match &exp.config.output {
                Some(path) => std::fs::write(path, &log)?,
                None => print!("{log}"),
            }
            let summary = json!({
                "variant": exp.config.variant,
                "beta": exp.beta(),
                "syndrome_weight": sigma.weight(),
                "steps": out.steps,
                "sweeps": out.sweeps,
                "terminated_by": out.terminated_by,
                "correction": out.correction.to_indices(),
                "final_syndrome": out.final_syndrome.to_indices(),
            });
            if exp.config.output.is_some() {
                print_json(&summary)?;
            } else {
                eprintln!("{}", serde_json::to_string_pretty(&summary)?);
            }
        }
        Command::Sweep(common) => {
            let report = run_sweep(&common.experiment()?)?;
            print_json(&report)?;
        }
        Command::Cycles(common) => {
            let report = run_cycles(&common.experiment()?)?;
            print_json(&report)?;
        }
        Command::Audit(common) => {
            let report = run_invariant_audit(&common.experiment()?)?;
            print_json(&report)?;
            if !report.passed {
                eprintln!("audit failed");
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
