use std::fs::File;
use std::io::{BufWriter, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::OutcomeClass;
use crate::decoder::decode_beta;
use crate::error::Result;
use crate::noise::{sample_error, trial_rng, NoiseSpec};

use super::stats::{mann_kendall, MannKendall};
use super::{trial_stream, CodeInfo, Experiment};

/// First line of every cycles CSV, as `# <format>`.
pub const CYCLES_FORMAT: &str = "qexpander-cycles v1";

const TREND_ALPHA: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleRecord {
    pub grid_point: usize,
    pub p_phys: f64,
    pub p_synd: f64,
    pub trial: usize,
    /// 1-based.
    pub cycle: usize,
    pub e_weight: usize,
    pub d_weight: usize,
    pub sigma_weight: usize,
    pub steps: u64,
    /// Residual after this cycle's correction, with stabilizers dropped.
    pub residual_weight: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CyclesPointSummary {
    pub grid_point: usize,
    pub p_phys: f64,
    pub p_synd: f64,
    pub trials: usize,
    pub cycles: usize,
    /// Median residual weight over trials, per cycle.
    pub median_residual: Vec<f64>,
    /// Trials whose residual exceeded `blowup_fraction·n` at some cycle.
    pub blowups: usize,
    /// Trials ending in a logical failure after a final noiseless decode.
    pub logical_failures: usize,
    /// Trials whose final noiseless decode left a nonzero syndrome.
    pub final_syndrome_nonzero: usize,
    /// Trend test on the median residuals from `trend_from` onwards.
    pub trend: Option<MannKendall>,
    pub trend_upward: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CyclesReport {
    pub format: &'static str,
    pub code: CodeInfo,
    pub master_seed: u64,
    pub points: Vec<CyclesPointSummary>,
    #[serde(skip)]
    pub records: Vec<CycleRecord>,
}

struct TrialRun {
    records: Vec<CycleRecord>,
    blowup: bool,
    final_class: OutcomeClass,
}

fn run_trial(exp: &Experiment, gp: usize, spec: &NoiseSpec, t: usize) -> Result<TrialRun> {
    let code = &exp.code;
    let (p_phys, p_synd) = exp.config.grid()[gp];
    let mut rng = trial_rng(exp.config.master_seed, trial_stream(gp, t));
    let limit = exp.config.blowup_fraction * code.n() as f64;
    let mut residual = code.empty_error();
    let mut records = Vec::with_capacity(exp.config.cycles);
    let mut blowup = false;
    for cycle in 1..=exp.config.cycles {
        let (e, d) = sample_error(spec, code, &mut rng);
        residual.xor_with(&e);
        let sigma = code.syndrome(&residual).xor(&d);
        let out = exp.decode(&sigma)?;
        residual.xor_with(&out.correction);
        // Stabilizer residuals act trivially; dropping them keeps the recorded
        // weight a property of the error class.
        if exp.classifier.classify_residual(code, &residual).class == OutcomeClass::StabilizerEquivalent {
            residual = code.empty_error();
        }
        blowup |= residual.weight() as f64 > limit;
        records.push(CycleRecord {
            grid_point: gp,
            p_phys,
            p_synd,
            trial: t,
            cycle,
            e_weight: e.weight(),
            d_weight: d.weight(),
            sigma_weight: sigma.weight(),
            steps: out.steps,
            residual_weight: residual.weight(),
        });
    }
    // A final perfect round projects the residual back to the code space.
    let last = decode_beta(code, &exp.table, &code.syndrome(&residual), exp.beta());
    let final_class = exp.classifier.classify(code, &residual, &last.correction).class;
    Ok(TrialRun {
        records,
        blowup,
        final_class,
    })
}

/// Repeated noisy correction: each cycle adds fresh qubit noise to the
/// residual, decodes the noisy syndrome and applies the correction.
pub fn run_cycles(exp: &Experiment) -> Result<CyclesReport> {
    let cycles = exp.config.cycles;
    let mut points = Vec::new();
    let mut records = Vec::new();
    for (gp, &(p_phys, p_synd)) in exp.config.grid().iter().enumerate() {
        let spec = NoiseSpec::iid(p_phys, p_synd);
        let runs = (0..exp.config.trials)
            .into_par_iter()
            .map(|t| run_trial(exp, gp, &spec, t))
            .collect::<Result<Vec<_>>>()?;
        let median_residual: Vec<f64> = (0..cycles)
            .map(|c| median(runs.iter().map(|r| r.records[c].residual_weight as f64).collect()))
            .collect();
        let from = exp.config.trend_from.max(1) - 1;
        let trend = (cycles > from + 2).then(|| mann_kendall(&median_residual[from..]));
        points.push(CyclesPointSummary {
            grid_point: gp,
            p_phys,
            p_synd,
            trials: runs.len(),
            cycles,
            trend_upward: trend.is_some_and(|t| t.upward_at(TREND_ALPHA)),
            trend,
            median_residual,
            blowups: runs.iter().filter(|r| r.blowup).count(),
            logical_failures: runs.iter().filter(|r| r.final_class == OutcomeClass::LogicalFailure).count(),
            final_syndrome_nonzero: runs
                .iter()
                .filter(|r| r.final_class == OutcomeClass::SyndromeNonzero)
                .count(),
        });
        records.extend(runs.into_iter().flat_map(|r| r.records));
    }
    let report = CyclesReport {
        format: CYCLES_FORMAT,
        code: exp.info(),
        master_seed: exp.config.master_seed,
        points,
        records,
    };
    if let Some(out) = &exp.config.output {
        if let Some(dir) = out.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let mut file = BufWriter::new(File::create(out)?);
        writeln!(file, "# {CYCLES_FORMAT}")?;
        let mut w = csv::Writer::from_writer(file);
        for r in &report.records {
            w.serialize(r)?;
        }
        w.flush()?;
        std::fs::write(out.with_extension("summary.json"), serde_json::to_string_pretty(&report)? + "\n")?;
    }
    Ok(report)
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n == 0 {
        0.0
    } else if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}
