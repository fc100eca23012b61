use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::OutcomeClass;
use crate::decoder::{support_bound, Beta, Variant};
use crate::error::{param, Result};
use crate::noise::{observed_syndrome, sample_error, trial_rng, NoiseSpec};

use super::config::{FailurePolicy, StoppingRule};
use super::stats::wilson_interval;
use super::{trial_stream, CodeInfo, Experiment};

/// First line of every sweep CSV, as `# <format>`.
pub const SWEEP_FORMAT: &str = "qexpander-sweep v1";

const CONFIDENCE: f64 = 0.95;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub grid_point: usize,
    pub p_phys: f64,
    pub p_synd: f64,
    pub trial: usize,
    pub stream: u64,
    pub e_weight: usize,
    pub d_weight: usize,
    pub sigma_weight: usize,
    pub steps: u64,
    pub sweeps: Option<u64>,
    pub correction_weight: usize,
    pub final_syndrome_weight: usize,
    pub class: OutcomeClass,
    pub residual_weight: usize,
    /// `|E ∪ D|/(2α₀) − |U ∪ D|`.
    pub support_slack: f64,
    pub failure: bool,
    pub duration_us: u64,
}

impl TrialRecord {
    pub fn without_timing(&self) -> TrialRecord {
        TrialRecord {
            duration_us: 0,
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PointSummary {
    pub grid_point: usize,
    pub p_phys: f64,
    pub p_synd: f64,
    pub trials: usize,
    pub failures: usize,
    pub failure_rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub exact: usize,
    pub stabilizer_equivalent: usize,
    pub logical_failure: usize,
    pub syndrome_nonzero: usize,
    pub mean_correction_weight: f64,
    pub mean_residual_weight: f64,
    pub mean_steps: f64,
    pub max_steps: u64,
    pub min_support_slack: f64,
    pub support_violations: usize,
}

/// Failure-rate ordering between adjacent `p_phys` values at one `p_synd`.
#[derive(Clone, Debug, Serialize)]
pub struct MonotoneCheck {
    pub p_synd: f64,
    pub p_low: f64,
    pub p_high: f64,
    /// `ordered`, `overlapping` (inverted within the intervals) or
    /// `inverted` (intervals separated).
    pub status: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub format: &'static str,
    pub code: CodeInfo,
    pub variant: Variant,
    pub beta: Beta,
    pub stopping: StoppingRule,
    pub master_seed: u64,
    pub failure_policy: FailurePolicy,
    pub confidence: f64,
    pub points: Vec<PointSummary>,
    pub monotonicity: Vec<MonotoneCheck>,
    #[serde(skip)]
    pub records: Vec<TrialRecord>,
}

/// Runs trial `t` of grid point `gp`; the record depends only on the config
/// and `(gp, t)`, apart from `duration_us`.
pub fn replay_trial(exp: &Experiment, gp: usize, t: usize) -> Result<TrialRecord> {
    let (p_phys, p_synd) = *exp
        .config
        .grid()
        .get(gp)
        .ok_or_else(|| param(format!("grid point {gp} out of range")))?;
    let spec = NoiseSpec::iid(p_phys, p_synd);
    let stream = trial_stream(gp, t);
    let mut rng = trial_rng(exp.config.master_seed, stream);
    let (e, d) = sample_error(&spec, &exp.code, &mut rng);
    let sigma = observed_syndrome(&exp.code, &e, &d);
    let start = Instant::now();
    let out = exp.decode(&sigma)?;
    let duration_us = start.elapsed().as_micros() as u64;
    let cls = exp.classifier.classify(&exp.code, &e, &out.correction);
    let bound = support_bound(&exp.code, &e, &d, &out, exp.beta());
    let failure = match (cls.class, exp.config.failure_policy) {
        (OutcomeClass::LogicalFailure, _) => true,
        (OutcomeClass::SyndromeNonzero, FailurePolicy::Strict) => true,
        (OutcomeClass::SyndromeNonzero, FailurePolicy::ResidualThreshold { max_weight }) => {
            cls.residual_weight > max_weight
        }
        _ => false,
    };
    Ok(TrialRecord {
        grid_point: gp,
        p_phys,
        p_synd,
        trial: t,
        stream,
        e_weight: e.weight(),
        d_weight: d.weight(),
        sigma_weight: sigma.weight(),
        steps: out.steps,
        sweeps: out.sweeps,
        correction_weight: out.correction.weight(),
        final_syndrome_weight: out.final_syndrome.weight(),
        class: cls.class,
        residual_weight: cls.residual_weight,
        support_slack: bound.slack,
        failure,
        duration_us,
    })
}

/// Runs every grid point; writes the CSV and its `.summary.json` sibling
/// when the config names an output path.
pub fn run_sweep(exp: &Experiment) -> Result<SweepReport> {
    let grid = exp.config.grid();
    let mut records = Vec::with_capacity(grid.len() * exp.config.trials);
    let mut points = Vec::with_capacity(grid.len());
    for (gp, &(p_phys, p_synd)) in grid.iter().enumerate() {
        let recs = (0..exp.config.trials)
            .into_par_iter()
            .map(|t| replay_trial(exp, gp, t))
            .collect::<Result<Vec<_>>>()?;
        points.push(summarize(gp, p_phys, p_synd, &recs));
        records.extend(recs);
    }
    let report = SweepReport {
        format: SWEEP_FORMAT,
        code: exp.info(),
        variant: exp.config.variant,
        beta: exp.beta(),
        stopping: exp.config.stopping,
        master_seed: exp.config.master_seed,
        failure_policy: exp.config.failure_policy,
        confidence: CONFIDENCE,
        monotonicity: monotonicity(&points),
        points,
        records,
    };
    if let Some(out) = &exp.config.output {
        write_sweep(&report, out)?;
    }
    Ok(report)
}

pub(crate) fn write_sweep(report: &SweepReport, out: &Path) -> Result<()> {
    if let Some(dir) = out.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut file = BufWriter::new(File::create(out)?);
    writeln!(file, "# {SWEEP_FORMAT}")?;
    let mut w = csv::Writer::from_writer(file);
    for r in &report.records {
        w.serialize(r)?;
    }
    w.flush()?;
    let summary = serde_json::to_string_pretty(report)?;
    std::fs::write(out.with_extension("summary.json"), summary + "\n")?;
    Ok(())
}

fn summarize(gp: usize, p_phys: f64, p_synd: f64, recs: &[TrialRecord]) -> PointSummary {
    let n = recs.len();
    let count = |c: OutcomeClass| recs.iter().filter(|r| r.class == c).count();
    let failures = recs.iter().filter(|r| r.failure).count();
    let mean = |f: &dyn Fn(&TrialRecord) -> f64| recs.iter().map(f).sum::<f64>() / n as f64;
    let (ci_low, ci_high) = wilson_interval(failures as u64, n as u64, CONFIDENCE);
    PointSummary {
        grid_point: gp,
        p_phys,
        p_synd,
        trials: n,
        failures,
        failure_rate: failures as f64 / n as f64,
        ci_low,
        ci_high,
        exact: count(OutcomeClass::Exact),
        stabilizer_equivalent: count(OutcomeClass::StabilizerEquivalent),
        logical_failure: count(OutcomeClass::LogicalFailure),
        syndrome_nonzero: count(OutcomeClass::SyndromeNonzero),
        mean_correction_weight: mean(&|r| r.correction_weight as f64),
        mean_residual_weight: mean(&|r| r.residual_weight as f64),
        mean_steps: mean(&|r| r.steps as f64),
        max_steps: recs.iter().map(|r| r.steps).max().unwrap_or(0),
        min_support_slack: recs.iter().map(|r| r.support_slack).fold(f64::INFINITY, f64::min),
        support_violations: recs.iter().filter(|r| r.support_slack < 0.0).count(),
    }
}

fn monotonicity(points: &[PointSummary]) -> Vec<MonotoneCheck> {
    let mut synd: Vec<f64> = points.iter().map(|p| p.p_synd).collect();
    synd.sort_by(f64::total_cmp);
    synd.dedup();
    let mut out = Vec::new();
    for q in synd {
        let mut row: Vec<&PointSummary> = points.iter().filter(|p| p.p_synd == q).collect();
        row.sort_by(|a, b| a.p_phys.total_cmp(&b.p_phys));
        for w in row.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let status = if lo.failure_rate <= hi.failure_rate {
                "ordered"
            } else if lo.ci_low <= hi.ci_high {
                "overlapping"
            } else {
                "inverted"
            };
            out.push(MonotoneCheck {
                p_synd: q,
                p_low: lo.p_phys,
                p_high: hi.p_phys,
                status,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::{ExperimentConfig, GraphSpec, LedgerInputs};

    fn config(p_phys: Vec<f64>, p_synd: Vec<f64>, trials: usize) -> ExperimentConfig {
        ExperimentConfig {
            graph: GraphSpec::Random { n_a: 20, d_a: 5, d_b: 10, seed: 1 },
            ledger: LedgerInputs { delta: 0.025, beta: Beta::new(1, 2).unwrap(), c: 18.0, gamma: 0.1 },
            p_phys,
            p_synd,
            variant: Variant::Beta,
            stopping: StoppingRule::Fixpoint,
            trials,
            cycles: 1,
            blowup_fraction: 0.1,
            trend_from: 10,
            master_seed: 5,
            output: None,
            failure_policy: FailurePolicy::Strict,
            fault: None,
        }
    }

    #[test]
    fn noiseless_sweep_never_fails() {
        let exp = Experiment::prepare(config(vec![0.0], vec![0.0], 50), Path::new(".")).unwrap();
        let rep = run_sweep(&exp).unwrap();
        assert_eq!(rep.points[0].failures, 0);
        assert_eq!(rep.points[0].exact, 50);
        assert_eq!(rep.records.len(), 50);
    }

    #[test]
    fn counts_add_up_and_replay_matches() {
        let exp = Experiment::prepare(config(vec![0.002, 0.02], vec![0.0, 0.001], 40), Path::new(".")).unwrap();
        let rep = run_sweep(&exp).unwrap();
        assert_eq!(rep.records.len(), 4 * 40);
        for p in &rep.points {
            assert_eq!(p.exact + p.stabilizer_equivalent + p.logical_failure + p.syndrome_nonzero, p.trials);
            assert_eq!(p.support_violations, 0);
        }
        let r = &rep.records[57];
        let again = replay_trial(&exp, r.grid_point, r.trial).unwrap();
        assert_eq!(again.without_timing(), r.without_timing());
        for r in rep.records.iter().filter(|r| r.p_synd == 0.0) {
            assert_eq!(r.class == OutcomeClass::SyndromeNonzero, r.final_syndrome_weight > 0);
        }
    }

    #[test]
    fn csv_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let mut bytes = Vec::new();
        for i in 0..2 {
            let mut cfg = config(vec![0.01], vec![0.001], 30);
            cfg.output = Some(dir.path().join(format!("s{i}.csv")));
            let exp = Experiment::prepare(cfg, Path::new(".")).unwrap();
            run_sweep(&exp).unwrap();
            let text = std::fs::read_to_string(dir.path().join(format!("s{i}.csv"))).unwrap();
            assert!(text.starts_with("# qexpander-sweep v1\n"));
            let stripped: Vec<String> = text
                .lines()
                .map(|l| l.rsplit_once(',').map_or(l.to_string(), |(head, _)| head.to_string()))
                .collect();
            bytes.push(stripped);
            assert!(dir.path().join(format!("s{i}.summary.json")).exists());
        }
        assert_eq!(bytes[0], bytes[1]);
    }
}
