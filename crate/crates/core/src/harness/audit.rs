use std::collections::HashSet;
use std::fs::File;
use std::io::{BufWriter, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{
    brute_force_decode, build_syndrome_graph, connected_components, residual_noise_bound, degree_bound, locality_check,
    Classifier, ResidualBoundAudit, OutcomeClass,
};
use crate::bitset::BitSet;
use crate::code::build_code;
use crate::decoder::{
    decode_beta, decode_parallel, in_filtered_family, precompute_flips, replay_flips, support_bound, Stopping,
};
use crate::error::{Error, Result};
use crate::noise::{observed_syndrome, sample_error, trial_rng, NoiseSpec};

use super::config::GraphSpec;
use super::{trial_stream, CodeInfo, Experiment};

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        CheckResult {
            name,
            passed,
            detail: detail.into(),
        }
    }
}

/// One JSON line of the audit report.
#[derive(Clone, Debug, Serialize)]
pub struct AuditTrial {
    pub grid_point: usize,
    pub trial: usize,
    /// RNG stream of the trial under the config's master seed.
    pub stream: u64,
    pub class: OutcomeClass,
    pub residual_weight: usize,
    pub support_slack: f64,
    pub parallel_support_slack: Option<f64>,
    pub sweeps: Option<u64>,
    pub threshold_ok: bool,
    pub progress_ok: bool,
    pub support_ok: bool,
    pub replay_ok: bool,
    pub parallel_ok: Option<bool>,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub code: CodeInfo,
    pub checks: Vec<CheckResult>,
    pub trials: usize,
    pub failed_trials: usize,
    /// `(grid_point, trial, stream)` of the first failing trial.
    pub first_failure: Option<(usize, usize, u64)>,
    pub passed: bool,
    #[serde(skip)]
    pub records: Vec<AuditTrial>,
}

/// Runs the structural checks once and the per-trial decoder invariants on
/// every grid point; writes JSON lines (trials, then checks, then a summary)
/// when the config names an output path.
pub fn run_invariant_audit(exp: &Experiment) -> Result<AuditReport> {
    let mut checks = structural_checks(exp);
    checks.extend(toy_oracle_checks()?);
    if let Some(c) = locality_probe(exp)? {
        checks.push(c);
    }
    let sound_coloring = checks.iter().any(|c| c.name == "coloring_soundness" && c.passed);

    let mut records = Vec::new();
    for (gp, &(p, q)) in exp.config.grid().iter().enumerate() {
        let spec = NoiseSpec::iid(p, q);
        let recs: Vec<AuditTrial> = (0..exp.config.trials)
            .into_par_iter()
            .map(|t| audit_trial(exp, &spec, gp, t, sound_coloring))
            .collect();
        records.extend(recs);
    }
    let failed: Vec<&AuditTrial> = records.iter().filter(|r| !r.passed).collect();
    let report = AuditReport {
        code: exp.info(),
        trials: records.len(),
        failed_trials: failed.len(),
        first_failure: failed.first().map(|r| (r.grid_point, r.trial, r.stream)),
        passed: failed.is_empty() && checks.iter().all(|c| c.passed),
        checks,
        records,
    };
    if let Some(out) = &exp.config.output {
        if let Some(dir) = out.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let mut w = BufWriter::new(File::create(out)?);
        for r in &report.records {
            writeln!(w, "{}", serde_json::json!({"kind": "trial", "record": r}))?;
        }
        for c in &report.checks {
            writeln!(w, "{}", serde_json::json!({"kind": "check", "record": c}))?;
        }
        writeln!(w, "{}", serde_json::json!({"kind": "summary", "record": &report}))?;
        w.flush()?;
    }
    Ok(report)
}

fn audit_trial(exp: &Experiment, spec: &NoiseSpec, gp: usize, t: usize, sound_coloring: bool) -> AuditTrial {
    let code = &exp.code;
    let beta = exp.beta();
    let stream = trial_stream(gp, t);
    let mut rng = trial_rng(exp.config.master_seed, stream);
    let (e, d) = sample_error(spec, code, &mut rng);
    let sigma = observed_syndrome(code, &e, &d);

    let seq = decode_beta(code, &exp.table, &sigma, beta);
    let replay = replay_flips(code, &sigma, &seq.flips, beta);
    let threshold_ok = replay.ok() && replay.reproduces(&seq);
    let progress_ok =
        seq.syndrome_trace.windows(2).all(|w| w[1] < w[0]) && seq.steps as usize <= sigma.weight();
    let bound = support_bound(code, &e, &d, &seq, beta);
    let cls = exp.classifier.classify(code, &e, &seq.correction);

    let (parallel_ok, parallel_slack, sweeps) = if sound_coloring {
        let par = decode_parallel(code, &exp.table, &exp.coloring, &sigma, beta, Stopping::Fixpoint);
        let rep = replay_flips(code, &sigma, &par.flips, beta);
        let pb = support_bound(code, &e, &d, &par, beta);
        let sweeps_ok = par.sweeps.is_some_and(|s| s <= sigma.weight() as u64 + 1);
        (Some(rep.ok() && rep.reproduces(&par) && pb.holds && sweeps_ok), Some(pb.slack), par.sweeps)
    } else {
        (None, None, None)
    };
    AuditTrial {
        grid_point: gp,
        trial: t,
        stream,
        class: cls.class,
        residual_weight: cls.residual_weight,
        support_slack: bound.slack,
        parallel_support_slack: parallel_slack,
        sweeps,
        threshold_ok,
        progress_ok,
        support_ok: bound.holds,
        replay_ok: threshold_ok,
        parallel_ok,
        passed: threshold_ok && progress_ok && bound.holds && parallel_ok != Some(false),
    }
}

fn structural_checks(exp: &Experiment) -> Vec<CheckResult> {
    let code = &exp.code;
    let table = &exp.table;
    let mut out = Vec::new();

    let ortho = code.orthogonality_violation();
    out.push(CheckResult::new(
        "css_orthogonality",
        ortho.is_none(),
        ortho.map_or("H_X H_Z^T = 0".into(), |(c, g)| format!("check {c} and generator {g} overlap oddly")),
    ));

    let conflict = exp.coloring.conflict(table);
    out.push(CheckResult::new(
        "coloring_soundness",
        conflict.is_none(),
        conflict.map_or("same-color check neighborhoods are disjoint".into(), |(a, b)| {
            format!("generators {a} and {b} share a color and a check")
        }),
    ));
    let colors = exp.coloring.num_colors() as u64;
    out.push(CheckResult::new(
        "color_count",
        colors <= exp.ledger.chi,
        format!("{colors} colors, chi = {}", exp.ledger.chi),
    ));

    let mut closure_ok = true;
    let mut family_ok = true;
    for t in table.templates() {
        let k = t.support_size();
        let full = (1u32 << k) - 1;
        let members: HashSet<u32> = t.filtered().iter().map(|e| e.qubits).collect();
        family_ok &= t.filtered().iter().all(|e| in_filtered_family(e, table.d_a()));
        closure_ok &= (1..full).all(|m| members.contains(&m) || members.contains(&(full ^ m)));
    }
    out.push(CheckResult::new(
        "flip_complement_closure",
        closure_ok,
        format!("{} templates", table.templates().len()),
    ));
    out.push(CheckResult::new("flip_family_membership", family_ok, ""));

    let graph = build_syndrome_graph(code);
    let bound = degree_bound(code.d_a(), code.d_b());
    out.push(CheckResult::new(
        "syndrome_graph_degree",
        graph.max_degree() <= bound,
        format!("max degree {} <= {bound}", graph.max_degree()),
    ));
    out
}

/// Exhaustive checks on the 13-qubit code: classification against the
/// stabilizer group and minimum-weight decoding, and the small-residual
/// bound on reduced residuals.
fn toy_oracle_checks() -> Result<Vec<CheckResult>> {
    let graph = GraphSpec::Toy.build(std::path::Path::new("."))?;
    let code = build_code(&graph);
    let table = precompute_flips(&code)?;
    let classifier = Classifier::new(&code);
    let beta = crate::decoder::Beta::new(1, 2)?;
    let ledger = crate::decoder::ConstantsLedger::new(code.d_a(), code.d_b(), 1.0 / 40.0, 0.5, 18.0, 1.0);
    let stabilizers: Vec<BitSet> = (0u32..1 << code.num_generators())
        .map(|m| {
            let mut s = code.empty_error();
            for g in (0..code.num_generators()).filter(|g| m >> g & 1 == 1) {
                s.xor_with(&code.hz().row_bits(g));
            }
            s
        })
        .collect();

    let mut agree = 0;
    let mut total = 0;
    let mut bound_violations = 0;
    // Every error of weight 1 (a == b) and 2.
    for a in 0..code.n() {
        for b in a..code.n() {
            let e = if a == b {
                BitSet::from_indices(code.n(), [a])
            } else {
                BitSet::from_indices(code.n(), [a, b])
            };
            let sigma = code.syndrome(&e);
            let out = decode_beta(&code, &table, &sigma, beta);
            let r = e.xor(&out.correction);
            let ours = classifier.classify_residual(&code, &r).class.is_success();
            let oracle = code.syndrome(&r).is_empty() && stabilizers.contains(&r);
            let mw = brute_force_decode(&code, &sigma, 3).expect("weight-2 preimage exists");
            let mw_success = stabilizers.contains(&e.xor(&mw));
            let mw_class = classifier.classify(&code, &e, &mw).class.is_success();
            total += 1;
            if ours == oracle && mw_class == mw_success {
                agree += 1;
            }
            for c in 0..code.num_checks() {
                let d = BitSet::from_indices(code.num_checks(), [c]);
                let out = decode_beta(&code, &table, &sigma.xor(&d), beta);
                if residual_noise_bound(&code, &e.xor(&out.correction), &d, &ledger)? == ResidualBoundAudit::Violated {
                    bound_violations += 1;
                }
            }
        }
    }
    Ok(vec![
        CheckResult::new("toy_classification_oracle", agree == total, format!("{agree}/{total} agree")),
        CheckResult::new(
            "toy_small_residual_bound",
            bound_violations == 0,
            format!("{bound_violations} violations"),
        ),
    ])
}

/// Two well-separated single-qubit errors: each execution-support component
/// must decode as it would alone.
fn locality_probe(exp: &Experiment) -> Result<Option<CheckResult>> {
    let code = &exp.code;
    let graph = build_syndrome_graph(code);
    let no_checks = code.empty_syndrome();
    let first = BitSet::from_indices(code.n(), [0]);
    let near = graph.neighborhood(&graph.neighborhood(&graph.vertex_set(&first, &no_checks)));
    let Some(far) = (0..code.n()).rev().find(|&v| !near.contains(v) && !graph.neighbors(v).iter().any(|&w| near.contains(w))) else {
        return Ok(None);
    };
    let e = BitSet::from_indices(code.n(), [0, far]);
    let beta = exp.beta();
    let out = decode_beta(code, &exp.table, &code.syndrome(&e), beta);
    let u = out.execution_support(&e);
    let mut ok = true;
    let mut tested = 0;
    for comp in connected_components(&graph, &graph.vertex_set(&u, &no_checks)) {
        let k = BitSet::from_indices(code.n(), comp);
        match locality_check(code, &exp.table, &graph, &e, &no_checks, &k, beta) {
            Ok(r) => {
                ok &= r;
                tested += 1;
            }
            Err(Error::Precondition(_)) => {}
            Err(other) => return Err(other),
        }
    }
    Ok(Some(CheckResult::new("locality", ok, format!("{tested} components checked"))))
}
