use std::path::Path;
use std::process::{Command, Output};

use qexpander::decoder::parse_flip_log;

fn qexp(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qexp"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("qexp runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn write_config(dir: &Path, name: &str, extra: &str) {
    let text = format!(
        r#"{{
            "graph": {{"kind": "code", "path": "g.code.json"}},
            "ledger": {{"delta": 0.025, "beta": "1/2", "c": 18, "gamma": 0.1}},
            "p_phys": [0.002, 0.02],
            "trials": 20,
            "master_seed": 5{extra}
        }}"#
    );
    std::fs::write(dir.join(name), text).unwrap();
}

fn gen_graph(dir: &Path) {
    let info = stdout_json(&qexp(&["gen-graph", "--n-a", "20", "--seed", "3", "--out", "g.txt"], dir));
    assert_eq!(info["n_b"], 10);
}

#[test]
fn gen_graph_and_build_info() {
    let dir = tempfile::tempdir().unwrap();
    gen_graph(dir.path());
    let text = std::fs::read_to_string(dir.path().join("g.txt")).unwrap();
    assert_eq!(text.lines().next(), Some("20 10 5 10"));
    assert_eq!(text.lines().count(), 21);
    let code_ref: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("g.code.json")).unwrap()).unwrap();
    assert_eq!(code_ref["graph"], "g.txt");

    let info = stdout_json(&qexp(&["build-info", "--code", "g.code.json"], dir.path()));
    assert_eq!(info["n"], 500);
    assert_eq!(info["num_checks"], 200);
    let same = stdout_json(&qexp(&["build-info", "--graph", "g.txt"], dir.path()));
    assert_eq!(info, same);
}

#[test]
fn decode_writes_flip_log() {
    let dir = tempfile::tempdir().unwrap();
    gen_graph(dir.path());
    let info = stdout_json(&qexp(&["build-info", "--graph", "g.txt"], dir.path()));
    assert_eq!(info["n_a"], 20);

    // Qubit 0 is (α=0, a=0); its checks are (0, β) for β ∈ Γ(0).
    let first = std::fs::read_to_string(dir.path().join("g.txt")).unwrap();
    let checks: Vec<&str> = first.lines().nth(1).unwrap().split_whitespace().collect();
    std::fs::write(dir.path().join("s.txt"), checks.join(" ")).unwrap();

    for variant in ["beta", "ratio", "parallel"] {
        let out = qexp(
            &["decode", "--graph", "g.txt", "--syndrome", "s.txt", "--variant", variant, "--beta", "1/2", "--out", "log.txt"],
            dir.path(),
        );
        let summary = stdout_json(&out);
        assert_eq!(summary["final_syndrome"], serde_json::json!([]), "{variant}");
        assert_eq!(summary["correction"], serde_json::json!([0]), "{variant}");
        let log = std::fs::read_to_string(dir.path().join("log.txt")).unwrap();
        let flips = parse_flip_log(&log).unwrap();
        assert_eq!(flips.len(), 1);
        assert_eq!((flips[0].qubits.clone(), flips[0].delta), (vec![0], 5));
        assert_eq!(flips[0].color.is_some(), variant == "parallel");
    }

    std::fs::write(dir.path().join("bad.txt"), "999999").unwrap();
    let out = qexp(&["decode", "--graph", "g.txt", "--syndrome", "bad.txt"], dir.path());
    assert!(!out.status.success());
}

#[test]
fn sweep_writes_versioned_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    gen_graph(dir.path());
    write_config(dir.path(), "sweep.json", "");
    let summary = stdout_json(&qexp(&["sweep", "--config", "sweep.json", "--seed", "11", "--out", "out/s.csv"], dir.path()));
    assert_eq!(summary["master_seed"], 11);
    assert_eq!(summary["points"].as_array().unwrap().len(), 2);
    let csv = std::fs::read_to_string(dir.path().join("out/s.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("# qexpander-sweep v1"));
    assert!(lines.next().unwrap().starts_with("grid_point,p_phys,p_synd,trial,stream"));
    assert_eq!(lines.count(), 40);
    assert!(dir.path().join("out/s.summary.json").exists());

    let again = stdout_json(&qexp(&["sweep", "--config", "sweep.json", "--seed", "11", "--variant", "parallel"], dir.path()));
    assert_eq!(again["variant"], "parallel");
}

#[test]
fn cycles_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    gen_graph(dir.path());
    write_config(dir.path(), "cycles.json", r#", "cycles": 5, "output": "c.csv""#);
    let summary = stdout_json(&qexp(&["cycles", "--config", "cycles.json"], dir.path()));
    assert_eq!(summary["points"][0]["median_residual"].as_array().unwrap().len(), 5);
    let csv = std::fs::read_to_string(dir.path().join("c.csv")).unwrap();
    assert!(csv.starts_with("# qexpander-cycles v1\n"));
    assert_eq!(csv.lines().count(), 2 + 2 * 20 * 5);
}

#[test]
fn audit_exit_status_tracks_violations() {
    let dir = tempfile::tempdir().unwrap();
    gen_graph(dir.path());
    write_config(dir.path(), "audit.json", "");
    let out = qexp(&["audit", "--config", "audit.json", "--out", "a.jsonl"], dir.path());
    assert!(stdout_json(&out)["passed"].as_bool().unwrap());
    let lines = std::fs::read_to_string(dir.path().join("a.jsonl")).unwrap();
    let kinds: Vec<String> = lines
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["kind"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(kinds.iter().filter(|k| *k == "trial").count(), 40);
    assert_eq!(kinds.last().map(String::as_str), Some("summary"));

    write_config(dir.path(), "bad.json", r#", "fault": "conflicting_colors""#);
    let out = qexp(&["audit", "--config", "bad.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn rejects_bad_flags() {
    let dir = tempfile::tempdir().unwrap();
    gen_graph(dir.path());
    for args in [
        vec!["build-info", "--graph", "g.txt", "--beta", "3/2"],
        vec!["build-info", "--graph", "g.txt", "--stopping", "never"],
        vec!["build-info"],
        vec!["sweep", "--config", "missing.json"],
    ] {
        assert!(!qexp(&args, dir.path()).status.success(), "{args:?}");
    }
}
