use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn qpurify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpurify"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn shipped(name: &str) -> String {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../manifests").join(name);
    root.to_str().unwrap().to_string()
}

/// Writes a manifest into `dir` and returns its path.
fn manifest(dir: &TempDir, name: &str, experiment: &str, seed: Option<u64>, parameters: Value) -> String {
    let mut m = json!({"schema": "qpurify.manifest/1", "experiment": experiment, "parameters": parameters});
    if let Some(s) = seed {
        m["seed"] = s.into();
    }
    let path: PathBuf = dir.path().join(name);
    std::fs::write(&path, m.to_string()).unwrap();
    path.to_str().unwrap().to_string()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn sep_demo_shipped_manifest() {
    let o = qpurify(&["sep-demo", "--manifest", &shipped("sep-demo.json")]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(
        text.lines().next(),
        Some("n,t,S,T,S_prime,T_prime,success,success_purified")
    );
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 3);
    let s_prime: Vec<usize> = rows.iter().map(|r| r[4].parse().unwrap()).collect();
    assert_eq!(s_prime, vec![9, 18, 35]);
    // S is 2n plus the control width
    let s: Vec<usize> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert_eq!(s, vec![5, 6, 7]);
    for r in &rows {
        for col in [6, 7] {
            let p: f64 = r[col].parse().unwrap();
            assert!((p - 1.0).abs() <= 1e-9);
        }
    }
}

#[test]
fn sep_demo_needs_a_seed() {
    let o = qpurify(&["sep-demo"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("seed"));
    let dir = TempDir::new().unwrap();
    let m = manifest(&dir, "m.json", "sep-demo", None, json!({"t": [1]}));
    assert_eq!(code(&qpurify(&["sep-demo", "--manifest", &m])), 2);
    assert_eq!(code(&qpurify(&["sep-demo", "--manifest", &m, "--seed", "4"])), 0);
}

#[test]
fn sep_demo_is_reproducible_and_writes_out() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("reports");
    let a = qpurify(&["sep-demo", "--seed", "99", "--out", out.to_str().unwrap()]);
    let b = qpurify(&["sep-demo", "--seed", "99"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(std::fs::read(out.join("sep_demo.csv")).unwrap(), a.stdout);
}

#[test]
fn sep_demo_over_budget() {
    let dir = TempDir::new().unwrap();
    let m = manifest(&dir, "m.json", "sep-demo", Some(1), json!({"n": 5, "t": [7]}));
    let o = qpurify(&["sep-demo", "--manifest", &m]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("budget"));
}

#[test]
fn manifest_errors_are_usage_errors() {
    let dir = TempDir::new().unwrap();
    let wrong_experiment = manifest(&dir, "a.json", "check-bounds", Some(1), json!({}));
    assert_eq!(code(&qpurify(&["sep-demo", "--manifest", &wrong_experiment])), 2);
    let unknown_param = manifest(&dir, "b.json", "sep-demo", Some(1), json!({"width": 3}));
    assert_eq!(code(&qpurify(&["sep-demo", "--manifest", &unknown_param])), 2);
    let path = dir.path().join("c.json");
    std::fs::write(
        &path,
        r#"{"schema":"qpurify.manifest/0","experiment":"sep-demo","seed":1}"#,
    )
    .unwrap();
    let o = qpurify(&["sep-demo", "--manifest", path.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("qpurify.manifest/1"));
    assert_eq!(code(&qpurify(&["sep-demo", "--manifest", "/nonexistent/m.json"])), 2);
    assert_eq!(code(&qpurify(&["sep-demo", "--seed", "1", "--budget", "0"])), 2);
    assert_eq!(code(&qpurify(&["no-such-command"])), 2);
}

#[test]
fn check_bounds_default_suite_passes() {
    let o = qpurify(&["check-bounds", "--manifest", &shipped("check-bounds.json")]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let reports: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(reports.len() > 100);
    assert!(reports.iter().all(|r| r["holds"] == true));
    let checks: std::collections::BTreeSet<&str> = reports
        .iter()
        .map(|r| r["parameters"]["check"].as_str().unwrap())
        .collect();
    assert!(!checks.contains("bbbv-hybrid"));
    assert!(checks.contains("bbbv-hybrid-doubled"));
    assert!(checks.contains("negative-counts"));
}

#[test]
fn check_bounds_empty_selection() {
    let dir = TempDir::new().unwrap();
    let m = manifest(&dir, "m.json", "check-bounds", Some(1), json!({"select": []}));
    let o = qpurify(&["check-bounds", "--manifest", &m]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
}

#[test]
fn check_bounds_injected_failure() {
    let dir = TempDir::new().unwrap();
    let m = manifest(
        &dir,
        "m.json",
        "check-bounds",
        Some(1),
        json!({"select": ["leakage", "rank"], "inject_broken": "rank"}),
    );
    let o = qpurify(&["check-bounds", "--manifest", &m]);
    assert_eq!(code(&o), 1);
    let err = stderr(&o);
    assert!(err.contains("first failing witness"), "{err}");
    assert!(err.contains("\"check\":\"rank\""), "{err}");
    // the untouched check still reports normally
    let leak: Vec<Value> = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap())
        .filter(|r| r["parameters"]["check"] == "leakage")
        .collect();
    assert_eq!(leak.len(), 6);
    assert!(leak.iter().all(|r| r["holds"] == true));
}

#[test]
fn check_bounds_stated_hybrid_fails() {
    let o = qpurify(&[
        "check-bounds",
        "--manifest",
        &shipped("check-bounds-stated-hybrid.json"),
    ]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("\"phi\""));
}

#[test]
fn check_bounds_selection_errors_and_determinism() {
    let dir = TempDir::new().unwrap();
    let bad = manifest(&dir, "a.json", "check-bounds", Some(1), json!({"select": ["nope"]}));
    assert_eq!(code(&qpurify(&["check-bounds", "--manifest", &bad])), 2);
    let unselected = manifest(
        &dir,
        "b.json",
        "check-bounds",
        Some(1),
        json!({"select": ["leakage"], "inject_broken": "rank"}),
    );
    assert_eq!(code(&qpurify(&["check-bounds", "--manifest", &unselected])), 2);
    let m = manifest(
        &dir,
        "c.json",
        "check-bounds",
        None,
        json!({"select": ["rank", "cloning"]}),
    );
    let a = qpurify(&["check-bounds", "--manifest", &m, "--seed", "17"]);
    let b = qpurify(&["check-bounds", "--manifest", &m, "--seed", "17"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let c = qpurify(&["check-bounds", "--manifest", &m, "--seed", "18"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn simulate_identity() {
    let o = qpurify(&["simulate", "--manifest", &shipped("simulate-identity.json")]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), r#"{"101":1.0}"#);
    let o = qpurify(&[
        "simulate",
        "--manifest",
        &shipped("simulate-identity.json"),
        "--input",
        "011",
    ]);
    assert_eq!(stdout(&o).trim(), r#"{"011":1.0}"#);
    let o = qpurify(&[
        "simulate",
        "--manifest",
        &shipped("simulate-identity.json"),
        "--input",
        "1x1",
    ]);
    assert_eq!(code(&o), 2);
}

fn generated(dir: &TempDir, args: &[&str], file: &str) -> (String, String) {
    let o = qpurify(args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let path = dir.path().join(file);
    std::fs::write(&path, &o.stdout).unwrap();
    (path.to_str().unwrap().to_string(), stderr(&o))
}

#[test]
fn simulate_measurement_algorithm() {
    let dir = TempDir::new().unwrap();
    let (circuit, _) = generated(&dir, &["generate", "algorithm", "--n", "2", "--t", "3"], "alg.json");
    for bit in ["0", "1"] {
        let (inst, hash) = generated(
            &dir,
            &[
                "generate",
                "instance",
                "--n",
                "2",
                "--t",
                "3",
                "--out-bit",
                bit,
                "--seed",
                "8",
            ],
            &format!("inst{bit}.json"),
        );
        let hash = hash.trim().strip_prefix("sha256 ").unwrap().to_string();
        let m = manifest(
            &dir,
            &format!("m{bit}.json"),
            "simulate",
            None,
            json!({"circuit": circuit, "instance": {"path": inst, "sha256": hash}, "input": ""}),
        );
        let o = qpurify(&["simulate", "--manifest", &m]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let d: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
        assert!((d[bit].as_f64().unwrap() - 1.0).abs() <= 1e-9, "{d}");

        let pinned_wrong = manifest(
            &dir,
            "wrong.json",
            "simulate",
            None,
            json!({"circuit": circuit, "instance": {"path": inst, "sha256": "00"}, "input": ""}),
        );
        assert_eq!(code(&qpurify(&["simulate", "--manifest", &pinned_wrong])), 2);
    }
    // no instance for the oracle gate
    assert_eq!(code(&qpurify(&["simulate", "--circuit", &circuit])), 2);
}

#[test]
fn simulate_purified_agrees() {
    let dir = TempDir::new().unwrap();
    let (circuit, _) = generated(&dir, &["generate", "purified", "--n", "2", "--t", "2"], "p.json");
    let (inst, _) = generated(
        &dir,
        &["generate", "instance", "--n", "2", "--t", "2", "--seed", "3"],
        "i.json",
    );
    let o = qpurify(&["simulate", "--circuit", &circuit, "--instance", &inst]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let d: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert!((d["1"].as_f64().unwrap() - 1.0).abs() <= 1e-9);
}

#[test]
fn simulate_oversized() {
    let dir = TempDir::new().unwrap();
    let (circuit, _) = generated(&dir, &["generate", "algorithm", "--n", "5", "--t", "7"], "alg.json");
    let (inst, _) = generated(
        &dir,
        &["generate", "instance", "--n", "5", "--t", "7", "--seed", "1"],
        "i.json",
    );
    let o = qpurify(&["simulate", "--circuit", &circuit, "--instance", &inst]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    // a tight amplitude budget trips the simulator itself
    let (small, _) = generated(&dir, &["generate", "algorithm", "--n", "2", "--t", "1"], "s.json");
    let (si, _) = generated(
        &dir,
        &["generate", "instance", "--n", "2", "--t", "1", "--seed", "1"],
        "si.json",
    );
    let o = qpurify(&["simulate", "--circuit", &small, "--instance", &si, "--budget", "8"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn simulate_bad_circuit_file() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"schema":"qpurify.circuit/1","qubits":{"in":[],"out":[],"work":[]},"steps":[]}"#,
    )
    .unwrap();
    let o = qpurify(&["simulate", "--circuit", path.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("gate_set"));
}

#[test]
fn generate_needs_a_seed_for_instances() {
    assert_eq!(code(&qpurify(&["generate", "instance"])), 2);
    let a = qpurify(&["generate", "instance", "--seed", "4"]);
    let b = qpurify(&["generate", "instance", "--seed", "4"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(
        code(&qpurify(&["generate", "instance", "--seed", "4", "--out-bit", "2"])),
        2
    );
}

fn small_chain(dir: &TempDir, seed: u64) -> Output {
    let m = manifest(
        dir,
        &format!("chain{seed}.json"),
        "simulator-chain",
        Some(seed),
        json!({"samples": 300, "l": [4, 8, 16], "adversaries": 1}),
    );
    qpurify(&["simulator-chain", "--manifest", &m])
}

#[test]
fn simulator_chain_small() {
    let dir = TempDir::new().unwrap();
    let o = small_chain(&dir, 21);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("stage,params,measured,bound,verdict"));
    let rows = csv_rows(&text);
    assert!(rows.iter().all(|r| r[4] == "true"));
    let stages: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    for s in [
        "O-vs-O1",
        "O1-vs-O2",
        "O2-vs-O3",
        "O2-vs-O3-monotone",
        "count-ledger",
        "dimension-ledger",
    ] {
        assert!(stages.contains(&s), "missing {s}");
    }
    let tds: Vec<f64> = rows
        .iter()
        .filter(|r| r[0] == "O2-vs-O3")
        .map(|r| r[2].parse().unwrap())
        .collect();
    assert_eq!(tds.len(), 3);
    assert!(tds.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    let dim = rows.iter().find(|r| r[0] == "dimension-ledger").unwrap();
    assert!(
        dim[1].contains("D_Initial=3375") && dim[1].contains("D_Final=144000"),
        "{dim:?}"
    );
    let honest = rows
        .iter()
        .find(|r| r[0] == "count-ledger" && r[1].contains("honest"))
        .unwrap();
    assert_eq!(honest[2], "0.0");

    let again = small_chain(&dir, 21);
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn simulator_chain_rejects_small_modulus() {
    let dir = TempDir::new().unwrap();
    let m = manifest(&dir, "m.json", "simulator-chain", Some(1), json!({"modulus": 3}));
    let o = qpurify(&["simulator-chain", "--manifest", &m]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("2T+1"));
}
