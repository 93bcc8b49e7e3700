use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn qprob(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qprob"))
        .args(args)
        .current_dir(dir)
        .env_remove("QPROB_SEED")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn single_run_dir(out: &Path) -> PathBuf {
    let dirs: Vec<PathBuf> = fs::read_dir(out).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(dirs.len(), 1, "{dirs:?}");
    dirs.into_iter().next().unwrap()
}

#[test]
fn generate_then_verify_levy() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let gen = qprob(&["generate", "--kind", "tensor-symmetric-family", "--dims", "2,3", "--seed", "5", "--out", "fam.json"], d);
    assert_eq!(code(&gen), 0, "{}", String::from_utf8_lossy(&gen.stderr));
    let inst = read_json(&d.join("fam.json"));
    assert_eq!(inst["factor_dims"], serde_json::json!([2, 3]));

    let v = qprob(&["verify", "levy", "--in", "fam.json", "--lambda", "0.5", "--out", "levy.json"], d);
    assert_eq!(code(&v), 0, "{}", String::from_utf8_lossy(&v.stderr));
    let report = read_json(&d.join("levy.json"));
    assert_eq!(report["kind"], "inequality");
    assert_eq!(report["name"], "levy");
    assert_eq!(report["holds"], true);
    assert_eq!(report["hypotheses_ok"], true);
}

#[test]
fn verify_reports_hypothesis_failures_with_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fs::write(d.join("x.json"), r#"{"dim": 2, "entries": [[[1, 0], [0, 0]], [[0, 0], [2, 0]]]}"#).unwrap();
    let v = qprob(&["verify", "levy", "--in", "x.json", "--lambda", "0.5", "--out", "r.json"], d);
    assert_eq!(code(&v), 2);
    let report = read_json(&d.join("r.json"));
    assert_eq!(report["kind"], "error");
    assert_eq!(report["category"], "hypothesis");

    let cheb = qprob(&["verify", "chebyshev", "--in", "x.json", "--lambda", "1.5", "--p", "2", "--out", "c.json"], d);
    assert_eq!(code(&cheb), 0);
    assert_eq!(read_json(&d.join("c.json"))["holds"], true);
}

#[test]
fn verify_rejects_bad_input() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fs::write(d.join("bad.json"), r#"{"dim": 2, "entries": [[[1, 0], [0, 1]], [[0, 0], [1, 0]]]}"#).unwrap();
    let v = qprob(&["verify", "chebyshev", "--in", "bad.json", "--lambda", "1", "--p", "2", "--out", "r.json"], d);
    assert_eq!(code(&v), 2);
    assert_eq!(read_json(&d.join("r.json"))["category"], "input");

    fs::write(d.join("ok.json"), r#"{"dim": 1, "entries": [[[1, 0]]]}"#).unwrap();
    let missing = qprob(&["verify", "chebyshev", "--in", "ok.json", "--p", "2", "--out", "m.json"], d);
    assert_eq!(code(&missing), 2);
    let absent = qprob(&["verify", "median", "--in", "nowhere.json", "--p", "2", "--out", "n.json"], d);
    assert_eq!(code(&absent), 2);
}

#[test]
fn demo_remark_exits_cleanly() {
    let tmp = tempfile::tempdir().unwrap();
    let out = qprob(&["demo-remark", "--out", "demo.json"], tmp.path());
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("9.055385"), "{stdout}");
    let report = read_json(&tmp.path().join("demo.json"));
    assert_eq!(report["mechanics_ok"], true);
    assert_eq!(report["levy"]["hypotheses_ok"], false);
}

const SMALL: &str = r#"{"family_instances": 3, "classical_instances": 2, "hermitian_instances": 3}"#;

#[test]
fn suite_writes_a_run_directory_and_honors_the_seed_variable() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fs::write(d.join("cfg.json"), SMALL).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_qprob"))
        .args(["suite", "--config", "cfg.json", "--out", "runs"])
        .current_dir(d)
        .env("QPROB_SEED", "17")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let run = single_run_dir(&d.join("runs"));
    assert!(run.file_name().unwrap().to_str().unwrap().starts_with("run-17-"));
    let index = read_json(&run.join("suite.json"));
    assert_eq!(index["seed"], 17);
    assert_eq!(index["exit_code"], 0);
    let ids: Vec<&str> = index["instances"].as_array().unwrap().iter().map(|i| i["id"].as_str().unwrap()).collect();
    assert_eq!(ids.len(), 3 * 2 + 2 * 2 + 3);
    for id in ids {
        let inst = read_json(&run.join("instances").join(format!("{id}.json")));
        assert_eq!(inst["id"], id);
    }

    let bad = Command::new(env!("CARGO_BIN_EXE_qprob"))
        .args(["suite", "--config", "cfg.json", "--out", "runs2"])
        .current_dir(d)
        .env("QPROB_SEED", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(code(&bad), 2);
}

#[test]
fn suite_continues_past_hypothesis_failures() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let cfg = r#"{"plan": [
        {"id": "plain", "generator": {"kind": "random_hermitian", "dims": [3], "seed": 1},
         "verifiers": ["levy", "chebyshev"]},
        {"id": "family", "generator": {"kind": "tensor_symmetric_family", "dims": [2, 2], "seed": 2},
         "verifiers": ["levy"]}
    ]}"#;
    fs::write(d.join("cfg.json"), cfg).unwrap();
    let out = qprob(&["suite", "--config", "cfg.json", "--out", "runs"], d);
    assert_eq!(code(&out), 2);
    let run = single_run_dir(&d.join("runs"));
    let plain = read_json(&run.join("instances/plain.json"));
    let records = plain["records"].as_array().unwrap();
    let levy: Vec<&Value> = records.iter().filter(|r| r["verifier"] == "levy").collect();
    assert!(!levy.is_empty() && levy.iter().all(|r| r["status"] == "error" && r["outcome"]["category"] == "hypothesis"));
    let cheb: Vec<&Value> = records.iter().filter(|r| r["verifier"] == "chebyshev").collect();
    assert_eq!(cheb.len(), 9);
    assert!(cheb.iter().all(|r| r["status"] == "pass"));
    let family = read_json(&run.join("instances/family.json"));
    assert!(family["records"].as_array().unwrap().iter().all(|r| r["status"] == "pass" || r["status"] == "vacuous"));
}

#[test]
fn empty_plan_is_an_empty_passing_report() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fs::write(d.join("cfg.json"), r#"{"plan": []}"#).unwrap();
    let out = qprob(&["suite", "--config", "cfg.json", "--out", "runs"], d);
    assert_eq!(code(&out), 0);
    let index = read_json(&single_run_dir(&d.join("runs")).join("suite.json"));
    assert_eq!(index["totals"]["runs"], 0);
    assert_eq!(index["instances"], serde_json::json!([]));
}

#[test]
fn invalid_configuration_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fs::write(d.join("cfg.json"), r#"{"tolerances": {"tol_check": -1}}"#).unwrap();
    assert_eq!(code(&qprob(&["suite", "--config", "cfg.json", "--out", "runs"], d)), 2);
    assert!(!d.join("runs").exists());
}
