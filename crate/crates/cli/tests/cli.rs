use std::process::Command;

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_digitdioph");

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(BIN)
        .args(args)
        .env_remove("DIGITDIOPH_BUDGET_ENUM")
        .env_remove("DIGITDIOPH_BUDGET_RESIDUE")
        .env_remove("DIGITDIOPH_BUDGET_BITS")
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    serde_json::from_str(&out).expect("valid json")
}

fn rational(v: &Value) -> (i64, i64) {
    (v["num"].as_i64().unwrap(), v["den"].as_i64().unwrap())
}

#[test]
fn profile_six_twelve() {
    let v = json(&["profile", "6", "12"]);
    assert_eq!(rational(&v["alpha1"]), (1, 1));
    assert_eq!(rational(&v["alpha2"]), (2, 1));
    assert_eq!(v["kstar"], 1);
    assert_eq!(v["bstar"], 3);
    assert_eq!(v["D1"], serde_json::json!([3]));
    assert_eq!(v["D2"], serde_json::json!([2]));
    assert_eq!(v["Dstar"], serde_json::json!([0, 1, 4, 5]));
    assert_eq!(v["inputs"]["t"], 12);
}

#[test]
fn profile_with_digits() {
    let v = json(&["profile", "6", "12", "5,0,4,1"]);
    assert_eq!(v["inputs"]["D"], serde_json::json!([0, 1, 4, 5]));
    assert_eq!(v["digits"]["d_subset_dstar"], true);
}

#[test]
fn gamma_counts() {
    let psi = "geom:c=1,beta=6,p=2,q=1,r=1";
    let v = json(&["gamma", "6", "12", "0,1,4,5", "--psi", psi, "--n", "2", "--method", "dp"]);
    assert_eq!(v["result"]["count"], 32);
    assert_eq!(v["result"]["count_kind"], "Prefilter");
    assert_eq!(v["result"]["m0"], 4);
    assert_eq!(v["result"]["M"], 9);
    assert_eq!(v["derived"]["threshold"]["N0"], 1);
    let v = json(&["gamma", "6", "12", "0,1,4,5", "--psi", psi, "--n", "2", "--members"]);
    assert_eq!(v["result"]["count"], 22);
    assert_eq!(v["result"]["members"].as_array().unwrap().len(), 22);
    for method in ["brute", "endpoint"] {
        let w = json(&["gamma", "6", "12", "0,1,4,5", "--psi", psi, "--n", "2", "--members", "--method", method]);
        assert_eq!(w["result"]["members"], v["result"]["members"], "{method}");
    }
}

#[test]
fn gamma_csv_table() {
    let (code, out, _) = run(&[
        "gamma", "6", "12", "0,1,4,5", "--psi", "geom:beta=6,p=2,q=1", "--n-max", "3", "--format", "csv",
    ]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "n,count,count_kind,ratio_to_b_alpha1_gamma_n\n1,8,Prefilter,2\n2,32,Prefilter,2\n3,128,Prefilter,2\n"
    );
}

#[test]
fn verdict_example() {
    let v = json(&[
        "verdict", "5", "5", "1,2", "--psi", "geom:c=1/4,beta=5,p=1,q=0,r=1", "--s", "1/2",
    ]);
    assert_eq!(v["verdict"]["measure_class"], "EmptySet");
    assert_eq!(v["verdict"]["theorem_applied"], "LLW1");
    let v = json(&["verdict", "3", "3", "0,2", "--psi", "geom:beta=3,p=1", "--s", "log(2)/log(3)"]);
    assert_eq!(v["verdict"]["measure_class"], "FullMeasureOfC");
    assert_eq!(v["verdict"]["theorem_applied"], "LSV");
}

#[test]
fn dim_report() {
    let v = json(&["dim", "3", "3", "0,2", "--psi", "geom:beta=3,p=2"]);
    let value = v["report"]["dim_intersection"]["value"].as_f64().unwrap();
    assert!((value - 0.315464876786).abs() < 1e-9);
}

#[test]
fn boxcount_converges() {
    let v = json(&["boxcount", "3", "2", "0,2", "--n-max", "20"]);
    let last = &v["rows"][19];
    assert_eq!(last["n"], 20);
    assert!((last["log_ratio"].as_f64().unwrap() - 2f64.ln() / 3f64.ln()).abs() <= 0.1);
}

#[test]
fn exit_codes() {
    let psi = "geom:beta=6,p=2,q=1";
    assert_eq!(run(&["profile", "6", "10"]).0, 1);
    assert_eq!(run(&["gamma", "6", "12", "0,9", "--psi", psi, "--n", "1"]).0, 1);
    assert_eq!(run(&["gamma", "6", "12", "0,1", "--psi", "geom:beta", "--n", "1"]).0, 1);
    assert_eq!(run(&["gamma", "6", "12", "0,1,4,5", "--psi", psi]).0, 1);
    assert_eq!(run(&["nonsense"]).0, 1);
    assert_eq!(run(&["--help"]).0, 0);
    let (code, _, err) = run(&["gamma", "6", "12", "0,1,4,5", "--psi", psi, "--n", "9", "--method", "brute"]);
    assert_eq!(code, 2, "{err}");
    assert_eq!(run(&["verify", "divisibility", "6", "12", "--n-max", "30"]).0, 0);
    let (code, out, _) = run(&["verify", "emptiness", "5", "2", "2,3", "--psi", "geom:beta=2,p=3", "--n-max", "4"]);
    assert_eq!(code, 3);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["passed"], false);
}

#[test]
fn budget_from_environment() {
    let out = Command::new(BIN)
        .args(["gamma", "3", "3", "0,2", "--psi", "geom:beta=3,p=2", "--n", "3", "--method", "brute"])
        .env("DIGITDIOPH_BUDGET_ENUM", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let (code, _, _) = run(&[
        "gamma", "3", "3", "0,2", "--psi", "geom:beta=3,p=2", "--n", "3", "--method", "brute", "--budget-enum", "10",
    ]);
    assert_eq!(code, 2);
}

#[test]
fn output_is_stable_across_threads() {
    let args = |threads: &'static str| {
        vec![
            "gamma", "6", "12", "0,1,4,5", "--psi", "geom:beta=6,p=2,q=1", "--n-max", "3", "--method", "brute",
            "--members", "--threads", threads,
        ]
    };
    let (_, one, _) = run(&args("1"));
    let (_, four, _) = run(&args("4"));
    assert_eq!(one, four);
    let (_, again, _) = run(&args("4"));
    assert_eq!(four, again);
}

#[test]
fn writes_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profile.json");
    let (code, out, _) = run(&["profile", "6", "12", "--output", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["bstar"], 3);
}

#[test]
fn sweep_tables() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("gamma.json");
    std::fs::write(
        &spec,
        r#"{"kind": "gamma", "method": "dp", "configs": [
            {"b": 6, "t": 12, "D": [0, 1, 4, 5], "psi": "geom:beta=6,p=2,q=1", "n_max": 2}
        ]}"#,
    )
    .unwrap();
    let (code, out, err) = run(&["sweep", "--spec", spec.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(
        lines[0],
        "b,t,D,psi,n,method,count,count_kind,prefilter_count,ratio_to_b_alpha1_gamma_n"
    );
    assert_eq!(lines[2], "6,12,\"0,1,4,5\",\"geom:c=1,beta=6,p=2,q=1,r=1\",2,dp,32,Prefilter,32,2");

    let spec = dir.path().join("verdict.json");
    std::fs::write(
        &spec,
        r#"{"kind": "verdict", "configs": [
            {"b": 5, "t": 5, "D": [1, 2], "psi": "geom:c=1/4,beta=5", "s": ["0", "1/2"]},
            {"b": 6, "t": 12, "D": [0, 1, 4, 5], "psi": "geom:beta=6,p=2,q=1", "s": ["1/10", "1"]}
        ]}"#,
    )
    .unwrap();
    let (code, out, err) = run(&["sweep", "--spec", spec.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out.lines().count(), 5);
    assert!(out.lines().nth(1).unwrap().ends_with("EmptySet,LLW1"));

    let spec = dir.path().join("lemmas.json");
    std::fs::write(&spec, r#"{"kind": "lemmas", "seed": 7, "pairs": 5, "max": 1000, "n_div": 10, "n_forced": 3}"#)
        .unwrap();
    let (code, out, _) = run(&["sweep", "--spec", spec.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);

    let spec = dir.path().join("bad.json");
    std::fs::write(&spec, r#"{"kind": "gamma"}"#).unwrap();
    assert_eq!(run(&["sweep", "--spec", spec.to_str().unwrap()]).0, 1);
}

#[test]
fn in_process_run_matches_binary() {
    let args = ["digitdioph", "profile", "12", "18"];
    let mut out = Vec::new();
    let mut err = Vec::new();
    assert_eq!(digitdioph_cli::run(args, &mut out, &mut err), 0);
    let (_, bin_out, _) = run(&args[1..]);
    assert_eq!(String::from_utf8(out).unwrap(), bin_out);
}
