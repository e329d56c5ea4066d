use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn regressive(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regressive"))
        .args(args)
        .env_remove("REGRESSIVE_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("machine output is JSON")
}

fn without_run(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("run");
    v
}

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("regressive-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn certify_k3() {
    let o = regressive(&["--format", "machine", "certify", "--k", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["kind"], "construction");
    assert_eq!(v["results"]["interval"]["lo"], 36);
    assert_eq!(v["results"]["interval"]["hi"], 45);
    assert_eq!(v["results"]["pairs_checked"], 36);
    assert_eq!(v["results"]["max_min_homog"], 3);
    assert_eq!(v["results"]["brute_force"]["agrees"], true);
    assert_eq!(v["status"]["violations"], 0);
}

#[test]
fn certify_k4() {
    let v = json(&regressive(&["--format", "machine", "certify", "--k", "4"]));
    assert_eq!(v["results"]["interval"]["hi"], 140);
    assert_eq!(v["results"]["pairs_checked"], 2850);
    assert!(v["results"]["max_min_homog"].as_u64().unwrap() <= 4);
    assert_eq!(v["status"]["complete"], true);
}

#[test]
fn certify_k5_is_partial() {
    let o = regressive(&["--format", "machine", "certify", "--k", "5"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["status"]["complete"], false);
    assert!(v["results"]["interval"].is_null());
    let bound: u128 = v["results"]["interval_bound"]["lower_bound"].as_str().unwrap().parse().unwrap();
    assert!(bound > 100_000_000);
}

#[test]
fn certificates_are_reproducible() {
    for args in [
        &["--format", "machine", "certify", "--k", "3"][..],
        &["--format", "machine", "nu", "--k", "4", "--n-cap", "6"][..],
        &["--format", "machine", "reduction", "--k", "3"][..],
    ] {
        let a = regressive(args);
        let b = regressive(args);
        assert_eq!(without_run(json(&a)), without_run(json(&b)), "{args:?}");
        // Byte-identical apart from the run section, which comes last.
        let cut = |o: &Output| {
            let s = stdout(o);
            s[..s.find("\"run\"").unwrap()].to_string()
        };
        assert_eq!(cut(&a), cut(&b));
    }
}

#[test]
fn machine_output_has_no_floats() {
    let s = stdout(&regressive(&["--format", "machine", "certify", "--k", "4"]));
    fn walk(v: &Value) {
        match v {
            Value::Number(n) => assert!(n.is_u64() || n.is_i64(), "float {n}"),
            Value::Array(a) => a.iter().for_each(walk),
            Value::Object(o) => o.values().for_each(walk),
            _ => {}
        }
    }
    walk(&serde_json::from_str(&s).unwrap());
    let keys: Vec<&str> =
        ["\"kind\"", "\"version\"", "\"parameters\"", "\"status\"", "\"results\"", "\"run\""].to_vec();
    let pos: Vec<usize> = keys.iter().map(|k| s.find(k).unwrap()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]), "key order {pos:?}");
}

#[test]
fn nu_small_values() {
    for (k, nu) in [(1, 1), (2, 2), (3, 3), (4, 5)] {
        let o = regressive(&["--format", "machine", "nu", "--k", &k.to_string(), "--n-cap", "10"]);
        assert_eq!(o.status.code(), Some(0));
        let v = json(&o);
        assert_eq!(v["results"]["value"], nu, "k = {k}");
        assert_eq!(v["results"]["recheck_failures"].as_array().unwrap().len(), 0);
    }
}

#[test]
fn nu_thread_env_override() {
    let args = ["--format", "machine", "nu", "--k", "4", "--n-cap", "6"];
    let env_run =
        Command::new(env!("CARGO_BIN_EXE_regressive")).args(args).env("REGRESSIVE_THREADS", "3").output().unwrap();
    let v = json(&env_run);
    assert_eq!(v["run"]["threads"], 3);
    let flag_run = Command::new(env!("CARGO_BIN_EXE_regressive"))
        .args(args)
        .args(["--threads", "1"])
        .env("REGRESSIVE_THREADS", "3")
        .output()
        .unwrap();
    let w = json(&flag_run);
    assert_eq!(w["run"]["threads"], 1);
    assert_eq!(without_run(v), without_run(w));
}

#[test]
fn nu_node_limit_is_not_success() {
    let o = regressive(&["--format", "machine", "nu", "--k", "5", "--n-cap", "12", "--node-limit", "50"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["status"]["complete"], false);
    assert!(v["results"]["node_limit_hit_at"].is_u64());
}

#[test]
fn cnf_dimacs_shape() {
    let text = stdout(&regressive(&["cnf", "--n", "3", "--k", "3"]));
    let mut lines = text.lines();
    let mut header = None;
    let mut clauses = 0;
    for line in lines.by_ref() {
        if let Some(rest) = line.strip_prefix("p cnf ") {
            header = Some(rest.to_string());
            break;
        }
        assert!(line.starts_with("c "), "{line:?}");
    }
    assert_eq!(header.as_deref(), Some("5 8"));
    for line in lines {
        let lits: Vec<i64> = line.split(' ').map(|t| t.parse().unwrap()).collect();
        assert_eq!(*lits.last().unwrap(), 0, "{line:?}");
        assert!(lits[..lits.len() - 1].iter().all(|&l| l != 0 && l.abs() <= 5));
        clauses += 1;
    }
    assert_eq!(clauses, 8);
    assert!(text.ends_with(" 0\n"));
}

#[test]
fn out_directory_names_files_by_kind_and_parameters() {
    let dir = scratch_dir("out");
    let d = dir.to_str().unwrap();
    assert_eq!(regressive(&["--format", "machine", "--out", d, "certify", "--k", "3"]).status.code(), Some(0));
    assert_eq!(regressive(&["--out", d, "cnf", "--n", "4", "--k", "3"]).status.code(), Some(0));
    assert_eq!(regressive(&["--out", d, "nu", "--k", "3", "--n-cap", "5"]).status.code(), Some(0));
    let saved: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("construction_k3.json")).unwrap()).unwrap();
    assert_eq!(saved["results"]["pairs_checked"], 36);
    let cnf = std::fs::read_to_string(dir.join("cnf_n4_k3.cnf")).unwrap();
    assert_eq!(cnf, stdout(&regressive(&["cnf", "--n", "4", "--k", "3"])));
    assert!(std::fs::read_to_string(dir.join("nu_k3_ncap5.txt")).unwrap().contains("nu(k)"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn table_commands() {
    let o = regressive(&["ladder", "--k", "3", "--i", "2", "--cap", "45"]);
    assert_eq!(stdout(&o), "36 39 42 45\n");
    let h = json(&regressive(&["--format", "machine", "hierarchy", "--i", "3", "--n", "36"]));
    assert_eq!(h["f"]["value"], "45");
    assert_eq!(h["f"]["exact"], true);
    let t = regressive(&["hierarchy", "--i", "7", "--n", "16", "--threshold", "4096"]);
    assert_eq!(t.status.code(), Some(0));
    assert!(stdout(&t).contains("f_7(16) >= 4096  yes"));
}

#[test]
fn exit_codes_for_budget_and_bad_input() {
    assert_eq!(regressive(&["hierarchy", "--i", "5", "--n", "100", "--budget", "10"]).status.code(), Some(1));
    assert_eq!(
        regressive(&["ladder", "--k", "3", "--i", "3", "--cap", "100000", "--budget", "1"]).status.code(),
        Some(1)
    );
    let bad = regressive(&["certify", "--k", "2"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("at least 3"));
    assert_eq!(regressive(&["cnf", "--n", "1", "--k", "3"]).status.code(), Some(2));
}
