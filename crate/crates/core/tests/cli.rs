//! End-to-end checks of the CLI surface: worked examples, exit codes, and
//! artifact round trips.

use std::process::{Command, Output};

use serde_json::Value;

fn supersat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_supersat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(output: &Output) -> Value {
    assert!(output.status.success(), "stderr: {}", String::from_utf8_lossy(&output.stderr));
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

#[test]
fn metrics_c4_worked_example() {
    let out = supersat(&["metrics", "--pattern", "builtin:cycle:4", "--alpha", "3/2"]);
    let v = stdout_json(&out);
    assert_eq!(v["density_report"]["m_r"], "3/2");
    assert_eq!(v["density_report"]["m_star_r"], "1");
    assert_eq!(v["exponents"]["lambda_star"], "2");
    assert_eq!(v["exponents"]["phi"], "1/6");
    assert_eq!(v["config"]["alpha"], "3/2");
}

#[test]
fn ex_exact_c4_worked_example() {
    let out = supersat(&["ex-exact", "--n", "5", "--pattern", "builtin:cycle:4"]);
    let v = stdout_json(&out);
    assert_eq!(v["record"]["ex_value"], 6);
}

#[test]
fn enumerate_streams_copies() {
    let dir = tempfile::tempdir().unwrap();
    let host = dir.path().join("host.txt");
    std::fs::write(&host, "4 6 2\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n").unwrap();
    let out = supersat(&["enumerate", "--host", host.to_str().unwrap(), "--pattern", "builtin:cycle:4"]);
    assert!(out.status.success());
    let lines: Vec<&str> = std::str::from_utf8(&out.stdout).unwrap().trim().lines().collect();
    // header plus the three 4-cycles of K4
    assert_eq!(lines.len(), 4);
    let header: Value = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(header["copies"], 3);
    let first: Vec<usize> = serde_json::from_str(lines[1]).unwrap();
    assert_eq!(first.len(), 4);
}

#[test]
fn verify_round_trip_and_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let host = dir.path().join("host.txt");
    let bundle = dir.path().join("bundle.json");
    let run = |args: &[&str]| {
        let out = supersat(args);
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    };
    run(&["sample", "--n", "25", "--p", "0.5", "--seed", "3", "--out", host.to_str().unwrap()]);
    run(&[
        "build-family",
        "--host",
        host.to_str().unwrap(),
        "--pattern",
        "builtin:cycle:4",
        "--alpha",
        "3/2",
        "--beta-mode",
        "thm2",
        "--n-target",
        "20",
        "--c",
        "60",
        "--out",
        bundle.to_str().unwrap(),
    ]);

    let out = supersat(&["verify", "--bundle", bundle.to_str().unwrap()]);
    let v = stdout_json(&out);
    assert_eq!(v["verified"], true);

    // alter one member edge index so it no longer forms a pattern copy
    let mut b: Value = serde_json::from_str(&std::fs::read_to_string(&bundle).unwrap()).unwrap();
    let member = b["family"]["members"][0].as_array().unwrap().clone();
    let mut indices: Vec<u64> = member.iter().map(|x| x.as_u64().unwrap()).collect();
    let mut candidate = indices[0] + 1;
    while indices.contains(&candidate) {
        candidate += 1;
    }
    indices[0] = candidate;
    indices.sort_unstable();
    b["family"]["members"][0] = serde_json::json!(indices);
    let tampered = dir.path().join("tampered.json");
    std::fs::write(&tampered, serde_json::to_string(&b).unwrap()).unwrap();

    let out = supersat(&["verify", "--bundle", tampered.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verified"], false);

    // codegree over the intact bundle: finite positive value
    let out = supersat(&["codegree", "--bundle", bundle.to_str().unwrap(), "--tau", "1"]);
    let v = stdout_json(&out);
    assert!(v["delta"].as_f64().unwrap() > 0.0);
}

#[test]
fn usage_errors_exit_2() {
    let out = supersat(&["no-such-subcommand"]);
    assert_eq!(out.status.code(), Some(2));
    let out = supersat(&["metrics", "--pattern", "builtin:cycle:4", "--alpha", "not-a-number"]);
    assert_eq!(out.status.code(), Some(2));
    let out = supersat(&["enumerate", "--host", "/no/such/file", "--pattern", "builtin:cycle:4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "alpha = 3/2\nk = 2.0\n").unwrap();
    let out = supersat(&[
        "metrics",
        "--pattern",
        "builtin:cycle:6",
        "--config",
        conf.to_str().unwrap(),
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["config"]["alpha"], "3/2");
    assert_eq!(v["config"]["k"], 2.0);
}

#[test]
fn random_turan_csv_shape() {
    let out = supersat(&[
        "random-turan",
        "--pattern",
        "builtin:cycle:4",
        "--alpha",
        "3/2",
        "--n-list",
        "6",
        "--p-list",
        "0.5",
        "--trials",
        "2",
        "--mode",
        "greedy",
        "--seed",
        "1",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(
        lines.next().unwrap(),
        "n,p,seed,trial,measured,measured_kind,bound_value,branch,runtime_ms"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    for row in rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 9);
        assert_eq!(fields[0], "6");
        assert_eq!(fields[5], "greedy_lower_bound");
    }
}
