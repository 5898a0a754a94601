use std::fs;
use std::process::{Command, Output};

fn nlbox(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlbox"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let o = nlbox(&all);
    serde_json::from_slice(&o.stdout).expect("valid JSON report")
}

#[test]
fn tsirelson_threshold() {
    let o = nlbox(&["tsirelson"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("threshold E = 0.707106781186548"), "{out}");
    assert!(out.contains("Q+P=1 at threshold: exact"), "{out}");
}

#[test]
fn shipped_fixture_verifies() {
    let o = nlbox(&["fixtures", "--verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    for id in ["(a)", "(b)", "(c)", "(d)", "(e)", "(f)", "(g)"] {
        assert!(out.contains(&format!("PASS {id}")), "{id} in {out}");
    }
}

#[test]
fn raw_fixture_fails_with_named_checks() {
    let o = nlbox(&["fixtures", "--raw", "--verify"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("check failed: (b)"), "{err}");
    assert!(stdout(&o).contains("closure completes with 011101"));
}

#[test]
fn fixture_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fx.txt");
    let text = nlbox_core::fixtures::REFERENCE_N6.replacen("\n111100\n", "\n", 1);
    fs::write(&path, text).unwrap();
    let o = nlbox(&["fixtures", "--file", path.to_str().unwrap(), "--verify"]);
    // seven T entries in subset 1 are rejected at load time
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("subset 1"), "{}", stderr(&o));
}

#[test]
fn variance_default_settings() {
    let o = nlbox(&["variance", "--n", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("mean_square = 8/1"), "{out}");
    assert!(out.contains("bound = 2.828427124746"), "{out}");
    assert!(out.contains("S^2 = 0: 16 translations"));
    assert!(out.contains("S^2 = 16: 16 translations"));
}

#[test]
fn variance_settings_file_and_length_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q.txt");
    fs::write(
        &path,
        "x1 = 100000\nx2 = 010000\ny1 = 011100\ny2 = 000100\n",
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let v = json(&["variance", "--n", "6", "--settings", p]);
    assert_eq!(v["result"]["report"]["mean_square"], "8/1");
    let o = nlbox(&["variance", "--n", "8", "--settings", p]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn chsh_labelings() {
    let o = nlbox(&["chsh"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("S = 4 (4)"));
    assert!(stdout(&o).contains("W = 1"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("listed.txt");
    fs::write(
        &path,
        "x1 = 100000\nx2 = 010000\ny1 = 011100\ny2 = 000100\n",
    )
    .unwrap();
    let v = json(&["chsh", "--settings", path.to_str().unwrap(), "--p", "1"]);
    assert_eq!(v["result"]["S"], "0");
    assert_eq!(v["result"]["W"], 0);

    let v = json(&["chsh", "--p", "3/4"]);
    assert_eq!(v["result"]["S"], "2");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(nlbox(&["tsirelson", "--bogus"]).status.code(), Some(2));
    assert_eq!(nlbox(&["nonsense"]).status.code(), Some(2));
    assert_eq!(nlbox(&["mc", "--p", "seven"]).status.code(), Some(2));
    assert_eq!(nlbox(&["mc", "--p", "3/2"]).status.code(), Some(2));
    assert_eq!(
        nlbox(&["chsh", "--settings", "/nonexistent/settings.txt"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(nlbox(&["invariant", "--grid", "4"]).status.code(), Some(2));
}

#[test]
fn tradeoff_csv_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = nlbox(&["tradeoff", "--steps", "5", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "E,Q_W0,P_W1,sum");
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[3], "0,0.25,0.25,0.5");
    assert_eq!(lines[1], "-1,1,1,2");
}

#[test]
fn json_report_shape() {
    let v = json(&["mc", "--p", "0.75", "--trials", "2000", "--seed", "7"]);
    assert_eq!(v["command"], "mc");
    assert_eq!(v["seed"], 7);
    assert_eq!(v["parameters"]["trials"], "2000");
    assert!(v["version"].is_string());
    assert!(v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["pass"] == true));
    assert!(v["artifacts"].as_array().unwrap().is_empty());
    let again = json(&["mc", "--p", "0.75", "--trials", "2000", "--seed", "7"]);
    assert_eq!(v, again);
    let other = json(&["mc", "--p", "0.75", "--trials", "2000", "--seed", "8"]);
    assert_ne!(v["result"]["q_hat"], other["result"]["q_hat"]);
}

#[test]
fn tripartite_i() {
    let o = nlbox(&["tripartite", "--n", "8", "--parameter", "I"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("I = 4"));
    assert!(out.contains("mean_square = 8/1"));
}

#[test]
fn tripartite_j_truncated_budget_fails() {
    let o = nlbox(&["tripartite", "--parameter", "J", "--budget", "10"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("search complete"));
}

#[test]
fn invariant_scan_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    let v = json(&["invariant", "--grid", "8", "--out", path.to_str().unwrap()]);
    assert!(v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["pass"] == true));
    assert_eq!(v["artifacts"][0], path.to_str().unwrap());
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(
        text.lines().next(),
        Some("theta_x1,theta_x2,theta_y1,theta_y2,S")
    );
    assert_eq!(text.lines().count(), 1 + 8 * 8);
}

#[test]
fn inputs_partition_uncertainty_sample() {
    let v = json(&["inputs", "--n", "6"]);
    assert_eq!(v["result"]["inputs"].as_array().unwrap().len(), 32);
    assert_eq!(v["result"]["translations"][0], "000000");

    let o = nlbox(&["partition", "--n", "6", "--verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("[subset 5]"));

    let o = nlbox(&["uncertainty", "--n", "6"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("zeta = 0.853553390593274"));

    let a = json(&[
        "sample", "--x", "100000", "--y", "010000", "--p", "0.9", "--seed", "3",
    ]);
    let b = json(&[
        "sample", "--x", "100000", "--y", "010000", "--p", "0.9", "--seed", "3",
    ]);
    assert_eq!(a, b);
    assert_eq!(a["result"]["exact_E"], 0.8);
}
