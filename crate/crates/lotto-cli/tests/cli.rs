//! End-to-end checks of the `lotto` binary: flag handling, exit codes, CSV
//! schemas, and byte-level determinism.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, Output};

fn lotto(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lotto"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn parse_csv(path: &Path) -> (String, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| l.split(',').map(|s| s.to_string()).collect())
        .collect();
    (header, rows)
}

#[test]
fn payoff_json_matches_the_worked_example() {
    let out = lotto(&["payoff", "--xa", "7", "--xb", "10", "--tau", "13"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["u_b"].as_f64().unwrap() - 0.7349).abs() < 5e-5);
    assert_eq!(v["region"], "VIII");
    assert!(v["decomposition"]["alpha"].as_f64().unwrap() > 0.0);

    let out = lotto(&["payoff", "--xa", "7", "--xb", "10", "--tau", "0"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["u_b"].as_f64().unwrap(), 0.65);
    assert_eq!(v["region"], "Classic");
    assert!(v["decomposition"].is_null());
}

#[test]
fn payoff_csv_has_the_documented_header() {
    let out = lotto(&[
        "payoff", "--xa", "10", "--xb", "3", "--tau", "8", "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "u_b,u_a,region,alpha,x0,x1");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0].parse::<f64>().unwrap(), 0.1875);
    assert_eq!(row[2], "IV");
    assert_eq!(row[3].parse::<f64>().unwrap(), 1.0);
    assert_eq!(row[4], ""); // below-threshold part has no weight at alpha = 1
}

#[test]
fn sweep_reproduces_classic_endpoints_and_never_dips_below() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = lotto(&[
        "sweep-tau", "--xa", "7", "--xb", "10", "--tau-min", "0", "--tau-max", "40",
        "--steps", "401", "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let (header, rows) = parse_csv(&path);
    assert_eq!(header, "tau,u_b,region,u_b_classic");
    assert_eq!(rows.len(), 401);

    let mut max_u_b = f64::NEG_INFINITY;
    for row in &rows {
        let tau: f64 = row[0].parse().unwrap();
        let u_b: f64 = row[1].parse().unwrap();
        let classic: f64 = row[3].parse().unwrap();
        assert_eq!(classic, 0.65);
        assert!(u_b >= classic - 1e-12, "dip at tau={tau}");
        max_u_b = max_u_b.max(u_b);
        if tau == 0.0 || tau == 40.0 {
            assert_eq!(u_b, 0.65);
        }
        if tau == 13.0 {
            assert!((u_b - 0.7349).abs() < 5e-5);
        }
    }
    // Summary reports the grid argmax, which dominates any sampled point.
    let summary = stdout(&out);
    assert!(summary.starts_with("argmax tau="));
    let u_b_hat: f64 = summary
        .trim()
        .rsplit("u_b=")
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(u_b_hat, max_u_b);
    assert!(u_b_hat >= 0.7349 - 5e-5);
}

#[test]
fn heatmap_regions_follow_the_threshold() {
    let dir = tempfile::tempdir().unwrap();

    // tau = 0: the sentinel everywhere.
    let p0 = dir.path().join("h0.csv");
    let out = lotto(&[
        "heatmap", "--tau", "0", "--xa-max", "20", "--xb-max", "15", "--steps", "11",
        "--out", p0.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let (header, rows) = parse_csv(&p0);
    assert_eq!(header, "xa,xb,region,u_b");
    assert_eq!(rows.len(), 121);
    let tags: BTreeSet<String> = rows.iter().map(|r| r[2].clone()).collect();
    assert_eq!(tags, BTreeSet::from(["Classic".to_string()]));

    // Large tau: only the two classic-equivalent regions survive.
    let p1 = dir.path().join("h1.csv");
    lotto(&[
        "heatmap", "--tau", "80", "--xa-max", "20", "--xb-max", "15", "--steps", "11",
        "--out", p1.to_str().unwrap(),
    ]);
    let (_, rows) = parse_csv(&p1);
    let tags: BTreeSet<String> = rows.iter().map(|r| r[2].clone()).collect();
    assert_eq!(tags, BTreeSet::from(["I".to_string(), "II".to_string()]));

    // tau = 8 with a grid that lands on (5, 3): spacings 1 and 0.75.
    let p2 = dir.path().join("h2.csv");
    lotto(&[
        "heatmap", "--tau", "8", "--xa-max", "20", "--xb-max", "15", "--steps", "21",
        "--out", p2.to_str().unwrap(),
    ]);
    let (_, rows) = parse_csv(&p2);
    let cell = rows
        .iter()
        .find(|r| r[0].parse::<f64>().unwrap() == 5.0 && r[1].parse::<f64>().unwrap() == 3.0)
        .expect("grid covers (5, 3)");
    assert_eq!(cell[2], "III");
    assert_eq!(cell[3].parse::<f64>().unwrap(), 0.34375);
}

#[test]
fn verify_batch_passes_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("verify.csv");
    let out = lotto(&[
        "verify", "--instances", "5", "--seed", "11", "--resolution", "1e-2",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let (header, rows) = parse_csv(&path);
    assert_eq!(
        header,
        "xa,xb,tau,closed_form,oracle,abs_diff,info_gain,br_slack_g0,bound"
    );
    assert_eq!(rows.len(), 5);
    for row in &rows {
        let abs_diff: f64 = row[5].parse().unwrap();
        let bound: f64 = row[8].parse().unwrap();
        assert!(abs_diff <= bound);
        assert!(row[6].parse::<f64>().unwrap() >= -1e-12);
    }
}

#[test]
fn simulate_falls_back_to_classic_at_tau_zero() {
    let out = lotto(&[
        "simulate", "--xa", "3", "--xb", "3", "--tau", "0", "--n", "200000", "--seed", "5",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["closed_form"].as_f64().unwrap(), 0.5);
    let est = v["estimate"].as_f64().unwrap();
    let se = v["std_error"].as_f64().unwrap();
    assert!((est - 0.5).abs() <= 3.0 * se);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (p1, p2) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let args = |p: &Path| {
        vec![
            "verify".to_string(), "--instances".into(), "3".into(), "--seed".into(),
            "9".into(), "--resolution".into(), "1e-2".into(), "--out".into(),
            p.to_str().unwrap().into(),
        ]
    };
    let o1 = Command::new(env!("CARGO_BIN_EXE_lotto")).args(args(&p1)).output().unwrap();
    let o2 = Command::new(env!("CARGO_BIN_EXE_lotto")).args(args(&p2)).output().unwrap();
    assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    assert_eq!(o1.stdout, o2.stdout);

    let sim = ["simulate", "--xa", "5", "--xb", "3", "--tau", "8", "--n", "10000", "--seed", "1"];
    assert_eq!(lotto(&sim).stdout, lotto(&sim).stdout);
}

#[test]
fn exit_codes_follow_the_contract() {
    // Usage errors (malformed and domain-invalid flags) exit 2.
    let out = lotto(&["payoff", "--xa", "oops", "--xb", "1", "--tau", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = lotto(&["payoff", "--xa=-1", "--xb", "1", "--tau", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let out = lotto(&["sweep-tau", "--xa", "1", "--xb", "1", "--tau-max", "0", "--steps", "2", "--out", "/tmp/x.csv"]);
    assert_eq!(out.status.code(), Some(2));

    // Unwritable output exits 3.
    let out = lotto(&[
        "sweep-tau", "--xa", "1", "--xb", "1", "--tau-max", "4", "--steps", "2",
        "--out", "/this/path/does/not/exist.csv",
    ]);
    assert_eq!(out.status.code(), Some(3));

    // Help exits 0 and documents the hybrid simulation scheme (match single
    // words; clap re-wraps the paragraph).
    let out = lotto(&["simulate", "--help"]);
    assert_eq!(out.status.code(), Some(0));
    let help = stdout(&out);
    assert!(help.contains("head-start") && help.contains("analytic"));
}
