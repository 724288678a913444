use std::fs;
use std::process::{Command, Output};

fn rcrit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rcrit"))
        .args(args)
        .output()
        .expect("spawn rcrit")
}

fn rows(out: &Output) -> Vec<Vec<String>> {
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let headers = reader.headers().unwrap().clone();
    let mut all = vec![headers.iter().map(String::from).collect()];
    for rec in reader.records() {
        all.push(rec.unwrap().iter().map(String::from).collect());
    }
    all
}

fn column(table: &[Vec<String>], name: &str) -> usize {
    table[0]
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"))
}

fn value(table: &[Vec<String>], row: usize, name: &str) -> String {
    table[row][column(table, name)].clone()
}

#[test]
fn bounds_collapse_below_threshold() {
    let out = rcrit(&["bounds", "--p0", "0.2", "--p1", "0.03"]);
    assert!(out.status.success());
    let t = rows(&out);
    let lo: f64 = value(&t, 1, "r_lower").parse().unwrap();
    let hi: f64 = value(&t, 1, "r_upper").parse().unwrap();
    assert!((lo - 0.278072).abs() < 1e-6 && (hi - 0.278072).abs() < 1e-6);
    assert_eq!(value(&t, 1, "two_hyp_certified"), "true");
    assert_eq!(value(&t, 1, "r_upper_source"), "two_hypothesis");
}

#[test]
fn bounds_vanish_at_half() {
    let out = rcrit(&["bounds", "--p0", "0.5", "--p1", "0.1"]);
    assert!(out.status.success());
    let t = rows(&out);
    assert_eq!(value(&t, 1, "r_upper"), "0");
    assert_eq!(value(&t, 1, "R_crit_lower"), "1");
}

#[test]
fn grid_rows_keep_input_order() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.csv");
    let out_path = dir.path().join("out.csv");
    fs::write(&grid, "p0,p1\n0.3,0.1\n0.1,0.25\n0.45,0.4\n").unwrap();
    let out = rcrit(&[
        "bounds",
        "--grid",
        grid.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&out_path).unwrap();
    let firsts: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(firsts, ["0.3", "0.1", "0.45"]);
}

#[test]
fn empty_grid_is_usage_error_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.csv");
    let out_path = dir.path().join("out.csv");
    fs::write(&grid, "p0,p1\n").unwrap();
    let out = rcrit(&[
        "bounds",
        "--grid",
        grid.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_path.exists());
}

#[test]
fn invalid_grid_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.csv");
    fs::write(&grid, "p0,p1\n0.2,abc\n").unwrap();
    assert_eq!(
        rcrit(&["bounds", "--grid", grid.to_str().unwrap()]).status.code(),
        Some(2)
    );
    fs::write(&grid, "p0,p1\n0.7,0.1\n").unwrap();
    assert_eq!(
        rcrit(&["bounds", "--grid", grid.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn missing_arguments_are_usage_errors() {
    assert_eq!(rcrit(&["bounds"]).status.code(), Some(2));
    assert_eq!(rcrit(&["bounds", "--p0", "0.2"]).status.code(), Some(2));
    assert_eq!(rcrit(&["simulate", "--p0", "0.2"]).status.code(), Some(2));
    assert_eq!(rcrit(&["mu", "--R", "0.5", "--alpha", "x"]).status.code(), Some(2));
}

#[test]
fn threshold_reproduces_table() {
    let out = rcrit(&["threshold", "--p0", "0.12,0.4,0.49"]);
    assert!(out.status.success());
    let t = rows(&out);
    for (row, (p0, expect, tol)) in [(0.12, 0.003, 0.002), (0.4, 0.317, 0.005), (0.49, 0.48, 0.005)]
        .into_iter()
        .enumerate()
    {
        let got: f64 = value(&t, row + 1, "p1_star").parse().unwrap();
        assert!((got - expect).abs() <= tol, "p0 = {p0}: {got}");
        assert_eq!(value(&t, row + 1, "status"), "bracketed");
    }
}

#[test]
fn threshold_defaults_to_eight_points() {
    let out = rcrit(&["threshold"]);
    assert!(out.status.success());
    assert_eq!(rows(&out).len(), 9);
}

#[test]
fn mu_forms_agree() {
    let out = rcrit(&["mu", "--R", "0.5", "--alpha", "gv", "--points", "8"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let t = rows(&out);
    assert_eq!(t.len(), 9);
    for r in 1..t.len() {
        let d: f64 = value(&t, r, "abs_diff").parse().unwrap();
        assert!(d <= 1e-8);
    }
}

#[test]
fn mu_tolerance_failure_exits_one() {
    let out = rcrit(&["mu", "--rate", "0.5", "--alpha", "0.2", "--tolerance", "0"]);
    let t = rows(&out);
    let worst = (1..t.len())
        .map(|r| value(&t, r, "abs_diff").parse::<f64>().unwrap())
        .fold(0.0, f64::max);
    assert_eq!(out.status.code(), Some(if worst > 0.0 { 1 } else { 0 }));
}

#[test]
fn oracle_check_passes() {
    let out = rcrit(&["oracle-check", "--n", "12", "--codes", "50", "--seed", "7"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let t = rows(&out);
    let failures: Vec<_> = t[1..].iter().filter(|r| r[0].ends_with("_failures")).collect();
    assert_eq!(failures.len(), 2);
    assert!(failures.iter().all(|r| r[1] == "0"));
}

#[test]
fn simulate_crosscheck_passes() {
    let out = rcrit(&[
        "simulate",
        "--p0",
        "0.25",
        "--p1",
        "0.1",
        "--n",
        "14",
        "--exact-crosscheck",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(value(&rows(&out), 1, "crosscheck_pass"), "true");
}

#[test]
fn simulate_sweep_emits_one_row_per_cell() {
    let out = rcrit(&[
        "simulate",
        "--p0",
        "0.25",
        "--p1",
        "0.1",
        "--trials",
        "50",
        "--tau-grid",
        "0.15,0.25",
        "--n-grid",
        "100,200",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(rows(&out).len(), 5);
}

#[test]
fn output_is_bit_stable() {
    let args = [
        "simulate", "--p0", "0.3", "--p1", "0.1", "--n", "40", "--r", "0.1", "--tau", "0.2", "--trials", "500",
    ];
    let a = rcrit(&args);
    let b = rcrit(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = rcrit(&["bounds", "--p0", "0.3", "--p1", "0.2"]);
    let d = rcrit(&["bounds", "--p0", "0.3", "--p1", "0.2"]);
    assert_eq!(c.stdout, d.stdout);
}
