use std::process::{Command, Output};

fn pl_bai(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pl-bai")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn lists_environments() {
    let out = pl_bai(&["list-envs"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for name in ["g1", "g4", "arith", "geo", "b1", "g4b", "arithb", "geob"] {
        assert!(text.lines().any(|l| l.starts_with(&format!("{name}\t"))), "{name} missing");
    }
}

#[test]
fn prints_bounds() {
    let out = pl_bai(&["bounds", "--env", "g1", "--eps", "0", "--delta", "0.1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let ub: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("ub_pac\t"))
        .unwrap()
        .parse()
        .unwrap();
    assert!((ub - 26.645).abs() < 1e-3);
}

#[test]
fn unknown_env_fails() {
    let out = pl_bai(&["run", "--env", "nope"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown environment"));
}

#[test]
fn infeasible_budget_reports_minimum() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("ua.csv");
    let out = pl_bai(&["run", "--env", "g4", "--algo", "ua", "--q", "5", "--out", csv.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("minimum feasible budget 9"));
    assert!(!csv.exists());
}

#[test]
fn theta_file_run_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let theta = dir.path().join("theta.json");
    std::fs::write(&theta, r#"{"theta": [1.0, 0.5, 0.5, 0.2]}"#).unwrap();
    let csv = dir.path().join("out.csv");
    let survival = dir.path().join("survival.csv");
    let plot = dir.path().join("plot.svg");
    let out = pl_bai(&[
        "run",
        "--theta-file",
        theta.to_str().unwrap(),
        "--k",
        "3",
        "--eps",
        "0",
        "--delta",
        "0.1",
        "--reps",
        "3",
        "--out",
        csv.to_str().unwrap(),
        "--survival",
        survival.to_str().unwrap(),
        "--plot",
        plot.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = pl_bai::experiments::read_csv(&csv).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].success_rate, 1.0);
    assert_eq!(std::fs::read_to_string(&survival).unwrap().lines().count(), 5);
    assert!(std::fs::read_to_string(&plot).unwrap().contains("<svg"));
}

#[test]
fn q_sweep_requires_uniform_allocation() {
    let out = pl_bai(&["run", "--env", "g4", "--sweep", "q:100,1000"]);
    assert!(!out.status.success());
}
