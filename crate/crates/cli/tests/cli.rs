//! End-to-end checks of the binary: exit codes, output placement, and the
//! report formats promised by the interface.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_episcale"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const GOOD: &str = "\
timescale = 0..10
b = const:0.4
c = const:0.2
x0 = 0.8
y0 = 0.2
z0 = 0.0
t0 = 0.0
t_end = 10.0
";

fn write_scn(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("case.scn");
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn solve_writes_one_schema_correct_csv_per_method() {
    let dir = tempfile::tempdir().unwrap();
    let scn = write_scn(dir.path(), GOOD);
    let out_dir = dir.path().join("out");
    let out = run(&["solve", scn.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    for (method, rows) in [("closed", 11), ("recursion", 11)] {
        let path = out_dir.join(format!("case_{method}.csv"));
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,sigma_t,mu_t,x,y,z,method");
        assert_eq!(lines.len(), 1 + rows, "{path:?}");
        for row in &lines[1..] {
            let cells: Vec<&str> = row.split(',').collect();
            assert_eq!(cells.len(), 7);
            for cell in &cells[..6] {
                cell.parse::<f64>().unwrap();
            }
            assert_eq!(cells[6], method);
        }
    }
    let text = stdout(&out);
    assert!(text.contains("max deviation between methods"), "{text}");
    assert!(text.contains("limit outcome: all-removed"), "{text}");
}

#[test]
fn the_env_var_supplies_the_default_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let scn = write_scn(dir.path(), GOOD);
    let out_dir = dir.path().join("from_env");
    let out = bin()
        .args(["solve", scn.to_str().unwrap(), "--method", "closed"])
        .env("EPISCALE_OUT_DIR", &out_dir)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(out_dir.join("case_closed.csv").exists());
}

#[test]
fn scenario_errors_exit_1_with_a_line_anchored_message() {
    let dir = tempfile::tempdir().unwrap();
    let scn = write_scn(dir.path(), &GOOD.replace("c = const:0.2", "c = huh"));
    let out = run(&["solve", scn.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));
}

#[test]
fn math_failures_exit_2() {
    // 1 + mu*(c - b) = 0 on the unit lattice: not regressive.
    let dir = tempfile::tempdir().unwrap();
    let scn = write_scn(dir.path(), &GOOD.replace("b = const:0.4", "b = const:1.0").replace("c = const:0.2", "c = const:0.0"));
    let out = run(&["solve", scn.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 2, "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("regressive"), "{}", stderr(&out));
}

#[test]
fn missing_files_exit_3() {
    let out = run(&["solve", "/nonexistent/nowhere.scn"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn usage_errors_exit_1_and_help_exits_0() {
    let out = run(&["frobnicate"]);
    assert_eq!(code(&out), 1);
    let out = run(&["--help"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("solve"), "{}", stdout(&out));
}

#[test]
fn check_reports_failed_hypotheses_without_failing() {
    let dir = tempfile::tempdir().unwrap();
    let scn = write_scn(dir.path(), &GOOD.replace("b = const:0.4", "b = const:1.0").replace("c = const:0.2", "c = const:0.0"));
    let out = run(&["check", scn.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("regressive: false"), "{text}");
    assert!(text.contains("violation witness t: 0"), "{text}");
}

#[test]
fn sweep_without_values_writes_an_empty_aggregate() {
    let dir = tempfile::tempdir().unwrap();
    let scn = write_scn(dir.path(), GOOD);
    let out_dir = dir.path().join("out");
    let out = run(&[
        "sweep",
        scn.to_str().unwrap(),
        "--param",
        "c",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = std::fs::read_to_string(out_dir.join("case_sweep.csv")).unwrap();
    assert_eq!(
        text,
        "param,value,method,t,x,y,z,conservation_error,deviation,outcome,alpha_estimate\n"
    );
}

#[test]
fn sweep_writes_per_run_files_and_an_aggregate_with_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    let scn = write_scn(dir.path(), GOOD);
    let out_dir = dir.path().join("out");
    let out = run(&[
        "sweep",
        scn.to_str().unwrap(),
        "--param",
        "c",
        "--values",
        "0.1,0.5",
        "--method",
        "closed",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(out_dir.join("case_c_0.1_closed.csv").exists());
    assert!(out_dir.join("case_c_0.5_closed.csv").exists());
    let text = std::fs::read_to_string(out_dir.join("case_sweep.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("c,1.0000000000000001e-1,closed,"));
    assert!(lines[1].contains(",all-removed,"), "{}", lines[1]);
    assert!(lines[2].contains(",partial-susceptible,"), "{}", lines[2]);
}

#[test]
fn classify_prints_outcome_certificate_and_monotonicity() {
    let dir = tempfile::tempdir().unwrap();
    let scn = write_scn(dir.path(), &GOOD.replace("c = const:0.2", "c = const:0.5"));
    let out = run(&["classify", scn.to_str().unwrap(), "--horizon", "10"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("limit outcome: partial-susceptible"), "{text}");
    assert!(text.contains("certificate: constant-rates"), "{text}");
    assert!(text.contains("susceptible share lower bound"), "{text}");
    assert!(text.contains("infected nonincreasing observed: true"), "{text}");
}
