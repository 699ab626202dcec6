//! End-to-end tests of the `loopopt` binary: exit codes, artifact
//! schemas, output-directory resolution, and format filtering.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loopopt"))
        .args(args)
        .arg("--output-dir")
        .arg(dir)
        .output()
        .expect("spawn loopopt")
}

fn file_names(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

fn first_line(dir: &Path, name: &str) -> String {
    let text = fs::read_to_string(dir.join(name)).unwrap();
    text.lines().next().unwrap_or_default().to_string()
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn exp1_writes_all_artifacts_with_expected_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["exp1", "--n-samples", "32", "--steps", "3"]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    assert_eq!(
        file_names(dir.path()),
        ["figure.csv", "figure.svg", "iterates.json", "trace.csv"]
    );

    assert_eq!(
        first_line(dir.path(), "trace.csv"),
        "iter,f,grad_norm,alpha,decrease,halvings"
    );
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 1 + 4, "header plus steps+1 rows");

    let snaps: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("iterates.json")).unwrap())
            .unwrap();
    let list = snaps["snapshots"].as_array().expect("snapshots array");
    assert_eq!(list.len(), 4, "every iterate kept for short runs");
    assert_eq!(list[0]["iter"], 0);
    assert!(list[0]["curve"]["points"].is_array());

    let svg = fs::read_to_string(dir.path().join("figure.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert_eq!(first_line(dir.path(), "figure.csv"), "panel,series,x,y");

    assert!(stdout_of(&out).starts_with("exp1:"), "got {}", stdout_of(&out));
}

#[test]
fn exp2_writes_minimizer_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["exp2", "--n-samples", "32", "--steps", "3"]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    let min: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("minimizer.json")).unwrap())
            .unwrap();
    assert_eq!(min["lambda"], 0.7);
    assert!(min["f_min"].is_number());
    assert!(min["curve"]["points"].is_array());
    assert!(stdout_of(&out).contains("f*"));
}

#[test]
fn format_flag_filters_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["exp1", "--n-samples", "32", "--steps", "2", "--format", "csv"],
    );
    assert!(out.status.success());
    assert_eq!(file_names(dir.path()), ["trace.csv"]);

    let dir2 = tempfile::tempdir().unwrap();
    let out = run_in(
        dir2.path(),
        &["exp1", "--n-samples", "32", "--steps", "2", "--format", "json"],
    );
    assert!(out.status.success());
    assert_eq!(file_names(dir2.path()), ["iterates.json"]);
}

#[test]
fn env_var_sets_output_dir_and_flag_overrides_it() {
    let env_dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_loopopt"))
        .args(["seqdiag", "--kmax", "5", "--n-samples", "16"])
        .env("LOOPOPT_OUTPUT_DIR", env_dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    assert!(env_dir.path().join("seq.csv").exists());
    assert!(stdout_of(&out).starts_with("seqdiag:"));

    let env_dir2 = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_loopopt"))
        .args(["seqdiag", "--kmax", "5", "--n-samples", "16", "--output-dir"])
        .arg(flag_dir.path())
        .env("LOOPOPT_OUTPUT_DIR", env_dir2.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(flag_dir.path().join("seq.csv").exists());
    assert_eq!(file_names(env_dir2.path()), Vec::<String>::new());
}

#[test]
fn nonpositive_step_size_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["exp1", "--alpha=-1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr_of(&out).contains("step size must be positive"),
        "stderr: {}",
        stderr_of(&out)
    );
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["exp1", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_curve_file_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "not,a,curve\n1,2\n").unwrap();
    let out = run_in(
        dir.path(),
        &["classify", "--curve-file", bad.to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).starts_with("error:"));
}

#[test]
fn non_immersed_curve_is_an_admissibility_error() {
    let dir = tempfile::tempdir().unwrap();
    let flat = dir.path().join("flat.csv");
    let mut text = String::from("theta,x,y\n");
    for j in 0..8 {
        text.push_str(&format!("{},1.0,2.0\n", j as f64));
    }
    fs::write(&flat, text).unwrap();
    let out = run_in(
        dir.path(),
        &[
            "classify",
            "--curve-file",
            flat.to_str().unwrap(),
            "--objective",
            "length",
            "--metric",
            "inv-l2",
        ],
    );
    assert_eq!(out.status.code(), Some(3), "stderr: {}", stderr_of(&out));
}

#[test]
fn unwritable_output_dir_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("blocker");
    fs::write(&blocker, "plain file").unwrap();
    let target = blocker.join("sub");
    let out = Command::new(env!("CARGO_BIN_EXE_loopopt"))
        .args(["seqdiag", "--kmax", "3", "--n-samples", "16", "--output-dir"])
        .arg(&target)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4), "stderr: {}", stderr_of(&out));
}

#[test]
fn circle_flow_reports_collapse_and_writes_radius_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["flow", "--n-samples", "16", "--steps", "600"]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    assert!(
        stdout_of(&out).contains("flow: collapsed at iteration"),
        "got {}",
        stdout_of(&out)
    );
    assert_eq!(
        first_line(dir.path(), "radius.csv"),
        "iter,radius,euler_oracle,closed_form"
    );
    assert_eq!(
        first_line(dir.path(), "trace.csv"),
        "iter,length,grad_norm,min_speed"
    );
    let frames: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("frames.json")).unwrap())
            .unwrap();
    assert!(frames["snapshots"].as_array().unwrap().len() >= 2);
}

#[test]
fn ellipse_flow_writes_isoperimetric_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "flow",
            "--shape",
            "ellipse",
            "--metric",
            "inv-h1",
            "--n-samples",
            "32",
            "--steps",
            "50",
        ],
    );
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    assert_eq!(first_line(dir.path(), "isoper.csv"), "iter,length,area,ratio");
    let text = fs::read_to_string(dir.path().join("isoper.csv")).unwrap();
    let ratios: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert!(ratios.len() >= 2);
    // The isoperimetric ratio L²/4πA must decay monotonically toward 1.
    for w in ratios.windows(2) {
        assert!(w[1] <= w[0] + 1e-12, "ratio increased: {} -> {}", w[0], w[1]);
    }
    assert!(*ratios.last().unwrap() >= 1.0 - 1e-9);
}

#[test]
fn spray_reports_strict_growth() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["spray", "--dims", "4,8,16"]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    assert!(
        stdout_of(&out).contains("strictly increasing: true"),
        "got {}",
        stdout_of(&out)
    );
    assert_eq!(first_line(dir.path(), "spray.csv"), "d,max_gamma");
}

#[test]
fn classify_defaults_identify_the_tracking_minimizer() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["classify", "--n-samples", "32", "--probes", "2"],
    );
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    assert!(
        stdout_of(&out).contains("CoerciveMinimizerCandidate"),
        "got {}",
        stdout_of(&out)
    );
    let cls: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("classify.json")).unwrap())
            .unwrap();
    assert_eq!(cls["class"], "CoerciveMinimizerCandidate");
    assert!(cls["mu_hat"].is_number());
}
