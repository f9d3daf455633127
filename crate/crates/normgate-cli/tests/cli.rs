//! End-to-end tests of the installed binary: exit codes, output formats, and
//! rerun determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn normgate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_normgate"))
        .args(args)
        .env_remove("NORMGATE_SEED")
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn temp_path(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("normgate-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    dir.join(name)
}

#[test]
fn curve_writes_full_precision_grid() {
    // a = b = c = 0 collapses the matrix to a single off-diagonal t, so the
    // norm curve is exactly the identity.
    let out = normgate(&[
        "curve", "--a=0", "--b=0", "--c=0", "--phi=power:0,0,0", "--range=0,1", "--n=3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout_of(&out),
        "t,norm\n\
         0.0000000000000000e0,0.0000000000000000e0\n\
         5.0000000000000000e-1,5.0000000000000000e-1\n\
         1.0000000000000000e0,1.0000000000000000e0\n"
    );
}

#[test]
fn curve_writes_to_file() {
    let path = temp_path("curve-out.csv");
    let out = normgate(&[
        "curve",
        "--a=-2",
        "--b=2",
        "--c=1",
        "--phi=power:0,1,5",
        "--range=0,1",
        "--n=11",
        &format!("--out={}", path.display()),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).expect("output file");
    assert!(text.starts_with("t,norm\n"));
    assert_eq!(text.lines().count(), 12);
}

#[test]
fn certify_exit_codes_follow_the_ladder() {
    let out = normgate(&["certify", "--phi=power:0,1,4"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).contains("CERTIFIED_MONOTONE (COR24_ALPHA)"));

    let out = normgate(&["certify", "--phi=log:1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).contains("COR26_LOG"));

    let out = normgate(&["certify", "--phi=power:0,1,5"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout_of(&out).contains("CERTIFIED_NOT_COND_B"));
    assert!(stdout_of(&out).contains("violation at t ="));

    // The same gain turns monotone once parameters with the right sign
    // pattern are pinned down.
    let out = normgate(&["certify", "--a=1", "--b=1", "--c=1", "--phi=power:0,1,5"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).contains("COR27_PARAMS"));

    // Sign condition violated and the slope condition fails: stays refuted.
    let out = normgate(&["certify", "--a=-1", "--b=1", "--c=1", "--phi=power:0,1,5"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn certify_rejects_partial_parameter_sets() {
    let out = normgate(&["certify", "--a=1", "--phi=log:1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn analyze_exit_codes_encode_verdicts() {
    let out = normgate(&[
        "analyze", "--preset=mult-op", "--d=1", "--a=1", "--b=1", "--c=1", "--phi=log:1",
    ]);
    assert_eq!(out.status.code(), Some(5));
    assert!(stdout_of(&out).contains("NOT_ATTAINS via THM_38_MONOTONE"));

    let out = normgate(&[
        "analyze",
        "--preset=bergman",
        "--n-max=200",
        "--a=-2",
        "--b=2",
        "--c=1",
        "--phi=power:0,1,5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).contains("ATTAINS via LEMMA_36_WITNESS"));

    let out = normgate(&[
        "analyze", "--preset=ex313", "--a=-2", "--b=2", "--c=1", "--phi=power:0,1,5",
    ]);
    assert_eq!(out.status.code(), Some(5));
    assert!(stdout_of(&out).contains("LEMMA_35_SINGLETON"));
}

#[test]
fn analyze_reads_spectrum_json() {
    let path = temp_path("finite-spectrum.json");
    std::fs::write(&path, r#"{"bound": 1.0, "eigenvalues": [0.5, 1.0]}"#).expect("write json");
    let out = normgate(&[
        "analyze",
        &format!("--spec={}", path.display()),
        "--a=1",
        "--b=1",
        "--c=1",
        "--phi=log:1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("base operator attains its norm: true"));
    assert!(text.contains("ATTAINS via THM_38_MONOTONE"));
}

#[test]
fn analyze_rejects_unknown_json_fields() {
    let path = temp_path("bad-spectrum.json");
    std::fs::write(&path, r#"{"bound": 1.0, "eigenvalue": [0.5]}"#).expect("write json");
    let out = normgate(&[
        "analyze",
        &format!("--spec={}", path.display()),
        "--phi=log:1",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn analyze_requires_exactly_one_spectrum_source() {
    let out = normgate(&["analyze", "--phi=log:1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = normgate(&["analyze", "--preset=bergman", "--spec=x.json", "--phi=log:1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn counterexample_prints_decrease_witness() {
    let out = normgate(&["counterexample", "--phi=power:0,2,5", "--t0=1", "--margin=20"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("a = -2.0000000000000000e0"));
    assert!(text.contains("b = 1.0000000000000000e0"));
    assert!(text.contains("c = 1.0000000000000000e0"));
    assert!(text.contains("decrease witness"));
}

#[test]
fn counterexample_needs_a_slope_violation() {
    // Exponent 4 sits exactly on the quarter-slope boundary: no decrease to
    // exhibit, so construction must refuse.
    let out = normgate(&["counterexample", "--phi=power:0,1,4", "--t0=1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn curve_csv_round_trips_as_table_gain() {
    let path = temp_path("roundtrip.csv");
    let out = normgate(&[
        "curve",
        "--a=1",
        "--b=1",
        "--c=1",
        "--phi=log:1",
        "--range=0,2",
        "--n=64",
        &format!("--out={}", path.display()),
    ]);
    assert_eq!(out.status.code(), Some(0));
    // The emitted file (header and all) parses back in as a table gain.
    let out = normgate(&[
        "curve",
        "--a=1",
        "--b=1",
        "--c=1",
        &format!("--phi=table:{}", path.display()),
        "--range=0.1,1.9",
        "--n=5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_of(&out).lines().count(), 6);
}

#[test]
fn reproduce_exits_clean_on_all_examples() {
    let out = normgate(&["reproduce", "all"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(!text.contains("[FAIL]"));
    assert!(text.contains("brute-force argmax: n = 7"));
}

#[test]
fn oracle_reruns_are_byte_identical() {
    let first = normgate(&["oracle", "--trials=5", "--max-dim=5"]);
    let second = normgate(&["oracle", "--trials=5", "--max-dim=5"]);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    assert!(stdout_of(&first).contains("ALL WITHIN"));
}

#[test]
fn oracle_seed_resolution_prefers_flag_over_env() {
    let out = Command::new(env!("CARGO_BIN_EXE_normgate"))
        .args(["oracle", "--trials=2", "--max-dim=3"])
        .env("NORMGATE_SEED", "7")
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).starts_with("seed: 7\n"));

    let out = Command::new(env!("CARGO_BIN_EXE_normgate"))
        .args(["oracle", "--trials=2", "--max-dim=3", "--seed=9"])
        .env("NORMGATE_SEED", "7")
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).starts_with("seed: 9\n"));

    let out = Command::new(env!("CARGO_BIN_EXE_normgate"))
        .args(["oracle", "--trials=2", "--max-dim=3"])
        .env("NORMGATE_SEED", "not-a-number")
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    let out = normgate(&["curve"]);
    assert_eq!(out.status.code(), Some(2));
    let out = normgate(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn operational_errors_exit_one() {
    let out = normgate(&["curve", "--phi=table:/nonexistent/no.csv"]);
    assert_eq!(out.status.code(), Some(1));
    let out = normgate(&["curve", "--phi=power:0,1", "--range=0,1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = normgate(&["curve", "--phi=log:1", "--range=1,0"]);
    assert_eq!(out.status.code(), Some(1));
}
