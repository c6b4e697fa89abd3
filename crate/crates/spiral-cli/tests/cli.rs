//! End-to-end binary tests: exit codes, file outputs, determinism.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spiral-spline"))
}

fn write(dir: &Path, name: &str, contents: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

const TWO_SEGMENT_CSV: &str = "t,x,y\n0,0,0\n0.5,0.48,0.12\n1.1,1,0\n";

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().unwrap();
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn rank_prints_branches_in_energy_order() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "data.csv", TWO_SEGMENT_CSV);
    let out = run_ok(bin().arg("rank").arg("--input").arg(&input));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("4 of 4 branches succeeded"), "{stdout}");
    // lowest estimate energy first: (+,-) at ~4.123
    let first_data_line = stdout.lines().nth(1).unwrap();
    assert!(first_data_line.contains("+-"), "{first_data_line}");
    assert!(first_data_line.contains("4.123"), "{first_data_line}");
}

#[test]
fn fit_writes_deterministic_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "data.csv", TWO_SEGMENT_CSV);
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        run_ok(
            bin()
                .arg("fit")
                .arg("--input")
                .arg(&input)
                .arg("--all")
                .arg("--samples")
                .arg("16")
                .arg("--svg")
                .arg("--out")
                .arg(out),
        );
    }

    let mut names: Vec<String> = std::fs::read_dir(&out_a)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    // summary + 4 branches x (json, csv, svg)
    assert_eq!(names.len(), 13, "{names:?}");
    assert!(names.contains(&"summary.csv".to_string()));
    assert!(names.contains(&"branch_1_+-.json".to_string()));

    for name in &names {
        let a = std::fs::read(out_a.join(name)).unwrap();
        let b = std::fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }

    // summary keeps all 2^n rows, successes and failures alike
    let summary = std::fs::read_to_string(out_a.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 5, "{summary}");
    assert!(summary.contains("refine:"), "{summary}");

    // branch JSON parses and carries the expected fields
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_a.join("branch_1_+-.json")).unwrap())
            .unwrap();
    assert_eq!(parsed["sigma"], serde_json::json!([1, -1]));
    assert_eq!(parsed["converged"], serde_json::json!(true));
    assert!(parsed["refined"]["energy"].as_f64().unwrap() > 0.0);
    let knots: Vec<f64> = parsed["knots"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(knots, vec![0.0, 0.5, 1.1]);
}

#[test]
fn estimate_mode_sampled_tilde_curve_jumps_at_interior_knot() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "data.csv", TWO_SEGMENT_CSV);
    let out = dir.path().join("est");
    run_ok(
        bin()
            .arg("fit")
            .arg("--input")
            .arg(&input)
            .arg("--mode")
            .arg("estimate")
            .arg("--sigma")
            .arg("++")
            .arg("--samples")
            .arg("8")
            .arg("--out")
            .arg(&out),
    );
    let csv = std::fs::read_to_string(out.join("branch_4_++.csv")).unwrap();
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 16);
    // the last sample of segment 1 and first of segment 2 share t but the
    // re-anchored curve jumps across the knot for a raw estimate
    let (end1, start2) = (&rows[7], &rows[8]);
    assert!((end1[0] - start2[0]).abs() < 1e-9);
    let jump = ((end1[3] - start2[3]).powi(2) + (end1[4] - start2[4]).powi(2)).sqrt();
    assert!(jump > 1e-3, "tilde jump {jump} not visible");
    // while the plain curve is continuous there
    let c = ((end1[1] - start2[1]).powi(2) + (end1[2] - start2[2]).powi(2)).sqrt();
    assert!(c < 1e-9, "plain curve jump {c}");
}

#[test]
fn exit_codes_follow_failure_kind() {
    let dir = tempfile::tempdir().unwrap();

    // parse failure: 3
    let bad = write(dir.path(), "bad.csv", "0,0\n1,1\n");
    let out = bin().arg("rank").arg("--input").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(3));

    // validation failure: 2 (collinear data at the unit-speed limit)
    let collinear = write(dir.path(), "line.csv", "0,0,0\n1,1,0\n2,2,0\n");
    let out = bin()
        .arg("rank")
        .arg("--input")
        .arg(&collinear)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("chord"));

    // missing file: 1
    let out = bin()
        .arg("rank")
        .arg("--input")
        .arg(dir.path().join("absent.csv"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    // a run with some failed branches still exits 0
    let input = write(dir.path(), "data.csv", TWO_SEGMENT_CSV);
    let out = bin()
        .arg("fit")
        .arg("--input")
        .arg(&input)
        .arg("--all")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn json_input_and_explicit_sigma_list() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "data.json",
        r#"{"times":[0,0.5,1.1],"points":[[0,0],[0.48,0.12],[1,0]]}"#,
    );
    let out = run_ok(
        bin()
            .arg("fit")
            .arg("--input")
            .arg(&input)
            .arg("--sigma")
            .arg("+-")
            .arg("--sigma")
            .arg("1,-1")
            .arg("--tol")
            .arg("1e-9"),
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("2 of 2 branches succeeded"), "{stdout}");
}

#[test]
fn optimize_subcommand_runs_on_selected_branch() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "data.csv", TWO_SEGMENT_CSV);
    let out_dir = dir.path().join("opt");
    let out = run_ok(
        bin()
            .arg("optimize")
            .arg("--input")
            .arg(&input)
            .arg("--sigma")
            .arg("+-")
            .arg("--tol")
            .arg("1e-9")
            .arg("--out")
            .arg(&out_dir),
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("1 of 1 branches succeeded"), "{stdout}");
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("branch_1_+-.json")).unwrap())
            .unwrap();
    let refined = parsed["refined"]["energy"].as_f64().unwrap();
    let optimized = parsed["optimized"]["energy"].as_f64().unwrap();
    assert!(optimized <= refined + 1e-8, "{optimized} vs {refined}");
    assert_eq!(parsed["optimized"]["family"], serde_json::json!("constant"));
}

#[test]
fn worker_pool_env_var_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "data.csv", TWO_SEGMENT_CSV);
    let out = run_ok(
        bin()
            .arg("rank")
            .arg("--input")
            .arg(&input)
            .env("SPIRAL_SPLINE_THREADS", "1"),
    );
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("4 of 4 branches succeeded"));

    let out = bin()
        .arg("rank")
        .arg("--input")
        .arg(&input)
        .env("SPIRAL_SPLINE_THREADS", "soon")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("SPIRAL_SPLINE_THREADS"));
}

#[test]
fn top_k_restricts_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "data.csv", TWO_SEGMENT_CSV);
    let out = run_ok(
        bin()
            .arg("fit")
            .arg("--input")
            .arg(&input)
            .arg("--top-k")
            .arg("2"),
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("2 of 2 branches succeeded"), "{stdout}");
}
