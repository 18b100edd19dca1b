//! End-to-end tests of the `geomphase` binary: output shapes, value
//! pins, in-band error markers, and the exit-code contract
//! (0 success, 1 failed self-test, 2 usage/config, 3 numeric).

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::{Command, Output};

fn geomphase(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geomphase"))
        .args(args)
        .output()
        .expect("binary launches")
}

fn stdout_text(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn stderr_text(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf-8 stderr")
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

/// Smallest circular distance between two angles.
fn phase_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d)
}

/// Parse CSV text: one `#` comment line, a header, then comma-split rows.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with('#'), "first line is the unit comment");
    assert!(!lines[1].starts_with('#'), "second line is the header");
    lines[2..]
        .iter()
        .map(|line| line.split(',').map(str::to_string).collect())
        .collect()
}

fn unique_temp_path(stem: &str) -> PathBuf {
    std::env::temp_dir().join(format!("geomphase-cli-{stem}-{}", std::process::id()))
}

#[test]
fn simple_sweep_pins_the_two_reference_rows() {
    let output = geomphase(&[
        "simple-sweep",
        "--Tmin",
        "0.5",
        "--Tmax",
        "1.0",
        "--Tnum",
        "2",
        "--steps",
        "512",
    ]);
    assert_eq!(exit_code(&output), 0);
    let text = stdout_text(&output);
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 2);

    // T = R/2 sits on the π side, T = R on the trivial side.
    for (row, expected) in rows.iter().zip([PI, 0.0]) {
        assert_eq!(row.len(), 5);
        let numeric: f64 = row[1].parse().expect("numeric phase is a float");
        let analytic: f64 = row[2].parse().expect("analytic phase is a float");
        assert!(phase_distance(numeric, expected) < 1e-3);
        assert!(phase_distance(analytic, expected) < 1e-12);
        assert!(phase_distance(numeric, analytic) < 1e-3);
        let magnitude: f64 = row[3].parse().expect("magnitude is a float");
        assert!(magnitude > 0.1 && magnitude <= 1.0 + 1e-12);
        assert_eq!(row[4], "defined");
    }
}

#[test]
fn simple_sweep_brackets_the_jump() {
    // 40 log-spaced points across [0.1, 10]: phases flip from π to 0
    // exactly once, between adjacent rows around T ≈ 0.76 R.
    let output = geomphase(&[
        "simple-sweep",
        "--Tmin",
        "0.1",
        "--Tmax",
        "10",
        "--Tnum",
        "40",
        "--log",
        "--steps",
        "64",
    ]);
    assert_eq!(exit_code(&output), 0);
    let rows = csv_rows(&stdout_text(&output));
    assert_eq!(rows.len(), 40);
    let mut flips = Vec::new();
    let mut previous: Option<bool> = None;
    for row in &rows {
        let analytic: f64 = row[2].parse().expect("analytic phase is a float");
        let on_pi_side = analytic.abs() > PI / 2.0;
        if let Some(prev) = previous {
            if prev != on_pi_side {
                let t: f64 = row[0].parse().unwrap();
                flips.push((t, on_pi_side));
            }
        }
        previous = Some(on_pi_side);
    }
    assert_eq!(flips.len(), 1, "exactly one jump");
    let (t_after, side_after) = flips[0];
    assert!(!side_after, "the jump lands on the trivial side");
    assert!(t_after > 0.7 && t_after < 0.9, "jump near 0.76, got {t_after}");
}

#[test]
fn simple_sweep_writes_lf_file_with_unit_comment() {
    let path = unique_temp_path("sweep.csv");
    let output = geomphase(&[
        "simple-sweep",
        "--Tmin",
        "0.5",
        "--Tmax",
        "1.0",
        "--Tnum",
        "3",
        "--steps",
        "64",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0);
    assert!(stdout_text(&output).is_empty(), "--out silences stdout");
    let bytes = std::fs::read(&path).expect("output file exists");
    std::fs::remove_file(&path).ok();
    assert!(!bytes.contains(&b'\r'), "LF endings only");
    let text = String::from_utf8(bytes).unwrap();
    assert!(text.starts_with("# "), "unit comment first");
    assert!(text.lines().nth(1).unwrap().starts_with("T,"), "header second");
    assert_eq!(text.lines().count(), 2 + 3);
    assert!(text.ends_with('\n'));
}

#[test]
fn simple_sweep_rejects_bad_ranges() {
    for args in [
        vec!["simple-sweep", "--Tmin", "0"],
        vec!["simple-sweep", "--Tmin", "-1"],
        vec!["simple-sweep", "--Tmin", "5", "--Tmax", "1"],
        vec!["simple-sweep", "--Tnum", "1"],
        vec!["simple-sweep", "--steps", "4"],
    ] {
        let output = geomphase(&args);
        assert_eq!(exit_code(&output), 2, "args {args:?}");
        assert!(stderr_text(&output).contains("error"), "args {args:?}");
    }
}

#[test]
fn tb4d_single_temperature_pins_known_phases() {
    // (m, T, expected phase): the π dome interior, above its critical
    // temperature, and outside the dome.
    for (m, t, expected) in [("-3", "0.5", PI), ("-3", "2", 0.0), ("-1.5", "0.3", 0.0)] {
        let output = geomphase(&["tb4d", "--m", m, "--T", t]);
        assert_eq!(exit_code(&output), 0);
        let rows = csv_rows(&stdout_text(&output));
        assert_eq!(rows.len(), 1);
        let row = &rows[0];
        assert_eq!(row.len(), 5);
        let integral: f64 = row[2].parse().expect("I is a float");
        let theta: f64 = row[3].parse().expect("theta is a float");
        assert!(phase_distance(theta, expected) < 1e-9, "m={m} T={t}");
        assert_eq!(row[4], "defined");
        // cos(I) carries the phase: the sign must agree with the verdict.
        assert_eq!(integral.cos() < 0.0, expected == PI);
    }
}

#[test]
fn tb4d_accepts_fixed_quadrature() {
    let output = geomphase(&["tb4d", "--m", "-3", "--T", "0.5", "--quad", "fixed:2048"]);
    assert_eq!(exit_code(&output), 0);
    let rows = csv_rows(&stdout_text(&output));
    let theta: f64 = rows[0][3].parse().unwrap();
    assert!(phase_distance(theta, PI) < 1e-9);

    let output = geomphase(&["tb4d", "--m", "-3", "--T", "0.5", "--quad", "bogus"]);
    assert_eq!(exit_code(&output), 2);
}

#[test]
fn tb4d_sweep_outside_the_dome_is_all_trivial() {
    let output = geomphase(&[
        "tb4d", "--m", "-1.5", "--Tmin", "0.1", "--Tmax", "5", "--Tnum", "5", "--log",
    ]);
    assert_eq!(exit_code(&output), 0);
    let rows = csv_rows(&stdout_text(&output));
    assert_eq!(rows.len(), 5);
    for row in &rows {
        let theta: f64 = row[3].parse().unwrap();
        assert!(phase_distance(theta, 0.0) < 1e-12);
        assert_eq!(row[4], "defined");
    }
}

#[test]
fn tb4d_gap_closure_is_an_in_band_marker() {
    // |m+3| = 1 closes the gap on the loop: rows carry the error code,
    // the process still exits 0.
    let output = geomphase(&["tb4d", "--m", "-2", "--T", "0.5"]);
    assert_eq!(exit_code(&output), 0);
    let rows = csv_rows(&stdout_text(&output));
    assert_eq!(rows[0][2], "ERROR:GapClosureOnPath");
    assert_eq!(rows[0][3], "ERROR:GapClosureOnPath");
    assert_eq!(rows[0][4], "error");
}

#[test]
fn tb4d_rejects_nonpositive_single_temperature() {
    let output = geomphase(&["tb4d", "--m", "-3", "--T", "-0.5"]);
    assert_eq!(exit_code(&output), 2);
}

#[test]
fn diagram_csv_is_thread_invariant_and_well_shaped() {
    let base = [
        "diagram", "--mmin", "-3.5", "--mmax", "-2.5", "--mnum", "3", "--Tmin", "0.3",
        "--Tmax", "0.9", "--Tnum", "3",
    ];
    let mut texts = Vec::new();
    for threads in ["1", "2"] {
        let mut args: Vec<&str> = base.to_vec();
        args.extend(["--threads", threads]);
        let output = geomphase(&args);
        assert_eq!(exit_code(&output), 0);
        texts.push(stdout_text(&output));
    }
    assert_eq!(texts[0], texts[1], "byte-identical across thread counts");

    let rows = csv_rows(&texts[0]);
    assert_eq!(rows.len(), 9, "3×3 cells, m-major");
    // Cold corner of the dome interior is π, the hot corner trivial.
    let cold: f64 = rows[3][2].parse().unwrap(); // m = −3, T = 0.3
    let hot: f64 = rows[5][2].parse().unwrap(); // m = −3, T = 0.9
    assert!(phase_distance(cold, PI) < 1e-9);
    assert!(phase_distance(hot, 0.0) < 1e-9);
}

#[test]
fn diagram_json_reports_fit_null_when_no_dome() {
    // Entirely above the dome: every cell trivial, nothing to fit.
    let output = geomphase(&[
        "diagram", "--mmin", "-3.2", "--mmax", "-2.8", "--mnum", "2", "--Tmin", "2",
        "--Tmax", "3", "--Tnum", "2", "--format", "json",
    ]);
    assert_eq!(exit_code(&output), 0);
    let doc: serde_json::Value =
        serde_json::from_str(&stdout_text(&output)).expect("valid JSON");
    assert!(doc["dome_fit"].is_null());
    assert_eq!(doc["m_values"].as_array().unwrap().len(), 2);
    assert_eq!(doc["t_values"].as_array().unwrap().len(), 2);
    let cells = doc["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 2);
    for row in cells {
        for cell in row.as_array().unwrap() {
            assert_eq!(cell["status"], "defined");
            assert_eq!(cell["phase"].as_f64().unwrap(), 0.0);
        }
    }
}

#[test]
fn diagram_json_fits_the_dome_when_present() {
    // Coarse but genuine dome coverage; the fit exists and lands in
    // generous bands around (0.75, 0.45).
    let output = geomphase(&[
        "diagram", "--mmin", "-3.9", "--mmax", "-2.1", "--mnum", "19", "--Tmin", "0.02",
        "--Tmax", "1.0", "--Tnum", "9", "--format", "json",
    ]);
    assert_eq!(exit_code(&output), 0);
    let doc: serde_json::Value =
        serde_json::from_str(&stdout_text(&output)).expect("valid JSON");
    let fit = &doc["dome_fit"];
    assert!(fit.is_object(), "fit present on a dome-covering grid");
    let amplitude = fit["A"].as_f64().unwrap();
    let exponent = fit["p"].as_f64().unwrap();
    assert!((0.70..=0.80).contains(&amplitude), "A = {amplitude}");
    assert!((0.40..=0.50).contains(&exponent), "p = {exponent}");
}

#[test]
fn diagram_rejects_degenerate_grids() {
    for args in [
        vec!["diagram", "--Tmin", "0.5", "--Tmax", "0.5"],
        vec!["diagram", "--Tmin", "0"],
        vec!["diagram", "--Tnum", "1"],
        vec!["diagram", "--mnum", "1"],
        vec!["diagram", "--mmin", "-1", "--mmax", "-5"],
        vec!["diagram", "--threads", "0"],
    ] {
        let output = geomphase(&args);
        assert_eq!(exit_code(&output), 2, "args {args:?}");
    }
}

#[test]
fn compare_equator_reports_match() {
    let output = geomphase(&["compare", "--steps", "512"]);
    assert_eq!(exit_code(&output), 0);
    let doc: serde_json::Value =
        serde_json::from_str(&stdout_text(&output)).expect("valid JSON");
    assert_eq!(doc["verdict"], "match");
    assert!(doc["unitary_family"].as_bool().unwrap());
    assert_eq!(doc["ladder"].as_array().unwrap().len(), 5);
    let wz = doc["theta_WZ"]["phase"].as_f64().unwrap();
    let limit = doc["theta_U_limit"]["phase"].as_f64().unwrap();
    assert!(phase_distance(wz, PI) < 1e-6);
    assert!(phase_distance(limit, PI) < 1e-3);
    assert_eq!(doc["winding"]["kappa"].as_i64().unwrap(), 0);
    assert!(doc["commutator_max"].as_f64().unwrap() < 1e-9);
}

#[test]
fn compare_tb4d_reports_mismatch() {
    let output = geomphase(&["compare", "--model", "tb4d", "--m", "-3", "--steps", "512"]);
    assert_eq!(exit_code(&output), 0);
    let doc: serde_json::Value =
        serde_json::from_str(&stdout_text(&output)).expect("valid JSON");
    assert_eq!(doc["verdict"], "mismatch");
    let wz = doc["theta_WZ"]["phase"].as_f64().unwrap();
    let limit = doc["theta_U_limit"]["phase"].as_f64().unwrap();
    assert!(phase_distance(wz, 0.0) < 1e-6);
    assert!(phase_distance(limit, PI) < 1e-3);
    // Constant spectrum, but the analytic frames hit their pole at the
    // base point: diagnostics degrade to null without affecting the verdict.
    assert!(doc["unitary_family"].as_bool().unwrap());
    assert!(doc["winding"].is_null());
    assert!(doc["commutator_max"].is_null());
}

#[test]
fn compare_explicit_constant_loop_matches_trivially() {
    let path = unique_temp_path("constant-loop.txt");
    let mut text = String::from("# constant loop: nine segments, all the same point\n");
    for _ in 0..10 {
        text.push_str("0.3 -0.2 0.4 0.1 0.5\n");
    }
    std::fs::write(&path, text).unwrap();
    let output = geomphase(&["compare", "--loop-file", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(exit_code(&output), 0);
    let doc: serde_json::Value =
        serde_json::from_str(&stdout_text(&output)).expect("valid JSON");
    assert_eq!(doc["verdict"], "match");
    assert_eq!(doc["loop"], "explicit(N=9)");
    let wz = doc["theta_WZ"]["phase"].as_f64().unwrap();
    assert!(phase_distance(wz, 0.0) < 1e-12);
    assert_eq!(doc["winding"]["kappa"].as_i64().unwrap(), 0);
}

#[test]
fn compare_numeric_failure_exits_three() {
    // |m+3| = 1: the loop's gap closes; a top-level numeric error.
    let output = geomphase(&["compare", "--model", "tb4d", "--m", "-2"]);
    assert_eq!(exit_code(&output), 3);
    assert!(stderr_text(&output).contains("GapClosureOnPath"));
}

#[test]
fn compare_rejects_malformed_loop_files() {
    let path = unique_temp_path("bad-loop.txt");
    std::fs::write(&path, "0.1 0.2 three 0.4 0.5\n").unwrap();
    let output = geomphase(&["compare", "--loop-file", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(exit_code(&output), 2);

    let output = geomphase(&["compare", "--loop-file", "/nonexistent/loop.txt"]);
    assert_eq!(exit_code(&output), 2);
}

#[test]
fn selftest_quick_passes_and_prints_the_table() {
    let output = geomphase(&["selftest", "--quick"]);
    assert_eq!(exit_code(&output), 0);
    let text = stdout_text(&output);
    assert!(text.contains("quick tier"));
    assert_eq!(text.matches("PASS").count(), 5, "five invariant suites");
    assert!(!text.contains("FAIL"));
    assert!(text.contains("all checks passed"));
    for name in [
        "clifford-algebra",
        "form-equivalence",
        "transport-unitarity",
        "eigenbasis-block-vanishing",
        "transport-richardson",
    ] {
        assert!(text.contains(name), "table lists {name}");
    }
}

#[test]
fn unknown_flags_and_subcommands_exit_two() {
    assert_eq!(exit_code(&geomphase(&["simple-sweep", "--bogus"])), 2);
    assert_eq!(exit_code(&geomphase(&["frobnicate"])), 2);
    assert_eq!(exit_code(&geomphase(&[])), 2);
}
