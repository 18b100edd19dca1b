//! Command-line front end for the degenerate-band geometric-phase engine.
//!
//! Five subcommands run the standard experiments and emit plot-ready data:
//!
//! * `simple-sweep` — mixed-state phase of the sphere-equator loop against
//!   temperature, numeric transport next to the closed form (the π-jump
//!   curve).
//! * `tb4d` — the tight-binding kₓ loop: connection integral I(m, T) and
//!   the phase it carries, at one temperature or over a sweep.
//! * `diagram` — the (m, T) phase diagram of the tight-binding model;
//!   JSON output adds the dome fit A·[1 − (m+3)²]^p of the critical line.
//! * `compare` — pure-vs-mixed correspondence report for one loop
//!   (built-in families or an explicit sample file), as JSON.
//! * `selftest` — the built-in invariant suites, as a pass/fail table.
//!
//! CSV output is comma-separated with a `#` unit-comment line, a header
//! row, floats at 12 significant digits, and LF endings. Every phase field
//! is a float in (−π, π], the token `NEAR_CRITICAL`, or `ERROR:<code>`;
//! the `status` column mirrors that as `defined`, `near-critical`, or
//! `error`. Exit codes: 0 success, 1 failed self-test, 2 usage or
//! configuration error, 3 numeric failure at top level (row and cell
//! failures inside sweeps are reported in-band and exit 0). Identical
//! configurations produce byte-identical output regardless of `--threads`.

use std::fmt::Write as _;
use std::num::NonZeroUsize;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use geomphase::analysis::{self, CellValue, CorrespondenceReport, GridSpec, PhaseCell};
use geomphase::model::LoopPath;
use geomphase::selftest;
use geomphase::uhlmann::{self, PhaseResult, PhaseStatus, QuadSpec};
use serde_json::json;

/// What went wrong, mapped onto the process exit code.
enum Failure {
    /// Bad flags or an unusable configuration (exit 2).
    Config(String),
    /// A numeric evaluation failed at top level (exit 3).
    Numeric(geomphase::Error),
    /// At least one self-test check failed (exit 1).
    Check,
}

type CmdResult = Result<(), Failure>;

#[derive(Debug, Parser)]
#[command(
    name = "geomphase",
    version,
    about = "Geometric phases of a four-level model with degenerate bands: \
             temperature sweeps, phase diagrams, correspondence reports"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sweep the equator-loop mixed-state phase over temperature, numeric
    /// transport next to the closed form.
    SimpleSweep(SweepArgs),
    /// Tight-binding kₓ loop: connection integral I and phase at one or
    /// many temperatures.
    Tb4d(Tb4dArgs),
    /// (m, T) phase diagram of the tight-binding model; JSON output adds
    /// the dome fit.
    Diagram(DiagramArgs),
    /// Pure-vs-mixed correspondence report for one loop, as JSON.
    Compare(CompareArgs),
    /// Run the built-in invariant suites and print a pass/fail table.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Lowest temperature, in units of the loop radius R.
    #[arg(long = "Tmin", default_value_t = 0.1, allow_negative_numbers = true)]
    t_min: f64,
    /// Highest temperature, in units of the loop radius R.
    #[arg(long = "Tmax", default_value_t = 10.0, allow_negative_numbers = true)]
    t_max: f64,
    /// Number of sweep points (at least 2).
    #[arg(long = "Tnum", default_value_t = 200)]
    t_num: usize,
    /// Space the sweep points logarithmically instead of linearly.
    #[arg(long)]
    log: bool,
    /// Path-discretization segments N for the numeric column.
    #[arg(long, default_value_t = 4096)]
    steps: usize,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Tb4dArgs {
    /// Mass parameter m of the tight-binding loop.
    #[arg(long, allow_negative_numbers = true)]
    m: f64,
    /// Single temperature; when given, the sweep flags are ignored.
    #[arg(long = "T", allow_negative_numbers = true)]
    t: Option<f64>,
    /// Lowest sweep temperature.
    #[arg(long = "Tmin", default_value_t = 0.1, allow_negative_numbers = true)]
    t_min: f64,
    /// Highest sweep temperature.
    #[arg(long = "Tmax", default_value_t = 10.0, allow_negative_numbers = true)]
    t_max: f64,
    /// Number of sweep points (at least 2).
    #[arg(long = "Tnum", default_value_t = 200)]
    t_num: usize,
    /// Space the sweep points logarithmically instead of linearly.
    #[arg(long)]
    log: bool,
    /// Quadrature for the loop integral: `adaptive` or `fixed:<intervals>`.
    #[arg(long, default_value = "adaptive", value_parser = parse_quad)]
    quad: QuadArg,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DiagramArgs {
    /// Lowest mass parameter.
    #[arg(long, default_value_t = -5.0, allow_negative_numbers = true)]
    mmin: f64,
    /// Highest mass parameter.
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    mmax: f64,
    /// Number of mass samples (at least 2).
    #[arg(long, default_value_t = 81)]
    mnum: usize,
    /// Lowest temperature (must be positive).
    #[arg(long = "Tmin", default_value_t = 0.02, allow_negative_numbers = true)]
    t_min: f64,
    /// Highest temperature.
    #[arg(long = "Tmax", default_value_t = 1.2, allow_negative_numbers = true)]
    t_max: f64,
    /// Number of temperature samples (at least 2).
    #[arg(long = "Tnum", default_value_t = 60)]
    t_num: usize,
    /// Quadrature for each cell's loop integral: `adaptive` or
    /// `fixed:<intervals>`.
    #[arg(long, default_value = "adaptive", value_parser = parse_quad)]
    quad: QuadArg,
    /// Worker threads (default: hardware parallelism). The output is
    /// byte-identical for every thread count.
    #[arg(long)]
    threads: Option<usize>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// Built-in loop family.
    #[arg(long, value_enum, default_value_t = Model::Equator)]
    model: Model,
    /// Mass parameter (tb4d model only).
    #[arg(long, default_value_t = -3.0, allow_negative_numbers = true)]
    m: f64,
    /// Path-discretization segments N for built-in families.
    #[arg(long, default_value_t = 4096)]
    steps: usize,
    /// Explicit loop file (one sample of five reals per line, `#` comments
    /// allowed, first and last samples identical); overrides --model.
    #[arg(long = "loop-file")]
    loop_file: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SelftestArgs {
    /// Relaxed tier: half the sample budget, 1e-4 tolerances.
    #[arg(long)]
    quick: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Model {
    Equator,
    Tb4d,
}

/// Parsed `--quad` value; a thin wrapper so clap can clone it around.
#[derive(Clone, Copy, Debug)]
struct QuadArg(QuadSpec);

fn parse_quad(text: &str) -> Result<QuadArg, String> {
    if text == "adaptive" {
        return Ok(QuadArg(QuadSpec::default()));
    }
    if let Some(points) = text.strip_prefix("fixed:") {
        let n: usize = points
            .parse()
            .map_err(|e| format!("fixed:<intervals> wants an integer: {e}"))?;
        if n < 2 {
            return Err("fixed:<intervals> needs at least 2 intervals".into());
        }
        return Ok(QuadArg(QuadSpec::Fixed(n)));
    }
    Err(format!("expected `adaptive` or `fixed:<intervals>`, got `{text}`"))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(e)) => {
            eprintln!("error: {e} [{}]", e.code());
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::SimpleSweep(args) => cmd_simple_sweep(&args),
        Command::Tb4d(args) => cmd_tb4d(&args),
        Command::Diagram(args) => cmd_diagram(&args),
        Command::Compare(args) => cmd_compare(&args),
        Command::Selftest(args) => cmd_selftest(&args),
    }
}

// ---------------------------------------------------------------------
// Output plumbing
// ---------------------------------------------------------------------

/// Floats at 12 significant digits, scientific notation — bit-stable
/// across runs and thread counts.
fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

/// CSV token for a phase: the float, or `NEAR_CRITICAL`.
fn phase_token(result: &PhaseResult) -> String {
    match result.status {
        PhaseStatus::Defined => fmt_float(result.phase),
        PhaseStatus::NearCritical => "NEAR_CRITICAL".to_string(),
    }
}

/// Phase token for a fallible evaluation: `ERROR:<code>` on failure.
fn phase_token_or_error(result: &geomphase::Result<PhaseResult>) -> String {
    match result {
        Ok(pr) => phase_token(pr),
        Err(e) => format!("ERROR:{}", e.code()),
    }
}

/// JSON view of a phase result: `phase` is null when near-critical.
fn phase_json(result: &PhaseResult) -> serde_json::Value {
    let phase = match result.status {
        PhaseStatus::Defined => json!(result.phase),
        PhaseStatus::NearCritical => serde_json::Value::Null,
    };
    json!({
        "phase": phase,
        "magnitude": result.magnitude,
        "status": result.status.as_str(),
    })
}

/// Write the assembled output to `--out` or stdout.
fn emit(out: &Option<PathBuf>, content: &str) -> CmdResult {
    match out {
        Some(path) => std::fs::write(path, content).map_err(|e| {
            Failure::Config(format!("cannot write {}: {e}", path.display()))
        }),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Temperature sweep values over [t_min, t_max], endpoints exact,
/// linearly or logarithmically spaced.
fn sweep_grid(t_min: f64, t_max: f64, n: usize, log: bool) -> Result<Vec<f64>, Failure> {
    if !(t_min > 0.0) {
        return Err(Failure::Config(format!("Tmin must be positive, got {t_min}")));
    }
    if !(t_max > t_min) {
        return Err(Failure::Config(format!(
            "temperature range needs Tmin < Tmax, got [{t_min}, {t_max}]"
        )));
    }
    if n < 2 {
        return Err(Failure::Config(format!("Tnum must be at least 2, got {n}")));
    }
    let values = if log {
        let lo = t_min.ln();
        let step = (t_max.ln() - lo) / (n - 1) as f64;
        (0..n)
            .map(|i| if i + 1 == n { t_max } else { (lo + step * i as f64).exp() })
            .collect()
    } else {
        let step = (t_max - t_min) / (n - 1) as f64;
        (0..n)
            .map(|i| if i + 1 == n { t_max } else { t_min + step * i as f64 })
            .collect()
    };
    Ok(values)
}

fn check_steps(steps: usize) -> CmdResult {
    if steps < geomphase::MIN_SEGMENTS {
        return Err(Failure::Config(format!(
            "--steps must be at least {}, got {steps}",
            geomphase::MIN_SEGMENTS
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------

/// Equator-loop temperature sweep. The `status` column reflects the
/// numeric evaluation; the analytic column carries its own token.
fn cmd_simple_sweep(args: &SweepArgs) -> CmdResult {
    let temperatures = sweep_grid(args.t_min, args.t_max, args.t_num, args.log)?;
    check_steps(args.steps)?;
    let lp = LoopPath::equator(1.0, args.steps).map_err(Failure::Numeric)?;

    let mut csv = String::new();
    csv.push_str(
        "# equator loop, radius R = 1; temperatures in units of R; phases in radians\n",
    );
    csv.push_str("T,theta_U_numeric,theta_U_analytic,trace_magnitude,status\n");
    for &t in &temperatures {
        let numeric = uhlmann::phase(&lp, t);
        let analytic = uhlmann::equator_phase_analytic(t, 1.0);
        let (magnitude, status) = match &numeric {
            Ok(pr) => (fmt_float(pr.magnitude), pr.status.as_str()),
            Err(e) => (format!("ERROR:{}", e.code()), "error"),
        };
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            fmt_float(t),
            phase_token_or_error(&numeric),
            phase_token_or_error(&analytic),
            magnitude,
            status
        );
    }
    emit(&args.out, &csv)
}

/// Tight-binding kₓ loop rows; one temperature or a sweep. Row failures
/// (gap closure at |m+3| = 1, say) are reported in-band.
fn cmd_tb4d(args: &Tb4dArgs) -> CmdResult {
    let temperatures = match args.t {
        Some(t) => {
            if !(t > 0.0) {
                return Err(Failure::Config(format!("T must be positive, got {t}")));
            }
            vec![t]
        }
        None => sweep_grid(args.t_min, args.t_max, args.t_num, args.log)?,
    };

    let mut csv = String::new();
    csv.push_str(
        "# tight-binding kx loop; temperatures in model energy units; I and phases in radians\n",
    );
    csv.push_str("m,T,I,theta_U,status\n");
    for &t in &temperatures {
        let integral = uhlmann::tb4d_integral(args.m, t, &args.quad.0);
        let phase = uhlmann::tb4d_phase_analytic(args.m, t, &args.quad.0);
        let i_token = match &integral {
            Ok(value) => fmt_float(*value),
            Err(e) => format!("ERROR:{}", e.code()),
        };
        let status = match &phase {
            Ok(pr) => pr.status.as_str(),
            Err(_) => "error",
        };
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            fmt_float(args.m),
            fmt_float(t),
            i_token,
            phase_token_or_error(&phase),
            status
        );
    }
    emit(&args.out, &csv)
}

/// CSV tokens for one phase-diagram cell: (phase, magnitude).
fn cell_tokens(cell: &PhaseCell) -> (String, String) {
    match cell.value {
        CellValue::Phase(phi) => (fmt_float(phi), fmt_float(cell.magnitude)),
        CellValue::NearCritical => ("NEAR_CRITICAL".to_string(), fmt_float(cell.magnitude)),
        CellValue::Failed(code) => (format!("ERROR:{code}"), format!("ERROR:{code}")),
    }
}

/// JSON view of one phase-diagram cell.
fn cell_json(cell: &PhaseCell) -> serde_json::Value {
    match cell.value {
        CellValue::Phase(phi) => json!({
            "phase": phi,
            "status": "defined",
            "magnitude": cell.magnitude,
        }),
        CellValue::NearCritical => json!({
            "phase": serde_json::Value::Null,
            "status": "near-critical",
            "magnitude": cell.magnitude,
        }),
        CellValue::Failed(code) => json!({
            "phase": serde_json::Value::Null,
            "status": "error",
            "code": code,
            "magnitude": serde_json::Value::Null,
        }),
    }
}

/// (m, T) phase diagram. Cell failures become in-band markers; only
/// configuration problems exit nonzero. JSON output appends the dome fit,
/// or null when the grid holds no fittable dome.
fn cmd_diagram(args: &DiagramArgs) -> CmdResult {
    let threads = match args.threads {
        Some(0) => return Err(Failure::Config("--threads must be at least 1".into())),
        Some(n) => n,
        None => std::thread::available_parallelism().map(NonZeroUsize::get).unwrap_or(1),
    };
    if !(args.t_min > 0.0) {
        return Err(Failure::Config(format!("Tmin must be positive, got {}", args.t_min)));
    }
    if !(args.t_max > args.t_min) {
        return Err(Failure::Config(format!(
            "temperature range needs Tmin < Tmax, got [{}, {}]",
            args.t_min, args.t_max
        )));
    }
    if args.t_num < 2 {
        return Err(Failure::Config(format!("Tnum must be at least 2, got {}", args.t_num)));
    }
    if !(args.mmax > args.mmin) {
        return Err(Failure::Config(format!(
            "mass range needs mmin < mmax, got [{}, {}]",
            args.mmin, args.mmax
        )));
    }
    if args.mnum < 2 {
        return Err(Failure::Config(format!("mnum must be at least 2, got {}", args.mnum)));
    }

    let spec = GridSpec {
        m_min: args.mmin,
        m_max: args.mmax,
        m_count: args.mnum,
        t_min: args.t_min,
        t_max: args.t_max,
        t_count: args.t_num,
        quad: args.quad.0,
        threads,
    };
    let grid = analysis::phase_diagram(&spec).map_err(Failure::Numeric)?;

    match args.format {
        Format::Csv => {
            let mut csv = String::new();
            csv.push_str(
                "# tight-binding (m, T) phase diagram; temperatures in model energy units; \
                 phases in radians\n",
            );
            csv.push_str("m,T,theta_U,magnitude\n");
            for (mi, m) in grid.m_values.iter().enumerate() {
                for (ti, t) in grid.t_values.iter().enumerate() {
                    let (theta, magnitude) = cell_tokens(&grid.cells[mi][ti]);
                    let _ = writeln!(
                        csv,
                        "{},{},{},{}",
                        fmt_float(*m),
                        fmt_float(*t),
                        theta,
                        magnitude
                    );
                }
            }
            emit(&args.out, &csv)
        }
        Format::Json => {
            let fit = analysis::dome_fit(&grid, &args.quad.0).ok().map(|fit| {
                json!({
                    "A": fit.amplitude,
                    "p": fit.exponent,
                    "residual": fit.residual,
                })
            });
            let cells: Vec<Vec<serde_json::Value>> = grid
                .cells
                .iter()
                .map(|row| row.iter().map(cell_json).collect())
                .collect();
            let doc = json!({
                "m_values": grid.m_values,
                "t_values": grid.t_values,
                "cells": cells,
                "dome_fit": fit,
            });
            let mut text = serde_json::to_string_pretty(&doc).expect("serializable document");
            text.push('\n');
            emit(&args.out, &text)
        }
    }
}

/// JSON view of a correspondence report.
fn report_json(report: &CorrespondenceReport) -> serde_json::Value {
    let ladder: Vec<serde_json::Value> = report
        .ladder
        .iter()
        .map(|rung| {
            json!({
                "temperature": rung.temperature,
                "theta_U": phase_json(&rung.theta_u),
            })
        })
        .collect();
    json!({
        "loop": report.loop_label,
        "unitary_family": report.unitary_family,
        "ladder": ladder,
        "theta_WZ": phase_json(&report.theta_wz),
        "theta_U_limit": phase_json(&report.theta_u_limit),
        "verdict": report.verdict.as_str(),
        "winding": report.winding.as_ref().map(|w| json!({
            "kappa": w.kappa,
            "residual": w.residual,
        })),
        "commutator_max": report.commutator_max,
    })
}

/// Pure-vs-mixed correspondence for one loop. Numeric failures (a loop
/// whose gap closes, a ladder rung that cannot be evaluated) exit 3;
/// unreadable or malformed loop files are configuration errors.
fn cmd_compare(args: &CompareArgs) -> CmdResult {
    let lp = match &args.loop_file {
        Some(path) => LoopPath::load(path).map_err(|e| {
            Failure::Config(format!("--loop-file {}: {e}", path.display()))
        })?,
        None => {
            check_steps(args.steps)?;
            match args.model {
                Model::Equator => {
                    LoopPath::equator(1.0, args.steps).map_err(Failure::Numeric)?
                }
                Model::Tb4d => {
                    LoopPath::tb4d_kx(args.m, args.steps).map_err(Failure::Numeric)?
                }
            }
        }
    };
    let scale = lp.sample(0).norm();
    let ladder = analysis::default_ladder(scale);
    let report = analysis::correspondence(&lp, &ladder).map_err(Failure::Numeric)?;
    let mut text =
        serde_json::to_string_pretty(&report_json(&report)).expect("serializable document");
    text.push('\n');
    emit(&args.out, &text)
}

/// Invariant suites as a pass/fail table; exit 0 iff every check passed.
fn cmd_selftest(args: &SelftestArgs) -> CmdResult {
    let report = selftest::run(args.quick);
    let tier = if report.quick { "quick" } else { "full" };
    println!("self-test ({tier} tier)");
    println!("{:<28} {:<6} {:>12}  requirement", "check", "result", "measured");
    for check in &report.checks {
        println!(
            "{:<28} {:<6} {:>12}  {}",
            check.name,
            if check.passed { "PASS" } else { "FAIL" },
            format!("{:.3e}", check.measured),
            check.requirement
        );
    }
    if report.all_passed() {
        println!("all checks passed");
        Ok(())
    } else {
        println!("FAILURE: at least one check failed");
        Err(Failure::Check)
    }
}
