use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use spiral_cli::input::{parse_problem, InputFormat};
use spiral_cli::output::{emit_outputs, human_table};
use spiral_cli::report::run;
use spiral_cli::request::{parse_sigma, BranchSelector, Mode, RunRequest};
use spiral_cli::{CliError, CliResult};
use spiral_spline::{QuadratureConfig, SolverConfig};

/// Interpolate planar waypoints at prescribed times with unit-speed
/// C^2 spiral splines, one solution branch per concavity sign vector.
#[derive(Parser)]
#[command(name = "spiral-spline", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate branch coefficients and close the interpolation gaps.
    Fit(FitArgs),
    /// Fit, then minimize bending energy over the extended family.
    Optimize(CommonArgs),
    /// Rank the branches by estimate energy (no refinement).
    Rank(CommonArgs),
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Stop after the coefficient estimates or solve to interpolation.
    #[arg(long, value_parser = ["estimate", "refine"], default_value = "refine")]
    mode: String,
}

#[derive(Args)]
struct CommonArgs {
    /// Input file with times and waypoints.
    #[arg(long, short)]
    input: PathBuf,

    /// Input format; inferred from the extension when omitted.
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,

    /// Run every branch (the default when no selector is given).
    #[arg(long)]
    all: bool,

    /// Explicit sign vector like `+-+` or `1,-1,1`; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    sigma: Vec<String>,

    /// Keep only the k branches with the lowest estimate energy.
    #[arg(long, value_name = "K")]
    top_k: Option<usize>,

    /// Simpson subintervals per segment for the solver.
    #[arg(long, value_name = "N", default_value_t = 4)]
    simpson: usize,

    /// Interpolation residual tolerance.
    #[arg(long, value_name = "X", default_value_t = 1e-10)]
    tol: f64,

    /// Curve samples per segment in the CSV output.
    #[arg(long, value_name = "M", default_value_t = 64)]
    samples: usize,

    /// Directory for JSON/CSV/SVG outputs; stdout table only when omitted.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Also write an SVG plot per branch.
    #[arg(long)]
    svg: bool,
}

fn build_request(common: &CommonArgs, mode: Mode) -> CliResult<RunRequest> {
    let text = std::fs::read_to_string(&common.input)?;
    let format = match &common.format {
        Some(name) => InputFormat::from_name(name)
            .ok_or_else(|| CliError::Request(format!("unknown format `{name}`")))?,
        None => InputFormat::from_path(&common.input),
    };
    let problem = parse_problem(&text, format)?;

    let selector = if !common.sigma.is_empty() {
        if common.all || common.top_k.is_some() {
            return Err(CliError::Request(
                "--sigma cannot be combined with --all or --top-k".into(),
            ));
        }
        BranchSelector::Explicit(
            common
                .sigma
                .iter()
                .map(|s| parse_sigma(s))
                .collect::<CliResult<_>>()?,
        )
    } else if let Some(k) = common.top_k {
        BranchSelector::TopK(k)
    } else {
        BranchSelector::All
    };

    Ok(RunRequest {
        problem,
        mode,
        selector,
        // the doubling cap must leave the quadrature error below the
        // residual tolerance; 1024 covers tight tolerances on wiggly data
        quad: QuadratureConfig {
            simpson_subintervals: common.simpson,
            max_subintervals: 1024.max(common.simpson),
        },
        solver: SolverConfig {
            residual_tol: common.tol,
            ..SolverConfig::default()
        },
        sample_count: common.samples,
        out_dir: common.out.clone(),
        svg: common.svg,
    })
}

fn execute(cli: Cli) -> CliResult<()> {
    let (common, mode) = match &cli.command {
        Command::Fit(args) => (
            &args.common,
            if args.mode == "estimate" {
                Mode::Estimate
            } else {
                Mode::Refine
            },
        ),
        Command::Optimize(common) => (common, Mode::Optimize),
        Command::Rank(common) => (common, Mode::Estimate),
    };
    let request = build_request(common, mode)?;

    let report = run(&request)?;
    let t_emit = Instant::now();
    let written = emit_outputs(&report, &request)?;
    let emit_time = t_emit.elapsed();

    print!("{}", human_table(&report));
    println!(
        "{} of {} branches succeeded (mode: {})",
        report.success_count,
        report.rows.len(),
        report.mode.name()
    );
    for (phase, took) in &report.timings {
        println!("  {phase:>9}: {took:?}");
    }
    if !written.is_empty() {
        println!("  {:>9}: {emit_time:?} ({} files)", "emit", written.len());
    }

    if report.success_count == 0 {
        let first = report
            .rows
            .iter()
            .find_map(|r| r.error.clone())
            .unwrap_or_else(|| "unknown".into());
        return Err(CliError::AllBranchesFailed(first));
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = execute(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
