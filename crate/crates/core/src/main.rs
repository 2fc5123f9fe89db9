//! Command-line front end: generate point sets, solve single instances, and
//! drive Monte Carlo rate experiments.
//!
//! Exit codes are a stable contract for CI: 0 success, 2 input error,
//! 3 solver budget exceeded, 4 infeasible request, 5 experiment check
//! failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tourscale::density::Density;
use tourscale::experiments::{self, ExperimentConfig};
use tourscale::objectives::{evaluate_all, Tour};
use tourscale::sampling::{sample_points, Point, SampleSet};
use tourscale::schemes::{density_sweep_tour, ktsp_densest_cell, SweepOrder};
use tourscale::solvers::{exact_k_tsp, exact_power_trp, exact_tsp_path, heuristic_tsp_path};
use tourscale::Error;

const EXIT_INPUT: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_INFEASIBLE: u8 = 4;
const EXIT_CHECK_FAILED: u8 = 5;

#[derive(Parser)]
#[command(
    name = "tourscale",
    version,
    about = "Scaling experiments for k-TSP and latency tours"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a reproducible point set from a density file.
    Gen(GenArgs),
    /// Solve one instance read from a points CSV.
    Solve(SolveArgs),
    /// Run a Monte Carlo rate experiment from a JSON config.
    Rate(RateArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Density JSON file ({"m": .., "values": [..]}, weights renormalized).
    #[arg(long)]
    density: PathBuf,
    /// Number of points to draw.
    #[arg(long)]
    n: usize,
    /// Seed for the point stream.
    #[arg(long)]
    seed: u64,
    /// Output directory (points.csv + manifest.json).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemArg {
    Tsp,
    Ktsp,
    Psitrp,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Scheme,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    Empirical,
    Density,
}

#[derive(Args)]
struct SolveArgs {
    /// Points CSV with an "x,y" header.
    #[arg(long)]
    points: PathBuf,
    #[arg(long, value_enum)]
    problem: ProblemArg,
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Coverage size for the k-TSP.
    #[arg(long)]
    k: Option<usize>,
    /// Latency exponent.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Sweep grid resolution.
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Densest-cell grid scale.
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    /// Cell ordering for the sweep scheme.
    #[arg(long, value_enum, default_value_t = OrderArg::Empirical)]
    order: OrderArg,
    /// Density file for density-ordered sweeps.
    #[arg(long)]
    density: Option<PathBuf>,
    /// Affinely map the bounding box of the input into the unit square
    /// before solving.
    #[arg(long)]
    prescale: bool,
    /// Output directory (tour.json).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RateArgs {
    /// Experiment config JSON.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (rows.csv + summary.json).
    #[arg(long)]
    out: PathBuf,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::BudgetExceeded(_) => EXIT_BUDGET,
            Error::Infeasible(_) => EXIT_INFEASIBLE,
            _ => EXIT_INPUT,
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(err: std::io::Error) -> Self {
        Failure::input(err.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Rate(args) => cmd_rate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn load_density(path: &Path) -> Result<Density, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::input(format!("malformed density {}: {e}", path.display())))
}

fn points_csv(points: &[Point]) -> String {
    let mut out = String::from("x,y\n");
    for p in points {
        out.push_str(&format!("{},{}\n", p.x, p.y));
    }
    out
}

fn parse_points_csv(text: &str, path: &Path) -> Result<Vec<Point>, Failure> {
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header.trim() == "x,y" => {}
        _ => {
            return Err(Failure::input(format!(
                "{}: expected an \"x,y\" header",
                path.display()
            )))
        }
    }
    let mut points = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split(',');
        let (x, y) = match (cols.next(), cols.next(), cols.next()) {
            (Some(x), Some(y), None) => (x, y),
            _ => {
                return Err(Failure::input(format!(
                    "{}: line {} is not \"x,y\"",
                    path.display(),
                    i + 2
                )))
            }
        };
        let parse = |s: &str| -> Result<f64, Failure> {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Failure::input(format!("{}: line {}: {e}", path.display(), i + 2)))
        };
        points.push(Point::new(parse(x)?, parse(y)?));
    }
    Ok(points)
}

/// Maps the bounding box of the points onto the unit square, axis by axis.
fn prescale(points: &mut [Point]) {
    if points.is_empty() {
        return;
    }
    let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in points.iter() {
        min_x = min_x.min(p.x);
        max_x = max_x.max(p.x);
        min_y = min_y.min(p.y);
        max_y = max_y.max(p.y);
    }
    let span_x = max_x - min_x;
    let span_y = max_y - min_y;
    for p in points.iter_mut() {
        p.x = if span_x > 0.0 {
            (p.x - min_x) / span_x
        } else {
            0.5
        };
        p.y = if span_y > 0.0 {
            (p.y - min_y) / span_y
        } else {
            0.5
        };
    }
}

fn cmd_gen(args: GenArgs) -> Result<(), Failure> {
    let density = load_density(&args.density)?;
    let sample = sample_points(&density, args.n, args.seed);
    fs::create_dir_all(&args.out)?;
    fs::write(args.out.join("points.csv"), points_csv(&sample.points))?;
    let manifest = serde_json::json!({
        "schema": 1,
        "n": args.n,
        "seed": args.seed,
        "density_hash": sample.density_id,
    });
    fs::write(
        args.out.join("manifest.json"),
        serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
    )?;
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> Result<(), Failure> {
    let text = fs::read_to_string(&args.points)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", args.points.display())))?;
    let mut points = parse_points_csv(&text, &args.points)?;
    if args.prescale {
        prescale(&mut points);
    }
    let sample = SampleSet::from_points(points);
    let n = sample.len();

    let (problem_name, tour): (&str, Tour) = match (args.problem, args.mode) {
        (ProblemArg::Tsp, ModeArg::Exact) => ("tsp", exact_tsp_path(&sample)?),
        (ProblemArg::Tsp, ModeArg::Scheme) => {
            if n == 0 {
                return Err(Error::Infeasible("no points to visit".into()).into());
            }
            let all: Vec<usize> = (0..n).collect();
            ("tsp", heuristic_tsp_path(&sample, &all))
        }
        (ProblemArg::Ktsp, mode) => {
            let k = args
                .k
                .ok_or_else(|| Failure::input("--problem ktsp requires --k"))?;
            let tour = match mode {
                ModeArg::Exact => exact_k_tsp(&sample, k)?,
                ModeArg::Scheme => ktsp_densest_cell(&sample, k, args.a)?,
            };
            ("ktsp", tour)
        }
        (ProblemArg::Psitrp, ModeArg::Exact) => ("psitrp", exact_power_trp(&sample, args.alpha)?),
        (ProblemArg::Psitrp, ModeArg::Scheme) => {
            let density = match args.order {
                OrderArg::Empirical => None,
                OrderArg::Density => {
                    Some(load_density(args.density.as_deref().ok_or_else(|| {
                        Failure::input("--order density requires --density")
                    })?)?)
                }
            };
            let order = match &density {
                Some(d) => SweepOrder::KnownDensity(d),
                None => SweepOrder::EmpiricalCounts,
            };
            ("psitrp", density_sweep_tour(&sample, args.m, order)?)
        }
    };

    let objectives = evaluate_all(&sample, &tour, args.alpha)?;
    let output = serde_json::json!({
        "schema": 1,
        "problem": problem_name,
        "mode": match args.mode { ModeArg::Exact => "exact", ModeArg::Scheme => "scheme" },
        "alpha": args.alpha,
        "k": args.k,
        "order": tour.order(),
        "objectives": objectives,
    });
    fs::create_dir_all(&args.out)?;
    fs::write(
        args.out.join("tour.json"),
        serde_json::to_string_pretty(&output).expect("tour serializes"),
    )?;
    Ok(())
}

fn cmd_rate(args: RateArgs) -> Result<(), Failure> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", args.config.display())))?;
    let cfg = ExperimentConfig::from_json(&text)?;
    let report = experiments::run(&cfg)?;
    fs::create_dir_all(&args.out)?;
    fs::write(args.out.join("rows.csv"), report.rows_csv())?;
    fs::write(args.out.join("summary.json"), report.summary_json())?;
    for check in &report.checks {
        let status = if check.passed { "pass" } else { "FAIL" };
        eprintln!("check {}: {status} ({})", check.name, check.detail);
    }
    if !report.passed {
        return Err(Failure {
            code: EXIT_CHECK_FAILED,
            message: "one or more configured checks failed".into(),
        });
    }
    Ok(())
}
