//! `quorumlab` command-line tool.
//!
//! Exit codes: 0 success, 2 invalid input, 3 threshold criterion not
//! bracketed, 4 simulation disagrees with the exact value, 1 anything else.

mod format;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use quorumlab::analysis::{DEFAULT_THRESHOLD_TOL, DEFAULT_TOLERANCE, DEFAULT_WINDOW};
use quorumlab::{
    classify, estimate_success, optimal_quorum, reach_probability, success_curve,
    success_probability, threshold_scan, Criterion, QuorumError, QuorumModel, Schedule,
};

use crate::format::{sig12, Csv};

/// Agreement band for `simulate`, in standard errors.
const AGREEMENT_SIGMAS: f64 = 4.0;

#[derive(Parser)]
#[command(
    name = "quorumlab",
    version,
    about = "Success probability of quorum-sensing strategies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reach probability and success probability at a single quorum.
    Eval {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n: Quorum,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Table of (N, reach, f) for N = 1..n-max.
    Curve {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n_max: Quorum,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monotonicity class of f over the window 1..n-max.
    Classify {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        n_max: Quorum,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Smallest quorum maximizing f over 1..n-max.
    Optimum {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        n_max: Quorum,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Critical rho where the window classification flips.
    Threshold {
        #[arg(long)]
        schedule: String,
        #[arg(long)]
        criterion: String,
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        n_max: Quorum,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD_TOL)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo estimate of f, compared against the exact value.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n: Quorum,
        #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, env = "QUORUMLAB_SEED", default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// CSV data for the reference figures.
    Figure {
        #[arg(value_enum)]
        which: Figure,
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        n_max: Quorum,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

type Quorum = usize;

#[derive(Args)]
struct ModelArgs {
    /// `constant:p=<float>`, `harmonic` or `table:<p1>,<p2>,...`
    #[arg(long)]
    schedule: String,
    #[arg(long)]
    rho: f64,
}

impl ModelArgs {
    fn build(&self) -> Result<QuorumModel, Failure> {
        let schedule: Schedule = self.schedule.parse()?;
        Ok(QuorumModel::new(schedule, self.rho)?)
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Defaults to csv for tables and text for single reports.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Figure {
    Figure1,
    Figure2,
}

enum Failure {
    Invalid(String),
    Unbracketed(String),
    Other(String),
}

impl From<QuorumError> for Failure {
    fn from(e: QuorumError) -> Self {
        match e {
            QuorumError::CriterionNotBracketed { .. } => Failure::Unbracketed(e.to_string()),
            QuorumError::SimulationStuck(_) => Failure::Other(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

/// A finished command: its rendered output and exit status.
struct Rendered {
    text: String,
    code: u8,
}

impl Rendered {
    fn ok(text: String) -> Self {
        Self { text, code: 0 }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("report serializes");
    s.push('\n');
    s
}

/// `key: value` lines for text output; the same pairs make a one-row CSV.
fn scalar_report(pairs: &[(&str, String)], format: Format) -> String {
    match format {
        Format::Csv => {
            let header: Vec<&str> = pairs.iter().map(|(k, _)| *k).collect();
            let mut csv = Csv::new(&header);
            csv.row(&pairs.iter().map(|(_, v)| v.clone()).collect::<Vec<_>>());
            csv.finish()
        }
        _ => pairs.iter().map(|(k, v)| format!("{k}: {v}\n")).collect(),
    }
}

#[derive(Serialize)]
struct EvalReport {
    schedule: String,
    rho: f64,
    n: usize,
    reach: f64,
    f: f64,
}

#[derive(Serialize)]
struct CurveRow {
    #[serde(rename = "N")]
    n: usize,
    reach: f64,
    f: f64,
}

#[derive(Serialize)]
struct CurveReport {
    schedule: String,
    rho: f64,
    rows: Vec<CurveRow>,
}

#[derive(Serialize)]
struct OptimumReport {
    n_star: usize,
    f_star: f64,
    window: (usize, usize),
}

#[derive(Serialize)]
struct SimulateReport {
    schedule: String,
    rho: f64,
    n: usize,
    mean: f64,
    stderr: f64,
    trials: u64,
    seed: u64,
    successes: u64,
    exact: f64,
    agrees: bool,
}

fn cmd_eval(model: &ModelArgs, n: usize, format: Format) -> Result<Rendered, Failure> {
    let m = model.build()?;
    let reach = reach_probability(m.schedule(), n)?;
    let f = success_probability(&m, n)?;
    let report = EvalReport {
        schedule: m.schedule().to_string(),
        rho: m.rho(),
        n,
        reach,
        f,
    };
    Ok(Rendered::ok(match format {
        Format::Json => json(&report),
        _ => scalar_report(
            &[
                ("schedule", report.schedule.clone()),
                ("rho", sig12(report.rho)),
                ("N", n.to_string()),
                ("reach", sig12(reach)),
                ("f", sig12(f)),
            ],
            format,
        ),
    }))
}

fn cmd_curve(model: &ModelArgs, n_max: usize, format: Format) -> Result<Rendered, Failure> {
    let m = model.build()?;
    let curve = success_curve(&m, n_max)?;
    Ok(Rendered::ok(match format {
        Format::Json => json(&CurveReport {
            schedule: m.schedule().to_string(),
            rho: m.rho(),
            rows: curve
                .iter()
                .map(|(n, reach, f)| CurveRow { n, reach, f })
                .collect(),
        }),
        _ => {
            let mut csv = Csv::new(&["N", "reach", "f"]);
            for (n, reach, f) in curve.iter() {
                csv.row(&[n.to_string(), sig12(reach), sig12(f)]);
            }
            csv.finish()
        }
    }))
}

fn cmd_classify(
    model: &ModelArgs,
    n_max: usize,
    tolerance: f64,
    format: Format,
) -> Result<Rendered, Failure> {
    let rep = classify(&model.build()?, n_max, tolerance)?;
    Ok(Rendered::ok(match format {
        Format::Json => json(&rep),
        _ => scalar_report(
            &[
                ("class", rep.class.to_string()),
                ("argmax_n", rep.argmax_n.to_string()),
                ("max_f", sig12(rep.max_f)),
                ("window", format!("{}..{}", rep.window.0, rep.window.1)),
                ("tolerance", format!("{:e}", rep.tolerance)),
            ],
            format,
        ),
    }))
}

fn cmd_optimum(model: &ModelArgs, n_max: usize, format: Format) -> Result<Rendered, Failure> {
    let (n_star, f_star) = optimal_quorum(&model.build()?, n_max)?;
    Ok(Rendered::ok(match format {
        Format::Json => json(&OptimumReport {
            n_star,
            f_star,
            window: (1, n_max),
        }),
        _ => scalar_report(
            &[("n_star", n_star.to_string()), ("f_star", sig12(f_star))],
            format,
        ),
    }))
}

fn cmd_threshold(
    schedule: &str,
    criterion: &str,
    n_max: usize,
    tol: f64,
    format: Format,
) -> Result<Rendered, Failure> {
    let schedule: Schedule = schedule.parse()?;
    let criterion: Criterion = criterion.parse()?;
    let res = threshold_scan(&schedule, n_max, criterion, tol)?;
    Ok(Rendered::ok(match format {
        Format::Json => json(&res),
        _ => scalar_report(
            &[
                ("rho_star", sig12(res.rho_star)),
                ("bracket_lo", sig12(res.bracket.0)),
                ("bracket_hi", sig12(res.bracket.1)),
                ("criterion", res.criterion.to_string()),
            ],
            format,
        ),
    }))
}

fn cmd_simulate(
    model: &ModelArgs,
    n: usize,
    trials: u64,
    seed: u64,
    format: Format,
) -> Result<Rendered, Failure> {
    let m = model.build()?;
    let exact = success_probability(&m, n)?;
    let est = estimate_success(&m, n, trials, seed)?;
    let agrees = est.agrees_with(exact, AGREEMENT_SIGMAS);
    let report = SimulateReport {
        schedule: m.schedule().to_string(),
        rho: m.rho(),
        n,
        mean: est.mean,
        stderr: est.stderr,
        trials: est.trials,
        seed: est.seed,
        successes: est.successes,
        exact,
        agrees,
    };
    let text = match format {
        Format::Json => json(&report),
        _ => scalar_report(
            &[
                ("schedule", report.schedule.clone()),
                ("rho", sig12(report.rho)),
                ("N", n.to_string()),
                ("mean", sig12(est.mean)),
                ("stderr", sig12(est.stderr)),
                ("trials", trials.to_string()),
                ("seed", seed.to_string()),
                ("successes", est.successes.to_string()),
                ("exact", sig12(exact)),
                ("agrees", agrees.to_string()),
            ],
            format,
        ),
    };
    Ok(Rendered {
        text,
        code: if agrees { 0 } else { 4 },
    })
}

fn cmd_figure(which: Figure, n_max: usize) -> Result<Rendered, Failure> {
    match which {
        Figure::Figure1 => {
            let schedule = Schedule::constant(0.55)?;
            let low = success_curve(&QuorumModel::new(schedule.clone(), 0.17)?, n_max)?;
            let high = success_curve(&QuorumModel::new(schedule, 0.19)?, n_max)?;
            let mut csv = Csv::new(&["N", "f_rho_0.17", "f_rho_0.19"]);
            for ((n, _, a), (_, _, b)) in low.iter().zip(high.iter()) {
                csv.row(&[n.to_string(), sig12(a), sig12(b)]);
            }
            Ok(Rendered::ok(csv.finish()))
        }
        Figure::Figure2 => {
            let curve = success_curve(&QuorumModel::new(Schedule::harmonic(), 0.2)?, n_max)?;
            let mut csv = Csv::new(&["N", "f"]);
            for (n, _, f) in curve.iter() {
                csv.row(&[n.to_string(), sig12(f)]);
            }
            Ok(Rendered::ok(csv.finish()))
        }
    }
}

fn run(cli: Cli) -> (Result<Rendered, Failure>, Option<PathBuf>) {
    match cli.command {
        Command::Eval { model, n, output } => (
            cmd_eval(&model, n, output.format.unwrap_or(Format::Text)),
            output.out,
        ),
        Command::Curve {
            model,
            n_max,
            output,
        } => (
            cmd_curve(&model, n_max, output.format.unwrap_or(Format::Csv)),
            output.out,
        ),
        Command::Classify {
            model,
            n_max,
            tolerance,
            output,
        } => (
            cmd_classify(
                &model,
                n_max,
                tolerance,
                output.format.unwrap_or(Format::Text),
            ),
            output.out,
        ),
        Command::Optimum {
            model,
            n_max,
            output,
        } => (
            cmd_optimum(&model, n_max, output.format.unwrap_or(Format::Text)),
            output.out,
        ),
        Command::Threshold {
            schedule,
            criterion,
            n_max,
            tol,
            output,
        } => (
            cmd_threshold(
                &schedule,
                &criterion,
                n_max,
                tol,
                output.format.unwrap_or(Format::Text),
            ),
            output.out,
        ),
        Command::Simulate {
            model,
            n,
            trials,
            seed,
            output,
        } => (
            cmd_simulate(
                &model,
                n,
                trials,
                seed,
                output.format.unwrap_or(Format::Text),
            ),
            output.out,
        ),
        Command::Figure { which, n_max, out } => (cmd_figure(which, n_max), out),
    }
}

fn main() -> ExitCode {
    let (result, out) = run(Cli::parse());
    let rendered = match result {
        Ok(r) => r,
        Err(failure) => {
            let (code, msg) = match failure {
                Failure::Invalid(m) => (2, m),
                Failure::Unbracketed(m) => (3, m),
                Failure::Other(m) => (1, m),
            };
            eprintln!("error: {msg}");
            return ExitCode::from(code);
        }
    };
    match out {
        Some(path) => {
            if let Err(e) = fs::write(&path, &rendered.text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{}", rendered.text),
    }
    if rendered.code == 4 {
        eprintln!("error: simulation disagrees with the exact value beyond {AGREEMENT_SIGMAS} standard errors");
    }
    ExitCode::from(rendered.code)
}
