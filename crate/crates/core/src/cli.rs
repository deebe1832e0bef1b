//! Command-line front end.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | other runtime failure (e.g. Monte Carlo precision not reached) |
//! | 2 | malformed input, spec or config; sample too small |
//! | 3 | duplicate points |
//! | 4 | dimension mismatch between input and spec |
//! | 5 | output not writable |
//!
//! Results go to standard output, messages to standard error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::diagnostics::{self, DiagnosticsOptions};
use crate::distributions::{BallMassPrecision, DistributionSpec, Sample, StructuredSample};
use crate::error::Error;
use crate::estimators;
use crate::experiments::{self, ExperimentConfig, SummaryRow};
use crate::nn::{Backend, LogPoint, PointSample};

pub const SCHEMA_VERSION: u32 = 1;
pub const THREADS_ENV: &str = "ENTROPYKIT_THREADS";

pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const INVALID_INPUT: i32 = 2;
    pub const DUPLICATES: i32 = 3;
    pub const DIMENSION_MISMATCH: i32 = 4;
    pub const UNWRITABLE: i32 = 5;
}

#[derive(Debug, Parser)]
#[command(name = "entropykit", version, about = "Nearest-neighbor differential entropy estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate the entropy (nats) of a CSV sample, one point per line.
    Estimate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Backend::Index)]
        backend: Backend,
    },
    /// Ball-mass diagnostics of a CSV sample against a known law.
    ///
    /// For the counterexample law each line holds `interval,offset`.
    Diagnose {
        #[arg(long)]
        input: PathBuf,
        /// Distribution spec as inline JSON or a path to a JSON file.
        #[arg(long)]
        spec: String,
        #[arg(long, value_enum, default_value_t = Backend::Index)]
        backend: Backend,
        /// Allow Monte Carlo ball masses (uniform cube in d > 1).
        #[arg(long)]
        monte_carlo: bool,
    },
    /// Run a JSON-configured experiment, write CSV and manifest, print a summary.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Worker threads, 0 for all cores. Falls back to ENTROPYKIT_THREADS.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Print the version.
    Version,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: exit::INVALID_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DuplicatePoints { .. } => exit::DUPLICATES,
            Error::DimensionMismatch { .. } => exit::DIMENSION_MISMATCH,
            Error::Io { .. } => exit::UNWRITABLE,
            Error::PrecisionUnachievable { .. } => exit::FAILURE,
            _ => exit::INVALID_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(err, "{e}");
                exit::INVALID_INPUT
            } else {
                let _ = write!(out, "{e}");
                exit::OK
            };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(()) => exit::OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Estimate { input, backend } => {
            let rows = read_rows(&input)?;
            let sample = PointSample::from_rows(&rows)?;
            let est = estimators::kl_entropy(&sample, backend)?;
            #[derive(Serialize)]
            struct Out {
                schema_version: u32,
                h_n: f64,
                n: usize,
                d: usize,
                backend: Backend,
                euler_mascheroni: f64,
            }
            emit(
                out,
                &Out {
                    schema_version: SCHEMA_VERSION,
                    h_n: est.value,
                    n: est.n,
                    d: est.d,
                    backend,
                    euler_mascheroni: est.euler_mascheroni,
                },
            )
        }
        Command::Diagnose {
            input,
            spec,
            backend,
            monte_carlo,
        } => {
            let spec = parse_spec(&spec)?;
            let rows = read_rows(&input)?;
            let sample = match spec.intervals() {
                Some(intervals) => Sample::Structured(StructuredSample {
                    points: log_points(&rows)?,
                    intervals,
                }),
                None => Sample::Points(PointSample::from_rows(&rows)?),
            };
            let opts = DiagnosticsOptions {
                backend,
                monte_carlo: monte_carlo.then(BallMassPrecision::default),
            };
            let report = diagnostics::diagnose(&sample, &spec, &opts)?;
            #[derive(Serialize)]
            struct Out {
                schema_version: u32,
                #[serde(flatten)]
                report: diagnostics::DiagnosticsReport,
            }
            emit(
                out,
                &Out {
                    schema_version: SCHEMA_VERSION,
                    report,
                },
            )
        }
        Command::Experiment { config, threads } => {
            let threads = match threads {
                Some(t) => t,
                None => threads_from_env()?,
            };
            let config = ExperimentConfig::from_path(&config).map_err(|e| match e {
                Error::Io { .. } => Failure::input(e.to_string()),
                e => e.into(),
            })?;
            let result = experiments::execute(&config, threads)?;
            let _ = writeln!(
                err,
                "wrote {} rows to {} and {}",
                result.rows.len(),
                result.csv_path.display(),
                result.manifest_path.display()
            );
            write_summary(out, &result.summary).map_err(|e| Failure::input(e.to_string()))
        }
        Command::Version => writeln!(out, "entropykit {}", env!("CARGO_PKG_VERSION"))
            .map_err(|e| Failure::input(e.to_string())),
    }
}

fn emit<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("output serializes");
    writeln!(out, "{text}").map_err(|e| Failure {
        code: exit::UNWRITABLE,
        message: e.to_string(),
    })
}

fn threads_from_env() -> Result<usize, Failure> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map_err(|_| Failure::input(format!("{THREADS_ENV}={v:?} is not a thread count"))),
        _ => Ok(0),
    }
}

/// Inline JSON if the argument starts with `{`, otherwise a file path.
fn parse_spec(arg: &str) -> Result<DistributionSpec, Failure> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| Failure::input(format!("cannot read spec {arg}: {e}")))?
    };
    let spec: DistributionSpec =
        serde_json::from_str(&text).map_err(|e| Failure::input(format!("invalid spec: {e}")))?;
    spec.validate()?;
    Ok(spec)
}

/// Reads one point per line. Blank lines and `#` comments are skipped.
fn read_rows(path: &Path) -> Result<Vec<Vec<f64>>, Failure> {
    let file = fs::File::open(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(file);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        let line = record.position().map_or(0, |p| p.line());
        let row = record
            .iter()
            .map(|field| {
                field
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Failure::input(format!("line {line}: {field:?} is not a finite number")))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Failure::input(format!(
                    "line {line}: expected {} values, found {}",
                    first.len(),
                    row.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Failure::input(format!("{} holds no points", path.display())));
    }
    Ok(rows)
}

fn log_points(rows: &[Vec<f64>]) -> Result<Vec<LogPoint>, Failure> {
    rows.iter()
        .enumerate()
        .map(|(i, row)| match row.as_slice() {
            &[j, u] if j >= 1.0 && j.fract() == 0.0 && j <= u32::MAX as f64 => {
                Ok(LogPoint::new(j as u32, u)?)
            }
            _ => Err(Failure::input(format!(
                "point {}: expected `interval,offset` with a positive integer interval",
                i + 1
            ))),
        })
        .collect()
}

fn fmt_value(v: f64) -> String {
    if v == 0.0 || (1e-3..1e6).contains(&v.abs()) {
        format!("{v:.6}")
    } else {
        format!("{v:.6e}")
    }
}

fn write_summary(out: &mut dyn Write, summary: &[SummaryRow]) -> std::io::Result<()> {
    writeln!(
        out,
        "{:>8} {:>6} {:>6} {:>14} {:>14} {:>14} {:>14} {:>14}",
        "n", "count", "failed", "mean_h", "median_h", "sd_h", "mean_abs_err", "median_ell"
    )?;
    let opt = |v: Option<f64>| v.map(fmt_value).unwrap_or_else(|| "-".into());
    for s in summary {
        writeln!(
            out,
            "{:>8} {:>6} {:>6} {:>14} {:>14} {:>14} {:>14} {:>14}",
            s.n,
            s.count,
            s.failed,
            fmt_value(s.mean_h),
            fmt_value(s.median_h),
            fmt_value(s.sd_h),
            opt(s.mean_abs_error),
            opt(s.median_ell)
        )?;
    }
    Ok(())
}
