//! `fockledger state | apply | verify`.
//!
//! Exit codes: 0 success, 1 failed claims, 2 invalid input, 3 an operator
//! chain failed at some step, 4 an output file could not be written.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use super::claims::{run_claims, VerifyConfig, DEFAULT_DRAWS, DEFAULT_SEED};
use super::report::{Format, Report};
use crate::error::FockError;
use crate::families::FamilySpec;
use crate::fock::{distribution_of, CutoffPolicy};
use crate::operators::{apply_chain, OperatorKind};
use crate::statistics::{stats, StatsReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CLAIMS_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_STEP_FAILED: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "fockledger",
    version,
    about = "Photon-number statistics of truncated single-mode states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a state and print its statistics as JSON.
    State {
        /// Family spec, e.g. `negbin:xi=0.5,mu=2`.
        spec: String,
        /// Write the photon-number distribution as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the complex amplitudes as CSV.
        #[arg(long)]
        amplitudes: Option<PathBuf>,
        /// Truncation tolerance on the discarded tail mass.
        #[arg(long)]
        tail_tol: Option<f64>,
    },
    /// Apply a comma-separated operator chain (sub, add, eminus, eplus) and
    /// print the statistics after every step.
    Apply {
        spec: String,
        /// e.g. `sub,sub,eplus`
        ops: String,
        /// Write the step records here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Truncation tolerance on the discarded tail mass.
        #[arg(long)]
        tail_tol: Option<f64>,
    },
    /// Run the claim suite.
    Verify {
        /// Only claims whose id starts with this prefix.
        #[arg(long)]
        filter: Option<String>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// json, csv or md
        #[arg(long, default_value = "json")]
        format: String,
        /// Truncation tolerance on the discarded tail mass.
        #[arg(long)]
        tail_tol: Option<f64>,
        /// Random states per family.
        #[arg(long, default_value_t = DEFAULT_DRAWS)]
        draws: usize,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct StateOutput<'a> {
    spec: String,
    cutoff: usize,
    #[serde(flatten)]
    stats: &'a StatsReport,
}

#[derive(Serialize)]
struct StepOutput<'a> {
    step: usize,
    op: &'static str,
    norm_sq: f64,
    cutoff: usize,
    #[serde(flatten)]
    stats: &'a StatsReport,
}

enum Failure {
    Invalid(String),
    Step(String),
    Io(String),
    Claims(Vec<String>),
}

impl From<FockError> for Failure {
    fn from(e: FockError) -> Self {
        Failure::Invalid(e.to_string())
    }
}

fn io_failure(path: &Path) -> impl Fn(io::Error) -> Failure + '_ {
    move |e| Failure::Io(format!("{}: {e}", path.display()))
}

fn policy(tail_tol: Option<f64>) -> Result<CutoffPolicy, Failure> {
    let policy = CutoffPolicy::from_env();
    match tail_tol {
        None => Ok(policy),
        Some(t) if t > 0.0 && t < 1.0 => Ok(policy.with_tail_tol(t)),
        Some(t) => Err(Failure::Invalid(format!(
            "--tail-tol must lie in (0, 1), got {t}"
        ))),
    }
}

fn write_file(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>,
) -> Result<(), Failure> {
    let mut w = BufWriter::new(File::create(path).map_err(io_failure(path))?);
    body(&mut w)
        .and_then(|_| w.flush())
        .map_err(io_failure(path))
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), Failure> {
    match out {
        Some(path) => write_file(path, |w| w.write_all(text.as_bytes())),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(format!("stdout: {e}"))),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}

fn cmd_state(
    spec: &str,
    out: Option<&Path>,
    amplitudes: Option<&Path>,
    tail_tol: Option<f64>,
    stdout: &mut dyn Write,
) -> Result<(), Failure> {
    let spec: FamilySpec = spec.parse()?;
    let state = spec.build(&policy(tail_tol)?)?;
    let dist = distribution_of(&state)?;
    let report = stats(&dist);
    if let Some(path) = out {
        write_file(path, |w| dist.write_csv(w))?;
    }
    if let Some(path) = amplitudes {
        write_file(path, |w| state.write_csv(w))?;
    }
    let body = StateOutput {
        spec: spec.to_string(),
        cutoff: state.cutoff(),
        stats: &report,
    };
    emit(&to_json(&body), None, stdout)
}

fn cmd_apply(
    spec: &str,
    ops: &str,
    out: Option<&Path>,
    tail_tol: Option<f64>,
    stdout: &mut dyn Write,
) -> Result<(), Failure> {
    let spec: FamilySpec = spec.parse()?;
    let chain = ops
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(OperatorKind::parse)
        .collect::<Result<Vec<_>, _>>()?;
    if chain.is_empty() {
        return Err(Failure::Invalid("empty operator chain".into()));
    }
    let state = spec.build(&policy(tail_tol)?)?;
    let steps = apply_chain(&state, &chain).map_err(|e| Failure::Step(e.to_string()))?;
    let rows: Vec<StepOutput> = steps
        .iter()
        .zip(&chain)
        .enumerate()
        .map(|(i, (s, op))| StepOutput {
            step: i + 1,
            op: op.name(),
            norm_sq: s.norm_sq,
            cutoff: s.state.cutoff(),
            stats: &s.stats,
        })
        .collect();
    emit(&to_json(&rows), out, stdout)
}

fn cmd_verify(
    config: VerifyConfig,
    format: &str,
    out: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), Failure> {
    let format: Format = format.parse()?;
    let report = Report::new(&config, run_claims(&config));
    emit(&report.render(format), out, stdout)?;
    let s = &report.summary;
    let _ = writeln!(
        stderr,
        "{} claims: {} passed, {} failed, {} errors, {} skipped (seed {})",
        s.total, s.passed, s.failed, s.errors, s.skipped, config.seed
    );
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Claims(
            report.failed_ids().into_iter().map(String::from).collect(),
        ))
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                return EXIT_INVALID;
            }
            let _ = write!(stdout, "{text}");
            return EXIT_OK;
        }
    };
    let result = match cli.command {
        Command::State {
            spec,
            out,
            amplitudes,
            tail_tol,
        } => cmd_state(
            &spec,
            out.as_deref(),
            amplitudes.as_deref(),
            tail_tol,
            stdout,
        ),
        Command::Apply {
            spec,
            ops,
            out,
            tail_tol,
        } => cmd_apply(&spec, &ops, out.as_deref(), tail_tol, stdout),
        Command::Verify {
            filter,
            seed,
            format,
            tail_tol,
            draws,
            out,
        } => policy(tail_tol).and_then(|policy| {
            let config = VerifyConfig {
                seed,
                draws,
                policy,
                filter,
            };
            cmd_verify(config, &format, out.as_deref(), stdout, stderr)
        }),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Invalid(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_INVALID
        }
        Err(Failure::Step(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_STEP_FAILED
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_IO
        }
        Err(Failure::Claims(ids)) => {
            let _ = writeln!(stderr, "failed claims:");
            for id in ids {
                let _ = writeln!(stderr, "  {id}");
            }
            EXIT_CLAIMS_FAILED
        }
    }
}

/// Entry point used by the binary.
pub fn main() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
