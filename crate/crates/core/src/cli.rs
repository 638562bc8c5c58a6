//! Command-line driver behind the `porosity` binary.
//!
//! Exit codes: 0 success, 1 output failure, 2 invalid input, 3 bit budget
//! exceeded, 4 a verification suite failed.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::constructions::{named_construction, CONSTRUCTION_NAMES};
use crate::error::Error;
use crate::gap_analysis::{default_epsilon, default_tol};
use crate::rational::ExactRational;
use crate::report::{build_report, Parameters, Stages};
use crate::set_model::{make_set_with_budget, SetSpec, DEFAULT_BIT_BUDGET};
use crate::verify::run_suite;

pub const EXIT_OK: i32 = 0;
pub const EXIT_OUTPUT: i32 = 1;
pub const EXIT_INVALID_INPUT: i32 = 2;
pub const EXIT_BIT_BUDGET: i32 = 3;
pub const EXIT_SUITE_FAILED: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "porosity",
    version,
    about = "Exact porosity analysis of null sequences accumulating at 0"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Gaps, p+, the csp verdict and the quantities M, C_E, R*, R_low.
    Analyze(SetArgs),
    /// Only the csp certificate.
    Classify(SetArgs),
    /// Write the set spec of a named construction.
    Construct {
        /// One of super-geometric, factorial, doubled, split-pair-e1, split-pair-e1-star, split-pair-union.
        name: String,
        /// Doubling factor, only for `doubled`.
        #[arg(long)]
        factor: Option<ExactRational>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sampled pretangent spaces together with C_E, R* and R_low.
    Simulate(SetArgs),
    /// Run built-in identity suites.
    Verify {
        /// csp-identities, scale-invariance, geometric, self-similarity or all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 24)]
        depth: usize,
        /// Write the suite results as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct SetArgs {
    /// JSON set spec file.
    #[arg(long)]
    set: PathBuf,
    #[arg(long, default_value_t = 32)]
    depth: usize,
    /// Admissibility threshold, e.g. 1/4.
    #[arg(long)]
    epsilon: Option<ExactRational>,
    /// Convergence tolerance, e.g. 1/65536.
    #[arg(long)]
    tol: Option<ExactRational>,
    /// Bit budget for numerators and denominators.
    #[arg(long, default_value_t = DEFAULT_BIT_BUDGET)]
    bits: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write a TSV of h and λ(E,0,h)/h.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Include per-stage wall-clock seconds in the report.
    #[arg(long)]
    timings: bool,
}

enum Failure {
    Lib(Error),
    Output(String),
    Suite,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_INVALID_INPUT } else { EXIT_OK };
        }
    };
    match dispatch(cli, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(Failure::Suite) => EXIT_SUITE_FAILED,
        Err(Failure::Output(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_OUTPUT
        }
        Err(Failure::Lib(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            match e {
                Error::BitBudgetExceeded { .. } => EXIT_BIT_BUDGET,
                _ => EXIT_INVALID_INPUT,
            }
        }
    }
}

fn dispatch(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze(a) => report(a, "analyze", Stages::Analyze, stdout),
        Command::Classify(a) => report(a, "classify", Stages::Classify, stdout),
        Command::Simulate(a) => report(a, "simulate", Stages::Simulate, stdout),
        Command::Construct { name, factor, out } => {
            if !CONSTRUCTION_NAMES.contains(&name.as_str()) {
                return Err(Error::InvalidParameter(format!(
                    "unknown construction {name}; expected one of {}",
                    CONSTRUCTION_NAMES.join(", ")
                ))
                .into());
            }
            let c = named_construction(&name, factor)?;
            let text = format!("{}\n", serde_json::to_string_pretty(c.set.spec()).map_err(Error::from)?);
            emit(out.as_deref(), &text, stdout)?;
            let m = c.expected_m.map_or("none".to_string(), |m| m.to_string());
            let _ = writeln!(
                stderr,
                "{name}: expected verdict {}, expected M {m}",
                c.expected_verdict
            );
            Ok(())
        }
        Command::Verify { suite, depth, out } => {
            let reports = run_suite(&suite, depth)?;
            for r in &reports {
                for c in &r.checks {
                    let tag = if c.passed { "PASS" } else { "FAIL" };
                    let _ = writeln!(stdout, "{tag} {}: {} ({})", r.suite, c.name, c.detail);
                }
            }
            if let Some(path) = out {
                let text = format!("{}\n", serde_json::to_string_pretty(&reports).map_err(Error::from)?);
                write_atomic(&path, &text)?;
            }
            if reports.iter().all(|r| r.passed()) {
                Ok(())
            } else {
                Err(Failure::Suite)
            }
        }
    }
}

fn report(a: SetArgs, command: &str, stages: Stages, stdout: &mut dyn Write) -> Result<(), Failure> {
    let text = std::fs::read_to_string(&a.set)
        .map_err(|e| Error::InvalidSpec(format!("cannot read {}: {e}", a.set.display())))?;
    let spec: SetSpec = serde_json::from_str(&text).map_err(|e| Error::InvalidSpec(e.to_string()))?;
    let set = make_set_with_budget(spec, a.bits)?;
    let params = Parameters {
        depth: a.depth,
        epsilon: a.epsilon.unwrap_or_else(default_epsilon),
        tol: a.tol.unwrap_or_else(default_tol),
        bit_budget: a.bits,
    };
    if !params.tol.is_positive() {
        return Err(Error::InvalidParameter("tol must be positive".into()).into());
    }
    let r = build_report(command, stages, &set, params, a.timings)?;
    if let Some(path) = &a.plot {
        write_atomic(path, &r.plot_tsv())?;
    }
    emit(a.out.as_deref(), &r.to_json()?, stdout)
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match out {
        Some(path) => write_atomic(path, text),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Output(e.to_string())),
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
fn write_atomic(path: &Path, text: &str) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let fail = |e: std::io::Error| Failure::Output(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(text.as_bytes()).map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}
