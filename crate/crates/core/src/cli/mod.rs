//! The `splitvi` command line: load a TOML problem file, solve it, and print a
//! JSON report (optionally with a CSV trace).
//!
//! Exit codes: 0 converged, 1 runtime failure, 2 iteration cap reached,
//! 3 step-size bound violated, 4 unreadable or invalid problem file.

mod build;
mod output;
mod schema;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::error::{ConfigViolation, Error};
use crate::report::Status;

pub use build::{build, start, Bounds, Extra, Problem, RunOutcome, Settings, Start};
pub use output::{rejected_json, report_json, settings_json, write_trace};
pub use schema::{ComponentSpec, ConfigSpec, FieldSpec, Kind, ProblemFile, SetSpec};

pub const EXIT_CONVERGED: u8 = 0;
pub const EXIT_RUNTIME: u8 = 1;
pub const EXIT_MAX_ITER: u8 = 2;
pub const EXIT_REJECTED: u8 = 3;
pub const EXIT_INVALID: u8 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid problem: {0}")]
    Invalid(String),
    #[error("rejected configuration: {0}")]
    Rejected(ConfigViolation),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    /// Maps a library error raised while building a problem.
    pub(crate) fn from_build(e: Error) -> Self {
        match e {
            Error::Config(v) => CliError::Rejected(v),
            other => CliError::Invalid(other.to_string()),
        }
    }

    /// Maps a library error raised while configuring or running a solver.
    fn from_solve(e: Error) -> Self {
        match e {
            Error::Config(v) => CliError::Rejected(v),
            Error::Diverged { .. } => CliError::Runtime(e.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Parse(_) | CliError::Invalid(_) => EXIT_INVALID,
            CliError::Rejected(_) => EXIT_REJECTED,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

/// A parsed and validated problem file. `file` has every default made explicit
/// except the step sizes, which are reported in `settings`.
#[derive(Debug)]
pub struct Loaded {
    pub file: ProblemFile,
    pub problem: Problem,
    pub start: Start,
}

/// Command-line overrides of `[config]`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub gamma: Option<f64>,
    pub lambda: Option<f64>,
}

impl Overrides {
    fn apply(&self, file: &mut ProblemFile) {
        let c = &mut file.config;
        c.tol = self.tol.or(c.tol);
        c.max_iter = self.max_iter.or(c.max_iter);
        c.gamma = self.gamma.or(c.gamma);
        c.lambda = self.lambda.or(c.lambda);
    }
}

fn fill_defaults(file: &mut ProblemFile, start: &Start) {
    file.x0 = Some(start.x0.as_slice().to_vec());
    file.config.tol.get_or_insert(crate::report::DEFAULT_TOL);
    file.config.max_iter.get_or_insert(crate::report::DEFAULT_MAX_ITER);
}

pub fn parse_problem(text: &str, overrides: &Overrides) -> Result<Loaded, CliError> {
    let mut file = ProblemFile::from_toml_str(text)?;
    overrides.apply(&mut file);
    let problem = build(&file)?;
    let start = start(&file)?;
    fill_defaults(&mut file, &start);
    Ok(Loaded { file, problem, start })
}

pub fn load_problem(path: &Path, overrides: &Overrides) -> Result<Loaded, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_problem(&text, overrides)
}

impl Loaded {
    pub fn settings(&self) -> Result<Settings, CliError> {
        self.problem.settings().map_err(CliError::from_solve)
    }

    pub fn run(&self) -> Result<RunOutcome, CliError> {
        self.problem.run(&self.start).map_err(CliError::from_solve)
    }
}

#[derive(Debug, Parser)]
#[command(name = "splitvi", version, about = "Projection solvers for split variational inequalities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a problem file and print the JSON report.
    Solve {
        path: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        /// Write the per-iteration trace as CSV.
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Check a problem file, including step-size bounds, without solving.
    Validate { path: PathBuf },
    /// Print the power-iteration estimate of λ_max(AᵀA) and the resulting bounds.
    EstimateL { path: PathBuf },
}

fn print_json(v: &serde_json::Value) {
    let text = serde_json::to_string_pretty(v).expect("JSON values serialize");
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn fail(e: &CliError) -> u8 {
    eprintln!("error: {e}");
    e.exit_code()
}

fn solve(path: &Path, overrides: &Overrides, trace_out: Option<&Path>) -> u8 {
    let loaded = match load_problem(path, overrides) {
        Ok(l) => l,
        Err(e) => return fail(&e),
    };
    let kind = loaded.file.kind;
    let settings = match loaded.settings() {
        Ok(s) => s,
        Err(CliError::Rejected(v)) => {
            print_json(&rejected_json(kind, &v.to_string()));
            eprintln!("error: rejected configuration: {v}");
            return EXIT_REJECTED;
        }
        Err(e) => return fail(&e),
    };
    let outcome = match loaded.run() {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    if let Some(p) = trace_out {
        let written = fs::File::create(p)
            .map_err(|e| e.to_string())
            .and_then(|f| write_trace(&outcome.report, f).map_err(|e| e.to_string()));
        if let Err(e) = written {
            return fail(&CliError::Runtime(format!("cannot write trace to {}: {e}", p.display())));
        }
    }
    print_json(&report_json(kind, &settings, &outcome));
    match outcome.report.status {
        Status::Converged => EXIT_CONVERGED,
        Status::MaxIter => EXIT_MAX_ITER,
        Status::RejectedConfig => EXIT_REJECTED,
    }
}

fn validate(path: &Path) -> u8 {
    let loaded = match load_problem(path, &Overrides::default()) {
        Ok(l) => l,
        Err(e) => return fail(&e),
    };
    match loaded.settings() {
        Ok(s) => {
            print_json(&serde_json::json!({
                "kind": loaded.file.kind.as_str(),
                "valid": true,
                "settings": settings_json(&s),
            }));
            EXIT_CONVERGED
        }
        Err(CliError::Rejected(v)) => {
            print_json(&rejected_json(loaded.file.kind, &v.to_string()));
            eprintln!("error: rejected configuration: {v}");
            EXIT_REJECTED
        }
        Err(e) => fail(&e),
    }
}

fn estimate_l(path: &Path) -> u8 {
    let loaded = match load_problem(path, &Overrides::default()) {
        Ok(l) => l,
        Err(e) => return fail(&e),
    };
    let b = loaded.problem.bounds();
    print_json(&serde_json::json!({
        "kind": loaded.file.kind.as_str(),
        "spectral": b.spectral.as_ref().map(output::spectral_json),
        "lipschitz_bound": b.lipschitz_bound,
        "kappa": b.kappa,
    }));
    EXIT_CONVERGED
}

pub fn execute(cli: Cli) -> u8 {
    match cli.command {
        Command::Solve {
            path,
            tol,
            max_iter,
            gamma,
            lambda,
            trace_out,
        } => {
            let overrides = Overrides {
                tol,
                max_iter,
                gamma,
                lambda,
            };
            solve(&path, &overrides, trace_out.as_deref())
        }
        Command::Validate { path } => validate(&path),
        Command::EstimateL { path } => estimate_l(&path),
    }
}

pub fn main() -> ExitCode {
    ExitCode::from(execute(Cli::parse()))
}
