//! Command-line definitions and dispatch.

use std::fmt;
use std::io::{self, Write};
use std::path::Path;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use tangle_core::{QubitCut, RoofConfig};

use crate::statefile::{Resolved, StateFile};

mod measure;
mod monogamy;
pub mod repro;
mod roof;
mod search;

/// Exit status for a successful run.
pub const EXIT_OK: u8 = 0;
/// A certified monogamy violation was found, or a reproduction claim failed.
pub const EXIT_FINDING: u8 = 1;
/// Bad flags, unreadable or invalid input, or limits exceeded.
pub const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "tangle", version, about = "Entanglement measures, convex-roof tangle certificates and monogamy checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a bipartite entanglement measure across a cut.
    Measure(measure::MeasureArgs),
    /// Bracket the tangle between one qubit and the rest of a state.
    Roof(roof::RoofArgs),
    /// Check a monogamy inequality for a state file or a random sweep.
    Monogamy(monogamy::MonogamyArgs),
    /// Recompute the worked example and the mixed-family results.
    PaperRepro(repro::ReproArgs),
    /// Look for violations of partitioned monogamy on random states.
    Search(search::SearchArgs),
}

/// Optimizer flags shared by every command that may run the roof optimizer.
#[derive(Args, Debug, Clone, Serialize)]
pub struct RoofFlags {
    /// Random restarts of the decomposition optimizer.
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    /// Members per trial decomposition [default: min(r², r + 2) for rank r].
    #[arg(long)]
    pub ensemble_size: Option<usize>,
    /// A roof bracket narrower than this counts as certified.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Sweep limit per restart.
    #[arg(long, default_value_t = 500)]
    pub max_iterations: usize,
    /// Seed for every random choice in the run.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl RoofFlags {
    pub fn config(&self) -> Result<RoofConfig, CliError> {
        if self.restarts == 0 {
            return Err(CliError::usage("--restarts must be at least 1"));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::usage("--tol must be a positive number"));
        }
        if self.max_iterations == 0 {
            return Err(CliError::usage("--max-iterations must be at least 1"));
        }
        Ok(RoofConfig {
            ensemble_size: self.ensemble_size,
            restarts: self.restarts,
            max_iterations: self.max_iterations,
            certificate_tolerance: self.tol,
            seed: self.seed,
            ..RoofConfig::default()
        })
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MonogamyKind {
    Tangle,
    Negativity,
    Realignment,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(io::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        EXIT_USAGE
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Io(e) => write!(f, "I/O error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<tangle_core::Error> for CliError {
    fn from(e: tangle_core::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// Where a command writes: the document on `out`, diagnostics on `err`.
pub struct Output<'a> {
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

/// Runs one parsed command line and returns its exit code.
pub fn run(cli: Cli, io: &mut Output<'_>) -> Result<u8, CliError> {
    let start = Instant::now();
    let (code, json) = match cli.command {
        Command::Measure(a) => (measure::run(&a, io)?, a.json),
        Command::Roof(a) => (roof::run(&a, io)?, a.json),
        Command::Monogamy(a) => (monogamy::run(&a, io)?, a.json),
        Command::PaperRepro(a) => (repro::run(&a, io)?, a.json),
        Command::Search(a) => (search::run(&a, io)?, a.json),
    };
    // wall time is kept out of JSON documents so reruns compare byte for byte
    let elapsed = start.elapsed().as_secs_f64();
    if json {
        writeln!(io.err, "wall time: {elapsed:.3} s")?;
    } else {
        writeln!(io.out, "wall time: {elapsed:.3} s")?;
    }
    Ok(code)
}

pub(crate) fn load_state(path: &Path) -> Result<Resolved, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    StateFile::load(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

/// `"0,2"` → cut with side A `{0, 2}`.
pub(crate) fn parse_qubit_list(text: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| CliError::usage(format!("bad qubit index {t:?} in {text:?}"))))
        .collect()
}

pub(crate) fn parse_cut(text: &str, n_qubits: usize) -> Result<QubitCut, CliError> {
    let cut = QubitCut::new(parse_qubit_list(text)?)?;
    cut.check(n_qubits)?;
    Ok(cut)
}

pub(crate) fn emit<T: Serialize>(io: &mut Output<'_>, json: bool, report: &T, human: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<(), CliError> {
    if json {
        io.out.write_all(crate::report::to_json(report).as_bytes())?;
    } else {
        human(io.out)?;
    }
    Ok(())
}
