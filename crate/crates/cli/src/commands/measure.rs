use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use tangle_core::convexroof::optimize_roof;
use tangle_core::measures::{negativity, pure_concurrence, pure_tangle, realignment_measure, wootters_concurrence, wootters_tangle};
use tangle_core::certified_tangle;

use super::{emit, load_state, parse_cut, CliError, Output, RoofFlags, EXIT_OK};
use crate::report::Report;
use crate::statefile::State;

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureChoice {
    Concurrence,
    Tangle,
    Negativity,
    Realignment,
}

impl MeasureChoice {
    fn name(self) -> &'static str {
        match self {
            MeasureChoice::Concurrence => "concurrence",
            MeasureChoice::Tangle => "tangle",
            MeasureChoice::Negativity => "negativity",
            MeasureChoice::Realignment => "realignment",
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct MeasureArgs {
    /// State file (JSON).
    pub file: PathBuf,
    /// Qubits on side A of the cut, comma separated.
    #[arg(long, default_value = "0")]
    pub cut: String,
    #[arg(long, value_enum, default_value_t = MeasureChoice::Tangle)]
    pub measure: MeasureChoice,
    /// Emit the machine-readable report.
    #[arg(long)]
    #[serde(skip)]
    pub json: bool,
    #[command(flatten)]
    pub roof: RoofFlags,
}

#[derive(Debug, Serialize)]
struct MeasureOut {
    state_kind: &'static str,
    n_qubits: usize,
    measure: MeasureChoice,
    cut: String,
    value: f64,
    method: &'static str,
    /// Lower end of the bracket when the value comes from the roof optimizer.
    lower: Option<f64>,
    certified: Option<bool>,
}

pub fn run(args: &MeasureArgs, io: &mut Output<'_>) -> Result<u8, CliError> {
    let cfg = args.roof.config()?;
    let resolved = load_state(&args.file)?;
    let n = resolved.state.n_qubits();
    let cut = parse_cut(&args.cut, n)?;
    let mut lower = None;
    let mut certified = None;
    let (value, method) = match (args.measure, &resolved.state) {
        (MeasureChoice::Tangle, State::Pure(s)) => (pure_tangle(s, &cut)?.value, "pure-state closed form"),
        (MeasureChoice::Concurrence, State::Pure(s)) => (pure_concurrence(s, &cut)?.value, "pure-state closed form"),
        (MeasureChoice::Tangle, State::Mixed(rho)) if n == 2 => (wootters_tangle(rho)?.value, "Wootters concurrence squared"),
        (MeasureChoice::Concurrence, State::Mixed(rho)) if n == 2 => (wootters_concurrence(rho)?.value, "Wootters concurrence"),
        (MeasureChoice::Tangle, State::Mixed(rho)) if cut.side_a().len() == 1 => {
            let b = certified_tangle(rho, cut.side_a()[0], &cfg)?;
            lower = Some(b.lower);
            certified = Some(b.certified);
            (b.upper, "convex-roof bracket (value is the upper end)")
        }
        (MeasureChoice::Tangle, State::Mixed(rho)) => {
            certified = Some(false);
            (optimize_roof(rho, &cut, &cfg)?.upper, "convex-roof upper bound")
        }
        (MeasureChoice::Concurrence, State::Mixed(_)) => {
            return Err(CliError::usage(
                "concurrence of a mixed state is available for two qubits only; use --measure tangle",
            ))
        }
        (MeasureChoice::Negativity, state) => (negativity(&state.density(), &cut)?.value, "partial transpose trace norm"),
        (MeasureChoice::Realignment, state) => {
            (realignment_measure(&state.density(), &cut)?.value, "realigned matrix trace norm")
        }
    };
    let out = MeasureOut {
        state_kind: resolved.kind,
        n_qubits: n,
        measure: args.measure,
        cut: cut.to_string(),
        value,
        method,
        lower,
        certified,
    };
    let report = Report::new("measure", args, &cfg, &out);
    emit(io, args.json, &report, |w| {
        writeln!(w, "state: {} ({} qubits)", out.state_kind, out.n_qubits)?;
        writeln!(w, "{} across {} = {:.17}", args.measure.name(), out.cut, out.value)?;
        writeln!(w, "method: {}", out.method)?;
        if let (Some(lo), Some(c)) = (out.lower, out.certified) {
            writeln!(w, "bracket: [{lo:.17}, {:.17}], certified: {c}", out.value)?;
        }
        Ok(())
    })?;
    Ok(EXIT_OK)
}
