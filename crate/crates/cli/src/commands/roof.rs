use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use tangle_core::certified_tangle;
use tangle_core::convexroof::EFFECTIVE_WEIGHT;

use super::{emit, load_state, CliError, Output, RoofFlags, EXIT_OK};
use crate::report::Report;
use crate::statefile::ComplexVec;

#[derive(Args, Debug, Clone, Serialize)]
pub struct RoofArgs {
    /// State file (JSON).
    pub file: PathBuf,
    /// The qubit on side A; side B is every other qubit.
    #[arg(long, default_value_t = 0)]
    pub focus: usize,
    /// Include the witnessing decomposition in the report.
    #[arg(long)]
    pub emit_witness: bool,
    /// Emit the machine-readable report.
    #[arg(long)]
    #[serde(skip)]
    pub json: bool,
    #[command(flatten)]
    pub roof: RoofFlags,
}

#[derive(Debug, Serialize)]
struct WitnessMember {
    weight: f64,
    amplitudes: ComplexVec,
}

#[derive(Debug, Serialize)]
struct RoofOut {
    state_kind: &'static str,
    n_qubits: usize,
    focus: usize,
    lower: f64,
    upper: f64,
    gap: f64,
    certified: bool,
    lower_bound_violated: bool,
    witness_members: usize,
    /// Members heavier than 1e-6.
    witness_effective_members: usize,
    witness: Option<Vec<WitnessMember>>,
}

pub fn run(args: &RoofArgs, io: &mut Output<'_>) -> Result<u8, CliError> {
    let cfg = args.roof.config()?;
    let resolved = load_state(&args.file)?;
    let n = resolved.state.n_qubits();
    if n < 2 {
        return Err(CliError::usage("the roof needs at least two qubits"));
    }
    if args.focus >= n {
        return Err(CliError::usage(format!("--focus {} out of range for {n} qubits", args.focus)));
    }
    let b = certified_tangle(&resolved.state.density(), args.focus, &cfg)?;
    let witness = args.emit_witness.then(|| {
        b.witness
            .members()
            .iter()
            .map(|m| WitnessMember { weight: m.weight, amplitudes: ComplexVec::from_complex(m.state.amplitudes()) })
            .collect()
    });
    let out = RoofOut {
        state_kind: resolved.kind,
        n_qubits: n,
        focus: args.focus,
        lower: b.lower,
        upper: b.upper,
        gap: b.gap,
        certified: b.certified,
        lower_bound_violated: b.lower_bound_violated,
        witness_members: b.witness.len(),
        witness_effective_members: b.witness.effective_len(EFFECTIVE_WEIGHT),
        witness,
    };
    let report = Report::new("roof", args, &cfg, &out);
    emit(io, args.json, &report, |w| {
        writeln!(w, "state: {} ({} qubits), focus qubit {}", out.state_kind, out.n_qubits, out.focus)?;
        writeln!(w, "tangle in [{:.17}, {:.17}], gap {:.3e}", out.lower, out.upper, out.gap)?;
        writeln!(w, "certified: {} (tolerance {:e})", out.certified, cfg.certificate_tolerance)?;
        if out.lower_bound_violated {
            writeln!(w, "warning: upper bound fell below the CKW lower bound")?;
        }
        writeln!(w, "witness: {} members, {} with weight > 1e-6", out.witness_members, out.witness_effective_members)?;
        if let Some(members) = &out.witness {
            for (i, m) in members.iter().enumerate() {
                writeln!(w, "  member {i}: weight {:.17}", m.weight)?;
            }
        }
        Ok(())
    })?;
    Ok(EXIT_OK)
}
