use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use tangle_core::monogamy::{
    check_generalized, check_generalized_mixed, check_measure_monogamy, MonogamyReport, Verdict, SEARCH_MAX_QUBITS,
};
use tangle_core::states::random_pure_with;
use tangle_core::{rng, MeasureKind, Partition, PureState, RoofConfig};

use super::{emit, load_state, CliError, MonogamyKind, Output, RoofFlags, EXIT_FINDING, EXIT_OK};
use crate::report::{MonogamyOut, Report};
use crate::statefile::{Family, State};

#[derive(Args, Debug, Clone, Serialize)]
pub struct MonogamyArgs {
    /// State file (JSON); omit when using --random.
    #[arg(required_unless_present = "random", conflicts_with = "random")]
    pub file: Option<PathBuf>,
    /// Focus then `|`-separated blocks, e.g. `0|1,2|3,4` [default: the
    /// file's own blocks for partitioned_w, otherwise focus 0 with one
    /// block per qubit].
    #[arg(long)]
    pub partition: Option<String>,
    #[arg(long, value_enum, default_value_t = MonogamyKind::Tangle)]
    pub kind: MonogamyKind,
    /// Sweep over random pure states on this many qubits instead of a file.
    #[arg(long, value_name = "N")]
    pub random: Option<usize>,
    /// Number of states in a --random sweep.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Emit the machine-readable report.
    #[arg(long)]
    #[serde(skip)]
    pub json: bool,
    #[command(flatten)]
    pub roof: RoofFlags,
}

#[derive(Debug, Serialize)]
struct FileOut {
    state_kind: &'static str,
    n_qubits: usize,
    partition: String,
    report: MonogamyOut,
}

#[derive(Debug, Default, Serialize)]
pub(crate) struct VerdictCounts {
    pub holds: usize,
    pub saturated: usize,
    pub violated: usize,
    pub inconclusive: usize,
}

impl VerdictCounts {
    pub fn add(&mut self, v: Verdict) {
        match v {
            Verdict::Holds => self.holds += 1,
            Verdict::Saturated => self.saturated += 1,
            Verdict::Violated => self.violated += 1,
            Verdict::Inconclusive => self.inconclusive += 1,
        }
    }
}

#[derive(Debug, Serialize)]
struct SweepOut {
    n_qubits: usize,
    partition: String,
    samples: usize,
    min_slack: Option<f64>,
    min_slack_sample: Option<usize>,
    verdicts: VerdictCounts,
    violated_samples: Vec<usize>,
    inconclusive_samples: Vec<usize>,
}

fn check_pure(state: &PureState, partition: &Partition, kind: MonogamyKind, cfg: &RoofConfig) -> Result<MonogamyReport, CliError> {
    Ok(match kind {
        MonogamyKind::Tangle => check_generalized(state, partition, cfg)?,
        MonogamyKind::Negativity => check_measure_monogamy(state, partition, MeasureKind::Negativity)?,
        MonogamyKind::Realignment => check_measure_monogamy(state, partition, MeasureKind::Realignment)?,
    })
}

fn parse_partition(text: &str, n_qubits: usize) -> Result<Partition, CliError> {
    let p: Partition = text.parse()?;
    if p.n_qubits() != n_qubits {
        return Err(CliError::usage(format!("partition {text:?} covers {} qubits, the state has {n_qubits}", p.n_qubits())));
    }
    Ok(p)
}

pub fn run(args: &MonogamyArgs, io: &mut Output<'_>) -> Result<u8, CliError> {
    let cfg = args.roof.config()?;
    match (&args.file, args.random) {
        (Some(file), None) => run_file(args, file, &cfg, io),
        (None, Some(n)) => run_sweep(args, n, &cfg, io),
        _ => Err(CliError::usage("give either a state file or --random N")),
    }
}

fn run_file(args: &MonogamyArgs, file: &std::path::Path, cfg: &RoofConfig, io: &mut Output<'_>) -> Result<u8, CliError> {
    let resolved = load_state(file)?;
    let n = resolved.state.n_qubits();
    if n < 2 {
        return Err(CliError::usage("monogamy needs at least two qubits"));
    }
    let partition = match (&args.partition, &resolved.family) {
        (Some(text), _) => parse_partition(text, n)?,
        (None, Family::PartitionedW(_, p)) => p.clone(),
        (None, _) => Partition::singletons(n, 0)?,
    };
    let report = match (&resolved.state, args.kind) {
        (State::Pure(s), kind) => check_pure(s, &partition, kind, cfg)?,
        (State::Mixed(rho), MonogamyKind::Tangle) => check_generalized_mixed(rho, &partition, cfg)?,
        (State::Mixed(_), _) => {
            return Err(CliError::usage("negativity and realignment monogamy need a pure state"));
        }
    };
    let out = FileOut {
        state_kind: resolved.kind,
        n_qubits: n,
        partition: partition.to_string(),
        report: MonogamyOut::from(&report),
    };
    let doc = Report::new("monogamy", args, cfg, &out);
    emit(io, args.json, &doc, |w| {
        let r = &out.report;
        writeln!(w, "state: {} ({} qubits), partition {}", out.state_kind, out.n_qubits, out.partition)?;
        let squared = if r.measure == "tangle" { "" } else { "²" };
        writeln!(w, "lhs ({}{squared}): {:.17}", r.measure, r.lhs.estimate)?;
        for t in &r.terms {
            writeln!(w, "  term {}: {:.17} (certified: {})", t.label, t.bound.estimate, t.bound.certified)?;
        }
        writeln!(w, "slack: {:.3e} in [{:.3e}, {:.3e}]", r.slack, r.slack_range[0], r.slack_range[1])?;
        writeln!(w, "verdict: {}", r.verdict)
    })?;
    finish(io, report.verdict)
}

fn finish(io: &mut Output<'_>, verdict: Verdict) -> Result<u8, CliError> {
    match verdict {
        Verdict::Violated => {
            writeln!(io.err, "certified violation found")?;
            Ok(EXIT_FINDING)
        }
        Verdict::Inconclusive => {
            writeln!(io.err, "warning: inconclusive; the roof brackets are too wide to decide")?;
            Ok(EXIT_OK)
        }
        _ => Ok(EXIT_OK),
    }
}

fn run_sweep(args: &MonogamyArgs, n: usize, cfg: &RoofConfig, io: &mut Output<'_>) -> Result<u8, CliError> {
    if !(2..=SEARCH_MAX_QUBITS).contains(&n) {
        return Err(CliError::usage(format!("--random supports 2..={SEARCH_MAX_QUBITS} qubits, got {n}")));
    }
    let partition = match &args.partition {
        Some(text) => parse_partition(text, n)?,
        None => Partition::singletons(n, 0)?,
    };
    let mut verdicts = VerdictCounts::default();
    let mut min: Option<(f64, usize)> = None;
    let (mut violated, mut inconclusive) = (Vec::new(), Vec::new());
    for sample in 0..args.samples {
        let state = random_pure_with(n, &mut rng::stream(cfg.seed, sample as u64))?;
        let r = check_pure(&state, &partition, args.kind, cfg)?;
        verdicts.add(r.verdict);
        match r.verdict {
            Verdict::Violated => violated.push(sample),
            Verdict::Inconclusive => inconclusive.push(sample),
            _ => {}
        }
        if min.map_or(true, |(s, _)| r.slack < s) {
            min = Some((r.slack, sample));
        }
    }
    let out = SweepOut {
        n_qubits: n,
        partition: partition.to_string(),
        samples: args.samples,
        min_slack: min.map(|m| m.0),
        min_slack_sample: min.map(|m| m.1),
        verdicts,
        violated_samples: violated,
        inconclusive_samples: inconclusive,
    };
    let doc = Report::new("monogamy", args, cfg, &out);
    emit(io, args.json, &doc, |w| {
        writeln!(w, "{} random {}-qubit pure states, partition {}", out.samples, out.n_qubits, out.partition)?;
        match (out.min_slack, out.min_slack_sample) {
            (Some(s), Some(i)) => writeln!(w, "min slack: {s:.6e} (sample {i})")?,
            _ => writeln!(w, "min slack: none (no samples)")?,
        }
        let v = &out.verdicts;
        writeln!(w, "holds {}, saturated {}, violated {}, inconclusive {}", v.holds, v.saturated, v.violated, v.inconclusive)?;
        if !out.inconclusive_samples.is_empty() {
            writeln!(w, "inconclusive samples: {:?}", out.inconclusive_samples)?;
        }
        Ok(())
    })?;
    if !out.violated_samples.is_empty() {
        return finish(io, Verdict::Violated);
    }
    if !out.inconclusive_samples.is_empty() {
        return finish(io, Verdict::Inconclusive);
    }
    Ok(EXIT_OK)
}
