use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use tangle_core::monogamy::{conjecture_search, Finding, SearchConfig, SearchFamily, Verdict, SEARCH_MAX_QUBITS};

use super::monogamy::VerdictCounts;
use super::{emit, parse_qubit_list, CliError, Output, RoofFlags, EXIT_FINDING, EXIT_OK};
use crate::report::{to_json, MonogamyOut, Report};
use crate::statefile::ComplexVec;

#[derive(Args, Debug, Clone, Serialize)]
pub struct SearchArgs {
    /// Number of qubits per sampled state.
    #[arg(long)]
    pub n: usize,
    /// Block sizes after the focus qubit, e.g. `1,2`; repeat to cycle
    /// through several shapes [default: every split into two or more
    /// blocks].
    #[arg(long = "partition-shape", value_name = "SIZES")]
    pub partition_shapes: Vec<String>,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// Sample W-class states instead of unitarily invariant random states.
    #[arg(long)]
    pub w_class: bool,
    /// Also write the full JSON report to this file.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Emit the machine-readable report.
    #[arg(long)]
    #[serde(skip)]
    pub json: bool,
    #[command(flatten)]
    pub roof: RoofFlags,
}

#[derive(Debug, Serialize)]
struct FindingOut {
    sample: usize,
    partition: String,
    verdict: &'static str,
    slack: f64,
    state: ComplexVec,
    report: MonogamyOut,
}

impl From<&Finding> for FindingOut {
    fn from(f: &Finding) -> Self {
        Self {
            sample: f.sample,
            partition: f.partition.to_string(),
            verdict: f.report.verdict.name(),
            slack: f.report.slack,
            state: ComplexVec::from_complex(f.state.amplitudes()),
            report: MonogamyOut::from(&f.report),
        }
    }
}

#[derive(Debug, Serialize)]
struct SearchOut {
    n_qubits: usize,
    family: &'static str,
    shapes: Vec<Vec<usize>>,
    samples: usize,
    verdicts: VerdictCounts,
    min_slack: Option<f64>,
    violated: Vec<usize>,
    inconclusive: Vec<usize>,
    /// Every sample, most negative slack first.
    findings: Vec<FindingOut>,
}

/// Every ordered split of `total` qubits into at least two blocks; a lone
/// block when `total` is 1.
fn default_shapes(total: usize) -> Vec<Vec<usize>> {
    fn splits(rest: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            if prefix.len() >= 2 {
                out.push(prefix.clone());
            }
            return;
        }
        for size in 1..=rest {
            prefix.push(size);
            splits(rest - size, prefix, out);
            prefix.pop();
        }
    }
    if total <= 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    splits(total, &mut Vec::new(), &mut out);
    out
}

pub fn run(args: &SearchArgs, io: &mut Output<'_>) -> Result<u8, CliError> {
    let cfg = args.roof.config()?;
    if !(2..=SEARCH_MAX_QUBITS).contains(&args.n) {
        return Err(CliError::usage(format!("--n must be in 2..={SEARCH_MAX_QUBITS}, got {}", args.n)));
    }
    let shapes = if args.partition_shapes.is_empty() {
        default_shapes(args.n - 1)
    } else {
        args.partition_shapes.iter().map(|s| parse_qubit_list(s)).collect::<Result<Vec<_>, _>>()?
    };
    let search = SearchConfig {
        n_qubits: args.n,
        shapes: shapes.clone(),
        samples: args.samples,
        family: if args.w_class { SearchFamily::WClass } else { SearchFamily::Random },
        roof: cfg.clone(),
        seed: cfg.seed,
    };
    let findings = conjecture_search(&search)?;
    let mut verdicts = VerdictCounts::default();
    let (mut violated, mut inconclusive) = (Vec::new(), Vec::new());
    for f in &findings {
        verdicts.add(f.report.verdict);
        match f.report.verdict {
            Verdict::Violated => violated.push(f.sample),
            Verdict::Inconclusive => inconclusive.push(f.sample),
            _ => {}
        }
    }
    let out = SearchOut {
        n_qubits: args.n,
        family: if args.w_class { "w_class" } else { "random" },
        shapes,
        samples: args.samples,
        verdicts,
        min_slack: findings.first().map(|f| f.report.slack),
        violated,
        inconclusive,
        findings: findings.iter().map(FindingOut::from).collect(),
    };
    let doc = Report::new("search", args, &cfg, &out);
    if let Some(path) = &args.output {
        std::fs::write(path, to_json(&doc))
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))?;
    }
    emit(io, args.json, &doc, |w| {
        writeln!(w, "{} {} states on {} qubits, shapes {:?}", out.samples, out.family, out.n_qubits, out.shapes)?;
        let v = &out.verdicts;
        writeln!(w, "holds {}, saturated {}, violated {}, inconclusive {}", v.holds, v.saturated, v.violated, v.inconclusive)?;
        if let Some(s) = out.min_slack {
            writeln!(w, "min slack: {s:.6e}")?;
        }
        for f in out.findings.iter().filter(|f| f.verdict == "inconclusive" || f.verdict == "violated") {
            writeln!(
                w,
                "  {} sample {} partition {}: slack {:.3e} in [{:.3e}, {:.3e}]",
                f.verdict, f.sample, f.partition, f.slack, f.report.slack_range[0], f.report.slack_range[1]
            )?;
        }
        Ok(())
    })?;
    if !out.violated.is_empty() {
        writeln!(io.err, "certified violation found in samples {:?}", out.violated)?;
        return Ok(EXIT_FINDING);
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_shapes_cover_ordered_splits() {
        assert_eq!(default_shapes(3), vec![vec![1, 1, 1], vec![1, 2], vec![2, 1]]);
        assert_eq!(default_shapes(1), vec![vec![1]]);
        assert_eq!(default_shapes(4).len(), 7);
    }
}
