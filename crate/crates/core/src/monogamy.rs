//! Monogamy checks.
//!
//! Every check compares a left-hand side (entanglement of the focus qubit
//! with everything else) against a sum of right-hand terms (entanglement of
//! the focus with each block). Terms are either exact numbers or roof
//! brackets; the verdict only claims a violation when every bracket is
//! certified.

use std::fmt;
use std::str::FromStr;

use crate::convexroof::{certified_tangle, RoofBracket, RoofConfig};
use crate::error::{invalid, Error, Result};
use crate::measures::{mixed_family_tangle, negativity, pure_tangle, realignment_measure, wootters_tangle, MeasureKind};
use crate::qstate::{normalize_qubits, DensityMatrix, PureState, QubitCut};
use crate::rng;
use crate::states::{self, block_name, MixedFamilySpec, PartitionedWSpec};

/// Default saturation tolerance: `|slack|` below this counts as equality.
pub const SATURATION_TOLERANCE: f64 = 1e-6;

/// Largest register [`conjecture_search`] accepts.
pub const SEARCH_MAX_QUBITS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub name: String,
    pub qubits: Vec<usize>,
}

/// A focus qubit plus disjoint named blocks covering every other qubit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    n_qubits: usize,
    focus: usize,
    blocks: Vec<Block>,
}

impl Partition {
    pub fn new(n_qubits: usize, focus: usize, blocks: Vec<(String, Vec<usize>)>) -> Result<Self> {
        if focus >= n_qubits {
            return Err(invalid(format!("focus {focus} out of range for {n_qubits} qubits")));
        }
        if blocks.is_empty() {
            return Err(invalid("partition needs at least one block"));
        }
        let mut seen = vec![false; n_qubits];
        seen[focus] = true;
        let mut out = Vec::with_capacity(blocks.len());
        for (name, qubits) in blocks {
            if qubits.is_empty() {
                return Err(invalid(format!("block {name:?} is empty")));
            }
            if out.iter().any(|b: &Block| b.name == name) {
                return Err(invalid(format!("block name {name:?} used twice")));
            }
            let qubits = normalize_qubits(&qubits, n_qubits)?;
            for &q in &qubits {
                if seen[q] {
                    return Err(invalid(format!("qubit {q} appears in more than one part")));
                }
                seen[q] = true;
            }
            out.push(Block { name, qubits });
        }
        if let Some(q) = seen.iter().position(|s| !s) {
            return Err(invalid(format!("qubit {q} is not covered by the partition")));
        }
        Ok(Self { n_qubits, focus, blocks: out })
    }

    /// Every non-focus qubit in its own block.
    pub fn singletons(n_qubits: usize, focus: usize) -> Result<Self> {
        let blocks = (0..n_qubits)
            .filter(|&q| q != focus)
            .enumerate()
            .map(|(i, q)| (block_name(i), vec![q]))
            .collect();
        Self::new(n_qubits, focus, blocks)
    }

    /// Focus 0 followed by consecutive blocks of the given sizes.
    pub fn from_shape(block_sizes: &[usize]) -> Result<Self> {
        let mut next = 1;
        let blocks = block_sizes
            .iter()
            .enumerate()
            .map(|(i, &size)| {
                let qubits = (next..next + size).collect();
                next += size;
                (block_name(i), qubits)
            })
            .collect();
        Self::new(next, 0, blocks)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn focus(&self) -> usize {
        self.focus
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn focus_cut(&self) -> QubitCut {
        QubitCut::single(self.focus)
    }

    /// The focus together with `block`, sorted, and the focus's position in
    /// that list.
    fn with_focus(&self, block: &Block) -> (Vec<usize>, usize) {
        let mut keep = block.qubits.clone();
        keep.push(self.focus);
        keep.sort_unstable();
        let position = keep.iter().position(|&q| q == self.focus).expect("focus is kept");
        (keep, position)
    }

    fn check_register(&self, n_qubits: usize) -> Result<()> {
        if self.n_qubits != n_qubits {
            return Err(invalid(format!(
                "partition covers {} qubits but the state has {n_qubits}",
                self.n_qubits
            )));
        }
        Ok(())
    }
}

/// `focus|block|block…` with comma-separated qubit lists, e.g. `0|1,2|3,4`.
/// The register size is the number of qubits mentioned; blocks are named
/// `B, C, D, …` in order.
impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split('|');
        let parse_list = |part: &str| -> Result<Vec<usize>> {
            part.split(',')
                .map(|t| t.trim().parse::<usize>().map_err(|_| invalid(format!("bad qubit index {t:?} in {s:?}"))))
                .collect()
        };
        let focus = parse_list(parts.next().unwrap_or_default())?;
        if focus.len() != 1 {
            return Err(invalid(format!("partition {s:?} must start with a single focus qubit")));
        }
        let blocks: Vec<(String, Vec<usize>)> = parts
            .enumerate()
            .map(|(i, part)| Ok((block_name(i), parse_list(part)?)))
            .collect::<Result<_>>()?;
        let n_qubits = 1 + blocks.iter().map(|(_, q)| q.len()).sum::<usize>();
        Self::new(n_qubits, focus[0], blocks)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.focus)?;
        for b in &self.blocks {
            let qs: Vec<String> = b.qubits.iter().map(|q| q.to_string()).collect();
            write!(f, "|{}", qs.join(","))?;
        }
        Ok(())
    }
}

/// A side of a monogamy inequality: exact, or a roof bracket.
#[derive(Debug, Clone)]
pub enum Bound {
    Exact(f64),
    Bracket(RoofBracket),
}

impl Bound {
    pub fn lower(&self) -> f64 {
        match self {
            Bound::Exact(v) => *v,
            Bound::Bracket(b) => b.lower,
        }
    }

    pub fn upper(&self) -> f64 {
        match self {
            Bound::Exact(v) => *v,
            Bound::Bracket(b) => b.upper,
        }
    }

    /// Best point estimate: the exact value, or the optimized upper bound.
    pub fn estimate(&self) -> f64 {
        self.upper()
    }

    pub fn certified(&self) -> bool {
        match self {
            Bound::Exact(_) => true,
            Bound::Bracket(b) => b.certified,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Holds,
    Saturated,
    Violated,
    Inconclusive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Saturated => "saturated",
            Verdict::Violated => "violated",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct Term {
    pub label: String,
    pub bound: Bound,
}

/// `lhs ≥ Σ rhs` for one state and one measure.
#[derive(Debug, Clone)]
pub struct MonogamyReport {
    pub measure: MeasureKind,
    pub lhs: Bound,
    pub rhs_terms: Vec<Term>,
    /// `lhs − Σ rhs` from point estimates.
    pub slack: f64,
    /// Range of the slack implied by the brackets: `(lhs.lower − Σ upper,
    /// lhs.upper − Σ lower)`.
    pub slack_range: (f64, f64),
    pub verdict: Verdict,
    pub saturation_tolerance: f64,
}

impl MonogamyReport {
    fn new(measure: MeasureKind, lhs: Bound, rhs_terms: Vec<Term>, tolerance: f64) -> Self {
        let rhs_estimate: f64 = rhs_terms.iter().map(|t| t.bound.estimate()).sum();
        let rhs_lower: f64 = rhs_terms.iter().map(|t| t.bound.lower()).sum();
        let rhs_upper: f64 = rhs_terms.iter().map(|t| t.bound.upper()).sum();
        let slack = lhs.estimate() - rhs_estimate;
        let slack_range = (lhs.lower() - rhs_upper, lhs.upper() - rhs_lower);
        let certified = lhs.certified() && rhs_terms.iter().all(|t| t.bound.certified());
        let verdict = classify(slack, slack_range, certified, tolerance);
        Self { measure, lhs, rhs_terms, slack, slack_range, verdict, saturation_tolerance: tolerance }
    }

    pub fn rhs_sum(&self) -> f64 {
        self.rhs_terms.iter().map(|t| t.bound.estimate()).sum()
    }

    pub fn certified(&self) -> bool {
        self.lhs.certified() && self.rhs_terms.iter().all(|t| t.bound.certified())
    }
}

fn classify(slack: f64, (lo, hi): (f64, f64), certified: bool, tol: f64) -> Verdict {
    if certified {
        if slack.abs() < tol {
            Verdict::Saturated
        } else if slack > 0.0 {
            Verdict::Holds
        } else {
            Verdict::Violated
        }
    } else if lo > -tol && hi < tol {
        Verdict::Saturated
    } else if lo > -tol {
        Verdict::Holds
    } else {
        Verdict::Inconclusive
    }
}

/// CKW inequality for a pure state: `τ(focus : rest) ≥ Σ_j C²(ρ_{focus,j})`.
pub fn check_ckw(state: &PureState, focus: usize) -> Result<MonogamyReport> {
    let n = state.n_qubits();
    if n < 2 {
        return Err(invalid("need at least two qubits"));
    }
    if focus >= n {
        return Err(invalid(format!("focus qubit {focus} out of range for {n} qubits")));
    }
    let lhs = pure_tangle(state, &QubitCut::single(focus))?.value;
    let rhs = (0..n)
        .filter(|&j| j != focus)
        .map(|j| {
            let pair = state.reduced(&[focus, j])?;
            Ok(Term { label: format!("{focus},{j}"), bound: Bound::Exact(wootters_tangle(&pair)?.value) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MonogamyReport::new(MeasureKind::Tangle, Bound::Exact(lhs), rhs, SATURATION_TOLERANCE))
}

/// CKW for the W/vacuum mixture: roof bracket on the left, closed-form pair
/// tangles `4|a|²|b_j|²p²` on the right.
pub fn check_ckw_mixed(spec: &MixedFamilySpec, cfg: &RoofConfig) -> Result<MonogamyReport> {
    let rho = states::mixed_family(spec);
    let lhs = certified_tangle(&rho, 0, cfg)?;
    let (a2, p) = (spec.w().a().norm_sqr(), spec.p());
    let rhs = spec
        .w()
        .b()
        .iter()
        .enumerate()
        .map(|(j, b)| Term { label: format!("0,{}", j + 1), bound: Bound::Exact(4.0 * a2 * b.norm_sqr() * p * p) })
        .collect();
    Ok(MonogamyReport::new(MeasureKind::Tangle, Bound::Bracket(lhs), rhs, SATURATION_TOLERANCE))
}

/// Tangle between qubit `focus` of `rho` and the rest: exact for two qubits
/// (squared Wootters concurrence), a certified roof bracket otherwise.
fn tangle_bound(rho: &DensityMatrix, focus: usize, cfg: &RoofConfig) -> Result<Bound> {
    if rho.n_qubits() == 2 {
        Ok(Bound::Exact(wootters_tangle(rho)?.value))
    } else {
        Ok(Bound::Bracket(certified_tangle(rho, focus, cfg)?))
    }
}

/// Partitioned monogamy `τ(A : BCD…) ≥ τ(A : B) + τ(A : C) + …` for a pure
/// state, each block term a roof bracket of the reduced state on the focus
/// plus that block.
pub fn check_generalized(state: &PureState, partition: &Partition, cfg: &RoofConfig) -> Result<MonogamyReport> {
    partition.check_register(state.n_qubits())?;
    let lhs = pure_tangle(state, &partition.focus_cut())?.value;
    let rhs = partition
        .blocks()
        .iter()
        .map(|block| {
            let (keep, position) = partition.with_focus(block);
            let reduced = state.reduced(&keep)?;
            Ok(Term { label: block.name.clone(), bound: tangle_bound(&reduced, position, cfg)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MonogamyReport::new(MeasureKind::Tangle, Bound::Exact(lhs), rhs, SATURATION_TOLERANCE))
}

/// Partitioned monogamy for a mixed state; the left-hand side is also a
/// roof bracket.
pub fn check_generalized_mixed(rho: &DensityMatrix, partition: &Partition, cfg: &RoofConfig) -> Result<MonogamyReport> {
    partition.check_register(rho.n_qubits())?;
    let lhs = tangle_bound(rho, partition.focus(), cfg)?;
    let rhs = partition
        .blocks()
        .iter()
        .map(|block| {
            let (keep, position) = partition.with_focus(block);
            let reduced = crate::qstate::partial_trace(rho, &keep)?;
            Ok(Term { label: block.name.clone(), bound: tangle_bound(&reduced, position, cfg)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MonogamyReport::new(MeasureKind::Tangle, lhs, rhs, SATURATION_TOLERANCE))
}

/// Partitioned monogamy for a partitioned W state using closed forms only:
/// each block's reduced state is a W/vacuum mixture whose tangle is
/// `4p²|a|²Σ|b_j|²`.
pub fn check_generalized_analytic(spec: &PartitionedWSpec) -> Result<MonogamyReport> {
    let (state, partition) = states::w_partitioned(spec)?;
    let lhs = pure_tangle(&state, &partition.focus_cut())?.value;
    let rhs = spec
        .blocks()
        .iter()
        .map(|block| {
            let value = match states::reduced_block_analytic(spec, &block.name) {
                Ok(mixed) => mixed_family_tangle(&mixed).value,
                // the reduced state is |0…0⟩, a product state
                Err(Error::DegenerateSpec(_)) => 0.0,
                Err(e) => return Err(e),
            };
            Ok(Term { label: block.name.clone(), bound: Bound::Exact(value) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MonogamyReport::new(MeasureKind::Tangle, Bound::Exact(lhs), rhs, SATURATION_TOLERANCE))
}

/// Residual (higher) tangle `τ(A : rest) − Σ_blocks τ(A : block)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Residual tangle of a pure state over `partition`; with singleton blocks
/// on three qubits this is the three-tangle.
pub fn residual_tangle(state: &PureState, partition: &Partition, cfg: &RoofConfig) -> Result<Residual> {
    let report = check_generalized(state, partition, cfg)?;
    Ok(Residual { estimate: report.slack, lower: report.slack_range.0, upper: report.slack_range.1 })
}

/// `M²(ψ, A : rest) ≥ Σ_blocks M²(ρ_{A,block})` for `M` negativity or the
/// realignment measure. Squares are compared, never raw values.
pub fn check_measure_monogamy(state: &PureState, partition: &Partition, kind: MeasureKind) -> Result<MonogamyReport> {
    partition.check_register(state.n_qubits())?;
    let measure = |rho: &DensityMatrix, cut: &QubitCut| -> Result<f64> {
        let v = match kind {
            MeasureKind::Negativity => negativity(rho, cut)?.value,
            MeasureKind::Realignment => realignment_measure(rho, cut)?.value,
            other => return Err(invalid(format!("measure monogamy supports negativity and realignment, not {other}"))),
        };
        Ok(v * v)
    };
    let lhs = measure(&state.projector(), &partition.focus_cut())?;
    let rhs = partition
        .blocks()
        .iter()
        .map(|block| {
            let (keep, position) = partition.with_focus(block);
            let reduced = state.reduced(&keep)?;
            Ok(Term { label: block.name.clone(), bound: Bound::Exact(measure(&reduced, &QubitCut::single(position))?) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MonogamyReport::new(kind, Bound::Exact(lhs), rhs, SATURATION_TOLERANCE))
}

/// Where [`conjecture_search`] draws its states from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchFamily {
    /// Unitarily invariant random pure states.
    Random,
    /// Random W-class states.
    WClass,
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub n_qubits: usize,
    /// Block sizes; sample `i` uses `shapes[i % shapes.len()]`.
    pub shapes: Vec<Vec<usize>>,
    pub samples: usize,
    pub family: SearchFamily,
    pub roof: RoofConfig,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct Finding {
    pub sample: usize,
    pub partition: Partition,
    pub state: PureState,
    pub report: MonogamyReport,
}

/// Runs [`check_generalized`] on seeded random states and returns the
/// reports ordered by slack (most negative first, ties by sample index).
pub fn conjecture_search(cfg: &SearchConfig) -> Result<Vec<Finding>> {
    if cfg.n_qubits < 2 || cfg.n_qubits > SEARCH_MAX_QUBITS {
        return Err(invalid(format!("search supports 2..={SEARCH_MAX_QUBITS} qubits, got {}", cfg.n_qubits)));
    }
    if cfg.shapes.is_empty() {
        return Err(invalid("at least one partition shape is required"));
    }
    let partitions = cfg
        .shapes
        .iter()
        .map(|shape| {
            let p = Partition::from_shape(shape)?;
            if p.n_qubits() != cfg.n_qubits {
                return Err(invalid(format!("shape {shape:?} does not cover {} qubits", cfg.n_qubits)));
            }
            Ok(p)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut findings = (0..cfg.samples)
        .map(|sample| {
            let mut rng = rng::stream(cfg.seed, sample as u64);
            let state = match cfg.family {
                SearchFamily::Random => states::random_pure_with(cfg.n_qubits, &mut rng)?,
                SearchFamily::WClass => states::w_class(&states::random_w_class(cfg.n_qubits, &mut rng)?),
            };
            let partition = partitions[sample % partitions.len()].clone();
            let report = check_generalized(&state, &partition, &cfg.roof)?;
            Ok(Finding { sample, partition, state, report })
        })
        .collect::<Result<Vec<_>>>()?;
    findings.sort_by(|a, b| a.report.slack.total_cmp(&b.report.slack).then(a.sample.cmp(&b.sample)));
    Ok(findings)
}
