//! Recomputes every numeric result of the W-family analysis: the five-qubit
//! example, the mixed-family tangle and its saturation of CKW, partitioned
//! W saturation, and the negativity/realignment monogamy relations, plus a
//! tangle-versus-p table for the three-qubit mixed family.

use clap::Args;
use serde::Serialize;
use tangle_core::convexroof::{ensemble_average_tangle, EFFECTIVE_WEIGHT};
use tangle_core::measures::{
    mixed_family_tangle, negativity, pure_tangle, realignment_measure, wootters_concurrence, wootters_tangle,
};
use tangle_core::monogamy::{
    check_ckw, check_ckw_mixed, check_generalized, check_generalized_analytic, check_measure_monogamy, Bound, Verdict,
};
use tangle_core::qstate::partial_trace;
use tangle_core::rng::{self, Rng};
use tangle_core::states::{
    mixed_family, random_mixed_with, random_partitioned_w, random_pure_with, random_w_class, trial_ensemble, w_class,
};
use tangle_core::{certified_tangle, MeasureKind, MixedFamilySpec, Partition, QubitCut, Result, RoofConfig, WClassSpec};

use super::{emit, CliError, Output, RoofFlags, EXIT_FINDING, EXIT_OK};
use crate::report::Report;

#[derive(Args, Debug, Clone, Serialize)]
pub struct ReproArgs {
    /// Emit the machine-readable report.
    #[arg(long)]
    #[serde(skip)]
    pub json: bool,
    #[command(flatten)]
    pub roof: RoofFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `|observed − expected| ≤ tolerance`
    Eq,
    /// `observed ≥ expected − tolerance`
    Ge,
    /// `observed > expected`
    Gt,
    /// `observed ≤ expected + tolerance`
    Le,
}

#[derive(Debug, Clone, Serialize)]
pub struct Claim {
    pub id: &'static str,
    pub statement: &'static str,
    /// How the observed value is obtained.
    pub basis: &'static str,
    pub relation: Relation,
    pub expected: f64,
    pub observed: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub p: f64,
    pub closed_form: f64,
    pub lower: f64,
    pub upper: f64,
    pub gap: f64,
    pub certified: bool,
    pub pair_sum: f64,
    pub slack: f64,
    pub witness_effective_members: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReproOut {
    pub claims: Vec<Claim>,
    pub passed: usize,
    pub failed: usize,
    pub table_family: &'static str,
    pub table: Vec<TableRow>,
}

struct Claims(Vec<Claim>);

impl Claims {
    #[allow(clippy::too_many_arguments)]
    fn push(
        &mut self,
        id: &'static str,
        statement: &'static str,
        basis: &'static str,
        relation: Relation,
        expected: f64,
        observed: f64,
        tolerance: f64,
        extra: bool,
    ) {
        let ok = match relation {
            Relation::Eq => (observed - expected).abs() <= tolerance,
            Relation::Ge => observed >= expected - tolerance,
            Relation::Gt => observed > expected,
            Relation::Le => observed <= expected + tolerance,
        };
        let pass = ok && extra && observed.is_finite();
        self.0.push(Claim { id, statement, basis, relation, expected, observed, tolerance, pass });
    }
}

/// Sample streams; one block of indices per claim so claims never share draws.
const PAIR_STREAMS: u64 = 1_000;
const W_CKW_STREAMS: u64 = 2_000;
const PARTITION_STREAMS: u64 = 3_000;
const MEASURE_STREAMS: u64 = 4_000;
const ORDERING_STREAMS: u64 = 5_000;

fn stream(cfg: &RoofConfig, base: u64, k: usize) -> Rng {
    rng::stream(cfg.seed, base + k as u64)
}

fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn min_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::INFINITY, f64::min)
}

pub fn reproduce(cfg: &RoofConfig) -> Result<ReproOut> {
    let mut claims = Claims(Vec::new());
    let tol = cfg.certificate_tolerance;

    // five-qubit example
    let w5 = w_class(&WClassSpec::uniform(5)?);
    let w3 = WClassSpec::uniform(3)?;
    let block = MixedFamilySpec::new(w3.clone(), 0.6)?;
    claims.push(
        "five_qubit_full_cut",
        "tangle of the uniform 5-qubit W state between qubit 0 and the rest is 16/25",
        "closed form 4 det ρ_A",
        Relation::Eq,
        16.0 / 25.0,
        pure_tangle(&w5, &QubitCut::single(0))?.value,
        1e-12,
        true,
    );
    let reduced = w5.reduced(&[0, 1, 2])?;
    claims.push(
        "five_qubit_block_state",
        "the reduced state on qubit 0 and a two-qubit block is 3/5 |W'><W'| + 2/5 |000><000|",
        "Frobenius distance to the partial trace",
        Relation::Eq,
        0.0,
        reduced.distance(mixed_family(&block).matrix()),
        1e-12,
        true,
    );
    claims.push(
        "five_qubit_pair_bound",
        "twice the tangle between qubit 0 and one other qubit is 8/25",
        "Wootters concurrence of the two-qubit reduced state",
        Relation::Eq,
        8.0 / 25.0,
        2.0 * wootters_tangle(&w5.reduced(&[0, 1])?)?.value,
        1e-12,
        true,
    );
    let trial = trial_ensemble(&block);
    claims.push(
        "trial_decomposition_state",
        "the three-member phase decomposition reproduces the block state",
        "Frobenius distance of the ensemble mixture",
        Relation::Eq,
        0.0,
        reduced.distance(trial.mixture().matrix()),
        1e-12,
        true,
    );
    claims.push(
        "trial_decomposition_tangle",
        "the three-member phase decomposition has average tangle 8/25",
        "ensemble average of pure-state tangles",
        Relation::Eq,
        8.0 / 25.0,
        ensemble_average_tangle(&trial, &QubitCut::single(0))?,
        1e-12,
        true,
    );
    let bracket = certified_tangle(&reduced, 0, cfg)?;
    claims.push(
        "five_qubit_block_tangle",
        "the tangle between qubit 0 and a two-qubit block is exactly 8/25",
        "certified bracket: CKW lower bound and optimized decomposition",
        Relation::Eq,
        8.0 / 25.0,
        bracket.upper,
        tol,
        bracket.certified && bracket.contains(8.0 / 25.0, 1e-12),
    );
    claims.push(
        "optimal_decomposition_size",
        "an optimal decomposition of the block state needs at most three members",
        "members of the certified witness with weight above 1e-6",
        Relation::Le,
        3.0,
        bracket.witness.effective_len(EFFECTIVE_WEIGHT) as f64,
        0.0,
        bracket.certified,
    );
    let partition: Partition = "0|1,2|3,4".parse()?;
    let general = check_generalized(&w5, &partition, cfg)?;
    claims.push(
        "five_qubit_generalized",
        "the 5-qubit W state saturates monogamy for the partition 0|1,2|3,4",
        "pure tangle against certified block brackets",
        Relation::Eq,
        0.0,
        general.slack,
        1e-6,
        general.verdict == Verdict::Saturated,
    );

    // mixed family over p, three-qubit uniform W'
    let mut table = Vec::new();
    for i in 0..=10 {
        let p = i as f64 / 10.0;
        let spec = MixedFamilySpec::new(w3.clone(), p)?;
        let report = check_ckw_mixed(&spec, cfg)?;
        let Bound::Bracket(b) = &report.lhs else { unreachable!("mixed CKW bounds the left side with a bracket") };
        table.push(TableRow {
            p,
            closed_form: mixed_family_tangle(&spec).value,
            lower: b.lower,
            upper: b.upper,
            gap: b.gap,
            certified: b.certified,
            pair_sum: report.rhs_sum(),
            slack: report.slack,
            witness_effective_members: b.witness.effective_len(EFFECTIVE_WEIGHT),
        });
    }
    let all_certified = table.iter().all(|r| r.certified);
    claims.push(
        "mixed_family_tangle",
        "the mixed family has tangle 4p²|a|²Σ|b_j|² for every p",
        "certified brackets over p = 0, 0.1, ..., 1",
        Relation::Eq,
        0.0,
        max_abs(table.iter().map(|r| r.upper - r.closed_form)),
        tol,
        all_certified,
    );
    claims.push(
        "mixed_family_no_residual",
        "the mixed family saturates CKW: the tangle equals the sum of pair tangles",
        "certified bracket against closed-form pair tangles, p = 0, 0.1, ..., 1",
        Relation::Eq,
        0.0,
        max_abs(table.iter().map(|r| r.slack)),
        tol,
        all_certified,
    );
    claims.push(
        "mixed_family_three_members",
        "three or fewer members suffice for every p",
        "largest effective witness size over the table",
        Relation::Le,
        3.0,
        table.iter().map(|r| r.witness_effective_members).max().unwrap_or(0) as f64,
        0.0,
        all_certified,
    );
    let endpoints = table[0].upper.abs().max((table[10].upper - 8.0 / 9.0).abs());
    claims.push(
        "table_endpoints",
        "the table runs from 0 at p = 0 to the W value 4|a|²Σ|b_j|² = 8/9 at p = 1",
        "certified brackets at the endpoints",
        Relation::Eq,
        0.0,
        endpoints,
        tol,
        table[0].certified && table[10].certified,
    );

    let mut pair_dev: f64 = 0.0;
    for k in 0..12 {
        let mut r = stream(cfg, PAIR_STREAMS, k);
        let w = random_w_class(3 + k % 3, &mut r)?;
        let p = (k as f64 + 0.5) / 12.0;
        let spec = MixedFamilySpec::new(w, p)?;
        let rho = mixed_family(&spec);
        for (j, b) in spec.w().b().iter().enumerate() {
            let c = wootters_concurrence(&partial_trace(&rho, &[0, j + 1])?)?.value;
            pair_dev = pair_dev.max((c - 2.0 * spec.w().a().norm() * b.norm() * p).abs());
        }
    }
    claims.push(
        "mixed_family_pair_concurrence",
        "each pair state of the mixed family has concurrence 2|a||b_j|p",
        "Wootters concurrence on 12 seeded random specs",
        Relation::Eq,
        0.0,
        pair_dev,
        1e-12,
        true,
    );

    let mut w_slack: f64 = 0.0;
    for k in 0..20 {
        let w = w_class(&random_w_class(3 + k % 4, &mut stream(cfg, W_CKW_STREAMS, k))?);
        for focus in 0..w.n_qubits() {
            w_slack = w_slack.max(check_ckw(&w, focus)?.slack.abs());
        }
    }
    claims.push(
        "w_class_ckw_saturation",
        "W-class states saturate CKW for every focus qubit",
        "pure tangle against Wootters pair tangles, 20 seeded random states",
        Relation::Eq,
        0.0,
        w_slack,
        1e-12,
        true,
    );

    let shapes: [&[usize]; 4] = [&[1, 2], &[2, 2], &[1, 1, 2], &[2, 1, 1]];
    let (mut analytic, mut numeric) = (0.0f64, 0.0f64);
    let mut all_saturated = true;
    for k in 0..16 {
        let spec = random_partitioned_w(shapes[k % shapes.len()], &mut stream(cfg, PARTITION_STREAMS, k))?;
        let a = check_generalized_analytic(&spec)?;
        let (state, partition) = tangle_core::states::w_partitioned(&spec)?;
        let n = check_generalized(&state, &partition, cfg)?;
        analytic = analytic.max(a.slack.abs());
        numeric = numeric.max(n.slack.abs());
        all_saturated &= a.verdict == Verdict::Saturated && n.verdict == Verdict::Saturated;
    }
    claims.push(
        "partitioned_w_saturation_analytic",
        "W-class states saturate monogamy for arbitrary block partitions",
        "closed-form block tangles, 16 seeded random partitioned states",
        Relation::Eq,
        0.0,
        analytic,
        1e-6,
        all_saturated,
    );
    claims.push(
        "partitioned_w_saturation_numeric",
        "the same saturation holds with every block tangle certified numerically",
        "certified block brackets, 16 seeded random partitioned states",
        Relation::Eq,
        0.0,
        numeric,
        1e-6,
        all_saturated,
    );

    let singletons = Partition::singletons(3, 0)?;
    let (mut n_min, mut r_min) = (f64::INFINITY, f64::INFINITY);
    for k in 0..50 {
        let psi = random_pure_with(3, &mut stream(cfg, MEASURE_STREAMS, k))?;
        n_min = n_min.min(check_measure_monogamy(&psi, &singletons, MeasureKind::Negativity)?.slack);
        r_min = r_min.min(check_measure_monogamy(&psi, &singletons, MeasureKind::Realignment)?.slack);
    }
    claims.push(
        "negativity_monogamy",
        "squared negativity is monogamous on three qubits",
        "smallest slack over 50 seeded random pure states",
        Relation::Ge,
        0.0,
        n_min,
        1e-9,
        true,
    );
    claims.push(
        "realignment_monogamy",
        "the squared realignment measure is monogamous on three qubits",
        "smallest slack over 50 seeded random pure states",
        Relation::Ge,
        0.0,
        r_min,
        1e-9,
        true,
    );
    let ordering = (0..100)
        .map(|k| -> Result<f64> {
            let rho = random_mixed_with(2, 1 + k % 4, &mut stream(cfg, ORDERING_STREAMS, k))?;
            let cut = QubitCut::single(0);
            let c = wootters_concurrence(&rho)?.value;
            Ok(c - negativity(&rho, &cut)?.value.max(realignment_measure(&rho, &cut)?.value))
        })
        .collect::<Result<Vec<_>>>()?;
    claims.push(
        "concurrence_dominates",
        "concurrence is at least the larger of negativity and the realignment measure",
        "smallest C - max(N, R) over 100 seeded two-qubit mixed states",
        Relation::Ge,
        0.0,
        min_of(ordering),
        1e-9,
        true,
    );
    let w_negativity = check_measure_monogamy(&w_class(&w3), &singletons, MeasureKind::Negativity)?;
    claims.push(
        "w_negativity_residual",
        "the uniform 3-qubit W state leaves a positive squared-negativity residual",
        "negativity monogamy slack",
        Relation::Gt,
        0.0,
        w_negativity.slack,
        0.0,
        true,
    );

    let claims = claims.0;
    let passed = claims.iter().filter(|c| c.pass).count();
    Ok(ReproOut {
        failed: claims.len() - passed,
        passed,
        claims,
        table_family: "p |W'><W'| + (1 - p) |000><000|, W' the uniform 3-qubit W state",
        table,
    })
}

pub fn run(args: &ReproArgs, io: &mut Output<'_>) -> std::result::Result<u8, CliError> {
    let cfg = args.roof.config()?;
    let out = reproduce(&cfg)?;
    let doc = Report::new("paper-repro", args, &cfg, &out);
    emit(io, args.json, &doc, |w| {
        for c in &out.claims {
            let mark = if c.pass { "PASS" } else { "FAIL" };
            writeln!(w, "{mark} {:<36} observed {:.17e} ({:?} {:e} ± {:e})", c.id, c.observed, c.relation, c.expected, c.tolerance)?;
            writeln!(w, "     {}", c.statement)?;
        }
        writeln!(w, "{} passed, {} failed", out.passed, out.failed)?;
        writeln!(w)?;
        writeln!(w, "tangle vs p for {}", out.table_family)?;
        writeln!(w, "{:>4}  {:>22}  {:>22}  {:>22}  {:>9}  {:>10}  {:>7}", "p", "4p²|a|²Σ|b|²", "lower", "upper", "gap", "slack", "members")?;
        for r in &out.table {
            writeln!(
                w,
                "{:>4.1}  {:>22.17}  {:>22.17}  {:>22.17}  {:>9.2e}  {:>10.2e}  {:>7}",
                r.p, r.closed_form, r.lower, r.upper, r.gap, r.slack, r.witness_effective_members
            )?;
        }
        Ok(())
    })?;
    Ok(if out.failed == 0 { EXIT_OK } else { EXIT_FINDING })
}
