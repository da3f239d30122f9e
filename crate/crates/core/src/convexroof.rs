//! Convex roof of the tangle.
//!
//! Every decomposition of a rank-`r` state `ρ = Σ_k μ_k |v_k⟩⟨v_k|` into `m`
//! pure states has the form `|ψ̃_j⟩ = Σ_k U_jk √μ_k |v_k⟩` for an `m × r`
//! isometry `U` (`U†U = 1`), with weights `‖ψ̃_j‖²`. [`optimize_roof`]
//! minimizes the average tangle over `U` by sweeping over pairs of rows and
//! applying the best 2×2 unitary to each pair, which keeps `U` exactly
//! isometric. Any iterate is a valid decomposition, so the result is always
//! an upper bound on the roof.
//!
//! [`ckw_lower_bound`] sums squared Wootters concurrences of the focus with
//! each other qubit; by the CKW inequality this never exceeds the roof.
//! [`certified_tangle`] pairs the two bounds.

use crate::error::{invalid, Result};
use crate::measures::{pure_tangle, weighted_tangle, wootters_tangle};
use crate::qstate::{eigh_hermitian_part, embed_table, partial_trace, CMatrix, DensityMatrix, PureState, QubitCut};
use crate::rng;
use crate::states::{Ensemble, EnsembleMember};
use crate::tol;
use crate::C64;

/// Tuning knobs for [`optimize_roof`] and [`certified_tangle`].
#[derive(Debug, Clone, PartialEq)]
pub struct RoofConfig {
    /// Members per decomposition; `None` uses `min(r², r + 2)` for rank `r`.
    pub ensemble_size: Option<usize>,
    pub restarts: usize,
    /// Maximum number of sweeps over all row pairs per restart.
    pub max_iterations: usize,
    /// A restart stops once a full sweep improves the objective by less.
    pub step_tolerance: f64,
    pub certificate_tolerance: f64,
    pub seed: u64,
}

impl Default for RoofConfig {
    fn default() -> Self {
        Self {
            ensemble_size: None,
            restarts: 32,
            max_iterations: 500,
            step_tolerance: 1e-10,
            certificate_tolerance: 1e-6,
            seed: 0,
        }
    }
}

impl RoofConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self, rank: usize) -> Result<usize> {
        if self.restarts == 0 {
            return Err(invalid("restarts must be at least 1"));
        }
        if !(self.step_tolerance >= 0.0 && self.step_tolerance.is_finite()) {
            return Err(invalid("step tolerance must be a finite nonnegative number"));
        }
        if !(self.certificate_tolerance > 0.0 && self.certificate_tolerance.is_finite()) {
            return Err(invalid("certificate tolerance must be a finite positive number"));
        }
        let m = self.ensemble_size.unwrap_or_else(|| default_ensemble_size(rank));
        if m < rank {
            return Err(invalid(format!("ensemble size {m} is smaller than the state's rank {rank}")));
        }
        Ok(m)
    }
}

pub fn default_ensemble_size(rank: usize) -> usize {
    (rank * rank).min(rank + 2)
}

/// Result of [`optimize_roof`]: the lowest average tangle found and the
/// decomposition that attains it.
#[derive(Debug, Clone)]
pub struct RoofSolution {
    pub upper: f64,
    pub witness: Ensemble,
    pub ensemble_size: usize,
    pub rank: usize,
    /// Restarts actually run (fewer than configured only when a target was
    /// reached early).
    pub restarts_run: usize,
}

/// Certified interval for the tangle roof.
#[derive(Debug, Clone)]
pub struct RoofBracket {
    pub lower: f64,
    pub upper: f64,
    pub witness: Ensemble,
    pub certified: bool,
    pub gap: f64,
    /// Set when the optimizer went below the CKW bound by more than 1e-9,
    /// which would contradict the CKW inequality. Never clamped away.
    pub lower_bound_violated: bool,
}

impl RoofBracket {
    pub fn contains(&self, value: f64, slack: f64) -> bool {
        self.lower - slack <= value && value <= self.upper + slack
    }
}

/// `Σ_j p_j τ(φ_j)` across `cut`.
pub fn ensemble_average_tangle(ensemble: &Ensemble, cut: &QubitCut) -> Result<f64> {
    ensemble
        .members()
        .iter()
        .map(|m| Ok(m.weight * pure_tangle(&m.state, cut)?.value))
        .sum()
}

/// Spectral ensemble of a density matrix, eigenvalues above the rank cutoff.
struct Spectral {
    n_qubits: usize,
    /// `√μ_k |v_k⟩`, one entry per kept eigenvalue.
    vectors: Vec<Vec<C64>>,
    total: f64,
}

impl Spectral {
    fn of(rho: &DensityMatrix) -> Self {
        let e = eigh_hermitian_part(rho.matrix());
        let d = rho.dim();
        let vectors: Vec<Vec<C64>> = e
            .values
            .iter()
            .enumerate()
            .filter(|(_, &mu)| mu > tol::RANK_CUTOFF)
            .map(|(k, &mu)| (0..d).map(|i| e.vectors[(i, k)] * mu.sqrt()).collect())
            .collect();
        let total = e.values.iter().filter(|&&mu| mu > tol::RANK_CUTOFF).sum();
        Self { n_qubits: rho.n_qubits(), vectors, total }
    }

    fn rank(&self) -> usize {
        self.vectors.len()
    }

    fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// Unnormalized members `Σ_k U_jk √μ_k |v_k⟩`.
    fn mix(&self, mixer: &CMatrix) -> Vec<Vec<C64>> {
        (0..mixer.nrows())
            .map(|j| {
                let mut out = vec![C64::new(0.0, 0.0); self.dim()];
                for (k, v) in self.vectors.iter().enumerate() {
                    let u = mixer[(j, k)];
                    out.iter_mut().zip(v).for_each(|(o, x)| *o += u * x);
                }
                out
            })
            .collect()
    }

    fn ensemble(&self, mixer: &CMatrix) -> Result<Ensemble> {
        let raw = self.mix(mixer);
        let weighted: Vec<(f64, Vec<C64>)> = raw
            .into_iter()
            .map(|v| (v.iter().map(|x| x.norm_sqr()).sum::<f64>() / self.total, v))
            .filter(|(w, _)| *w >= tol::ZERO_WEIGHT)
            .collect();
        let kept: f64 = weighted.iter().map(|(w, _)| w).sum();
        let members = weighted
            .into_iter()
            .map(|(w, v)| Ok(EnsembleMember { weight: w / kept, state: PureState::normalized(self.n_qubits, v)? }))
            .collect::<Result<Vec<_>>>()?;
        Ensemble::new(members)
    }
}

fn check_isometry(mixer: &CMatrix) -> Result<()> {
    let r = mixer.ncols();
    let err = (mixer.adjoint() * mixer - CMatrix::identity(r, r)).norm();
    if err > 1e-9 {
        return Err(invalid(format!("mixer columns are not orthonormal (deviation {err:.3e})")));
    }
    Ok(())
}

/// Decomposition of `rho` obtained by mixing its spectral ensemble with the
/// `m × r` isometry `mixer`, `r` being the numerical rank of `rho`. Members
/// lighter than 1e-12 are dropped.
pub fn decomposition_from_mixer(rho: &DensityMatrix, mixer: &CMatrix) -> Result<Ensemble> {
    let spectral = Spectral::of(rho);
    if mixer.ncols() != spectral.rank() {
        return Err(invalid(format!(
            "mixer has {} columns but the state has rank {}",
            mixer.ncols(),
            spectral.rank()
        )));
    }
    check_isometry(mixer)?;
    spectral.ensemble(mixer)
}

/// One descent trajectory: members stored as coefficient matrices across the
/// cut, plus their reduced states on side A.
struct Trajectory {
    mixer: CMatrix,
    members: Vec<CMatrix>,
    reduced: Vec<CMatrix>,
    values: Vec<f64>,
}

impl Trajectory {
    fn new(mixer: CMatrix, basis: &[CMatrix]) -> Self {
        let members: Vec<CMatrix> = (0..mixer.nrows())
            .map(|j| {
                basis.iter().enumerate().fold(CMatrix::zeros(basis[0].nrows(), basis[0].ncols()), |acc, (k, w)| {
                    acc + w * mixer[(j, k)]
                })
            })
            .collect();
        let reduced: Vec<CMatrix> = members.iter().map(|m| m * m.adjoint()).collect();
        let values = reduced.iter().map(weighted_tangle).collect();
        Self { mixer, members, reduced, values }
    }

    fn objective(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Finds the best rotation of rows `(j, k)` and applies it if it helps.
    fn optimize_pair(&mut self, j: usize, k: usize, coarse: bool) {
        let cross = &self.members[j] * self.members[k].adjoint();
        let objective = PairObjective::new(&self.reduced[j], &self.reduced[k], &cross);
        let current = self.values[j] + self.values[k];
        let (theta, phi, best) = objective.minimize(coarse);
        if !(best < current) {
            return;
        }
        let (c, s) = (theta.cos(), theta.sin());
        let e = C64::from_polar(1.0, phi);
        let (mj, mk) = (self.members[j].clone(), self.members[k].clone());
        self.members[j] = &mj * C64::new(c, 0.0) - &mk * (e * s);
        self.members[k] = &mj * (e.conj() * s) + &mk * C64::new(c, 0.0);
        for col in 0..self.mixer.ncols() {
            let (uj, uk) = (self.mixer[(j, col)], self.mixer[(k, col)]);
            self.mixer[(j, col)] = uj * c - e * s * uk;
            self.mixer[(k, col)] = e.conj() * s * uj + uk * c;
        }
        for idx in [j, k] {
            self.reduced[idx] = &self.members[idx] * self.members[idx].adjoint();
            self.values[idx] = weighted_tangle(&self.reduced[idx]);
        }
    }

    fn sweep(&mut self, coarse: bool) {
        let m = self.members.len();
        for j in 0..m {
            for k in j + 1..m {
                self.optimize_pair(j, k, coarse);
            }
        }
    }
}

/// Objective of rotating two members by
/// `G(θ, φ) = [[cos θ, −e^{iφ} sin θ], [e^{−iφ} sin θ, cos θ]]`.
///
/// With `A = M_j M_j†`, `B = M_k M_k†`, `X = e^{−iφ} M_j M_k†` and
/// `H = X + X†` the rotated reduced states are `c²A + s²B − csH` and
/// `s²A + c²B + csH`, so each evaluation only touches side-A matrices.
enum PairObjective {
    Qubit { a: [f64; 3], a01: C64, b: [f64; 3], b01: C64, x: [C64; 4] },
    General { a: CMatrix, b: CMatrix, x: CMatrix },
}

const THETA_GRID: usize = 12;
const PHI_GRID: usize = 6;
const GOLDEN_TOL: f64 = 1e-8;
const NEWTON_STEP: f64 = 1e-4;

impl PairObjective {
    fn new(a: &CMatrix, b: &CMatrix, x: &CMatrix) -> Self {
        if a.nrows() == 2 {
            PairObjective::Qubit {
                a: [a[(0, 0)].re, a[(1, 1)].re, 0.0],
                a01: a[(0, 1)],
                b: [b[(0, 0)].re, b[(1, 1)].re, 0.0],
                b01: b[(0, 1)],
                x: [x[(0, 0)], x[(0, 1)], x[(1, 0)], x[(1, 1)]],
            }
        } else {
            PairObjective::General { a: a.clone(), b: b.clone(), x: x.clone() }
        }
    }

    fn eval(&self, theta: f64, phi: f64) -> f64 {
        let (c, s) = (theta.cos(), theta.sin());
        let (c2, s2, cs) = (c * c, s * s, c * s);
        let e = C64::from_polar(1.0, -phi);
        match self {
            PairObjective::Qubit { a, a01, b, b01, x } => {
                let h00 = 2.0 * (e * x[0]).re;
                let h11 = 2.0 * (e * x[3]).re;
                let h01 = e * x[1] + (e * x[2]).conj();
                let wt = |d0: f64, d1: f64, off: C64| {
                    let p = d0 + d1;
                    if p <= 1e-300 {
                        0.0
                    } else {
                        (4.0 * (d0 * d1 - off.norm_sqr()) / p).max(0.0)
                    }
                };
                let first = wt(c2 * a[0] + s2 * b[0] - cs * h00, c2 * a[1] + s2 * b[1] - cs * h11, *a01 * c2 + *b01 * s2 - h01 * cs);
                let second = wt(s2 * a[0] + c2 * b[0] + cs * h00, s2 * a[1] + c2 * b[1] + cs * h11, *a01 * s2 + *b01 * c2 + h01 * cs);
                first + second
            }
            PairObjective::General { a, b, x } => {
                let xr = x * e;
                let h = &xr + xr.adjoint();
                let first = a * C64::new(c2, 0.0) + b * C64::new(s2, 0.0) - &h * C64::new(cs, 0.0);
                let second = a * C64::new(s2, 0.0) + b * C64::new(c2, 0.0) + &h * C64::new(cs, 0.0);
                weighted_tangle(&first) + weighted_tangle(&second)
            }
        }
    }

    /// Objective in the regular coordinates `z = u + iv = θ e^{iφ}`; the
    /// rotation is `exp([[0, −z], [z̄, 0]])`.
    fn eval_uv(&self, u: f64, v: f64) -> f64 {
        self.eval(u.hypot(v), v.atan2(u))
    }

    /// Best `(θ, φ, value)`; `θ ∈ (−π/2, π/2]`, `φ ∈ [0, π)` covers every
    /// distinct rotation. `coarse` scans a global grid first; otherwise a
    /// Newton step from the identity is tried before falling back to line
    /// searches.
    fn minimize(&self, coarse: bool) -> (f64, f64, f64) {
        use std::f64::consts::PI;
        let current = self.eval(0.0, 0.0);
        let mut best = (0.0, 0.0, current);
        let (mut dt, mut dp) = (PI / THETA_GRID as f64, PI / PHI_GRID as f64);
        if coarse {
            for i in 0..THETA_GRID {
                let theta = -PI / 2.0 + (i as f64 + 0.5) * dt;
                for l in 0..PHI_GRID {
                    let phi = l as f64 * dp;
                    let v = self.eval(theta, phi);
                    if v < best.2 {
                        best = (theta, phi, v);
                    }
                }
            }
        } else {
            if let Some(step) = self.newton_step(current) {
                return step;
            }
            dt = 0.1;
            for l in 0..PHI_GRID {
                let phi = l as f64 * dp;
                for theta in [-0.05, 0.05] {
                    let v = self.eval(theta, phi);
                    if v < best.2 {
                        best = (theta, phi, v);
                    }
                }
            }
        }
        for _ in 0..3 {
            let (t0, p0) = (best.0, best.1);
            let (t, v) = golden_section(|t| self.eval(t, p0), t0 - dt, t0 + dt, GOLDEN_TOL);
            if v < best.2 {
                best = (t, p0, v);
            }
            let t0 = best.0;
            let (p, v) = golden_section(|p| self.eval(t0, p), best.1 - dp, best.1 + dp, GOLDEN_TOL);
            if v < best.2 {
                best = (t0, p, v);
            }
            dt *= 0.5;
            dp *= 0.5;
        }
        best
    }

    /// Damped Newton step in `(u, v)` from finite differences. `None` when
    /// the quadratic model is not convex or the step does not improve.
    fn newton_step(&self, f0: f64) -> Option<(f64, f64, f64)> {
        let h = NEWTON_STEP;
        let (fp0, fm0) = (self.eval_uv(h, 0.0), self.eval_uv(-h, 0.0));
        let (f0p, f0m) = (self.eval_uv(0.0, h), self.eval_uv(0.0, -h));
        let fpp = self.eval_uv(h, h);
        let fpm = self.eval_uv(h, -h);
        let fmp = self.eval_uv(-h, h);
        let fmm = self.eval_uv(-h, -h);
        let (gu, gv) = ((fp0 - fm0) / (2.0 * h), (f0p - f0m) / (2.0 * h));
        let huu = (fp0 - 2.0 * f0 + fm0) / (h * h);
        let hvv = (f0p - 2.0 * f0 + f0m) / (h * h);
        let huv = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
        let det = huu * hvv - huv * huv;
        if !(huu > 0.0 && det > 0.0) {
            return None;
        }
        let mut du = -(hvv * gu - huv * gv) / det;
        let mut dv = -(huu * gv - huv * gu) / det;
        for _ in 0..4 {
            let f = self.eval_uv(du, dv);
            if f < f0 {
                return Some((du.hypot(dv), dv.atan2(du), f));
            }
            du *= 0.5;
            dv *= 0.5;
        }
        None
    }
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`.
fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Sweeps that use the global grid scan before switching to local moves.
const COARSE_SWEEPS: usize = 8;

fn run_trajectory(mixer: CMatrix, basis: &[CMatrix], cfg: &RoofConfig) -> Trajectory {
    let mut traj = Trajectory::new(mixer, basis);
    let mut value = traj.objective();
    for sweep in 0..cfg.max_iterations {
        let coarse = sweep < COARSE_SWEEPS;
        traj.sweep(coarse);
        let next = traj.objective();
        let improvement = value - next;
        value = next;
        if !coarse && improvement < cfg.step_tolerance {
            break;
        }
    }
    traj
}

/// Lowest ensemble-average tangle across `cut` found over `cfg.restarts`
/// seeded starts. Restart `i` uses generator stream `i` of `cfg.seed`, so a
/// run with more restarts sees a superset of starts and never returns a
/// larger bound.
pub fn optimize_roof(rho: &DensityMatrix, cut: &QubitCut, cfg: &RoofConfig) -> Result<RoofSolution> {
    optimize_roof_until(rho, cut, cfg, None)
}

/// As [`optimize_roof`], but stops starting new restarts once the bound is
/// at or below `target`.
pub fn optimize_roof_until(
    rho: &DensityMatrix,
    cut: &QubitCut,
    cfg: &RoofConfig,
    target: Option<f64>,
) -> Result<RoofSolution> {
    let n = rho.n_qubits();
    cut.check(n)?;
    let spectral = Spectral::of(rho);
    let rank = spectral.rank();
    if rank == 0 {
        return Err(invalid("state has no eigenvalue above the rank cutoff"));
    }
    let m = cfg.validate(rank)?;

    let side_b = cut.side_b(n);
    let ea = embed_table(cut.side_a(), n);
    let eb = embed_table(&side_b, n);
    let basis: Vec<CMatrix> = spectral
        .vectors
        .iter()
        .map(|v| CMatrix::from_fn(ea.len(), eb.len(), |i, k| v[ea[i] | eb[k]]))
        .collect();

    let restarts = if rank == 1 && m == 1 { 1 } else { cfg.restarts };
    let mut best: Option<(f64, CMatrix)> = None;
    let mut restarts_run = 0;
    for i in 0..restarts {
        let mut rng = rng::stream(cfg.seed, i as u64);
        let unitary = rng::random_unitary(m, &mut rng);
        let mixer = unitary.columns(0, rank).into_owned();
        let traj = run_trajectory(mixer, &basis, cfg);
        let value = traj.objective() / spectral.total;
        restarts_run += 1;
        if best.as_ref().map_or(true, |(b, _)| value < *b) {
            best = Some((value, traj.mixer));
        }
        if let (Some(t), Some((b, _))) = (target, &best) {
            if *b <= t {
                break;
            }
        }
    }
    let (_, mixer) = best.expect("at least one restart");
    let witness = spectral.ensemble(&mixer)?;
    let upper = ensemble_average_tangle(&witness, cut)?;
    Ok(RoofSolution { upper, witness, ensemble_size: m, rank, restarts_run })
}

/// `Σ_{j ≠ focus} C²(ρ_{focus, j})` with `C` the Wootters concurrence.
pub fn ckw_lower_bound(rho: &DensityMatrix, focus: usize) -> Result<f64> {
    Ok(pair_tangles(rho, focus)?.iter().map(|(_, t)| t).sum())
}

/// Squared Wootters concurrence between `focus` and every other qubit.
pub fn pair_tangles(rho: &DensityMatrix, focus: usize) -> Result<Vec<(usize, f64)>> {
    let n = rho.n_qubits();
    if n < 2 {
        return Err(invalid("need at least two qubits"));
    }
    if focus >= n {
        return Err(invalid(format!("focus qubit {focus} out of range for {n} qubits")));
    }
    (0..n)
        .filter(|&j| j != focus)
        .map(|j| Ok((j, wootters_tangle(&partial_trace(rho, &[focus, j])?)?.value)))
        .collect()
}

/// Effective-member threshold used when compacting witnesses.
pub const EFFECTIVE_WEIGHT: f64 = 1e-6;

/// CKW lower bound and optimized upper bound for the tangle between `focus`
/// and the rest. Rank-one states get the exact pure tangle as both bounds.
/// When the bracket certifies, the smallest ensemble size that still
/// certifies is searched for, so the witness is as short as possible.
pub fn certified_tangle(rho: &DensityMatrix, focus: usize, cfg: &RoofConfig) -> Result<RoofBracket> {
    let cut = QubitCut::single(focus);
    if rho.rank(tol::RANK_CUTOFF) == 1 {
        // a pure state is its own only decomposition, so the roof is exact
        let solution = optimize_roof(rho, &cut, cfg)?;
        return Ok(RoofBracket {
            lower: solution.upper,
            upper: solution.upper,
            witness: solution.witness,
            certified: true,
            gap: 0.0,
            lower_bound_violated: false,
        });
    }
    let lower = ckw_lower_bound(rho, focus)?;
    let tol = cfg.certificate_tolerance;
    let target = Some(lower + 0.1 * tol);
    let mut solution = optimize_roof_until(rho, &cut, cfg, target)?;
    if solution.upper - lower < tol {
        let effective = solution.witness.effective_len(EFFECTIVE_WEIGHT);
        for size in solution.rank..effective.min(solution.ensemble_size) {
            let smaller = RoofConfig { ensemble_size: Some(size), ..cfg.clone() };
            let candidate = optimize_roof_until(rho, &cut, &smaller, target)?;
            if candidate.upper - lower < tol && candidate.witness.effective_len(EFFECTIVE_WEIGHT) < effective {
                solution = candidate;
                break;
            }
        }
    }
    let gap = solution.upper - lower;
    let lower_bound_violated = gap < -1e-9;
    Ok(RoofBracket {
        lower,
        upper: solution.upper,
        witness: solution.witness,
        certified: gap < tol && !lower_bound_violated,
        gap,
        lower_bound_violated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::mixed_family_tangle;
    use crate::states::{self, MixedFamilySpec, WClassSpec};
    use approx::assert_abs_diff_eq;

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, v) = golden_section(|x| (x - 0.3) * (x - 0.3) + 1.0, -1.0, 1.0, 1e-10);
        assert_abs_diff_eq!(x, 0.3, epsilon = 1e-7);
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn pair_objective_matches_explicit_rotation() {
        let mut r = rng::seeded(3);
        let mj = rng::gaussian_matrix(2, 4, &mut r);
        let mk = rng::gaussian_matrix(2, 4, &mut r);
        let obj = PairObjective::new(&(&mj * mj.adjoint()), &(&mk * mk.adjoint()), &(&mj * mk.adjoint()));
        let general = PairObjective::General { a: &mj * mj.adjoint(), b: &mk * mk.adjoint(), x: &mj * mk.adjoint() };
        for (theta, phi) in [(0.3, 1.1), (-1.2, 0.2), (0.0, 2.0)] {
            let (c, s) = (f64::cos(theta), f64::sin(theta));
            let e = C64::from_polar(1.0, phi);
            let nj = &mj * C64::new(c, 0.0) - &mk * (e * s);
            let nk = &mj * (e.conj() * s) + &mk * C64::new(c, 0.0);
            let direct = weighted_tangle(&(&nj * nj.adjoint())) + weighted_tangle(&(&nk * nk.adjoint()));
            assert_abs_diff_eq!(obj.eval(theta, phi), direct, epsilon = 1e-12);
            assert_abs_diff_eq!(general.eval(theta, phi), direct, epsilon = 1e-12);
        }
    }

    #[test]
    fn identity_mixer_gives_spectral_ensemble() {
        let rho = states::random_mixed(2, 3, 4).unwrap();
        let e = decomposition_from_mixer(&rho, &CMatrix::identity(3, 3)).unwrap();
        let spectrum = rho.eigh();
        assert_eq!(e.len(), 3);
        for (m, mu) in e.members().iter().zip(&spectrum.values) {
            assert_abs_diff_eq!(m.weight, *mu, epsilon = 1e-12);
        }
        assert!(e.mixture().distance(rho.matrix()) < 1e-12);
    }

    #[test]
    fn non_isometric_mixer_is_rejected() {
        let rho = states::random_mixed(2, 2, 4).unwrap();
        assert!(decomposition_from_mixer(&rho, &CMatrix::identity(2, 2).scale(2.0)).is_err());
        assert!(decomposition_from_mixer(&rho, &CMatrix::identity(3, 3)).is_err());
    }

    #[test]
    fn pure_input_returns_pure_tangle() {
        let psi = states::random_pure(3, 8).unwrap();
        let sol = optimize_roof(&psi.projector(), &QubitCut::single(0), &RoofConfig::default()).unwrap();
        let exact = pure_tangle(&psi, &QubitCut::single(0)).unwrap().value;
        assert_abs_diff_eq!(sol.upper, exact, epsilon = 1e-12);
        assert_eq!(sol.witness.len(), 1);
        assert_eq!(sol.restarts_run, 1);
    }

    #[test]
    fn three_fifths_family_certifies_at_eight_25ths() {
        let spec = MixedFamilySpec::new(WClassSpec::uniform(3).unwrap(), 0.6).unwrap();
        let bracket = certified_tangle(&states::mixed_family(&spec), 0, &RoofConfig::default()).unwrap();
        assert!(bracket.certified, "{bracket:?}");
        assert!(bracket.contains(8.0 / 25.0, 1e-12));
        assert_abs_diff_eq!(bracket.lower, mixed_family_tangle(&spec).value, epsilon = 1e-12);
        assert!(bracket.witness.effective_len(EFFECTIVE_WEIGHT) <= 3);
    }

    #[test]
    fn config_validation() {
        let rho = states::random_mixed(2, 3, 1).unwrap();
        let cut = QubitCut::single(0);
        let bad = RoofConfig { ensemble_size: Some(2), ..RoofConfig::default() };
        assert!(optimize_roof(&rho, &cut, &bad).is_err());
        let bad = RoofConfig { restarts: 0, ..RoofConfig::default() };
        assert!(optimize_roof(&rho, &cut, &bad).is_err());
        assert!(ckw_lower_bound(&rho, 2).is_err());
    }
}
