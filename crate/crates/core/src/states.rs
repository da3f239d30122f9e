//! State families: W-class states, their mixture with the all-zero state,
//! W states whose non-focus qubits are grouped into named blocks, and seeded
//! random states.
//!
//! Amplitudes are complex throughout; every closed form downstream only uses
//! their squared magnitudes.
//!
//! The reduced two-body state of the mixed family is
//! `p|ψ_j⟩⟨ψ_j| + (1 − p + p Σ_{k≠j} |b_k|²)|00⟩⟨00|` with
//! `|ψ_j⟩ = a|10⟩ + b_j|01⟩`. The `p` multiplying the sum is needed for unit
//! trace; [`reduced_pair_analytic`] follows this form and tests compare it
//! against an explicit partial trace.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::monogamy::Partition;
use crate::qstate::{CMatrix, DensityMatrix, PureState};
use crate::rng::{self, Rng};
use crate::tol;
use crate::C64;

/// `a|10…0⟩ + Σ_j b_j |0…1_j…0⟩` on `1 + b.len()` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct WClassSpec {
    a: C64,
    b: Vec<C64>,
}

/// `p|W⟩⟨W| + (1 − p)|0…0⟩⟨0…0|`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedFamilySpec {
    w: WClassSpec,
    p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WBlock {
    pub name: String,
    pub amplitudes: Vec<C64>,
}

/// W-class state whose non-focus qubits are grouped into named blocks:
/// `ã|10…0⟩ + Σ_blocks Σ_j x̃_j σ^x_j |0…0⟩`. The focus is qubit 0 and the
/// blocks occupy consecutive qubits in the order given.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionedWSpec {
    a_tilde: C64,
    blocks: Vec<WBlock>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleMember {
    pub weight: f64,
    pub state: PureState,
}

/// Weighted pure states; the weights are positive and sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    members: Vec<EnsembleMember>,
}

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

impl WClassSpec {
    pub fn new(a: C64, b: Vec<C64>) -> Result<Self> {
        if b.is_empty() {
            return Err(invalid("a W-class state needs at least one b amplitude"));
        }
        if b.len() + 1 > tol::MAX_QUBITS {
            return Err(Error::TooManyQubits { got: b.len() + 1, max: tol::MAX_QUBITS });
        }
        let norm2 = a.norm_sqr() + b.iter().map(|x| x.norm_sqr()).sum::<f64>();
        if (norm2 - 1.0).abs() > tol::NORMALIZATION {
            return Err(invalid(format!("|a|² + Σ|b_j|² = {norm2}, expected 1")));
        }
        Ok(Self { a, b })
    }

    pub fn from_real(a: f64, b: &[f64]) -> Result<Self> {
        Self::new(C64::new(a, 0.0), b.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Equal amplitudes `1/√n` on every single-excitation basis state.
    pub fn uniform(n_qubits: usize) -> Result<Self> {
        if n_qubits < 2 {
            return Err(invalid("uniform W state needs at least two qubits"));
        }
        let x = 1.0 / (n_qubits as f64).sqrt();
        Self::from_real(x, &vec![x; n_qubits - 1])
    }

    pub fn a(&self) -> C64 {
        self.a
    }

    pub fn b(&self) -> &[C64] {
        &self.b
    }

    pub fn n_qubits(&self) -> usize {
        self.b.len() + 1
    }

    pub fn b_norm_sqr(&self) -> f64 {
        self.b.iter().map(|x| x.norm_sqr()).sum()
    }
}

impl MixedFamilySpec {
    pub fn new(w: WClassSpec, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid(format!("mixing probability p = {p} is outside [0, 1]")));
        }
        Ok(Self { w, p })
    }

    pub fn w(&self) -> &WClassSpec {
        &self.w
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn n_qubits(&self) -> usize {
        self.w.n_qubits()
    }
}

impl PartitionedWSpec {
    pub fn new(a_tilde: C64, blocks: Vec<WBlock>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(invalid("at least one block is required"));
        }
        for (i, block) in blocks.iter().enumerate() {
            if block.amplitudes.is_empty() {
                return Err(invalid(format!("block {:?} has no qubits", block.name)));
            }
            if blocks[..i].iter().any(|other| other.name == block.name) {
                return Err(invalid(format!("block name {:?} used twice", block.name)));
            }
        }
        let n_qubits = 1 + blocks.iter().map(|b| b.amplitudes.len()).sum::<usize>();
        if n_qubits > tol::MAX_QUBITS {
            return Err(Error::TooManyQubits { got: n_qubits, max: tol::MAX_QUBITS });
        }
        let norm2 = a_tilde.norm_sqr()
            + blocks.iter().flat_map(|b| &b.amplitudes).map(|x| x.norm_sqr()).sum::<f64>();
        if (norm2 - 1.0).abs() > tol::NORMALIZATION {
            return Err(invalid(format!("squared amplitudes sum to {norm2}, expected 1")));
        }
        Ok(Self { a_tilde, blocks })
    }

    pub fn a_tilde(&self) -> C64 {
        self.a_tilde
    }

    pub fn blocks(&self) -> &[WBlock] {
        &self.blocks
    }

    pub fn n_qubits(&self) -> usize {
        1 + self.blocks.iter().map(|b| b.amplitudes.len()).sum::<usize>()
    }

    pub fn block(&self, name: &str) -> Option<&WBlock> {
        self.blocks.iter().find(|b| b.name == name)
    }

    /// Qubit indices occupied by each block, in block order.
    pub fn block_qubits(&self) -> Vec<Vec<usize>> {
        let mut next = 1;
        self.blocks
            .iter()
            .map(|b| {
                let qubits: Vec<usize> = (next..next + b.amplitudes.len()).collect();
                next += b.amplitudes.len();
                qubits
            })
            .collect()
    }

    /// The same state viewed as an unpartitioned W-class spec.
    pub fn flatten(&self) -> WClassSpec {
        let b = self.blocks.iter().flat_map(|b| b.amplitudes.iter().copied()).collect();
        WClassSpec { a: self.a_tilde, b }
    }
}

impl Ensemble {
    pub fn new(members: Vec<EnsembleMember>) -> Result<Self> {
        let first = members.first().ok_or_else(|| invalid("ensemble is empty"))?;
        let n = first.state.n_qubits();
        if members.iter().any(|m| m.state.n_qubits() != n) {
            return Err(invalid("ensemble members act on different numbers of qubits"));
        }
        if let Some(m) = members.iter().find(|m| !(m.weight > 0.0)) {
            return Err(invalid(format!("non-positive ensemble weight {}", m.weight)));
        }
        let total: f64 = members.iter().map(|m| m.weight).sum();
        if (total - 1.0).abs() > tol::NORMALIZATION {
            return Err(invalid(format!("ensemble weights sum to {total}")));
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[EnsembleMember] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn n_qubits(&self) -> usize {
        self.members[0].state.n_qubits()
    }

    /// Number of members heavier than `threshold`.
    pub fn effective_len(&self, threshold: f64) -> usize {
        self.members.iter().filter(|m| m.weight > threshold).count()
    }

    /// `Σ_j p_j |φ_j⟩⟨φ_j|`.
    pub fn mixture(&self) -> DensityMatrix {
        let d = self.members[0].state.dim();
        let mut acc = CMatrix::zeros(d, d);
        for m in &self.members {
            let v = nalgebra::DVector::from_column_slice(m.state.amplitudes());
            acc += (&v * v.adjoint()).scale(m.weight);
        }
        DensityMatrix::from_hermitian_unchecked(self.n_qubits(), acc)
    }
}

/// Index of the basis state with a single excitation on `qubit`.
fn excitation(qubit: usize, n_qubits: usize) -> usize {
    1 << (n_qubits - 1 - qubit)
}

pub fn w_class(spec: &WClassSpec) -> PureState {
    let n = spec.n_qubits();
    let mut amplitudes = vec![zero(); 1 << n];
    amplitudes[excitation(0, n)] = spec.a;
    for (j, &b) in spec.b.iter().enumerate() {
        amplitudes[excitation(j + 1, n)] = b;
    }
    PureState::new(n, amplitudes).expect("validated W-class spec yields a unit vector")
}

pub fn mixed_family(spec: &MixedFamilySpec) -> DensityMatrix {
    let w = w_class(&spec.w);
    let mut m = w.projector().into_matrix().scale(spec.p);
    m[(0, 0)] += C64::new(1.0 - spec.p, 0.0);
    DensityMatrix::from_hermitian_unchecked(spec.n_qubits(), m)
}

/// Three-member decomposition `|ψ_k⟩ = √p|W⟩ + √(1−p) ω^k |0…0⟩`,
/// `ω = e^{2πi/3}`, each with weight 1/3.
pub fn trial_ensemble(spec: &MixedFamilySpec) -> Ensemble {
    trial_members(spec, spec.p, 1.0)
}

/// The wider family `r/3 Σ_k |ψ_k(q)⟩⟨ψ_k(q)| + (1 − r)|0…0⟩⟨0…0|` with
/// `r q = p`. Requires `p ≤ q ≤ 1` (and `q > 0` unless `p = 0`).
pub fn trial_ensemble_with(spec: &MixedFamilySpec, q: f64) -> Result<Ensemble> {
    let p = spec.p;
    if !(q >= p && q <= 1.0) || (q == 0.0 && p > 0.0) {
        return Err(invalid(format!("q = {q} must lie in [p, 1] = [{p}, 1]")));
    }
    let r = if q == 0.0 { 1.0 } else { p / q };
    Ok(trial_members(spec, q, r))
}

fn trial_members(spec: &MixedFamilySpec, q: f64, r: f64) -> Ensemble {
    let w = w_class(&spec.w);
    let n = spec.n_qubits();
    let (sq, sr) = (q.sqrt(), (1.0 - q).max(0.0).sqrt());
    let mut members: Vec<EnsembleMember> = (0..3)
        .map(|k| {
            let omega = C64::from_polar(1.0, 2.0 * PI * k as f64 / 3.0);
            let mut amps: Vec<C64> = w.amplitudes().iter().map(|x| x * sq).collect();
            amps[0] += omega * sr;
            EnsembleMember { weight: r / 3.0, state: PureState::normalized(n, amps).expect("nonzero member") }
        })
        .collect();
    if 1.0 - r > tol::ZERO_WEIGHT {
        members.push(EnsembleMember { weight: 1.0 - r, state: PureState::basis(n, 0).expect("valid register") });
    }
    Ensemble::new(members).expect("trial decomposition is a valid ensemble")
}

/// Builds the partitioned W state and the partition it lives on.
pub fn w_partitioned(spec: &PartitionedWSpec) -> Result<(PureState, Partition)> {
    let state = w_class(&spec.flatten());
    let blocks = spec.blocks.iter().map(|b| b.name.clone()).zip(spec.block_qubits()).collect();
    let partition = Partition::new(spec.n_qubits(), 0, blocks)?;
    Ok((state, partition))
}

/// The reduced state on the focus plus block `name`, written as a mixed
/// family: `p = |ã|² + Σ_j |x̃_j|²` and amplitudes rescaled by `1/√p`.
pub fn reduced_block_analytic(spec: &PartitionedWSpec, name: &str) -> Result<MixedFamilySpec> {
    let block = spec.block(name).ok_or_else(|| invalid(format!("no block named {name:?}")))?;
    let p = spec.a_tilde.norm_sqr() + block.amplitudes.iter().map(|x| x.norm_sqr()).sum::<f64>();
    if p == 0.0 {
        return Err(Error::DegenerateSpec(format!(
            "focus and block {name:?} amplitudes are all zero; the reduced state is |0…0⟩ with no W component"
        )));
    }
    let s = p.sqrt();
    let w = WClassSpec::new(spec.a_tilde / s, block.amplitudes.iter().map(|x| x / s).collect())?;
    MixedFamilySpec::new(w, p.min(1.0))
}

/// Closed-form reduced state of the mixed family on qubits `{0, j}`,
/// `1 ≤ j ≤ n`.
pub fn reduced_pair_analytic(spec: &MixedFamilySpec, j: usize) -> Result<DensityMatrix> {
    if j == 0 || j > spec.w.b.len() {
        return Err(invalid(format!("pair index {j} outside 1..={}", spec.w.b.len())));
    }
    let (a, bj, p) = (spec.w.a, spec.w.b[j - 1], spec.p);
    let rest: f64 = spec.w.b_norm_sqr() - bj.norm_sqr();
    // basis |00⟩,|01⟩,|10⟩,|11⟩; |ψ_j⟩ = a|10⟩ + b_j|01⟩
    let psi = [zero(), bj, a, zero()];
    let mut m = CMatrix::from_fn(4, 4, |r, c| psi[r] * psi[c].conj() * p);
    m[(0, 0)] += C64::new(1.0 - p + p * rest, 0.0);
    Ok(DensityMatrix::from_hermitian_unchecked(2, m))
}

/// `(|0…0⟩ + |1…1⟩)/√2`.
pub fn ghz(n_qubits: usize) -> Result<PureState> {
    if n_qubits < 2 {
        return Err(invalid("GHZ state needs at least two qubits"));
    }
    if n_qubits > tol::MAX_QUBITS {
        return Err(Error::TooManyQubits { got: n_qubits, max: tol::MAX_QUBITS });
    }
    let mut amplitudes = vec![zero(); 1 << n_qubits];
    amplitudes[0] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amplitudes[(1 << n_qubits) - 1] = amplitudes[0];
    PureState::new(n_qubits, amplitudes)
}

fn check_random_size(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 {
        return Err(invalid("need at least one qubit"));
    }
    if n_qubits > tol::MAX_QUBITS {
        return Err(Error::TooManyQubits { got: n_qubits, max: tol::MAX_QUBITS });
    }
    Ok(())
}

/// Unitarily invariant random pure state.
pub fn random_pure(n_qubits: usize, seed: u64) -> Result<PureState> {
    check_random_size(n_qubits)?;
    random_pure_with(n_qubits, &mut rng::seeded(seed))
}

pub fn random_pure_with(n_qubits: usize, rng: &mut Rng) -> Result<PureState> {
    check_random_size(n_qubits)?;
    let amps = (0..1usize << n_qubits).map(|_| rng::complex_gaussian(rng)).collect();
    PureState::normalized(n_qubits, amps)
}

/// Random density matrix `G G† / tr(G G†)` with `G` a `2^n × rank` Gaussian
/// matrix; full rank `rank` with probability one.
pub fn random_mixed(n_qubits: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_mixed_with(n_qubits, rank, &mut rng::seeded(seed))
}

pub fn random_mixed_with(n_qubits: usize, rank: usize, rng: &mut Rng) -> Result<DensityMatrix> {
    check_random_size(n_qubits)?;
    let d = 1usize << n_qubits;
    if rank == 0 || rank > d {
        return Err(invalid(format!("rank {rank} outside 1..={d}")));
    }
    let g = rng::gaussian_matrix(d, rank, rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    Ok(DensityMatrix::from_hermitian_unchecked(n_qubits, m.unscale(tr)))
}

/// W-class spec on `n_qubits` qubits with Gaussian amplitudes.
pub fn random_w_class(n_qubits: usize, rng: &mut Rng) -> Result<WClassSpec> {
    if n_qubits < 2 {
        return Err(invalid("W-class state needs at least two qubits"));
    }
    check_random_size(n_qubits)?;
    let raw: Vec<C64> = (0..n_qubits).map(|_| rng::complex_gaussian(rng)).collect();
    let norm = raw.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    WClassSpec::new(raw[0] / norm, raw[1..].iter().map(|x| x / norm).collect())
}

/// Block names `B, C, D, …` in order.
pub fn block_name(index: usize) -> String {
    match index {
        0..=24 => char::from(b'B' + index as u8).to_string(),
        _ => format!("X{index}"),
    }
}

pub fn random_partitioned_w(block_sizes: &[usize], rng: &mut Rng) -> Result<PartitionedWSpec> {
    let total: usize = block_sizes.iter().sum();
    let flat = random_w_class(total + 1, rng)?;
    let mut offset = 0;
    let blocks = block_sizes
        .iter()
        .enumerate()
        .map(|(i, &size)| {
            let amplitudes = flat.b[offset..offset + size].to_vec();
            offset += size;
            WBlock { name: block_name(i), amplitudes }
        })
        .collect();
    PartitionedWSpec::new(flat.a, blocks)
}
