//! Closed-form entanglement measures.
//!
//! - Pure states: concurrence `2√det ρ_A` for a one-qubit side,
//!   `√(2(1 − tr ρ_A²))` otherwise; the tangle is its square.
//! - Two-qubit mixed states: Wootters concurrence.
//! - Any state: negativity `‖ρ^{T_A}‖₁ − 1` and realignment measure
//!   `max(0, ‖R(ρ)‖₁ − 1)`. Both are normalized so a Bell state scores 1 and
//!   both lower-bound the concurrence when side A is a single qubit.

use std::fmt;

use crate::error::{invalid, Result};
use crate::qstate::{eigh_hermitian_part, partial_transpose, realign, trace_norm, CMatrix, DensityMatrix, PureState, QubitCut};
use crate::states::MixedFamilySpec;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasureKind {
    Concurrence,
    Tangle,
    Negativity,
    Realignment,
}

impl MeasureKind {
    pub fn name(self) -> &'static str {
        match self {
            MeasureKind::Concurrence => "concurrence",
            MeasureKind::Tangle => "tangle",
            MeasureKind::Negativity => "negativity",
            MeasureKind::Realignment => "realignment",
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A measure value together with the cut it was evaluated across.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureValue {
    pub kind: MeasureKind,
    pub value: f64,
    pub cut: QubitCut,
}

/// Eigenvalues of the Wootters spin-flip product below this are treated as
/// zero when factoring ρ.
const WOOTTERS_RANK_CUTOFF: f64 = 1e-14;

/// `p · τ(ρ/p)` for an unnormalized reduced state `reduced` with trace `p`.
///
/// One qubit: `4 det ρ / p`. Larger sides: `2(p − tr ρ² / p)`.
pub(crate) fn weighted_tangle(reduced: &CMatrix) -> f64 {
    let p = reduced.trace().re;
    if p <= 1e-300 {
        return 0.0;
    }
    let value = if reduced.nrows() == 2 {
        let det = reduced[(0, 0)].re * reduced[(1, 1)].re - reduced[(0, 1)].norm_sqr();
        4.0 * det / p
    } else {
        let purity: f64 = reduced.iter().map(|z| z.norm_sqr()).sum();
        2.0 * (p - purity / p)
    };
    value.max(0.0)
}

/// Tangle across `cut` of a pure state.
pub fn pure_tangle(state: &PureState, cut: &QubitCut) -> Result<MeasureValue> {
    let n = state.n_qubits();
    cut.check(n)?;
    let m = state.coefficient_matrix(cut.side_a());
    // tr ρ_A² = tr ρ_B²; form whichever reduced matrix is smaller
    let gram = if m.nrows() <= m.ncols() { &m * m.adjoint() } else { m.adjoint() * &m };
    Ok(MeasureValue { kind: MeasureKind::Tangle, value: weighted_tangle(&gram), cut: cut.clone() })
}

/// Concurrence across `cut` of a pure state.
pub fn pure_concurrence(state: &PureState, cut: &QubitCut) -> Result<MeasureValue> {
    let tangle = pure_tangle(state, cut)?;
    Ok(MeasureValue { kind: MeasureKind::Concurrence, value: tangle.value.sqrt(), cut: tangle.cut })
}

/// Wootters concurrence `max(0, λ1 − λ2 − λ3 − λ4)` of a two-qubit state,
/// where `λ_i` are the square roots of the eigenvalues of `ρ ρ̃`,
/// `ρ̃ = (σ_y ⊗ σ_y) ρ* (σ_y ⊗ σ_y)`.
///
/// The `λ_i` are computed as the singular values of `Aᵀ (σ_y ⊗ σ_y) A` with
/// `ρ = A A†`; that matrix has the same spectrum as `ρ ρ̃` after squaring and
/// avoids taking square roots of roundoff-level eigenvalues.
pub fn wootters_concurrence(rho: &DensityMatrix) -> Result<MeasureValue> {
    if rho.n_qubits() != 2 {
        return Err(invalid(format!("Wootters concurrence needs 2 qubits, got {}", rho.n_qubits())));
    }
    let spectrum = eigh_hermitian_part(rho.matrix());
    let kept: Vec<usize> = (0..4).filter(|&k| spectrum.values[k] > WOOTTERS_RANK_CUTOFF).collect();
    let value = if kept.is_empty() {
        0.0
    } else {
        let a = CMatrix::from_fn(4, kept.len(), |i, c| {
            let k = kept[c];
            spectrum.vectors[(i, k)] * spectrum.values[k].sqrt()
        });
        let flip = spin_flip();
        let t = a.transpose() * flip * &a;
        let mut lambdas: Vec<f64> = t.singular_values().iter().copied().collect();
        lambdas.sort_by(|x, y| y.total_cmp(x));
        (lambdas[0] - lambdas[1..].iter().sum::<f64>()).max(0.0)
    };
    Ok(MeasureValue { kind: MeasureKind::Concurrence, value: value.min(1.0), cut: QubitCut::single(0) })
}

/// `σ_y ⊗ σ_y` in the computational basis.
fn spin_flip() -> CMatrix {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    CMatrix::from_row_slice(4, 4, &[z, z, z, -one, z, z, one, z, z, one, z, z, -one, z, z, z])
}

/// Squared Wootters concurrence; equals the two-qubit tangle.
pub fn wootters_tangle(rho: &DensityMatrix) -> Result<MeasureValue> {
    let c = wootters_concurrence(rho)?;
    Ok(MeasureValue { kind: MeasureKind::Tangle, value: c.value * c.value, cut: c.cut })
}

/// `‖ρ^{T_A}‖₁ − 1`, clamped at zero.
pub fn negativity(rho: &DensityMatrix, cut: &QubitCut) -> Result<MeasureValue> {
    cut.check(rho.n_qubits())?;
    let pt = partial_transpose(rho, cut.side_a())?;
    let norm: f64 = eigh_hermitian_part(&pt).values.iter().map(|v| v.abs()).sum();
    Ok(MeasureValue { kind: MeasureKind::Negativity, value: (norm - 1.0).max(0.0), cut: cut.clone() })
}

/// `max(0, ‖R(ρ)‖₁ − 1)` with `R` the realignment across `cut`.
pub fn realignment_measure(rho: &DensityMatrix, cut: &QubitCut) -> Result<MeasureValue> {
    let r = realign(rho, cut)?;
    Ok(MeasureValue { kind: MeasureKind::Realignment, value: (trace_norm(&r) - 1.0).max(0.0), cut: cut.clone() })
}

/// Tangle of the W/vacuum mixture across qubit 0: `4 p² |a|² Σ_j |b_j|²`.
pub fn mixed_family_tangle(spec: &MixedFamilySpec) -> MeasureValue {
    let p = spec.p();
    let value = 4.0 * p * p * spec.w().a().norm_sqr() * spec.w().b_norm_sqr();
    MeasureValue { kind: MeasureKind::Tangle, value, cut: QubitCut::single(0) }
}
