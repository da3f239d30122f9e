//! Dense n-qubit states and the linear algebra they need.
//!
//! Qubit 0 is the leftmost tensor factor: the basis label `|q0 q1 … q(n-1)⟩`
//! is stored at index `Σ q_k · 2^(n-1-k)`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{invalid, Error, Result};
use crate::tol;
use crate::C64;

pub type CMatrix = DMatrix<C64>;

/// Unit-norm amplitude vector over `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

/// Hermitian, positive-semidefinite, unit-trace matrix over `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: CMatrix,
}

/// One side of a bipartition: `side_a` is a nonempty set of qubits, the other
/// side is its complement in whatever register the cut is applied to.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QubitCut {
    side_a: Vec<usize>,
}

/// Eigenpairs of a Hermitian matrix, eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: CMatrix,
}

fn check_register(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 {
        return Err(invalid("a register needs at least one qubit"));
    }
    if n_qubits > tol::MAX_QUBITS {
        return Err(Error::TooManyQubits { got: n_qubits, max: tol::MAX_QUBITS });
    }
    Ok(())
}

/// Sorted, deduplicated-checked copy of `qubits`, all `< n_qubits`.
pub(crate) fn normalize_qubits(qubits: &[usize], n_qubits: usize) -> Result<Vec<usize>> {
    let mut sorted = qubits.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(invalid(format!("qubit {} listed twice", w[0])));
        }
    }
    if let Some(&q) = sorted.iter().find(|&&q| q >= n_qubits) {
        return Err(invalid(format!("qubit {q} out of range for a {n_qubits}-qubit register")));
    }
    Ok(sorted)
}

pub(crate) fn complement(qubits: &[usize], n_qubits: usize) -> Vec<usize> {
    (0..n_qubits).filter(|q| !qubits.contains(q)).collect()
}

/// `table[x]` is the global basis index whose bits on `qubits` spell the
/// local index `x` (first listed qubit is the most significant local bit) and
/// whose other bits are zero.
pub(crate) fn embed_table(qubits: &[usize], n_qubits: usize) -> Vec<usize> {
    let k = qubits.len();
    (0..1usize << k)
        .map(|x| {
            qubits.iter().enumerate().fold(0usize, |acc, (t, &q)| {
                if (x >> (k - 1 - t)) & 1 == 1 {
                    acc | (1 << (n_qubits - 1 - q))
                } else {
                    acc
                }
            })
        })
        .collect()
}

impl PureState {
    pub fn new(n_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        check_register(n_qubits)?;
        if amplitudes.len() != 1 << n_qubits {
            return Err(invalid(format!(
                "{} amplitudes given for {} qubits (expected {})",
                amplitudes.len(),
                n_qubits,
                1usize << n_qubits
            )));
        }
        let norm2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > tol::NORMALIZATION {
            return Err(invalid(format!("squared norm {norm2} is not 1")));
        }
        Ok(Self { n_qubits, amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(n_qubits: usize, mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(invalid("cannot normalize a zero or non-finite vector"));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::new(n_qubits, amplitudes)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_register(n_qubits)?;
        if index >= 1 << n_qubits {
            return Err(invalid(format!("basis index {index} out of range")));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(Self { n_qubits, amplitudes })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn projector(&self) -> DensityMatrix {
        let v = nalgebra::DVector::from_column_slice(&self.amplitudes);
        DensityMatrix { n_qubits: self.n_qubits, matrix: &v * v.adjoint() }
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    /// Tensor product `self ⊗ other`; `self` occupies the leading qubits.
    pub fn kron(&self, other: &PureState) -> Result<PureState> {
        check_register(self.n_qubits + other.n_qubits)?;
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Ok(PureState { n_qubits: self.n_qubits + other.n_qubits, amplitudes })
    }

    /// Applies a 2×2 unitary `gate` (row-major) to `qubit`.
    pub fn apply_single_qubit(&self, qubit: usize, gate: &[[C64; 2]; 2]) -> Result<PureState> {
        if qubit >= self.n_qubits {
            return Err(invalid(format!("qubit {qubit} out of range")));
        }
        let mask = 1 << (self.n_qubits - 1 - qubit);
        let mut out = self.amplitudes.clone();
        for i in (0..self.dim()).filter(|i| i & mask == 0) {
            let (x0, x1) = (self.amplitudes[i], self.amplitudes[i | mask]);
            out[i] = gate[0][0] * x0 + gate[0][1] * x1;
            out[i | mask] = gate[1][0] * x0 + gate[1][1] * x1;
        }
        Ok(PureState { n_qubits: self.n_qubits, amplitudes: out })
    }

    /// Coefficient matrix `M` with `M[(i, k)] = ⟨i_A k_B|ψ⟩`, rows indexed by
    /// `side_a` and columns by the remaining qubits (both in ascending order).
    pub(crate) fn coefficient_matrix(&self, side_a: &[usize]) -> CMatrix {
        let side_b = complement(side_a, self.n_qubits);
        let ea = embed_table(side_a, self.n_qubits);
        let eb = embed_table(&side_b, self.n_qubits);
        CMatrix::from_fn(ea.len(), eb.len(), |i, k| self.amplitudes[ea[i] | eb[k]])
    }

    /// Reduced state on `keep` (kept qubits in ascending order). Equivalent to
    /// `partial_trace(&self.projector(), keep)` without forming the projector.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(invalid("keep set is empty"));
        }
        let keep = normalize_qubits(keep, self.n_qubits)?;
        let m = self.coefficient_matrix(&keep);
        Ok(DensityMatrix::from_hermitian_unchecked(keep.len(), &m * m.adjoint()))
    }
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(n_qubits: usize, matrix: CMatrix) -> Result<Self> {
        check_register(n_qubits)?;
        let d = 1usize << n_qubits;
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(invalid(format!(
                "matrix is {}x{}, expected {d}x{d} for {n_qubits} qubits",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        check_hermitian(&matrix)?;
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > tol::NORMALIZATION || trace.im.abs() > tol::NORMALIZATION {
            return Err(invalid(format!("trace {trace} is not 1")));
        }
        let spectrum = eigh(&matrix)?;
        let smallest = spectrum.values.last().copied().unwrap_or(0.0);
        if smallest < tol::PSD_FLOOR {
            return Err(invalid(format!("matrix is not positive semidefinite (eigenvalue {smallest})")));
        }
        Ok(Self { n_qubits, matrix })
    }

    /// Wraps a matrix known to be a density matrix up to roundoff; the
    /// Hermitian part is kept.
    pub(crate) fn from_hermitian_unchecked(n_qubits: usize, matrix: CMatrix) -> Self {
        let matrix = (&matrix + matrix.adjoint()).scale(0.5);
        Self { n_qubits, matrix }
    }

    /// Maximally mixed state `I / 2^n`.
    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        check_register(n_qubits)?;
        let d = 1usize << n_qubits;
        Ok(Self { n_qubits, matrix: CMatrix::identity(d, d).scale(1.0 / d as f64) })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn kron(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        check_register(self.n_qubits + other.n_qubits)?;
        Ok(DensityMatrix {
            n_qubits: self.n_qubits + other.n_qubits,
            matrix: self.matrix.kronecker(&other.matrix),
        })
    }

    pub fn purity(&self) -> f64 {
        // tr ρ² = Σ |ρ_ij|² for Hermitian ρ
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn eigh(&self) -> Eigh {
        eigh_hermitian_part(&self.matrix)
    }

    /// Number of eigenvalues above `cutoff`.
    pub fn rank(&self, cutoff: f64) -> usize {
        self.eigh().values.iter().filter(|&&v| v > cutoff).count()
    }

    /// Frobenius distance to another matrix of the same size.
    pub fn distance(&self, other: &CMatrix) -> f64 {
        (&self.matrix - other).norm()
    }
}

impl From<&PureState> for DensityMatrix {
    fn from(state: &PureState) -> Self {
        state.projector()
    }
}

impl QubitCut {
    pub fn new(side_a: impl Into<Vec<usize>>) -> Result<Self> {
        let mut side_a = side_a.into();
        if side_a.is_empty() {
            return Err(invalid("cut side is empty"));
        }
        side_a.sort_unstable();
        if side_a.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("cut lists a qubit twice"));
        }
        Ok(Self { side_a })
    }

    pub fn single(qubit: usize) -> Self {
        Self { side_a: vec![qubit] }
    }

    pub fn side_a(&self) -> &[usize] {
        &self.side_a
    }

    pub fn side_b(&self, n_qubits: usize) -> Vec<usize> {
        complement(&self.side_a, n_qubits)
    }

    /// Checks that the cut is a proper bipartition of an `n_qubits` register.
    pub fn check(&self, n_qubits: usize) -> Result<()> {
        normalize_qubits(&self.side_a, n_qubits)?;
        if self.side_a.len() >= n_qubits {
            return Err(invalid(format!(
                "cut {:?} leaves nothing on the other side of a {n_qubits}-qubit register",
                self.side_a
            )));
        }
        Ok(())
    }
}

impl std::fmt::Display for QubitCut {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let labels: Vec<String> = self.side_a.iter().map(|q| q.to_string()).collect();
        write!(f, "{{{}}}:rest", labels.join(","))
    }
}

fn check_hermitian(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(invalid(format!("matrix is {}x{}, not square", m.nrows(), m.ncols())));
    }
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            if (m[(i, j)] - m[(j, i)].conj()).norm() > tol::HERMITIAN {
                return Err(invalid(format!("matrix is not Hermitian at ({i}, {j})")));
            }
        }
    }
    Ok(())
}

/// Reduced density matrix on `keep`; the kept qubits retain their relative
/// order.
pub fn partial_trace(state: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(invalid("keep set is empty"));
    }
    let n = state.n_qubits;
    let keep = normalize_qubits(keep, n)?;
    let traced = complement(&keep, n);
    let ek = embed_table(&keep, n);
    let et = embed_table(&traced, n);
    let rho = &state.matrix;
    let out = CMatrix::from_fn(ek.len(), ek.len(), |i, j| {
        et.iter().map(|&t| rho[(ek[i] | t, ek[j] | t)]).sum()
    });
    debug_assert!((out.trace().re - 1.0).abs() < 1e-8);
    debug_assert!((&out - out.adjoint()).norm() < 1e-8);
    Ok(DensityMatrix::from_hermitian_unchecked(keep.len(), out))
}

/// Transposes the tensor factors listed in `on`.
pub fn partial_transpose(state: &DensityMatrix, on: &[usize]) -> Result<CMatrix> {
    let on = normalize_qubits(on, state.n_qubits)?;
    let mask = on.iter().fold(0usize, |acc, &q| acc | 1 << (state.n_qubits - 1 - q));
    let rho = &state.matrix;
    Ok(CMatrix::from_fn(rho.nrows(), rho.ncols(), |i, j| {
        rho[((i & !mask) | (j & mask), (j & !mask) | (i & mask))]
    }))
}

/// Realigned matrix across `cut`: entry `((i,j), (k,l))` is `ρ[(i k), (j l)]`,
/// with `i, j` indexing `side_a` and `k, l` the complement. Shape
/// `d_a² × d_b²`.
pub fn realign(state: &DensityMatrix, cut: &QubitCut) -> Result<CMatrix> {
    let n = state.n_qubits;
    cut.check(n)?;
    let ea = embed_table(cut.side_a(), n);
    let eb = embed_table(&cut.side_b(n), n);
    let (da, db) = (ea.len(), eb.len());
    let rho = &state.matrix;
    Ok(CMatrix::from_fn(da * da, db * db, |row, col| {
        let (i, j) = (row / da, row % da);
        let (k, l) = (col / db, col % db);
        rho[(ea[i] | eb[k], ea[j] | eb[l])]
    }))
}

/// Sum of singular values.
pub fn trace_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().sum()
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
pub fn eigh(m: &CMatrix) -> Result<Eigh> {
    check_hermitian(m)?;
    Ok(eigh_hermitian_part(m))
}

/// Eigendecomposition of the Hermitian part `(m + m†)/2`.
pub(crate) fn eigh_hermitian_part(m: &CMatrix) -> Eigh {
    let h = (m + m.adjoint()).scale(0.5);
    let dec = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..dec.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| dec.eigenvalues[b].total_cmp(&dec.eigenvalues[a]));
    let values = order.iter().map(|&k| dec.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), order.len(), |i, c| dec.eigenvectors[(i, order[c])]);
    Eigh { values, vectors }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn bell() -> PureState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(2, vec![c(s), c(0.0), c(0.0), c(s)]).unwrap()
    }

    #[test]
    fn index_convention_puts_qubit_zero_leftmost() {
        // |10⟩ has index 2
        let s = PureState::basis(2, 2).unwrap();
        let rho0 = s.reduced(&[0]).unwrap();
        assert_abs_diff_eq!(rho0.matrix()[(1, 1)].re, 1.0);
        let rho1 = s.reduced(&[1]).unwrap();
        assert_abs_diff_eq!(rho1.matrix()[(0, 0)].re, 1.0);
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let rho = partial_trace(&bell().projector(), &[0]).unwrap();
        let expected = DensityMatrix::maximally_mixed(1).unwrap();
        assert!(rho.distance(expected.matrix()) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_keep_sets() {
        let rho = bell().projector();
        assert!(matches!(partial_trace(&rho, &[]), Err(Error::InvalidArgument(_))));
        assert!(matches!(partial_trace(&rho, &[2]), Err(Error::InvalidArgument(_))));
        assert!(matches!(partial_trace(&rho, &[0, 0]), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn bell_partial_transpose_spectrum() {
        let pt = partial_transpose(&bell().projector(), &[0]).unwrap();
        let e = eigh(&pt).unwrap();
        let expected = [0.5, 0.5, 0.5, -0.5];
        for (v, x) in e.values.iter().zip(expected) {
            assert_abs_diff_eq!(*v, x, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(trace_norm(&pt), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_transpose_out_of_range() {
        assert!(partial_transpose(&bell().projector(), &[3]).is_err());
    }

    #[test]
    fn bell_realignment_trace_norm() {
        let r = realign(&bell().projector(), &QubitCut::single(0)).unwrap();
        assert_eq!((r.nrows(), r.ncols()), (4, 4));
        assert_abs_diff_eq!(trace_norm(&r), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn realign_rejects_full_cut() {
        let cut = QubitCut::new(vec![0, 1]).unwrap();
        assert!(realign(&bell().projector(), &cut).is_err());
        assert!(QubitCut::new(Vec::new()).is_err());
    }

    #[test]
    fn trace_norm_simple_cases() {
        assert_abs_diff_eq!(trace_norm(&CMatrix::identity(4, 4)), 4.0, epsilon = 1e-14);
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.5), c(0.5), c(0.5), c(-0.5)]));
        assert_abs_diff_eq!(trace_norm(&d), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn eigh_simple_cases() {
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.3), c(0.7)]));
        let e = eigh(&d).unwrap();
        assert_abs_diff_eq!(e.values[0], 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(e.values[1], 0.3, epsilon = 1e-15);

        let x = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
        let e = eigh(&x).unwrap();
        assert_abs_diff_eq!(e.values[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.values[1], -1.0, epsilon = 1e-15);
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
        assert!(matches!(eigh(&m), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn density_matrix_validation() {
        let not_unit = CMatrix::identity(2, 2);
        assert!(DensityMatrix::new(1, not_unit).is_err());
        let negative = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.5), c(-0.5)]));
        assert!(DensityMatrix::new(1, negative).is_err());
        assert!(DensityMatrix::new(13, CMatrix::zeros(1, 1)).is_err());
        assert!(PureState::new(2, vec![c(1.0); 3]).is_err());
    }
}
