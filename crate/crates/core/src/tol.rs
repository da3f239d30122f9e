//! Numerical tolerances shared across the crate.

/// Entrywise Hermiticity and normalization tolerance for validated inputs.
pub const HERMITIAN: f64 = 1e-10;
pub const NORMALIZATION: f64 = 1e-10;
/// Smallest eigenvalue accepted for a density matrix.
pub const PSD_FLOOR: f64 = -1e-9;
/// Frobenius residual allowed when reconstructing a matrix from its eigenpairs.
pub const RECONSTRUCTION: f64 = 1e-9;
/// Eigenvalues at or below this are treated as exact zeros when building
/// spectral ensembles.
pub const RANK_CUTOFF: f64 = 1e-10;
/// Ensemble members lighter than this are dropped.
pub const ZERO_WEIGHT: f64 = 1e-12;
/// Largest supported register.
pub const MAX_QUBITS: usize = 12;
