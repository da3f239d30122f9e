//! Fixed inputs shared by the benchmarks, so every run times the same states.

use tangle_core::states::{mixed_family, random_mixed, random_pure, w_class};
use tangle_core::{DensityMatrix, MixedFamilySpec, PureState, WClassSpec};

/// Seeded random pure state on `n` qubits.
pub fn pure(n: usize) -> PureState {
    random_pure(n, 1).expect("valid size")
}

/// Seeded random two-qubit mixed state of the given rank.
pub fn two_qubit_mixed(rank: usize) -> DensityMatrix {
    random_mixed(2, rank, 2).expect("valid rank")
}

/// Uniform W state on `n` qubits.
pub fn w(n: usize) -> PureState {
    w_class(&WClassSpec::uniform(n).expect("n >= 2"))
}

/// `p |W'><W'| + (1 - p) |0..0><0..0|` with `W'` uniform on `n` qubits.
pub fn w_mixture(n: usize, p: f64) -> DensityMatrix {
    mixed_family(&MixedFamilySpec::new(WClassSpec::uniform(n).expect("n >= 2"), p).expect("p in [0, 1]"))
}
