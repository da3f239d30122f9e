//! Entanglement measures, convex-roof tangle certificates and monogamy
//! checks for small multi-qubit states.
//!
//! Everything is dense: a state on `n` qubits is a vector (or matrix) of side
//! `2^n`, with qubit 0 the leftmost tensor factor. The crate is organized
//! bottom-up:
//!
//! - [`qstate`]: state types, partial trace/transpose, realignment, spectral
//!   helpers.
//! - [`states`]: W-class states, the W/vacuum mixed family, block-partitioned
//!   W states, trial decompositions and seeded random states.
//! - [`measures`]: concurrence, tangle, Wootters concurrence, negativity and
//!   the realignment measure.
//! - [`convexroof`]: numerical minimization of the average tangle over
//!   decompositions, with CKW lower bounds to certify the result.
//! - [`monogamy`]: CKW and partitioned monogamy checks and the residual
//!   tangle.

pub mod convexroof;
mod error;
pub mod measures;
pub mod monogamy;
pub mod qstate;
pub mod rng;
pub mod states;
pub mod tol;

pub use convexroof::{certified_tangle, optimize_roof, RoofBracket, RoofConfig};
pub use error::{Error, Result};
pub use measures::{MeasureKind, MeasureValue};
pub use monogamy::{MonogamyReport, Partition, Verdict};
pub use num_complex::Complex64 as C64;
pub use qstate::{CMatrix, DensityMatrix, PureState, QubitCut};
pub use states::{Ensemble, MixedFamilySpec, PartitionedWSpec, WClassSpec};
