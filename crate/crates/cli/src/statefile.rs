//! JSON state files.
//!
//! A file is one object whose `kind` selects the layout. Complex data is
//! stored as parallel `re` / `im` arrays (`im` may be omitted for real data).
//! Canonical field order, as written by [`StateFile::to_canonical`]:
//!
//! | `kind`          | fields after `kind`                                   |
//! |-----------------|-------------------------------------------------------|
//! | `w_class`       | `amplitudes`: `a, b_1, …, b_n`                        |
//! | `mixed_w`       | `p`, `amplitudes`                                     |
//! | `partitioned_w` | `amplitudes`: `ã` then each block in order; `block_sizes` |
//! | `ghz`           | `n_qubits`                                            |
//! | `dense_pure`    | `n_qubits`, `amplitudes` (`2^n` entries)              |
//! | `dense_mixed`   | `n_qubits`, `matrix` (`re`/`im` as lists of rows)     |
//!
//! Parse and validation errors name the offending field path.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use tangle_core::states::{self, block_name, WBlock};
use tangle_core::{CMatrix, DensityMatrix, MixedFamilySpec, Partition, PartitionedWSpec, PureState, WClassSpec, C64};

use crate::report::to_json;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexVec {
    pub re: Vec<f64>,
    #[serde(default)]
    pub im: Vec<f64>,
}

impl ComplexVec {
    pub fn from_complex(values: &[C64]) -> Self {
        Self { re: values.iter().map(|z| z.re).collect(), im: values.iter().map(|z| z.im).collect() }
    }

    fn to_complex(&self, path: &str) -> Result<Vec<C64>, StateFileError> {
        if !self.im.is_empty() && self.im.len() != self.re.len() {
            return Err(StateFileError::at(
                format!("{path}.im"),
                format!("has {} entries but re has {}", self.im.len(), self.re.len()),
            ));
        }
        for (name, part) in [("re", &self.re), ("im", &self.im)] {
            if let Some(i) = part.iter().position(|x| !x.is_finite()) {
                return Err(StateFileError::at(format!("{path}.{name}[{i}]"), "is not finite"));
            }
        }
        Ok((0..self.re.len()).map(|i| C64::new(self.re[i], self.im.get(i).copied().unwrap_or(0.0))).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexRows {
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WClassFile {
    pub amplitudes: ComplexVec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixedWFile {
    pub p: f64,
    pub amplitudes: ComplexVec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionedWFile {
    pub amplitudes: ComplexVec,
    pub block_sizes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GhzFile {
    pub n_qubits: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensePureFile {
    pub n_qubits: usize,
    pub amplitudes: ComplexVec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DenseMixedFile {
    pub n_qubits: usize,
    pub matrix: ComplexRows,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateFile {
    WClass(WClassFile),
    MixedW(MixedWFile),
    PartitionedW(PartitionedWFile),
    Ghz(GhzFile),
    DensePure(DensePureFile),
    DenseMixed(DenseMixedFile),
}

pub const KINDS: [&str; 6] = ["w_class", "mixed_w", "partitioned_w", "ghz", "dense_pure", "dense_mixed"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateFileError {
    /// Dotted path of the offending field; empty for document-level errors.
    pub path: String,
    pub message: String,
}

impl StateFileError {
    fn at(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { path: path.into(), message: message.into() }
    }
}

impl fmt::Display for StateFileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            f.write_str(&self.message)
        } else {
            write!(f, "field `{}`: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for StateFileError {}

/// What a state file resolves to: the state itself plus, for the W
/// families, the parameters that admit closed forms.
#[derive(Debug, Clone)]
pub enum Family {
    WClass(WClassSpec),
    MixedW(MixedFamilySpec),
    PartitionedW(PartitionedWSpec, Partition),
    Ghz,
    Dense,
}

#[derive(Debug, Clone)]
pub enum State {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl State {
    pub fn n_qubits(&self) -> usize {
        match self {
            State::Pure(s) => s.n_qubits(),
            State::Mixed(m) => m.n_qubits(),
        }
    }

    pub fn density(&self) -> DensityMatrix {
        match self {
            State::Pure(s) => s.projector(),
            State::Mixed(m) => m.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Resolved {
    pub kind: &'static str,
    pub state: State,
    pub family: Family,
}

fn body<T: for<'de> Deserialize<'de>>(value: Value) -> Result<T, StateFileError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { String::new() } else { path };
        StateFileError::at(path, e.into_inner().to_string())
    })
}

fn core_error(path: &str) -> impl Fn(tangle_core::Error) -> StateFileError + '_ {
    move |e| StateFileError::at(path, e.to_string())
}

impl StateFile {
    pub fn parse(text: &str) -> Result<Self, StateFileError> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| StateFileError::at("", format!("invalid JSON: {e}")))?;
        let Value::Object(mut map) = value else {
            return Err(StateFileError::at("", "a state file must be a JSON object"));
        };
        let kind = match map.remove("kind") {
            Some(Value::String(k)) => k,
            Some(_) => return Err(StateFileError::at("kind", "must be a string")),
            None => return Err(StateFileError::at("kind", format!("missing; expected one of {}", KINDS.join(", ")))),
        };
        let rest = Value::Object(map);
        Ok(match kind.as_str() {
            "w_class" => StateFile::WClass(body(rest)?),
            "mixed_w" => StateFile::MixedW(body(rest)?),
            "partitioned_w" => StateFile::PartitionedW(body(rest)?),
            "ghz" => StateFile::Ghz(body(rest)?),
            "dense_pure" => StateFile::DensePure(body(rest)?),
            "dense_mixed" => StateFile::DenseMixed(body(rest)?),
            other => {
                return Err(StateFileError::at("kind", format!("unknown kind {other:?}; expected one of {}", KINDS.join(", "))))
            }
        })
    }

    /// Parses and validates in one step.
    pub fn load(text: &str) -> Result<Resolved, StateFileError> {
        Self::parse(text)?.resolve()
    }

    pub fn kind(&self) -> &'static str {
        match self {
            StateFile::WClass(_) => "w_class",
            StateFile::MixedW(_) => "mixed_w",
            StateFile::PartitionedW(_) => "partitioned_w",
            StateFile::Ghz(_) => "ghz",
            StateFile::DensePure(_) => "dense_pure",
            StateFile::DenseMixed(_) => "dense_mixed",
        }
    }

    pub fn resolve(&self) -> Result<Resolved, StateFileError> {
        let kind = self.kind();
        let (state, family) = match self {
            StateFile::WClass(f) => {
                let spec = w_spec(&f.amplitudes)?;
                (State::Pure(states::w_class(&spec)), Family::WClass(spec))
            }
            StateFile::MixedW(f) => {
                let w = w_spec(&f.amplitudes)?;
                let spec = MixedFamilySpec::new(w, f.p).map_err(core_error("p"))?;
                (State::Mixed(states::mixed_family(&spec)), Family::MixedW(spec))
            }
            StateFile::PartitionedW(f) => {
                let amps = f.amplitudes.to_complex("amplitudes")?;
                let total: usize = f.block_sizes.iter().sum();
                if amps.len() != total + 1 {
                    return Err(StateFileError::at(
                        "amplitudes.re",
                        format!("has {} entries but block_sizes need 1 + {total}", amps.len()),
                    ));
                }
                if let Some(i) = f.block_sizes.iter().position(|&s| s == 0) {
                    return Err(StateFileError::at(format!("block_sizes[{i}]"), "blocks must be nonempty"));
                }
                let mut offset = 1;
                let blocks = f
                    .block_sizes
                    .iter()
                    .enumerate()
                    .map(|(i, &size)| {
                        let block = WBlock { name: block_name(i), amplitudes: amps[offset..offset + size].to_vec() };
                        offset += size;
                        block
                    })
                    .collect();
                let spec = PartitionedWSpec::new(amps[0], blocks).map_err(core_error("amplitudes"))?;
                let (state, partition) = states::w_partitioned(&spec).map_err(core_error("block_sizes"))?;
                (State::Pure(state), Family::PartitionedW(spec, partition))
            }
            StateFile::Ghz(f) => (State::Pure(states::ghz(f.n_qubits).map_err(core_error("n_qubits"))?), Family::Ghz),
            StateFile::DensePure(f) => {
                let amps = f.amplitudes.to_complex("amplitudes")?;
                check_len("amplitudes.re", amps.len(), f.n_qubits)?;
                (State::Pure(PureState::new(f.n_qubits, amps).map_err(core_error("amplitudes"))?), Family::Dense)
            }
            StateFile::DenseMixed(f) => {
                let d = check_len("matrix.re", f.matrix.re.len(), f.n_qubits)?;
                let m = rows_to_matrix(&f.matrix, d)?;
                (State::Mixed(DensityMatrix::new(f.n_qubits, m).map_err(core_error("matrix"))?), Family::Dense)
            }
        };
        Ok(Resolved { kind, state, family })
    }

    /// Canonical text: fixed field order, floats at 17 significant digits.
    pub fn to_canonical(&self) -> String {
        to_json(self)
    }

    pub fn w_class(spec: &WClassSpec) -> Self {
        StateFile::WClass(WClassFile { amplitudes: w_amplitudes(spec) })
    }

    pub fn mixed_w(spec: &MixedFamilySpec) -> Self {
        StateFile::MixedW(MixedWFile { p: spec.p(), amplitudes: w_amplitudes(spec.w()) })
    }

    pub fn partitioned_w(spec: &PartitionedWSpec) -> Self {
        let flat = spec.flatten();
        StateFile::PartitionedW(PartitionedWFile {
            amplitudes: w_amplitudes(&flat),
            block_sizes: spec.blocks().iter().map(|b| b.amplitudes.len()).collect(),
        })
    }

    pub fn ghz(n_qubits: usize) -> Self {
        StateFile::Ghz(GhzFile { n_qubits })
    }

    pub fn dense_pure(state: &PureState) -> Self {
        StateFile::DensePure(DensePureFile {
            n_qubits: state.n_qubits(),
            amplitudes: ComplexVec::from_complex(state.amplitudes()),
        })
    }

    pub fn dense_mixed(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        let rows = |f: fn(&C64) -> f64| (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect();
        StateFile::DenseMixed(DenseMixedFile {
            n_qubits: rho.n_qubits(),
            matrix: ComplexRows { re: rows(|z| z.re), im: rows(|z| z.im) },
        })
    }
}

fn w_amplitudes(spec: &WClassSpec) -> ComplexVec {
    let mut amps = vec![spec.a()];
    amps.extend_from_slice(spec.b());
    ComplexVec::from_complex(&amps)
}

fn w_spec(amplitudes: &ComplexVec) -> Result<WClassSpec, StateFileError> {
    let amps = amplitudes.to_complex("amplitudes")?;
    if amps.len() < 2 {
        return Err(StateFileError::at("amplitudes.re", "needs at least two entries (a and one b)"));
    }
    WClassSpec::new(amps[0], amps[1..].to_vec()).map_err(core_error("amplitudes"))
}

fn check_len(path: &str, len: usize, n_qubits: usize) -> Result<usize, StateFileError> {
    if n_qubits == 0 || n_qubits > tangle_core::tol::MAX_QUBITS {
        return Err(StateFileError::at("n_qubits", format!("must be in 1..={}", tangle_core::tol::MAX_QUBITS)));
    }
    let d = 1usize << n_qubits;
    if len != d {
        return Err(StateFileError::at(path, format!("has {len} entries, expected 2^{n_qubits} = {d}")));
    }
    Ok(d)
}

fn rows_to_matrix(rows: &ComplexRows, d: usize) -> Result<CMatrix, StateFileError> {
    if !rows.im.is_empty() && rows.im.len() != d {
        return Err(StateFileError::at("matrix.im", format!("has {} rows, expected {d}", rows.im.len())));
    }
    let mut m = CMatrix::zeros(d, d);
    for i in 0..d {
        let row = ComplexVec { re: rows.re[i].clone(), im: rows.im.get(i).cloned().unwrap_or_default() };
        if row.re.len() != d {
            return Err(StateFileError::at(format!("matrix.re[{i}]"), format!("has {} entries, expected {d}", row.re.len())));
        }
        let values = row.to_complex(&format!("matrix[{i}]"))?;
        for (j, z) in values.into_iter().enumerate() {
            m[(i, j)] = z;
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_w_class_with_real_amplitudes() {
        let r = StateFile::load(r#"{"kind": "w_class", "amplitudes": {"re": [0.6, 0.8]}}"#).unwrap();
        assert_eq!(r.kind, "w_class");
        assert_eq!(r.state.n_qubits(), 2);
    }

    #[test]
    fn errors_cite_field_paths() {
        let cases = [
            (r#"{"kind": "mixed_w", "p": "x", "amplitudes": {"re": [1, 0]}}"#, "p"),
            (r#"{"kind": "mixed_w", "p": 1.5, "amplitudes": {"re": [0.6, 0.8]}}"#, "p"),
            (r#"{"kind": "w_class", "amplitudes": {"re": [0.6, 0.8], "im": [0]}}"#, "amplitudes.im"),
            (r#"{"kind": "w_class", "amplitudes": {"re": [0.6, 0.6]}}"#, "amplitudes"),
            (r#"{"kind": "dense_pure", "n_qubits": 2, "amplitudes": {"re": [1, 0, 0]}}"#, "amplitudes.re"),
            (r#"{"kind": "dense_mixed", "n_qubits": 1, "matrix": {"re": [[1, 0], [0]]}}"#, "matrix.re[1]"),
            (r#"{"kind": "dense_mixed", "n_qubits": 1, "matrix": {"re": [[0.5, 1], [0, 0.5]]}}"#, "matrix"),
            (r#"{"kind": "ghz", "n_qubits": 1}"#, "n_qubits"),
            (r#"{"kind": "ghz", "n_qubits": 3, "extra": 1}"#, "extra"),
            (r#"{"kind": "partitioned_w", "amplitudes": {"re": [0.6, 0.8]}, "block_sizes": [2]}"#, "amplitudes.re"),
            (r#"{"kind": "bogus"}"#, "kind"),
            (r#"{"amplitudes": []}"#, "kind"),
        ];
        for (text, path) in cases {
            let err = StateFile::load(text).unwrap_err();
            assert_eq!(err.path, path, "{text}: {err}");
        }
        let nested = StateFile::load(r#"{"kind": "dense_pure", "n_qubits": 1, "amplitudes": {"re": [1, "0"]}}"#).unwrap_err();
        assert_eq!(nested.path, "amplitudes.re[1]");
        assert!(StateFile::load("[1, 2").unwrap_err().message.contains("invalid JSON"));
    }

    #[test]
    fn partitioned_file_recovers_partition() {
        let text = r#"{"kind": "partitioned_w", "amplitudes": {"re": [0.5, 0.5, 0.5, 0.5]}, "block_sizes": [1, 2]}"#;
        match StateFile::load(text).unwrap().family {
            Family::PartitionedW(_, p) => assert_eq!(p.to_string(), "0|1|2,3"),
            other => panic!("{other:?}"),
        }
    }
}
