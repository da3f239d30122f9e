//! Machine-readable output.
//!
//! Reports are pretty-printed JSON with every float written in scientific
//! notation at 17 significant digits, which round-trips `f64` exactly and
//! makes reruns byte-comparable. Non-finite values become `null`.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use tangle_core::monogamy::{Bound, MonogamyReport, SATURATION_TOLERANCE};
use tangle_core::rng::GENERATOR;
use tangle_core::RoofConfig;

pub struct SciFormatter {
    pretty: PrettyFormatter<'static>,
}

impl SciFormatter {
    pub fn new() -> Self {
        Self { pretty: PrettyFormatter::new() }
    }
}

impl Default for SciFormatter {
    fn default() -> Self {
        Self::new()
    }
}

impl Formatter for SciFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_object_value(writer)
    }
}

/// Serializes `value` with [`SciFormatter`], newline-terminated.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter::new());
    value.serialize(&mut ser).expect("report types serialize infallibly");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

/// Envelope shared by every command.
#[derive(Debug, Serialize)]
pub struct Report<A: Serialize, R: Serialize> {
    pub command: &'static str,
    pub args: A,
    pub seed: u64,
    pub generator: &'static str,
    pub config: ConfigEcho,
    pub results: R,
}

impl<A: Serialize, R: Serialize> Report<A, R> {
    pub fn new(command: &'static str, args: A, roof: &RoofConfig, results: R) -> Self {
        Self { command, args, seed: roof.seed, generator: GENERATOR, config: ConfigEcho::from(roof), results }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub restarts: usize,
    pub ensemble_size: Option<usize>,
    pub max_iterations: usize,
    pub step_tolerance: f64,
    pub certificate_tolerance: f64,
    pub saturation_tolerance: f64,
}

impl From<&RoofConfig> for ConfigEcho {
    fn from(cfg: &RoofConfig) -> Self {
        Self {
            restarts: cfg.restarts,
            ensemble_size: cfg.ensemble_size,
            max_iterations: cfg.max_iterations,
            step_tolerance: cfg.step_tolerance,
            certificate_tolerance: cfg.certificate_tolerance,
            saturation_tolerance: SATURATION_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundOut {
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub certified: bool,
}

impl From<&Bound> for BoundOut {
    fn from(b: &Bound) -> Self {
        Self { estimate: b.estimate(), lower: b.lower(), upper: b.upper(), certified: b.certified() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TermOut {
    pub label: String,
    #[serde(flatten)]
    pub bound: BoundOut,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonogamyOut {
    pub measure: &'static str,
    pub lhs: BoundOut,
    pub terms: Vec<TermOut>,
    pub rhs_sum: f64,
    pub slack: f64,
    pub slack_range: [f64; 2],
    pub verdict: &'static str,
    pub certified: bool,
    pub saturation_tolerance: f64,
}

impl From<&MonogamyReport> for MonogamyOut {
    fn from(r: &MonogamyReport) -> Self {
        Self {
            measure: r.measure.name(),
            lhs: BoundOut::from(&r.lhs),
            terms: r
                .rhs_terms
                .iter()
                .map(|t| TermOut { label: t.label.clone(), bound: BoundOut::from(&t.bound) })
                .collect(),
            rhs_sum: r.rhs_sum(),
            slack: r.slack,
            slack_range: [r.slack_range.0, r.slack_range.1],
            verdict: r.verdict.name(),
            certified: r.certified(),
            saturation_tolerance: r.saturation_tolerance,
        }
    }
}
