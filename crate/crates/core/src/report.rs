//! Aggregated per-state report and its deterministic JSON encoding.

use crate::coherence::{self, CoherenceReport, DEFAULT_SYMMETRY_TOLERANCE};
use crate::entanglement::{schmidt_with, ModeEntanglementReport, DEFAULT_SEPARABILITY_TOLERANCE};
use crate::error::Result;
use crate::factory::{NbarSolution, Probe};
use crate::fock::{FockState, FockVector};
use crate::particle::{decompose_sectors, ParticleReport};
use crate::qfi::{self, QfiOptions, QfiReport};
use serde::ser::Serialize;
use serde::Serialize as DeriveSerialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use std::collections::BTreeMap;
use std::io;

pub const SCHEMA: &str = "mzi-qfi/1";

/// Tolerances that shape a report.
#[derive(Clone, Copy, Debug, PartialEq, DeriveSerialize)]
pub struct AnalysisOptions {
    pub qfi: QfiOptions,
    pub symmetry_tolerance: f64,
    pub separability_tolerance: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            qfi: QfiOptions::default(),
            symmetry_tolerance: DEFAULT_SYMMETRY_TOLERANCE,
            separability_tolerance: DEFAULT_SEPARABILITY_TOLERANCE,
        }
    }
}

#[derive(Clone, Debug, PartialEq, DeriveSerialize)]
pub struct SectorEntry {
    pub n: usize,
    pub weight: f64,
    /// Absent for the vacuum sector.
    pub particle: Option<ParticleReport>,
}

#[derive(Clone, Debug, PartialEq, DeriveSerialize)]
pub struct SectorSummary {
    pub weights_sum: f64,
    /// Photon number when a single sector carries the state.
    pub fixed_number: Option<usize>,
    pub sectors: Vec<SectorEntry>,
}

/// Where the analyzed state came from.
#[derive(Clone, Debug, PartialEq, DeriveSerialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Source {
    Factory {
        probe: Probe,
        nbar_request: Option<NbarSolution>,
    },
    StateFile {
        path: String,
    },
}

#[derive(Clone, Debug, PartialEq, DeriveSerialize)]
pub struct FullReport {
    pub schema: &'static str,
    pub source: Source,
    pub cutoff: usize,
    pub truncation_loss: f64,
    pub coherence: CoherenceReport,
    pub qfi: QfiReport,
    /// Reason text for every null route, keyed by field name.
    pub undefined: BTreeMap<String, String>,
    pub entanglement: ModeEntanglementReport,
    pub sectors: SectorSummary,
}

/// Runs every analysis on `state`.
pub fn analyze_state(state: &FockState, source: Source, opts: &AnalysisOptions) -> Result<FullReport> {
    let coherence = coherence::analyze(state, opts.symmetry_tolerance);
    let qfi = qfi::analyze(state, &coherence, &opts.qfi)?;
    let entanglement = schmidt_with(state, opts.separability_tolerance);
    let decomp = decompose_sectors(state);
    let sectors = SectorSummary {
        weights_sum: decomp.weights_sum,
        fixed_number: decomp.dominant().map(|s| s.n),
        sectors: decomp
            .sectors
            .iter()
            .map(|s| SectorEntry {
                n: s.n,
                weight: s.weight,
                particle: s.report(),
            })
            .collect(),
    };
    let mut undefined = BTreeMap::new();
    for (name, value) in [
        ("coherence.g2_a", coherence.g2_a),
        ("coherence.g2_b", coherence.g2_b),
        ("coherence.g2_ab", coherence.g2_ab),
    ] {
        if let Some(r) = value.reason() {
            undefined.insert(name.to_string(), r.to_string());
        }
    }
    for (name, r) in qfi.undefined_routes() {
        undefined.insert(format!("qfi.{name}"), r.to_string());
    }
    Ok(FullReport {
        schema: SCHEMA,
        source,
        cutoff: state.cutoff(),
        truncation_loss: state.truncation_loss(),
        coherence,
        qfi,
        undefined,
        entanglement,
        sectors,
    })
}

/// Pretty JSON with every float written as 17 significant digits, so equal
/// inputs give byte-identical documents and floats round-trip exactly.
pub struct FixedFloatFormatter {
    inner: PrettyFormatter<'static>,
}

impl Default for FixedFloatFormatter {
    fn default() -> Self {
        FixedFloatFormatter {
            inner: PrettyFormatter::with_indent(b"  "),
        }
    }
}

impl Formatter for FixedFloatFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object_value(writer)
    }
}

/// Serializes `value` with [`FixedFloatFormatter`], ending in a newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedFloatFormatter::default());
    value
        .serialize(&mut ser)
        .expect("report types serialize infallibly");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json emits UTF-8")
}
