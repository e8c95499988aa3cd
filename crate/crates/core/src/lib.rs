//! Two-mode interferometer probes in a truncated Fock basis: state
//! construction, optical coherences, quantum Fisher information by several
//! independent routes, and mode- and particle-picture entanglement.

pub mod audit;
pub mod coherence;
pub mod entanglement;
pub mod error;
pub mod factory;
pub mod fock;
pub mod particle;
pub mod qfi;
pub mod report;
pub mod scalar;
pub mod schwinger;
pub mod state_file;

pub use coherence::CoherenceReport;
pub use entanglement::ModeEntanglementReport;
pub use error::{Error, Result};
pub use factory::{build, build_probe, BuildConfig, CutoffPolicy, Family, Probe, ProbeSpec};
pub use fock::{FockState, FockVector, Mode, MomentSpec, UnnormalizedState};
pub use particle::{ParticleReport, SectorDecomposition};
pub use qfi::QfiReport;
pub use report::{AnalysisOptions, FullReport};
pub use scalar::{Reason, Scalar};
pub use schwinger::{BeamSplitter, GeneratorTag, SpinDirection};
