use thiserror::Error;

/// Errors raised by state construction and the analytics built on top of it.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("photon number {index} in mode {mode} exceeds cutoff {cutoff}")]
    ExceedsCutoff {
        mode: char,
        index: usize,
        cutoff: usize,
    },

    #[error("raising mode {mode} overflows cutoff {cutoff}: population {population:e} would leave the grid")]
    TruncationOverflow {
        mode: char,
        cutoff: usize,
        population: f64,
    },

    #[error("total-photon sectors above cutoff {cutoff} carry weight {weight:e}; embed the state in a larger cutoff first")]
    SectorOverflow { cutoff: usize, weight: f64 },

    #[error("truncation loss {loss:e} exceeds the allowed {max:e} at cutoff {cutoff}")]
    TruncationLoss { loss: f64, max: f64, cutoff: usize },

    #[error("no cutoff up to the ceiling {ceiling} keeps the truncation loss below {max:e}")]
    CeilingInsufficient { ceiling: usize, max: f64 },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("amplitude grid has {got} entries, expected {expected} for cutoff {cutoff}")]
    GridShape {
        got: usize,
        expected: usize,
        cutoff: usize,
    },

    #[error("moment exponent {0} is above the supported maximum of 4")]
    MomentOrder(u8),

    #[error("direction vector has norm {0}, expected 1")]
    NotUnitVector(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("target mean photon number {nbar} is unattainable for {family}: {reason}")]
    Unattainable {
        family: String,
        nbar: f64,
        reason: String,
    },

    #[error("state is not supported on a single photon-number sector (weight {outside:e} outside sector {n})")]
    NotFixedNumber { n: usize, outside: f64 },

    #[error("finite-difference step {0} is outside [1e-5, 1e-2]")]
    StepOutOfRange(f64),

    #[error("multi-qubit oracle is limited to n <= {max}, got {n}")]
    OracleTooLarge { n: usize, max: usize },

    #[error("moment has imaginary part {0:e}, expected a real value")]
    NotReal(f64),

    #[error("state file: {0}")]
    StateFile(String),

    #[error("norm {norm} deviates from 1 by more than {tol:e}")]
    NormOutOfTolerance { norm: f64, tol: f64 },
}

impl Error {
    /// Stable machine-readable code, used by the command line front end.
    pub fn code(&self) -> &'static str {
        match self {
            Error::ExceedsCutoff { .. } => "exceeds-cutoff",
            Error::TruncationOverflow { .. } => "truncation-overflow",
            Error::SectorOverflow { .. } => "sector-overflow",
            Error::TruncationLoss { .. } => "truncation-loss",
            Error::CeilingInsufficient { .. } => "ceiling-insufficient",
            Error::ZeroNorm => "zero-norm",
            Error::GridShape { .. } => "grid-shape",
            Error::MomentOrder(_) => "moment-order",
            Error::NotUnitVector(_) => "not-unit-vector",
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::Unattainable { .. } => "unattainable",
            Error::NotFixedNumber { .. } => "not-fixed-number",
            Error::StepOutOfRange(_) => "step-out-of-range",
            Error::OracleTooLarge { .. } => "oracle-too-large",
            Error::NotReal(_) => "not-real",
            Error::StateFile(_) => "state-file",
            Error::NormOutOfTolerance { .. } => "norm-out-of-tolerance",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
