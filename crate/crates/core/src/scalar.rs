//! Report values that may be physically undefined.
//!
//! A dark mode makes every normalized second-order coherence meaningless, and
//! the particle-picture QFI only exists for fixed photon number. Those cases
//! are carried as [`Scalar::Undefined`] with a reason and never collapse to 0.

use serde::{Serialize, Serializer};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reason {
    /// Mode `a` intensity is below the darkness threshold.
    DarkModeA,
    /// Mode `b` intensity is below the darkness threshold.
    DarkModeB,
    /// A coherence function the formula needs is itself undefined.
    UndefinedCoherence,
    NotPathSymmetric,
    ParticleFluctuations,
    ZeroInformation,
    NoPhotons,
}

impl Reason {
    pub fn as_str(self) -> &'static str {
        match self {
            Reason::DarkModeA => "mode a intensity below 1e-9",
            Reason::DarkModeB => "mode b intensity below 1e-9",
            Reason::UndefinedCoherence => "required coherence function undefined",
            Reason::NotPathSymmetric => "state is not path symmetric",
            Reason::ParticleFluctuations => "particle fluctuations present",
            Reason::ZeroInformation => "quantum Fisher information is zero",
            Reason::NoPhotons => "mean photon number is zero",
        }
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A real value, or the reason it does not exist.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scalar {
    Value(f64),
    Undefined(Reason),
}

impl Scalar {
    pub fn value(self) -> Option<f64> {
        match self {
            Scalar::Value(v) => Some(v),
            Scalar::Undefined(_) => None,
        }
    }

    pub fn is_defined(self) -> bool {
        matches!(self, Scalar::Value(_))
    }

    pub fn reason(self) -> Option<Reason> {
        match self {
            Scalar::Value(_) => None,
            Scalar::Undefined(r) => Some(r),
        }
    }

    /// Panics with `msg` when undefined. Test helper.
    #[track_caller]
    pub fn expect(self, msg: &str) -> f64 {
        match self {
            Scalar::Value(v) => v,
            Scalar::Undefined(r) => panic!("{msg}: undefined ({r})"),
        }
    }
}

impl From<f64> for Scalar {
    fn from(v: f64) -> Self {
        Scalar::Value(v)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Scalar::Value(v) => serializer.serialize_f64(*v),
            Scalar::Undefined(_) => serializer.serialize_none(),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Value(v) => write!(f, "{v}"),
            Scalar::Undefined(_) => f.write_str("UNDEFINED"),
        }
    }
}
