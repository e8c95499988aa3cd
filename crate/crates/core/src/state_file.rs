//! JSON state files.
//!
//! ```json
//! {"cutoff": 2, "amplitudes": [{"ja": 1, "jb": 0, "re": 1.0, "im": 0.0}]}
//! ```
//!
//! Missing entries are zero. The writer emits nonzero entries in row-major
//! order with 17 significant digits, so a written state reads back bit for
//! bit.

use crate::error::{Error, Result};
use crate::fock::{FockState, FockVector, UnnormalizedState};
use crate::report::to_json;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Largest accepted deviation of the norm from 1.
pub const NORM_ACCEPT: f64 = 1e-6;
/// Deviation above which renormalization is reported as a warning.
pub const NORM_WARN: f64 = 1e-10;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    ja: usize,
    jb: usize,
    re: f64,
    im: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    cutoff: usize,
    amplitudes: Vec<Entry>,
}

/// A parsed state and any warnings raised while reading it.
#[derive(Debug)]
pub struct LoadedState {
    pub state: FockState,
    pub warnings: Vec<String>,
}

pub fn write_state(state: &FockState) -> String {
    let dim = state.dim();
    let amplitudes = state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != Complex64::new(0.0, 0.0))
        .map(|(idx, c)| Entry {
            ja: idx / dim,
            jb: idx % dim,
            re: c.re,
            im: c.im,
        })
        .collect();
    to_json(&Document {
        cutoff: state.cutoff(),
        amplitudes,
    })
}

pub fn read_state(text: &str) -> Result<LoadedState> {
    let doc: Document =
        serde_json::from_str(text).map_err(|e| Error::StateFile(format!("malformed JSON: {e}")))?;
    let cutoff = doc.cutoff;
    let mut grid = UnnormalizedState::zeros(cutoff);
    let mut seen = BTreeSet::new();
    for e in &doc.amplitudes {
        for (mode, index) in [('a', e.ja), ('b', e.jb)] {
            if index > cutoff {
                return Err(Error::ExceedsCutoff {
                    mode,
                    index,
                    cutoff,
                });
            }
        }
        if !(e.re.is_finite() && e.im.is_finite()) {
            return Err(Error::StateFile(format!(
                "non-finite amplitude at ({}, {})",
                e.ja, e.jb
            )));
        }
        if !seen.insert((e.ja, e.jb)) {
            return Err(Error::StateFile(format!(
                "duplicate entry for ({}, {})",
                e.ja, e.jb
            )));
        }
        grid.set(e.ja, e.jb, Complex64::new(e.re, e.im));
    }
    let norm = grid.norm_sqr().sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let deviation = (norm - 1.0).abs();
    if deviation > NORM_ACCEPT * (1.0 + 1e-9) {
        return Err(Error::NormOutOfTolerance {
            norm,
            tol: NORM_ACCEPT,
        });
    }
    let mut warnings = Vec::new();
    if deviation > NORM_WARN {
        warnings.push(format!("state norm {norm} renormalized to 1"));
    }
    Ok(LoadedState {
        state: grid.normalize()?,
        warnings,
    })
}
