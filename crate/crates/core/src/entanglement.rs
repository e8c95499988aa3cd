//! Entanglement between the two arms.

use crate::fock::{FockState, FockVector};
use nalgebra::DMatrix;
use serde::Serialize;

/// Default tolerance on `1 − λ_max` for separability.
pub const DEFAULT_SEPARABILITY_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModeEntanglementReport {
    /// Schmidt coefficients, descending. Zeros are dropped.
    pub schmidt_values: Vec<f64>,
    /// Entanglement entropy in nats.
    pub entropy: f64,
    pub entropy_bits: f64,
    pub separable: bool,
    pub separability_tolerance: f64,
}

/// Schmidt decomposition across the `a|b` split with the default tolerance.
pub fn schmidt(state: &FockState) -> ModeEntanglementReport {
    schmidt_with(state, DEFAULT_SEPARABILITY_TOLERANCE)
}

pub fn schmidt_with(state: &FockState, tol: f64) -> ModeEntanglementReport {
    let dim = state.dim();
    let grid = DMatrix::from_row_slice(dim, dim, state.amplitudes());
    let mut values: Vec<f64> = grid
        .singular_values()
        .iter()
        .cloned()
        .filter(|s| *s > 0.0)
        .collect();
    values.sort_by(|x, y| y.total_cmp(x));
    let entropy: f64 = values
        .iter()
        .map(|s| s * s)
        .filter(|p| *p > 0.0)
        .map(|p| -p * p.ln())
        .sum();
    let largest = values.first().cloned().unwrap_or(0.0);
    ModeEntanglementReport {
        entropy: entropy.max(0.0),
        entropy_bits: entropy.max(0.0) / std::f64::consts::LN_2,
        separable: largest > 1.0 - tol,
        separability_tolerance: tol,
        schmidt_values: values,
    }
}
