//! Intensities, second-order coherences and number statistics of the two arms.

use crate::fock::{moment, FockState, Mode, MomentSpec};
use crate::scalar::{Reason, Scalar};
use serde::Serialize;

/// Intensity below which a mode counts as dark.
pub const DARK_THRESHOLD: f64 = 1e-9;

/// Default absolute tolerance for path-symmetry detection.
pub const DEFAULT_SYMMETRY_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoherenceReport {
    pub nbar_a: f64,
    pub nbar_b: f64,
    pub nbar: f64,
    pub g2_a: Scalar,
    pub g2_b: Scalar,
    pub g2_ab: Scalar,
    pub var_na: f64,
    pub var_nb: f64,
    pub cov_nab: f64,
    pub path_symmetric: bool,
    pub symmetry_tolerance: f64,
}

/// Normal-ordered moments every coherence quantity is derived from.
#[derive(Clone, Copy, Debug)]
struct NumberMoments {
    na: f64,
    nb: f64,
    /// `⟨â†²â²⟩`
    pairs_a: f64,
    /// `⟨b̂†²b̂²⟩`
    pairs_b: f64,
    /// `⟨n̂_a n̂_b⟩`
    cross: f64,
}

impl NumberMoments {
    fn of(state: &FockState) -> Self {
        let m = |k, l| {
            moment(state, MomentSpec::number(k, l))
                .expect("number moments are within the supported order")
                .re
        };
        NumberMoments {
            na: m(1, 0),
            nb: m(0, 1),
            pairs_a: m(2, 0),
            pairs_b: m(0, 2),
            cross: m(1, 1),
        }
    }
}

/// `⟨ĉ†²ĉ²⟩ / n̄_c²`, undefined when the mode is dark.
fn intra(pairs: f64, intensity: f64, reason: Reason) -> Scalar {
    if intensity < DARK_THRESHOLD {
        Scalar::Undefined(reason)
    } else {
        Scalar::Value(pairs / (intensity * intensity))
    }
}

fn marginal_variance(p: &[f64]) -> f64 {
    let mean: f64 = p.iter().enumerate().map(|(j, w)| j as f64 * w).sum();
    p.iter()
        .enumerate()
        .map(|(j, w)| (j as f64 - mean).powi(2) * w)
        .sum()
}

/// Coherence analytics of a normalized state.
pub fn analyze(state: &FockState, tol: f64) -> CoherenceReport {
    let m = NumberMoments::of(state);
    let dark_a = Reason::DarkModeA;
    let dark_b = Reason::DarkModeB;
    let g2_a = intra(m.pairs_a, m.na, dark_a);
    let g2_b = intra(m.pairs_b, m.nb, dark_b);
    let g2_ab = if m.na < DARK_THRESHOLD {
        Scalar::Undefined(dark_a)
    } else if m.nb < DARK_THRESHOLD {
        Scalar::Undefined(dark_b)
    } else {
        Scalar::Value(m.cross / (m.na * m.nb))
    };
    let var_na = marginal_variance(&state.marginal(Mode::A));
    let var_nb = marginal_variance(&state.marginal(Mode::B));
    let cov_nab = m.cross - m.na * m.nb;
    let path_symmetric = (m.na - m.nb).abs() < tol
        && match (g2_a, g2_b) {
            (Scalar::Value(x), Scalar::Value(y)) => (x - y).abs() < tol,
            (Scalar::Undefined(_), Scalar::Undefined(_)) => true,
            _ => false,
        };
    CoherenceReport {
        nbar_a: m.na,
        nbar_b: m.nb,
        nbar: m.na + m.nb,
        g2_a,
        g2_b,
        g2_ab,
        var_na,
        var_nb,
        cov_nab,
        path_symmetric,
        symmetry_tolerance: tol,
    }
}

impl CoherenceReport {
    /// `n̄_a + n̄_a²(g2_a − 1)`, the variance rebuilt from the coherence.
    pub fn var_na_from_g2(&self) -> Scalar {
        self.g2_a
            .value()
            .map(|g| Scalar::Value(self.nbar_a + self.nbar_a.powi(2) * (g - 1.0)))
            .unwrap_or(self.g2_a)
    }

    pub fn var_nb_from_g2(&self) -> Scalar {
        self.g2_b
            .value()
            .map(|g| Scalar::Value(self.nbar_b + self.nbar_b.powi(2) * (g - 1.0)))
            .unwrap_or(self.g2_b)
    }

    /// `n̄_a n̄_b (g2_ab − 1)`.
    pub fn cov_from_g2(&self) -> Scalar {
        self.g2_ab
            .value()
            .map(|g| Scalar::Value(self.nbar_a * self.nbar_b * (g - 1.0)))
            .unwrap_or(self.g2_ab)
    }
}
