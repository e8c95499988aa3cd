//! Schwinger angular-momentum operators and the interferometer unitaries.
//!
//! `Ĵx = (â†b̂ + b̂†â)/2`, `Ĵy = −i(â†b̂ − b̂†â)/2`, `Ĵz = (n̂_a − n̂_b)/2` and
//! `Ĵ0 = (n̂_a + n̂_b)/2`. Every rotation `exp(−iγ v·Ĵ)` conserves the total
//! photon number, so it is applied sector by sector: sector `n` is a
//! spin-`n/2` representation spanned by `|k, n−k⟩`, `k = 0..=n`.

use crate::error::{Error, Result};
use crate::fock::{
    apply_ladder, moment, FockState, FockVector, Ladder, Mode, MomentSpec, UnnormalizedState,
};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

/// Sector weight above the cutoff that a rotation may silently discard.
pub const SECTOR_OVERFLOW_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum GeneratorTag {
    Jx,
    Jy,
    Jz,
    J0,
}

/// Unit vector `v` selecting `Ĵ_v = v·Ĵ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpinDirection([f64; 3]);

impl SpinDirection {
    pub const X: SpinDirection = SpinDirection([1.0, 0.0, 0.0]);
    pub const Y: SpinDirection = SpinDirection([0.0, 1.0, 0.0]);
    pub const Z: SpinDirection = SpinDirection([0.0, 0.0, 1.0]);

    pub fn new(v: [f64; 3]) -> Result<Self> {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !((norm - 1.0).abs() <= 1e-12) {
            return Err(Error::NotUnitVector(norm));
        }
        Ok(SpinDirection(v))
    }

    /// Normalizes an arbitrary non-zero vector.
    pub fn normalized(v: [f64; 3]) -> Result<Self> {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NotUnitVector(norm));
        }
        Ok(SpinDirection([v[0] / norm, v[1] / norm, v[2] / norm]))
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }
}

fn expect_real(z: Complex64) -> Result<f64> {
    if z.im.abs() > 1e-10 * z.re.abs().max(1.0) {
        return Err(Error::NotReal(z.im));
    }
    Ok(z.re)
}

/// `⟨Ĵ⟩` (`order == 1`) or `⟨Ĵ²⟩` (`order == 2`), expanded into normal-ordered
/// mode moments.
pub fn j_moment(state: &FockState, tag: GeneratorTag, order: u8) -> Result<f64> {
    let m = |p, q, r, s| moment(state, MomentSpec { p, q, r, s });
    let i = Complex64::i();
    let value = match (tag, order) {
        (GeneratorTag::Jz, 1) => (m(1, 1, 0, 0)? - m(0, 0, 1, 1)?) * 0.5,
        (GeneratorTag::J0, 1) => (m(1, 1, 0, 0)? + m(0, 0, 1, 1)?) * 0.5,
        (GeneratorTag::Jx, 1) => (m(1, 0, 0, 1)? + m(0, 1, 1, 0)?) * 0.5,
        (GeneratorTag::Jy, 1) => (m(1, 0, 0, 1)? - m(0, 1, 1, 0)?) * (-0.5 * i),
        (tag, 2) => {
            let na = m(1, 1, 0, 0)?;
            let nb = m(0, 0, 1, 1)?;
            let na_nb = m(1, 1, 1, 1)?;
            match tag {
                GeneratorTag::Jz | GeneratorTag::J0 => {
                    let sign = if tag == GeneratorTag::Jz { -2.0 } else { 2.0 };
                    (m(2, 2, 0, 0)? + na + m(0, 0, 2, 2)? + nb + na_nb * sign) * 0.25
                }
                GeneratorTag::Jx | GeneratorTag::Jy => {
                    let sign = if tag == GeneratorTag::Jx { 1.0 } else { -1.0 };
                    let pair = m(2, 0, 0, 2)? + m(0, 2, 2, 0)?;
                    (pair * sign + na_nb * 2.0 + na + nb) * 0.25
                }
            }
        }
        (_, order) => {
            return Err(Error::InvalidParameter(format!(
                "j_moment order must be 1 or 2, got {order}"
            )))
        }
    };
    expect_real(value)
}

/// `Ĵ|ψ⟩` built from ladder operators.
pub fn apply_generator(state: &impl FockVector, tag: GeneratorTag) -> Result<UnnormalizedState> {
    let half = Complex64::new(0.5, 0.0);
    match tag {
        GeneratorTag::Jz | GeneratorTag::J0 => {
            let sign = if tag == GeneratorTag::Jz { -1.0 } else { 1.0 };
            let dim = state.dim();
            let amps = state
                .amplitudes()
                .iter()
                .enumerate()
                .map(|(idx, c)| c * 0.5 * ((idx / dim) as f64 + sign * (idx % dim) as f64))
                .collect();
            UnnormalizedState::from_amplitudes(state.cutoff(), amps)
        }
        GeneratorTag::Jx | GeneratorTag::Jy => {
            let b = apply_ladder(state, Mode::B, Ladder::Lower)?;
            let ad_b = apply_ladder(&b, Mode::A, Ladder::Raise)?;
            let a = apply_ladder(state, Mode::A, Ladder::Lower)?;
            let bd_a = apply_ladder(&a, Mode::B, Ladder::Raise)?;
            Ok(if tag == GeneratorTag::Jx {
                ad_b.scale(half).add_scaled(half, &bd_a)
            } else {
                let f = Complex64::new(0.0, -0.5);
                ad_b.scale(f).add_scaled(-f, &bd_a)
            })
        }
    }
}

/// Matrix of `v·Ĵ` on sector `n`, basis `|k, n−k⟩` ordered by `k`.
pub fn sector_generator(n: usize, v: &SpinDirection) -> DMatrix<Complex64> {
    let [vx, vy, vz] = v.components();
    let mut g = DMatrix::<Complex64>::zeros(n + 1, n + 1);
    for k in 0..=n {
        g[(k, k)] = Complex64::new(vz * (k as f64 - n as f64 / 2.0), 0.0);
        if k < n {
            // ⟨k+1, n−k−1| â†b̂ |k, n−k⟩
            let hop = (((k + 1) * (n - k)) as f64).sqrt() * 0.5;
            g[(k + 1, k)] = Complex64::new(vx * hop, -vy * hop);
            g[(k, k + 1)] = Complex64::new(vx * hop, vy * hop);
        }
    }
    g
}

/// `exp(−i·angle·v·Ĵ)` on sector `n`, via the eigendecomposition of the
/// Hermitian generator.
pub fn sector_rotation(n: usize, v: &SpinDirection, angle: f64) -> DMatrix<Complex64> {
    let eig = sector_generator(n, v).symmetric_eigen();
    let phases = DVector::from_iterator(
        n + 1,
        eig.eigenvalues
            .iter()
            .map(|&lambda| Complex64::from_polar(1.0, -angle * lambda)),
    );
    let vecs = &eig.eigenvectors;
    let mut scaled = vecs.clone();
    for (mut col, ph) in scaled.column_iter_mut().zip(phases.iter()) {
        col *= *ph;
    }
    scaled * vecs.adjoint()
}

/// Weight carried by total-photon sectors `n > cutoff`, which the square grid
/// represents only partially.
pub fn weight_above_complete_sectors(state: &impl FockVector) -> f64 {
    let cutoff = state.cutoff();
    let dim = state.dim();
    state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(idx, _)| idx / dim + idx % dim > cutoff)
        .map(|(_, c)| c.norm_sqr())
        .sum()
}

/// `exp(−i·angle·v·Ĵ)|ψ⟩`.
///
/// Fails with [`Error::SectorOverflow`] when sectors above the cutoff carry at
/// least [`SECTOR_OVERFLOW_TOLERANCE`]; smaller weight there is dropped and
/// recorded as truncation loss.
pub fn apply_rotation(state: &FockState, v: &SpinDirection, angle: f64) -> Result<FockState> {
    let cutoff = state.cutoff();
    let dim = state.dim();
    let overflow = weight_above_complete_sectors(state);
    if overflow >= SECTOR_OVERFLOW_TOLERANCE {
        return Err(Error::SectorOverflow {
            cutoff,
            weight: overflow,
        });
    }
    let rotated: Vec<(usize, DVector<Complex64>)> = (0..=cutoff)
        .into_par_iter()
        .filter_map(|n| {
            let coeffs = DVector::from_iterator(n + 1, (0..=n).map(|k| state.amp(k, n - k)));
            if coeffs.iter().all(|c| c.norm_sqr() == 0.0) {
                return None;
            }
            Some((n, sector_rotation(n, v, angle) * coeffs))
        })
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (n, coeffs) in rotated {
        for (k, c) in coeffs.iter().enumerate() {
            out[k * dim + n - k] = *c;
        }
    }
    let loss = state.truncation_loss() + overflow;
    FockState::with_truncation(cutoff, out, loss, f64::INFINITY)
}

/// Which of the two balanced beam splitters of the interferometer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BeamSplitter {
    /// `exp(−i(π/2)Ĵx)`.
    First,
    /// `exp(+i(π/2)Ĵx)`, the inverse of the first.
    Second,
}

pub fn beam_splitter(state: &FockState, which: BeamSplitter) -> Result<FockState> {
    let angle = match which {
        BeamSplitter::First => FRAC_PI_2,
        BeamSplitter::Second => -FRAC_PI_2,
    };
    apply_rotation(state, &SpinDirection::X, angle)
}

/// `exp(−iφĴz)|ψ⟩`: amplitude `(j, k)` picks up `exp(−iφ(j−k)/2)`.
pub fn phase_shift(state: &FockState, phi: f64) -> FockState {
    state.map_diagonal(|j, k| Complex64::from_polar(1.0, -phi * (j as f64 - k as f64) / 2.0))
}

/// The full interferometer, `exp(−iφĴy)`: first beam splitter, phase shift,
/// second beam splitter.
pub fn mzi_unitary(state: &FockState, phi: f64) -> Result<FockState> {
    apply_rotation(state, &SpinDirection::Y, phi)
}
