//! Truncated two-mode Fock space.
//!
//! States live on a square grid of photon numbers `|j, k⟩` with
//! `0 <= j, k <= cutoff`, stored row-major (`j` outer). Public analytics take
//! a normalized [`FockState`]; ladder operators return an
//! [`UnnormalizedState`] so that their outputs cannot be passed to an
//! analytic by accident.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;

/// Norm-squared deviation below which a state is taken as already normalized.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Relative population a raising operator may push past the cutoff and drop.
pub const OVERFLOW_TOLERANCE: f64 = 1e-12;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    A,
    B,
}

impl Mode {
    pub fn label(self) -> char {
        match self {
            Mode::A => 'a',
            Mode::B => 'b',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ladder {
    Lower,
    Raise,
}

/// Read access shared by normalized and unnormalized grids.
pub trait FockVector {
    fn cutoff(&self) -> usize;
    fn amplitudes(&self) -> &[Complex64];

    fn dim(&self) -> usize {
        self.cutoff() + 1
    }

    /// Amplitude of `|j, k⟩`; zero outside the grid.
    fn amp(&self, j: usize, k: usize) -> Complex64 {
        let n = self.cutoff();
        if j > n || k > n {
            ZERO
        } else {
            self.amplitudes()[j * (n + 1) + k]
        }
    }

    fn norm_sqr(&self) -> f64 {
        self.amplitudes().iter().map(|c| c.norm_sqr()).sum()
    }
}

/// A normalized two-mode pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct FockState {
    cutoff: usize,
    amplitudes: Vec<Complex64>,
    truncation_loss: f64,
}

/// Output of a ladder operator or any other linear map that need not
/// preserve the norm.
#[derive(Clone, Debug, PartialEq)]
pub struct UnnormalizedState {
    cutoff: usize,
    amplitudes: Vec<Complex64>,
}

impl FockVector for FockState {
    fn cutoff(&self) -> usize {
        self.cutoff
    }
    fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }
}

impl FockVector for UnnormalizedState {
    fn cutoff(&self) -> usize {
        self.cutoff
    }
    fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }
}

fn check_shape(cutoff: usize, len: usize) -> Result<()> {
    let expected = (cutoff + 1) * (cutoff + 1);
    if len != expected {
        return Err(Error::GridShape {
            got: len,
            expected,
            cutoff,
        });
    }
    Ok(())
}

impl FockState {
    /// Normalizes `amplitudes` (row-major over `(j, k)`) into a state.
    pub fn new(cutoff: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::with_truncation(cutoff, amplitudes, 0.0, f64::INFINITY)
    }

    /// Like [`FockState::new`] but records the norm-squared `loss` discarded
    /// while producing `amplitudes`, failing when it exceeds `max_loss`.
    pub fn with_truncation(
        cutoff: usize,
        mut amplitudes: Vec<Complex64>,
        loss: f64,
        max_loss: f64,
    ) -> Result<Self> {
        check_shape(cutoff, amplitudes.len())?;
        if loss > max_loss {
            return Err(Error::TruncationLoss {
                loss,
                max: max_loss,
                cutoff,
            });
        }
        let norm_sqr: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if !(norm_sqr > 0.0) || !norm_sqr.is_finite() {
            return Err(Error::ZeroNorm);
        }
        if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            let inv = 1.0 / norm_sqr.sqrt();
            amplitudes.iter_mut().for_each(|c| *c *= inv);
        }
        Ok(FockState {
            cutoff,
            amplitudes,
            truncation_loss: loss.max(0.0),
        })
    }

    pub fn vacuum(cutoff: usize) -> Self {
        make_fock(0, 0, cutoff).expect("vacuum fits every cutoff")
    }

    pub fn truncation_loss(&self) -> f64 {
        self.truncation_loss
    }

    /// Re-grids the state onto `cutoff`. Growing pads with zeros; shrinking
    /// discards the rows and columns above `cutoff` and fails if they carried
    /// more than `max_loss`. Accumulated truncation loss is carried over.
    pub fn resize(&self, cutoff: usize, max_loss: f64) -> Result<FockState> {
        let old = self.cutoff;
        let dim = cutoff + 1;
        let mut out = vec![ZERO; dim * dim];
        let keep = old.min(cutoff);
        let mut kept = 0.0;
        for j in 0..=keep {
            for k in 0..=keep {
                let c = self.amp(j, k);
                kept += c.norm_sqr();
                out[j * dim + k] = c;
            }
        }
        let dropped = (self.norm_sqr() - kept).max(0.0);
        FockState::with_truncation(cutoff, out, self.truncation_loss + dropped, max_loss)
    }

    /// Reinterprets a normalized state as a general vector.
    pub fn to_unnormalized(&self) -> UnnormalizedState {
        UnnormalizedState {
            cutoff: self.cutoff,
            amplitudes: self.amplitudes.clone(),
        }
    }

    /// Photon-number distribution of one mode.
    pub fn marginal(&self, mode: Mode) -> Vec<f64> {
        let dim = self.dim();
        let mut p = vec![0.0; dim];
        for j in 0..dim {
            for k in 0..dim {
                let w = self.amplitudes[j * dim + k].norm_sqr();
                match mode {
                    Mode::A => p[j] += w,
                    Mode::B => p[k] += w,
                }
            }
        }
        p
    }

    /// Applies `f(j, k, amplitude)` to every entry, keeping the grid. Used for
    /// number-diagonal unitaries.
    pub(crate) fn map_diagonal(&self, f: impl Fn(usize, usize) -> Complex64) -> FockState {
        let dim = self.dim();
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, c)| c * f(i / dim, i % dim))
            .collect();
        FockState {
            cutoff: self.cutoff,
            amplitudes,
            truncation_loss: self.truncation_loss,
        }
    }

    pub(crate) fn from_parts(cutoff: usize, amplitudes: Vec<Complex64>, loss: f64) -> Self {
        debug_assert_eq!(amplitudes.len(), (cutoff + 1) * (cutoff + 1));
        FockState {
            cutoff,
            amplitudes,
            truncation_loss: loss,
        }
    }
}

impl UnnormalizedState {
    pub fn zeros(cutoff: usize) -> Self {
        UnnormalizedState {
            cutoff,
            amplitudes: vec![ZERO; (cutoff + 1) * (cutoff + 1)],
        }
    }

    pub fn from_amplitudes(cutoff: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_shape(cutoff, amplitudes.len())?;
        Ok(UnnormalizedState { cutoff, amplitudes })
    }

    pub fn normalize(self) -> Result<FockState> {
        FockState::new(self.cutoff, self.amplitudes)
    }

    pub fn scale(mut self, factor: Complex64) -> Self {
        self.amplitudes.iter_mut().for_each(|c| *c *= factor);
        self
    }

    /// `self + factor * other`; grids must match.
    pub fn add_scaled(mut self, factor: Complex64, other: &impl FockVector) -> Self {
        assert_eq!(self.cutoff, other.cutoff(), "cutoff mismatch in add_scaled");
        for (c, o) in self.amplitudes.iter_mut().zip(other.amplitudes()) {
            *c += factor * o;
        }
        self
    }

    pub(crate) fn set(&mut self, j: usize, k: usize, value: Complex64) {
        let dim = self.cutoff + 1;
        self.amplitudes[j * dim + k] = value;
    }
}

/// The basis ket `|j, k⟩`.
pub fn make_fock(j: usize, k: usize, cutoff: usize) -> Result<FockState> {
    for (mode, index) in [('a', j), ('b', k)] {
        if index > cutoff {
            return Err(Error::ExceedsCutoff {
                mode,
                index,
                cutoff,
            });
        }
    }
    let dim = cutoff + 1;
    let mut amplitudes = vec![ZERO; dim * dim];
    amplitudes[j * dim + k] = Complex64::new(1.0, 0.0);
    Ok(FockState::from_parts(cutoff, amplitudes, 0.0))
}

/// `â`, `â†`, `b̂` or `b̂†` applied to `state`.
///
/// Raising fails when the population pushed to `cutoff + 1` is at least
/// [`OVERFLOW_TOLERANCE`] of the input norm; smaller spill-over is dropped.
pub fn apply_ladder(
    state: &impl FockVector,
    mode: Mode,
    kind: Ladder,
) -> Result<UnnormalizedState> {
    let n = state.cutoff();
    let dim = n + 1;
    let src = state.amplitudes();
    let mut out = vec![ZERO; dim * dim];
    match kind {
        Ladder::Lower => {
            for j in 0..dim {
                for k in 0..dim {
                    let (from, factor) = match mode {
                        Mode::A if j < n => ((j + 1) * dim + k, ((j + 1) as f64).sqrt()),
                        Mode::B if k < n => (j * dim + k + 1, ((k + 1) as f64).sqrt()),
                        _ => continue,
                    };
                    out[j * dim + k] = src[from] * factor;
                }
            }
        }
        Ladder::Raise => {
            let edge: f64 = (0..dim)
                .map(|i| match mode {
                    Mode::A => src[n * dim + i].norm_sqr(),
                    Mode::B => src[i * dim + n].norm_sqr(),
                })
                .sum::<f64>()
                * (n + 1) as f64;
            let norm = state.norm_sqr();
            if edge > 0.0 && edge >= OVERFLOW_TOLERANCE * norm {
                return Err(Error::TruncationOverflow {
                    mode: mode.label(),
                    cutoff: n,
                    population: edge / norm,
                });
            }
            for j in 0..dim {
                for k in 0..dim {
                    let (from, factor) = match mode {
                        Mode::A if j > 0 => ((j - 1) * dim + k, (j as f64).sqrt()),
                        Mode::B if k > 0 => (j * dim + k - 1, (k as f64).sqrt()),
                        _ => continue,
                    };
                    out[j * dim + k] = src[from] * factor;
                }
            }
        }
    }
    Ok(UnnormalizedState {
        cutoff: n,
        amplitudes: out,
    })
}

/// `⟨x|y⟩`, conjugating `x`. Grids of different cutoff are compared as if the
/// smaller were zero padded.
pub fn inner(x: &impl FockVector, y: &impl FockVector) -> Complex64 {
    if x.cutoff() == y.cutoff() {
        return x
            .amplitudes()
            .iter()
            .zip(y.amplitudes())
            .map(|(a, b)| a.conj() * b)
            .sum();
    }
    let common = x.cutoff().min(y.cutoff());
    let mut acc = ZERO;
    for j in 0..=common {
        for k in 0..=common {
            acc += x.amp(j, k).conj() * y.amp(j, k);
        }
    }
    acc
}

/// `min_θ ‖x − e^{iθ} y‖`, the distance between two states up to a global
/// phase. Computed from the difference vector rather than from `1 − |⟨x|y⟩|`
/// so that it resolves differences near machine precision.
pub fn phase_distance(x: &impl FockVector, y: &impl FockVector) -> f64 {
    let overlap = inner(y, x);
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let common = x.cutoff().max(y.cutoff());
    let mut acc = 0.0;
    for j in 0..=common {
        for k in 0..=common {
            acc += (x.amp(j, k) - phase * y.amp(j, k)).norm_sqr();
        }
    }
    acc.sqrt()
}

/// Exponents of the normal-ordered monomial `â†ᵖ âᵠ b̂†ʳ b̂ˢ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct MomentSpec {
    pub p: u8,
    pub q: u8,
    pub r: u8,
    pub s: u8,
}

impl MomentSpec {
    pub const MAX_ORDER: u8 = 4;

    pub fn new(p: u8, q: u8, r: u8, s: u8) -> Result<Self> {
        for e in [p, q, r, s] {
            if e > Self::MAX_ORDER {
                return Err(Error::MomentOrder(e));
            }
        }
        Ok(MomentSpec { p, q, r, s })
    }

    /// `⟨n̂_a⟩`-style number moment `â†ᵏ âᵏ b̂†ˡ b̂ˡ`.
    pub fn number(k: u8, l: u8) -> Self {
        MomentSpec {
            p: k,
            q: k,
            r: l,
            s: l,
        }
    }
}

fn lower_many(state: &impl FockVector, a_times: u8, b_times: u8) -> UnnormalizedState {
    let mut v = UnnormalizedState {
        cutoff: state.cutoff(),
        amplitudes: state.amplitudes().to_vec(),
    };
    for _ in 0..a_times {
        v = apply_ladder(&v, Mode::A, Ladder::Lower).expect("lowering cannot overflow");
    }
    for _ in 0..b_times {
        v = apply_ladder(&v, Mode::B, Ladder::Lower).expect("lowering cannot overflow");
    }
    v
}

/// `⟨Ψ| â†ᵖ âᵠ b̂†ʳ b̂ˢ |Ψ⟩`.
///
/// Since operators on different modes commute this equals
/// `⟨âᵖ b̂ʳ Ψ | âᵠ b̂ˢ Ψ⟩`, so only lowering operators are applied and the
/// truncation never enters.
pub fn moment(state: &FockState, spec: MomentSpec) -> Result<Complex64> {
    let spec = MomentSpec::new(spec.p, spec.q, spec.r, spec.s)?;
    let right = lower_many(state, spec.q, spec.s);
    if (spec.p, spec.r) == (spec.q, spec.s) {
        return Ok(Complex64::new(right.norm_sqr(), 0.0));
    }
    let left = lower_many(state, spec.p, spec.r);
    Ok(inner(&left, &right))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn basis_kets() {
        let vac = make_fock(0, 0, 8).unwrap();
        assert!((vac.norm_sqr() - 1.0).abs() < 1e-15);
        assert_eq!(vac.amp(0, 0), c(1.0));
        let two = make_fock(2, 0, 8).unwrap();
        assert_eq!(two.amp(2, 0), c(1.0));
        assert_eq!(two.truncation_loss(), 0.0);
        let err = make_fock(9, 0, 8).unwrap_err();
        assert!(err.to_string().contains("exceeds cutoff"), "{err}");
    }

    #[test]
    fn ladder_actions() {
        let one = make_fock(1, 0, 8).unwrap();
        let lowered = apply_ladder(&one, Mode::A, Ladder::Lower).unwrap();
        assert_eq!(lowered.amp(0, 0), c(1.0));
        assert!((lowered.norm_sqr() - 1.0).abs() < 1e-15);

        let b_only = make_fock(0, 5, 8).unwrap();
        let gone = apply_ladder(&b_only, Mode::A, Ladder::Lower).unwrap();
        assert_eq!(gone.norm_sqr(), 0.0);

        let two = make_fock(2, 0, 8).unwrap();
        let raised = apply_ladder(&two, Mode::A, Ladder::Raise).unwrap();
        assert!((raised.amp(3, 0) - c(3f64.sqrt())).norm() < 1e-15);
    }

    #[test]
    fn raising_at_the_edge_overflows() {
        let top = make_fock(4, 0, 4).unwrap();
        let err = apply_ladder(&top, Mode::A, Ladder::Raise).unwrap_err();
        assert!(matches!(err, Error::TruncationOverflow { mode: 'a', .. }));
        assert!(apply_ladder(&top, Mode::B, Ladder::Raise).is_ok());
    }

    #[test]
    fn inner_products() {
        let x = make_fock(1, 0, 4).unwrap();
        let y = make_fock(0, 1, 4).unwrap();
        assert_eq!(inner(&x, &x), c(1.0));
        assert_eq!(inner(&x, &y), c(0.0));
        let s = 0.5f64.sqrt();
        let mut amps = vec![c(0.0); 9];
        amps[2 * 3] = c(s);
        amps[2] = c(s);
        let noon = FockState::new(2, amps).unwrap();
        let two = make_fock(2, 0, 2).unwrap();
        assert!((inner(&noon, &two) - c(s)).norm() < 1e-15);
        // mixed cutoffs pad with zeros
        let big = make_fock(2, 0, 6).unwrap();
        assert!((inner(&noon, &big) - c(s)).norm() < 1e-15);
    }

    #[test]
    fn number_state_moments() {
        let two = make_fock(2, 0, 8).unwrap();
        let m = moment(&two, MomentSpec::number(2, 0)).unwrap();
        assert!((m - c(2.0)).norm() < 1e-14);
        let pair = make_fock(1, 1, 8).unwrap();
        let m = moment(&pair, MomentSpec::number(1, 1)).unwrap();
        assert!((m - c(1.0)).norm() < 1e-14);
    }

    #[test]
    fn moment_order_is_bounded() {
        assert_eq!(MomentSpec::new(5, 0, 0, 0), Err(Error::MomentOrder(5)));
        let s = MomentSpec { p: 5, q: 0, r: 0, s: 0 };
        assert!(moment(&FockState::vacuum(3), s).is_err());
    }

    #[test]
    fn resize_tracks_loss() {
        let amps: Vec<Complex64> = (0..16).map(|i| c(1.0 + i as f64)).collect();
        let s = FockState::new(3, amps).unwrap();
        assert!(s.resize(1, 1e-3).is_err());
        let grown = s.resize(6, 0.0).unwrap();
        assert_eq!(grown.truncation_loss(), 0.0);
        assert!(phase_distance(&s, &grown) < 1e-15);
    }

    #[test]
    fn zero_norm_rejected() {
        assert_eq!(FockState::new(1, vec![c(0.0); 4]), Err(Error::ZeroNorm));
        assert!(matches!(
            FockState::new(1, vec![c(1.0); 3]),
            Err(Error::GridShape { .. })
        ));
    }
}
