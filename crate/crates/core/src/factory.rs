//! Constructors for the interferometer probe states.
//!
//! Squeezed families use closed-form amplitudes of `Ŝ(ξ)|0⟩` and `Ŝ(ξ)|1⟩`
//! for the squeezer `Ŝ(ξ) = exp(iξ{(ĉ†)² + ĉ²}/2)`, which
//! [`squeezer_by_exponentiation`] reproduces independently. Fixed photon
//! number families are assembled from basis kets and the first beam splitter
//! `B̂ = exp(−i(π/2)Ĵx)`.

use crate::error::{Error, Result};
use crate::fock::{make_fock, FockState, FockVector};
use crate::schwinger::{beam_splitter, BeamSplitter};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Default per-mode cutoff ceiling for automatic cutoff selection.
pub const DEFAULT_CUTOFF_CEILING: usize = 256;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `Ŝ_a(ξ) ⊗ Ŝ_b(ξ)|0,0⟩`
    TwinSqueezedVacuum,
    /// `B̂|n,n⟩`
    TwinFock,
    /// `(|α,0⟩ + |0,α⟩)`, normalized exactly
    EntangledCoherent,
    /// `(|n,0⟩ + |0,n⟩)/√2`
    Noon,
    /// `Ŝ_a(ξ) ⊗ Ŝ_b(ξ) B̂|1,0⟩`
    AmplifiedBell,
    /// `B̂|n+1,n⟩`
    FraternalTwinFock,
    /// `B̂|α,0⟩ = |α/√2, −iα/√2⟩`
    Coherent,
    /// `exp(χ(â†b̂† − âb̂))|0,0⟩`
    TwoModeSqueezedVacuum,
    /// `B̂|n,0⟩`
    SeparableCoherentProbe,
    /// `|n,n⟩`
    FockPair,
}

impl Family {
    /// Row order of the reference table.
    pub const ALL: [Family; 10] = [
        Family::TwinSqueezedVacuum,
        Family::TwinFock,
        Family::EntangledCoherent,
        Family::Noon,
        Family::AmplifiedBell,
        Family::FraternalTwinFock,
        Family::Coherent,
        Family::TwoModeSqueezedVacuum,
        Family::SeparableCoherentProbe,
        Family::FockPair,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::TwinSqueezedVacuum => "twin-squeezed-vacuum",
            Family::TwinFock => "twin-fock",
            Family::EntangledCoherent => "entangled-coherent",
            Family::Noon => "noon",
            Family::AmplifiedBell => "amplified-bell",
            Family::FraternalTwinFock => "fraternal-twin-fock",
            Family::Coherent => "coherent",
            Family::TwoModeSqueezedVacuum => "two-mode-squeezed-vacuum",
            Family::SeparableCoherentProbe => "separable-coherent-probe",
            Family::FockPair => "fock-pair",
        }
    }

    /// Families with a definite photon number, parameterized by an integer.
    pub fn is_fixed_number(self) -> bool {
        matches!(
            self,
            Family::TwinFock
                | Family::Noon
                | Family::FraternalTwinFock
                | Family::SeparableCoherentProbe
                | Family::FockPair
        )
    }

    /// `(slope, offset)` with `n̄ = slope·n + offset` for fixed-number
    /// families, plus the smallest allowed `n`.
    fn integer_ladder(self) -> Option<(usize, usize, usize)> {
        match self {
            Family::Noon => Some((1, 0, 1)),
            Family::SeparableCoherentProbe => Some((1, 0, 1)),
            Family::TwinFock | Family::FockPair => Some((2, 0, 1)),
            Family::FraternalTwinFock => Some((2, 1, 0)),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A probe family together with its native parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Probe {
    TwinSqueezedVacuum { xi: f64 },
    TwinFock { n: usize },
    EntangledCoherent { alpha: Complex64 },
    Noon { n: usize },
    AmplifiedBell { xi: f64 },
    FraternalTwinFock { n: usize },
    Coherent { alpha: Complex64 },
    TwoModeSqueezedVacuum { chi: f64 },
    SeparableCoherentProbe { n: usize },
    FockPair { n: usize },
}

impl Probe {
    pub fn family(&self) -> Family {
        match self {
            Probe::TwinSqueezedVacuum { .. } => Family::TwinSqueezedVacuum,
            Probe::TwinFock { .. } => Family::TwinFock,
            Probe::EntangledCoherent { .. } => Family::EntangledCoherent,
            Probe::Noon { .. } => Family::Noon,
            Probe::AmplifiedBell { .. } => Family::AmplifiedBell,
            Probe::FraternalTwinFock { .. } => Family::FraternalTwinFock,
            Probe::Coherent { .. } => Family::Coherent,
            Probe::TwoModeSqueezedVacuum { .. } => Family::TwoModeSqueezedVacuum,
            Probe::SeparableCoherentProbe { .. } => Family::SeparableCoherentProbe,
            Probe::FockPair { .. } => Family::FockPair,
        }
    }

    /// Builds the family member with native parameter `value`: `n` for
    /// fixed-number families (rounded), `ξ`/`χ`, or real `α`.
    pub fn with_parameter(family: Family, value: f64) -> Probe {
        let n = value.round().max(0.0) as usize;
        let alpha = Complex64::new(value, 0.0);
        match family {
            Family::TwinSqueezedVacuum => Probe::TwinSqueezedVacuum { xi: value },
            Family::TwinFock => Probe::TwinFock { n },
            Family::EntangledCoherent => Probe::EntangledCoherent { alpha },
            Family::Noon => Probe::Noon { n },
            Family::AmplifiedBell => Probe::AmplifiedBell { xi: value },
            Family::FraternalTwinFock => Probe::FraternalTwinFock { n },
            Family::Coherent => Probe::Coherent { alpha },
            Family::TwoModeSqueezedVacuum => Probe::TwoModeSqueezedVacuum { chi: value },
            Family::SeparableCoherentProbe => Probe::SeparableCoherentProbe { n },
            Family::FockPair => Probe::FockPair { n },
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match *self {
            Probe::TwinSqueezedVacuum { xi } | Probe::AmplifiedBell { xi } => {
                if !(xi >= 0.0 && xi.is_finite()) {
                    return bad(format!("squeezing xi must be finite and >= 0, got {xi}"));
                }
            }
            Probe::TwoModeSqueezedVacuum { chi } => {
                if !(chi >= 0.0 && chi.is_finite()) {
                    return bad(format!("squeezing chi must be finite and >= 0, got {chi}"));
                }
            }
            Probe::EntangledCoherent { alpha } | Probe::Coherent { alpha } => {
                if !(alpha.re.is_finite() && alpha.im.is_finite()) {
                    return bad(format!("alpha must be finite, got {alpha}"));
                }
            }
            Probe::Noon { n } | Probe::SeparableCoherentProbe { n } => {
                if n == 0 {
                    return bad(format!("{} needs n >= 1", self.family()));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CutoffPolicy {
    #[default]
    Auto,
    Explicit(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProbeSpec {
    pub probe: Probe,
    pub cutoff: CutoffPolicy,
}

impl ProbeSpec {
    pub fn auto(probe: Probe) -> Self {
        ProbeSpec {
            probe,
            cutoff: CutoffPolicy::Auto,
        }
    }
}

/// Truncation policy shared by all constructors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BuildConfig {
    /// Largest per-mode cutoff considered (and accepted for explicit cutoffs).
    pub cutoff_ceiling: usize,
    /// Norm-squared that truncation may discard.
    pub max_truncation_loss: f64,
    /// Automatic cutoffs also bound the discarded `Σ (j² + k²)|c_jk|²`, which
    /// controls the error of every second-order moment.
    pub tail_moment_tol: f64,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            cutoff_ceiling: DEFAULT_CUTOFF_CEILING,
            max_truncation_loss: 1e-10,
            tail_moment_tol: 1e-12,
        }
    }
}

/// Closed-form `Ŝ(ξ)|0⟩` on `0..=cutoff`.
///
/// `c_{2m} = (i tanh ξ)^m √((2m)!) / (2^m m! √cosh ξ)`, odd entries zero.
pub fn squeezed_vacuum(xi: f64, cutoff: usize) -> Vec<Complex64> {
    squeezed_ladder(xi, cutoff, 0, 1.0 / xi.cosh().sqrt())
}

/// Closed-form `Ŝ(ξ)|1⟩` on `0..=cutoff`.
///
/// `c_{2m+1} = (i tanh ξ)^m √((2m+1)!) / (2^m m! cosh^{3/2} ξ)`, even entries
/// zero.
pub fn squeezed_single_photon(xi: f64, cutoff: usize) -> Vec<Complex64> {
    squeezed_ladder(xi, cutoff, 1, xi.cosh().powf(-1.5))
}

fn squeezed_ladder(xi: f64, cutoff: usize, parity: usize, lead: f64) -> Vec<Complex64> {
    let mut out = vec![ZERO; cutoff + 1];
    if parity > cutoff {
        return out;
    }
    let step = Complex64::new(0.0, xi.tanh());
    let mut c = Complex64::new(lead, 0.0);
    out[parity] = c;
    let mut m = 0usize;
    while parity + 2 * m + 2 <= cutoff {
        let a = (2 * m + 1 + parity) as f64;
        let b = (2 * m + 2 + parity) as f64;
        c *= step * ((a * b).sqrt() / (2.0 * (m + 1) as f64));
        m += 1;
        out[parity + 2 * m] = c;
    }
    out
}

/// `Ŝ(ξ)` obtained by exponentiating the squeezer generator `(ĉ†² + ĉ²)/2`
/// truncated to `dim` levels. Columns near `dim` are contaminated by the
/// truncation; use a generous `dim` and read only the low block.
pub fn squeezer_by_exponentiation(xi: f64, dim: usize) -> DMatrix<Complex64> {
    let mut g = DMatrix::<f64>::zeros(dim, dim);
    for m in 0..dim.saturating_sub(2) {
        let v = (((m + 1) * (m + 2)) as f64).sqrt() / 2.0;
        g[(m + 2, m)] = v;
        g[(m, m + 2)] = v;
    }
    let eig = g.symmetric_eigen();
    let vecs = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
    let mut scaled = vecs.clone();
    for (mut col, &lambda) in scaled.column_iter_mut().zip(eig.eigenvalues.iter()) {
        col *= Complex64::from_polar(1.0, xi * lambda);
    }
    scaled * vecs.transpose()
}

/// Poisson amplitudes of `|β⟩` on `0..=cutoff`.
pub fn coherent_amplitudes(beta: Complex64, cutoff: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(cutoff + 1);
    let mut c = Complex64::new((-beta.norm_sqr() / 2.0).exp(), 0.0);
    out.push(c);
    for j in 1..=cutoff {
        c *= beta / (j as f64).sqrt();
        out.push(c);
    }
    out
}

/// Applies `Ŝ_a(ξ) ⊗ Ŝ_b(ξ)` to a state with at most one photon per mode.
fn squeeze_low_photon(input: &FockState, xi: f64, cutoff: usize) -> Result<Vec<Complex64>> {
    let n = input.cutoff();
    for j in 0..=n {
        for k in 0..=n {
            if (j > 1 || k > 1) && input.amp(j, k).norm_sqr() > 0.0 {
                return Err(Error::InvalidParameter(
                    "local squeezing is implemented for at most one photon per mode".into(),
                ));
            }
        }
    }
    let single = [squeezed_vacuum(xi, cutoff), squeezed_single_photon(xi, cutoff)];
    let dim = cutoff + 1;
    let mut grid = vec![ZERO; dim * dim];
    for j in 0..=n.min(1) {
        for k in 0..=n.min(1) {
            let c = input.amp(j, k);
            if c.norm_sqr() == 0.0 {
                continue;
            }
            for (x, u) in single[j].iter().enumerate() {
                for (y, v) in single[k].iter().enumerate() {
                    grid[x * dim + y] += c * u * v;
                }
            }
        }
    }
    Ok(grid)
}

fn product_grid(u: &[Complex64], v: &[Complex64]) -> Vec<Complex64> {
    u.iter()
        .flat_map(|a| v.iter().map(move |b| a * b))
        .collect()
}

/// Amplitude grid of an infinite-support probe evaluated at `cutoff`, whose
/// exact norm is 1.
fn continuous_grid(probe: &Probe, cutoff: usize) -> Result<Vec<Complex64>> {
    let dim = cutoff + 1;
    Ok(match *probe {
        Probe::TwinSqueezedVacuum { xi } => {
            squeeze_low_photon(&FockState::vacuum(0), xi, cutoff)?
        }
        Probe::AmplifiedBell { xi } => {
            let bell = beam_splitter(&make_fock(1, 0, 1)?, BeamSplitter::First)?;
            squeeze_low_photon(&bell, xi, cutoff)?
        }
        Probe::Coherent { alpha } => {
            // B̂ sends â† to (â† − i b̂†)/√2, so every sector is B̂|n,0⟩.
            let beta = alpha / 2f64.sqrt();
            product_grid(
                &coherent_amplitudes(beta, cutoff),
                &coherent_amplitudes(-beta * Complex64::i(), cutoff),
            )
        }
        Probe::EntangledCoherent { alpha } => {
            // ⟨α,0|0,α⟩ = e^{−|α|²}
            let norm = 1.0 / (2.0 + 2.0 * (-alpha.norm_sqr()).exp()).sqrt();
            let line = coherent_amplitudes(alpha, cutoff);
            let mut grid = vec![ZERO; dim * dim];
            for (i, c) in line.iter().enumerate() {
                grid[i * dim] += c * norm;
                grid[i] += c * norm;
            }
            grid
        }
        Probe::TwoModeSqueezedVacuum { chi } => {
            let t = chi.tanh();
            let mut grid = vec![ZERO; dim * dim];
            let mut c = 1.0 / chi.cosh();
            for n in 0..dim {
                grid[n * dim + n] = Complex64::new(c, 0.0);
                c *= t;
            }
            grid
        }
        _ => unreachable!("fixed-number probe passed to continuous_grid"),
    })
}

fn fixed_number_state(probe: &Probe) -> Result<FockState> {
    let first = BeamSplitter::First;
    match *probe {
        Probe::Noon { n } => {
            let s = 0.5f64.sqrt();
            let dim = n + 1;
            let mut amps = vec![ZERO; dim * dim];
            amps[n * dim] = Complex64::new(s, 0.0);
            amps[n] = Complex64::new(s, 0.0);
            FockState::new(n, amps)
        }
        Probe::FockPair { n } => make_fock(n, n, n),
        Probe::TwinFock { n } => beam_splitter(&make_fock(n, n, 2 * n)?, first),
        Probe::FraternalTwinFock { n } => beam_splitter(&make_fock(n + 1, n, 2 * n + 1)?, first),
        Probe::SeparableCoherentProbe { n } => beam_splitter(&make_fock(n, 0, n)?, first),
        _ => unreachable!("continuous probe passed to fixed_number_state"),
    }
}

/// Smallest cutoff whose discarded weight and discarded second moment are both
/// within bounds, given a grid at the ceiling.
fn choose_cutoff(grid: &[Complex64], ceiling: usize, cfg: &BuildConfig) -> Option<(usize, f64)> {
    let dim = ceiling + 1;
    let mut level_mass = vec![0.0; dim];
    let mut level_moment = vec![0.0; dim];
    let mut total = 0.0;
    for (idx, c) in grid.iter().enumerate() {
        let (j, k) = (idx / dim, idx % dim);
        let w = c.norm_sqr();
        total += w;
        level_mass[j.max(k)] += w;
        level_moment[j.max(k)] += ((j * j + k * k) as f64) * w;
    }
    // The amplitudes must have decayed by the ceiling, otherwise nothing
    // bounds what lies beyond it.
    if level_moment[ceiling] >= cfg.tail_moment_tol {
        return None;
    }
    // Weight beyond the ceiling. Below 1e-12 the difference is dominated by
    // summation rounding and the decay check above covers it.
    let outside = match 1.0 - total {
        d if d < 1e-12 => 0.0,
        d => d,
    };
    let mut loss = outside;
    let mut tail = outside * 2.0 * (dim * dim) as f64;
    // Walk down from the ceiling accumulating the discarded tail.
    let mut best = None;
    for n in (0..=ceiling).rev() {
        if loss < cfg.max_truncation_loss && tail < cfg.tail_moment_tol {
            best = Some((n, loss));
        } else {
            break;
        }
        loss += level_mass[n];
        tail += level_moment[n];
    }
    best
}

fn crop(grid: &[Complex64], from: usize, to: usize) -> Vec<Complex64> {
    let src = from + 1;
    let dim = to + 1;
    let mut out = Vec::with_capacity(dim * dim);
    for j in 0..dim {
        out.extend_from_slice(&grid[j * src..j * src + dim]);
    }
    out
}

/// Builds the probe described by `spec`.
pub fn build(spec: &ProbeSpec, cfg: &BuildConfig) -> Result<FockState> {
    let probe = &spec.probe;
    probe.validate()?;
    if let CutoffPolicy::Explicit(n) = spec.cutoff {
        if n > cfg.cutoff_ceiling {
            return Err(Error::InvalidParameter(format!(
                "explicit cutoff {n} exceeds the ceiling {}",
                cfg.cutoff_ceiling
            )));
        }
    }
    if probe.family().is_fixed_number() {
        let state = fixed_number_state(probe)?;
        return match spec.cutoff {
            CutoffPolicy::Auto => Ok(state),
            CutoffPolicy::Explicit(n) => state.resize(n, cfg.max_truncation_loss),
        };
    }
    match spec.cutoff {
        CutoffPolicy::Explicit(n) => {
            let grid = continuous_grid(probe, n)?;
            let kept: f64 = grid.iter().map(|c| c.norm_sqr()).sum();
            FockState::with_truncation(n, grid, (1.0 - kept).max(0.0), cfg.max_truncation_loss)
        }
        CutoffPolicy::Auto => {
            let ceiling = cfg.cutoff_ceiling;
            let grid = continuous_grid(probe, ceiling)?;
            let (n, loss) =
                choose_cutoff(&grid, ceiling, cfg).ok_or(Error::CeilingInsufficient {
                    ceiling,
                    max: cfg.max_truncation_loss,
                })?;
            FockState::with_truncation(n, crop(&grid, ceiling, n), loss, cfg.max_truncation_loss)
        }
    }
}

/// [`build`] with automatic cutoff and the default configuration.
pub fn build_probe(probe: Probe) -> Result<FockState> {
    build(&ProbeSpec::auto(probe), &BuildConfig::default())
}

/// `⟨n̂_a + n̂_b⟩` from the amplitude grid.
pub fn mean_photon_number(state: &FockState) -> f64 {
    let dim = state.dim();
    state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(idx, c)| ((idx / dim + idx % dim) as f64) * c.norm_sqr())
        .sum()
}

/// Parameters realizing a requested mean photon number.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NbarSolution {
    pub probe: Probe,
    pub target: f64,
    /// `n̄` of the built state.
    pub nbar: f64,
    /// True when a fixed-number family was moved to the nearest attainable
    /// value.
    pub adjusted: bool,
}

/// Finds family parameters whose built state has mean photon number `nbar`.
///
/// Continuous families are solved by bisection on the monotone map from
/// parameter to numerically computed `n̄`. Fixed-number families take the
/// nearest attainable `n̄`, ties going to the smaller photon number.
pub fn solve_param_for_nbar(family: Family, nbar: f64, cfg: &BuildConfig) -> Result<NbarSolution> {
    let unattainable = |reason: &str| Error::Unattainable {
        family: family.name().into(),
        nbar,
        reason: reason.into(),
    };
    if !(nbar > 0.0 && nbar.is_finite()) {
        return Err(unattainable("target must be positive and finite"));
    }
    if let Some((slope, offset, n_min)) = family.integer_ladder() {
        let value = |n: usize| (slope * n + offset) as f64;
        if nbar < value(n_min) {
            return Err(unattainable(&format!(
                "smallest attainable mean photon number is {}",
                value(n_min)
            )));
        }
        let below = ((nbar - offset as f64) / slope as f64).floor().max(n_min as f64) as usize;
        let n = if (value(below + 1) - nbar).abs() < (nbar - value(below)).abs() {
            below + 1
        } else {
            below
        };
        let probe = Probe::with_parameter(family, n as f64);
        return Ok(NbarSolution {
            probe,
            target: nbar,
            nbar: value(n),
            adjusted: value(n) != nbar,
        });
    }

    let nbar_of = |param: f64| -> Result<f64> {
        let state = build(&ProbeSpec::auto(Probe::with_parameter(family, param)), cfg)?;
        Ok(mean_photon_number(&state))
    };
    let floor = nbar_of(0.0)?;
    if nbar < floor {
        return Err(unattainable(&format!(
            "family starts at mean photon number {floor}"
        )));
    }
    let mut lo = 0.0;
    let mut hi = match family {
        Family::Coherent | Family::EntangledCoherent => nbar.sqrt(),
        // n̄ = 1 + 4 sinh²ξ
        Family::AmplifiedBell => ((nbar - 1.0) / 4.0).sqrt().asinh(),
        _ => (nbar / 2.0).sqrt().asinh(),
    }
    .max(0.25)
        * 1.1;
    loop {
        match nbar_of(hi) {
            Ok(v) if v >= nbar => break,
            Ok(_) => {
                lo = hi;
                hi *= 1.25;
            }
            Err(Error::CeilingInsufficient { .. }) => {
                return Err(unattainable("requires a cutoff above the ceiling"))
            }
            Err(e) => return Err(e),
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = nbar_of(mid)?;
        if (v - nbar).abs() <= 1e-13 * nbar.max(1.0) {
            lo = mid;
            hi = mid;
            break;
        }
        if v < nbar {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let param = 0.5 * (lo + hi);
    let probe = Probe::with_parameter(family, param);
    let realized = nbar_of(param)?;
    Ok(NbarSolution {
        probe,
        target: nbar,
        nbar: realized,
        adjusted: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{inner, phase_distance};

    #[test]
    fn noon_definition() {
        let s = build_probe(Probe::Noon { n: 2 }).unwrap();
        let h = 0.5f64.sqrt();
        assert!((s.amp(2, 0).re - h).abs() < 1e-15);
        assert!((s.amp(0, 2).re - h).abs() < 1e-15);
        assert_eq!(s.cutoff(), 2);
    }

    #[test]
    fn tmsv_amplitudes() {
        let chi = 0.7;
        let s = build_probe(Probe::TwoModeSqueezedVacuum { chi }).unwrap();
        for n in 0..10 {
            let want = chi.tanh().powi(n as i32) / chi.cosh();
            assert!((s.amp(n, n).re - want).abs() < 1e-12);
            assert!(s.amp(n, n + 1).norm() == 0.0);
        }
        assert!(s.truncation_loss() < 1e-10);
    }

    #[test]
    fn coherent_mean_number() {
        let s = build_probe(Probe::Coherent {
            alpha: Complex64::new(2.0, 0.0),
        })
        .unwrap();
        assert!((mean_photon_number(&s) - 4.0).abs() < 1e-10);
        // mode b carries the −i phase: amplitude(0,1)/amplitude(0,0) = −iα/√2
        let ratio = s.amp(0, 1) / s.amp(0, 0);
        assert!((ratio - Complex64::new(0.0, -(2f64.sqrt()))).norm() < 1e-12);
    }

    #[test]
    fn closed_form_squeezing_matches_exponentiation() {
        for xi in [0.1, 0.5, 1.0] {
            let cutoff = 60;
            let s = squeezer_by_exponentiation(xi, 400);
            for (fock, closed) in [
                (0, squeezed_vacuum(xi, cutoff)),
                (1, squeezed_single_photon(xi, cutoff)),
            ] {
                let worst = (0..=cutoff)
                    .map(|m| (s[(m, fock)] - closed[m]).norm())
                    .fold(0.0, f64::max);
                assert!(worst < 1e-10, "xi={xi} fock={fock} worst={worst}");
            }
        }
    }

    #[test]
    fn squeezed_single_photon_is_normalized() {
        let v = squeezed_single_photon(0.8, 250);
        let norm: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entangled_coherent_exact_norm() {
        let alpha = Complex64::new(0.6, 0.0);
        let s = build_probe(Probe::EntangledCoherent { alpha }).unwrap();
        // vacuum amplitude gets contributions from both branches
        let norm = 1.0 / (2.0 + 2.0 * (-0.36f64).exp()).sqrt();
        let want = 2.0 * norm * (-0.18f64).exp();
        assert!((s.amp(0, 0).re - want).abs() < 1e-12);
    }

    #[test]
    fn amplified_bell_at_zero_squeezing_is_split_photon() {
        let s = build_probe(Probe::AmplifiedBell { xi: 0.0 }).unwrap();
        let split = build_probe(Probe::SeparableCoherentProbe { n: 1 }).unwrap();
        assert!(phase_distance(&s, &split) < 1e-14);
    }

    #[test]
    fn invalid_parameters() {
        assert!(build_probe(Probe::TwinSqueezedVacuum { xi: -0.1 }).is_err());
        assert!(build_probe(Probe::TwoModeSqueezedVacuum { chi: f64::NAN }).is_err());
        assert!(build_probe(Probe::Noon { n: 0 }).is_err());
        let spec = ProbeSpec {
            probe: Probe::Coherent {
                alpha: Complex64::new(3.0, 0.0),
            },
            cutoff: CutoffPolicy::Explicit(5),
        };
        assert!(matches!(
            build(&spec, &BuildConfig::default()),
            Err(Error::TruncationLoss { .. })
        ));
        let tight = BuildConfig {
            cutoff_ceiling: 20,
            ..BuildConfig::default()
        };
        assert!(matches!(
            build(&ProbeSpec::auto(Probe::TwinSqueezedVacuum { xi: 1.0 }), &tight),
            Err(Error::CeilingInsufficient { .. })
        ));
    }

    #[test]
    fn explicit_cutoff_pads_fixed_number_states() {
        let spec = ProbeSpec {
            probe: Probe::TwinFock { n: 1 },
            cutoff: CutoffPolicy::Explicit(6),
        };
        let s = build(&spec, &BuildConfig::default()).unwrap();
        assert_eq!(s.cutoff(), 6);
        let small = build_probe(Probe::TwinFock { n: 1 }).unwrap();
        assert!((inner(&s, &small).norm() - 1.0).abs() < 1e-14);
        let too_small = ProbeSpec {
            probe: Probe::TwinFock { n: 1 },
            cutoff: CutoffPolicy::Explicit(1),
        };
        assert!(build(&too_small, &BuildConfig::default()).is_err());
    }

    #[test]
    fn nbar_solutions() {
        let cfg = BuildConfig::default();
        let tmsv = solve_param_for_nbar(Family::TwoModeSqueezedVacuum, 2.0, &cfg).unwrap();
        match tmsv.probe {
            // n̄ = 2 sinh²χ
            Probe::TwoModeSqueezedVacuum { chi } => assert!((chi - 1f64.asinh()).abs() < 1e-9),
            other => panic!("unexpected {other:?}"),
        }
        assert!((tmsv.nbar - 2.0).abs() < 1e-8);

        let noon = solve_param_for_nbar(Family::Noon, 3.0, &cfg).unwrap();
        assert_eq!(noon.probe, Probe::Noon { n: 3 });
        assert!(!noon.adjusted);
        let twin = solve_param_for_nbar(Family::TwinFock, 4.0, &cfg).unwrap();
        assert_eq!(twin.probe, Probe::TwinFock { n: 2 });
        let frat = solve_param_for_nbar(Family::FraternalTwinFock, 4.0, &cfg).unwrap();
        assert_eq!(frat.probe, Probe::FraternalTwinFock { n: 1 });
        assert!(frat.adjusted);
        assert_eq!(frat.nbar, 3.0);

        assert!(matches!(
            solve_param_for_nbar(Family::Noon, 0.5, &cfg),
            Err(Error::Unattainable { .. })
        ));
        assert!(solve_param_for_nbar(Family::AmplifiedBell, 0.5, &cfg).is_err());
        assert!(solve_param_for_nbar(Family::Coherent, -1.0, &cfg).is_err());
    }

    #[test]
    fn continuous_families_hit_target() {
        let cfg = BuildConfig::default();
        for family in [
            Family::TwinSqueezedVacuum,
            Family::EntangledCoherent,
            Family::AmplifiedBell,
            Family::Coherent,
        ] {
            let sol = solve_param_for_nbar(family, 3.5, &cfg).unwrap();
            assert!((sol.nbar - 3.5).abs() < 1e-8, "{family}: {}", sol.nbar);
            let built = build_probe(sol.probe).unwrap();
            assert!((mean_photon_number(&built) - 3.5).abs() < 1e-8);
        }
    }
}
