//! Quantum Fisher information of the interferometer phase.
//!
//! `4 Var[Ĵz]` is the reference value. The coherence-function formulas, the
//! fidelity finite difference and the particle-picture sum are independent
//! validators of it.

use crate::coherence::CoherenceReport;
use crate::error::{Error, Result};
use crate::fock::{FockState, FockVector};
use crate::particle::{decompose_sectors, qfi_particle};
use crate::scalar::{Reason, Scalar};
use crate::schwinger::{j_moment, phase_shift, GeneratorTag};
use num_complex::Complex64;
use serde::Serialize;

pub const DEFAULT_STEP: f64 = 1e-3;
pub const MIN_STEP: f64 = 1e-5;
pub const MAX_STEP: f64 = 1e-2;

/// `4(⟨Ĵz²⟩ − ⟨Ĵz⟩²)`.
pub fn qfi_variance(state: &FockState) -> f64 {
    let first = j_moment(state, GeneratorTag::Jz, 1).expect("Jz moments are real");
    let second = j_moment(state, GeneratorTag::Jz, 2).expect("Jz moments are real");
    4.0 * (second - first * first)
}

fn first_undefined(values: &[Scalar]) -> Option<Reason> {
    values.iter().find_map(|v| v.reason())
}

/// Coherence-function form `n̄ + n̄_a²(g2_a−1) + n̄_b²(g2_b−1) − 2n̄_a n̄_b(g2_ab−1)`.
pub fn qfi_mode(r: &CoherenceReport) -> Scalar {
    if let Some(reason) = first_undefined(&[r.g2_a, r.g2_b, r.g2_ab]) {
        return Scalar::Undefined(reason);
    }
    let (ga, gb, gab) = (r.g2_a.expect("g2_a"), r.g2_b.expect("g2_b"), r.g2_ab.expect("g2_ab"));
    Scalar::Value(
        r.nbar + r.nbar_a.powi(2) * (ga - 1.0) + r.nbar_b.powi(2) * (gb - 1.0)
            - 2.0 * r.nbar_a * r.nbar_b * (gab - 1.0),
    )
}

/// `n̄ + (n̄²/2)(g2 − g2_ab)`, only for path-symmetric states.
pub fn qfi_path_symmetric(r: &CoherenceReport) -> Scalar {
    if !r.path_symmetric {
        return Scalar::Undefined(Reason::NotPathSymmetric);
    }
    if let Some(reason) = first_undefined(&[r.g2_a, r.g2_ab]) {
        return Scalar::Undefined(reason);
    }
    let g2 = r.g2_a.expect("g2_a");
    Scalar::Value(r.nbar + r.nbar * r.nbar / 2.0 * (g2 - r.g2_ab.expect("g2_ab")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum FiniteDifference {
    /// Central differences at `h` and `h/2` combined to cancel the `h²` term.
    #[default]
    Richardson,
    /// A single central difference at `h`.
    Central,
}

fn fidelity_estimate(state: &FockState, phi0: f64, h: f64) -> f64 {
    let plus = phase_shift(state, phi0 + h);
    let minus = phase_shift(state, phi0 - h);
    let here = phase_shift(state, phi0);
    let mut dd = 0.0;
    let mut overlap = Complex64::new(0.0, 0.0);
    for ((p, m), c) in plus
        .amplitudes()
        .iter()
        .zip(minus.amplitudes())
        .zip(here.amplitudes())
    {
        let d = (p - m) / (2.0 * h);
        dd += d.norm_sqr();
        overlap += d.conj() * c;
    }
    4.0 * (dd - overlap.norm_sqr())
}

/// Fidelity-route QFI at `φ = 0` with Richardson extrapolation.
pub fn qfi_fidelity(state: &FockState, step: f64) -> Result<f64> {
    qfi_fidelity_at(state, step, 0.0, FiniteDifference::Richardson)
}

/// Fidelity-route QFI evaluated around `phi0`.
pub fn qfi_fidelity_at(
    state: &FockState,
    step: f64,
    phi0: f64,
    scheme: FiniteDifference,
) -> Result<f64> {
    if !(MIN_STEP..=MAX_STEP).contains(&step) {
        return Err(Error::StepOutOfRange(step));
    }
    let coarse = fidelity_estimate(state, phi0, step);
    Ok(match scheme {
        FiniteDifference::Central => coarse,
        FiniteDifference::Richardson => {
            let fine = fidelity_estimate(state, phi0, step / 2.0);
            (4.0 * fine - coarse) / 3.0
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScalingClass {
    pub sub_shot_noise: bool,
    /// `𝔉 / n̄`
    pub f_over_nbar: f64,
    /// `𝔉 / n̄²`
    pub f_over_nbar_sq: f64,
}

pub fn classify_scaling(f: f64, nbar: f64) -> Result<ScalingClass> {
    if !(nbar > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "scaling needs a positive mean photon number, got {nbar}"
        )));
    }
    Ok(ScalingClass {
        sub_shot_noise: f > nbar + 1e-9,
        f_over_nbar: f / nbar,
        f_over_nbar_sq: f / (nbar * nbar),
    })
}

/// Cramér-Rao phase bound `1/√𝔉`.
pub fn crb(f: f64) -> Scalar {
    if f > 1e-12 {
        Scalar::Value(1.0 / f.sqrt())
    } else {
        Scalar::Undefined(Reason::ZeroInformation)
    }
}

/// Agreement tolerances between the reference route and each validator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RouteTolerances {
    pub algebraic_abs: f64,
    pub algebraic_rel: f64,
    /// Relative to `max(1, 𝔉)`.
    pub fidelity_rel: f64,
    pub particle_abs: f64,
}

impl Default for RouteTolerances {
    fn default() -> Self {
        RouteTolerances {
            algebraic_abs: 1e-9,
            algebraic_rel: 1e-9,
            fidelity_rel: 1e-6,
            particle_abs: 1e-9,
        }
    }
}

impl RouteTolerances {
    /// Uniform override, as set by the command line `--route-tol`.
    pub fn uniform(tol: f64) -> Self {
        RouteTolerances {
            algebraic_abs: tol,
            algebraic_rel: tol,
            fidelity_rel: tol.max(1e-6),
            particle_abs: tol,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QfiOptions {
    pub step: f64,
    pub scheme: FiniteDifference,
    pub tolerances: RouteTolerances,
}

impl Default for QfiOptions {
    fn default() -> Self {
        QfiOptions {
            step: DEFAULT_STEP,
            scheme: FiniteDifference::Richardson,
            tolerances: RouteTolerances::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QfiReport {
    pub f_variance: f64,
    pub f_mode: Scalar,
    pub f_path_symmetric: Scalar,
    pub f_fidelity: f64,
    pub f_particle: Scalar,
    pub crb: Scalar,
    /// Absent for the vacuum.
    pub scaling_class: Option<ScalingClass>,
    /// Largest pairwise difference among the defined routes.
    pub route_agreement: f64,
    pub routes_consistent: bool,
}

impl QfiReport {
    /// `(route, reason)` for every undefined route.
    pub fn undefined_routes(&self) -> Vec<(&'static str, Reason)> {
        [
            ("f_mode", self.f_mode),
            ("f_path_symmetric", self.f_path_symmetric),
            ("f_particle", self.f_particle),
            ("crb", self.crb),
        ]
        .into_iter()
        .filter_map(|(name, v)| v.reason().map(|r| (name, r)))
        .collect()
    }
}

fn within(a: f64, b: f64, abs: f64, rel: f64) -> bool {
    (a - b).abs() <= abs + rel * a.abs().max(b.abs())
}

/// All routes for one state. `coherence` must describe `state`.
pub fn analyze(state: &FockState, coherence: &CoherenceReport, opts: &QfiOptions) -> Result<QfiReport> {
    let f_variance = qfi_variance(state);
    let f_mode = qfi_mode(coherence);
    let f_path_symmetric = qfi_path_symmetric(coherence);
    let f_fidelity = qfi_fidelity_at(state, opts.step, 0.0, opts.scheme)?;
    let f_particle = qfi_particle(&decompose_sectors(state));

    let tol = &opts.tolerances;
    let mut consistent =
        (f_fidelity - f_variance).abs() <= tol.fidelity_rel * f_variance.abs().max(1.0);
    for v in [f_mode, f_path_symmetric].iter().filter_map(|v| v.value()) {
        consistent &= within(v, f_variance, tol.algebraic_abs, tol.algebraic_rel);
    }
    if let Some(v) = f_particle.value() {
        consistent &= (v - f_variance).abs() <= tol.particle_abs;
    }

    let defined: Vec<f64> = [Scalar::Value(f_variance), f_mode, f_path_symmetric, Scalar::Value(f_fidelity), f_particle]
        .iter()
        .filter_map(|v| v.value())
        .collect();
    let lo = defined.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = defined.iter().cloned().fold(f64::NEG_INFINITY, f64::max);

    Ok(QfiReport {
        f_variance,
        f_mode,
        f_path_symmetric,
        f_fidelity,
        f_particle,
        crb: crb(f_variance),
        scaling_class: classify_scaling(f_variance, coherence.nbar).ok(),
        route_agreement: hi - lo,
        routes_consistent: consistent,
    })
}
