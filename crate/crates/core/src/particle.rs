//! Fixed photon number sectors seen as `n` two-level particles.
//!
//! A photon in arm `a` is the internal state `|μ⟩`, a photon in arm `b` is
//! `|ν⟩`, so `Ĵz = ½ Σ σ̂z⁽ⁱ⁾` with `σ̂z|μ⟩ = |μ⟩`. The production path uses
//! the collective moments; [`multiqubit_oracle`] rebuilds the symmetric
//! `n`-qubit vector explicitly for small `n`.

use crate::error::{Error, Result};
use crate::fock::{moment, FockState, FockVector, MomentSpec};
use crate::scalar::{Reason, Scalar};
use crate::schwinger::{j_moment, sector_rotation, GeneratorTag, SpinDirection};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

/// Sectors lighter than this are left out of a decomposition.
pub const SECTOR_WEIGHT_FLOOR: f64 = 1e-14;
/// Weight a sector needs to count as the whole state.
pub const FIXED_NUMBER_TOLERANCE: f64 = 1e-9;
/// Covariance above which the particle-entanglement witness fires.
pub const DEFAULT_WITNESS_TOLERANCE: f64 = 1e-9;
/// Largest `n` for the explicit qubit oracle.
pub const ORACLE_MAX_N: usize = 10;
/// Largest `n` for the locality check.
pub const LOCALITY_MAX_N: usize = 6;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Normalized component of a state with exactly `n` photons, stored as
/// coefficients of `|k, n−k⟩` for `k = 0..=n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sector {
    pub n: usize,
    pub weight: f64,
    pub coeffs: Vec<Complex64>,
}

impl Sector {
    /// The sector as a state on the smallest grid that holds it.
    pub fn to_fock(&self) -> FockState {
        let dim = self.n + 1;
        let mut amps = vec![ZERO; dim * dim];
        for (k, c) in self.coeffs.iter().enumerate() {
            amps[k * dim + (self.n - k)] = *c;
        }
        FockState::new(self.n, amps).expect("sector coefficients are normalized")
    }

    /// Particle moments from the sector coefficients.
    pub fn report(&self) -> Option<ParticleReport> {
        if self.n == 0 {
            return None;
        }
        let half = self.n as f64 / 2.0;
        let (mut jz, mut jz2) = (0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate() {
            let m = k as f64 - half;
            jz += m * c.norm_sqr();
            jz2 += m * m * c.norm_sqr();
        }
        Some(ParticleReport::from_collective(self.n, jz, jz2, DEFAULT_WITNESS_TOLERANCE))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SectorDecomposition {
    pub sectors: Vec<Sector>,
    pub weights_sum: f64,
}

impl SectorDecomposition {
    /// The sector holding all but `FIXED_NUMBER_TOLERANCE` of the weight.
    pub fn dominant(&self) -> Option<&Sector> {
        self.sectors
            .iter()
            .find(|s| s.weight > 1.0 - FIXED_NUMBER_TOLERANCE)
    }
}

/// Projects `state` onto each total photon number.
pub fn decompose_sectors(state: &(impl FockVector + Sync)) -> SectorDecomposition {
    let cutoff = state.cutoff();
    let sectors: Vec<Sector> = (0..=2 * cutoff)
        .into_par_iter()
        .filter_map(|n| {
            let lo = n.saturating_sub(cutoff);
            let hi = n.min(cutoff);
            let mut coeffs = vec![ZERO; n + 1];
            let mut weight = 0.0;
            for k in lo..=hi {
                let c = state.amp(k, n - k);
                coeffs[k] = c;
                weight += c.norm_sqr();
            }
            if weight < SECTOR_WEIGHT_FLOOR {
                return None;
            }
            let scale = 1.0 / weight.sqrt();
            coeffs.iter_mut().for_each(|c| *c *= scale);
            Some(Sector { n, weight, coeffs })
        })
        .collect();
    let weights_sum = sectors.iter().map(|s| s.weight).sum();
    SectorDecomposition {
        sectors,
        weights_sum,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ParticleReport {
    pub n: usize,
    pub mean_sigma_z: f64,
    pub var_sigma_z: f64,
    /// `Cov[σ̂z⁽ⁱ⁾, σ̂z⁽ʲ⁾]` for `i ≠ j`; zero by convention when `n = 1`.
    pub cov_sigma_z: f64,
    pub f_particle: f64,
    pub witness_entangled: bool,
}

impl ParticleReport {
    /// Single-particle moments from `⟨Ĵz⟩` and `⟨Ĵz²⟩` of an `n`-photon state.
    fn from_collective(n: usize, jz: f64, jz2: f64, witness_tol: f64) -> Self {
        let nf = n as f64;
        let mean = 2.0 * jz / nf;
        let var = 1.0 - mean * mean;
        let cov = if n >= 2 {
            (4.0 * jz2 - nf) / (nf * (nf - 1.0)) - mean * mean
        } else {
            0.0
        };
        Self::from_parts(n, mean, var, cov, witness_tol)
    }

    fn from_parts(n: usize, mean: f64, var: f64, cov: f64, witness_tol: f64) -> Self {
        let nf = n as f64;
        let pair_term = if n >= 2 { nf * (nf - 1.0) * cov } else { 0.0 };
        ParticleReport {
            n,
            mean_sigma_z: mean,
            var_sigma_z: var,
            cov_sigma_z: cov,
            f_particle: nf * var + pair_term,
            witness_entangled: cov > witness_tol,
        }
    }
}

fn check_single_sector(state: &FockState, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "particle picture needs at least one photon".into(),
        ));
    }
    let dim = state.dim();
    let outside: f64 = state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(idx, _)| idx / dim + idx % dim != n)
        .map(|(_, c)| c.norm_sqr())
        .sum();
    if outside > FIXED_NUMBER_TOLERANCE {
        return Err(Error::NotFixedNumber { n, outside });
    }
    Ok(())
}

/// Particle moments of an `n`-photon state through the collective spin.
pub fn particle_moments(state: &FockState, n: usize) -> Result<ParticleReport> {
    check_single_sector(state, n)?;
    let jz = j_moment(state, GeneratorTag::Jz, 1)?;
    let jz2 = j_moment(state, GeneratorTag::Jz, 2)?;
    Ok(ParticleReport::from_collective(
        n,
        jz,
        jz2,
        DEFAULT_WITNESS_TOLERANCE,
    ))
}

/// Particle-picture QFI, defined only for a definite photon number.
pub fn qfi_particle(decomp: &SectorDecomposition) -> Scalar {
    match decomp.dominant() {
        Some(s) if s.n == 0 => Scalar::Undefined(Reason::NoPhotons),
        Some(s) => Scalar::Value(s.report().expect("n >= 1").f_particle),
        None => Scalar::Undefined(Reason::ParticleFluctuations),
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Symmetric `n`-qubit vector of an `n`-photon state. Bit `i` of the index
/// is 0 for `|μ⟩` and 1 for `|ν⟩`.
pub fn symmetric_qubit_vector(state: &FockState, n: usize) -> Result<Vec<Complex64>> {
    if n > ORACLE_MAX_N {
        return Err(Error::OracleTooLarge {
            n,
            max: ORACLE_MAX_N,
        });
    }
    check_single_sector(state, n)?;
    Ok((0..1usize << n)
        .map(|x| {
            let k = n - x.count_ones() as usize;
            state.amp(k, n - k) / binomial(n, k).sqrt()
        })
        .collect())
}

fn sigma_z(x: usize, i: usize) -> f64 {
    if (x >> i) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Particle moments evaluated directly in the `2ⁿ`-dimensional qubit space,
/// averaging over particles and particle pairs.
pub fn multiqubit_oracle(state: &FockState, n: usize) -> Result<ParticleReport> {
    let psi = symmetric_qubit_vector(state, n)?;
    let probs: Vec<f64> = psi.iter().map(|c| c.norm_sqr()).collect();
    let mean_i: Vec<f64> = (0..n)
        .map(|i| probs.iter().enumerate().map(|(x, p)| p * sigma_z(x, i)).sum())
        .collect();
    let nf = n as f64;
    let mean = mean_i.iter().sum::<f64>() / nf;
    let var = mean_i.iter().map(|m| 1.0 - m * m).sum::<f64>() / nf;
    let mut cov = 0.0;
    if n >= 2 {
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let zz: f64 = probs
                    .iter()
                    .enumerate()
                    .map(|(x, p)| p * sigma_z(x, i) * sigma_z(x, j))
                    .sum();
                cov += zz - mean_i[i] * mean_i[j];
            }
        }
        cov /= nf * (nf - 1.0);
    }
    Ok(ParticleReport::from_parts(
        n,
        mean,
        var,
        cov,
        DEFAULT_WITNESS_TOLERANCE,
    ))
}

/// Pauli matrix element `⟨b'|v·σ̂|b⟩` with `0 = μ`, `1 = ν`.
fn pauli_v(v: [f64; 3], out: usize, inp: usize) -> Complex64 {
    match (out, inp) {
        (0, 0) => Complex64::new(v[2], 0.0),
        (1, 1) => Complex64::new(-v[2], 0.0),
        (0, 1) => Complex64::new(v[0], -v[1]),
        _ => Complex64::new(v[0], v[1]),
    }
}

/// `exp(−iθ v·σ̂/2)` for one qubit.
fn qubit_rotation(v: [f64; 3], theta: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    let mut u = [[ZERO; 2]; 2];
    for (out, row) in u.iter_mut().enumerate() {
        for (inp, entry) in row.iter_mut().enumerate() {
            let id = if out == inp { c } else { 0.0 };
            *entry = Complex64::new(id, 0.0) - Complex64::new(0.0, s) * pauli_v(v, out, inp);
        }
    }
    u
}

fn hermitian_exp(h: &DMatrix<Complex64>, angle: f64) -> DMatrix<Complex64> {
    let eig = h.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (mut col, &lambda) in scaled.column_iter_mut().zip(eig.eigenvalues.iter()) {
        col *= Complex64::from_polar(1.0, -angle * lambda);
    }
    scaled * v.adjoint()
}

fn spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    m.clone()
        .singular_values()
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// Operator distance between `exp(−iγ v·Ĵ)` and the product of single-qubit
/// rotations `exp(−i(γ/2) v·σ̂)` on the symmetric subspace, and between the
/// collective exponential and the mode-picture sector rotation.
pub fn locality_distance(n: usize, v: &SpinDirection, gamma: f64) -> Result<f64> {
    if n == 0 || n > LOCALITY_MAX_N {
        return Err(Error::InvalidParameter(format!(
            "locality check supports 1 <= n <= {LOCALITY_MAX_N}, got {n}"
        )));
    }
    let vc = v.components();
    let dim = 1usize << n;
    let mut collective = DMatrix::<Complex64>::zeros(dim, dim);
    let mut product = DMatrix::<Complex64>::from_element(dim, dim, Complex64::new(1.0, 0.0));
    let u = qubit_rotation(vc, gamma);
    for x in 0..dim {
        for i in 0..n {
            let b = (x >> i) & 1;
            collective[(x, x)] += pauli_v(vc, b, b) * 0.5;
            let y = x ^ (1 << i);
            collective[(y, x)] += pauli_v(vc, 1 - b, b) * 0.5;
        }
        for y in 0..dim {
            for i in 0..n {
                product[(y, x)] *= u[(y >> i) & 1][(x >> i) & 1];
            }
        }
    }
    let exact = hermitian_exp(&collective, gamma);

    // Dicke isometry, column k = |k photons in arm a⟩.
    let mut dicke = DMatrix::<Complex64>::zeros(dim, n + 1);
    for x in 0..dim {
        let k = n - x.count_ones() as usize;
        dicke[(x, k)] = Complex64::new(1.0 / binomial(n, k).sqrt(), 0.0);
    }
    let tensor_gap = spectral_norm(&((&product - &exact) * &dicke));
    let mode = sector_rotation(n, v, gamma);
    let mode_gap = spectral_norm(&(dicke.adjoint() * &exact * &dicke - mode));
    Ok(tensor_gap.max(mode_gap))
}

/// Whether the collective rotation factorizes into identical single-qubit
/// rotations within `1e-10`.
pub fn locality_check(n: usize, v: &SpinDirection, gamma: f64) -> Result<bool> {
    Ok(locality_distance(n, v, gamma)? < 1e-10)
}

/// Eigenvalues, ascending, of the one-particle reduced state
/// `ρ_ij = ⟨ĉ_j† ĉ_i⟩ / n` of an `n`-photon state.
pub fn one_body_spectrum(state: &FockState, n: usize) -> Result<[f64; 2]> {
    check_single_sector(state, n)?;
    let nf = n as f64;
    let m = |p, q, r, s| moment(state, MomentSpec { p, q, r, s });
    let raa = m(1, 1, 0, 0)?.re / nf;
    let rbb = m(0, 0, 1, 1)?.re / nf;
    // ρ_ab = ⟨b̂†â⟩ / n
    let rab = m(0, 1, 1, 0)? / nf;
    let mid = 0.5 * (raa + rbb);
    let gap = (0.25 * (raa - rbb).powi(2) + rab.norm_sqr()).sqrt();
    Ok([mid - gap, mid + gap])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factory::{build_probe, Probe};
    use crate::fock::make_fock;
    use crate::qfi::qfi_variance;
    use crate::schwinger::{beam_splitter, BeamSplitter};

    #[test]
    fn noon_bridge() {
        let s = build_probe(Probe::Noon { n: 3 }).unwrap();
        let r = particle_moments(&s, 3).unwrap();
        assert!(r.mean_sigma_z.abs() < 1e-15);
        assert!((r.var_sigma_z - 1.0).abs() < 1e-14);
        assert!((r.cov_sigma_z - 1.0).abs() < 1e-14);
        assert!((r.f_particle - 9.0).abs() < 1e-12);
        assert!(r.witness_entangled);
    }

    #[test]
    fn split_fock_is_product() {
        for n in 1..8 {
            let s = build_probe(Probe::SeparableCoherentProbe { n }).unwrap();
            let r = particle_moments(&s, n).unwrap();
            assert!(r.cov_sigma_z.abs() < 1e-12, "n={n}: {}", r.cov_sigma_z);
            assert!((r.f_particle - n as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn fock_pair_has_no_information() {
        let s = make_fock(3, 3, 3).unwrap();
        let r = particle_moments(&s, 6).unwrap();
        assert_eq!(r.mean_sigma_z, 0.0);
        assert!(r.f_particle.abs() < 1e-12);
    }

    #[test]
    fn single_photon_convention() {
        let r = particle_moments(&make_fock(1, 0, 1).unwrap(), 1).unwrap();
        assert_eq!(r.mean_sigma_z, 1.0);
        assert_eq!(r.var_sigma_z, 0.0);
        assert_eq!(r.cov_sigma_z, 0.0);
        assert_eq!(r.f_particle, 0.0);
    }

    #[test]
    fn multi_sector_rejected() {
        let s = build_probe(Probe::Coherent {
            alpha: Complex64::new(1.0, 0.0),
        })
        .unwrap();
        assert!(matches!(
            particle_moments(&s, 1),
            Err(Error::NotFixedNumber { .. })
        ));
        assert_eq!(
            qfi_particle(&decompose_sectors(&s)),
            Scalar::Undefined(Reason::ParticleFluctuations)
        );
        assert_eq!(
            qfi_particle(&decompose_sectors(&FockState::vacuum(2))),
            Scalar::Undefined(Reason::NoPhotons)
        );
    }

    #[test]
    fn decomposition_of_tmsv() {
        let chi = 0.6f64;
        let s = build_probe(Probe::TwoModeSqueezedVacuum { chi }).unwrap();
        let d = decompose_sectors(&s);
        assert!((d.weights_sum - 1.0).abs() < 1e-10);
        for sector in &d.sectors {
            assert_eq!(sector.n % 2, 0);
            let m = sector.n / 2;
            let want = chi.tanh().powi(2 * m as i32) / chi.cosh().powi(2);
            assert!((sector.weight - want).abs() < 1e-12);
            assert!((sector.coeffs[m].norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn decomposition_of_fock_ket() {
        let d = decompose_sectors(&make_fock(2, 1, 4).unwrap());
        assert_eq!(d.sectors.len(), 1);
        assert_eq!(d.sectors[0].n, 3);
        assert_eq!(d.sectors[0].weight, 1.0);
    }

    #[test]
    fn oracle_examples() {
        let h = Complex64::new(0.5f64.sqrt(), 0.0);
        let mut amps = vec![Complex64::new(0.0, 0.0); 9];
        amps[6] = h;
        amps[2] = -h;
        let hom = FockState::new(2, amps).unwrap();
        let psi = symmetric_qubit_vector(&hom, 2).unwrap();
        // (|μμ⟩ − |νν⟩)/√2
        assert!(psi[1].norm() < 1e-14 && psi[2].norm() < 1e-14);
        assert!((psi[0] - h).norm() < 1e-14 && (psi[3] + h).norm() < 1e-14);
        let r = multiqubit_oracle(&hom, 2).unwrap();
        assert!((r.cov_sigma_z - 1.0).abs() < 1e-14);
        let ours = beam_splitter(&make_fock(1, 1, 2).unwrap(), BeamSplitter::First).unwrap();
        assert!((multiqubit_oracle(&ours, 2).unwrap().cov_sigma_z - 1.0).abs() < 1e-14);

        let split = build_probe(Probe::SeparableCoherentProbe { n: 2 }).unwrap();
        assert!(multiqubit_oracle(&split, 2).unwrap().cov_sigma_z.abs() < 1e-14);

        let one = multiqubit_oracle(&make_fock(1, 0, 1).unwrap(), 1).unwrap();
        assert_eq!((one.mean_sigma_z, one.var_sigma_z), (1.0, 0.0));

        assert!(matches!(
            multiqubit_oracle(&make_fock(11, 0, 11).unwrap(), 11),
            Err(Error::OracleTooLarge { .. })
        ));
    }

    #[test]
    fn oracle_matches_bridge() {
        for n in 1..=6 {
            for probe in [
                Probe::Noon { n },
                Probe::FraternalTwinFock { n: n / 2 },
                Probe::SeparableCoherentProbe { n },
            ] {
                let s = build_probe(probe).unwrap();
                let total = match probe {
                    Probe::FraternalTwinFock { n } => 2 * n + 1,
                    _ => n,
                };
                let a = particle_moments(&s, total).unwrap();
                let b = multiqubit_oracle(&s, total).unwrap();
                for (x, y) in [
                    (a.mean_sigma_z, b.mean_sigma_z),
                    (a.var_sigma_z, b.var_sigma_z),
                    (a.cov_sigma_z, b.cov_sigma_z),
                    (a.f_particle, b.f_particle),
                ] {
                    assert!((x - y).abs() < 1e-10, "{probe:?}: {x} vs {y}");
                }
            }
        }
    }

    #[test]
    fn particle_route_equals_variance() {
        let s = build_probe(Probe::TwinFock { n: 1 }).unwrap();
        let f = qfi_particle(&decompose_sectors(&s)).expect("fixed n");
        assert!((f - 4.0).abs() < 1e-12);
        assert!((f - qfi_variance(&s)).abs() < 1e-12);
    }

    #[test]
    fn locality_examples() {
        assert!(locality_check(2, &SpinDirection::X, std::f64::consts::FRAC_PI_2).unwrap());
        assert!(locality_check(3, &SpinDirection::Y, 0.7).unwrap());
        assert!(locality_check(1, &SpinDirection::Z, 2.3).unwrap());
        assert!(locality_check(7, &SpinDirection::Z, 1.0).is_err());
    }

    #[test]
    fn one_body_spectrum_of_product_is_pure() {
        let s = build_probe(Probe::SeparableCoherentProbe { n: 4 }).unwrap();
        let [lo, hi] = one_body_spectrum(&s, 4).unwrap();
        assert!(lo.abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);
        let noon = build_probe(Probe::Noon { n: 4 }).unwrap();
        let [lo, hi] = one_body_spectrum(&noon, 4).unwrap();
        assert!((lo - 0.5).abs() < 1e-12 && (hi - 0.5).abs() < 1e-12);
    }
}
