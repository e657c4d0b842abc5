//! Rényi-2 entanglement of beamsplitter outputs and phase-averaged quadrature noise.

use crate::channels::{apply_stinespring, joint_output, ChannelSpec, Environment};
use crate::error::{Error, Result};
use crate::fock::{ladder_matrices, quadratures, reduced_pure, DensityOperator, FockVector, TwoMode};
use crate::gaussian::GaussianPure;
use crate::linalg;
use crate::superposition::{build_omega, OmegaState};
use rayon::prelude::*;
use std::f64::consts::FRAC_PI_4;

fn bits_from_purity(p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0 + 1e-9) {
        return Err(Error::Validity(format!("purity {p} outside (0, 1]")));
    }
    Ok((-p.log2()).max(0.0))
}

/// `-log2 tr(rho_0^2)` with `rho_0` the reduced state of mode 0.
pub fn renyi2(joint: &DensityOperator) -> Result<f64> {
    let r = crate::fock::partial_trace(joint, 0)?;
    bits_from_purity(r.purity())
}

/// [`renyi2`] of a pure two-mode state, tracing out mode `1 - keep`.
pub fn renyi2_pure(psi: &FockVector, keep: usize) -> Result<f64> {
    bits_from_purity(reduced_pure(psi, keep)?.purity())
}

/// Renyi-2 entropy of a single-mode state, in bits.
pub fn renyi2_reduced(rho: &DensityOperator) -> Result<f64> {
    bits_from_purity(rho.purity())
}

/// `-tr(rho log2 rho)`.
pub fn von_neumann_bits(rho: &DensityOperator) -> Result<f64> {
    Ok(rho.eigenvalues().iter().filter(|&&l| l > 1e-300).map(|&l| -l * l.log2()).sum())
}

/// One point of the entanglement sweep at equal input energy `e_tilde`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fig1Row {
    pub e: f64,
    pub e_tilde: f64,
    pub s2_omega: f64,
    pub s2_sqvac: f64,
    pub s2_tms: f64,
    pub n_trunc: usize,
    pub tail_mass: f64,
}

/// Entropy of the 50:50 outputs of `|0> (x) Omega_+`, `|0> (x) S(asinh sqrt Et)|0>` and
/// `S(s)|0> (x) S(-s)|0>` with `sinh^2 s = Et / 2`.
///
/// The last configuration leaves a two-mode squeezed vacuum whose reduced state is thermal with
/// mean `Et / 2`, so its entropy is `log2(Et + 1)`.
pub fn fig1_point(e: f64) -> Result<Fig1Row> {
    if e == 0.0 {
        return Ok(Fig1Row { e, e_tilde: 0.0, s2_omega: 0.0, s2_sqvac: 0.0, s2_tms: 0.0, n_trunc: 1, tail_mass: 0.0 });
    }
    let om = build_omega(e, None)?;
    let et = om.e_tilde;
    let vac = DensityOperator::from_pure(&FockVector::vacuum(1));
    let s2 = |env: Environment| -> Result<f64> {
        let out = apply_stinespring(&ChannelSpec::attenuator(FRAC_PI_4, env), &vac)?;
        renyi2_reduced(&out)
    };
    let s2_omega = s2(Environment::Omega(Box::new(om.clone())))?;
    let s2_sqvac = s2(Environment::Gaussian(GaussianPure::real(0.0, et.sqrt().asinh())))?;
    let s2_tms = (et + 1.0).log2();
    Ok(Fig1Row { e, e_tilde: et, s2_omega, s2_sqvac, s2_tms, n_trunc: om.fock.n_trunc(), tail_mass: om.tail_mass() })
}

pub fn fig1_sweep(e_grid: &[f64]) -> Result<Vec<Fig1Row>> {
    if let Some(bad) = e_grid.iter().find(|e| !(**e >= 0.0) || !e.is_finite()) {
        return Err(Error::Domain(format!("energy {bad} must be finite and >= 0")));
    }
    e_grid.par_iter().map(|&e| fig1_point(e)).collect()
}

/// Beamsplitter output of `S(s)|0> (x) S(-s)|0>` in Fock space.
pub fn tms_configuration_output(e_tilde: f64) -> Result<FockVector> {
    let s = (0.5 * e_tilde).sqrt().asinh();
    let a = GaussianPure::real(0.0, s).to_fock_auto()?;
    let b = GaussianPure::real(0.0, -s).to_fock_auto()?;
    let n = a.n_trunc() + b.n_trunc();
    joint_output(TwoMode::Beamsplitter(FRAC_PI_4), &a, &b, (n, n))
}

/// First Ω-versus-TMS crossing on a sorted sweep: the adjacent pair `(E_i, E_{i+1})` where
/// `s2_omega - s2_tms` changes sign.
pub fn omega_tms_crossing(rows: &[Fig1Row]) -> Option<(f64, f64)> {
    rows.windows(2).find_map(|w| {
        let a = w[0].s2_omega - w[0].s2_tms;
        let b = w[1].s2_omega - w[1].s2_tms;
        (a.signum() != b.signum() && w[0].e > 0.0).then_some((w[0].e, w[1].e))
    })
}

/// First and second moments with one spare level so that `q^2` is exact on the support.
fn moments(rho: &DensityOperator) -> Result<[f64; 4]> {
    let n = rho.single_dim()? + 1;
    let r = rho.resized(n)?;
    let (q, p) = quadratures(n)?;
    let e = |m: &linalg::CMat| r.expectation(m).map(|z| z.re);
    Ok([e(&q)?, e(&p)?, e(&(&q * &q))?, e(&(&p * &p))?])
}

/// `nu = (1/pi) int_0^pi Var(x_theta) dtheta = (Var q + Var p) / 2`.
pub fn mean_noise(rho: &DensityOperator) -> Result<f64> {
    let [q, p, q2, p2] = moments(rho)?;
    Ok(0.5 * (q2 - q * q + p2 - p * p))
}

/// Direct Gauss-Legendre evaluation of the defining theta integral.
pub fn mean_noise_quadrature(rho: &DensityOperator, nodes: usize) -> Result<f64> {
    let n = rho.single_dim()? + 1;
    let r = rho.resized(n)?;
    let (a, ad, _) = ladder_matrices(n)?;
    let rule = gauss_quad::legendre::GaussLegendre::new(
        std::num::NonZeroUsize::new(nodes).ok_or_else(|| Error::Domain("need at least one node".into()))?,
    );
    let var = |t: f64| {
        let ph = num_complex::Complex64::from_polar(1.0, t);
        let x = (&ad * ph + &a * ph.conj()).scale(std::f64::consts::FRAC_1_SQRT_2);
        let m = r.expectation(&x).map(|z| z.re).unwrap_or(f64::NAN);
        let m2 = r.expectation(&(&x * &x)).map(|z| z.re).unwrap_or(f64::NAN);
        m2 - m * m
    };
    Ok(rule.integrate(0.0, std::f64::consts::PI, var) / std::f64::consts::PI)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseReport {
    pub nu_in: f64,
    pub nu_out: f64,
    pub gain_sq: f64,
    /// `nu_out / (g^2 nu_in)`.
    pub mu: f64,
    pub n_out: usize,
}

pub fn amplifier_noise_report(spec: &ChannelSpec, rho_in: &DensityOperator) -> Result<NoiseReport> {
    let r = match spec {
        ChannelSpec::Amplifier { r, .. } => *r,
        _ => return Err(Error::Domain("noise report needs an amplifier".into())),
    };
    let out = apply_stinespring(spec, rho_in)?;
    let nu_in = mean_noise(rho_in)?;
    let nu_out = mean_noise(&out)?;
    let gain_sq = r.cosh().powi(2);
    Ok(NoiseReport { nu_in, nu_out, gain_sq, mu: nu_out / (gain_sq * nu_in), n_out: out.n_trunc() })
}

/// Noise of a coherent input and of `Omega_+` itself through `Xi_r` with an `Omega_+` environment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplifierNoiseRow {
    pub e: f64,
    pub r: f64,
    pub e_tilde: f64,
    pub coherent: NoiseReport,
    pub omega: NoiseReport,
}

pub fn amplifier_noise_row(om: &OmegaState, r: f64, beta: num_complex::Complex64) -> Result<AmplifierNoiseRow> {
    let spec = ChannelSpec::amplifier(r, Environment::Omega(Box::new(om.clone())));
    let n = ((beta.norm() + 1.0).powi(2) * 4.0).ceil() as usize + 24;
    let coh = FockVector::new(crate::fock::coherent_vector(beta, n)).normalized()?;
    let coherent = amplifier_noise_report(&spec, &DensityOperator::from_pure(&coh))?;
    let omega = amplifier_noise_report(&spec, &om.density())?;
    Ok(AmplifierNoiseRow { e: om.e, r, e_tilde: om.e_tilde, coherent, omega })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent_vector, two_mode_unitary, Guard};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64 as C64;

    fn hom() -> FockVector {
        let one = FockVector::basis(2, 1).unwrap();
        joint_output(TwoMode::Beamsplitter(FRAC_PI_4), &one, &one, (3, 3)).unwrap()
    }

    #[test]
    fn product_state_has_no_entropy() {
        let a = FockVector::new(coherent_vector(C64::new(0.5, 0.1), 20)).normalized().unwrap();
        let psi = a.tensor(&FockVector::basis(3, 2).unwrap()).unwrap();
        assert!(renyi2_pure(&psi, 0).unwrap().abs() < 1e-12);
        assert!(renyi2(&DensityOperator::from_pure(&psi)).unwrap().abs() < 1e-12);
    }

    #[test]
    fn hom_output_entropy() {
        let psi = hom();
        let r = reduced_pure(&psi, 0).unwrap();
        let p = r.populations();
        assert_abs_diff_eq!(p[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(p[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p[2], 0.5, epsilon = 1e-12);
        // two-photon amplitudes of the output split evenly between |2,0> and |0,2>
        let m = psi.as_pair_matrix().unwrap();
        assert_abs_diff_eq!(m[(2, 0)].norm(), m[(0, 2)].norm(), epsilon = 1e-12);
        assert!(m[(1, 1)].norm() < 1e-12);
    }

    #[test]
    fn tms_entropy_matches_thermal() {
        let r: f64 = 0.6;
        let u = two_mode_unitary(TwoMode::TwoModeSqueeze(r), 40, Guard::Enforce).unwrap();
        let psi = FockVector::pair(u.column(0).into_owned(), (40, 40)).unwrap();
        let nbar = r.sinh().powi(2);
        assert_abs_diff_eq!(renyi2_pure(&psi, 0).unwrap(), (2.0 * nbar + 1.0).log2(), epsilon = 1e-9);
        assert_abs_diff_eq!(renyi2_pure(&psi, 1).unwrap(), renyi2_pure(&psi, 0).unwrap(), epsilon = 1e-9);
        let red = reduced_pure(&psi, 0).unwrap();
        assert!(renyi2_reduced(&red).unwrap() <= von_neumann_bits(&red).unwrap() + 1e-9);
    }

    #[test]
    fn tms_configuration_closed_form() {
        let et = 1.3;
        let psi = tms_configuration_output(et).unwrap();
        assert_abs_diff_eq!(renyi2_pure(&psi, 0).unwrap(), (et + 1.0).log2(), epsilon = 1e-9);
    }

    #[test]
    fn sweep_at_zero_energy() {
        let rows = fig1_sweep(&[0.0]).unwrap();
        assert_eq!((rows[0].s2_omega, rows[0].s2_sqvac, rows[0].s2_tms), (0.0, 0.0, 0.0));
        assert!(fig1_sweep(&[-1.0]).is_err());
    }

    #[test]
    fn omega_beats_squeezed_vacuum_at_unit_energy() {
        let r = fig1_point(1.0).unwrap();
        assert!(r.s2_omega > r.s2_sqvac, "{r:?}");
    }

    #[test]
    fn mean_noise_values() {
        let vac = DensityOperator::from_pure(&FockVector::vacuum(1));
        assert_abs_diff_eq!(mean_noise(&vac).unwrap(), 0.5, epsilon = 1e-14);
        let coh = DensityOperator::from_pure(&FockVector::new(coherent_vector(C64::new(1.2, -0.4), 40)).normalized().unwrap());
        assert_abs_diff_eq!(mean_noise(&coh).unwrap(), 0.5, epsilon = 1e-12);
        let om = build_omega(1.0, None).unwrap();
        let rho = om.density();
        let nu = mean_noise(&rho).unwrap();
        assert!(nu > 0.5);
        for s in [&vac, &coh, &rho] {
            assert_abs_diff_eq!(mean_noise_quadrature(s, 24).unwrap(), mean_noise(s).unwrap(), epsilon = 1e-8);
        }
    }

    #[test]
    fn ideal_amplifier_noise() {
        let r = 2f64.sqrt().acosh();
        let spec = ChannelSpec::amplifier(r, Environment::Vacuum);
        let coh = DensityOperator::from_pure(&FockVector::new(coherent_vector(C64::new(0.5, 0.2), 24)).normalized().unwrap());
        let rep = amplifier_noise_report(&spec, &coh).unwrap();
        assert_abs_diff_eq!(rep.gain_sq, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.nu_out, 1.5, epsilon = 1e-9);
        assert!(rep.mu >= 1.0 / rep.gain_sq - 1e-9);
        let tiny = amplifier_noise_report(&ChannelSpec::amplifier(1e-4, Environment::Vacuum), &coh).unwrap();
        assert_abs_diff_eq!(tiny.mu, 1.0, epsilon = 1e-7);
    }

    #[test]
    fn omega_environment_noise_bookkeeping() {
        let om = build_omega(5.0, None).unwrap();
        let r = 2f64.sqrt().acosh();
        let row = amplifier_noise_row(&om, r, C64::new(0.3, 0.0)).unwrap();
        let nu_env = mean_noise(&om.density()).unwrap();
        // independent modes: nu_out = g^2 nu_in + (g^2 - 1) nu_env
        let want = 2.0 * 0.5 + 1.0 * nu_env;
        assert_abs_diff_eq!(row.coherent.nu_out, want, epsilon = 1e-7);
        assert!(row.coherent.nu_out - 1.5 > 0.5 * (2.0 * nu_env - 1.0) - 1e-7);
        assert!(row.omega.mu >= 1.0 / row.omega.gain_sq - 1e-9);
    }

    #[test]
    fn coherent_noise_is_extensive_and_omega_noise_saturates() {
        let r: f64 = 1.0;
        let g2 = r.cosh().powi(2);
        let rows: Vec<_> = [1.0, 5.0]
            .iter()
            .map(|&e| amplifier_noise_row(&build_omega(e, None).unwrap(), r, C64::new(1.0, 0.0)).unwrap())
            .collect();
        // added noise of a coherent input follows the environment energy
        let slope = (rows[1].coherent.nu_out - rows[0].coherent.nu_out) / (rows[1].e_tilde - rows[0].e_tilde);
        assert_abs_diff_eq!(slope, g2 - 1.0, epsilon = 1e-6);
        for row in &rows {
            assert_abs_diff_eq!(row.omega.mu, 2.0 - 1.0 / g2, epsilon = 1e-8);
        }
    }
}
