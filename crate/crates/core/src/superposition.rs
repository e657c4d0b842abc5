//! The minimal-energy superposition of the maximally distant isoenergetic Gaussian pair.

use crate::charfn::CharFn;
use crate::error::{Error, Result};
use crate::fock::{self, coherent_vector, DensityOperator, FockVector, Guard};
use crate::gaussian::{max_distant_pair, DistantPair};
use crate::linalg::CVec;
use num_complex::Complex64 as C64;

/// `<omega|H|omega>` for `omega ~ psi_1 + lambda e^{i theta} psi_2`.
pub fn superposition_energy(e: f64, z: f64, c: f64, lambda: f64, theta: f64) -> Result<f64> {
    let den = 1.0 + lambda * lambda + 2.0 * z * lambda * theta.cos();
    if den <= 1e-12 {
        return Err(Error::Degenerate(den));
    }
    Ok((e * (1.0 + lambda * lambda) + 2.0 * lambda * c * theta.cos()) / den)
}

/// Relative phase minimizing the superposition energy at `lambda = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinimalPhase {
    Zero,
    Pi,
    AllEqual,
}

pub fn minimal_energy_phase(e: f64, z: f64, c: f64) -> MinimalPhase {
    let gap = e * z - c;
    if gap.abs() <= 1e-12 {
        MinimalPhase::AllEqual
    } else if gap > 0.0 {
        MinimalPhase::Zero
    } else {
        MinimalPhase::Pi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branch {
    #[default]
    Plus,
    Minus,
}

/// `Omega_+ ~ S(w)(|gamma_c> + |-gamma_c>)` with its Fock realization.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaState {
    pub e: f64,
    pub pair: DistantPair,
    pub branch: Branch,
    pub fock: FockVector,
    /// Inverse norm of the assembled `S(w)(|gamma> +- |-gamma>)`.
    pub norm_const: f64,
    /// `<a^dagger a>` over the state.
    pub e_tilde: f64,
    /// Largest working dimension used while certifying the truncation.
    pub working_dim: usize,
}

impl OmegaState {
    pub fn probabilities(&self) -> Vec<f64> {
        self.fock.probabilities()
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator::from_pure(&self.fock)
    }

    /// Closed-form characteristic function of the + branch; the Fock one otherwise.
    pub fn char_fn(&self) -> CharFn {
        match self.branch {
            Branch::Plus => char_fn_closed_form(self.pair.gamma_c, self.pair.w),
            Branch::Minus => CharFn::Density(self.density()),
        }
    }

    pub fn tail_mass(&self) -> f64 {
        self.fock.tail_mass()
    }
}

fn cat_vector(gamma: f64, w: f64, sign: f64, n: usize) -> Result<CVec> {
    let cat = coherent_vector(C64::new(gamma, 0.0), n) + coherent_vector(C64::new(-gamma, 0.0), n) * C64::new(sign, 0.0);
    if w == 0.0 {
        return Ok(cat);
    }
    let s = fock::squeeze(C64::new(w, 0.0), n, Guard::Enforce)?;
    Ok(s * cat)
}

fn cat_guard(gamma: f64, w: f64) -> usize {
    (gamma * gamma + 6.0 * gamma).max(4.0 * (2.0 * w).exp()).floor() as usize + 1
}

/// Builds the + branch at energy constraint `e`.
pub fn build_omega(e: f64, n_trunc: Option<usize>) -> Result<OmegaState> {
    build_omega_branch(e, Branch::Plus, n_trunc)
}

/// Builds either branch; the - branch needs `e > 0`.
pub fn build_omega_branch(e: f64, branch: Branch, n_trunc: Option<usize>) -> Result<OmegaState> {
    let pair = max_distant_pair(e)?;
    // Ez > c is tested as E > c/z, since z underflows long before the ratio does
    if e > 0.0 && minimal_energy_phase(e, 1.0, pair.cross_energy_ratio()) != MinimalPhase::Zero {
        return Err(Error::Validity(format!("pair at E={e} does not satisfy Ez > c")));
    }
    let sign = match branch {
        Branch::Plus => 1.0,
        Branch::Minus => {
            if !(e > 0.0) {
                return Err(Error::Degenerate(0.0));
            }
            -1.0
        }
    };
    let (gamma, w) = (pair.gamma_c, pair.w);
    let (raw, working_dim) = fock::adaptive_vector(cat_guard(gamma, w) + 8, "omega state", |n| {
        cat_vector(gamma, w, sign, n)
    })?;
    let norm = raw.norm();
    if !(norm > 1e-150) {
        return Err(Error::Degenerate(norm));
    }
    let mut psi = FockVector::new(raw.unscale(norm));
    if let Some(n) = n_trunc {
        let dropped: f64 = psi.amplitudes().iter().skip(n).map(|a| a.norm_sqr()).sum();
        if dropped > fock::TAIL_TOLERANCE {
            return Err(Error::TruncationRisk {
                what: "omega state",
                required: fock::padded_truncation(fock::support_len(psi.amplitudes(), fock::TAIL_TOLERANCE)) as f64,
                n_trunc: n,
            });
        }
        psi = psi.resized(n)?.normalized()?;
    }
    let e_tilde = psi.mean_number();
    Ok(OmegaState { e, pair, branch, fock: psi, norm_const: 1.0 / norm, e_tilde, working_dim })
}

/// Fock amplitudes of `S(w)(|gamma> + |-gamma>)` normalized, from the Hermite closed form.
///
/// Uses the scaled recurrence `h_n = (tanh w / 2)^{n/2} H_n(x) / sqrt(n!)`, which stays O(1).
pub fn fock_amplitudes_closed_form(gamma: f64, w: f64, n_max: usize) -> Result<Vec<f64>> {
    if !(w > 0.0) {
        return Err(Error::Domain(format!("closed-form amplitudes need w > 0, got {w}")));
    }
    if n_max < 2 {
        return Err(Error::Domain(format!("n_max must be at least 2, got {n_max}")));
    }
    let t = 0.5 * w.tanh();
    let x = gamma / (2.0 * w).sinh().sqrt();
    let g2 = gamma * gamma;
    let ln_cosh = |u: f64| u.abs() + (-2.0 * u.abs()).exp().ln_1p() - std::f64::consts::LN_2;
    let ln_pref = 0.5 * g2 * w.tanh() - 0.5 * w.cosh().ln() - 0.5 * ln_cosh(g2);
    let pref = ln_pref.exp();
    let mut out = vec![0.0; n_max + 1];
    let (mut prev, mut cur) = (0.0, 1.0);
    out[0] = pref;
    let st = t.sqrt();
    for n in 0..n_max {
        let next = (2.0 * x * st * cur - 2.0 * (n as f64).sqrt() * t * prev) / ((n + 1) as f64).sqrt();
        prev = cur;
        cur = next;
        if (n + 1) % 2 == 0 {
            out[n + 1] = pref * cur;
        }
    }
    Ok(out)
}

/// Characteristic function of `S(w)(|gamma> + |-gamma>)`.
pub fn char_fn_closed_form(gamma: f64, w: f64) -> CharFn {
    CharFn::Omega { gamma, w }
}

/// Trapezoid settings for the coherent-line integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineQuadrature {
    /// Integration range `|x| <= half_width_factor * sqrt(d - 1)`.
    pub half_width_factor: f64,
    pub initial_intervals: usize,
    pub tolerance: f64,
    pub max_refinements: usize,
}

impl Default for LineQuadrature {
    fn default() -> Self {
        Self { half_width_factor: 8.0, initial_intervals: 32, tolerance: 1e-8, max_refinements: 10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineReport {
    pub nodes: usize,
    pub refinements: usize,
    pub last_change: f64,
}

/// State `~ |(r, ln d / 2)> + |(-r, ln d / 2)>` assembled from coherent states on the lines `+-r + i x`.
pub fn line_integral_representation(
    r: f64,
    d: f64,
    quad: &LineQuadrature,
    n_trunc: usize,
) -> Result<(FockVector, LineReport)> {
    if !(d > 1.0) {
        return Err(Error::Domain(format!("line integral needs d > 1, got {d}")));
    }
    let s2 = d - 1.0;
    let half = quad.half_width_factor * s2.sqrt();
    let node = |x: f64| -> CVec {
        let wgt = (-x * x / s2).exp();
        let a = coherent_vector(C64::new(r, x), n_trunc) * C64::from_polar(wgt, -r * x);
        let b = coherent_vector(C64::new(-r, x), n_trunc) * C64::from_polar(wgt, r * x);
        a + b
    };
    let mut intervals = quad.initial_intervals.max(2);
    let mut h = 2.0 * half / intervals as f64;
    let mut sum = CVec::zeros(n_trunc);
    for k in 0..=intervals {
        let x = -half + k as f64 * h;
        let f = if k == 0 || k == intervals { 0.5 } else { 1.0 };
        sum += node(x) * C64::new(f, 0.0);
    }
    let normalize = |s: &CVec| -> Result<CVec> {
        let n = s.norm();
        if !(n > 1e-300) {
            return Err(Error::Degenerate(n));
        }
        Ok(s.unscale(n))
    };
    let mut current = normalize(&sum)?;
    let mut change = f64::INFINITY;
    for level in 1..=quad.max_refinements {
        for k in 0..intervals {
            let x = -half + (k as f64 + 0.5) * h;
            sum += node(x);
        }
        intervals *= 2;
        h *= 0.5;
        let next = normalize(&sum)?;
        change = (&next - &current).norm();
        current = next;
        if change < quad.tolerance {
            return Ok((FockVector::new(current), LineReport { nodes: intervals + 1, refinements: level, last_change: change }));
        }
    }
    if change > 1e-6 {
        return Err(Error::Accuracy { what: "line integral", achieved: change, tolerance: 1e-6 });
    }
    Ok((FockVector::new(current), LineReport { nodes: intervals + 1, refinements: quad.max_refinements, last_change: change }))
}

/// Squeezed vacuum `S(w)|0>` as a Gaussian superposition of coherent states on the imaginary axis.
pub fn squeezed_vacuum_line_integral(w: f64, quad: &LineQuadrature, n_trunc: usize) -> Result<(FockVector, LineReport)> {
    line_integral_representation(0.0, (2.0 * w).exp(), quad, n_trunc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::GaussianPure;
    use approx::assert_abs_diff_eq;

    #[test]
    fn energy_formula_examples() {
        assert_abs_diff_eq!(superposition_energy(1.3, 0.2, 0.1, 0.0, 1.0).unwrap(), 1.3, epsilon = 1e-15);
        assert_abs_diff_eq!(superposition_energy(1.0, 0.5, 0.2, 1.0, 0.0).unwrap(), 0.8, epsilon = 1e-15);
        // Ez = c
        for (l, t) in [(0.3, 0.0), (1.0, 2.0), (2.5, -1.0)] {
            assert_abs_diff_eq!(superposition_energy(2.0, 0.4, 0.8, l, t).unwrap(), 2.0, epsilon = 1e-14);
        }
        assert!(matches!(
            superposition_energy(1.0, 1.0, 0.0, 1.0, std::f64::consts::PI),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn phase_selection() {
        assert_eq!(minimal_energy_phase(1.0, 0.5, 0.2), MinimalPhase::Zero);
        assert_eq!(minimal_energy_phase(1.0, 0.5, 0.7), MinimalPhase::Pi);
        assert_eq!(minimal_energy_phase(1.0, 0.5, 0.5), MinimalPhase::AllEqual);
        // minimum sits at lambda = 1 on the chosen phase
        let best = superposition_energy(1.0, 0.5, 0.2, 1.0, 0.0).unwrap();
        for l in [0.2, 0.7, 1.4, 3.0] {
            assert!(superposition_energy(1.0, 0.5, 0.2, l, 0.0).unwrap() >= best - 1e-15);
        }
    }

    #[test]
    fn vacuum_limit() {
        let om = build_omega(0.0, None).unwrap();
        assert_abs_diff_eq!(om.fock.amplitudes()[0].re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(om.e_tilde, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn omega_invariants() {
        for e in [0.5, 1.0, 5.0, 10.0] {
            let om = build_omega(e, None).unwrap();
            let a = om.fock.amplitudes();
            for k in (1..a.len()).step_by(2) {
                assert!(a[k].norm() < 1e-12);
            }
            assert!(om.e_tilde <= e + 1e-8);
            // the deficit E - e_tilde is of order exp(-2 gamma_c^2)
            if e <= 1.0 {
                assert!(om.e_tilde < e - 1e-3);
            }
            assert!(om.tail_mass() < 1e-12);
            let flipped = om.fock.parity_flipped().unwrap();
            assert!((flipped.inner(&om.fock).unwrap().norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn minus_branch_is_odd() {
        let om = build_omega_branch(1.0, Branch::Minus, None).unwrap();
        let a = om.fock.amplitudes();
        for k in (0..a.len()).step_by(2) {
            assert!(a[k].norm() < 1e-12);
        }
        assert!(build_omega_branch(0.0, Branch::Minus, None).is_err());
    }

    #[test]
    fn closed_form_amplitudes_match_construction() {
        for e in [0.5, 1.0, 5.0, 10.0] {
            let om = build_omega(e, None).unwrap();
            let n = om.fock.n_trunc();
            let cf = fock_amplitudes_closed_form(om.pair.gamma_c, om.pair.w, n - 1).unwrap();
            let dev = (0..n).map(|k| (cf[k] - om.fock.amplitudes()[k].re).abs()).fold(0.0, f64::max);
            assert!(dev < 1e-8, "E={e}: deviation {dev:e}");
        }
        assert!(matches!(fock_amplitudes_closed_form(1.0, 0.0, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn closed_form_amplitudes_vanish_at_two_when_argument_is_root() {
        // H_2(x) = 4x^2 - 2 vanishes at x^2 = 1/2, i.e. gamma^2 = sinh(2w)/2
        let w: f64 = 0.4;
        let gamma = ((2.0 * w).sinh() / 2.0).sqrt();
        let a = fock_amplitudes_closed_form(gamma, w, 6).unwrap();
        assert!(a[2].abs() < 1e-15);
        assert!(a[4].abs() > 1e-3);
    }

    #[test]
    fn tabulated_vacuum_probabilities_follow_from_the_r_c_argument() {
        // The closed form evaluated at gamma = r_c reproduces the tabulated p(0) values
        // and gives an exact zero at n = 2, since sinh(2w)/2 = r_c^2 for the optimal pair.
        for (e, p0) in [(0.5, 0.9974), (1.0, 0.9822), (5.0, 0.6987), (10.0, 0.5175)] {
            let p = max_distant_pair(e).unwrap();
            let a = fock_amplitudes_closed_form(p.r_c, p.w, 2).unwrap();
            assert_abs_diff_eq!(a[0] * a[0], p0, epsilon = 1e-3);
            assert!(a[2].abs() < 1e-12);
        }
    }

    #[test]
    fn literal_state_vacuum_probabilities() {
        let frozen = [(0.5, 0.935_047_811_926), (1.0, 0.625_725_324_089), (5.0, 7.449_080_684_42e-3), (10.0, 3.782_702_085_13e-5)];
        for (e, p0) in frozen {
            let om = build_omega(e, None).unwrap();
            let got = om.probabilities()[0];
            assert!((got - p0).abs() < 1e-9 * p0.max(1e-3), "E={e}: p0={got}");
        }
    }

    #[test]
    fn char_fn_closed_form_matches_numeric() {
        let om = build_omega(1.0, None).unwrap();
        let cf = char_fn_closed_form(om.pair.gamma_c, om.pair.w);
        let rho = om.density();
        let num = fock::NumericCharFn::new(&rho).unwrap();
        for i in -5..=5 {
            for j in -5..=5 {
                let (x, y) = (i as f64, j as f64);
                assert!((cf.eval(x, y) - num.eval(x, y).unwrap()).norm() < 1e-8, "({x},{y})");
            }
        }
    }

    #[test]
    fn line_integral_reproduces_squeezed_vacuum_and_omega() {
        let q = LineQuadrature::default();
        let w = 0.45;
        let (sv, _) = squeezed_vacuum_line_integral(w, &q, 60).unwrap();
        let exact = GaussianPure::real(0.0, w).to_fock(60, Guard::Enforce).unwrap();
        assert!((sv.amplitudes() - exact.amplitudes()).norm() < 1e-6);

        let om = build_omega(1.0, None).unwrap();
        let n = om.fock.n_trunc();
        let (li, rep) = line_integral_representation(om.pair.r_c, om.pair.d_c, &q, n).unwrap();
        assert!(rep.last_change < 1e-8);
        assert!((li.amplitudes() - om.fock.amplitudes()).norm() < 1e-6);

        let (near, _) = line_integral_representation(0.0, 1.0 + 1e-6, &q, 10).unwrap();
        assert!((near.amplitudes()[0].norm() - 1.0).abs() < 1e-6);
        assert!(line_integral_representation(0.0, 1.0, &q, 10).is_err());
    }
}
