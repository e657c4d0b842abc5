//! Single-mode pure Gaussian states and the maximally distant isoenergetic pair.

use crate::error::{Error, Result};
use crate::fock::{self, FockVector, Guard};
use crate::optim::{self, Bounds};
use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64 as C64;

/// `|(alpha, z)> = D(alpha) S(z) |0>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPure {
    pub alpha: C64,
    pub z: C64,
}

impl GaussianPure {
    pub fn new(alpha: C64, z: C64) -> Self {
        Self { alpha, z }
    }

    /// Real displacement and real squeezing parameter `w`.
    pub fn real(alpha: f64, w: f64) -> Self {
        Self::new(C64::new(alpha, 0.0), C64::new(w, 0.0))
    }

    pub fn vacuum() -> Self {
        Self::real(0.0, 0.0)
    }

    pub fn coherent(alpha: C64) -> Self {
        Self::new(alpha, C64::new(0.0, 0.0))
    }

    /// `<a^dagger a> = |alpha|^2 + sinh^2 |z|`.
    pub fn energy(&self) -> f64 {
        self.alpha.norm_sqr() + self.z.norm().sinh().powi(2)
    }

    /// Quadrature means `(<q>, <p>)`.
    pub fn mean(&self) -> Vector2<f64> {
        Vector2::new(self.alpha.re, self.alpha.im) * std::f64::consts::SQRT_2
    }

    /// Symmetrized quadrature covariance; the vacuum has `I/2`.
    pub fn covariance(&self) -> Matrix2<f64> {
        let (r, phi) = (self.z.norm(), self.z.arg());
        let (s, c) = (0.5 * phi).sin_cos();
        let u = Vector2::new(c, s);
        let v = Vector2::new(-s, c);
        (u * u.transpose() * (-2.0 * r).exp() + v * v.transpose() * (2.0 * r).exp()) * 0.5
    }

    /// Phase-space rotation `exp(i t n)`.
    pub fn rotated(&self, t: f64) -> Self {
        Self::new(self.alpha * C64::from_polar(1.0, t), self.z * C64::from_polar(1.0, 2.0 * t))
    }

    /// Smallest truncation passing the displacement and squeezing guards.
    pub fn guard_dim(&self) -> usize {
        let a = self.alpha.norm();
        let g = (a * a + 6.0 * a).max(4.0 * (2.0 * self.z.norm()).exp());
        g.floor() as usize + 1
    }

    /// `D(alpha) S(z) |0>` computed on `n_trunc` levels and renormalized.
    pub fn to_fock(&self, n_trunc: usize, guard: Guard) -> Result<FockVector> {
        FockVector::new(self.raw_vector(n_trunc, guard)?).normalized()
    }

    fn raw_vector(&self, n: usize, guard: Guard) -> Result<crate::linalg::CVec> {
        let s = fock::squeeze(self.z, n, guard)?;
        let col = s.column(0).into_owned();
        if self.alpha.norm() == 0.0 {
            return Ok(col);
        }
        let d = fock::displacement(self.alpha, n, guard)?;
        Ok(d * col)
    }

    /// Fock realization with adaptively certified truncation.
    pub fn to_fock_auto(&self) -> Result<FockVector> {
        let (v, _) = fock::adaptive_vector(self.guard_dim() + 8, "gaussian state", |n| {
            self.raw_vector(n, Guard::Enforce)
        })?;
        FockVector::new(v).normalized()
    }
}

/// `exp(-tau a^dagger^2 / 2) |0> / sqrt(cosh r)` data of `S(z)|0>`.
fn tau(z: C64) -> (C64, f64) {
    let r = z.norm();
    (C64::from_polar(r.tanh(), z.arg()), 1.0 / r.cosh().sqrt())
}

/// Complex logarithm of `<g1|g2>` from the Bargmann-space Gaussian integral.
pub fn ln_overlap(g1: &GaussianPure, g2: &GaussianPure) -> C64 {
    let (t1, c1) = tau(g1.z);
    let (t2, c2) = tau(g2.z);
    let beta = g2.alpha - g1.alpha;
    let a = t2;
    let b = t1.conj();
    let u = beta + t2 * beta.conj();
    let one_ab = C64::new(1.0, 0.0) - a * b;
    let gauss = -b * u * u / (2.0 * one_ab) - 0.5 * one_ab.ln();
    let phase = 0.5 * (g1.alpha.conj() * g2.alpha - g1.alpha * g2.alpha.conj());
    C64::new(c1.ln() + c2.ln(), 0.0) - 0.5 * beta.norm_sqr() - 0.5 * t2 * beta.conj() * beta.conj() + gauss + phase
}

/// `<g1|g2>` in closed form.
pub fn overlap(g1: &GaussianPure, g2: &GaussianPure) -> C64 {
    ln_overlap(g1, g2).exp()
}

/// `ln |<g1|g2>|^2`, finite even when the overlap underflows.
pub fn ln_fidelity(g1: &GaussianPure, g2: &GaussianPure) -> f64 {
    2.0 * ln_overlap(g1, g2).re
}

/// `<g1|a^dagger a|g2> / <g1|g2>` for real displacements sharing one real squeezing `w`.
pub fn cross_energy_ratio(a1: f64, a2: f64, w: f64) -> f64 {
    let sh = w.sinh();
    let b = (a2 - a1) * w.exp();
    a1 * a2 + (a1 - a2) * sh * b + sh * sh * (1.0 - b * b)
}

/// Parameters of the two isoenergetic pure Gaussian states of minimal fidelity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistantPair {
    pub e: f64,
    pub d_c: f64,
    pub r_c: f64,
    pub w: f64,
    pub gamma_c: f64,
}

impl DistantPair {
    /// `|(+r_c, w)>` and `|(-r_c, w)>`.
    pub fn members(&self) -> (GaussianPure, GaussianPure) {
        (GaussianPure::real(self.r_c, self.w), GaussianPure::real(-self.r_c, self.w))
    }

    /// Real positive overlap `z = <psi_1|psi_2>`.
    pub fn overlap(&self) -> f64 {
        (-2.0 * self.gamma_c * self.gamma_c).exp()
    }

    /// Cross energy ratio `c / z` of the pair.
    pub fn cross_energy_ratio(&self) -> f64 {
        cross_energy_ratio(self.r_c, -self.r_c, self.w)
    }
}

pub fn max_distant_pair(e: f64) -> Result<DistantPair> {
    if !(e >= 0.0) || !e.is_finite() {
        return Err(Error::Domain(format!("energy constraint must be finite and >= 0, got {e}")));
    }
    let d_c = 2.0 * e + 1.0;
    let r_c = ((e * e + e) / d_c).sqrt();
    Ok(DistantPair { e, d_c, r_c, w: 0.5 * d_c.ln(), gamma_c: r_c * d_c.sqrt() })
}

/// Outcome of the numerical fidelity minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimalityReport {
    pub e: f64,
    pub best: (GaussianPure, GaussianPure),
    pub fidelity: f64,
    pub d_found: (f64, f64),
    pub r_found: (f64, f64),
    pub d_gap: f64,
    pub r_gap: f64,
    pub converged: bool,
    pub starts: usize,
    pub diagnostic: Option<String>,
}

fn pair_from(e: f64, x: &[f64], signs: (f64, f64)) -> (GaussianPure, GaussianPure) {
    let amp = |w: f64| (e - w.sinh().powi(2)).max(0.0).sqrt();
    (
        GaussianPure::real(signs.0 * amp(x[0]), x[0]),
        GaussianPure::real(signs.1 * amp(x[1]), x[1]),
    )
}

/// Minimizes `|<(a1,w1)|(a2,w2)>|^2` over real isoenergetic pairs by 16 local searches.
pub fn fidelity_minimality_check(e: f64) -> MinimalityReport {
    let reference = max_distant_pair(e.max(0.0)).expect("clamped energy is valid");
    if !(e > 0.0) {
        let v = GaussianPure::vacuum();
        return MinimalityReport {
            e,
            best: (v, v),
            fidelity: 1.0,
            d_found: (1.0, 1.0),
            r_found: (0.0, 0.0),
            d_gap: 0.0,
            r_gap: 0.0,
            converged: true,
            starts: 0,
            diagnostic: Some("degenerate constraint: every feasible pair is the vacuum".into()),
        };
    }
    let wmax = e.sqrt().asinh();
    let bounds = Bounds::new(vec![-wmax, -wmax], vec![wmax, wmax]);
    let mut best: Option<(optim::Minimum, (f64, f64))> = None;
    let mut all_converged = true;
    let mut starts = 0;
    for signs in [(1.0, -1.0), (1.0, 1.0)] {
        let f = |x: &[f64]| {
            let (a, b) = pair_from(e, x, signs);
            ln_fidelity(&a, &b)
        };
        let lattice: Vec<Vec<f64>> = (0..8)
            .map(|k| {
                let w = -wmax + (k as f64 + 0.5) * 2.0 * wmax / 8.0;
                vec![w, w]
            })
            .collect();
        starts += lattice.len();
        let (m, runs) = optim::multi_start(&f, &lattice, 0.25 * wmax, &bounds, 1e-15, 1e-10, |x| x[0].max(x[1]));
        all_converged &= runs.iter().any(|r| r.converged && (r.value - m.value).abs() < 1e-8);
        let better = match &best {
            None => true,
            Some((b, _)) => m.value < b.value - 1e-10,
        };
        if better {
            best = Some((m, signs));
        }
    }
    let (m, signs) = best.expect("two sign patterns searched");
    let pair = pair_from(e, &m.x, signs);
    let d_found = ((2.0 * m.x[0]).exp(), (2.0 * m.x[1]).exp());
    let r_found = (pair.0.alpha.re.abs(), pair.1.alpha.re.abs());
    let d_gap = (d_found.0 - reference.d_c).abs().max((d_found.1 - reference.d_c).abs());
    let r_gap = (r_found.0 - reference.r_c).abs().max((r_found.1 - reference.r_c).abs());
    let diagnostic = (!all_converged).then(|| "best local search did not report convergence".to_string());
    MinimalityReport {
        e,
        best: pair,
        fidelity: m.value.exp(),
        d_found,
        r_found,
        d_gap,
        r_gap,
        converged: all_converged,
        starts,
        diagnostic,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn fock_overlap(g1: &GaussianPure, g2: &GaussianPure) -> C64 {
        let a = g1.to_fock(120, Guard::Enforce).unwrap();
        let b = g2.to_fock(120, Guard::Enforce).unwrap();
        a.inner(&b).unwrap()
    }

    #[test]
    fn vacuum_and_squeezed_vacuum() {
        let v = GaussianPure::vacuum().to_fock(10, Guard::Enforce).unwrap();
        assert_abs_diff_eq!(v.amplitudes()[0].re, 1.0, epsilon = 1e-15);
        let s = GaussianPure::real(0.0, 0.4).to_fock(60, Guard::Enforce).unwrap();
        for k in (1..60).step_by(2) {
            assert!(s.amplitudes()[k].norm() < 1e-14);
        }
    }

    #[test]
    fn energy_matches_fock_expectation() {
        let g = GaussianPure::real(1.0, 0.3);
        assert_abs_diff_eq!(g.energy(), 1.0 + 0.3f64.sinh().powi(2), epsilon = 1e-15);
        assert_abs_diff_eq!(g.energy(), 1.092_732_6, epsilon = 1e-7);
        let psi = g.to_fock_auto().unwrap();
        assert_abs_diff_eq!(psi.mean_number(), g.energy(), epsilon = 1e-8);
    }

    #[test]
    fn closed_form_overlap_matches_fock() {
        let cases = [
            (GaussianPure::real(0.5, 0.2), GaussianPure::real(-0.3, 0.6)),
            (GaussianPure::new(C64::new(0.3, -0.7), C64::from_polar(0.4, 1.1)), GaussianPure::new(C64::new(-0.2, 0.5), C64::from_polar(0.3, -2.0))),
            (GaussianPure::coherent(C64::new(1.0, 1.0)), GaussianPure::new(C64::new(0.0, 0.2), C64::new(0.0, 0.5))),
        ];
        for (a, b) in cases {
            let want = fock_overlap(&a, &b);
            assert!((overlap(&a, &b) - want).norm() < 1e-8, "{a:?} {b:?}");
            assert!((overlap(&a, &b) - overlap(&b, &a).conj()).norm() < 1e-14);
        }
        let g = GaussianPure::new(C64::new(0.4, 0.1), C64::from_polar(0.7, 0.3));
        assert!((overlap(&g, &g) - C64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn coherent_overlap_formula() {
        let gam: f64 = 1.2;
        let a = GaussianPure::real(gam, 0.0);
        let b = GaussianPure::real(-gam, 0.0);
        assert_abs_diff_eq!(overlap(&a, &b).re, (-2.0 * gam * gam).exp(), epsilon = 1e-15);
    }

    #[test]
    fn distant_pair_closed_forms() {
        let p0 = max_distant_pair(0.0).unwrap();
        assert_eq!((p0.d_c, p0.r_c, p0.w), (1.0, 0.0, 0.0));
        let p1 = max_distant_pair(1.0).unwrap();
        assert_abs_diff_eq!(p1.d_c, 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p1.r_c, 0.816_50, epsilon = 1e-5);
        assert_abs_diff_eq!(p1.w, 0.549_31, epsilon = 1e-5);
        let p10 = max_distant_pair(10.0).unwrap();
        assert_abs_diff_eq!(p10.d_c, 21.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p10.r_c, 2.288_69, epsilon = 1e-5);
        assert!(matches!(max_distant_pair(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn pair_overlap_is_real_positive_and_matches_fock() {
        let p = max_distant_pair(1.0).unwrap();
        let (a, b) = p.members();
        let z = overlap(&a, &b);
        assert!(z.re > 0.0 && z.im.abs() < 1e-15);
        assert_abs_diff_eq!(z.re, p.overlap(), epsilon = 1e-15);
        let fa = a.to_fock_auto().unwrap();
        let fb = b.to_fock_auto().unwrap().resized(fa.n_trunc()).unwrap();
        assert_abs_diff_eq!(fa.inner(&fb).unwrap().re, z.re, epsilon = 1e-8);
    }

    #[test]
    fn pair_members_have_energy_e() {
        for e in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
            let (a, b) = max_distant_pair(e).unwrap().members();
            for g in [a, b] {
                assert_abs_diff_eq!(g.energy(), e, epsilon = 1e-12);
                assert_abs_diff_eq!(g.to_fock_auto().unwrap().mean_number(), e, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn cross_energy_ratio_matches_fock() {
        let (a1, a2, w) = (0.6, -0.4, 0.35);
        let n = 80;
        let f1 = GaussianPure::real(a1, w).to_fock(n, Guard::Enforce).unwrap();
        let f2 = GaussianPure::real(a2, w).to_fock(n, Guard::Enforce).unwrap();
        let num: C64 = (0..n).map(|k| f1.amplitudes()[k].conj() * f2.amplitudes()[k] * k as f64).sum();
        let z = f1.inner(&f2).unwrap();
        assert_abs_diff_eq!((num / z).re, cross_energy_ratio(a1, a2, w), epsilon = 1e-9);
    }

    #[test]
    fn covariance_phase_convention() {
        let g = GaussianPure::new(C64::new(0.0, 0.0), C64::from_polar(0.5, 0.8));
        let psi = g.to_fock(80, Guard::Enforce).unwrap();
        let rho = crate::fock::DensityOperator::from_pure(&psi);
        let (q, p) = fock::quadratures(80).unwrap();
        let qq = rho.expectation(&(&q * &q)).unwrap().re;
        let pp = rho.expectation(&(&p * &p)).unwrap().re;
        let qp = rho.expectation(&((&q * &p + &p * &q) * C64::new(0.5, 0.0))).unwrap().re;
        let v = g.covariance();
        assert_abs_diff_eq!(v[(0, 0)], qq, epsilon = 1e-9);
        assert_abs_diff_eq!(v[(1, 1)], pp, epsilon = 1e-9);
        assert_abs_diff_eq!(v[(0, 1)], qp, epsilon = 1e-9);
    }

    #[test]
    fn minimality_recovers_closed_form() {
        for e in [0.5, 1.0] {
            let rep = fidelity_minimality_check(e);
            let p = max_distant_pair(e).unwrap();
            assert!(rep.d_gap < 1e-4, "E={e}: {rep:?}");
            assert!(rep.r_gap < 1e-4, "E={e}: {rep:?}");
            assert_eq!(rep.starts, 16);
            assert_abs_diff_eq!(rep.fidelity, p.overlap().powi(2), epsilon = 1e-8);
        }
        let rep0 = fidelity_minimality_check(0.0);
        assert_eq!(rep0.fidelity, 1.0);
    }
}
