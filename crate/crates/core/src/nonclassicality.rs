//! Envelope-criterion classicality tests and bounds on the nonclassicality distance.

use crate::channels::{char_fn_output, ChannelSpec, Environment};
use crate::charfn::CharFn;
use crate::error::{Error, Result};
use crate::fock::{coherent_vector, DensityOperator, FockVector};
use crate::gaussian::max_distant_pair;
use crate::optim::{multi_start, Bounds};
use crate::superposition::OmegaState;
use argmin::core::{CostFunction, Executor};
use argmin::solver::brent::BrentOpt;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_4, PI};

/// Uniform scan of `|x|, |y| <= half_width` with nested local refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalityGrid {
    pub half_width: f64,
    pub points: usize,
    pub refine_levels: usize,
    pub refine_factor: usize,
    /// Local maxima with margin above `-near` are refined.
    pub near: f64,
    /// Smallest margin counted as a violation.
    pub confirm: f64,
    /// Refined neighborhoods per scan.
    pub max_candidates: usize,
}

impl Default for ClassicalityGrid {
    fn default() -> Self {
        Self { half_width: 8.0, points: 801, refine_levels: 2, refine_factor: 10, near: 1e-4, confirm: 1e-7, max_candidates: 64 }
    }
}

impl ClassicalityGrid {
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points - 1) as f64
    }
}

/// A point where `|chi(x, y)| - exp(-(x^2 + y^2)/4)` is positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub x: f64,
    pub y: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalityVerdict {
    pub classical_on_grid: bool,
    pub witness: Option<Witness>,
    /// Largest margin seen after refinement, confirmed or not.
    pub best: Witness,
    pub grid: ClassicalityGrid,
}

/// `|chi(x, y)| - exp(-(x^2 + y^2)/4)`.
pub fn envelope_margin(chi: &CharFn, x: f64, y: f64) -> f64 {
    chi.abs(x, y) - (-(x * x + y * y) / 4.0).exp()
}

fn refine(chi: &CharFn, start: Witness, h: f64, grid: &ClassicalityGrid) -> Witness {
    let mut best = start;
    let mut h = h;
    for _ in 0..grid.refine_levels {
        let sub = h / grid.refine_factor as f64;
        let k = grid.refine_factor as i64;
        let (cx, cy) = (best.x, best.y);
        for i in -k..=k {
            for j in -k..=k {
                let (x, y) = (cx + i as f64 * sub, cy + j as f64 * sub);
                let m = envelope_margin(chi, x, y);
                if m > best.margin {
                    best = Witness { x, y, margin: m };
                }
            }
        }
        h = sub;
    }
    best
}

/// Scans for violations of the envelope criterion; the verdict is relative to `grid`.
pub fn classicality_test(chi: &CharFn, grid: &ClassicalityGrid) -> ClassicalityVerdict {
    let n = grid.points;
    let h = grid.spacing();
    let coord = |i: usize| -grid.half_width + i as f64 * h;
    let vals: Vec<Vec<f64>> =
        (0..n).into_par_iter().map(|i| (0..n).map(|j| envelope_margin(chi, coord(i), coord(j))).collect()).collect();
    let mut cands = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let v = vals[i][j];
            if v <= -grid.near {
                continue;
            }
            let mut local_max = true;
            'nb: for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    let (a, b) = (i as i64 + di, j as i64 + dj);
                    if (di, dj) == (0, 0) || a < 0 || b < 0 || a >= n as i64 || b >= n as i64 {
                        continue;
                    }
                    if vals[a as usize][b as usize] > v {
                        local_max = false;
                        break 'nb;
                    }
                }
            }
            if local_max {
                cands.push(Witness { x: coord(i), y: coord(j), margin: v });
            }
        }
    }
    cands.sort_by(|a, b| b.margin.total_cmp(&a.margin));
    cands.truncate(grid.max_candidates);
    if cands.is_empty() {
        let (i, j) = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .max_by(|&(a, b), &(c, d)| vals[a][b].total_cmp(&vals[c][d]))
            .unwrap_or((0, 0));
        cands.push(Witness { x: coord(i), y: coord(j), margin: vals[i][j] });
    }
    let refined: Vec<Witness> = cands.par_iter().map(|&c| refine(chi, c, h, grid)).collect();
    let best = refined.into_iter().max_by(|a, b| a.margin.total_cmp(&b.margin)).expect("nonempty");
    let witness = (best.margin > grid.confirm).then_some(best);
    ClassicalityVerdict { classical_on_grid: witness.is_none(), witness, best, grid: *grid }
}

pub fn classicality_test_density(rho: &DensityOperator, grid: &ClassicalityGrid) -> ClassicalityVerdict {
    classicality_test(&CharFn::Density(rho.clone()), grid)
}

/// Bounds `2(1 - s) <= delta <= 2 sqrt(1 - s)` from `s = sup |<beta|psi>|^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaBounds {
    pub lower: f64,
    pub upper: f64,
    pub sup_overlap: f64,
    pub beta: C64,
    /// Set when a local search stalled; the bracket is then widened by `1e-3` on both sides.
    pub flagged: bool,
}

/// Maximum of `beta -> <beta|rho|beta>` by multi-start simplex search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakSearch {
    pub value: f64,
    pub beta: C64,
    pub converged: bool,
}

fn starts(scale: f64, half_plane: bool) -> Vec<Vec<f64>> {
    let s = scale.max(0.5);
    let mut v = vec![
        vec![0.0, 0.0],
        vec![0.5 * s, 0.0],
        vec![s, 0.0],
        vec![1.5 * s, 0.0],
        vec![s, 0.5 * s],
        vec![s, -0.5 * s],
        vec![0.0, 0.5 * s],
        vec![0.5 * s, 0.5 * s],
        vec![0.5 * s, -0.5 * s],
    ];
    if !half_plane {
        v[3] = vec![-s, 0.0];
        v[6] = vec![0.0, -0.5 * s];
    }
    v
}

fn peak_search(q: impl Fn(C64) -> f64 + Sync, scale: f64, limit: f64, half_plane: bool) -> PeakSearch {
    let f = |p: &[f64]| -q(C64::new(p[0], p[1]));
    let lo = if half_plane { 0.0 } else { -limit };
    let bounds = Bounds::new(vec![lo, -limit], vec![limit, limit]);
    let (best, runs) = multi_start(&f, &starts(scale, half_plane), 0.3, &bounds, 1e-13, 1e-12, |x: &[f64]| {
        x[0].hypot(x[1])
    });
    PeakSearch { value: -best.value, beta: C64::new(best.x[0], best.x[1]), converged: runs.iter().all(|m| m.converged) }
}

fn is_parity_definite(psi: &FockVector) -> bool {
    let a = psi.amplitudes();
    let odd: f64 = a.iter().skip(1).step_by(2).map(|z| z.norm_sqr()).sum();
    let even: f64 = a.iter().step_by(2).map(|z| z.norm_sqr()).sum();
    odd < 1e-24 || even < 1e-24
}

/// Nonclassicality bounds of a pure state from its largest coherent-state overlap.
///
/// States of definite parity satisfy `|<beta|psi>| = |<-beta|psi>|`, so the search is confined to
/// `Re beta >= 0`. The coefficient 2 of the lower bound is used as stated in the literature.
pub fn delta_bounds_pure(psi: &FockVector) -> Result<DeltaBounds> {
    let n = psi.n_trunc();
    if psi.mode_count() != 1 {
        return Err(Error::Dimension("delta bounds need a single-mode vector".into()));
    }
    if (psi.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::Domain(format!("state norm {} differs from 1", psi.norm())));
    }
    let amps = psi.amplitudes().clone();
    let q = |b: C64| coherent_vector(b, n).dotc(&amps).norm_sqr();
    let mean = psi.mean_number();
    let half = is_parity_definite(psi);
    let peak = peak_search(q, mean.sqrt(), (n as f64).sqrt() + 2.0, half);
    Ok(bounds_from(peak))
}

fn bounds_from(peak: PeakSearch) -> DeltaBounds {
    let s = peak.value.clamp(0.0, 1.0);
    let gap = (1.0 - s).max(0.0);
    let (mut lower, mut upper) = (2.0 * gap, 2.0 * gap.sqrt());
    if !peak.converged {
        lower = (lower - 1e-3).max(0.0);
        upper = (upper + 1e-3).min(2.0);
    }
    DeltaBounds { lower: lower.min(2.0), upper: upper.min(2.0), sup_overlap: s, beta: peak.beta, flagged: !peak.converged }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedDeltaBound {
    /// `2 sqrt(1 - sup Q)`.
    pub upper: f64,
    pub q_max: f64,
    pub beta: C64,
    pub flagged: bool,
}

/// Upper bound on the distance of a mixed state from its Husimi maximum.
pub fn delta_upper_mixed(rho: &DensityOperator) -> Result<MixedDeltaBound> {
    let n = rho.single_dim()?;
    let mean = rho.mean_number()?;
    let parity = {
        let m = rho.matrix();
        let mut off: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if (i + j) % 2 == 1 {
                    off = off.max(m[(i, j)].norm());
                }
            }
        }
        off < 1e-14
    };
    let h = crate::contraction::HusimiEvaluator::new(rho);
    let peak = peak_search(|b| h.q(b), mean.sqrt(), (n as f64).sqrt() + 2.0, parity);
    let s = peak.value.clamp(0.0, 1.0);
    let mut upper = 2.0 * (1.0 - s).max(0.0).sqrt();
    if !peak.converged {
        upper = (upper + 1e-3).min(2.0);
    }
    Ok(MixedDeltaBound { upper: upper.min(2.0), q_max: s, beta: peak.beta, flagged: !peak.converged })
}

/// Bounds for `Xi_{pi/4}(|0><0|)`: the Husimi bound on the state, and the upper bound on
/// `delta(Omega_+)`, which caps it because the state is a Gaussian image of `Omega_+`.
#[derive(Debug, Clone, PartialEq)]
pub struct AttenuatedVacuumBounds {
    pub state: DensityOperator,
    pub husimi: MixedDeltaBound,
    pub omega: DeltaBounds,
    pub best_upper: f64,
}

pub fn attenuated_vacuum_bounds(om: &OmegaState) -> Result<AttenuatedVacuumBounds> {
    let spec = ChannelSpec::attenuator(FRAC_PI_4, Environment::Omega(Box::new(om.clone())));
    let state = crate::channels::apply_stinespring(&spec, &DensityOperator::from_pure(&FockVector::vacuum(1)))?;
    let husimi = delta_upper_mixed(&state)?;
    let omega = delta_bounds_pure(&om.fock)?;
    let best_upper = husimi.upper.min(omega.upper);
    Ok(AttenuatedVacuumBounds { state, husimi, omega, best_upper })
}

/// `exp(-alpha^2) tanh(alpha^2)`, the distance of the attenuated even cat from its coherent mixture.
pub fn even_cat_attenuation_distance(alpha: f64) -> f64 {
    let u = alpha * alpha;
    (-u).exp() * u.tanh()
}

/// `2 exp(-alpha^2) sinh(alpha^2)`, the known upper bound on the distance of the even cat itself.
pub fn even_cat_delta_upper(alpha: f64) -> f64 {
    let u = alpha * alpha;
    1.0 - (-2.0 * u).exp()
}

struct NegCat;

impl CostFunction for NegCat {
    type Param = f64;
    type Output = f64;

    fn cost(&self, a: &f64) -> std::result::Result<f64, argmin::core::Error> {
        Ok(-even_cat_attenuation_distance(*a))
    }
}

/// Numerical maximum of [`even_cat_attenuation_distance`] over `alpha in [0, 3]`.
pub fn even_cat_maximum() -> Result<(f64, f64)> {
    let solver = BrentOpt::new(0.0, 3.0).set_tolerance(1e-12, 1e-14);
    let res = Executor::new(NegCat, solver)
        .configure(|s| s.param(1.0).max_iters(500))
        .run()
        .map_err(|e| Error::Domain(format!("even cat maximization failed: {e}")))?;
    let a = *res.state().best_param.as_ref().unwrap_or(&f64::NAN);
    Ok((a, even_cat_attenuation_distance(a)))
}

/// `N_crit = 1/2 - 1/(2 d_c)` with `d_c = 2E + 1`.
pub fn critical_noise(e: f64) -> Result<f64> {
    let p = max_distant_pair(e)?;
    Ok(0.5 - 0.5 / p.d_c)
}

/// `|cos(gamma_c x / sqrt d_c) + exp(-2 gamma_c^2)| / (1 + exp(-2 gamma_c^2))`.
pub fn c_factor(e: f64, x: f64) -> Result<f64> {
    let p = max_distant_pair(e)?;
    let z = (-2.0 * p.gamma_c * p.gamma_c).exp();
    Ok(((p.gamma_c * x / p.d_c.sqrt()).cos() + z).abs() / (1.0 + z))
}

/// Characteristic function of `Xi_zeta o Phi_N` applied to `input`, composed through the channel
/// backend.
pub fn noisy_attenuator_char_fn(om: &OmegaState, zeta: f64, n: f64, input: CharFn) -> Result<CharFn> {
    let spec = ChannelSpec::noise(n).then(ChannelSpec::attenuator(zeta, Environment::Omega(Box::new(om.clone()))));
    char_fn_output(&spec, input)
}

/// Classicality verdicts just below and above `N_crit` for `Xi_{pi/4} o Phi_N(|0><0|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdCheck {
    pub e: f64,
    pub n_crit: f64,
    pub below: ClassicalityVerdict,
    pub above: ClassicalityVerdict,
}

impl ThresholdCheck {
    pub fn consistent(&self) -> bool {
        !self.below.classical_on_grid && self.above.classical_on_grid
    }
}

pub fn threshold_check(om: &OmegaState, offset: f64, grid: &ClassicalityGrid) -> Result<ThresholdCheck> {
    let n_crit = critical_noise(om.e)?;
    let verdict = |n: f64| -> Result<ClassicalityVerdict> {
        let chi = noisy_attenuator_char_fn(om, FRAC_PI_4, n.max(0.0), CharFn::vacuum())?;
        Ok(classicality_test(&chi, grid))
    };
    Ok(ThresholdCheck { e: om.e, n_crit, below: verdict(n_crit - offset)?, above: verdict(n_crit + offset)? })
}

/// Envelope violation of `Xi_{pi/4}(|alpha><alpha|)` on the `y = 0` line.
#[derive(Debug, Clone, PartialEq)]
pub struct LineWitness {
    pub x_star: f64,
    pub margin: f64,
    /// First nonzero extremum `2 pi e^{-w}` of the limiting profile `cos(e^w x / 2)`.
    pub predicted_x: f64,
    pub diagnostic: Option<String>,
}

/// Scans `0 < x <= 16` in steps of `1e-3` and refines the best point twice by 10x.
pub fn line_witness(om: &OmegaState, alpha: C64) -> Result<LineWitness> {
    if !(om.e > 0.0) {
        return Err(Error::Domain("line witness needs E > 0".into()));
    }
    let input = CharFn::gaussian_state(&crate::gaussian::GaussianPure::coherent(alpha));
    let spec = ChannelSpec::attenuator(FRAC_PI_4, Environment::Omega(Box::new(om.clone())));
    let chi = char_fn_output(&spec, input)?;
    let h = 1e-3;
    let steps = 16_000;
    let (mut x_star, mut margin) = (0.0, f64::NEG_INFINITY);
    for k in 1..=steps {
        let x = k as f64 * h;
        let m = envelope_margin(&chi, x, 0.0);
        if m > margin {
            (x_star, margin) = (x, m);
        }
    }
    let mut step = h;
    for _ in 0..2 {
        let sub = step / 10.0;
        let c = x_star;
        for k in -10..=10 {
            let x = c + k as f64 * sub;
            let m = envelope_margin(&chi, x, 0.0);
            if m > margin {
                (x_star, margin) = (x, m);
            }
        }
        step = sub;
    }
    let predicted_x = 2.0 * PI * (-om.pair.w).exp();
    let diagnostic = (margin <= 0.0).then(|| format!("no violation on the line for E = {}", om.e));
    Ok(LineWitness { x_star, margin, predicted_x, diagnostic })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::GaussianPure;
    use crate::superposition::build_omega;
    use approx::assert_abs_diff_eq;

    #[test]
    fn vacuum_is_classical() {
        let v = classicality_test(&CharFn::vacuum(), &ClassicalityGrid::default());
        assert!(v.classical_on_grid);
        assert!(v.best.margin.abs() < 1e-15);
    }

    #[test]
    fn squeezed_vacuum_witness_on_y_axis() {
        // the narrow quadrature direction of chi lies on a coordinate axis
        let g = GaussianPure::real(0.0, 0.5);
        let v = classicality_test(&CharFn::gaussian_state(&g), &ClassicalityGrid::default());
        let w = v.witness.expect("squeezed vacuum is nonclassical");
        assert!(w.y.abs() < 1e-9 || w.x.abs() < 1e-9, "{w:?}");
    }

    #[test]
    fn margin_at_origin_vanishes() {
        let om = build_omega(1.0, None).unwrap();
        for chi in [om.char_fn(), CharFn::vacuum(), CharFn::Density(om.density())] {
            assert!(envelope_margin(&chi, 0.0, 0.0).abs() < 1e-12);
        }
    }

    #[test]
    fn vacuum_bounds_vanish() {
        let b = delta_bounds_pure(&FockVector::vacuum(4)).unwrap();
        assert_abs_diff_eq!(b.sup_overlap, 1.0, epsilon = 1e-12);
        assert!(b.lower < 1e-10 && b.upper < 1e-5);
        let m = delta_upper_mixed(&DensityOperator::from_pure(&FockVector::vacuum(4))).unwrap();
        assert!(m.upper < 1e-5);
    }

    #[test]
    fn even_cat_bounds_consistent() {
        for alpha in [0.5, 1.0, 1.5] {
            let n = 40;
            let p = FockVector::new(coherent_vector(C64::new(alpha, 0.0), n));
            let m = FockVector::new(coherent_vector(C64::new(-alpha, 0.0), n));
            let cat = FockVector::new(p.amplitudes() + m.amplitudes()).normalized().unwrap();
            let b = delta_bounds_pure(&cat).unwrap();
            assert!(b.lower <= b.upper);
            assert!(b.lower <= even_cat_delta_upper(alpha) + 1e-9, "{alpha}: {b:?}");
        }
    }

    #[test]
    fn even_cat_distance_values() {
        assert_eq!(even_cat_attenuation_distance(0.0), 0.0);
        assert_abs_diff_eq!(even_cat_attenuation_distance(3.0), (-9.0f64).exp() * 9.0f64.tanh(), epsilon = 1e-18);
        let a = (0.5 * 2.0f64.asinh()).sqrt();
        assert_abs_diff_eq!(a, 0.849598574380516, epsilon = 1e-14);
        assert_abs_diff_eq!(even_cat_attenuation_distance(a), 0.3003, epsilon = 1e-4);
        let (am, vm) = even_cat_maximum().unwrap();
        assert_abs_diff_eq!(am, a, epsilon = 1e-6);
        assert_abs_diff_eq!(vm, even_cat_attenuation_distance(a), epsilon = 1e-12);
    }

    #[test]
    fn critical_noise_values() {
        assert_eq!(critical_noise(0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(critical_noise(1.0).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        assert!((critical_noise(1e8).unwrap() - 0.5).abs() < 1e-8);
        assert!(critical_noise(-1.0).is_err());
    }

    #[test]
    fn c_factor_bounded() {
        for e in [0.5, 1.0, 5.0] {
            for k in 0..2000 {
                assert!(c_factor(e, -20.0 + 0.02 * k as f64).unwrap() <= 1.0 + 1e-15);
            }
        }
    }

    #[test]
    fn closed_form_noise_line_matches_composition() {
        let om = build_omega(1.0, None).unwrap();
        let n = 0.2;
        let chi = noisy_attenuator_char_fn(&om, FRAC_PI_4, n, CharFn::vacuum()).unwrap();
        let d = om.pair.d_c;
        for x in [0.5f64, 1.7, 3.2] {
            // the difference of envelope and |chi| along y = 0 in closed form
            let want = (-x * x / 4.0).exp()
                - (-(n + 0.5) * x * x / 4.0).exp() * (-x * x / (8.0 * d)).exp() * c_factor(1.0, x).unwrap();
            assert_abs_diff_eq!(-envelope_margin(&chi, x, 0.0), want, epsilon = 1e-14);
        }
    }

    #[test]
    fn line_witness_mean_independent() {
        let om = build_omega(1.0, None).unwrap();
        let a = line_witness(&om, C64::new(0.0, 0.0)).unwrap();
        let b = line_witness(&om, C64::new(2.0, 1.0)).unwrap();
        assert!(a.margin > 1e-7, "{a:?}");
        assert!((a.margin - b.margin).abs() < 1e-9);
    }

    #[test]
    fn amplifier_keeps_coherent_input_classical() {
        let om = build_omega(1.0, None).unwrap();
        let spec = ChannelSpec::amplifier(0.4, Environment::Omega(Box::new(om)));
        let input = CharFn::gaussian_state(&GaussianPure::coherent(C64::new(0.6, -0.3)));
        let chi = char_fn_output(&spec, input).unwrap();
        assert!(classicality_test(&chi, &ClassicalityGrid { points: 201, ..Default::default() }).classical_on_grid);
    }
}
