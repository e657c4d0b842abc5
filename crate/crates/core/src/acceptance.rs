//! Acceptance battery: one check per criterion, each reporting pass or fail with its numbers.

use crate::channels::{
    apply_char_fn, apply_stinespring, char_fn_output, joint_output, kraus_decomposition, z2_covariance_check, ChannelSpec,
    Environment,
};
use crate::charfn::{omega_value, CharFn};
use crate::contraction::{tau_lower_bound, trace_distance};
use crate::correlations::{amplifier_noise_report, fig1_sweep, omega_tms_crossing, renyi2_pure, Fig1Row};
use crate::error::Result;
use crate::fock::{coherent_vector, DensityOperator, FockVector, NumericCharFn, TwoMode};
use crate::gaussian::{fidelity_minimality_check, GaussianPure};
use crate::linalg::CMat;
use crate::nonclassicality::{
    classicality_test, delta_bounds_pure, even_cat_maximum, line_witness, threshold_check, ClassicalityGrid,
};
use crate::superposition::{build_omega, fock_amplitudes_closed_form, line_integral_representation, LineQuadrature};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};
use std::fmt;

pub const CRITERIA: [(usize, &str); 13] = [
    (1, "vacuum probabilities of Omega_+"),
    (2, "vanishing n = 2 amplitude"),
    (3, "Hong-Ou-Mandel output"),
    (4, "even-cat maximum"),
    (5, "critical noise threshold"),
    (6, "line witness of the attenuated vacuum"),
    (7, "squeezed-environment classicality"),
    (8, "entanglement ordering and crossing"),
    (9, "backend equivalence"),
    (10, "closed-form cross-checks"),
    (11, "minimal-fidelity recovery"),
    (12, "contraction suite"),
    (13, "property suites"),
];

/// Outcome of one criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "criterion {:>2} {tag} {}: {}", self.id, self.title, self.detail)
    }
}

fn title(id: usize) -> &'static str {
    CRITERIA.iter().find(|c| c.0 == id).map_or("unknown", |c| c.1)
}

fn outcome(id: usize, r: Result<(bool, String)>) -> Outcome {
    let (passed, detail) = r.unwrap_or_else(|e| (false, format!("error: {e}")));
    Outcome { id, title: title(id), passed, detail }
}

/// Runs criterion `id` (1 to 13).
pub fn run(id: usize) -> Outcome {
    let r = match id {
        1 => vacuum_probabilities(),
        2 => second_amplitude(),
        3 => hong_ou_mandel(),
        4 => even_cat(),
        5 => critical_noise_threshold(),
        6 => line_witness_margin(),
        7 => squeezed_environment(),
        8 => entanglement_ordering(&fig1_grid()),
        9 => backend_equivalence(),
        10 => closed_forms(),
        11 => minimal_fidelity(),
        12 => contraction_suite(),
        13 => property_suites(),
        _ => Ok((false, format!("no criterion {id}"))),
    };
    outcome(id, r)
}

pub fn run_all() -> Vec<Outcome> {
    CRITERIA.iter().map(|c| run(c.0)).collect()
}

const FIG3: [(f64, f64); 4] = [(0.5, 0.9974), (1.0, 0.9822), (5.0, 0.6987), (10.0, 0.5175)];

/// The tabulated values belong to cat amplitude `r_c` instead of `r_c sqrt(d_c)`; with the
/// isoenergetic pair `p(0)` is 0.935, 0.626, 0.0074 and 4e-5, so this check fails.
fn vacuum_probabilities() -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (e, want) in FIG3 {
        let p0 = build_omega(e, None)?.probabilities()[0];
        ok &= (p0 - want).abs() < 1e-3;
        parts.push(format!("E={e}: p0={p0:.4} (want {want})"));
    }
    Ok((ok, parts.join(", ")))
}

/// The `n = 2` zero likewise needs cat amplitude `r_c`; the isoenergetic pair gives `p(2)` between
/// 0.05 and 0.31, so this check fails.
fn second_amplitude() -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (e, _) in FIG3 {
        let p2 = build_omega(e, None)?.probabilities()[2];
        ok &= p2 < 1e-10;
        parts.push(format!("E={e}: p2={p2:.3e}"));
    }
    Ok((ok, parts.join(", ")))
}

/// A real angle gives `(|2,0> - |0,2>)/sqrt 2`; the symmetric sign needs an imaginary one, so this
/// check fails on the relative sign while magnitudes and entropy agree.
fn hong_ou_mandel() -> Result<(bool, String)> {
    let one = FockVector::basis(2, 1)?;
    let out = joint_output(TwoMode::Beamsplitter(FRAC_PI_4), &one, &one, (3, 3))?;
    let m = out.as_pair_matrix()?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let want = CMat::from_fn(3, 3, |i, j| if (i, j) == (0, 2) || (i, j) == (2, 0) { C64::new(h, 0.0) } else { C64::new(0.0, 0.0) });
    let dev = crate::linalg::max_abs(&(&m - &want));
    let s2 = renyi2_pure(&out, 0)?;
    let ok = dev < 1e-9 && (s2 - 1.0).abs() < 1e-9;
    Ok((
        ok,
        format!("<2,0|out>={:.6}, <0,2|out>={:.6}, amplitude deviation {dev:.3e}, S2={s2:.12}", m[(2, 0)].re, m[(0, 2)].re),
    ))
}

fn even_cat() -> Result<(bool, String)> {
    let (a, v) = even_cat_maximum()?;
    let a_want = (0.5 * 2f64.asinh()).sqrt();
    let ok = (v - 0.3003).abs() < 1e-4 && (a - a_want).abs() < 1e-4;
    Ok((ok, format!("max {v:.6} at alpha {a:.6} (want 0.3003 at {a_want:.6})")))
}

fn critical_noise_threshold() -> Result<(bool, String)> {
    let grid = ClassicalityGrid::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for e in [0.5, 1.0, 5.0] {
        let t = threshold_check(&build_omega(e, None)?, 0.05, &grid)?;
        ok &= t.consistent();
        parts.push(format!(
            "E={e}: N_crit={:.6}, below witness {}, above best margin {:.3e}",
            t.n_crit,
            t.below.witness.map_or("none".to_string(), |w| format!("{:.3e}", w.margin)),
            t.above.best.margin
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn line_witness_margin() -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for e in [1.0, 5.0, 10.0] {
        let om = build_omega(e, None)?;
        let vac = line_witness(&om, C64::new(0.0, 0.0))?;
        let coh = line_witness(&om, C64::new(2.0, 1.0))?;
        let same = (vac.margin - coh.margin).abs();
        ok &= vac.margin > 1e-7 && same < 1e-9;
        parts.push(format!("E={e}: margin {:.6e} at x={:.4}, |difference| {same:.1e}", vac.margin, vac.x_star));
    }
    Ok((ok, parts.join("; ")))
}

/// A 50:50 mix of vacuum and squeezed vacuum has q variance `(1 + e^{-2s})/4 < 1/2`, which violates
/// the envelope for every `s > 0`, so this check fails.
fn squeezed_environment() -> Result<(bool, String)> {
    let et = build_omega(1.0, None)?.e_tilde;
    let env = Environment::Gaussian(GaussianPure::real(0.0, et.sqrt().asinh()));
    let chi = char_fn_output(&ChannelSpec::attenuator(FRAC_PI_4, env), CharFn::vacuum())?;
    let v = classicality_test(&chi, &ClassicalityGrid::default());
    let detail = match v.witness {
        Some(w) => format!("witness margin {:.4e} at ({:.4}, {:.4})", w.margin, w.x, w.y),
        None => format!("no witness, best margin {:.3e}", v.best.margin),
    };
    Ok((v.classical_on_grid, detail))
}

/// Sweep grid for the entanglement comparison.
pub fn fig1_grid() -> Vec<f64> {
    let mut g: Vec<f64> = (1..=20).map(|k| k as f64 / 10.0).collect();
    g.extend([3.0, 5.0, 7.5, 10.0]);
    g
}

/// The superposition output stays below the two-mode configuration on the whole grid, and below
/// squeezed vacuum for `E` under about 0.4, so there is no crossing and this check fails.
fn entanglement_ordering(grid: &[f64]) -> Result<(bool, String)> {
    let rows: Vec<Fig1Row> = fig1_sweep(grid)?;
    let worse: Vec<f64> = rows.iter().filter(|r| r.e > 0.0 && r.s2_omega <= r.s2_sqvac).map(|r| r.e).collect();
    let crossing = omega_tms_crossing(&rows);
    let bracketed = crossing.is_some_and(|(a, b)| a >= 0.6 - 1e-12 && b <= 0.8 + 1e-12);
    let detail = format!(
        "Omega not above squeezed vacuum at E={worse:?}; Omega-TMS crossing {crossing:?}; E=1: S2 Omega {:.4}, sqvac {:.4}, TMS {:.4}",
        rows.iter().find(|r| (r.e - 1.0).abs() < 1e-12).map_or(f64::NAN, |r| r.s2_omega),
        rows.iter().find(|r| (r.e - 1.0).abs() < 1e-12).map_or(f64::NAN, |r| r.s2_sqvac),
        rows.iter().find(|r| (r.e - 1.0).abs() < 1e-12).map_or(f64::NAN, |r| r.s2_tms),
    );
    Ok((worse.is_empty() && bracketed, detail))
}

/// Input of the backend battery with its closed-form characteristic function.
fn battery_inputs() -> Result<Vec<(&'static str, DensityOperator, CharFn)>> {
    let coh = GaussianPure::coherent(C64::new(0.5, 0.3));
    let sq = GaussianPure::new(C64::new(0.2, -0.1), C64::from_polar(0.3, 0.6));
    let fock = DensityOperator::from_pure(&FockVector::basis(3, 2)?);
    let om = build_omega(0.5, None)?;
    Ok(vec![
        ("coherent", DensityOperator::from_pure(&coh.to_fock_auto()?), CharFn::gaussian_state(&coh)),
        ("squeezed", DensityOperator::from_pure(&sq.to_fock_auto()?), CharFn::gaussian_state(&sq)),
        ("fock", fock.clone(), CharFn::Density(fock)),
        ("omega", om.density(), om.char_fn()),
    ])
}

fn battery_channels() -> Result<Vec<(&'static str, ChannelSpec)>> {
    Ok(vec![
        ("attenuator pi/4", ChannelSpec::attenuator(FRAC_PI_4, Environment::omega(1.0)?)),
        ("attenuator 0.3", ChannelSpec::attenuator(0.3, Environment::omega(0.5)?)),
        ("amplifier 0.2", ChannelSpec::amplifier(0.2, Environment::omega(0.5)?)),
    ])
}

fn backend_equivalence() -> Result<(bool, String)> {
    let mut worst_cf: f64 = 0.0;
    let mut worst_kr: f64 = 0.0;
    let mut worst_defect: f64 = 0.0;
    let mut failures = Vec::new();
    for (cname, spec) in battery_channels()? {
        for (iname, rho, chi) in battery_inputs()? {
            let st = apply_stinespring(&spec, &rho)?;
            let cf = apply_char_fn(&spec, chi, st.n_trunc())?;
            let kraus = kraus_decomposition(&spec, 2 * rho.n_trunc())?;
            let kr = kraus.apply(&rho)?;
            let (d_cf, d_kr) = (trace_distance(&st, &cf)?, trace_distance(&st, &kr)?);
            worst_cf = worst_cf.max(d_cf);
            worst_kr = worst_kr.max(d_kr);
            worst_defect = worst_defect.max(kraus.completeness_defect);
            if d_cf >= 1e-6 || d_kr >= 1e-6 || kraus.completeness_defect >= 1e-6 {
                failures.push(format!("{iname} through {cname}"));
            }
        }
    }
    Ok((
        failures.is_empty(),
        format!(
            "12 cases, worst trace distance char-fn {worst_cf:.3e}, Kraus {worst_kr:.3e}, completeness defect {worst_defect:.3e}{}",
            if failures.is_empty() { String::new() } else { format!("; failing: {}", failures.join(", ")) }
        ),
    ))
}

fn closed_forms() -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (e, _) in FIG3 {
        let om = build_omega(e, None)?;
        let n = om.fock.n_trunc();
        let amps = om.fock.amplitudes();
        let cf = fock_amplitudes_closed_form(om.pair.gamma_c, om.pair.w, n - 1)?;
        let d_amp = (0..n).map(|k| (cf[k] - amps[k].re).abs()).fold(0.0, f64::max);
        let num = NumericCharFn::new(&om.density())?;
        let mut d_chi: f64 = 0.0;
        for i in -6..=6 {
            for j in -6..=6 {
                let (x, y) = (0.5 * i as f64, 0.5 * j as f64);
                let v = num.eval(x, y)?;
                d_chi = d_chi.max((v - C64::new(omega_value(om.pair.gamma_c, om.pair.w, x, y), 0.0)).norm());
            }
        }
        let (li, _) = line_integral_representation(om.pair.r_c, om.pair.d_c, &LineQuadrature::default(), n)?;
        let d_line = (li.amplitudes() - amps).norm();
        ok &= d_amp < 1e-6 && d_chi < 1e-6 && d_line < 1e-6;
        parts.push(format!("E={e}: amplitudes {d_amp:.1e}, chi {d_chi:.1e}, line {d_line:.1e}"));
    }
    Ok((ok, parts.join("; ")))
}

fn minimal_fidelity() -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for e in [0.5, 1.0] {
        let rep = fidelity_minimality_check(e);
        let want = 2.0 * e + 1.0;
        let gap = (rep.d_found.0 - want).abs().max((rep.d_found.1 - want).abs());
        ok &= rep.converged && gap < 1e-4;
        parts.push(format!("E={e}: d=({:.7}, {:.7}), want {want}, gap {gap:.1e}", rep.d_found.0, rep.d_found.1));
    }
    Ok((ok, parts.join("; ")))
}

/// Random density operator `G G^dagger / tr` on `n` levels with a random rank.
pub fn random_density(rng: &mut impl Rng, n: usize) -> Result<DensityOperator> {
    let rank = rng.random_range(1..=n);
    let g = CMat::from_fn(n, rank, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityOperator::single(m.unscale(tr))
}

/// Energies and angles of the contraction grid.
pub const CONTRACTION_E: [f64; 3] = [0.5, 1.0, 2.0];
pub const CONTRACTION_ZETA: [f64; 5] = [0.0, FRAC_PI_8, FRAC_PI_4, 3.0 * FRAC_PI_8, FRAC_PI_2];

fn contraction_suite() -> Result<(bool, String)> {
    let mut ok = true;
    let mut lowest = f64::INFINITY;
    let mut highest = f64::NEG_INFINITY;
    let mut swap: f64 = 0.0;
    let env = Environment::omega(1.0)?;
    for e in CONTRACTION_E {
        for z in CONTRACTION_ZETA {
            let rep = tau_lower_bound(e, &ChannelSpec::attenuator(z, env.clone()))?;
            lowest = lowest.min(rep.tau_lower);
            highest = highest.max(rep.tau_lower);
            ok &= (-1e-12..=1.0 + 1e-6).contains(&rep.tau_lower);
            if z == FRAC_PI_2 {
                swap = swap.max(rep.tau_lower.abs());
            }
        }
    }
    ok &= swap < 1e-9;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let specs = [
        ChannelSpec::attenuator(0.4, env.clone()),
        ChannelSpec::attenuator(1.1, Environment::omega(0.5)?),
        ChannelSpec::amplifier(0.2, Environment::omega(0.5)?),
        ChannelSpec::noise(0.3).then(ChannelSpec::attenuator(FRAC_PI_4, env)),
    ];
    let mut worst = f64::NEG_INFINITY;
    for k in 0..50 {
        let n = rng.random_range(2..=7);
        let a = random_density(&mut rng, n)?;
        let b = random_density(&mut rng, n)?;
        let spec = &specs[k % specs.len()];
        let before = trace_distance(&a, &b)?;
        let after = trace_distance(&apply_stinespring(spec, &a)?, &apply_stinespring(spec, &b)?)?;
        worst = worst.max(after - before);
    }
    ok &= worst <= 1e-6;
    Ok((ok, format!("tau_lower in [{lowest:.6}, {highest:.6}] on 15 grid points, {swap:.1e} at zeta=pi/2, worst distance gain on 50 pairs {worst:.3e}")))
}

fn property_suites() -> Result<(bool, String)> {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let covariant = [
        ChannelSpec::attenuator(0.7, Environment::omega(1.0)?),
        ChannelSpec::amplifier(0.3, Environment::omega(0.5)?),
        ChannelSpec::noise(0.4),
        ChannelSpec::attenuator(0.5, Environment::omega(0.5)?).then(ChannelSpec::amplifier(0.2, Environment::Vacuum)),
    ];
    let (mut trace_dev, mut z2_dev): (f64, f64) = (0.0, 0.0);
    for spec in &covariant {
        for _ in 0..4 {
            let n = rng.random_range(2..=6);
            let rho = random_density(&mut rng, n)?;
            trace_dev = trace_dev.max((apply_stinespring(spec, &rho)?.trace() - 1.0).abs());
            z2_dev = z2_dev.max(z2_covariance_check(spec, &rho)?);
        }
    }
    if trace_dev > 1e-8 {
        failures.push(format!("trace preservation {trace_dev:.1e}"));
    }
    if z2_dev >= 1e-8 {
        failures.push(format!("parity covariance {z2_dev:.1e}"));
    }
    let (mut odd, mut order_gap, mut et_gap): (f64, f64, f64) = (0.0, f64::INFINITY, f64::NEG_INFINITY);
    for e in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
        let om = build_omega(e, None)?;
        odd = odd.max(om.fock.amplitudes().iter().skip(1).step_by(2).map(|a| a.norm()).fold(0.0, f64::max));
        let d = delta_bounds_pure(&om.fock)?;
        order_gap = order_gap.min((d.upper - d.lower).min(d.lower));
        et_gap = et_gap.max(om.e_tilde - e);
    }
    if odd > 0.0 {
        failures.push(format!("odd amplitude {odd:.1e}"));
    }
    if order_gap < 0.0 {
        failures.push(format!("delta bounds out of order by {order_gap:.1e}"));
    }
    if et_gap > 1e-12 {
        failures.push(format!("e_tilde above E by {et_gap:.1e}"));
    }
    let mut mu_gap = f64::INFINITY;
    let om = build_omega(1.0, None)?;
    let coh = DensityOperator::from_pure(&FockVector::new(coherent_vector(C64::new(0.6, -0.2), 30)).normalized()?);
    for r in [0.05, 0.2, 0.5] {
        let spec = ChannelSpec::amplifier(r, Environment::Omega(Box::new(om.clone())));
        for rho in [&coh, &om.density()] {
            let rep = amplifier_noise_report(&spec, rho)?;
            mu_gap = mu_gap.min(rep.mu - 1.0 / rep.gain_sq);
        }
    }
    if mu_gap < -1e-9 {
        failures.push(format!("mu below 1/g^2 by {:.1e}", -mu_gap));
    }
    let detail = format!(
        "trace {trace_dev:.1e}, parity covariance {z2_dev:.1e}, odd amplitudes {odd:.1e}, delta order margin {order_gap:.3e}, \
         max e_tilde - E {et_gap:.1e}, min mu - 1/g^2 {mu_gap:.3e}{}",
        if failures.is_empty() { String::new() } else { format!("; failing: {}", failures.join(", ")) }
    );
    Ok((failures.is_empty(), detail))
}
