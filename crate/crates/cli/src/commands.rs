//! One table builder per subcommand.

use crate::config::{check_all, check_count, RunConfig, UsageError};
use crate::table::{Cell, Table};
use num_complex::Complex64 as C64;
use omegachan::acceptance::{fig1_grid, CONTRACTION_E, CONTRACTION_ZETA};
use omegachan::contraction::{tau_lower_bound_with, PolarQuadrature};
use omegachan::correlations::{amplifier_noise_row, fig1_sweep};
use omegachan::nonclassicality::{
    attenuated_vacuum_bounds, classicality_test, critical_noise, delta_bounds_pure, noisy_attenuator_char_fn,
    ClassicalityGrid,
};
use omegachan::{build_omega, ChannelSpec, CharFn, Environment, OmegaState};
use std::f64::consts::FRAC_PI_4;

use Cell::{B, F, I};

/// Failure of a command: bad input or a numerical error from the library.
#[derive(Debug)]
pub enum CommandError {
    Usage(UsageError),
    Compute(omegachan::Error),
}

impl From<UsageError> for CommandError {
    fn from(e: UsageError) -> Self {
        CommandError::Usage(e)
    }
}

impl From<omegachan::Error> for CommandError {
    fn from(e: omegachan::Error) -> Self {
        CommandError::Compute(e)
    }
}

type Result<T> = std::result::Result<T, CommandError>;

const FIG3_E: [f64; 4] = [0.5, 1.0, 5.0, 10.0];
const NOISE_E: [f64; 1] = [1.0];
const NOISE_R: [f64; 10] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
/// Offset of the default noise levels on either side of the critical value.
const THRESHOLD_OFFSET: f64 = 0.05;

fn energies(cfg: &RunConfig, default: &[f64]) -> Result<Vec<f64>> {
    let e = cfg.e_grid.clone().unwrap_or_else(|| default.to_vec());
    check_all("e-grid", &e, "finite and >= 0", |x| x.is_finite() && x >= 0.0)?;
    Ok(e)
}

fn omega(cfg: &RunConfig, e: f64) -> Result<OmegaState> {
    check_count("n-trunc", cfg.n_trunc, 1)?;
    Ok(build_omega(e, cfg.n_trunc)?)
}

pub fn fig1(cfg: &RunConfig) -> Result<Table> {
    let e = energies(cfg, &fig1_grid())?;
    let mut t = Table::new("fig1", &["e", "e_tilde", "s2_omega", "s2_sqvac", "s2_tms", "n_trunc", "tail_mass"]);
    for r in fig1_sweep(&e)? {
        t.push(vec![F(r.e), F(r.e_tilde), F(r.s2_omega), F(r.s2_sqvac), F(r.s2_tms), I(r.n_trunc), F(r.tail_mass)]);
    }
    Ok(t)
}

pub fn fig2(cfg: &RunConfig) -> Result<Table> {
    let e = energies(cfg, &fig1_grid())?;
    let mut t = Table::new(
        "fig2",
        &[
            "e",
            "e_tilde",
            "delta_lower_omega",
            "delta_upper_omega",
            "delta_upper_channel_output",
            "sup_overlap_omega",
            "beta_re",
            "beta_im",
            "sup_q_output",
            "flagged",
            "n_trunc",
            "tail_mass",
        ],
    );
    for &e in &e {
        let om = omega(cfg, e)?;
        let d = delta_bounds_pure(&om.fock)?;
        let out = attenuated_vacuum_bounds(&om)?;
        t.push(vec![
            F(e),
            F(om.e_tilde),
            F(d.lower),
            F(d.upper),
            F(out.best_upper),
            F(d.sup_overlap),
            F(d.beta.re),
            F(d.beta.im),
            F(out.husimi.q_max),
            B(d.flagged || out.husimi.flagged),
            I(om.fock.n_trunc()),
            F(om.tail_mass()),
        ]);
    }
    Ok(t)
}

pub fn fig3(cfg: &RunConfig) -> Result<Table> {
    let e = energies(cfg, &FIG3_E)?;
    let mut t = Table::new("fig3", &["e", "n", "p", "n_trunc", "tail_mass"]);
    for &e in &e {
        let om = omega(cfg, e)?;
        let (n_trunc, tail) = (om.fock.n_trunc(), om.tail_mass());
        for (n, p) in om.probabilities().into_iter().enumerate() {
            t.push(vec![F(e), I(n), F(p), I(n_trunc), F(tail)]);
        }
    }
    Ok(t)
}

pub fn threshold(cfg: &RunConfig) -> Result<Table> {
    let e = energies(cfg, &FIG3_E[..3])?;
    if let Some(n) = &cfg.noise {
        check_all("noise", n, "finite and >= 0", |x| x.is_finite() && x >= 0.0)?;
    }
    check_count("grid-points", cfg.grid_points, 3)?;
    let mut grid = ClassicalityGrid::default();
    if let Some(p) = cfg.grid_points {
        grid.points = p;
    }
    let mut t = Table::new(
        "threshold",
        &[
            "e",
            "n_crit",
            "noise",
            "classical",
            "best_margin",
            "best_x",
            "best_y",
            "grid_points",
            "refine_levels",
            "n_trunc",
            "tail_mass",
        ],
    );
    for &e in &e {
        let om = omega(cfg, e)?;
        let n_crit = critical_noise(e)?;
        let levels = cfg.noise.clone().unwrap_or_else(|| vec![(n_crit - THRESHOLD_OFFSET).max(0.0), n_crit + THRESHOLD_OFFSET]);
        for n in levels {
            let chi = noisy_attenuator_char_fn(&om, FRAC_PI_4, n, CharFn::vacuum())?;
            let v = classicality_test(&chi, &grid);
            t.push(vec![
                F(e),
                F(n_crit),
                F(n),
                B(v.classical_on_grid),
                F(v.best.margin),
                F(v.best.x),
                F(v.best.y),
                I(grid.points),
                I(grid.refine_levels),
                I(om.fock.n_trunc()),
                F(om.tail_mass()),
            ]);
        }
    }
    Ok(t)
}

pub fn contraction(cfg: &RunConfig) -> Result<Table> {
    let e = cfg.e_grid.clone().unwrap_or_else(|| CONTRACTION_E.to_vec());
    check_all("e-grid", &e, "finite and > 0", |x| x.is_finite() && x > 0.0)?;
    let zeta = cfg.zeta.clone().unwrap_or_else(|| CONTRACTION_ZETA.to_vec());
    check_all("zeta", &zeta, "finite", f64::is_finite)?;
    let env_e = cfg.env_e.unwrap_or(1.0);
    check_all("env-e", &[env_e], "finite and >= 0", |x| x.is_finite() && x >= 0.0)?;
    check_count("radial-nodes", cfg.radial_nodes, 2)?;
    check_count("angular-nodes", cfg.angular_nodes, 4)?;
    let mut quad = PolarQuadrature::default();
    quad.radial_nodes = cfg.radial_nodes.unwrap_or(quad.radial_nodes);
    quad.angular_nodes = cfg.angular_nodes.unwrap_or(quad.angular_nodes);
    let env = Environment::omega(env_e)?;
    let mut t = Table::new(
        "contraction",
        &[
            "e",
            "zeta",
            "env_e",
            "diameter_distance",
            "q_integral",
            "tau_lower",
            "output_distance",
            "n_out",
            "radius",
            "radial_nodes",
            "angular_nodes",
            "refinements",
            "quadrature_change",
        ],
    );
    for &e in &e {
        for &z in &zeta {
            let rep = tau_lower_bound_with(e, &ChannelSpec::attenuator(z, env.clone()), &quad)?;
            let q = rep.quadrature;
            t.push(vec![
                F(e),
                F(z),
                F(env_e),
                F(rep.diameter_distance),
                F(rep.q_integral),
                F(rep.tau_lower),
                F(rep.output_distance),
                I(rep.n_out),
                F(q.radius),
                I(q.radial_nodes),
                I(q.angular_nodes),
                I(q.refinements),
                F(q.change),
            ]);
        }
    }
    Ok(t)
}

pub fn noise(cfg: &RunConfig) -> Result<Table> {
    let e = energies(cfg, &NOISE_E)?;
    let r = cfg.r.clone().unwrap_or_else(|| NOISE_R.to_vec());
    check_all("r", &r, "finite and > 0", |x| x.is_finite() && x > 0.0)?;
    let beta = cfg.beta.unwrap_or(1.0);
    check_all("beta", &[beta], "finite", f64::is_finite)?;
    let mut t = Table::new(
        "noise",
        &[
            "e",
            "r",
            "e_tilde",
            "gain_sq",
            "nu_in_coherent",
            "nu_out_coherent",
            "mu_coherent",
            "nu_in_omega",
            "nu_out_omega",
            "mu_omega",
            "n_out_coherent",
            "n_out_omega",
            "n_trunc",
            "tail_mass",
        ],
    );
    for &e in &e {
        let om = omega(cfg, e)?;
        for &r in &r {
            let row = amplifier_noise_row(&om, r, C64::new(beta, 0.0))?;
            let (c, o) = (row.coherent, row.omega);
            t.push(vec![
                F(e),
                F(r),
                F(row.e_tilde),
                F(c.gain_sq),
                F(c.nu_in),
                F(c.nu_out),
                F(c.mu),
                F(o.nu_in),
                F(o.nu_out),
                F(o.mu),
                I(c.n_out),
                I(o.n_out),
                I(om.fock.n_trunc()),
                F(om.tail_mass()),
            ]);
        }
    }
    Ok(t)
}
