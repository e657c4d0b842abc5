//! Attenuator, amplifier and classical-noise channels with three interchangeable backends.
//!
//! The Stinespring and Kraus backends act in truncated Fock space through the column recurrences
//! of [`crate::fock`]; the characteristic-function backend composes closed forms and reconstructs
//! density matrices by Weyl inversion.

use crate::charfn::CharFn;
use crate::error::{Error, Result};
use crate::fock::{displacement_elements, weyl_to_xi, DensityOperator, FockVector, Shape, TwoMode, TwoModeEngine};
use crate::gaussian::GaussianPure;
use crate::linalg::{self, CMat, CVec};
use crate::superposition::{build_omega, OmegaState};
use nalgebra::Matrix4;
use num_complex::Complex64 as C64;
use std::f64::consts::{FRAC_PI_2, PI};

/// Environment state of a dilation.
#[derive(Debug, Clone, PartialEq)]
pub enum Environment {
    Omega(Box<OmegaState>),
    Vacuum,
    Gaussian(GaussianPure),
    Explicit(FockVector),
}

impl Environment {
    /// Builds `Omega_+` at energy constraint `e` once, for reuse across channel applications.
    pub fn omega(e: f64) -> Result<Self> {
        Ok(Environment::Omega(Box::new(build_omega(e, None)?)))
    }

    pub fn fock(&self) -> Result<FockVector> {
        match self {
            Environment::Omega(om) => Ok(om.fock.clone()),
            Environment::Vacuum => Ok(FockVector::vacuum(1)),
            Environment::Gaussian(g) => g.to_fock_auto(),
            Environment::Explicit(v) => {
                if v.mode_count() != 1 {
                    return Err(Error::Dimension("environment must be a single-mode vector".into()));
                }
                if (v.norm() - 1.0).abs() > 1e-10 {
                    return Err(Error::Domain(format!("environment norm {} differs from 1", v.norm())));
                }
                Ok(v.clone())
            }
        }
    }

    pub fn char_fn(&self) -> CharFn {
        match self {
            Environment::Omega(om) => om.char_fn(),
            Environment::Vacuum => CharFn::vacuum(),
            Environment::Gaussian(g) => CharFn::gaussian_state(g),
            Environment::Explicit(v) => CharFn::Density(DensityOperator::from_pure(v)),
        }
    }

    pub fn energy(&self) -> Result<f64> {
        Ok(match self {
            Environment::Omega(om) => om.e_tilde,
            Environment::Vacuum => 0.0,
            Environment::Gaussian(g) => g.energy(),
            Environment::Explicit(v) => v.mean_number(),
        })
    }
}

/// A channel built from the dilations of the crate, or a composition applied left to right.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelSpec {
    Attenuator { zeta: f64, env: Environment },
    Amplifier { r: f64, env: Environment },
    ClassicalNoise { n: f64 },
    Composition(Vec<ChannelSpec>),
}

impl ChannelSpec {
    pub fn attenuator(zeta: f64, env: Environment) -> Self {
        ChannelSpec::Attenuator { zeta, env }
    }

    pub fn amplifier(r: f64, env: Environment) -> Self {
        ChannelSpec::Amplifier { r, env }
    }

    pub fn noise(n: f64) -> Self {
        ChannelSpec::ClassicalNoise { n }
    }

    /// `self` followed by `next`.
    pub fn then(self, next: ChannelSpec) -> Self {
        match self {
            ChannelSpec::Composition(mut v) => {
                v.push(next);
                ChannelSpec::Composition(v)
            }
            first => ChannelSpec::Composition(vec![first, next]),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ChannelSpec::Attenuator { zeta, env } => {
                if !(0.0..=FRAC_PI_2 + 1e-15).contains(zeta) {
                    return Err(Error::Domain(format!("attenuator angle {zeta} outside [0, pi/2]")));
                }
                env.fock().map(|_| ())
            }
            ChannelSpec::Amplifier { r, env } => {
                if !(*r > 0.0) || !r.is_finite() {
                    return Err(Error::Domain(format!("amplifier parameter must be > 0, got {r}")));
                }
                env.fock().map(|_| ())
            }
            ChannelSpec::ClassicalNoise { n } => {
                if !(*n >= 0.0) || !n.is_finite() {
                    return Err(Error::Domain(format!("classical noise must be >= 0, got {n}")));
                }
                Ok(())
            }
            ChannelSpec::Composition(parts) => parts.iter().try_for_each(ChannelSpec::validate),
        }
    }

    /// True when every component commutes with photon-number parity.
    pub fn is_parity_covariant(&self) -> bool {
        let env_even = |env: &Environment| match env {
            Environment::Omega(om) => om.branch == crate::superposition::Branch::Plus,
            Environment::Vacuum => true,
            Environment::Gaussian(g) => g.alpha.norm() == 0.0,
            Environment::Explicit(v) => {
                let a = v.amplitudes();
                let odd: f64 = a.iter().skip(1).step_by(2).map(|z| z.norm_sqr()).sum();
                let even: f64 = a.iter().step_by(2).map(|z| z.norm_sqr()).sum();
                odd < 1e-24 || even < 1e-24
            }
        };
        match self {
            ChannelSpec::Attenuator { env, .. } | ChannelSpec::Amplifier { env, .. } => env_even(env),
            ChannelSpec::ClassicalNoise { .. } => true,
            ChannelSpec::Composition(p) => p.iter().all(ChannelSpec::is_parity_covariant),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymplecticKind {
    Bs,
    Tm,
}

/// Heisenberg-picture action `R -> R T` on `R = (q0, p0, q1, p1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticMatrix {
    pub entries: Matrix4<f64>,
    pub kind: SymplecticKind,
    pub parameter: f64,
}

impl SymplecticMatrix {
    /// `max |T^T J T - J|` with `J` the standard two-mode symplectic form.
    pub fn symplectic_defect(&self) -> f64 {
        let j = symplectic_form();
        (self.entries.transpose() * j * self.entries - j).abs().max()
    }
}

pub fn symplectic_form() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 1.0, 0.0, 0.0, //
        -1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.0, -1.0, 0.0,
    )
}

/// Beamsplitter matrix of `U_BS(zeta)`, or the two-mode squeezing matrix with the sign layout
/// `(cosh, sinh; cosh, -sinh)`, which is the Heisenberg action of `U_TM(-r)`.
pub fn symplectic_matrix(kind: SymplecticKind, p: f64) -> SymplecticMatrix {
    let entries = match kind {
        SymplecticKind::Bs => {
            let (s, c) = p.sin_cos();
            Matrix4::new(
                c, 0.0, -s, 0.0, //
                0.0, c, 0.0, -s, //
                s, 0.0, c, 0.0, //
                0.0, s, 0.0, c,
            )
        }
        SymplecticKind::Tm => {
            let (s, c) = (p.sinh(), p.cosh());
            Matrix4::new(
                c, 0.0, s, 0.0, //
                0.0, c, 0.0, -s, //
                s, 0.0, c, 0.0, //
                0.0, -s, 0.0, c,
            )
        }
    };
    SymplecticMatrix { entries, kind, parameter: p }
}

fn two_mode_kind(spec: &ChannelSpec) -> Option<(TwoMode, &Environment)> {
    match spec {
        ChannelSpec::Attenuator { zeta, env } => Some((TwoMode::Beamsplitter(*zeta), env)),
        ChannelSpec::Amplifier { r, env } => Some((TwoMode::TwoModeSqueeze(*r), env)),
        _ => None,
    }
}

/// Output truncation of the amplifier: a geometric tail of the output mean below `1e-10`.
pub fn amplifier_output_dim(r: f64, n_in: usize, input_energy: f64, env_energy: f64) -> usize {
    let g2 = r.cosh().powi(2);
    let mean = g2 * input_energy + (g2 - 1.0) * (env_energy + 1.0);
    ((24.0 * (mean + 0.5)).ceil() as usize + 16).max(n_in)
}

const MAX_OUTPUT_DIM: usize = 1500;

/// Images `U(|n> (x) |env>)` of the beamsplitter for `n < n_in`, as `w x w` matrices.
fn beamsplitter_images(zeta: f64, env: &FockVector, n_in: usize) -> (Vec<CMat>, usize) {
    let w = n_in + env.n_trunc() - 1;
    let eng = TwoModeEngine::beamsplitter(zeta, w, w);
    let amps = env.amplitudes();
    let mut phi0 = CMat::zeros(w, w);
    eng.for_each_env_column(amps.len(), |m, col| {
        if amps[m].norm() > 0.0 {
            phi0 += col * amps[m];
        }
    });
    let mut out = Vec::with_capacity(n_in);
    out.push(phi0);
    for n in 1..n_in {
        let next = eng.create0(&out[n - 1]).unscale((n as f64).sqrt());
        out.push(next);
    }
    (out, w)
}

/// Operators `P_j[m, n] = <m, j| U |n, env>` for every environment outcome `j`.
fn dilation_ops(kind: TwoMode, env: &FockVector, n_in: usize, input_energy: f64) -> Result<Vec<CMat>> {
    match kind {
        TwoMode::Beamsplitter(z) => {
            let (images, w) = beamsplitter_images(z, env, n_in);
            Ok((0..w).map(|j| CMat::from_fn(w, n_in, |m, n| images[n][(m, j)])).collect())
        }
        TwoMode::TwoModeSqueeze(r) => {
            let n_e = env.n_trunc();
            let n_out = amplifier_output_dim(r, n_in, input_energy, env.mean_number());
            if n_out > MAX_OUTPUT_DIM {
                return Err(Error::TruncationRisk { what: "amplifier output", required: n_out as f64, n_trunc: MAX_OUTPUT_DIM });
            }
            let env_out = n_out + n_e;
            let amps = env.amplitudes();
            let mut ops = vec![CMat::zeros(n_out, n_in); env_out];
            crate::fock::tms_diagonals(r, n_in, n_e, n_out, |k, l, v| {
                let e = amps[l];
                if e.norm() == 0.0 {
                    return;
                }
                for (m, &x) in v.iter().enumerate() {
                    let j = m as i64 - k as i64 + l as i64;
                    if j >= 0 && (j as usize) < env_out {
                        ops[j as usize][(m, k)] += e * x;
                    }
                }
            });
            Ok(ops)
        }
    }
}

/// `sum_k P_k rho P_k^dagger` for operators stacked as `ops[k]`.
fn sandwich(ops: &[CMat], rho: &CMat) -> CMat {
    let n_out = ops.first().map_or(0, |k| k.nrows());
    let mut out = CMat::zeros(n_out, n_out);
    for k in ops {
        let t = linalg::cmatmul(k, rho);
        out += linalg::cmatmul_adj(&t, k);
    }
    out
}

fn trace_checked(m: CMat, what: &'static str) -> Result<DensityOperator> {
    let n = m.nrows();
    let rho = DensityOperator::new_unchecked(m, Shape::Single(n))?;
    let drift = (rho.trace() - 1.0).abs();
    if drift > 1e-6 {
        return Err(Error::Accuracy { what, achieved: drift, tolerance: 1e-6 });
    }
    Ok(rho)
}

/// `tr_E U (rho (x) |env><env|) U^dagger` through the Stinespring isometry.
pub fn apply_stinespring(spec: &ChannelSpec, rho: &DensityOperator) -> Result<DensityOperator> {
    let n_in = rho.single_dim()?;
    match spec {
        ChannelSpec::Composition(parts) => {
            let mut cur = rho.clone();
            for p in parts {
                cur = apply_stinespring(p, &cur)?;
            }
            Ok(cur)
        }
        ChannelSpec::ClassicalNoise { n } => classical_noise(*n, rho),
        ChannelSpec::Attenuator { zeta, .. } if *zeta == 0.0 => {
            spec.validate()?;
            Ok(rho.clone())
        }
        _ => {
            spec.validate()?;
            let (kind, env) = two_mode_kind(spec).expect("dilated variant");
            let env = env.fock()?;
            let dims = match kind {
                TwoMode::Beamsplitter(_) => {
                    let w = n_in + env.n_trunc() - 1;
                    (w, w)
                }
                TwoMode::TwoModeSqueeze(r) => {
                    let n_out = amplifier_output_dim(r, n_in, rho.mean_number()?, env.mean_number());
                    if n_out > MAX_OUTPUT_DIM {
                        return Err(Error::TruncationRisk { what: "amplifier output", required: n_out as f64, n_trunc: MAX_OUTPUT_DIM });
                    }
                    (n_out, n_out + env.n_trunc())
                }
            };
            let map = JointMap::new(kind, &env, n_in, dims.0);
            let (w, vs) = crate::fock::spectral_factors(rho.matrix());
            let mut out = CMat::zeros(dims.0, dims.0);
            for (wk, v) in w.iter().zip(&vs) {
                let m = map.image(v, dims);
                out += linalg::cmatmul_adj(&m, &m).scale(*wk);
            }
            trace_checked(out, "stinespring trace")
        }
    }
}

/// Precomputed images of `|n> (x) |env>` under a dilation unitary.
enum JointMap {
    Beamsplitter { images: Vec<CMat> },
    Squeezer { cols: Vec<Vec<Vec<f64>>>, env: CVec },
}

impl JointMap {
    /// `rows` bounds the mode-0 output index of the squeezer; the beamsplitter image is exact.
    fn new(kind: TwoMode, env: &FockVector, n_in: usize, rows: usize) -> Self {
        match kind {
            TwoMode::Beamsplitter(z) => JointMap::Beamsplitter { images: beamsplitter_images(z, env, n_in).0 },
            TwoMode::TwoModeSqueeze(r) => {
                let n_e = env.n_trunc();
                let mut cols = vec![Vec::with_capacity(n_e); n_in];
                crate::fock::tms_diagonals(r, n_in, n_e, rows, |k, _, v| cols[k].push(v.to_vec()));
                JointMap::Squeezer { cols, env: env.amplitudes().clone() }
            }
        }
    }

    /// `U (|psi> (x) |env>)` as a matrix indexed `(mode 0, mode 1)`, cropped to `dims`.
    fn image(&self, a: &CVec, dims: (usize, usize)) -> CMat {
        let mut m = CMat::zeros(dims.0, dims.1);
        match self {
            JointMap::Beamsplitter { images } => {
                for (img, &c) in images.iter().zip(a.iter()) {
                    if c.norm() == 0.0 {
                        continue;
                    }
                    for k in 0..dims.1.min(img.ncols()) {
                        for i in 0..dims.0.min(img.nrows()) {
                            m[(i, k)] += img[(i, k)] * c;
                        }
                    }
                }
            }
            JointMap::Squeezer { cols, env } => {
                for (k, col_k) in cols.iter().enumerate() {
                    for (l, v) in col_k.iter().enumerate() {
                        let c = a[k] * env[l];
                        if c.norm() == 0.0 {
                            continue;
                        }
                        for (i, &x) in v.iter().enumerate().take(dims.0) {
                            let j = i as i64 - k as i64 + l as i64;
                            if j >= 0 && (j as usize) < dims.1 {
                                m[(i, j as usize)] += c * x;
                            }
                        }
                    }
                }
            }
        }
        m
    }
}

/// Joint output `U (|psi> (x) |env>)` of a pure input, cropped to `dims`.
pub fn joint_output(kind: TwoMode, psi: &FockVector, env: &FockVector, dims: (usize, usize)) -> Result<FockVector> {
    let map = JointMap::new(kind, env, psi.n_trunc(), dims.0);
    Ok(FockVector::from_pair_matrix(&map.image(psi.amplitudes(), dims)))
}

/// Characteristic function of the channel output as a scaled product of closed forms.
///
/// The amplifier factor uses the environment function at `(-x sinh r, y sinh r)`, which is the
/// action of the generator `exp(r a0 a1 - r a0^dagger a1^dagger)`.
pub fn char_fn_output(spec: &ChannelSpec, input: CharFn) -> Result<CharFn> {
    spec.validate()?;
    Ok(match spec {
        ChannelSpec::Attenuator { zeta, .. } if *zeta == 0.0 => input,
        ChannelSpec::Attenuator { zeta, env } => {
            let (s, c) = zeta.sin_cos();
            CharFn::ScaledProduct(vec![(input, c, c), (env.char_fn(), s, s)])
        }
        ChannelSpec::Amplifier { r, env } => {
            let (s, c) = (r.sinh(), r.cosh());
            CharFn::ScaledProduct(vec![(input, c, c), (env.char_fn(), -s, s)])
        }
        ChannelSpec::ClassicalNoise { n } if *n == 0.0 => input,
        ChannelSpec::ClassicalNoise { n } => CharFn::ScaledProduct(vec![(input, 1.0, 1.0), (CharFn::noise(*n), 1.0, 1.0)]),
        ChannelSpec::Composition(parts) => {
            let mut cur = input;
            for p in parts {
                cur = char_fn_output(p, cur)?;
            }
            cur
        }
    })
}

/// Grid data of a Weyl inversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionReport {
    pub spacing: f64,
    pub extent: f64,
    pub points: usize,
    pub trace: f64,
}

/// Radius beyond which `|chi| < 1e-14` along 24 rays.
fn char_extent(chi: &CharFn) -> f64 {
    let mut last: f64 = 1.0;
    for a in 0..24 {
        let t = PI * a as f64 / 24.0;
        let (s, c) = t.sin_cos();
        let mut r = 0.0;
        let mut quiet = 0;
        while r < 80.0 && quiet < 12 {
            r += 0.25;
            if chi.abs(r * c, r * s) >= 1e-14 {
                last = last.max(r);
                quiet = 0;
            } else {
                quiet += 1;
            }
        }
    }
    last + 0.5
}

/// `rho = (1/2 pi) int chi(x, y) W(-x, -y) dx dy` on `n_out` levels by the trapezoid rule.
///
/// The spacing keeps the aliased copies of the Wigner-domain support apart; the grid stops where
/// `|chi| < 1e-14`.
pub fn reconstruct_density(chi: &CharFn, n_out: usize) -> Result<(DensityOperator, ReconstructionReport)> {
    if n_out < 1 {
        return Err(Error::Dimension("reconstruction needs at least one level".into()));
    }
    let band = 2.0 * (2.0 * n_out as f64 + 1.0).sqrt() + 10.0;
    let h = 2.0 * PI / band;
    let extent = char_extent(chi);
    let k = (extent / h).ceil() as i64;
    // half plane: x > 0, or x = 0 and y > 0; the mirror point contributes the adjoint
    let columns: Vec<i64> = (0..=k).collect();
    use rayon::prelude::*;
    let partial: Vec<CMat> = columns
        .par_iter()
        .map(|&i| {
            let mut acc = CMat::zeros(n_out, n_out);
            let x = i as f64 * h;
            let j0 = if i == 0 { 1 } else { -k };
            for j in j0..=k {
                let y = j as f64 * h;
                let c = chi.eval(x, y);
                if c.norm() < 1e-17 {
                    continue;
                }
                let d = displacement_elements(weyl_to_xi(x, y), n_out, n_out);
                // c * D^dagger
                for m in 0..n_out {
                    for n in 0..n_out {
                        acc[(m, n)] += c * d[(n, m)].conj();
                    }
                }
            }
            acc
        })
        .collect();
    let mut s = CMat::zeros(n_out, n_out);
    for p in partial {
        s += p;
    }
    let w = h * h / (2.0 * PI);
    let mut m = (&s + s.adjoint()).scale(w);
    let c0 = chi.eval(0.0, 0.0);
    for d in 0..n_out {
        m[(d, d)] += c0 * w;
    }
    let rho = DensityOperator::new_unchecked(m, Shape::Single(n_out))?;
    let trace = rho.trace();
    let points = (2 * k as usize + 1).pow(2);
    Ok((rho, ReconstructionReport { spacing: h, extent, points, trace }))
}

/// Output dimension covering a thermal tail of mean `n` below `1e-14`.
pub fn noise_output_dim(n_in: usize, n: f64) -> usize {
    let extra = if n > 0.0 { (32.3 / (1.0 + 1.0 / n).ln()).ceil() as usize } else { 0 };
    (n_in + extra + 4).min(400)
}

/// `Phi_N`: multiplies the characteristic function by `exp(-N (x^2 + y^2)/2)`.
pub fn classical_noise(n: f64, rho: &DensityOperator) -> Result<DensityOperator> {
    if !(n >= 0.0) || !n.is_finite() {
        return Err(Error::Domain(format!("classical noise must be >= 0, got {n}")));
    }
    rho.single_dim()?;
    if n == 0.0 {
        return Ok(rho.clone());
    }
    let chi = CharFn::ScaledProduct(vec![(CharFn::Density(rho.clone()), 1.0, 1.0), (CharFn::noise(n), 1.0, 1.0)]);
    let n_out = noise_output_dim(rho.n_trunc(), n + rho.mean_number()?);
    let (out, _) = reconstruct_density(&chi, n_out)?;
    trace_checked(out.into_matrix(), "classical noise trace")
}

/// Characteristic-function backend: composes closed forms and inverts onto `n_out` levels.
pub fn apply_char_fn(spec: &ChannelSpec, input: CharFn, n_out: usize) -> Result<DensityOperator> {
    let chi = char_fn_output(spec, input)?;
    Ok(reconstruct_density(&chi, n_out)?.0)
}

/// Discrete operator-sum representation on `n_in` input levels.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausFamily {
    pub ops: Vec<CMat>,
    pub n_in: usize,
    pub n_out: usize,
    /// `max |sum K^dagger K - I|` on input indices below `n_in / 2`.
    pub completeness_defect: f64,
}

impl KrausFamily {
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        let n = rho.single_dim()?;
        if n > self.n_in {
            return Err(Error::Dimension(format!("input has {n} levels, Kraus family accepts {}", self.n_in)));
        }
        let r = rho.resized(self.n_in)?;
        let m = sandwich(&self.ops, r.matrix());
        DensityOperator::new_unchecked(m, Shape::Single(self.n_out))
    }

    pub fn completeness(&self) -> CMat {
        let mut s = CMat::zeros(self.n_in, self.n_in);
        for k in &self.ops {
            s += k.adjoint() * k;
        }
        s
    }
}

fn completeness_defect(sum: &CMat, block: usize) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..block {
        for j in 0..block {
            let want = if i == j { 1.0 } else { 0.0 };
            m = m.max((sum[(i, j)] - C64::new(want, 0.0)).norm());
        }
    }
    m
}

/// Kraus operators `K_k[n', n] = sum_m <n', k|U|n, m> <m|env>` from the Fock matrix elements of `U`.
pub fn kraus_decomposition(spec: &ChannelSpec, n_trunc: usize) -> Result<KrausFamily> {
    spec.validate()?;
    let (kind, env) = two_mode_kind(spec)
        .ok_or_else(|| Error::Domain("Kraus decomposition needs an attenuator or amplifier".into()))?;
    if n_trunc < 1 {
        return Err(Error::Dimension("Kraus decomposition needs n_trunc >= 1".into()));
    }
    let mut ops = dilation_ops(kind, &env.fock()?, n_trunc, 0.5 * n_trunc as f64)?;
    // strongest outcomes first, stop once the retained family is complete to 1e-8
    let mut norms: Vec<(usize, f64)> = ops.iter().map(|k| k.norm_squared()).enumerate().collect();
    norms.sort_by(|a, b| b.1.total_cmp(&a.1));
    let block = (n_trunc / 2).max(1);
    let mut kept = Vec::new();
    let mut sum = CMat::zeros(n_trunc, n_trunc);
    for (idx, w) in norms {
        if w == 0.0 {
            break;
        }
        sum += ops[idx].adjoint() * &ops[idx];
        kept.push(std::mem::replace(&mut ops[idx], CMat::zeros(0, 0)));
        if completeness_defect(&sum, n_trunc) < 1e-8 {
            break;
        }
    }
    let defect = completeness_defect(&sum, block);
    if defect > 1e-6 {
        return Err(Error::TruncationRisk { what: "Kraus completeness", required: defect, n_trunc });
    }
    let n_out = kept.first().map_or(n_trunc, |k| k.nrows());
    Ok(KrausFamily { ops: kept, n_in: n_trunc, n_out, completeness_defect: defect })
}

/// `max |P Xi(rho) P - Xi(P rho P)|` with `P` the photon-number parity.
pub fn z2_covariance_check(spec: &ChannelSpec, rho: &DensityOperator) -> Result<f64> {
    let a = apply_stinespring(spec, rho)?.parity_conjugated()?;
    let b = apply_stinespring(spec, &rho.parity_conjugated()?)?;
    let n = a.n_trunc().max(b.n_trunc());
    Ok(linalg::max_abs(&(a.resized(n)?.matrix() - b.resized(n)?.matrix())))
}

/// Pads both operators to a common truncation.
pub fn common_dims(a: &DensityOperator, b: &DensityOperator) -> Result<(DensityOperator, DensityOperator)> {
    let n = a.n_trunc().max(b.n_trunc());
    Ok((a.resized(n)?, b.resized(n)?))
}
