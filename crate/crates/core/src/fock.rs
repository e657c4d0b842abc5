//! Truncated Fock-space states and operators for one and two modes.
//!
//! Two-mode objects are stored row-major: mode 0 is the slow index.

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, RMat};
use num_complex::Complex64 as C64;

/// Default tail-mass tolerance of the adaptive truncation policy.
pub const TAIL_TOLERANCE: f64 = 1e-12;
/// Fraction of the top of the index range that must be (almost) empty.
pub const MARGIN_FRACTION: f64 = 0.25;
const MAX_WORKING_DIM: usize = 4096;

/// Mode structure of a truncated Fock space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Single(usize),
    Pair(usize, usize),
}

impl Shape {
    pub fn dim(&self) -> usize {
        match *self {
            Shape::Single(n) => n,
            Shape::Pair(n0, n1) => n0 * n1,
        }
    }

    pub fn mode_count(&self) -> usize {
        match self {
            Shape::Single(_) => 1,
            Shape::Pair(..) => 2,
        }
    }
}

/// Whether heuristic truncation guards are enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Guard {
    #[default]
    Enforce,
    Override,
}

fn check_guard(guard: Guard, what: &'static str, required: f64, n_trunc: usize) -> Result<()> {
    if guard == Guard::Enforce && required >= n_trunc as f64 {
        return Err(Error::TruncationRisk { what, required, n_trunc });
    }
    Ok(())
}

/// Number of indices in the top margin of a range of length `n`.
pub fn margin_len(n: usize) -> usize {
    ((n as f64) * MARGIN_FRACTION).ceil() as usize
}

/// A pure state on a truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amps: CVec,
    shape: Shape,
}

impl FockVector {
    pub fn new(amps: CVec) -> Self {
        let n = amps.len();
        Self { amps, shape: Shape::Single(n) }
    }

    pub fn from_real(amps: &[f64]) -> Self {
        Self::new(CVec::from_iterator(amps.len(), amps.iter().map(|&a| C64::new(a, 0.0))))
    }

    /// Two-mode vector with entries `amps[n0 * dims.1 + n1]`.
    pub fn pair(amps: CVec, dims: (usize, usize)) -> Result<Self> {
        if amps.len() != dims.0 * dims.1 {
            return Err(Error::Dimension(format!(
                "{} amplitudes do not fit a {}x{} two-mode space",
                amps.len(),
                dims.0,
                dims.1
            )));
        }
        Ok(Self { amps, shape: Shape::Pair(dims.0, dims.1) })
    }

    /// Fock state |k> in a space of `n` levels.
    pub fn basis(n: usize, k: usize) -> Result<Self> {
        if k >= n {
            return Err(Error::Dimension(format!("level {k} outside truncation {n}")));
        }
        let mut v = CVec::zeros(n);
        v[k] = C64::new(1.0, 0.0);
        Ok(Self::new(v))
    }

    pub fn vacuum(n: usize) -> Self {
        Self::basis(n.max(1), 0).expect("level 0 always fits")
    }

    /// Product state |a> (x) |b>.
    pub fn tensor(&self, other: &FockVector) -> Result<Self> {
        let (na, nb) = (self.single_dim()?, other.single_dim()?);
        let mut v = CVec::zeros(na * nb);
        for i in 0..na {
            for k in 0..nb {
                v[i * nb + k] = self.amps[i] * other.amps[k];
            }
        }
        Self::pair(v, (na, nb))
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amps
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn mode_count(&self) -> usize {
        self.shape.mode_count()
    }

    /// Truncation of a single-mode vector, or the total dimension of a pair.
    pub fn n_trunc(&self) -> usize {
        self.shape.dim()
    }

    fn single_dim(&self) -> Result<usize> {
        match self.shape {
            Shape::Single(n) => Ok(n),
            Shape::Pair(..) => Err(Error::Dimension("expected a single-mode vector".into())),
        }
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > 1e-300) {
            return Err(Error::Degenerate(n));
        }
        Ok(Self { amps: self.amps.unscale(n), shape: self.shape })
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &FockVector) -> Result<C64> {
        if self.shape != other.shape {
            return Err(Error::Dimension("inner product of vectors with different shapes".into()));
        }
        Ok(self.amps.dotc(&other.amps))
    }

    /// Probability mass on the top `MARGIN_FRACTION` of a single-mode index range.
    pub fn tail_mass(&self) -> f64 {
        let n = self.amps.len();
        let m = margin_len(n);
        self.amps.iter().skip(n - m).map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `<a^dagger a>` of a single-mode vector.
    pub fn mean_number(&self) -> f64 {
        self.amps.iter().enumerate().map(|(n, a)| n as f64 * a.norm_sqr()).sum::<f64>() / self.amps.norm_squared()
    }

    /// Pads with zeros or crops to `n` levels.
    pub fn resized(&self, n: usize) -> Result<Self> {
        let m = self.single_dim()?;
        let mut v = CVec::zeros(n);
        for k in 0..m.min(n) {
            v[k] = self.amps[k];
        }
        Ok(Self::new(v))
    }

    /// Image under the parity operator `exp(i pi n)`.
    pub fn parity_flipped(&self) -> Result<Self> {
        self.single_dim()?;
        let v = CVec::from_iterator(
            self.amps.len(),
            self.amps.iter().enumerate().map(|(k, &a)| if k % 2 == 1 { -a } else { a }),
        );
        Ok(Self::new(v))
    }

    /// Two-mode amplitudes as a `dims.0 x dims.1` matrix.
    pub fn as_pair_matrix(&self) -> Result<CMat> {
        match self.shape {
            Shape::Pair(n0, n1) => Ok(CMat::from_fn(n0, n1, |i, k| self.amps[i * n1 + k])),
            Shape::Single(_) => Err(Error::Dimension("expected a two-mode vector".into())),
        }
    }

    pub(crate) fn from_pair_matrix(m: &CMat) -> Self {
        let (n0, n1) = m.shape();
        let v = CVec::from_fn(n0 * n1, |idx, _| m[(idx / n1, idx % n1)]);
        Self { amps: v, shape: Shape::Pair(n0, n1) }
    }
}

/// Smallest length whose discarded tail carries less than `tol` probability.
pub fn support_len(amps: &CVec, tol: f64) -> usize {
    let mut tail = 0.0;
    for k in (0..amps.len()).rev() {
        tail += amps[k].norm_sqr();
        if tail >= tol {
            return k + 1;
        }
    }
    1
}

/// Truncation that keeps `support` levels inside the index margin.
pub fn padded_truncation(support: usize) -> usize {
    ((support as f64) / (1.0 - MARGIN_FRACTION)).ceil() as usize + 1
}

/// Builds a vector on growing working spaces until truncation effects are certified small.
///
/// Returns the vector cropped to the policy truncation together with the working dimension.
pub(crate) fn adaptive_vector<F>(start: usize, what: &'static str, build: F) -> Result<(CVec, usize)>
where
    F: Fn(usize) -> Result<CVec>,
{
    let mut n = start.max(16);
    loop {
        if n > MAX_WORKING_DIM {
            return Err(Error::TruncationRisk { what, required: n as f64, n_trunc: MAX_WORKING_DIM });
        }
        let v = build(n)?;
        let top = margin_len(n);
        let tail: f64 = v.iter().skip(n - top).map(|a| a.norm_sqr()).sum();
        if tail > TAIL_TOLERANCE {
            n = n * 3 / 2;
            continue;
        }
        let n2 = n + n / 4;
        let v2 = build(n2)?;
        let drift = (0..n).map(|k| (v[k] - v2[k]).norm()).fold(0.0, f64::max);
        if drift > 1e-10 {
            n = n2;
            continue;
        }
        let keep = padded_truncation(support_len(&v2, TAIL_TOLERANCE)).min(n2);
        let mut out = CVec::zeros(keep);
        out.copy_from(&v2.rows(0, keep));
        return Ok((out, n2));
    }
}

/// A density operator on a truncated one- or two-mode Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    m: CMat,
    shape: Shape,
}

impl DensityOperator {
    /// Validates the Hermiticity, trace and positivity invariants.
    pub fn new(m: CMat, shape: Shape) -> Result<Self> {
        let rho = Self::new_unchecked(m, shape)?;
        rho.validate()?;
        Ok(rho)
    }

    pub fn new_unchecked(m: CMat, shape: Shape) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() != shape.dim() {
            return Err(Error::Dimension(format!(
                "{}x{} matrix does not match shape {:?}",
                m.nrows(),
                m.ncols(),
                shape
            )));
        }
        Ok(Self { m, shape })
    }

    pub fn single(m: CMat) -> Result<Self> {
        let n = m.nrows();
        Self::new(m, Shape::Single(n))
    }

    pub fn from_pure(psi: &FockVector) -> Self {
        let a = psi.amplitudes();
        Self { m: a * a.adjoint(), shape: psi.shape() }
    }

    /// Diagonal state with the given populations.
    pub fn diagonal(p: &[f64]) -> Result<Self> {
        let mut m = CMat::zeros(p.len(), p.len());
        for (k, &x) in p.iter().enumerate() {
            m[(k, k)] = C64::new(x, 0.0);
        }
        Self::single(m)
    }

    pub fn validate(&self) -> Result<()> {
        let h = linalg::hermiticity_defect(&self.m);
        if h > 1e-10 {
            return Err(Error::Validity(format!("non-Hermitian density operator (defect {h:.2e})")));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > 1e-8 {
            return Err(Error::Validity(format!("trace {tr} differs from 1")));
        }
        let lo = self.min_eigenvalue();
        if lo < -1e-8 {
            return Err(Error::Validity(format!("negative eigenvalue {lo:.2e}")));
        }
        Ok(())
    }

    pub fn matrix(&self) -> &CMat {
        &self.m
    }

    pub fn into_matrix(self) -> CMat {
        self.m
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn mode_count(&self) -> usize {
        self.shape.mode_count()
    }

    pub fn n_trunc(&self) -> usize {
        self.shape.dim()
    }

    pub(crate) fn single_dim(&self) -> Result<usize> {
        match self.shape {
            Shape::Single(n) => Ok(n),
            Shape::Pair(..) => Err(Error::Dimension("expected a single-mode operator".into())),
        }
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.m).re
    }

    /// `tr rho^2`.
    pub fn purity(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.m)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// `tr(rho A)`.
    pub fn expectation(&self, a: &CMat) -> Result<C64> {
        if a.shape() != self.m.shape() {
            return Err(Error::Dimension("observable does not match the density operator".into()));
        }
        let mut s = C64::new(0.0, 0.0);
        for i in 0..self.m.nrows() {
            for j in 0..self.m.ncols() {
                s += self.m[(i, j)] * a[(j, i)];
            }
        }
        Ok(s)
    }

    pub fn mean_number(&self) -> Result<f64> {
        let n = self.single_dim()?;
        Ok((0..n).map(|k| k as f64 * self.m[(k, k)].re).sum())
    }

    pub fn populations(&self) -> Vec<f64> {
        self.m.diagonal().iter().map(|z| z.re).collect()
    }

    /// `exp(i pi n) rho exp(-i pi n)` for a single mode.
    pub fn parity_conjugated(&self) -> Result<Self> {
        self.single_dim()?;
        let m = CMat::from_fn(self.m.nrows(), self.m.ncols(), |i, j| {
            if (i + j) % 2 == 1 {
                -self.m[(i, j)]
            } else {
                self.m[(i, j)]
            }
        });
        Ok(Self { m, shape: self.shape })
    }

    /// Pads with zeros or crops to `n` levels.
    pub fn resized(&self, n: usize) -> Result<Self> {
        let m0 = self.single_dim()?;
        let k = m0.min(n);
        let mut m = CMat::zeros(n, n);
        m.view_mut((0, 0), (k, k)).copy_from(&self.m.view((0, 0), (k, k)));
        Ok(Self { m, shape: Shape::Single(n) })
    }

    pub fn tensor(&self, other: &DensityOperator) -> Result<Self> {
        let (na, nb) = (self.single_dim()?, other.single_dim()?);
        Ok(Self { m: self.m.kronecker(&other.m), shape: Shape::Pair(na, nb) })
    }

    /// Hermitian part divided by its trace.
    pub fn renormalized(&self) -> Result<Self> {
        let tr = self.trace();
        if !(tr > 1e-300) {
            return Err(Error::Degenerate(tr));
        }
        let h = (&self.m + self.m.adjoint()).scale(0.5 / tr);
        Ok(Self { m: h, shape: self.shape })
    }
}

/// Lowering, raising and number operators on `n_trunc` levels.
pub fn ladder_matrices(n_trunc: usize) -> Result<(CMat, CMat, CMat)> {
    if n_trunc < 2 {
        return Err(Error::Dimension(format!("ladder operators need n_trunc >= 2, got {n_trunc}")));
    }
    let mut a = CMat::zeros(n_trunc, n_trunc);
    for n in 1..n_trunc {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    let ad = a.adjoint();
    let num = CMat::from_diagonal(&CVec::from_fn(n_trunc, |k, _| C64::new(k as f64, 0.0)));
    Ok((a, ad, num))
}

/// Quadratures `q = (a + a^dagger)/sqrt 2` and `p = i(a^dagger - a)/sqrt 2`.
pub fn quadratures(n_trunc: usize) -> Result<(CMat, CMat)> {
    let (a, ad, _) = ladder_matrices(n_trunc)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let q = (&a + &ad).scale(s);
    let p = (&ad - &a) * C64::new(0.0, s);
    Ok((q, p))
}

fn real_lowering(n: usize) -> RMat {
    let mut a = RMat::zeros(n, n);
    for k in 1..n {
        a[(k - 1, k)] = (k as f64).sqrt();
    }
    a
}

/// `D(alpha) = exp(alpha a^dagger - conj(alpha) a)` on the truncated space.
pub fn displacement(alpha: C64, n_trunc: usize, guard: Guard) -> Result<CMat> {
    if n_trunc < 2 {
        return Err(Error::Dimension(format!("displacement needs n_trunc >= 2, got {n_trunc}")));
    }
    let r = alpha.norm();
    check_guard(guard, "displacement", r * r + 6.0 * r, n_trunc)?;
    let a = real_lowering(n_trunc);
    let ad = a.transpose();
    let g = CMat::from_fn(n_trunc, n_trunc, |i, j| alpha * ad[(i, j)] - alpha.conj() * a[(i, j)]);
    Ok(linalg::expm(&g))
}

/// `S(z) = exp((conj(z) a^2 - z a^dagger^2)/2)` on the truncated space.
pub fn squeeze(z: C64, n_trunc: usize, guard: Guard) -> Result<CMat> {
    if n_trunc < 2 {
        return Err(Error::Dimension(format!("squeeze needs n_trunc >= 2, got {n_trunc}")));
    }
    check_guard(guard, "squeeze", 4.0 * (2.0 * z.norm()).exp(), n_trunc)?;
    let a = real_lowering(n_trunc);
    let a2 = &a * &a;
    let ad2 = a2.transpose();
    let g = CMat::from_fn(n_trunc, n_trunc, |i, j| 0.5 * (z.conj() * a2[(i, j)] - z * ad2[(i, j)]));
    Ok(linalg::expm(&g))
}

/// Exact coherent-state amplitudes `exp(-|alpha|^2/2) alpha^n / sqrt(n!)` for `n < n`.
pub fn coherent_vector(alpha: C64, n: usize) -> CVec {
    let mut v = CVec::zeros(n);
    if n == 0 {
        return v;
    }
    v[0] = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for k in 1..n {
        v[k] = v[k - 1] * alpha / (k as f64).sqrt();
    }
    v
}

/// Exact matrix elements `<m|D(xi)|n>` for `m < rows`, `n < cols`.
///
/// Uses `D(xi)|n> = (a^dagger - conj(xi)) D(xi)|n-1> / sqrt(n)` starting from a coherent column.
pub fn displacement_elements(xi: C64, rows: usize, cols: usize) -> CMat {
    let mut d = CMat::zeros(rows, cols);
    if rows == 0 || cols == 0 {
        return d;
    }
    let x = xi.norm_sqr();
    let phase = if x > 0.0 { xi / x.sqrt() } else { C64::new(1.0, 0.0) };
    let back = -phase.conj();
    let mut f = Vec::with_capacity(rows.max(cols));
    // diagonals m - n = +a use phase^a, n - m = a use (-conj phase)^a, magnitudes shared
    for a in 0..rows.max(cols) {
        let len = if a < rows { (rows - a).min(cols) } else { 0 }.max(if a < cols { (cols - a).min(rows) } else { 0 });
        scaled_laguerre(a, x, len, &mut f);
        let (pa, ba) = (phase.powu(a as u32), back.powu(a as u32));
        for (k, &v) in f.iter().enumerate() {
            if k + a < rows && k < cols {
                d[(k + a, k)] = pa * v;
            }
            if a > 0 && k < rows && k + a < cols {
                d[(k, k + a)] = ba * v;
            }
        }
    }
    d
}

/// `f_k = sqrt(k!/(k+a)!) x^{a/2} e^{-x/2} L_k^{(a)}(x)` for `k < len`, by the forward recurrence
/// in `k`, which runs from the forbidden region into the oscillatory one.
fn scaled_laguerre(a: usize, x: f64, len: usize, f: &mut Vec<f64>) {
    f.clear();
    if len == 0 {
        return;
    }
    let af = a as f64;
    let ln0 = if a == 0 { -0.5 * x } else if x > 0.0 { 0.5 * af * x.ln() - 0.5 * x - 0.5 * ln_factorial(a) } else { f64::NEG_INFINITY };
    f.push(ln0.exp());
    if len > 1 {
        f.push((1.0 + af - x) * f[0] / (1.0 + af).sqrt());
    }
    for k in 1..len.saturating_sub(1) {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + af - x) * f[k] - (kf * (kf + af)).sqrt() * f[k - 1]) / ((kf + 1.0) * (kf + 1.0 + af)).sqrt();
        f.push(next);
    }
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Weyl-operator argument: `exp(i x q + i y p) = D(xi)` with `xi = (-y + i x)/sqrt 2`.
pub fn weyl_to_xi(x: f64, y: f64) -> C64 {
    C64::new(-y, x) * std::f64::consts::FRAC_1_SQRT_2
}

/// Two-mode Gaussian unitaries with the generators used throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TwoMode {
    /// `exp(zeta (a0^dagger a1 - a0 a1^dagger))`, real `zeta`.
    Beamsplitter(f64),
    /// `exp(r (a0 a1 - a0^dagger a1^dagger))`.
    TwoModeSqueeze(f64),
}

/// Column-recurrence evaluation of the beamsplitter on product Fock states.
///
/// States are `w0 x w1` matrices. Images are exact when both working dimensions cover the total
/// photon number, which the beamsplitter conserves.
#[derive(Debug, Clone)]
pub(crate) struct TwoModeEngine {
    zeta: f64,
    w0: usize,
    w1: usize,
}

impl TwoModeEngine {
    pub fn beamsplitter(zeta: f64, w0: usize, w1: usize) -> Self {
        Self { zeta, w0, w1 }
    }

    fn zero(&self) -> CMat {
        CMat::zeros(self.w0, self.w1)
    }

    fn raise0(&self, a: &CMat, c: f64, out: &mut CMat) {
        for i in 1..self.w0 {
            let s = c * (i as f64).sqrt();
            for k in 0..self.w1 {
                out[(i, k)] += a[(i - 1, k)] * s;
            }
        }
    }

    fn raise1(&self, a: &CMat, c: f64, out: &mut CMat) {
        for k in 1..self.w1 {
            let s = c * (k as f64).sqrt();
            for i in 0..self.w0 {
                out[(i, k)] += a[(i, k - 1)] * s;
            }
        }
    }

    /// `U a0^dagger U^dagger = cos a0^dagger - sin a1^dagger` applied to `a`.
    pub fn create0(&self, a: &CMat) -> CMat {
        let mut out = self.zero();
        self.raise0(a, self.zeta.cos(), &mut out);
        self.raise1(a, -self.zeta.sin(), &mut out);
        out
    }

    /// `U a1^dagger U^dagger = cos a1^dagger + sin a0^dagger` applied to `a`.
    pub fn create1(&self, a: &CMat) -> CMat {
        let mut out = self.zero();
        self.raise1(a, self.zeta.cos(), &mut out);
        self.raise0(a, self.zeta.sin(), &mut out);
        out
    }

    /// `U|0,m>` for `m = 0..count`, fed to `visit` in order.
    pub fn for_each_env_column(&self, count: usize, mut visit: impl FnMut(usize, &CMat)) {
        let mut col = self.zero();
        col[(0, 0)] = C64::new(1.0, 0.0);
        for m in 0..count {
            if m > 0 {
                col = self.create1(&col).unscale((m as f64).sqrt());
            }
            visit(m, &col);
        }
    }
}

/// Matrix elements `<m, m - k + l| U_TM(r) |k, l>` for `k < n0`, `l < n1`, `m < rows`, visited as
/// `(k, l, values indexed by m)`; entries with a negative second index are zero.
///
/// The squeezer conserves `n0 - n1`, so every input column lives on one diagonal and is the
/// eigenvector of the Jacobi matrix `U n0 U^dagger` on that diagonal with eigenvalue `k`. It is
/// built by a forward recurrence from the first element up to the output mean and a backward
/// recurrence from far in the tail, matched there, normalized, and signed so that the first
/// element is positive as in the closed form `<d, 0|U|d + l, l> > 0`.
pub(crate) fn tms_diagonals(r: f64, n0: usize, n1: usize, rows: usize, mut visit: impl FnMut(usize, usize, &[f64])) {
    if n0 == 0 || n1 == 0 || rows == 0 {
        return;
    }
    let mut buf = Vec::new();
    for l in 0..n1 {
        for k in 0..n0 {
            tms_column(r, k, l, &mut buf);
            let mut v = vec![0.0; rows];
            let len = rows.min(buf.len());
            v[..len].copy_from_slice(&buf[..len]);
            visit(k, l, &v);
        }
    }
}

/// Column `U_TM(r) |k, l>` indexed by the mode-0 output number, long enough that the dropped
/// tail is below rounding.
fn tms_column(r: f64, k: usize, l: usize, out: &mut Vec<f64>) {
    out.clear();
    let d = k as i64 - l as i64;
    let m0 = d.max(0) as usize;
    if r == 0.0 {
        out.resize(k + 1, 0.0);
        out[k] = 1.0;
        return;
    }
    let (ch, sh) = (r.cosh(), r.sinh());
    let (c2, s2, cs) = (ch * ch, sh * sh, ch * sh);
    let mean = c2 * k as f64 + s2 * (l as f64 + 1.0);
    // beyond a few spreads the column decays like tanh(r)^m
    let spread = cs * (2.0 * (k * l) as f64 + (k + l) as f64 + 1.0).sqrt();
    let tail = 90.0 / (-2.0 * r.tanh().ln());
    let len = (mean + 12.0 * spread + tail).ceil() as usize + m0 + 8;
    out.resize(len, 0.0);
    let n_of = |m: usize| (m as i64 - d) as f64;
    // row m of (T - k) c = 0 couples c[m - 1], c[m], c[m + 1]
    let diag = |m: usize| c2 * m as f64 + s2 * (n_of(m) + 1.0) - k as f64;
    let low = |m: usize| cs * (m as f64 * n_of(m)).sqrt();
    let up = |m: usize| cs * ((m as f64 + 1.0) * (n_of(m) + 1.0)).sqrt();
    let mid = (mean.round() as usize).clamp(m0, len - 3);

    out[m0] = 1.0;
    for m in m0..=mid {
        let prev = if m > m0 { out[m - 1] } else { 0.0 };
        out[m + 1] = -(diag(m) * out[m] + low(m) * prev) / up(m);
        if out[m + 1].abs() > 1e200 {
            for x in &mut out[m0..=m + 1] {
                *x *= 1e-200;
            }
        }
    }
    let (f0, f1) = (out[mid], out[mid + 1]);

    let mut back = vec![0.0; len + 1];
    back[len - 1] = 1.0;
    for m in (mid + 1..len).rev() {
        // row m solved for c[m - 1]
        back[m - 1] = -(diag(m) * back[m] + up(m) * back[m + 1]) / low(m);
        if back[m - 1].abs() > 1e200 {
            for x in &mut back[m - 1..len] {
                *x *= 1e-200;
            }
        }
    }
    let big = back[mid].abs().max(back[mid + 1].abs());
    let (b0, b1) = (back[mid] / big, back[mid + 1] / big);
    let scale = (f0 * b0 + f1 * b1) / (b0 * b0 + b1 * b1) / big;
    for m in mid + 2..len {
        out[m] = scale * back[m];
    }
    let norm = out.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in out.iter_mut() {
        *x /= norm;
    }
}

/// Dense two-mode unitary on `n_trunc^2` levels, cropped from the exact column images.
pub fn two_mode_unitary(kind: TwoMode, n_trunc: usize, guard: Guard) -> Result<CMat> {
    if n_trunc < 2 {
        return Err(Error::Dimension(format!("two-mode unitary needs n_trunc >= 2, got {n_trunc}")));
    }
    let n = n_trunc;
    let mut u = CMat::zeros(n * n, n * n);
    match kind {
        TwoMode::Beamsplitter(z) => {
            let w = 2 * n - 1;
            let eng = TwoModeEngine::beamsplitter(z, w, w);
            eng.for_each_env_column(n, |m, base| {
                let mut col = base.clone();
                for k in 0..n {
                    if k > 0 {
                        col = eng.create0(&col).unscale((k as f64).sqrt());
                    }
                    for i in 0..n {
                        for j in 0..n {
                            u[(i * n + j, k * n + m)] = col[(i, j)];
                        }
                    }
                }
            });
        }
        TwoMode::TwoModeSqueeze(r) => {
            check_guard(guard, "two_mode_squeeze", 8.0 * r.cosh().powi(2), n)?;
            tms_diagonals(r, n, n, n, |k, l, v| {
                for (i, &x) in v.iter().enumerate() {
                    let j = i as i64 - k as i64 + l as i64;
                    if (0..n as i64).contains(&j) {
                        u[(i * n + j as usize, k * n + l)] = C64::new(x, 0.0);
                    }
                }
            });
        }
    }
    Ok(u)
}

/// Applies a two-mode unitary to a two-mode vector through the dense matrix.
pub fn apply_two_mode(u: &CMat, psi: &FockVector) -> Result<FockVector> {
    if u.ncols() != psi.n_trunc() {
        return Err(Error::Dimension("unitary does not match the two-mode vector".into()));
    }
    let out = u * psi.amplitudes();
    match psi.shape() {
        Shape::Pair(n0, n1) => FockVector::pair(out, (n0, n1)),
        Shape::Single(_) => Err(Error::Dimension("expected a two-mode vector".into())),
    }
}

/// Reduced state of mode `keep` (0 or 1).
pub fn partial_trace(rho: &DensityOperator, keep: usize) -> Result<DensityOperator> {
    let (n0, n1) = match rho.shape() {
        Shape::Pair(n0, n1) => (n0, n1),
        Shape::Single(_) => return Err(Error::Dimension("partial trace needs a two-mode operator".into())),
    };
    let m = rho.matrix();
    let out = match keep {
        0 => CMat::from_fn(n0, n0, |i, j| (0..n1).map(|k| m[(i * n1 + k, j * n1 + k)]).sum()),
        1 => CMat::from_fn(n1, n1, |i, j| (0..n0).map(|k| m[(k * n1 + i, k * n1 + j)]).sum()),
        _ => return Err(Error::Dimension(format!("mode index {keep} out of range"))),
    };
    let n = out.nrows();
    DensityOperator::new_unchecked(out, Shape::Single(n))
}

/// Reduced state of mode `keep` of a pure two-mode vector.
pub fn reduced_pure(psi: &FockVector, keep: usize) -> Result<DensityOperator> {
    let a = psi.as_pair_matrix()?;
    let m = match keep {
        0 => linalg::cmatmul_adj(&a, &a),
        1 => {
            let t = a.transpose();
            linalg::cmatmul_adj(&t, &t)
        }
        _ => return Err(Error::Dimension(format!("mode index {keep} out of range"))),
    };
    let n = m.nrows();
    DensityOperator::new_unchecked(m, Shape::Single(n))
}

/// `tr(rho exp(i x q + i y p))` by exponentiating the truncated quadrature generator.
pub fn char_fn_numeric(rho: &DensityOperator, x: f64, y: f64) -> Result<C64> {
    NumericCharFn::new(rho)?.eval(x, y)
}

/// Reusable spectral data for repeated truncated-generator characteristic-function evaluations.
///
/// `exp(i x q + i y p) = R(t) exp(i s q) R(t)^dagger` with `R(t) = exp(i t n)`, `x + i y = s e^{i t}`.
#[derive(Debug, Clone)]
pub struct NumericCharFn {
    q_vals: Vec<f64>,
    q_vecs: RMat,
    weights: Vec<f64>,
    vectors: Vec<CVec>,
}

impl NumericCharFn {
    pub fn new(rho: &DensityOperator) -> Result<Self> {
        let n = rho.single_dim()?;
        if n < 2 {
            return Err(Error::Dimension("characteristic function needs n_trunc >= 2".into()));
        }
        let (weights, vectors) = spectral_factors(rho.matrix());
        let (q_vals, q_vecs) = q_spectrum(n);
        Ok(Self { q_vals, q_vecs, weights, vectors })
    }

    pub fn from_pure(psi: &FockVector) -> Result<Self> {
        let n = psi.single_dim()?;
        let (q_vals, q_vecs) = q_spectrum(n);
        Ok(Self { q_vals, q_vecs, weights: vec![1.0], vectors: vec![psi.amplitudes().clone()] })
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<C64> {
        let s = x.hypot(y);
        let t = y.atan2(x);
        let n = self.q_vals.len();
        let phases: Vec<C64> = (0..n).map(|k| C64::from_polar(1.0, -t * k as f64)).collect();
        let exps: Vec<C64> = self.q_vals.iter().map(|&l| C64::from_polar(1.0, s * l)).collect();
        let mut total = C64::new(0.0, 0.0);
        for (w, v) in self.weights.iter().zip(&self.vectors) {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                let col = self.q_vecs.column(k);
                let mut c = C64::new(0.0, 0.0);
                for m in 0..n {
                    c += phases[m] * v[m] * col[m];
                }
                acc += exps[k] * c.norm_sqr();
            }
            total += acc * *w;
        }
        Ok(total)
    }
}

fn q_spectrum(n: usize) -> (Vec<f64>, RMat) {
    let mut q = RMat::zeros(n, n);
    for k in 1..n {
        let v = (k as f64 / 2.0).sqrt();
        q[(k - 1, k)] = v;
        q[(k, k - 1)] = v;
    }
    linalg::real_symmetric_eigh(q)
}

/// `rho = sum_j w_j v_j v_j^dagger` dropping numerically null components.
pub(crate) fn spectral_factors(m: &CMat) -> (Vec<f64>, Vec<CVec>) {
    let h = (m + m.adjoint()).scale(0.5);
    let eig = linalg::shifted_eigen(h);
    let mut w = Vec::new();
    let mut vs = Vec::new();
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        if l.abs() > 1e-15 {
            w.push(l);
            vs.push(eig.eigenvectors.column(k).into_owned());
        }
    }
    (w, vs)
}
