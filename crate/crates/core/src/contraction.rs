//! Trace distances, Husimi functions, and the parity-covariance lower bound on the contraction
//! coefficient over energy-constrained diameters.

use crate::channels::{apply_stinespring, common_dims, ChannelSpec};
use crate::error::{Error, Result};
use crate::fock::{spectral_factors, DensityOperator};
use crate::gaussian::max_distant_pair;
use crate::linalg::{self, CVec};
use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::num::NonZeroUsize;

/// `||rho - sigma||_1`; operators on one mode are padded to a common truncation.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    let (a, b) = if rho.mode_count() == 1 && sigma.mode_count() == 1 {
        common_dims(rho, sigma)?
    } else if rho.shape() == sigma.shape() {
        (rho.clone(), sigma.clone())
    } else {
        return Err(Error::Dimension(format!("shapes {:?} and {:?} differ", rho.shape(), sigma.shape())));
    };
    let d = a.matrix() - b.matrix();
    let defect = linalg::hermiticity_defect(&d);
    if defect > 1e-8 {
        return Err(Error::Validity(format!("difference is not Hermitian: defect {defect:.3e}")));
    }
    Ok(linalg::hermitian_eigenvalues(&d).iter().map(|v| v.abs()).sum())
}

/// `Q(alpha) = <alpha|rho|alpha>`.
pub fn husimi_q(rho: &DensityOperator, alpha: C64) -> f64 {
    HusimiEvaluator::new(rho).q(alpha)
}

/// Husimi function of a fixed operator through its spectral factors, evaluating `Q(alpha)` and
/// `Q(-alpha)` together.
#[derive(Debug, Clone)]
pub struct HusimiEvaluator {
    weights: Vec<f64>,
    vectors: Vec<CVec>,
    n: usize,
}

impl HusimiEvaluator {
    pub fn new(rho: &DensityOperator) -> Self {
        let (weights, vectors) = spectral_factors(rho.matrix());
        Self { weights, vectors, n: rho.matrix().nrows() }
    }

    pub fn q(&self, alpha: C64) -> f64 {
        self.pair(alpha).0
    }

    /// `(Q(alpha), Q(-alpha))`.
    pub fn pair(&self, alpha: C64) -> (f64, f64) {
        // conjugated coherent coefficients, split by parity of the level
        let mut c = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
        let ac = alpha.conj();
        let mut coef = Vec::with_capacity(self.n);
        for k in 0..self.n {
            if k > 0 {
                c = c * ac / (k as f64).sqrt();
            }
            coef.push(c);
        }
        let (mut plus, mut minus) = (0.0, 0.0);
        for (w, v) in self.weights.iter().zip(&self.vectors) {
            let (mut even, mut odd) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
            for (k, (&ck, &vk)) in coef.iter().zip(v.iter()).enumerate() {
                if k % 2 == 0 {
                    even += ck * vk;
                } else {
                    odd += ck * vk;
                }
            }
            plus += w * (even + odd).norm_sqr();
            minus += w * (even - odd).norm_sqr();
        }
        (plus, minus)
    }

    /// `Q` at `r exp(2 pi i j / na)` for `j < na`, from one FFT per spectral factor.
    pub fn ring(&self, r: f64, na: usize, fft: &dyn Fft<f64>) -> Vec<f64> {
        // <alpha|v> = exp(-r^2/2) sum_k v_k r^k / sqrt(k!) exp(-i k theta)
        let mut scale = Vec::with_capacity(self.n);
        let mut c = (-0.5 * r * r).exp();
        for k in 0..self.n {
            if k > 0 {
                c *= r / (k as f64).sqrt();
            }
            scale.push(c);
        }
        let mut q = vec![0.0; na];
        let mut buf = vec![C64::new(0.0, 0.0); na];
        for (w, v) in self.weights.iter().zip(&self.vectors) {
            buf.iter_mut().for_each(|b| *b = C64::new(0.0, 0.0));
            for (k, (&sk, &vk)) in scale.iter().zip(v.iter()).enumerate() {
                buf[k % na] += vk * sk;
            }
            fft.process(&mut buf);
            for (qj, b) in q.iter_mut().zip(&buf) {
                *qj += w * b.norm_sqr();
            }
        }
        q
    }

    /// Smallest radius, on a 0.25 lattice, beyond which `Q < floor` on 64 directions.
    pub fn decay_radius(&self, floor: f64) -> f64 {
        let fft = FftPlanner::new().plan_fft_forward(64);
        let mut r: f64 = 0.5;
        let mut last_above = 0.0;
        while r < 60.0 {
            let peak = self.ring(r, 64, fft.as_ref()).into_iter().fold(0.0, f64::max);
            if peak >= floor {
                last_above = r;
            } else if r > last_above + 1.0 {
                break;
            }
            r += 0.25;
        }
        last_above + 0.25
    }
}

/// Polar rule on the disk: Gauss-Legendre in radius, uniform in angle, both doubled until the
/// integral changes by less than `tol`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarQuadrature {
    pub radial_nodes: usize,
    pub angular_nodes: usize,
    pub tol: f64,
    pub max_refinements: usize,
    /// Radius cut where `Q` falls below this value.
    pub q_floor: f64,
}

impl Default for PolarQuadrature {
    fn default() -> Self {
        Self { radial_nodes: 64, angular_nodes: 256, tol: 1e-6, max_refinements: 5, q_floor: 1e-14 }
    }
}

/// Value and convergence data of one plane integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneIntegral {
    pub value: f64,
    pub radius: f64,
    pub radial_nodes: usize,
    pub angular_nodes: usize,
    pub refinements: usize,
    /// Change of the last doubling.
    pub change: f64,
}

/// What is integrated over the plane, given the Husimi function on one ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingIntegrand {
    /// `Q(alpha)`.
    Density,
    /// `|Q(alpha) - Q(-alpha)|`.
    ParityAsymmetry,
}

impl PolarQuadrature {
    fn once(&self, h: &HusimiEvaluator, what: RingIntegrand, radius: f64, nr: usize, na: usize) -> f64 {
        let rule = GaussLegendre::new(NonZeroUsize::new(nr).expect("radial nodes > 0"));
        let fft = FftPlanner::new().plan_fft_forward(na);
        let dt = 2.0 * PI / na as f64;
        rule.as_node_weight_pairs()
            .par_iter()
            .map(|&(x, w)| {
                let r = 0.5 * radius * (x + 1.0);
                let q = h.ring(r, na, fft.as_ref());
                let ring: f64 = match what {
                    RingIntegrand::Density => q.iter().sum(),
                    RingIntegrand::ParityAsymmetry => (0..na).map(|j| (q[j] - q[(j + na / 2) % na]).abs()).sum(),
                };
                0.5 * radius * w * r * ring * dt
            })
            .sum()
    }

    /// `int f(alpha) d^2 alpha / pi` over `|alpha| <= radius`, with `f` built from `Q` of `h`.
    pub fn integrate(&self, h: &HusimiEvaluator, what: RingIntegrand, radius: f64) -> Result<PlaneIntegral> {
        let (mut nr, mut na) = (self.radial_nodes, self.angular_nodes);
        let mut prev = self.once(h, what, radius, nr, na) / PI;
        let mut change = f64::INFINITY;
        for k in 1..=self.max_refinements {
            nr *= 2;
            na *= 2;
            let cur = self.once(h, what, radius, nr, na) / PI;
            change = (cur - prev).abs();
            prev = cur;
            if change < self.tol {
                return Ok(PlaneIntegral { value: cur, radius, radial_nodes: nr, angular_nodes: na, refinements: k, change });
            }
        }
        Err(Error::Accuracy { what: "polar quadrature", achieved: change, tolerance: self.tol })
    }
}

/// `int Q_rho d^2 alpha / pi`, which equals the trace.
pub fn q_normalization(rho: &DensityOperator, quad: &PolarQuadrature) -> Result<PlaneIntegral> {
    let h = HusimiEvaluator::new(rho);
    quad.integrate(&h, RingIntegrand::Density, h.decay_radius(quad.q_floor))
}

/// Fock realizations of the pair `|(+-r_c, w)>` spanning a diameter at energy `e`.
pub fn diameter_pair(e: f64) -> Result<(DensityOperator, DensityOperator)> {
    let pair = max_distant_pair(e)?;
    let (g1, g2) = pair.members();
    let (v1, v2) = (g1.to_fock_auto()?, g2.to_fock_auto()?);
    let n = v1.n_trunc().max(v2.n_trunc());
    let (v1, v2) = (v1.resized(n)?, v2.resized(n)?);
    Ok((DensityOperator::from_pure(&v1), DensityOperator::from_pure(&v2)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionReport {
    pub e: f64,
    pub channel: ChannelSpec,
    /// `||rho_1 - rho_2||_1`.
    pub diameter_distance: f64,
    /// `int |Q(alpha) - Q(-alpha)| d^2 alpha / pi` of the image of `rho_1`.
    pub q_integral: f64,
    pub tau_lower: f64,
    /// `||Xi(rho_1) - Xi(rho_2)||_1`, with the second image obtained by parity conjugation.
    pub output_distance: f64,
    pub n_out: usize,
    pub quadrature: PlaneIntegral,
}

/// Heterodyne lower bound on the contraction coefficient of a parity-covariant channel.
pub fn tau_lower_bound(e: f64, spec: &ChannelSpec) -> Result<ContractionReport> {
    tau_lower_bound_with(e, spec, &PolarQuadrature::default())
}

pub fn tau_lower_bound_with(e: f64, spec: &ChannelSpec, quad: &PolarQuadrature) -> Result<ContractionReport> {
    if !(e > 0.0) || !e.is_finite() {
        return Err(Error::Domain(format!("diameter needs energy > 0, got {e}")));
    }
    spec.validate()?;
    if !spec.is_parity_covariant() {
        return Err(Error::Domain("channel is not parity covariant".into()));
    }
    let (rho1, rho2) = diameter_pair(e)?;
    let diameter_distance = trace_distance(&rho1, &rho2)?;
    let out1 = apply_stinespring(spec, &rho1)?;
    let out2 = out1.parity_conjugated()?;
    let output_distance = trace_distance(&out1, &out2)?;
    let h = HusimiEvaluator::new(&out1);
    let quadrature = quad.integrate(&h, RingIntegrand::ParityAsymmetry, h.decay_radius(quad.q_floor))?;
    let q_integral = quadrature.value;
    Ok(ContractionReport {
        e,
        channel: spec.clone(),
        diameter_distance,
        q_integral,
        tau_lower: q_integral / diameter_distance,
        output_distance,
        n_out: out1.n_trunc(),
        quadrature,
    })
}
