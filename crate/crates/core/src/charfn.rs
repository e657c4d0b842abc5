//! Evaluable characteristic functions `chi(x, y) = tr(rho exp(i x q + i y p))`.

use crate::fock::{displacement_elements, weyl_to_xi, DensityOperator};
use crate::gaussian::GaussianPure;
use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq)]
pub enum CharFn {
    /// `exp(i k.mean - k.cov.k / 2)`.
    Gaussian { mean: Vector2<f64>, cov: Matrix2<f64> },
    /// Squeezed cat `S(w)(|gamma> + |-gamma>)` in closed form.
    Omega { gamma: f64, w: f64 },
    /// `prod_j f_j(sx_j x, sy_j y)`.
    ScaledProduct(Vec<(CharFn, f64, f64)>),
    /// Exact Weyl expectation of a truncated density operator.
    Density(DensityOperator),
}

impl CharFn {
    pub fn vacuum() -> Self {
        Self::gaussian_state(&GaussianPure::vacuum())
    }

    pub fn gaussian_state(g: &GaussianPure) -> Self {
        CharFn::Gaussian { mean: g.mean(), cov: g.covariance() }
    }

    /// Centered isotropic Gaussian `exp(-n (x^2 + y^2)/2)` of added classical noise `n`.
    pub fn noise(n: f64) -> Self {
        CharFn::Gaussian { mean: Vector2::zeros(), cov: Matrix2::identity() * n }
    }

    pub fn eval(&self, x: f64, y: f64) -> C64 {
        match self {
            CharFn::Gaussian { mean, cov } => {
                let k = Vector2::new(x, y);
                let quad = (k.transpose() * cov * k)[(0, 0)];
                C64::from_polar((-0.5 * quad).exp(), k.dot(mean))
            }
            CharFn::Omega { gamma, w } => C64::new(omega_value(*gamma, *w, x, y), 0.0),
            CharFn::ScaledProduct(parts) => parts
                .iter()
                .fold(C64::new(1.0, 0.0), |acc, (f, sx, sy)| acc * f.eval(sx * x, sy * y)),
            CharFn::Density(rho) => {
                let n = rho.n_trunc();
                let d = displacement_elements(weyl_to_xi(x, y), n, n);
                rho.expectation(&d).unwrap_or_default()
            }
        }
    }

    /// `|chi(x, y)|`.
    pub fn abs(&self, x: f64, y: f64) -> f64 {
        self.eval(x, y).norm()
    }

    /// Values on the tensor grid `xs x ys`, row index over `xs`.
    pub fn grid(&self, xs: &[f64], ys: &[f64]) -> Vec<Vec<C64>> {
        xs.par_iter().map(|&x| ys.iter().map(|&y| self.eval(x, y)).collect()).collect()
    }
}

/// Closed form of the squeezed-cat characteristic function; real valued.
pub fn omega_value(gamma: f64, w: f64, x: f64, y: f64) -> f64 {
    let (em, ep) = ((-w).exp(), w.exp());
    let g = -0.25 * (em * em * x * x + ep * ep * y * y);
    let g2 = 2.0 * gamma * gamma;
    let s = std::f64::consts::SQRT_2 * gamma;
    let u = s * ep * y;
    // e^{-2 gamma^2} cosh(u) e^{g} without overflowing either factor
    let hyper = 0.5 * ((u - g2 + g).exp() + (-u - g2 + g).exp());
    (g.exp() * (s * em * x).cos() + hyper) / (1.0 + (-g2).exp())
}
