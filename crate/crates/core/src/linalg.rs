//! Dense complex helpers built on real `nalgebra` kernels.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;
pub type RMat = DMatrix<f64>;

pub fn split(a: &CMat) -> (RMat, RMat) {
    (a.map(|z| z.re), a.map(|z| z.im))
}

pub fn join(re: &RMat, im: &RMat) -> CMat {
    re.zip_map(im, C64::new)
}

/// Complex product through four real gemm calls, much faster than the generic complex kernel.
pub fn cmatmul(a: &CMat, b: &CMat) -> CMat {
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    let re = &ar * &br - &ai * &bi;
    let im = &ar * &bi + &ai * &br;
    join(&re, &im)
}

/// `a * b^dagger`.
pub fn cmatmul_adj(a: &CMat, b: &CMat) -> CMat {
    cmatmul(a, &b.adjoint())
}

/// Real block form [[A, -B], [B, A]] of A + iB.
fn embed(a: &CMat) -> RMat {
    let n = a.nrows();
    let (re, im) = split(a);
    let mut m = RMat::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(&re);
    m.view_mut((n, n), (n, n)).copy_from(&re);
    m.view_mut((n, 0), (n, n)).copy_from(&im);
    m.view_mut((0, n), (n, n)).copy_from(&(-im));
    m
}

/// Matrix exponential of a complex matrix by scaling-and-squaring on its real embedding.
pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    if a.iter().all(|z| z.im == 0.0) {
        let e = a.map(|z| z.re).exp();
        return e.map(|x| C64::new(x, 0.0));
    }
    let e = embed(a).exp();
    let re = e.view((0, 0), (n, n)).into_owned();
    let im = e.view((n, 0), (n, n)).into_owned();
    join(&re, &im)
}

/// Eigen-decomposition of `a + c I` with `c = max |a_ij|`, eigenvalues shifted back.
///
/// The QR iteration returns NaN on strongly graded matrices whose trailing diagonal is tiny;
/// the shift keeps every diagonal entry of order `c` and leaves the eigenvectors unchanged.
pub(crate) fn shifted_eigen<T: nalgebra::ComplexField<RealField = f64>>(a: DMatrix<T>) -> SymmetricEigen<T, nalgebra::Dyn> {
    let n = a.nrows();
    let c = a.iter().map(|z| z.clone().modulus()).fold(0.0, f64::max);
    let mut eig = SymmetricEigen::new(a + DMatrix::<T>::identity(n, n) * T::from_real(c));
    eig.eigenvalues.iter_mut().for_each(|l| *l -= c);
    eig
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(a: &CMat) -> Vec<f64> {
    let n = a.nrows();
    if a.iter().all(|z| z.im == 0.0) {
        let mut ev: Vec<f64> = shifted_eigen(a.map(|z| z.re)).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        return ev;
    }
    let h = (a + a.adjoint()).scale(0.5);
    let mut ev: Vec<f64> = shifted_eigen(embed(&h)).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    // every eigenvalue of the embedding appears twice
    (0..n).map(|k| 0.5 * (ev[2 * k] + ev[2 * k + 1])).collect()
}

/// Eigen-decomposition of a real symmetric matrix, eigenvalues ascending.
pub fn real_symmetric_eigh(a: RMat) -> (Vec<f64>, RMat) {
    let eig = shifted_eigen(a);
    let n = eig.eigenvalues.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = RMat::zeros(n, n);
    for (k, &i) in idx.iter().enumerate() {
        vecs.set_column(k, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn hermiticity_defect(a: &CMat) -> f64 {
    let n = a.nrows();
    let mut m: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            m = m.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    m
}

pub fn trace(a: &CMat) -> C64 {
    a.diagonal().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sample(n: usize, seed: f64) -> CMat {
        CMat::from_fn(n, n, |i, j| {
            let t = seed + (i * 7 + j * 3) as f64;
            C64::new(t.sin(), (1.3 * t).cos())
        })
    }

    #[test]
    fn cmatmul_matches_generic_product() {
        let a = sample(7, 0.1);
        let b = sample(7, 2.0);
        let d = cmatmul(&a, &b) - &a * &b;
        assert!(max_abs(&d) < 1e-12);
    }

    #[test]
    fn expm_of_hermitian_generator_is_unitary() {
        let a = sample(6, 0.4);
        let g = (&a - a.adjoint()).scale(0.5);
        let u = expm(&g);
        let d = u.adjoint() * &u - CMat::identity(6, 6);
        assert!(max_abs(&d) < 1e-12);
    }

    #[test]
    fn expm_of_diagonal() {
        let mut a = CMat::zeros(3, 3);
        a[(0, 0)] = C64::new(0.0, 1.0);
        a[(1, 1)] = C64::new(0.5, 0.0);
        let e = expm(&a);
        assert_abs_diff_eq!(e[(0, 0)].re, 1f64.cos(), epsilon = 1e-14);
        assert_abs_diff_eq!(e[(0, 0)].im, 1f64.sin(), epsilon = 1e-14);
        assert_abs_diff_eq!(e[(1, 1)].re, 0.5f64.exp(), epsilon = 1e-14);
        assert_abs_diff_eq!(e[(2, 2)].re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn hermitian_spectrum_via_embedding() {
        let a = sample(5, 1.1);
        let h = (&a + a.adjoint()).scale(0.5);
        let ev = hermitian_eigenvalues(&h);
        let tr: f64 = ev.iter().sum();
        assert_abs_diff_eq!(tr, trace(&h).re, epsilon = 1e-12);
        let tr2: f64 = ev.iter().map(|x| x * x).sum();
        assert_abs_diff_eq!(tr2, trace(&(&h * &h)).re, epsilon = 1e-10);
    }

    fn graded(n: usize, seed: f64) -> RMat {
        let v = |s: f64| RMat::from_fn(n, 1, |k, _| (s + k as f64).sin() * 10f64.powi(-3 * k as i32));
        let (a, b) = (v(seed), v(2.0 * seed));
        &a * a.transpose() + &b * b.transpose() * 0.5
    }

    #[test]
    fn eigenvalues_of_graded_matrices_are_finite() {
        for s in 0..200 {
            let a = graded(37, 0.1 * s as f64 + 0.3);
            let c = a.map(|x| C64::new(x, 0.0));
            let ev = hermitian_eigenvalues(&c);
            assert!(ev.iter().all(|x| x.is_finite()), "seed {s}");
            assert_abs_diff_eq!(ev.iter().sum::<f64>(), a.trace(), epsilon = 1e-12);
        }
    }
}
