//! Box-constrained multi-start Nelder-Mead on top of `argmin`.

use argmin::core::{CostFunction, Executor, State, TerminationReason, TerminationStatus};
use argmin::solver::neldermead::NelderMead;
use rayon::prelude::*;

/// Result of one local search.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub converged: bool,
    pub iterations: u64,
}

/// Axis-aligned search box.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        assert_eq!(lower.len(), upper.len());
        Self { lower, upper }
    }

    pub fn clamp(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&v, (&lo, &hi))| v.clamp(lo, hi))
            .collect()
    }

    fn excess(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&v, (&lo, &hi))| (lo - v).max(0.0) + (v - hi).max(0.0))
            .sum()
    }
}

struct Boxed<'a, F> {
    f: &'a F,
    bounds: &'a Bounds,
}

impl<F> CostFunction for Boxed<'_, F>
where
    F: Fn(&[f64]) -> f64,
{
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Vec<f64>) -> Result<f64, argmin::core::Error> {
        let inside = self.bounds.clamp(p);
        let v = (self.f)(&inside);
        // outside points are pushed back towards the face they left
        Ok(v + 1e3 * self.bounds.excess(p))
    }
}

/// Local Nelder-Mead search from `start` with initial simplex edge `step`.
pub fn minimize<F>(f: &F, start: &[f64], step: f64, bounds: &Bounds, tol: f64, max_iters: u64) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    let x0 = bounds.clamp(start);
    let mut simplex = vec![x0.clone()];
    for k in 0..x0.len() {
        let mut v = x0.clone();
        let span = bounds.upper[k] - bounds.lower[k];
        let h = step.min(0.5 * span).max(1e-12);
        v[k] = if v[k] + h <= bounds.upper[k] { v[k] + h } else { v[k] - h };
        simplex.push(v);
    }
    let problem = Boxed { f, bounds };
    let fallback = || Minimum { x: x0.clone(), value: f(&x0), converged: false, iterations: 0 };
    let Ok(solver) = NelderMead::new(simplex).with_sd_tolerance(tol) else {
        return fallback();
    };
    match Executor::new(problem, solver).configure(|s| s.max_iters(max_iters)).run() {
        Ok(res) => {
            let st = res.state();
            let x = bounds.clamp(st.get_best_param().map(Vec::as_slice).unwrap_or(&x0));
            let converged = matches!(
                st.get_termination_status(),
                TerminationStatus::Terminated(TerminationReason::SolverConverged)
            );
            Minimum { value: f(&x), x, converged, iterations: st.get_iter() }
        }
        Err(_) => fallback(),
    }
}

/// Runs `minimize` from every start in parallel and keeps the lowest value.
///
/// Values within `tie` of the best are resolved by the smallest `tie_key`.
pub fn multi_start<F, K>(
    f: &F,
    starts: &[Vec<f64>],
    step: f64,
    bounds: &Bounds,
    tol: f64,
    tie: f64,
    tie_key: K,
) -> (Minimum, Vec<Minimum>)
where
    F: Fn(&[f64]) -> f64 + Sync,
    K: Fn(&[f64]) -> f64,
{
    let runs: Vec<Minimum> = starts.par_iter().map(|s| minimize(f, s, step, bounds, tol, 4000)).collect();
    let best_val = runs.iter().map(|m| m.value).fold(f64::INFINITY, f64::min);
    let best = runs
        .iter()
        .filter(|m| m.value <= best_val + tie)
        .min_by(|a, b| tie_key(&a.x).total_cmp(&tie_key(&b.x)))
        .cloned()
        .unwrap_or_else(|| runs[0].clone());
    (best, runs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interior_minimum() {
        let f = |x: &[f64]| (x[0] - 0.3).powi(2) + 4.0 * (x[1] + 0.2).powi(2);
        let b = Bounds::new(vec![-1.0, -1.0], vec![1.0, 1.0]);
        let m = minimize(&f, &[0.9, 0.9], 0.2, &b, 1e-14, 2000);
        assert!(m.converged);
        assert!((m.x[0] - 0.3).abs() < 1e-5 && (m.x[1] + 0.2).abs() < 1e-5);
    }

    #[test]
    fn respects_bounds() {
        let f = |x: &[f64]| x[0];
        let b = Bounds::new(vec![0.5], vec![2.0]);
        let m = minimize(&f, &[1.5], 0.3, &b, 1e-12, 2000);
        assert!((m.x[0] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn tie_break_prefers_small_key() {
        let f = |x: &[f64]| (x[0] * x[0] - 1.0).powi(2);
        let b = Bounds::new(vec![-3.0], vec![4.0]);
        let starts = vec![vec![3.0], vec![-2.0]];
        let (best, runs) = multi_start(&f, &starts, 0.3, &b, 1e-14, 1e-9, |x| -x[0]);
        assert_eq!(runs.len(), 2);
        assert!((best.x[0] - 1.0).abs() < 1e-4);
    }
}
