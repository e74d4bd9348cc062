//! Damped least squares (Levenberg-Marquardt with Marquardt diagonal scaling).

use nalgebra::{DMatrix, DVector};

const MAX_ITERATIONS: usize = 500;
const MAX_LAMBDA: f64 = 1e20;
const REL_COST_TOL: f64 = 1e-15;
const REL_STEP_TOL: f64 = 1e-13;

#[derive(Clone, Debug)]
pub(crate) struct LmOutcome {
    pub params: DVector<f64>,
    /// Residual sum of squares.
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `J^T J` at the solution.
    pub jtj: DMatrix<f64>,
}

impl LmOutcome {
    /// Parameter covariance `s^2 (J^T J)^-1` with `s^2 = RSS / (n - p)`.
    pub fn covariance(&self, n_obs: usize) -> DMatrix<f64> {
        let p = self.params.len();
        let dof = n_obs.saturating_sub(p).max(1) as f64;
        let s2 = self.cost / dof;
        let inv = self
            .jtj
            .clone()
            .try_inverse()
            .or_else(|| self.jtj.clone().pseudo_inverse(1e-300).ok())
            .unwrap_or_else(|| DMatrix::from_element(p, p, f64::INFINITY));
        inv * s2
    }

    pub fn stderr(&self, n_obs: usize) -> Vec<f64> {
        let cov = self.covariance(n_obs);
        (0..self.params.len()).map(|i| cov[(i, i)].max(0.0).sqrt()).collect()
    }
}

/// Minimizes `|r(p)|^2`; `eval` returns the residual vector and its Jacobian.
pub(crate) fn minimize<F>(p0: DVector<f64>, eval: F) -> LmOutcome
where
    F: Fn(&DVector<f64>) -> (DVector<f64>, DMatrix<f64>),
{
    let mut p = p0;
    let (mut r, mut jac) = eval(&p);
    let mut cost = r.norm_squared();
    let mut lambda = 1e-3;
    let mut iterations = 0;
    let mut converged = cost == 0.0;

    while !converged && iterations < MAX_ITERATIONS {
        iterations += 1;
        let jtj = jac.transpose() * &jac;
        let grad = jac.transpose() * &r;
        let max_diag = jtj.diagonal().iter().cloned().fold(0.0, f64::max);
        let floor = (max_diag * 1e-12).max(1e-300);

        let mut accepted = false;
        while lambda < MAX_LAMBDA {
            let mut damped = jtj.clone();
            for i in 0..damped.nrows() {
                damped[(i, i)] += lambda * jtj[(i, i)].max(floor);
            }
            let Some(step) = damped.cholesky().map(|c| c.solve(&(-&grad))) else {
                lambda *= 10.0;
                continue;
            };
            let trial = &p + &step;
            let (r_new, j_new) = eval(&trial);
            let cost_new = r_new.norm_squared();
            if cost_new.is_finite() && cost_new <= cost {
                let small_cost = cost - cost_new <= REL_COST_TOL * cost;
                let small_step = step.norm() <= REL_STEP_TOL * (p.norm() + REL_STEP_TOL);
                p = trial;
                r = r_new;
                jac = j_new;
                cost = cost_new;
                lambda = (lambda / 10.0).max(1e-12);
                accepted = true;
                converged = cost == 0.0 || small_cost || small_step;
                break;
            }
            lambda *= 10.0;
        }
        if !accepted {
            // no descent direction left at working precision
            converged = true;
        }
    }

    let jtj = jac.transpose() * &jac;
    LmOutcome { params: p, cost, iterations, converged, jtj }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fits_exponential_decay() {
        let xs: Vec<f64> = (0..30).map(|i| i as f64 * 0.2).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * (-0.7 * x).exp() + 0.5).collect();
        let out = minimize(DVector::from_vec(vec![1.0, 0.1, 0.0]), |p| {
            let r = DVector::from_iterator(
                xs.len(),
                xs.iter().zip(&ys).map(|(x, y)| p[0] * (-p[1] * x).exp() + p[2] - y),
            );
            let j = DMatrix::from_fn(xs.len(), 3, |i, k| {
                let e = (-p[1] * xs[i]).exp();
                match k {
                    0 => e,
                    1 => -p[0] * xs[i] * e,
                    _ => 1.0,
                }
            });
            (r, j)
        });
        assert!(out.converged);
        assert!((out.params[0] - 3.0).abs() < 1e-9);
        assert!((out.params[1] - 0.7).abs() < 1e-9);
        assert!((out.params[2] - 0.5).abs() < 1e-9);
    }
}
