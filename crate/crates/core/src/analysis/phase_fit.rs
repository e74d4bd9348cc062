//! Sinusoid fit `M(theta) = A cos(theta - Phi) + B` for the exchange phase.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::lm::minimize;
use super::FitError;
use crate::hom::PhaseScan;

const MIN_POINTS: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseFit {
    /// Radians in [0, 2pi); the maximizer of the fitted cosine.
    pub phi: f64,
    pub amplitude: f64,
    pub offset: f64,
    pub phi_stderr: f64,
    pub amplitude_stderr: f64,
    pub residual_rms: f64,
    pub reliable: bool,
    pub iterations: usize,
}

pub fn fit_phase(scan: &PhaseScan) -> Result<PhaseFit, FitError> {
    fit_phase_values(&scan.thetas, &scan.observed_m_theta())
}

pub fn fit_phase_values(thetas: &[f64], values: &[f64]) -> Result<PhaseFit, FitError> {
    let n = thetas.len();
    if n != values.len() {
        return Err(FitError::Degenerate("theta and value lengths differ".into()));
    }
    if n < MIN_POINTS {
        return Err(FitError::TooFewPoints { need: MIN_POINTS, got: n });
    }
    if !covers_period(thetas) {
        return Err(FitError::InsufficientCoverage("at least one full period of theta"));
    }

    // linear start: M = a cos + b sin + B
    let mut ata = Matrix3::zeros();
    let mut aty = Vector3::zeros();
    for (&t, &y) in thetas.iter().zip(values) {
        let row = Vector3::new(t.cos(), t.sin(), 1.0);
        ata += row * row.transpose();
        aty += row * y;
    }
    let lin = ata
        .lu()
        .solve(&aty)
        .ok_or_else(|| FitError::Degenerate("theta samples are collinear".into()))?;
    let p0 = DVector::from_vec(vec![lin[0].hypot(lin[1]), lin[1].atan2(lin[0]), lin[2]]);

    let eval = |p: &DVector<f64>| {
        let (a, phi, b) = (p[0], p[1], p[2]);
        let mut r = DVector::zeros(n);
        let mut j = DMatrix::zeros(n, 3);
        for i in 0..n {
            let d = thetas[i] - phi;
            r[i] = a * d.cos() + b - values[i];
            j[(i, 0)] = d.cos();
            j[(i, 1)] = a * d.sin();
            j[(i, 2)] = 1.0;
        }
        (r, j)
    };
    let out = minimize(p0, eval);
    if !out.converged {
        return Err(FitError::NotConverged(out.iterations));
    }
    let se = out.stderr(n);
    let (mut a, mut phi) = (out.params[0], out.params[1]);
    if a < 0.0 {
        a = -a;
        phi += std::f64::consts::PI;
    }
    phi = phi.rem_euclid(TAU);
    // a phase a rounding error below 2pi is reported as 0
    if TAU - phi < 1e-9 {
        phi = 0.0;
    }
    Ok(PhaseFit {
        phi,
        amplitude: a,
        offset: out.params[2],
        phi_stderr: se[1],
        amplitude_stderr: se[0],
        residual_rms: (out.cost / n as f64).sqrt(),
        reliable: a > 1e-12 && a > 3.0 * se[0],
        iterations: out.iterations,
    })
}

/// True when the largest gap between sorted angles (mod 2pi) is under pi,
/// i.e. the samples wrap the circle rather than sitting in one half.
fn covers_period(thetas: &[f64]) -> bool {
    let mut w: Vec<f64> = thetas.iter().map(|t| t.rem_euclid(TAU)).collect();
    w.sort_by(f64::total_cmp);
    let mut gap = w[0] + TAU - w[w.len() - 1];
    for pair in w.windows(2) {
        gap = gap.max(pair[1] - pair[0]);
    }
    gap < std::f64::consts::PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|k| TAU * k as f64 / n as f64).collect()
    }

    #[test]
    fn exact_cosine() {
        let th = grid(32);
        for phi in [0.0, 1.0, 3.0, 5.5] {
            let m: Vec<f64> = th.iter().map(|t| 0.9 * (t - phi).cos() + 0.05).collect();
            let fit = fit_phase_values(&th, &m).unwrap();
            assert_abs_diff_eq!(fit.phi, phi, epsilon = 1e-10);
            assert_abs_diff_eq!(fit.amplitude, 0.9, epsilon = 1e-10);
            assert_abs_diff_eq!(fit.offset, 0.05, epsilon = 1e-10);
            assert!(fit.reliable);
        }
    }

    #[test]
    fn pi_phase() {
        let th = grid(16);
        let m: Vec<f64> = th.iter().map(|t| -t.cos()).collect();
        let fit = fit_phase_values(&th, &m).unwrap();
        assert_abs_diff_eq!(fit.phi, std::f64::consts::PI, epsilon = 1e-10);
    }

    #[test]
    fn rejects_half_period() {
        let th: Vec<f64> = (0..10).map(|k| k as f64 * 0.3).collect();
        let m: Vec<f64> = th.iter().map(|t| t.cos()).collect();
        assert!(matches!(fit_phase_values(&th, &m), Err(FitError::InsufficientCoverage(_))));
    }

    #[test]
    fn rejects_few_points() {
        let th = grid(7);
        assert_eq!(
            fit_phase_values(&th, &[0.0; 7]).unwrap_err(),
            FitError::TooFewPoints { need: 8, got: 7 }
        );
    }

    #[test]
    fn flat_is_unreliable() {
        let th = grid(12);
        let fit = fit_phase_values(&th, &[0.3; 12]).unwrap();
        assert!(!fit.reliable);
    }
}
