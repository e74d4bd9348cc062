//! Gaussian dip/peak fit of HOM delay scans.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::lm::minimize;
use super::FitError;
use crate::hom::HomCurve;

const MIN_POINTS: usize = 7;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveKind {
    Dip,
    Peak,
}

impl CurveKind {
    /// `s` in `C(tau) = C_inf (1 - s V g(tau))`.
    fn sign(self) -> f64 {
        match self {
            Self::Dip => 1.0,
            Self::Peak => -1.0,
        }
    }
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Dip => "Dip",
            Self::Peak => "Peak",
        })
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Bunching {
    Bunching,
    AntiBunching,
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomStderr {
    pub c_inf: f64,
    pub visibility: f64,
    pub center: f64,
    pub width: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomFit {
    /// Fitted count at zero delay offset (the dip/peak center).
    pub c0: f64,
    /// Fitted baseline at infinite delay.
    pub c_inf: f64,
    /// In [0, 1]; clamped when noise pushes the raw estimate outside.
    pub visibility: f64,
    /// Raw fitted visibility before clamping.
    pub raw_visibility: f64,
    /// Gaussian standard deviation, seconds.
    pub width: f64,
    /// Seconds.
    pub center: f64,
    pub kind: CurveKind,
    pub residual_rms: f64,
    pub stderr: HomStderr,
    pub reliable: bool,
    pub iterations: usize,
}

/// `V_dip = 1 - C0/C_inf`, `V_peak = C0/C_inf - 1`.
pub fn visibility(c0: f64, c_inf: f64, kind: CurveKind) -> Result<f64, FitError> {
    if c_inf.is_nan() || c_inf <= 0.0 {
        return Err(FitError::Degenerate(format!("baseline must be positive, got {c_inf}")));
    }
    Ok(match kind {
        CurveKind::Dip => 1.0 - c0 / c_inf,
        CurveKind::Peak => c0 / c_inf - 1.0,
    })
}

pub fn fit_hom(curve: &HomCurve) -> Result<HomFit, FitError> {
    fit_hom_counts(&curve.delays, &curve.observed())
}

/// Fits `C(tau) = C_inf (1 - s V exp(-(tau - tau0)^2 / (2 w^2)))` with
/// `s = +1` for a dip and `-1` for a peak, chosen from the sign of the
/// largest deviation from the tail baseline.
pub fn fit_hom_counts(delays: &[f64], counts: &[f64]) -> Result<HomFit, FitError> {
    let n = delays.len();
    if n != counts.len() {
        return Err(FitError::Degenerate("delay and count lengths differ".into()));
    }
    if n < MIN_POINTS {
        return Err(FitError::TooFewPoints { need: MIN_POINTS, got: n });
    }
    let (lo, hi) = delays
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &t| (a.min(t), b.max(t)));
    if hi.is_nan() || lo.is_nan() || hi <= lo {
        return Err(FitError::Degenerate("delays span zero range".into()));
    }
    // work in u = (tau - mid) / half so all parameters are O(1)
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let u: Vec<f64> = delays.iter().map(|t| (t - mid) / half).collect();

    let tail: Vec<f64> = u
        .iter()
        .zip(counts)
        .filter(|(x, _)| x.abs() >= 0.5)
        .map(|(_, &c)| c)
        .collect();
    let baseline = tail.iter().sum::<f64>() / tail.len().max(1) as f64;
    if baseline.is_nan() || baseline <= 0.0 {
        return Err(FitError::Degenerate("tail baseline is not positive".into()));
    }
    let (ext, _) = counts
        .iter()
        .enumerate()
        .fold((0, -1.0), |(bi, bd), (i, &c)| {
            let d = (c - baseline).abs();
            if d > bd {
                (i, d)
            } else {
                (bi, bd)
            }
        });
    let kind = if counts[ext] < baseline { CurveKind::Dip } else { CurveKind::Peak };
    let s = kind.sign();

    let p0 = DVector::from_vec(vec![
        baseline,
        ((counts[ext] - baseline).abs() / baseline).min(2.0),
        u[ext],
        1.0 / 3.0,
    ]);
    let eval = |p: &DVector<f64>| {
        let (c, v, u0, w) = (p[0], p[1], p[2], p[3]);
        let mut r = DVector::zeros(n);
        let mut j = DMatrix::zeros(n, 4);
        for i in 0..n {
            let d = u[i] - u0;
            let g = (-d * d / (2.0 * w * w)).exp();
            r[i] = c * (1.0 - s * v * g) - counts[i];
            j[(i, 0)] = 1.0 - s * v * g;
            j[(i, 1)] = -c * s * g;
            j[(i, 2)] = -c * s * v * g * d / (w * w);
            j[(i, 3)] = -c * s * v * g * d * d / (w * w * w);
        }
        (r, j)
    };
    let out = minimize(p0, eval);
    if !out.converged {
        return Err(FitError::NotConverged(out.iterations));
    }
    let se = out.stderr(n);
    let (c_inf, raw_v, u0, w) = (out.params[0], out.params[1], out.params[2], out.params[3].abs());
    let c0 = c_inf * (1.0 - s * raw_v);
    let v = visibility(c0, c_inf, kind)?;
    let reliable = v > 1e-9 && v.is_finite() && v > 3.0 * se[1];
    Ok(HomFit {
        c0,
        c_inf,
        visibility: v.clamp(0.0, 1.0),
        raw_visibility: v,
        width: w * half,
        center: mid + u0 * half,
        kind,
        residual_rms: (out.cost / n as f64).sqrt(),
        stderr: HomStderr {
            c_inf: se[0],
            visibility: se[1],
            center: se[2] * half,
            width: se[3] * half,
        },
        reliable,
        iterations: out.iterations,
    })
}

/// Dip means bunching, peak anti-bunching.
pub fn classify_from_curve(fit: &HomFit) -> Result<Bunching, FitError> {
    if !fit.reliable {
        return Err(FitError::Unreliable);
    }
    Ok(match fit.kind {
        CurveKind::Dip => Bunching::Bunching,
        CurveKind::Peak => Bunching::AntiBunching,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn synth(kind: CurveKind, v: f64, c: f64, center: f64, w: f64) -> (Vec<f64>, Vec<f64>) {
        let delays: Vec<f64> = (0..41).map(|i| (i as f64 - 20.0) * 1e-14).collect();
        let counts = delays
            .iter()
            .map(|t| {
                let g = (-(t - center).powi(2) / (2.0 * w * w)).exp();
                c * (1.0 - kind.sign() * v * g)
            })
            .collect();
        (delays, counts)
    }

    #[test]
    fn visibility_formula() {
        assert_abs_diff_eq!(visibility(50.0, 1000.0, CurveKind::Dip).unwrap(), 0.95, epsilon = 1e-15);
        assert_abs_diff_eq!(visibility(1900.0, 1000.0, CurveKind::Peak).unwrap(), 0.9, epsilon = 1e-15);
        assert!(visibility(1.0, 0.0, CurveKind::Dip).is_err());
    }

    #[test]
    fn exact_dip_recovered() {
        let (d, c) = synth(CurveKind::Dip, 1.0, 5000.0, 0.0, 6e-14);
        let fit = fit_hom_counts(&d, &c).unwrap();
        assert_eq!(fit.kind, CurveKind::Dip);
        assert_abs_diff_eq!(fit.visibility, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(fit.width, 6e-14, epsilon = 1e-21);
        assert_eq!(classify_from_curve(&fit).unwrap(), Bunching::Bunching);
    }

    #[test]
    fn off_center_peak_recovered() {
        let (d, c) = synth(CurveKind::Peak, 0.8, 1000.0, 2.3e-14, 4e-14);
        let fit = fit_hom_counts(&d, &c).unwrap();
        assert_eq!(fit.kind, CurveKind::Peak);
        assert_abs_diff_eq!(fit.visibility, 0.8, epsilon = 1e-9);
        assert_abs_diff_eq!(fit.center, 2.3e-14, epsilon = 1e-22);
        assert_abs_diff_eq!(fit.c0, 1800.0, epsilon = 1e-6);
        assert_eq!(classify_from_curve(&fit).unwrap(), Bunching::AntiBunching);
    }

    #[test]
    fn flat_curve_is_unreliable() {
        let d: Vec<f64> = (0..21).map(|i| i as f64).collect();
        let fit = fit_hom_counts(&d, &[100.0; 21]).unwrap();
        assert_eq!(fit.visibility, 0.0);
        assert!(!fit.reliable);
        assert_eq!(classify_from_curve(&fit), Err(FitError::Unreliable));
    }

    #[test]
    fn too_few_points() {
        assert_eq!(
            fit_hom_counts(&[0.0; 6], &[1.0; 6]).unwrap_err(),
            FitError::TooFewPoints { need: 7, got: 6 }
        );
    }

    #[test]
    fn zero_baseline_rejected() {
        let d: Vec<f64> = (0..9).map(|i| i as f64).collect();
        assert!(matches!(fit_hom_counts(&d, &[0.0; 9]), Err(FitError::Degenerate(_))));
    }
}
