//! Independent second-quantized check of the coincidence probability.
//!
//! Each photon is expanded over a discrete frequency grid (and, when the
//! spectral model has a distinguishability floor, a two-level hidden mode).
//! The labeled two-photon amplitude is pushed through the beam-splitter path
//! matrix, bosonically symmetrized, and `|amplitude|^2` is summed over
//! one-photon-per-output configurations. Nothing here uses the symmetry
//! expectation or the closed-form overlap.

use nalgebra::Matrix2;
use num_complex::Complex64 as C64;

use super::{HomError, SpectralModel};
use crate::state::TwoPhotonState;

pub const MIN_GRID: usize = 64;
/// Result change that flags a grid as unconverged.
pub const CONVERGENCE_TOL: f64 = 1e-7;
/// Grid half-width in units of the power-spectrum standard deviation.
const GRID_HALF_WIDTH: f64 = 8.0;

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub coincidence: f64,
    pub bunched_out3: f64,
    pub bunched_out4: f64,
    /// False when halving the grid changed the coincidence probability by
    /// more than [`CONVERGENCE_TOL`].
    pub converged: bool,
}

impl OracleResult {
    pub fn total(&self) -> f64 {
        self.coincidence + self.bunched_out3 + self.bunched_out4
    }
}

/// Photon-1 and photon-2 amplitudes over (frequency bin × hidden mode).
struct Envelopes {
    first: Vec<C64>,
    second: Vec<C64>,
}

fn envelopes(spectral: &SpectralModel, tau: f64, grid_n: usize) -> Envelopes {
    let sigma = spectral.sigma_omega();
    let half = GRID_HALF_WIDTH * sigma;
    let step = 2.0 * half / grid_n as f64;
    let detunings: Vec<f64> = (0..grid_n).map(|k| -half + (k as f64 + 0.5) * step).collect();
    let raw: Vec<f64> = detunings.iter().map(|&d| spectral.amplitude(d)).collect();
    let norm = raw.iter().map(|a| a * a).sum::<f64>().sqrt();

    let floor = spectral.distinguishability_floor;
    let hidden: Vec<f64> = if floor > 0.0 {
        vec![(1.0 - floor).sqrt(), floor.sqrt()]
    } else {
        vec![1.0]
    };
    let dim = hidden.len();
    let mut first = vec![C64::new(0.0, 0.0); grid_n * dim];
    let mut second = vec![C64::new(0.0, 0.0); grid_n * dim];
    for k in 0..grid_n {
        let a = raw[k] / norm;
        first[k * dim] = C64::new(a, 0.0);
        // photon 2 is delayed by tau
        let delayed = C64::from_polar(a, detunings[k] * tau);
        for (q, h) in hidden.iter().enumerate() {
            second[k * dim + q] = delayed * *h;
        }
    }
    Envelopes { first, second }
}

/// `sum_{k,l} |c1 a_k b_l + c2 a_l b_k|^2`.
fn pair_sum(c1: C64, c2: C64, a: &[C64], b: &[C64]) -> f64 {
    let mut total = 0.0;
    for k in 0..a.len() {
        let (ak, bk) = (a[k], b[k]);
        if ak.norm_sqr() == 0.0 && bk.norm_sqr() == 0.0 {
            continue;
        }
        let u = c1 * ak;
        let v = c2 * bk;
        for l in 0..a.len() {
            total += (u * b[l] + v * a[l]).norm_sqr();
        }
    }
    total
}

fn distribution(
    state: &TwoPhotonState,
    env: &Envelopes,
    path: &Matrix2<C64>,
) -> (f64, f64, f64) {
    let amps = state.matrix();
    let (mut coinc, mut b3, mut b4) = (0.0, 0.0, 0.0);
    for x in 0..4 {
        for y in 0..4 {
            let fwd = amps[(x, y)];
            let rev = amps[(y, x)];
            if fwd.norm_sqr() == 0.0 && rev.norm_sqr() == 0.0 {
                continue;
            }
            // photon 1 entered path 0, photon 2 path 1
            coinc += pair_sum(
                path[(0, 0)] * path[(1, 1)] * fwd,
                path[(1, 0)] * path[(0, 1)] * rev,
                &env.first,
                &env.second,
            );
            let same3 = path[(0, 0)] * path[(0, 1)];
            b3 += 0.5 * pair_sum(same3 * fwd, same3 * rev, &env.first, &env.second);
            let same4 = path[(1, 0)] * path[(1, 1)];
            b4 += 0.5 * pair_sum(same4 * fwd, same4 * rev, &env.first, &env.second);
        }
    }
    (coinc, b3, b4)
}

/// Coincidence and bunching probabilities at delay `tau` behind a beam
/// splitter with 2x2 path matrix `path` (row = output, column = input).
pub fn full_fock_distribution(
    state: &TwoPhotonState,
    tau: f64,
    spectral: &SpectralModel,
    grid_n: usize,
    path: &Matrix2<C64>,
) -> Result<OracleResult, HomError> {
    if grid_n < MIN_GRID {
        return Err(HomError::GridTooSmall { grid_n, min: MIN_GRID });
    }
    spectral.validate()?;
    let (coincidence, bunched_out3, bunched_out4) =
        distribution(state, &envelopes(spectral, tau, grid_n), path);
    let (coarse, _, _) = distribution(state, &envelopes(spectral, tau, grid_n / 2), path);
    Ok(OracleResult {
        coincidence,
        bunched_out3,
        bunched_out4,
        converged: (coarse - coincidence).abs() <= CONVERGENCE_TOL,
    })
}

/// Oracle with the default (real) beam-splitter convention.
pub fn full_fock_oracle(
    state: &TwoPhotonState,
    tau: f64,
    spectral: &SpectralModel,
    grid_n: usize,
) -> Result<OracleResult, HomError> {
    let path = crate::optics::BsConvention::Real.path_matrix();
    full_fock_distribution(state, tau, spectral, grid_n, &path)
}
