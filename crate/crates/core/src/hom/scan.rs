//! HOM delay scans with Poisson-sampled coincidence counts.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{coincidence_probability, HomError, SpectralModel};
use crate::state::TwoPhotonState;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum NoiseModel {
    #[default]
    Poisson,
    None,
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Seconds.
    pub delay_min: f64,
    pub delay_max: f64,
    pub n_points: usize,
    /// Expected generated pairs per delay point.
    pub pairs_per_point: f64,
    /// Expected accidental coincidences per delay point.
    pub accidental_rate: f64,
    pub rng_seed: u64,
    pub noise: NoiseModel,
}

impl ScanConfig {
    /// ±3 coherence times, 41 points.
    pub fn default_for(spectral: &SpectralModel) -> Self {
        let span = 3.0 * spectral.coherence_time();
        Self {
            delay_min: -span,
            delay_max: span,
            n_points: 41,
            pairs_per_point: 1e4,
            accidental_rate: 0.0,
            rng_seed: 0,
            noise: NoiseModel::Poisson,
        }
    }

    pub fn validate(&self) -> Result<(), HomError> {
        if self.n_points < 2 {
            return Err(HomError::InvalidScan(format!("need at least 2 points, got {}", self.n_points)));
        }
        if !self.delay_min.is_finite() || !self.delay_max.is_finite() || self.delay_min >= self.delay_max {
            return Err(HomError::InvalidScan(format!(
                "delay range [{}, {}] is empty",
                self.delay_min, self.delay_max
            )));
        }
        if !(self.pairs_per_point >= 0.0 && self.pairs_per_point.is_finite()) {
            return Err(HomError::InvalidScan("pairs_per_point must be >= 0".into()));
        }
        if !(self.accidental_rate >= 0.0 && self.accidental_rate.is_finite()) {
            return Err(HomError::InvalidScan("accidental_rate must be >= 0".into()));
        }
        Ok(())
    }

    pub fn delays(&self) -> Vec<f64> {
        let step = (self.delay_max - self.delay_min) / (self.n_points - 1) as f64;
        (0..self.n_points)
            .map(|i| {
                if i + 1 == self.n_points {
                    self.delay_max
                } else {
                    self.delay_min + i as f64 * step
                }
            })
            .collect()
    }
}

/// Draws `Poisson(mean)` from the stream `stream` of the seeded generator.
/// Each point owns its stream, so results do not depend on evaluation order.
pub(crate) fn poisson_draw(seed: u64, stream: u64, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let dist = Poisson::new(mean).expect("positive finite mean");
    dist.sample(&mut rng) as u64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveMeta {
    pub state: String,
    pub spectral: SpectralModel,
    pub seed: u64,
    pub pairs_per_point: f64,
    pub accidental_rate: f64,
    pub noise: NoiseModel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomCurve {
    /// Seconds.
    pub delays: Vec<f64>,
    pub expected: Vec<f64>,
    /// `None` for noiseless scans.
    pub sampled: Option<Vec<u64>>,
    pub meta: CurveMeta,
}

impl HomCurve {
    /// The counts a fit should see: sampled when present, expected otherwise.
    pub fn observed(&self) -> Vec<f64> {
        match &self.sampled {
            Some(s) => s.iter().map(|&n| n as f64).collect(),
            None => self.expected.clone(),
        }
    }
}

/// `expected_i = pairs * P_cc(tau_i) + accidentals`, `sampled_i ~ Poisson(expected_i)`.
pub fn simulate_hom_scan(
    state: &TwoPhotonState,
    label: &str,
    scan: &ScanConfig,
    spectral: &SpectralModel,
) -> Result<HomCurve, HomError> {
    scan.validate()?;
    spectral.validate()?;
    let delays = scan.delays();
    let expected: Vec<f64> = delays
        .par_iter()
        .map(|&t| scan.pairs_per_point * coincidence_probability(state, t, spectral) + scan.accidental_rate)
        .collect();
    let sampled = match scan.noise {
        NoiseModel::None => None,
        NoiseModel::Poisson => Some(
            expected
                .par_iter()
                .enumerate()
                .map(|(i, &mean)| poisson_draw(scan.rng_seed, i as u64, mean))
                .collect(),
        ),
    };
    Ok(HomCurve {
        delays,
        expected,
        sampled,
        meta: CurveMeta {
            state: label.to_string(),
            spectral: *spectral,
            seed: scan.rng_seed,
            pairs_per_point: scan.pairs_per_point,
            accidental_rate: scan.accidental_rate,
            noise: scan.noise,
        },
    })
}
