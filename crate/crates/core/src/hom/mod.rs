//! Coincidence statistics for the beam-splitter interference unit and the
//! polarizing-beam-splitter exchange unit.

mod oracle;
mod phase;
mod scan;
mod spectral;

use thiserror::Error;

use crate::state::{StateError, TwoPhotonState};

pub use oracle::{
    full_fock_distribution, full_fock_oracle, OracleResult, CONVERGENCE_TOL, MIN_GRID,
};
pub use phase::{
    exchange_unit_output, hwp_angle_for_theta, phase_protocol_scan, theta_grid, ExchangeOutput,
    PhaseCounts, PhaseNoise, PhaseScan,
};
pub use scan::{simulate_hom_scan, CurveMeta, HomCurve, NoiseModel, ScanConfig};
pub use spectral::{SpectralModel, SPEED_OF_LIGHT};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HomError {
    #[error("invalid spectral model: {0}")]
    InvalidSpectral(String),
    #[error("invalid scan: {0}")]
    InvalidScan(String),
    #[error("frequency grid of {grid_n} bins is below the minimum of {min}")]
    GridTooSmall { grid_n: usize, min: usize },
    #[error(transparent)]
    State(#[from] StateError),
}

/// Factorized coincidence probability `(1 - s G(tau)) / 2`, where `s` is the
/// exchange-symmetry expectation of the internal state.
pub fn coincidence_probability(state: &TwoPhotonState, tau: f64, spectral: &SpectralModel) -> f64 {
    let s = state.symmetry_expectation();
    0.5 * (1.0 - s * spectral.temporal_overlap(tau))
}
