//! Gaussian bandpass filter model and the resulting temporal overlap.

use serde::{Deserialize, Serialize};

use super::HomError;
use crate::units::{to_si, NM};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Both photons pass identical Gaussian filters; `distinguishability_floor`
/// lumps any residual mode mismatch.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralModel {
    /// Meters.
    pub center_wavelength: f64,
    /// Intensity FWHM of the filter, meters.
    pub filter_fwhm: f64,
    pub distinguishability_floor: f64,
}

impl Default for SpectralModel {
    fn default() -> Self {
        // built through to_si so the values print back as exactly 780 and 3 nm
        Self {
            center_wavelength: to_si(780.0, NM),
            filter_fwhm: to_si(3.0, NM),
            distinguishability_floor: 0.0,
        }
    }
}

impl SpectralModel {
    pub fn new(center_wavelength: f64, filter_fwhm: f64, floor: f64) -> Result<Self, HomError> {
        let m = Self { center_wavelength, filter_fwhm, distinguishability_floor: floor };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), HomError> {
        if !(self.filter_fwhm > 0.0 && self.filter_fwhm.is_finite()) {
            return Err(HomError::InvalidSpectral(format!(
                "filter FWHM must be positive, got {}",
                self.filter_fwhm
            )));
        }
        if !(self.center_wavelength > 0.0 && self.center_wavelength.is_finite()) {
            return Err(HomError::InvalidSpectral(format!(
                "center wavelength must be positive, got {}",
                self.center_wavelength
            )));
        }
        if !(0.0..=1.0).contains(&self.distinguishability_floor) {
            return Err(HomError::InvalidSpectral(format!(
                "distinguishability floor must lie in [0, 1], got {}",
                self.distinguishability_floor
            )));
        }
        Ok(())
    }

    /// Standard deviation of the filtered power spectrum in angular frequency.
    pub fn sigma_omega(&self) -> f64 {
        let fwhm_omega = 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT * self.filter_fwhm
            / (self.center_wavelength * self.center_wavelength);
        fwhm_omega / (2.0 * (2.0 * std::f64::consts::LN_2).sqrt())
    }

    /// `tau_c` in `G(tau) = (1 - floor) exp(-tau^2 / (2 tau_c^2))`.
    ///
    /// With power spectrum std `sigma`, the squared overlap of the delayed
    /// envelopes is `exp(-sigma^2 tau^2)`, so `tau_c = 1 / (sqrt(2) sigma)`.
    pub fn coherence_time(&self) -> f64 {
        1.0 / (std::f64::consts::SQRT_2 * self.sigma_omega())
    }

    /// Spectral amplitude at detuning `delta` (unnormalized); its square is
    /// the Gaussian power spectrum.
    pub fn amplitude(&self, delta: f64) -> f64 {
        let s = self.sigma_omega();
        (-delta * delta / (4.0 * s * s)).exp()
    }

    /// Temporal overlap `G(tau)` in [0, 1].
    pub fn temporal_overlap(&self, tau: f64) -> f64 {
        let tc = self.coherence_time();
        (1.0 - self.distinguishability_floor) * (-tau * tau / (2.0 * tc * tc)).exp()
    }
}
