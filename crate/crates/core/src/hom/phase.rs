//! Exchange-phase protocol: a PBS physically swaps the V-polarized photons,
//! which moves the OAM exchange phase into the relative phase between the
//! |HH> and |VV> branches, read out by scanning `M_theta`.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use nalgebra::SMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scan::poisson_draw;
use super::{HomError, SpectralModel};
use crate::bell::{hyper_state, oam_bell, HyperLabel, OamBellLabel, PolBellLabel};
use crate::optics::{bc_internal, lift_two_photon, pbs_unitary, PortedState, ModeUnitary, mode_index};
use crate::state::{
    InternalMode, OamSign, Polarization, SinglePhotonState, TwoPhotonState,
};

/// HWP orientation realizing the `M_theta` measurement: `3π/8 + θ/4`.
pub fn hwp_angle_for_theta(theta: f64) -> f64 {
    3.0 * PI / 8.0 + theta / 4.0
}

/// `n` equally spaced angles in `[0, 2π)`.
pub fn theta_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| TAU * i as f64 / n as f64).collect()
}

/// Arg of `<s|P|s>` for an exchange eigenstate.
fn exchange_phase(state: &TwoPhotonState) -> f64 {
    let z = state.inner_product(&state.exchange());
    wrap_phase(z.arg())
}

fn wrap_phase(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    // arg(-1) may come out as -π; keep exact π
    if (w - TAU).abs() < 1e-15 {
        0.0
    } else {
        w
    }
}

/// State after the PBS, one-photon-per-output post-selection and Babinet
/// compensation. Photon 1 is the one leaving Out3.
#[derive(Clone, Debug)]
pub struct ExchangeOutput {
    pub state: TwoPhotonState,
    /// Probability of the one-photon-per-output branch.
    pub branch_probability: f64,
    /// Total phase of the double reflection at the PBS.
    pub reflection_phase: f64,
    /// Polarization exchange phase of `|V>|V>`.
    pub phi_p: f64,
    /// Babinet setting `-(reflection_phase + phi_p)`.
    pub compensation: f64,
}

pub fn exchange_unit_output(oam: OamBellLabel) -> Result<ExchangeOutput, HomError> {
    exchange_unit_output_with(oam, &pbs_unitary())
}

pub(crate) fn exchange_unit_output_with(
    oam: OamBellLabel,
    pbs: &ModeUnitary,
) -> Result<ExchangeOutput, HomError> {
    let initial = hyper_state(HyperLabel::new(PolBellLabel::PhiPlus, oam));
    let after = lift_two_photon(pbs).apply(&PortedState::from_inputs(&initial));
    let coincident = after.coincidence_state();

    let v = InternalMode::new(Polarization::V, OamSign::Plus).index();
    let r1 = pbs.matrix()[(mode_index(1, v), mode_index(0, v))];
    let r2 = pbs.matrix()[(mode_index(0, v), mode_index(1, v))];
    let reflection_phase = wrap_phase((r1 * r2).arg());

    let vv = SinglePhotonState::basis(InternalMode::new(Polarization::V, OamSign::Plus));
    let phi_p = exchange_phase(&crate::state::tensor_product(&vv, &vv)?);
    let compensation = -(reflection_phase + phi_p);

    // Babinet compensator on the Out4 photon
    let bc = bc_internal(compensation);
    let compensated = coincident.apply_local(&SMatrix::identity(), &bc);
    let (state, branch_probability) = compensated.normalize()?;
    Ok(ExchangeOutput { state, branch_probability, reflection_phase, phi_p, compensation })
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseNoise {
    pub pairs_per_point: f64,
    pub accidental_rate: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseCounts {
    pub plus: Vec<u64>,
    pub minus: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseScan {
    pub state: String,
    pub thetas: Vec<f64>,
    pub p_plus: Vec<f64>,
    pub p_minus: Vec<f64>,
    /// Noiseless `<M_theta> = (P+ - P-) / (P+ + P-)`.
    pub m_theta: Vec<f64>,
    pub counts: Option<PhaseCounts>,
    pub noise: Option<PhaseNoise>,
    pub phi_p: f64,
    /// Exchange phase of the OAM state, from the state algebra.
    pub phi_o: f64,
}

impl PhaseScan {
    /// `<M_theta>` as measured: from counts when sampled, else noiseless.
    pub fn observed_m_theta(&self) -> Vec<f64> {
        match &self.counts {
            None => self.m_theta.clone(),
            Some(c) => c
                .plus
                .iter()
                .zip(&c.minus)
                .map(|(&p, &m)| {
                    let n = (p + m) as f64;
                    if n == 0.0 {
                        0.0
                    } else {
                        (p as f64 - m as f64) / n
                    }
                })
                .collect(),
        }
    }
}

fn pol_oam(alpha: C64, beta: C64, oam: OamSign) -> SinglePhotonState {
    SinglePhotonState::polarized(alpha, beta, oam)
}

/// Outcome probabilities with photon 1 projected on `(H+V)/√2` and photon 2
/// on `(H ± e^{iθ} V)/√2`, OAM unresolved.
fn branch_probabilities(state: &TwoPhotonState, theta: f64) -> (f64, f64) {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    let e = C64::from_polar(FRAC_1_SQRT_2, theta);
    let mut plus = 0.0;
    let mut minus = 0.0;
    for o1 in [OamSign::Plus, OamSign::Minus] {
        let bra1 = pol_oam(h, h, o1);
        for o2 in [OamSign::Plus, OamSign::Minus] {
            plus += state.project(&bra1, &pol_oam(h, e, o2)).norm_sqr();
            minus += state.project(&bra1, &pol_oam(h, -e, o2)).norm_sqr();
        }
    }
    (plus, minus)
}

/// Keeps only the amplitudes where both photons carry polarization `pol`.
fn polarization_branch(state: &TwoPhotonState, pol: Polarization) -> TwoPhotonState {
    TwoPhotonState::from_entries(
        state.iter().filter(|(a, b, _)| a.pol == pol && b.pol == pol).map(|(a, b, z)| ((a, b), z)),
    )
    .with_oam_order(state.oam_order() as i64)
    .expect("valid order")
}

/// Runs the exchange-phase protocol for an OAM Bell state. The coherence
/// between the |HH> and |VV> branches is scaled by the zero-delay overlap
/// `G(0) = 1 - floor`, since the swapped photons trade temporal envelopes.
pub fn phase_protocol_scan(
    oam: OamBellLabel,
    thetas: &[f64],
    noise: Option<PhaseNoise>,
    spectral: &SpectralModel,
) -> Result<PhaseScan, HomError> {
    spectral.validate()?;
    if let Some(t) = thetas.iter().find(|t| !(0.0..=TAU).contains(*t)) {
        return Err(HomError::InvalidScan(format!("theta {t} outside [0, 2π]")));
    }
    if let Some(n) = &noise {
        if !(n.pairs_per_point >= 0.0 && n.accidental_rate >= 0.0)
            || !n.pairs_per_point.is_finite()
            || !n.accidental_rate.is_finite()
        {
            return Err(HomError::InvalidScan("pair and accidental rates must be >= 0".into()));
        }
    }
    let out = exchange_unit_output(oam)?;
    let coherence = spectral.temporal_overlap(0.0);
    let hh = polarization_branch(&out.state, Polarization::H);
    let vv = polarization_branch(&out.state, Polarization::V);

    let probs: Vec<(f64, f64)> = thetas
        .par_iter()
        .map(|&theta| {
            let (cp, cm) = branch_probabilities(&out.state, theta);
            let (hp, hm) = branch_probabilities(&hh, theta);
            let (vp, vm) = branch_probabilities(&vv, theta);
            let p = coherence * cp + (1.0 - coherence) * (hp + vp);
            let m = coherence * cm + (1.0 - coherence) * (hm + vm);
            (p * out.branch_probability, m * out.branch_probability)
        })
        .collect();
    let p_plus: Vec<f64> = probs.iter().map(|p| p.0).collect();
    let p_minus: Vec<f64> = probs.iter().map(|p| p.1).collect();
    let m_theta = probs
        .iter()
        .map(|&(p, m)| if p + m > 0.0 { (p - m) / (p + m) } else { 0.0 })
        .collect();

    let counts = noise.map(|n| {
        let draw = |i: usize, stream: u64, prob: f64| {
            poisson_draw(n.seed, 2 * i as u64 + stream, n.pairs_per_point * prob + n.accidental_rate)
        };
        PhaseCounts {
            plus: p_plus.iter().enumerate().map(|(i, &p)| draw(i, 0, p)).collect(),
            minus: p_minus.iter().enumerate().map(|(i, &p)| draw(i, 1, p)).collect(),
        }
    });

    let phi_o = exchange_phase(&oam_bell(oam, 1)?);
    Ok(PhaseScan {
        state: oam.to_string(),
        thetas: thetas.to_vec(),
        p_plus,
        p_minus,
        m_theta,
        counts,
        noise,
        phi_p: out.phi_p,
        phi_o,
    })
}
