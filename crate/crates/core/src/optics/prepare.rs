//! Element recipes turning the directly generated source state `phi+ x nu+`
//! into any of the 16 hyper-entangled Bell states.
//!
//! Polarization is converted with one HWP per arm, OAM with one Dove prism per
//! arm. Outputs match the catalog states up to a global phase.

use std::f64::consts::FRAC_PI_4;

use super::circuit::{compose_circuit, lift_two_photon};
use super::element::{ElementKind, ElementSetting, PortLabel};
use crate::bell::{hyper_state, HyperLabel, OamBellLabel, PolBellLabel};
use crate::state::TwoPhotonState;

/// The state produced directly by the source.
pub const SOURCE_LABEL: HyperLabel = HyperLabel::new(PolBellLabel::PhiPlus, OamBellLabel::NuPlus);

pub fn source_state() -> TwoPhotonState {
    hyper_state(SOURCE_LABEL)
}

fn arm1(kind: ElementKind) -> ElementSetting {
    ElementSetting::on(PortLabel::In1, kind)
}

fn arm2(kind: ElementKind) -> ElementSetting {
    ElementSetting::on(PortLabel::In2, kind)
}

fn polarization_recipe(label: PolBellLabel) -> Vec<ElementSetting> {
    match label {
        PolBellLabel::PhiPlus => vec![],
        // V -> -V on photon 1
        PolBellLabel::PhiMinus => vec![arm1(ElementKind::Hwp(0.0))],
        // H <-> V on photon 1
        PolBellLabel::PsiPlus => vec![arm1(ElementKind::Hwp(FRAC_PI_4))],
        PolBellLabel::PsiMinus => {
            vec![arm1(ElementKind::Hwp(FRAC_PI_4)), arm2(ElementKind::Hwp(0.0))]
        }
    }
}

fn oam_recipe(label: OamBellLabel) -> Vec<ElementSetting> {
    // A prism at alpha on arm 1 and beta on arm 2 sends nu+ to
    // exp(2i(alpha-beta))|+-> + exp(-2i(alpha-beta))|-+>, and a single prism
    // on arm 1 sends it to exp(2i alpha)|++> + exp(-2i alpha)|-->.
    match label {
        OamBellLabel::NuPlus => vec![],
        OamBellLabel::MuPlus => vec![arm1(ElementKind::DovePrism(0.0))],
        OamBellLabel::MuMinus => vec![arm1(ElementKind::DovePrism(FRAC_PI_4))],
        OamBellLabel::NuMinus => vec![
            arm1(ElementKind::DovePrism(FRAC_PI_4)),
            arm2(ElementKind::DovePrism(0.0)),
        ],
    }
}

/// Per-arm HWP/DP settings preparing `target` from [`source_state`].
pub fn prepare_hyper(target: HyperLabel) -> Vec<ElementSetting> {
    let mut out = polarization_recipe(target.pol);
    out.extend(oam_recipe(target.oam));
    out
}

/// Applies per-arm `elements` to the source state.
pub fn prepared_state(elements: &[ElementSetting]) -> Result<TwoPhotonState, super::OpticsError> {
    let u = compose_circuit(elements)?;
    Ok(lift_two_photon(&u).apply_on_arms(&source_state()))
}
