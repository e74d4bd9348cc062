//! Linear-optics elements of the interference and exchange units.

mod circuit;
mod element;
mod prepare;

use thiserror::Error;

pub use circuit::{
    bc_unitary, bs_unitary, bs_unitary_with, compose_circuit, compose_circuit_with_order,
    element_unitary, lift_two_photon, mode_index, pbs_reflection_phase, pbs_unitary,
    pbs_unitary_with, BsConvention, ModeMatrix, ModeUnitary, OutputProbabilities, PortedState,
    TwoPhotonTransform, MODE_DIM,
};
pub use element::{
    bc_internal, dove_unitary, hwp_unitary, internal_op, mirror_unitary, qwp_unitary,
    ElementKind, ElementSetting, InternalOp, Placement, PortLabel,
};
pub use prepare::{prepare_hyper, prepared_state, source_state, SOURCE_LABEL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OpticsError {
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("invalid element setting: {0}")]
    BadSetting(String),
    #[error("{count} mirror reflection(s) on {port}: OAM handedness needs an even count")]
    OddReflections { port: PortLabel, count: usize },
}
