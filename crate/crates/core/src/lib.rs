//! Simulation of two-photon interference with polarization and orbital
//! angular momentum hyperentanglement.
//!
//! [`state`] holds the two-photon amplitude representation, [`bell`] the
//! labelled Bell and hyper-Bell catalog, [`optics`] the linear-optical
//! elements and port bookkeeping, [`hom`] delay and phase scans, and
//! [`analysis`] the fitting used to read visibilities and phases back out.
//! [`experiment`] ties them together behind a small text file format.

pub mod analysis;
pub mod bell;
pub mod experiment;
pub mod hom;
pub mod optics;
pub mod state;
pub mod units;

pub use bell::{HyperLabel, OamBellLabel, PolBellLabel, StateLabel, SymmetryClass};
pub use state::{InternalMode, OamIndex, OamSign, Polarization, SinglePhotonState, TwoPhotonState};
