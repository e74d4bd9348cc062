//! Visibility and exchange-phase extraction by least-squares fitting.

mod hom_fit;
mod lm;
mod phase_fit;

use thiserror::Error;

pub use hom_fit::{classify_from_curve, fit_hom, fit_hom_counts, visibility, Bunching, CurveKind, HomFit, HomStderr};
pub use phase_fit::{fit_phase, fit_phase_values, PhaseFit};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("need at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("scan must cover {0}")]
    InsufficientCoverage(&'static str),
    #[error("fit did not converge after {0} iterations")]
    NotConverged(usize),
    #[error("degenerate data: {0}")]
    Degenerate(String),
    #[error("fit is unreliable: visibility indistinguishable from zero")]
    Unreliable,
}
