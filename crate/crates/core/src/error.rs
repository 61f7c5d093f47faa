//! Error type shared by every simulation module.

use thiserror::Error;

use crate::mubgate::GateTranscript;
use crate::qstate::{StateVector, SubsystemId};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("layout error: {0}")]
    Layout(String),

    #[error("target error: {0}")]
    Target(String),

    #[error("basis error: {0}")]
    Basis(String),

    #[error("projection error: outcome {outcome} has probability {probability:e}")]
    Projection { outcome: usize, probability: f64 },

    #[error("entanglement error: subsystem {0} does not factorize")]
    Entanglement(SubsystemId),

    #[error("argument error: {0}")]
    Argument(String),

    #[error("recipe error: {0}")]
    Recipe(String),

    #[error("state error: {0}")]
    State(String),

    #[error("gate incomplete after {} rounds", .0.1.rounds_used)]
    GateIncomplete(Box<(StateVector, GateTranscript)>),

    #[error("divergence: {0}")]
    Divergence(String),

    #[error("internal error: {0}")]
    Internal(String),
}
