use thiserror::Error;

use crate::numerics::NumericError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid qubit state: {0}")]
    InvalidState(String),
    /// The Uhlmann bundle only exists over full-rank density operators.
    #[error(
        "purification bundle undefined: smallest eigenvalue {p_min:e} is below the rank tolerance"
    )]
    BundleUndefined { p_min: f64 },
    /// The band gap closes and the state sits at the centre of the Bloch ball.
    #[error("state is undefined at k = {k}: band gap closes")]
    GapClosed { k: f64 },
    #[error("polar angle undefined at k = {k}: Bloch vector vanishes")]
    UndefinedAngle { k: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("degenerate (double) node of the holonomy trace near k = {k}")]
    DegenerateNode { k: f64 },
    /// A node sits exactly on the closing point of the curve, so the phase
    /// factor is at its jump.
    #[error("holonomy trace vanishes at the curve end k = {k}: critical point")]
    CriticalEndpoint { k: f64 },
    #[error("interferometric phase undefined: {0}")]
    PhaseUndefined(String),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

pub type Result<T> = std::result::Result<T, Error>;
