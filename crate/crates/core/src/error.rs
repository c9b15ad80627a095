//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("scenario regime mismatch: this builder handles {expected}, got {got}")]
    WrongRegime { expected: &'static str, got: String },

    #[error("pump detuning delta = 0: the sideband split is undefined at zero detuning")]
    ZeroDetuning,

    #[error(
        "unequal sideband amplitudes |alpha_+|^2 = {plus_sq}, |alpha_-|^2 = {minus_sq}: \
         the back-action-evading scheme requires equal magnitudes"
    )]
    UnequalSidebands { plus_sq: f64, minus_sq: f64 },

    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("unknown quadrature label `{label}`")]
    UnknownLabel { label: String },

    #[error("unknown mode `{mode}`")]
    UnknownMode { mode: String },

    #[error("diffusion matrix is not positive semidefinite: eigenvalue {eigenvalue}")]
    IndefiniteDiffusion { eigenvalue: f64 },

    #[error("covariance matrix violates the uncertainty relation: defect {defect}")]
    UnphysicalState { defect: f64 },

    #[error(
        "covariance norm blew up at step {step} ({norm}); \
         {}", if *.stable_system {
            "the drift is stable, so try a smaller dt"
         } else {
            "the drift is unstable and the transient diverges"
         }
    )]
    CovarianceBlowup {
        step: usize,
        norm: f64,
        stable_system: bool,
    },

    #[error("ensemble trajectory {trajectory} diverged at step {step}")]
    DivergentEnsemble { trajectory: usize, step: usize },

    #[error("scalar minimization failed: {reason}")]
    MinimizerFailed { reason: String },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}
