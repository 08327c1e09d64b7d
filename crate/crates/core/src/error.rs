//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("operator is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("superoperator is not trace preserving (defect {0:.3e})")]
    NotTracePreserving(f64),

    #[error("no stationary state at tolerance (smallest singular value {smallest:.3e})")]
    NoStationaryState { smallest: f64 },

    #[error(
        "null vector is not a physical state (min eigenvalue {min_eigenvalue:.3e}, \
         null dimension {null_dimension})"
    )]
    NonPhysicalNullVector {
        min_eigenvalue: f64,
        null_dimension: usize,
    },

    #[error(
        "step refinement did not converge after {halvings} halvings \
         (worst sample deviation {worst:.3e})"
    )]
    StepRefinement { halvings: u32, worst: f64 },

    #[error(
        "time step too coarse: total jump probability per step reached {p_total:.3e} (> 0.1); \
         use dt smaller than {suggested:.3e}"
    )]
    DtTooCoarse { p_total: f64, suggested: f64 },

    #[error("sweep produced no usable cells")]
    EmptySweep,
}

pub type Result<T> = std::result::Result<T, Error>;
