use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size {0} must be an even integer >= 4")]
    InvalidGridSize(usize),

    #[error("wavevector {k:?} is not retained by a grid with N = {n}")]
    OutsideGrid { k: [i64; 3], n: usize },

    #[error("mode {k:?} conflicts with its Hermitian mirror")]
    ConflictingMirror { k: [i64; 3] },

    #[error("mean mode k = 0 must be zero")]
    NonzeroMean,

    #[error("grids differ: N = {0} vs N = {1}")]
    GridMismatch(usize, usize),

    #[error("input is not divergence-free: divergence_sup = {divergence_sup:e} (tolerance {tolerance:e})")]
    NotDivergenceFree { divergence_sup: f64, tolerance: f64 },

    #[error("non-finite coefficient at t = {t} for wavevector {k:?}")]
    BlowUp { t: f64, k: [i64; 3] },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("initial condition: {0}")]
    InitialCondition(String),

    #[error("checkpoint {path}: {reason}")]
    Checkpoint { path: PathBuf, reason: String },

    #[error("trajectory {path}: {reason}")]
    Trajectory { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by user supplied configuration or inputs.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidGridSize(_)
                | Error::Config(_)
                | Error::InitialCondition(_)
                | Error::Checkpoint { .. }
                | Error::Trajectory { .. }
                | Error::Io(_)
        )
    }
}
