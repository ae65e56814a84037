use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::config::ConfigError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which of the two layer heights an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    F,
    G,
}

impl std::fmt::Display for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Field::F => f.write_str("f"),
            Field::G => f.write_str("g"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid needs at least 2 cells, got {0}")]
    TooFewCells(usize),

    #[error("domain length must be finite and positive, got {0}")]
    InvalidLength(f64),

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("array has {actual} entries, grid has {expected} cells")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("non-finite value {value} at cell {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("negative value {value} in {field} at cell {index}")]
    Negative { field: Field, index: usize, value: f64 },

    #[error("{field} = {value} at cell {index} violates the lower barrier {barrier}")]
    BarrierViolation {
        field: Field,
        index: usize,
        value: f64,
        barrier: f64,
    },

    #[error("positivity failure at t = {time}: {field} = {value} at cell {index}")]
    PositivityFailure {
        time: f64,
        field: Field,
        index: usize,
        value: f64,
    },

    #[error("clamp budget exceeded at t = {time}: {field} gained {clamped} by clamping, budget {budget}")]
    ClampBudgetExceeded {
        time: f64,
        field: Field,
        clamped: f64,
        budget: f64,
    },

    #[error("mode {mode} requires {requirement}")]
    ModeMismatch {
        mode: &'static str,
        requirement: &'static str,
    },

    #[error("equilibrium component {field} is {value}; a positive value is required")]
    ZeroEquilibrium { field: Field, value: f64 },

    #[error("decay fit needs at least {required} samples inside the window, found {found}")]
    InsufficientSamples { found: usize, required: usize },

    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("could not start worker threads: {0}")]
    ThreadPool(String),

    #[error("{path}:{line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for the two step aborts raised while time stepping.
    pub fn is_runtime_abort(&self) -> bool {
        matches!(
            self,
            Error::PositivityFailure { .. } | Error::ClampBudgetExceeded { .. }
        )
    }
}
