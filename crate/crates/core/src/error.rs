//! Error type shared by all toolkit modules.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Multilook or filter window contained no samples.
    #[error("empty sample window")]
    EmptyWindow,

    /// Invalid configuration value (window size, scene geometry, ...).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Jacobi eigendecomposition did not converge. Valid Hermitian PSD input
    /// always converges in a handful of sweeps, so this signals a bug or
    /// corrupted data upstream.
    #[error("eigendecomposition did not converge after {0} sweeps")]
    EigFailure(usize),

    /// Matrix eigenvalue fell below the PSD drift tolerance.
    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:e} below -{tolerance:e}")]
    NotPsd { eigenvalue: f64, tolerance: f64 },

    /// Coherency matrix with non-positive total power.
    #[error("zero-power pixel: coherency trace is not positive")]
    ZeroPowerPixel,

    /// A class id in 1..=K has no labeled pixels.
    #[error("class {0} has no labeled pixels")]
    MissingClass(u8),

    /// Too few labeled pixels to estimate a full-rank class center.
    #[error("class {class} has {got} labeled pixels, need at least {need}")]
    InsufficientClassSamples { class: u8, got: usize, need: usize },

    /// Class center stayed singular even after diagonal loading.
    #[error("class {0} center is singular after diagonal loading")]
    DegenerateClass(u8),

    /// SMO iteration cap exceeded.
    #[error("SMO did not converge within {0} iterations")]
    Convergence(usize),

    /// Non-finite value encountered in input data.
    #[error("non-finite input data: {0}")]
    Data(String),

    /// Cholesky pivot under the positive-definiteness threshold.
    #[error("Cholesky failed: pivot {pivot:e} below threshold {threshold:e}")]
    Cholesky { pivot: f64, threshold: f64 },

    /// Confusion-matrix evaluation found no labeled pixels.
    #[error("no labeled pixels to evaluate")]
    EmptyEvaluation,

    /// Malformed file contents; `offset` is the byte position of the defect.
    #[error("{}: {message} at byte offset {offset}", path.display())]
    Format {
        path: PathBuf,
        offset: u64,
        message: String,
    },

    /// I/O failure with the file that caused it.
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn format(path: impl Into<PathBuf>, offset: u64, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            offset,
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
