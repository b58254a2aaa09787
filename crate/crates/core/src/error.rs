use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain where the operation is defined
    /// (a coefficient on or outside the unit circle, `z = 0`, a resonance
    /// inside the closed disk, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A malformed argument: odd matrix dimension, non power-of-two grid,
    /// a radius at or below one, and so on.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A numerical procedure did not reach its target.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The root finder hit its iteration cap. `partial` holds the last iterates.
    #[error("root finder did not converge after {iterations} iterations")]
    NoConvergence {
        iterations: usize,
        partial: Vec<num_complex::Complex64>,
    },

    /// Two quantities that must agree by construction do not.
    #[error("consistency check failed: {0}")]
    Consistency(String),

    /// A failure inside one stage of the reconstruction pipeline.
    #[error("reconstruction stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
