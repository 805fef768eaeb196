use thiserror::Error;

use crate::controller::Trajectory;
use crate::estimator::ChainEstimate;
use crate::model::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("instance failed validation with {} violation(s)", .0.violations.len())]
    Validation(ValidationReport),

    /// The constrained MLE stopped at its iteration cap. `best` is the last
    /// strictly feasible iterate.
    #[error("CMLE did not converge after {iterations} iterations (duality gap {gap:.3e})")]
    Convergence {
        iterations: usize,
        gap: f64,
        best: Box<ChainEstimate>,
    },

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("mixing assumption violated: {0}")]
    AssumptionViolated(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// A failure during an episode, with the steps executed before it.
    #[error("episode failed at t = {}: {source}", .partial.steps.len())]
    Episode {
        #[source]
        source: Box<Error>,
        partial: Box<Trajectory>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
