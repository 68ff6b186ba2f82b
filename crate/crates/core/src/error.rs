use thiserror::Error;

/// Errors surfaced by the solver library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    Domain { name: &'static str, reason: String },

    /// Problem data is inconsistent (e.g. initial data violating the boundary condition).
    #[error("configuration error: {0}")]
    Config(String),

    /// The banded factorization hit an exactly zero pivot.
    #[error("singular pivot in banded factorization at row {row}")]
    SingularPivot { row: usize },

    /// The fixed-point iteration did not reach the tolerance within the iteration cap.
    #[error("fixed-point iteration diverged at step {step}: last increment {last_increment:e} after {iterations} iterations")]
    StepDivergence {
        step: usize,
        iterations: usize,
        last_increment: f64,
    },

    /// A non-finite value appeared in an iterate.
    #[error("numerical blow-up (non-finite value) at step {step}, iteration {iteration}")]
    Blowup { step: usize, iteration: usize },

    /// An operation needing the exact solution was given a problem without one.
    #[error("problem `{0}` has no exact solution")]
    MissingExact(String),

    /// A refinement study failed on one of its rows.
    #[error("refinement row {param}: {source}")]
    Row {
        param: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures of the time-marching solver itself (divergence, blow-up,
    /// singular systems), as opposed to bad input.
    pub fn is_solver_failure(&self) -> bool {
        match self {
            Error::StepDivergence { .. } | Error::Blowup { .. } | Error::SingularPivot { .. } => {
                true
            }
            Error::Row { source, .. } => source.is_solver_failure(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
