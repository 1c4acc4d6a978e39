use thiserror::Error;

pub type Result<T> = std::result::Result<T, HeronError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HeronError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Division by a vanishing distance in the unperturbed MM weights.
    #[error("singular weight: iterate lies in target set {target} (distance {distance:e})")]
    SingularWeight { target: usize, distance: f64 },

    /// Neither the constraint nor any target is bounded, so a minimizer may not exist.
    #[error("problem is not coercive: the constraint set and every target set are unbounded")]
    Unbounded,

    #[error("grid search found no feasible grid point")]
    EmptyGrid,
}

pub(crate) fn invalid(msg: impl Into<String>) -> HeronError {
    HeronError::InvalidArgument(msg.into())
}
