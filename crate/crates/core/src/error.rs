use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Grid dimensions or lengths out of range.
    InvalidGrid(String),
    /// A field or array does not match the shape the grid requires.
    InvalidField(String),
    /// A scalar parameter is out of its admissible range.
    InvalidParameter(String),
    /// A constraint can never be satisfied (e.g. a zero weight row whose bounds exclude 0).
    InfeasibleConstraint(String),
    /// An iterative linear solve did not reach its tolerance.
    LinearSolve { iterations: usize, residual: f64 },
    /// The iteration produced NaN or infinite values.
    NonFinite { iteration: usize },
    /// The run was cancelled through its cancellation flag.
    Cancelled { iteration: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidGrid(msg) => write!(f, "invalid grid: {msg}"),
            Error::InvalidField(msg) => write!(f, "invalid field: {msg}"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::InfeasibleConstraint(msg) => write!(f, "infeasible constraint: {msg}"),
            Error::LinearSolve { iterations, residual } => write!(
                f,
                "linear solve did not converge after {iterations} iterations (residual {residual:e})"
            ),
            Error::NonFinite { iteration } => {
                write!(f, "non-finite values in iterate at iteration {iteration}")
            }
            Error::Cancelled { iteration } => write!(f, "cancelled at iteration {iteration}"),
        }
    }
}

impl core::error::Error for Error {}
