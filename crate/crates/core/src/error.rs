use thiserror::Error;

/// Errors produced across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// Exact cocircularity or collinearity met while building a triangulation.
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    /// Perturbed polygon lost convex position.
    #[error("point set is not in convex position")]
    NotConvex,
    #[error("degenerate halfspace system: {0}")]
    DegenerateSystem(String),
    #[error("sample budget exhausted: estimate {estimate} with standard error {standard_error} > target {target}")]
    BudgetExceeded {
        estimate: f64,
        standard_error: f64,
        target: f64,
    },
    #[error("quadrature did not converge: {coarse} vs {fine}")]
    AccuracyFailure { coarse: f64, fine: f64 },
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
