use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported projection: {0}")]
    UnsupportedProjection(String),

    #[error("iteration limit reached after {iterations} iterations (best value {best}, gap {gap})")]
    IterationLimit { iterations: usize, best: f64, gap: f64 },

    #[error("indeterminate intersection after {cycles} cycles (residual {residual}, displacement {displacement})")]
    Indeterminate {
        cycles: usize,
        residual: f64,
        displacement: f64,
    },

    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}
