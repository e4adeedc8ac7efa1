use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("configurations differ in shape: {0}")]
    Mismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("domain is empty")]
    EmptyDomain,
    #[error("{what} exceeded budget of {budget}")]
    BudgetExceeded { what: &'static str, budget: usize },
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("eigensolver did not converge")]
    Convergence,
    #[error("energy {energy} is resonant (distance {margin:e} to spectrum)")]
    Resonant { energy: f64, margin: f64 },
    #[error("pair is not weakly separated")]
    NotSeparated,
    #[error("need at least two values, got {0}")]
    TooFewValues(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
