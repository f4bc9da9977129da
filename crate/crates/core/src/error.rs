use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("pole: denominator vanishes at q = {0}")]
    Pole(f64),

    #[error("inexact division: {0}")]
    InexactDivision(String),

    #[error("polynomial is not homogeneous of degree {expected} at site {site}")]
    Inhomogeneous { site: usize, expected: u32 },

    #[error("value is not representable without radicals: {0}")]
    NotRadicalFree(String),

    #[error("memory budget exceeded: need ~{needed_mb} MB, budget {budget_mb} MB")]
    BudgetExceeded { needed_mb: u64, budget_mb: u64 },

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("formula mismatch: {0}")]
    FormulaMismatch(String),

    #[error("no spectral gap: |lambda_1| = {0} and |lambda_2| = {1} coincide within tolerance")]
    NoSpectralGap(f64, f64),

    #[error("unsupported spin S = {0}")]
    UnsupportedSpin(u32),
}

pub type Result<T> = std::result::Result<T, Error>;
