use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed carpet description: {0}")]
    MalformedInput(String),

    #[error("invalid grid {m}x{n}: need 2 <= m < n")]
    InvalidGrid { m: u64, n: u64 },

    #[error("invalid columns: {0}")]
    InvalidColumns(String),

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("carpet has uniform vertical fibres")]
    UniformFibres,

    #[error("argument outside domain: {0}")]
    DomainError(String),

    #[error("no convergence after {iterations} iterations (target {target})")]
    NoConvergence { iterations: usize, target: f64 },

    #[error("invalid probability vector: {0}")]
    InvalidVector(String),

    #[error("closed form needs exactly two column types, carpet has {distinct}")]
    NotTwoColumnTypes { distinct: usize },

    #[error("t-sequence left the rate domain at index {index} (t = {t})")]
    DomainEscape { index: usize, t: f64 },

    #[error("no sign change of G on [{lo}, {hi}] (G = {g_lo}, {g_hi})")]
    BracketFailure { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },

    #[error("window index {window} exceeds depth limit {max}")]
    DepthLimit { window: usize, max: usize },

    #[error("alpha = {alpha} outside the open range ({min}, {max})")]
    AlphaOutOfRange { alpha: f64, min: f64, max: f64 },

    #[error("carpets are on different grids ({0})")]
    GridMismatch(String),

    #[error("index out of range: {0}")]
    IndexError(String),

    #[error("enumeration needs {needed} items, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
}

impl Error {
    /// Stable machine-readable code, used in the CLI error stream.
    pub fn code(&self) -> &'static str {
        match self {
            Error::MalformedInput(_) => "MalformedInput",
            Error::InvalidGrid { .. } => "InvalidGrid",
            Error::InvalidColumns(_) => "InvalidColumns",
            Error::Overflow(_) => "Overflow",
            Error::UniformFibres => "UniformFibres",
            Error::DomainError(_) => "DomainError",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::InvalidVector(_) => "InvalidVector",
            Error::NotTwoColumnTypes { .. } => "NotTwoColumnTypes",
            Error::DomainEscape { .. } => "DomainEscape",
            Error::BracketFailure { .. } => "BracketFailure",
            Error::DepthLimit { .. } => "DepthLimit",
            Error::AlphaOutOfRange { .. } => "AlphaOutOfRange",
            Error::GridMismatch(_) => "GridMismatch",
            Error::IndexError(_) => "IndexError",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
        }
    }
}
