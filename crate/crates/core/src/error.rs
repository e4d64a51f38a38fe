use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("photon truncation too small: tail weight {tail:.3e} beyond n_max = {n_max}")]
    Truncation { tail: f64, n_max: usize },

    #[error("phase error: {0}")]
    Phase(String),

    #[error("eigensolver did not converge at index {index} after {iterations} iterations")]
    NonConvergence { index: usize, iterations: usize },

    #[error("precursor detector failed: {0}")]
    Detector(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("target energy {target} outside attainable interval [{lo}, {hi}]")]
    Targeting { target: f64, lo: f64, hi: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("cache error: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;
