use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FgsError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("inconsistent input: {0}")]
    InconsistentInput(String),
    #[error("unphysical state: {0}")]
    UnphysicalState(String),
    #[error("unattainable energy {energy}: attainable range is [{min}, {max}]")]
    UnattainableEnergy { energy: f64, min: f64, max: f64 },
    #[error("pathological product: condition number {condition:e} exceeds limit")]
    PathologicalProduct { condition: f64 },
    #[error("infinite energy mode: occupation {nu:e} of mode {mode} is pure and no cap was given")]
    InfiniteEnergyMode { mode: usize, nu: f64 },
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error("unsupported case: {0}")]
    UnsupportedCase(String),
    #[error("degenerate mode: {0}")]
    DegenerateMode(String),
    #[error("root finding failure: found {found} roots, expected {expected}")]
    RootFindingFailure { found: usize, expected: usize },
}

pub type Result<T> = std::result::Result<T, FgsError>;
