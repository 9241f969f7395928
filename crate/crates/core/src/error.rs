use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("party count {0} outside supported range 2..=12")]
    PartyCount(usize),
    #[error("party count {0} exceeds the dense-state limit of {max}", max = crate::qcore::DENSE_MAX_PARTIES)]
    DenseTooLarge(usize),
    #[error("alpha = {0} outside [0, pi/4]")]
    Alpha(f64),
    #[error("polar angle theta = {0} outside [0, pi]")]
    Theta(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("outcome {0} is not +1 or -1")]
    Outcome(i8),
    #[error("weight w = {0} outside the allowed range")]
    Weight(f64),
    #[error("invalid inequality constants: {0}")]
    Constants(String),
    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
