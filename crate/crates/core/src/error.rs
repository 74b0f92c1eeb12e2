use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("UAV and AP coincide with zero altitude; path loss undefined")]
    PathLossDomain,

    #[error("matrix is not positive semi-definite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("no uplink data phase: tau_e = {tau_e} leaves nothing of tau_c - tau_p = {available}")]
    NoDataPhase { tau_e: f64, available: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
