use thiserror::Error;

/// Errors produced anywhere in the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DmtError {
    #[error("invalid constellation order {0} (expected 1..=7 bits per symbol)")]
    InvalidOrder(u8),

    #[error("framing error: {0}")]
    Framing(String),

    #[error("spectrum is not Hermitian-symmetric (max deviation {deviation:.3e})")]
    SymmetryViolation { deviation: f64 },

    #[error("degenerate signal: {0}")]
    DegenerateSignal(&'static str),

    #[error("synchronization failed: timing metric peak {peak:.3} below threshold {threshold:.3}")]
    SyncNotFound { peak: f64, threshold: f64 },

    #[error("training symbol has zero amplitude on modulated carrier {carrier}")]
    InvalidTrainingSymbol { carrier: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("requested {requested} bits per symbol but at most {max_achievable} can be loaded")]
    InfeasibleRate {
        requested: usize,
        max_achievable: usize,
    },

    #[error("malformed loading table: {0}")]
    Parse(String),
}

pub type Result<T, E = DmtError> = std::result::Result<T, E>;
