use thiserror::Error;

/// Errors raised by game construction, dynamics, simulation and verification.
#[derive(Debug, Error)]
pub enum Error {
    /// A builder or operation received parameters outside its domain.
    #[error("invalid parameter: {0}")]
    Domain(String),

    #[error("player {player} out of range 1..={players}")]
    PlayerOutOfRange { player: usize, players: usize },

    #[error("invalid joint strategy: {0}")]
    InvalidStrategy(String),

    /// A scheduler, policy or machine was asked to act outside its contract.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("state space of {required} nodes exceeds the node budget of {budget}")]
    BudgetExceeded { required: u128, budget: u64 },

    #[error("correspondence violation at machine move {index}: {reason}")]
    Correspondence { index: usize, reason: String },

    #[error("replay failed at step {index}: {reason}")]
    Replay { index: usize, reason: String },

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("config: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
