use alloc::string::String;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("value iteration did not converge after {iters} iterations (residual {residual:e})")]
    NotConverged { iters: usize, residual: f64 },

    #[error("policy enumeration needs {needed} policies, budget is {budget}; use a smaller MDP")]
    BudgetExceeded { needed: u128, budget: u64 },

    #[error("map parse error at row {row}, column {col}: {msg}")]
    MapParse { row: usize, col: usize, msg: String },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("too many tiers: {requested} requested but only {available} distinct distance values")]
    TooManyTiers { requested: usize, available: usize },

    #[error("tier count mismatch: reward has {reward} tiers, MDP has {mdp}")]
    TierMismatch { reward: usize, mdp: usize },

    #[error("horizon mismatch: {0} vs {1}")]
    HorizonMismatch(usize, usize),

    #[error("invalid MDP: {0}")]
    InvalidMdp(String),
}

pub type Result<T> = core::result::Result<T, Error>;
