use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("node {node} out of range 1..={n}")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("empty seed set")]
    EmptySeeds,

    #[error("pruned process needs k <= m (k = {k}, m = {m})")]
    PrunedThreshold { k: usize, m: usize },

    #[error("alpha = {alpha} outside the regime alpha > 1 - 1/m for m = {m}")]
    Regime { m: usize, alpha: f64 },

    #[error("population overflow at depth {depth}: {population} exceeds cap {cap}")]
    PopulationOverflow { depth: usize, population: u64, cap: u64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("circuit rejected: {}", .0.join("; "))]
    Circuit(Vec<String>),

    #[error("threshold M = {given} infeasible, minimum feasible is {minimum}")]
    InfeasibleThreshold { given: u64, minimum: u64 },

    #[error("RNG stream collision between grid points {0} and {1}")]
    StreamCollision(String, String),

    #[error("wall-clock budget of {limit_secs:.1}s exceeded after {completed} of {total} tasks")]
    BudgetExceeded { limit_secs: f64, completed: usize, total: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
