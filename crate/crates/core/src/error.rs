use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("state {state} out of range for n = {n}")]
    StateOutOfRange { state: usize, n: usize },

    #[error("action (ns = {ell}, s = {k}) infeasible in state {state} with n = {n}")]
    InfeasibleAction {
        ell: usize,
        k: usize,
        state: usize,
        n: usize,
    },

    #[error("agent {0} has no neighbors")]
    IsolatedAgent(usize),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("spend {cost} exceeds budget {budget}")]
    Overspend { cost: u64, budget: u64 },

    #[error("{what} too large: {size} exceeds limit {limit}")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("no policy entry for epoch {epoch}, state {state}, budget {budget}")]
    PolicyMiss {
        epoch: usize,
        state: String,
        budget: u64,
    },

    #[error("budget {0} is not on the successor grid")]
    BudgetOffGrid(u64),

    #[error("invalid simulation config: {0}")]
    InvalidSimConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
