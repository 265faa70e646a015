use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: String },

    #[error("ratio must exceed 1, got {0}")]
    RatioNotAboveOne(String),

    #[error("interval endpoint {0} outside [0, 1]")]
    EndpointOutOfRange(String),

    #[error("reversed interval [{lo}, {hi}]")]
    ReversedInterval { lo: String, hi: String },

    #[error("hypothesis p > q^2 fails for reduced ratio {p}/{q}")]
    HypothesisViolated { p: u64, q: u64 },

    #[error("no k <= {cap} satisfies the cover bound; parameters are corrupted")]
    KCapExceeded { cap: u32 },

    #[error("degenerate band: s = {0} must exceed 3")]
    DegenerateBand(String),

    #[error("offset index {u} out of range 0..{k}")]
    OffsetOutOfRange { u: u32, k: u32 },

    #[error("materialization needs {needed} raw intervals, budget is {budget}")]
    IntervalBudgetExceeded { needed: String, budget: u64 },

    #[error("node budget of {budget} exceeded")]
    NodeBudgetExceeded { budget: usize },

    #[error("no survivors at depth {depth}")]
    NoSurvivors { depth: usize },

    #[error("empty range {from}..={to}")]
    EmptyRange { from: u64, to: u64 },

    #[error("invalid bitstring: {0}")]
    InvalidBitstring(String),

    #[error("{0} must be at least 1")]
    ZeroArgument(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
