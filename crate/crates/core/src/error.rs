use thiserror::Error;

use crate::rational::ExactRational;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid set spec: {0}")]
    InvalidSpec(String),

    #[error("requested {requested} points but the set is finite with {} points", available.len())]
    DepthExceedsFiniteSet {
        requested: usize,
        available: Vec<ExactRational>,
    },

    #[error("value needs {bits} bits, exceeding the budget of {budget} bits")]
    BitBudgetExceeded { bits: u64, budget: u64 },

    #[error("h = {h} lies below the smallest enumerated point {smallest}")]
    WindowNotCovered {
        h: Box<ExactRational>,
        smallest: Box<ExactRational>,
    },

    #[error("0 is an isolated point of the set")]
    ZeroIsolated,

    #[error("no gap reaches relative length 1 - {epsilon} within the window")]
    NoAdmissibleGaps { epsilon: ExactRational },

    #[error("sequence lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("tau value at index {index} is not a point of the set")]
    TauNotInSet { index: usize },

    #[error("sequence increases at index {index} inside the deep half")]
    NotAlmostDecreasing { index: usize },

    #[error("chain has {len} gaps; at least {min} are required")]
    ChainTooShort { len: usize, min: usize },

    #[error("rule does not have vanishing consecutive ratio: {0}")]
    RatioNotVanishing(String),

    #[error("factor {factor} makes points collide or reorder at index {index}")]
    FactorTooLarge { factor: ExactRational, index: usize },

    #[error("tau rule violates tau(n+1) <= 2^(-n^2) tau(n): {0}")]
    InvalidTauRule(String),

    #[error("invalid partition rule: {0}")]
    InvalidPartition(String),

    #[error("no index subsequence makes the family self-stable within the extraction budget")]
    NoStableSubsequenceAtDepth,

    #[error("candidate {index} has an unbounded ratio against the scaling sequence")]
    UnboundedCandidate { index: usize },

    #[error("empty family")]
    EmptyFamily,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
