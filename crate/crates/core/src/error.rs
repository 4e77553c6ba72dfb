//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node index {index} out of range for a graph with {n} nodes")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("self-loop on node {0}")]
    SelfLoop(usize),

    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),

    #[error("edge {{{0}, {1}}} has a zero or non-finite weight")]
    BadWeight(usize, usize),

    #[error(
        "node {node} has zero degree in the {which} graph; \
         extract the largest connected component, regularize (gamma > 0), \
         or select the unit-row zero-degree policy"
    )]
    IsolatedNode { node: usize, which: &'static str },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("dense evaluation refused: n = {n} exceeds the limit {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("pencil denominator is not positive definite (lower estimate of its smallest eigenvalue: {0:e})")]
    IndefinitePencil(f64),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParams(msg.into()))
}
