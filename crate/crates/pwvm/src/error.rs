//! Error type shared by all pipeline stages.

use thiserror::Error;

/// Errors produced by graph ingestion, model evaluation, training and
/// evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("input contains no events")]
    EmptyInput,

    #[error("degenerate timeline: all events share a single timestamp")]
    DegenerateTimeline,

    #[error("split infeasible: nodes {nodes:?} would lose every training event")]
    SplitInfeasible { nodes: Vec<usize> },

    #[error("residual graph is empty after the split")]
    EmptyResidual,

    #[error("window [{lo}, {hi}] contains no events")]
    EmptyWindow { lo: f64, hi: f64 },

    #[error("negative sampling exhausted after {attempts} attempts for instance {index}")]
    NegativeSamplingExhausted { index: usize, attempts: usize },

    #[error("time {t} outside [0, {horizon}]")]
    TimeOutOfRange { t: f64, horizon: f64 },

    #[error("invalid interval: lower bound {lo} exceeds upper bound {hi}")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("self-loop: node {node} paired with itself")]
    SelfLoop { node: usize },

    #[error("dyad ({i}, {j}) outside node range 0..{num_nodes}")]
    DyadOutOfRange { i: usize, j: usize, num_nodes: usize },

    #[error("dimension mismatch: {what}")]
    DimensionMismatch { what: String },

    #[error("factorization failed: {what} (smallest eigenvalue estimate {min_eig:.3e})")]
    FactorizationFailed { what: String, min_eig: f64 },

    #[error("non-finite value encountered in {what}")]
    NonFinite { what: String },

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("batch size {batch} exceeds node count {num_nodes}")]
    BatchTooLarge { batch: usize, num_nodes: usize },

    #[error("scored set contains a single class")]
    SingleClass,

    #[error("optimization diverged and retries were exhausted")]
    Diverged,

    #[error("invalid configuration: {what}")]
    InvalidConfig { what: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
