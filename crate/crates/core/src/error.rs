use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("resource limit: sieving to {limit} needs ~{needed} bytes, budget is {budget}")]
    ResourceLimit { limit: u64, needed: u64, budget: u64 },

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("segment plan [{lo}, {hi}] does not tile [2, {limit}]")]
    PlanMismatch { lo: u64, hi: u64, limit: u64 },

    #[error("argument order: expected q > p >= 2, got p = {p}, q = {q}")]
    ArgumentOrder { p: u64, q: u64 },

    #[error("gap stream not contiguous: expected n = {expected}, got n = {got}")]
    Contiguity { expected: u64, got: u64 },

    #[error("record tracker is empty")]
    EmptyTracker,

    #[error("unknown claim: {0}")]
    UnknownClaim(String),

    #[error("root finding failed to converge: {0}")]
    Convergence(String),

    #[error("invariant violated at n = {n}: {detail}")]
    Invariant { n: u64, detail: String },

    #[error("checkpoint schema version mismatch: file has {found}, expected {expected}")]
    SchemaVersion { found: u32, expected: u32 },

    #[error("checkpoint corrupted: {0}")]
    Corruption(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
