use thiserror::Error;

use crate::graph::EdgeId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("not connected")]
    NotConnected,
    #[error("tied lengths: edges {0} and {1} share length {2}")]
    TiedLengths(EdgeId, EdgeId, f64),
    #[error("degenerate query: endpoints coincide ({0})")]
    DegenerateQuery(usize),
    #[error("bridge edge: removing edge {0} disconnects its endpoints")]
    BridgeEdge(EdgeId),
    #[error("insufficient candidates: need {needed} positive excesses, have {available}")]
    InsufficientCandidates { needed: usize, available: usize },
    #[error("exhausted candidates before k swaps: accepted {accepted} of {requested}")]
    ExhaustedCandidates { accepted: usize, requested: usize },
    #[error("instance too large for enumeration: {0}")]
    InstanceTooLarge(String),
    #[error("k infeasible: no spanning tree differs from the MST in {0} edges")]
    InfeasibleK(usize),
    #[error("cutoff too small: candidate graph at radius {0} is disconnected")]
    CutoffTooSmall(f64),
    #[error("unknown distribution tag: {0}")]
    UnknownDistribution(String),
    #[error("size overflow: {0}")]
    Overflow(String),
    #[error("run aborted: {failed} of {total} replicas failed")]
    Aborted { failed: usize, total: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
