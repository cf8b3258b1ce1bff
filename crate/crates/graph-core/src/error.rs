use thiserror::Error;

use crate::NodeId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("node {node} out of range for n = {n}")]
    NodeOutOfRange { node: NodeId, n: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(NodeId),
    #[error("parallel edge between {0} and {1}")]
    ParallelEdge(NodeId, NodeId),
    #[error("weight {0} used more than once")]
    DuplicateWeight(u64),
    #[error("edge ({0}, {1}) has zero weight")]
    ZeroWeight(NodeId, NodeId),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("no connected sample after {0} attempts")]
    RetriesExhausted(u32),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
}
