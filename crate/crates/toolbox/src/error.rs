use graph_core::{NodeId, PortId};
use sim_kernel::SimError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ToolboxError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("invalid forest: {0}")]
    Forest(String),
    #[error("node {node} has no route towards {dest}")]
    Unroutable { node: NodeId, dest: NodeId },
    #[error("node {node} sent {count} messages on port {port} in round {round}")]
    CrowdedPort {
        node: NodeId,
        port: PortId,
        round: u32,
        count: usize,
    },
    #[error("{0} is not the root of a fragment")]
    NotARoot(NodeId),
}
