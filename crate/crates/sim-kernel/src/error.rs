use graph_core::{NodeId, PortId};
use thiserror::Error;

use crate::time::SimTime;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("event budget of {budget} exhausted at t={at}; {queued} events queued, next: {snapshot:?}")]
    BudgetExceeded {
        budget: u64,
        at: SimTime,
        queued: usize,
        snapshot: Vec<String>,
    },
    #[error("node {node} sent {bits} bits on port {port}, bound is {bound}")]
    PayloadTooLarge {
        node: NodeId,
        port: PortId,
        bits: u32,
        bound: u32,
    },
    #[error("node {node} has no port {port}")]
    BadPort { node: NodeId, port: PortId },
    #[error("node {node} received a stage-{stage} message after terminating that stage")]
    MessageAfterTermination { node: NodeId, stage: u16 },
    #[error("node {node} received a message in a stage it does not take part in")]
    UnexpectedParticipant { node: NodeId },
    #[error("stage {stage} went quiet with nodes {nodes:?} not terminated")]
    Stalled { stage: u16, nodes: Vec<NodeId> },
    #[error("wake-up schedule has {got} entries for {n} nodes or wakes nobody")]
    BadSchedule { n: usize, got: usize },
    #[error("protocol failure at node {node}: {reason}")]
    Protocol { node: NodeId, reason: String },
}

/// Raised by [`crate::account`] when counters disagree.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IntegrityError {
    #[error("message_count {total} differs from per-stage sum {per_stage}")]
    StageSum { total: u64, per_stage: u64 },
    #[error("{sent} envelopes sent but {delivered} delivered")]
    SentDelivered { sent: u64, delivered: u64 },
    #[error("run reports termination but {0} events remain queued")]
    QueueNotEmpty(usize),
    #[error("stage {stage} ends at {end} after completion {completion}")]
    StageOutsideRun {
        stage: u16,
        end: SimTime,
        completion: SimTime,
    },
}
