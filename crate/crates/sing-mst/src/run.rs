use graph_core::{canonical_edge_set, NodeId, WeightedGraph};
use lds_tree::StConsConfig;
use sim_kernel::{mix, DelayKind, DelayModel, Network, RunReport, WakeupSchedule};

use crate::census::census;
use crate::error::MstError;
use crate::ghs::{controlled_ghs, GhsOutcome};
use crate::stage1::stage1;
use crate::stage3::{stage3, SoftMerge};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Wakeup {
    /// One node chosen at random wakes; the rest wait for messages.
    SingleRandom,
    AllAtZero,
    /// Independent uniform wake-up times in `[0, span]`.
    Staggered { span: f64 },
}

impl Wakeup {
    pub fn schedule(&self, n: usize, seed: u64) -> WakeupSchedule {
        match *self {
            Wakeup::SingleRandom => WakeupSchedule::single_random(n, seed),
            Wakeup::AllAtZero => WakeupSchedule::all_at_zero(n),
            Wakeup::Staggered { span } => WakeupSchedule::staggered_uniform(n, seed, span),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Wakeup::SingleRandom => "single_random",
            Wakeup::AllAtZero => "all_at_zero",
            Wakeup::Staggered { .. } => "staggered_uniform",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MstConfig {
    pub epsilon: f64,
    /// Shift rate for the spanning-tree construction; `None` uses the
    /// polylogarithmic rate, which is only practical for very small graphs.
    pub tree_beta: Option<f64>,
    pub delay: DelayKind,
    pub wakeup: Wakeup,
    pub seed: u64,
    pub event_budget: u64,
}

impl Default for MstConfig {
    fn default() -> Self {
        Self {
            epsilon: 1.0,
            tree_beta: Some(0.25),
            delay: DelayKind::Uniform,
            wakeup: Wakeup::SingleRandom,
            seed: 0,
            event_budget: 4_000_000_000,
        }
    }
}

/// What one node ends up knowing about the tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeMstOutput {
    /// Edges chosen between clusters.
    pub cluster_edges: Vec<usize>,
    /// Parent and child edges inside the node's base fragment.
    pub fragment_edges: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct MstRun {
    /// Kernel accounting; `output` holds the tree's edge indices.
    pub report: RunReport,
    /// Edge indices sorted by weight.
    pub mst: Vec<usize>,
    pub leader: NodeId,
    pub tree_diameter: u32,
    pub tree_depth: u32,
    pub ghs: GhsOutcome,
    pub base_fragments: u64,
    pub merge: SoftMerge,
    pub nodes: Vec<NodeMstOutput>,
}

/// Runs all three stages on one network and collects the tree from the
/// nodes' local outputs.
pub fn run_sing_mst(g: &WeightedGraph, cfg: &MstConfig) -> Result<MstRun, MstError> {
    g.ensure_connected()?;
    let delays = DelayModel::new(cfg.delay, mix(cfg.seed ^ 0xde1a), g.m());
    let mut net = Network::new(g, delays, cfg.seed, cfg.event_budget);
    let schedule = cfg.wakeup.schedule(g.n(), mix(cfg.seed ^ 0x3a4e));
    let entries = net.entries_from_schedule(&schedule)?;
    let tree_cfg = StConsConfig {
        epsilon: cfg.epsilon,
        beta: cfg.tree_beta,
        seed: mix(cfg.seed ^ 0x7ee5),
        ..StConsConfig::default()
    };
    let pre = stage1(&mut net, &entries, &tree_cfg)?;
    let ghs = controlled_ghs(&mut net, &pre.tree, pre.tree_diameter)?;
    let counted = census(&mut net, &pre.tree, pre.leader, &ghs.fragments)?;
    let merge = stage3(&mut net, &pre.tree, pre.leader, &ghs.fragments, &counted)?;

    let frags = &ghs.fragments;
    let nodes: Vec<NodeMstOutput> = g
        .nodes()
        .map(|v| {
            let view = frags.view(v);
            let mut fragment_edges: Vec<usize> = view
                .parent
                .iter()
                .chain(&view.children)
                .map(|&p| g.port(v, p).edge)
                .collect();
            fragment_edges.sort_unstable();
            NodeMstOutput {
                cluster_edges: merge.cluster_edges[v as usize].clone(),
                fragment_edges,
            }
        })
        .collect();
    let mst = canonical_edge_set(
        g,
        nodes.iter().flat_map(|o| o.cluster_edges.iter().chain(&o.fragment_edges).copied()),
    );
    let tree_depth = pre.tree.depths().into_iter().max().unwrap_or(0);
    let report = net.finish(mst.clone());
    Ok(MstRun {
        report,
        mst,
        leader: pre.leader,
        tree_diameter: pre.tree_diameter,
        tree_depth,
        ghs,
        base_fragments: counted.count,
        merge,
        nodes,
    })
}
