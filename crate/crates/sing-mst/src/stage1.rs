use std::collections::BTreeMap;

use graph_core::NodeId;
use lds_tree::{st_cons_async, StConsConfig, StConsOutcome};
use sim_kernel::{Entry, Network};
use toolbox::{diam_calc, frag_bcast, leader_elect, Count, ElectionKind, Forest};

use crate::error::MstError;

pub const STAGE_ONE: u16 = 1;

#[derive(Debug, Clone)]
pub struct Preprocessed {
    pub leader: NodeId,
    /// Low-depth spanning tree rooted at the leader.
    pub tree: Forest,
    /// Hop diameter of `tree`.
    pub tree_diameter: u32,
    /// The diameter as stored at every node.
    pub known_diameter: Vec<Option<u32>>,
    pub construction: StConsOutcome,
}

/// Leader election, the low-depth tree rooted at the leader, and its
/// diameter broadcast to everyone. `entries` carries the wake-up schedule.
pub fn stage1(
    net: &mut Network<'_>,
    entries: &[Entry],
    tree_cfg: &StConsConfig,
) -> Result<Preprocessed, MstError> {
    let g = net.graph();
    let elected = leader_elect(net, STAGE_ONE, entries, ElectionKind::ReferenceFlooding)?;
    let leader = elected.leader;
    let construction = st_cons_async(net, STAGE_ONE, leader, tree_cfg)?;
    let tree = Forest::spanning(g, &construction.parent)?;
    let diam = diam_calc(net, STAGE_ONE, &tree)?;
    let d = diam[&leader];
    let told = frag_bcast(net, STAGE_ONE, &tree, &BTreeMap::from([(leader, Count(u64::from(d)))]))?;
    Ok(Preprocessed {
        leader,
        tree,
        tree_diameter: d,
        known_diameter: told.received.iter().map(|c| c.map(|c| c.0 as u32)).collect(),
        construction,
    })
}
