use std::cmp::Ordering;
use std::collections::BTreeMap;

use graph_core::NodeId;
use sim_kernel::Network;
use toolbox::{beta_pulse, frag_bcast, tree_count, upcast_until, Count, Forest, Gather, Routes};

use crate::error::MstError;
use crate::ghs::STAGE_TWO;

#[derive(Debug, Clone)]
pub struct Census {
    /// Number of base fragments, known to every node afterwards.
    pub count: u64,
    /// Fragment id to size, as gathered at the leader.
    pub sizes: BTreeMap<NodeId, u64>,
    /// Which child port of the spanning tree leads to each fragment root.
    pub routes: Routes,
    pub known: Vec<Option<u64>>,
}

/// Counts the base fragments: every fragment root sends its id and size up
/// the spanning tree, and the leader stops listening once the sizes cover
/// all `n` nodes.
pub fn census(net: &mut Network<'_>, tree: &Forest, leader: NodeId, frags: &Forest) -> Result<Census, MstError> {
    let n = net.graph().n() as u64;
    let sizes = beta_pulse(net, STAGE_TWO, tree, |net| Ok::<_, MstError>(tree_count(net, STAGE_TWO, frags)?))?;
    let items = sizes.iter().map(|(&r, &k)| (r, Count(k))).collect();
    let up = beta_pulse(net, STAGE_TWO, tree, |net| {
        Ok::<_, MstError>(upcast_until(net, STAGE_TWO, tree, items, &[leader], |_, bag| {
            match bag.iter().map(|(_, c)| c.0).sum::<u64>().cmp(&n) {
                Ordering::Less => Gather::Waiting,
                Ordering::Equal => Gather::Complete,
                Ordering::Greater => Gather::Overflow,
            }
        })?)
    })?;
    let gathered: BTreeMap<NodeId, u64> = up.at_root[&leader].iter().map(|&(r, c)| (r, c.0)).collect();
    let total: u64 = gathered.values().sum();
    if total != n {
        return Err(MstError::Census { got: total, n: n as usize });
    }
    let count = gathered.len() as u64;
    let told = beta_pulse(net, STAGE_TWO, tree, |net| {
        Ok::<_, MstError>(frag_bcast(net, STAGE_TWO, tree, &BTreeMap::from([(leader, Count(count))]))?)
    })?;
    Ok(Census {
        count,
        sizes: gathered,
        routes: up.routes,
        known: told.received.iter().map(|c| c.map(|c| c.0)).collect(),
    })
}
