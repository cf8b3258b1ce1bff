use std::collections::BTreeMap;

use graph_core::{ClusterId, NodeId, PortId, Weight};
use sim_kernel::{Ctx, Entry, Network, Payload, Protocol, HEADER_BITS};

use crate::error::ToolboxError;
use crate::forest::Forest;

/// Lightest edge `(u, v)` leaving a fragment: `u` inside with cluster
/// `from`, `v` outside with cluster `to != from`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct MoeTuple {
    pub w: Weight,
    pub u: NodeId,
    pub v: NodeId,
    pub from: ClusterId,
    pub to: ClusterId,
}

impl MoeTuple {
    /// Words on the wire: endpoints, two-word weight, both cluster ids.
    pub const WORDS: u32 = 6;
}

#[derive(Debug, Clone)]
pub enum MoeMsg {
    /// Sender's id and cluster id, sent once on every edge.
    Hello { id: NodeId, cluster: ClusterId },
    Report(Option<MoeTuple>),
}

impl Payload for MoeMsg {
    fn bits(&self, word: u32) -> u32 {
        match self {
            MoeMsg::Hello { .. } => HEADER_BITS + 2 * word,
            MoeMsg::Report(None) => HEADER_BITS,
            MoeMsg::Report(Some(_)) => HEADER_BITS + MoeTuple::WORDS * word,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MoeOutcome {
    /// Result at every searching root.
    pub at_root: BTreeMap<NodeId, Option<MoeTuple>>,
    /// Neighbour ids and cluster ids, by port, as learned by every node.
    pub neighbours: Vec<Vec<(NodeId, ClusterId)>>,
    pub messages: u64,
}

struct Search<'f> {
    forest: &'f Forest,
    searching: Vec<bool>,
    heard: Vec<Vec<Option<(NodeId, ClusterId)>>>,
    missing: Vec<usize>,
    reports: Vec<usize>,
    best: Vec<Option<MoeTuple>>,
    at_root: BTreeMap<NodeId, Option<MoeTuple>>,
}

impl Search<'_> {
    fn progress(&mut self, ctx: &mut Ctx<'_, MoeMsg>) {
        let v = ctx.id();
        let vi = v as usize;
        if self.missing[vi] > 0 {
            return;
        }
        if !self.searching[vi] {
            ctx.terminate();
            return;
        }
        if self.reports[vi] > 0 {
            return;
        }
        let view = self.forest.view(v);
        for (p, slot) in self.heard[vi].iter().enumerate() {
            let (id, cluster) = slot.expect("all neighbours heard");
            if cluster != view.cluster_id {
                let cand = MoeTuple {
                    w: ctx.port_weight(p as PortId),
                    u: v,
                    v: id,
                    from: view.cluster_id,
                    to: cluster,
                };
                self.best[vi] = Some(self.best[vi].map_or(cand, |b| b.min(cand)));
            }
        }
        match view.parent {
            Some(p) => ctx.send(p, MoeMsg::Report(self.best[vi])),
            None => {
                self.at_root.insert(v, self.best[vi]);
            }
        }
        ctx.terminate();
    }
}

impl Protocol for Search<'_> {
    type Msg = MoeMsg;

    fn on_enter(&mut self, ctx: &mut Ctx<'_, MoeMsg>) {
        let view = self.forest.view(ctx.id());
        ctx.send_all(MoeMsg::Hello {
            id: ctx.id(),
            cluster: view.cluster_id,
        });
        self.progress(ctx);
    }

    fn on_message(&mut self, ctx: &mut Ctx<'_, MoeMsg>, port: PortId, msg: MoeMsg) {
        let vi = ctx.id() as usize;
        match msg {
            MoeMsg::Hello { id, cluster } => {
                self.heard[vi][port as usize] = Some((id, cluster));
                self.missing[vi] -= 1;
            }
            MoeMsg::Report(r) => {
                if let Some(r) = r {
                    self.best[vi] = Some(self.best[vi].map_or(r, |b| b.min(r)));
                }
                self.reports[vi] -= 1;
            }
        }
        self.progress(ctx);
    }
}

/// Every node tells each neighbour its id and cluster id; nodes of the
/// fragments whose roots are in `searching` then converge-cast the lightest
/// edge to a different cluster. Nodes of other fragments only answer.
pub fn find_moe(
    net: &mut Network<'_>,
    stage: u16,
    forest: &Forest,
    searching: &[NodeId],
) -> Result<MoeOutcome, ToolboxError> {
    let g = net.graph();
    let n = forest.len();
    let mut active = vec![false; n];
    for &r in searching {
        if !forest.view(r).root_flag {
            return Err(ToolboxError::NotARoot(r));
        }
    }
    for (v, slot) in active.iter_mut().enumerate() {
        *slot = searching.contains(&forest.fragment_of(v as NodeId));
    }
    let mut proto = Search {
        forest,
        reports: (0..n)
            .map(|v| if active[v] { forest.view(v as NodeId).children.len() } else { 0 })
            .collect(),
        searching: active,
        heard: g.nodes().map(|v| vec![None; g.degree(v)]).collect(),
        missing: g.nodes().map(|v| g.degree(v)).collect(),
        best: vec![None; n],
        at_root: BTreeMap::new(),
    };
    let entries: Vec<Entry> = g.nodes().map(|v| Entry::At(net.exit_time(v))).collect();
    let report = net.session(stage, &mut proto, &entries)?;
    Ok(MoeOutcome {
        at_root: proto.at_root,
        neighbours: proto
            .heard
            .into_iter()
            .map(|h| h.into_iter().map(|x| x.expect("every edge announced")).collect())
            .collect(),
        messages: report.messages,
    })
}
