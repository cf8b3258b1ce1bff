//! The two cluster-level algorithms: shifted flooding (which is also the BFS
//! when only one cluster ever starts) and the tree merge.

use std::collections::BTreeMap;

use graph_core::{ClusterId, NodeId, PortId};
use sim_kernel::{Network, Payload, HEADER_BITS};
use toolbox::ToolboxError;

use crate::level::Merged;
use crate::rounds::{run_rounds, ClusterRounds, Local};

fn opt_words(present: bool, words: u32, word: u32) -> u32 {
    HEADER_BITS + 1 + if present { words * word } else { 0 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FloodDown(pub Option<ClusterId>);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FloodCross(pub Option<ClusterId>);

/// Smallest `(centre, sending cluster)` seen in the subtree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FloodUp(pub Option<(ClusterId, ClusterId)>);

impl Payload for FloodDown {
    fn bits(&self, word: u32) -> u32 {
        opt_words(self.0.is_some(), 1, word)
    }
}

impl Payload for FloodCross {
    fn bits(&self, word: u32) -> u32 {
        opt_words(self.0.is_some(), 1, word)
    }
}

impl Payload for FloodUp {
    fn bits(&self, word: u32) -> u32 {
        opt_words(self.0.is_some(), 2, word)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Joined {
    pub center: Option<ClusterId>,
    pub parent: Option<ClusterId>,
    pub round: Option<u32>,
}

struct FloodRounds<'l> {
    local: &'l Local,
    start: &'l BTreeMap<ClusterId, u32>,
    last_round: u32,
    joined: BTreeMap<ClusterId, Joined>,
}

impl ClusterRounds for FloodRounds<'_> {
    type Down = FloodDown;
    type Cross = FloodCross;
    type Up = FloodUp;

    fn begin(&mut self, root: NodeId, round: u32) -> (FloodDown, bool) {
        let j = self.joined.entry(root).or_default();
        let fresh = j.round.is_some_and(|r| r + 1 == round);
        let send = if fresh { j.center } else { None };
        (FloodDown(send), fresh || round >= self.last_round)
    }

    fn cross(&mut self, _: NodeId, _: PortId, down: &FloodDown) -> FloodCross {
        FloodCross(down.0)
    }

    fn fold(
        &mut self,
        v: NodeId,
        _: &FloodDown,
        inbox: Vec<(PortId, FloodCross)>,
        kids: Vec<(PortId, FloodUp)>,
    ) -> FloodUp {
        let peers = &self.local.peers[v as usize];
        let heard = inbox
            .into_iter()
            .filter_map(|(p, FloodCross(c))| c.map(|c| (c, peers[p as usize].1)));
        FloodUp(heard.chain(kids.into_iter().filter_map(|(_, FloodUp(u))| u)).min())
    }

    fn end(&mut self, root: NodeId, round: u32, FloodUp(best): FloodUp) {
        let j = self.joined.entry(root).or_default();
        if j.center.is_some() {
            return;
        }
        let own = self.start.get(&root).is_some_and(|&s| s == round);
        let pick = match best {
            Some((c, from)) if !own || c < root => Some((c, Some(from))),
            _ if own => Some((root, None)),
            _ => None,
        };
        if let Some((c, from)) = pick {
            *j = Joined {
                center: Some(c),
                parent: from,
                round: Some(round),
            };
        }
    }
}

/// Shifted flooding over the clusters of `local`: cluster `c` starts its own
/// wave at `start[c]` unless reached earlier; clusters missing from `start`
/// never start. Runs at most `last_round` rounds.
pub fn cluster_flood(
    net: &mut Network<'_>,
    stage: u16,
    local: &Local,
    start: &BTreeMap<ClusterId, u32>,
    last_round: u32,
) -> Result<(BTreeMap<ClusterId, Joined>, u32), ToolboxError> {
    let mut algo = FloodRounds {
        local,
        start,
        last_round,
        joined: BTreeMap::new(),
    };
    let rounds = run_rounds(net, stage, local, &mut algo)?;
    Ok((algo.joined, rounds))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MergeDown {
    /// New root of this cluster's tree and the name of the merged cluster.
    pub reroot: Option<(NodeId, ClusterId)>,
    pub super_parent: Option<ClusterId>,
    pub propose: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MergeCross {
    pub go: Option<ClusterId>,
    pub adopt: bool,
}

/// Smallest attachment candidate `(w, u, merged name)` in the subtree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MergeUp(pub Option<(NodeId, NodeId, ClusterId)>);

impl Payload for MergeDown {
    fn bits(&self, word: u32) -> u32 {
        HEADER_BITS
            + 3
            + word * (2 * self.reroot.is_some() as u32 + self.super_parent.is_some() as u32)
    }
}

impl Payload for MergeCross {
    fn bits(&self, word: u32) -> u32 {
        HEADER_BITS + 2 + word * self.go.is_some() as u32
    }
}

impl Payload for MergeUp {
    fn bits(&self, word: u32) -> u32 {
        opt_words(self.0.is_some(), 3, word)
    }
}

#[derive(Debug, Clone, Copy)]
enum Via {
    Here(Option<PortId>),
    Child(PortId),
}

/// Role of one cluster in the merge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MergeRole {
    pub in_tree: bool,
    pub super_parent: Option<ClusterId>,
}

struct MergeRounds<'l> {
    local: &'l Local,
    roles: &'l BTreeMap<ClusterId, MergeRole>,
    preferred: &'l [bool],
    cap: u32,
    reached: BTreeMap<ClusterId, (u32, NodeId, ClusterId)>,
    best: Vec<Option<((NodeId, NodeId, ClusterId), Via)>>,
    adopt_port: Vec<Option<PortId>>,
    parent: Vec<Option<PortId>>,
    children: Vec<Vec<PortId>>,
    name: Vec<Option<ClusterId>>,
}

impl ClusterRounds for MergeRounds<'_> {
    type Down = MergeDown;
    type Cross = MergeCross;
    type Up = MergeUp;

    fn begin(&mut self, root: NodeId, round: u32) -> (MergeDown, bool) {
        let role = self.roles[&root];
        let reached = self.reached.get(&root).copied();
        let reroot = reached.filter(|r| r.0 + 1 == round).map(|(_, w, x)| (w, x));
        let last = !role.in_tree || reached.is_some_and(|r| round >= r.0 + 2) || round >= self.cap;
        let down = MergeDown {
            reroot,
            super_parent: role.super_parent,
            propose: round == 1 && role.in_tree && role.super_parent.is_none(),
        };
        (down, last)
    }

    fn on_down(&mut self, v: NodeId, down: &MergeDown) {
        let vi = v as usize;
        let Some((w, x)) = down.reroot else { return };
        self.name[vi] = Some(x);
        if let Some(((bw, _, _), via)) = self.best[vi].take() {
            if bw != w {
                return;
            }
            let old = self.local.parent[vi];
            match via {
                Via::Child(c) => {
                    self.parent[vi] = Some(c);
                    self.children[vi].retain(|&k| k != c);
                }
                Via::Here(q) => {
                    self.parent[vi] = q;
                    self.adopt_port[vi] = q;
                }
            }
            if let Some(op) = old {
                self.children[vi].push(op);
            }
        }
    }

    fn cross(&mut self, v: NodeId, port: PortId, down: &MergeDown) -> MergeCross {
        MergeCross {
            go: down.reroot.map(|(_, x)| x),
            adopt: self.adopt_port[v as usize] == Some(port),
        }
    }

    fn fold(
        &mut self,
        v: NodeId,
        down: &MergeDown,
        inbox: Vec<(PortId, MergeCross)>,
        kids: Vec<(PortId, MergeUp)>,
    ) -> MergeUp {
        let vi = v as usize;
        self.adopt_port[vi] = None;
        let mut cands: Vec<((NodeId, NodeId, ClusterId), Via)> = Vec::new();
        if down.propose && self.preferred[vi] {
            cands.push(((v, v, v), Via::Here(None)));
        }
        for (p, x) in inbox {
            let (peer, peer_cluster) = self.local.peers[vi][p as usize];
            if x.adopt {
                self.children[vi].push(p);
            }
            if let Some(name) = x.go {
                if down.super_parent == Some(peer_cluster) {
                    cands.push(((v, peer, name), Via::Here(Some(p))));
                }
            }
        }
        for (p, MergeUp(u)) in kids {
            if let Some(t) = u {
                cands.push((t, Via::Child(p)));
            }
        }
        let best = cands.into_iter().min_by_key(|(t, _)| *t);
        self.best[vi] = best;
        MergeUp(best.map(|(t, _)| t))
    }

    fn end(&mut self, root: NodeId, round: u32, MergeUp(best): MergeUp) {
        if self.reached.contains_key(&root) || !self.roles[&root].in_tree {
            return;
        }
        if let Some((w, _, x)) = best {
            self.reached.insert(root, (round, w, x));
        }
    }
}

/// Asynchronous merge of cluster trees along the given trees of clusters.
/// Every cluster of `local` needs a role. Super-roots re-root at their
/// `preferred` member; the rest hang below their parent cluster through the
/// crossing edge `(w, u)` with the smallest `(id w, id u)`.
pub fn cluster_merge(
    net: &mut Network<'_>,
    stage: u16,
    local: &Local,
    roles: &BTreeMap<ClusterId, MergeRole>,
    preferred: &[bool],
    cap: u32,
) -> Result<(Merged, u32), ToolboxError> {
    let g = net.graph();
    let n = g.n();
    let mut algo = MergeRounds {
        local,
        roles,
        preferred,
        cap,
        reached: BTreeMap::new(),
        best: vec![None; n],
        adopt_port: vec![None; n],
        parent: local.parent.clone(),
        children: local.children.clone(),
        name: vec![None; n],
    };
    let rounds = run_rounds(net, stage, local, &mut algo)?;
    let mut merged = Merged {
        cluster: algo.name,
        parent: vec![None; n],
    };
    for v in g.nodes() {
        let vi = v as usize;
        if !roles[&local.cluster[vi]].in_tree || merged.cluster[vi].is_none() {
            merged.cluster[vi] = None;
            continue;
        }
        merged.parent[vi] = algo.parent[vi].map(|p| g.port(v, p).peer);
    }
    Ok((merged, rounds))
}
