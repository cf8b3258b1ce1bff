use std::collections::{BTreeMap, BTreeSet};

use graph_core::{ClusterId, Dsu, NodeId, PortId};
use sim_kernel::Network;
use toolbox::{beta_pulse, downcast, find_moe, frag_bcast, upcast, Forest, MoeTuple};

use crate::census::Census;
use crate::error::MstError;
use crate::exchange::exchange;
use crate::ghs::ceil_log2;
use crate::payload::{Flag, MoeValue, Verdict};

pub const STAGE_THREE: u16 = 3;

#[derive(Debug, Clone)]
pub struct SoftMerge {
    pub phases: u32,
    /// Clusters at the leader after each phase.
    pub clusters: Vec<usize>,
    /// Edges each node marked as selected between clusters.
    pub cluster_edges: Vec<Vec<usize>>,
    /// Final cluster id of every node.
    pub cluster_of: Vec<ClusterId>,
}

fn pulse<T>(
    net: &mut Network<'_>,
    tree: &Forest,
    body: impl FnOnce(&mut Network<'_>) -> Result<T, MstError>,
) -> Result<T, MstError> {
    beta_pulse(net, STAGE_THREE, tree, body)
}

/// The leader's view of the base fragments: cluster per fragment. Merges
/// along every cluster's lightest proposed edge; the smallest cluster id
/// names each merged cluster.
pub fn leader_merge(
    cluster_of: &mut BTreeMap<NodeId, ClusterId>,
    proposals: &BTreeMap<NodeId, Option<MoeTuple>>,
) -> Result<BTreeMap<NodeId, Verdict>, MstError> {
    let mut best: BTreeMap<ClusterId, (MoeTuple, NodeId)> = BTreeMap::new();
    for (&f, p) in proposals {
        let Some(m) = *p else { continue };
        let c = cluster_of[&f];
        if m.from != c || m.to == c {
            return Err(MstError::protocol("soft merge", format!("fragment {f} proposed {m:?} from cluster {c}")));
        }
        let e = best.entry(c).or_insert((m, f));
        if m < e.0 {
            *e = (m, f);
        }
    }
    let ids: Vec<ClusterId> = cluster_of.values().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let index = |c: ClusterId| ids.binary_search(&c).expect("known cluster");
    let mut dsu = Dsu::new(ids.len());
    for (m, _) in best.values() {
        dsu.union(index(m.from), index(m.to));
    }
    let mut named: BTreeMap<usize, ClusterId> = BTreeMap::new();
    for &c in &ids {
        named.entry(dsu.find(index(c))).or_insert(c);
    }
    let mut verdicts = BTreeMap::new();
    for (&f, c) in cluster_of.iter_mut() {
        let chosen = best.get(c).filter(|(_, by)| *by == f).map(|(m, _)| (m.u, m.v));
        *c = named[&dsu.find(index(*c))];
        verdicts.insert(
            f,
            Verdict {
                cluster: *c,
                edge: chosen,
            },
        );
    }
    Ok(verdicts)
}

/// Stage III: clusters of base fragments merge Boruvka-style under the
/// leader's direction for `ceil(log2 n)` phases, without touching the
/// fragment trees; the chosen edges end up at both endpoints.
pub fn stage3(
    net: &mut Network<'_>,
    tree: &Forest,
    leader: NodeId,
    frags: &Forest,
    census: &Census,
) -> Result<SoftMerge, MstError> {
    let g = net.graph();
    let n = g.n();
    let s = STAGE_THREE;
    let phases = ceil_log2(n as u64);
    let roots = frags.roots();
    let parents = frags.parent_nodes().to_vec();
    let mut cluster: Vec<ClusterId> = (0..n as NodeId).map(|v| frags.fragment_of(v)).collect();
    let mut marked: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let mut at_leader: BTreeMap<NodeId, ClusterId> = census.sizes.keys().map(|&f| (f, f)).collect();
    let expected = BTreeMap::from([(leader, census.count as usize)]);
    let mut clusters = Vec::new();
    for _ in 0..phases {
        let current = Forest::from_parents(g, &parents, &cluster)?;
        let found = pulse(net, tree, |net| Ok(find_moe(net, s, &current, &roots)?.at_root))?;
        let items = roots.iter().map(|&r| (r, MoeValue(found[&r]))).collect();
        let up = pulse(net, tree, |net| Ok(upcast(net, s, tree, items, &expected)?))?;
        let proposals = up.at_root[&leader].iter().map(|&(f, m)| (f, m.0)).collect();
        let verdicts = leader_merge(&mut at_leader, &proposals)?;
        clusters.push(at_leader.values().collect::<BTreeSet<_>>().len());
        let outgoing = BTreeMap::from([(leader, verdicts.into_iter().collect::<Vec<_>>())]);
        let delivered = pulse(net, tree, |net| Ok(downcast(net, s, tree, &up.routes, outgoing)?.delivered))?;
        let per_root: BTreeMap<NodeId, Verdict> = roots
            .iter()
            .map(|&r| match delivered[r as usize].as_slice() {
                [v] => Ok((r, *v)),
                other => Err(MstError::protocol("soft merge", format!("root {r} got {} verdicts", other.len()))),
            })
            .collect::<Result<_, _>>()?;
        let told = pulse(net, tree, |net| Ok(frag_bcast(net, s, frags, &per_root)?.received))?;
        for v in 0..n {
            let vd = told[v].expect("every fragment hears its verdict");
            cluster[v] = vd.cluster;
            if let Some((a, b)) = vd.edge {
                if a as usize == v {
                    let e = g.edge_between(a, b).ok_or_else(|| MstError::protocol("soft merge", "edge not in graph"))?;
                    marked[v].insert(e);
                }
            }
        }
    }
    let left = at_leader.values().collect::<BTreeSet<_>>().len();
    if left > 1 {
        return Err(MstError::Unfinished { clusters: left });
    }
    // Both endpoints of every selected edge learn it.
    let sends = (0..n as NodeId)
        .map(|v| {
            g.ports(v)
                .iter()
                .enumerate()
                .map(|(p, port)| (p as PortId, Flag(marked[v as usize].contains(&port.edge))))
                .collect()
        })
        .collect();
    let expect: Vec<usize> = (0..n as NodeId).map(|v| g.degree(v)).collect();
    let inbox = pulse(net, tree, |net| Ok(exchange(net, s, sends, &expect)?))?;
    for (v, list) in inbox.into_iter().enumerate() {
        for (p, f) in list {
            if f.0 {
                marked[v].insert(g.port(v as NodeId, p).edge);
            }
        }
    }
    Ok(SoftMerge {
        phases,
        clusters,
        cluster_edges: marked.into_iter().map(|s| s.into_iter().collect()).collect(),
        cluster_of: cluster,
    })
}
