use graph_core::{induced_cluster_graph, ClusterGraph, ClusterId, NodeId, Partition, Topology, WeightedGraph};

use crate::error::LdsError;
use crate::mpx::flood_sync;

/// Clusters of one level, each spanned by a tree rooted at the node whose id
/// names the cluster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelState {
    pub level: u32,
    pub partition: Partition,
}

impl LevelState {
    pub fn initial(n: usize) -> Self {
        Self {
            level: 0,
            partition: Partition::singletons(n),
        }
    }

    pub fn cluster_graph(&self, g: &WeightedGraph) -> ClusterGraph {
        induced_cluster_graph(g, &self.partition).expect("level partition matches graph")
    }

    pub fn topology(&self, g: &WeightedGraph) -> Topology {
        self.cluster_graph(g).topology()
    }
}

/// Grouping of the level's clusters (indexed as in [`LevelState::topology`])
/// into trees of clusters. `center[c] = None` leaves cluster `c` out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperTrees {
    pub center: Vec<Option<ClusterId>>,
    pub parent: Vec<Option<usize>>,
}

/// Node-level trees after merging; `cluster[v] = None` for nodes left out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Merged {
    pub cluster: Vec<Option<ClusterId>>,
    pub parent: Vec<Option<NodeId>>,
}

impl Merged {
    pub fn covers_all(&self) -> bool {
        self.cluster.iter().all(Option::is_some)
    }

    pub fn into_partition(self, g: &WeightedGraph) -> Result<Partition, LdsError> {
        let cluster = self
            .cluster
            .iter()
            .enumerate()
            .map(|(v, c)| c.ok_or_else(|| LdsError::Inconsistent(format!("node {v} left uncovered"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Partition::new(g, cluster, self.parent)?)
    }

    pub fn depth_of(&self, v: NodeId) -> u32 {
        let mut x = v;
        let mut d = 0;
        while let Some(p) = self.parent[x as usize] {
            x = p;
            d += 1;
        }
        d
    }
}

/// Crossing edge `(w in child, u in parent)` with the smallest `(id w, id u)`.
pub fn attach_edge(
    g: &WeightedGraph,
    p: &Partition,
    child: ClusterId,
    parent: ClusterId,
) -> Option<(NodeId, NodeId)> {
    g.edges()
        .iter()
        .filter_map(|e| {
            let (cu, cv) = (p.cluster_of(e.u), p.cluster_of(e.v));
            if cu == child && cv == parent {
                Some((e.u, e.v))
            } else if cv == child && cu == parent {
                Some((e.v, e.u))
            } else {
                None
            }
        })
        .min()
}

/// Flips parent pointers on the path from `w` to its root so `w` becomes root.
pub fn reroot(parent: &mut [Option<NodeId>], w: NodeId) {
    let mut prev: Option<NodeId> = None;
    let mut x = Some(w);
    while let Some(cur) = x {
        let next = parent[cur as usize];
        parent[cur as usize] = prev;
        prev = Some(cur);
        x = next;
    }
}

/// Sequential reference of the merge: each child cluster re-roots at the
/// endpoint of its chosen crossing edge and hangs below the parent cluster's
/// endpoint; each super-root re-roots at `preferred(cluster id)`.
pub fn transform_sync(
    g: &WeightedGraph,
    level: &LevelState,
    t: &Topology,
    trees: &SuperTrees,
    preferred: impl Fn(ClusterId) -> NodeId,
) -> Result<Merged, LdsError> {
    check_trees(t, trees)?;
    let p = &level.partition;
    let index: std::collections::BTreeMap<ClusterId, usize> =
        t.ids.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut parent = p.parents().to_vec();
    let mut hook: Vec<Option<NodeId>> = vec![None; t.len()];
    let mut top: Vec<Option<NodeId>> = vec![None; t.len()];
    for (ci, &c) in t.ids.iter().enumerate() {
        if trees.center[ci].is_none() {
            continue;
        }
        let (w, u) = match trees.parent[ci] {
            None => {
                let w = preferred(c);
                if p.cluster_of(w) != c {
                    return Err(LdsError::Inconsistent(format!("preferred root {w} is outside cluster {c}")));
                }
                (w, None)
            }
            Some(pi) => {
                let (w, u) = attach_edge(g, p, c, t.ids[pi]).ok_or_else(|| {
                    LdsError::Inconsistent(format!("clusters {c} and {} are not adjacent", t.ids[pi]))
                })?;
                (w, Some(u))
            }
        };
        reroot(&mut parent, w);
        hook[ci] = Some(w);
        top[ci] = u;
    }
    let mut cluster = vec![None; g.n()];
    for v in g.nodes() {
        let ci = index[&p.cluster_of(v)];
        if trees.center[ci].is_none() {
            parent[v as usize] = None;
            continue;
        }
        let mut r = ci;
        while let Some(pi) = trees.parent[r] {
            r = pi;
        }
        cluster[v as usize] = hook[r];
    }
    for (ci, w) in hook.iter().enumerate() {
        if let Some(w) = w {
            parent[*w as usize] = top[ci];
        }
    }
    Ok(Merged { cluster, parent })
}

fn check_trees(t: &Topology, trees: &SuperTrees) -> Result<(), LdsError> {
    if trees.center.len() != t.len() || trees.parent.len() != t.len() {
        return Err(LdsError::Inconsistent(format!(
            "{} clusters but {} centres / {} parents",
            t.len(),
            trees.center.len(),
            trees.parent.len()
        )));
    }
    for ci in 0..t.len() {
        match (trees.center[ci], trees.parent[ci]) {
            (None, Some(_)) => {
                return Err(LdsError::Inconsistent(format!("cluster {} has a parent but no centre", t.ids[ci])))
            }
            (Some(c), None) if c != t.ids[ci] => {
                return Err(LdsError::Inconsistent(format!("root cluster {} names centre {c}", t.ids[ci])))
            }
            (Some(c), Some(pi)) => {
                if !t.adj[ci].contains(&pi) {
                    return Err(LdsError::Inconsistent(format!(
                        "parent {} of cluster {} is not adjacent",
                        t.ids[pi], t.ids[ci]
                    )));
                }
                if trees.center[pi] != Some(c) {
                    return Err(LdsError::Inconsistent(format!(
                        "cluster {} and its parent disagree on the centre",
                        t.ids[ci]
                    )));
                }
            }
            _ => {}
        }
    }
    for start in 0..t.len() {
        let mut x = start;
        let mut steps = 0;
        while let Some(pi) = trees.parent[x] {
            x = pi;
            steps += 1;
            if steps > t.len() {
                return Err(LdsError::Inconsistent(format!("parent cycle through cluster {}", t.ids[start])));
            }
        }
    }
    Ok(())
}

/// BFS layers over the clusters of a level, as trees of clusters indexed like
/// [`LevelState::topology`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterBfs {
    pub topology: Topology,
    pub trees: SuperTrees,
    /// Layer of each cluster, `None` if beyond the budget.
    pub layer: Vec<Option<u32>>,
}

/// Lock-step BFS from `root_cluster`, at most `budget` layers deep.
pub fn bfs_cluster_stage(
    g: &WeightedGraph,
    level: &LevelState,
    root_cluster: ClusterId,
    budget: u32,
) -> Result<ClusterBfs, LdsError> {
    let t = level.topology(g);
    if !t.ids.contains(&root_cluster) {
        return Err(LdsError::Inconsistent(format!("no cluster named {root_cluster}")));
    }
    let starts: Vec<u32> = t
        .ids
        .iter()
        .map(|&c| if c == root_cluster { 1 } else { u32::MAX })
        .collect();
    let f = flood_sync(&t.adj, &t.ids, &starts, budget.saturating_add(1));
    Ok(ClusterBfs {
        layer: f.join_round.iter().map(|r| r.map(|r| r - 1)).collect(),
        trees: SuperTrees {
            center: f.center,
            parent: f.parent,
        },
        topology: t,
    })
}
