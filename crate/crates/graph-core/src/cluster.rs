use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use crate::error::GraphError;
use crate::graph::{NodeId, Topology, WeightedGraph};

pub type ClusterId = u32;

/// Disjoint clusters over the nodes, each with a rooted spanning tree given by
/// parent pointers (`None` at the root).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    cluster_of: Vec<ClusterId>,
    parent: Vec<Option<NodeId>>,
}

impl Partition {
    /// Checks that every cluster has one root, parent pointers stay inside the
    /// cluster along graph edges, and there are no cycles.
    pub fn new(
        g: &WeightedGraph,
        cluster_of: Vec<ClusterId>,
        parent: Vec<Option<NodeId>>,
    ) -> Result<Self, GraphError> {
        let bad = |m: String| Err(GraphError::InvalidPartition(m));
        if cluster_of.len() != g.n() || parent.len() != g.n() {
            return bad(format!(
                "expected {} entries, got {} clusters / {} parents",
                g.n(),
                cluster_of.len(),
                parent.len()
            ));
        }
        let mut roots: BTreeMap<ClusterId, NodeId> = BTreeMap::new();
        for v in g.nodes() {
            match parent[v as usize] {
                None => {
                    if roots.insert(cluster_of[v as usize], v).is_some() {
                        return bad(format!("cluster {} has two roots", cluster_of[v as usize]));
                    }
                }
                Some(p) => {
                    if p as usize >= g.n() || g.port_to(v, p).is_none() {
                        return bad(format!("parent {p} of {v} is not a neighbour"));
                    }
                    if cluster_of[p as usize] != cluster_of[v as usize] {
                        return bad(format!("parent {p} of {v} lies in another cluster"));
                    }
                }
            }
        }
        for v in g.nodes() {
            if !roots.contains_key(&cluster_of[v as usize]) {
                return bad(format!("cluster {} has no root", cluster_of[v as usize]));
            }
            let mut x = v;
            let mut steps = 0;
            while let Some(p) = parent[x as usize] {
                x = p;
                steps += 1;
                if steps > g.n() {
                    return bad(format!("parent pointers from {v} form a cycle"));
                }
            }
        }
        Ok(Self { cluster_of, parent })
    }

    /// Every node alone in a cluster named by its own id.
    pub fn singletons(n: usize) -> Self {
        Self {
            cluster_of: (0..n as ClusterId).collect(),
            parent: vec![None; n],
        }
    }

    /// One cluster holding every node, spanned by a BFS tree from `root`.
    pub fn whole(g: &WeightedGraph, root: NodeId) -> Self {
        let mut parent = vec![None; g.n()];
        let mut seen = vec![false; g.n()];
        let mut queue = VecDeque::from([root]);
        seen[root as usize] = true;
        while let Some(x) = queue.pop_front() {
            for y in g.neighbors(x) {
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    parent[y as usize] = Some(x);
                    queue.push_back(y);
                }
            }
        }
        Self {
            cluster_of: vec![root; g.n()],
            parent,
        }
    }

    pub fn n(&self) -> usize {
        self.cluster_of.len()
    }

    pub fn cluster_of(&self, v: NodeId) -> ClusterId {
        self.cluster_of[v as usize]
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.parent[v as usize]
    }

    pub fn assignment(&self) -> &[ClusterId] {
        &self.cluster_of
    }

    pub fn parents(&self) -> &[Option<NodeId>] {
        &self.parent
    }

    /// Members of each cluster, keyed by cluster id.
    pub fn clusters(&self) -> BTreeMap<ClusterId, Vec<NodeId>> {
        let mut out: BTreeMap<ClusterId, Vec<NodeId>> = BTreeMap::new();
        for (v, &c) in self.cluster_of.iter().enumerate() {
            out.entry(c).or_default().push(v as NodeId);
        }
        out
    }

    pub fn root_of(&self, v: NodeId) -> NodeId {
        let mut x = v;
        while let Some(p) = self.parent[x as usize] {
            x = p;
        }
        x
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

    /// One line per node: `node cluster parent_node_or_-1`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (v, &c) in self.cluster_of.iter().enumerate() {
            let p = self.parent[v].map_or(-1, |p| p as i64);
            let _ = writeln!(s, "{v} {c} {p}");
        }
        s
    }
}

/// Simple graph on clusters; one witness edge per adjacency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterGraph {
    pub nodes: Vec<ClusterId>,
    pub adjacency: BTreeMap<ClusterId, BTreeSet<ClusterId>>,
    /// Keyed by `(low, high)` cluster pair; the edge is oriented `(in low, in high)`.
    pub witness: BTreeMap<(ClusterId, ClusterId), (NodeId, NodeId)>,
}

impl ClusterGraph {
    pub fn edge_count(&self) -> usize {
        self.witness.len()
    }

    /// Vertices in increasing cluster id; neighbours also sorted by id.
    pub fn topology(&self) -> Topology {
        let index: BTreeMap<ClusterId, usize> =
            self.nodes.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        Topology {
            ids: self.nodes.clone(),
            adj: self
                .nodes
                .iter()
                .map(|c| self.adjacency[c].iter().map(|d| index[d]).collect())
                .collect(),
        }
    }
}

/// Clusters are adjacent iff some original edge crosses between them.
pub fn induced_cluster_graph(g: &WeightedGraph, p: &Partition) -> Result<ClusterGraph, GraphError> {
    if p.n() != g.n() {
        return Err(GraphError::InvalidPartition(format!(
            "partition covers {} of {} nodes",
            p.n(),
            g.n()
        )));
    }
    let mut adjacency: BTreeMap<ClusterId, BTreeSet<ClusterId>> = BTreeMap::new();
    for v in g.nodes() {
        adjacency.entry(p.cluster_of(v)).or_default();
    }
    let mut witness = BTreeMap::new();
    for e in g.edges() {
        let (cu, cv) = (p.cluster_of(e.u), p.cluster_of(e.v));
        if cu == cv {
            continue;
        }
        adjacency.get_mut(&cu).unwrap().insert(cv);
        adjacency.get_mut(&cv).unwrap().insert(cu);
        let key = (cu.min(cv), cu.max(cv));
        let oriented = if cu < cv { (e.u, e.v) } else { (e.v, e.u) };
        witness.entry(key).or_insert(oriented);
    }
    Ok(ClusterGraph {
        nodes: adjacency.keys().copied().collect(),
        adjacency,
        witness,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterStats {
    pub cluster: ClusterId,
    pub size: usize,
    /// Diameter inside the induced subgraph; `None` if that subgraph is disconnected.
    pub strong_diameter: Option<u32>,
    pub tree_depth: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionReport {
    pub clusters: Vec<ClusterStats>,
    pub cut_edges: usize,
    pub cut_fraction: f64,
    /// Clusters whose strong diameter exceeds the limit (or is infinite).
    pub oversized: Vec<ClusterId>,
}

impl PartitionReport {
    pub fn max_strong_diameter(&self) -> Option<u32> {
        self.clusters
            .iter()
            .map(|c| c.strong_diameter)
            .try_fold(0, |acc, d| d.map(|d| acc.max(d)))
    }

    pub fn max_tree_depth(&self) -> u32 {
        self.clusters.iter().map(|c| c.tree_depth).max().unwrap_or(0)
    }
}

pub fn validate_partition(g: &WeightedGraph, p: &Partition, max_strong_diam: u32) -> PartitionReport {
    let cut_edges = g
        .edges()
        .iter()
        .filter(|e| p.cluster_of(e.u) != p.cluster_of(e.v))
        .count();
    let mut clusters = Vec::new();
    let mut oversized = Vec::new();
    for (c, members) in p.clusters() {
        let diam = strong_diameter(g, p, &members);
        let tree_depth = members.iter().map(|&v| p.depth_of(v)).max().unwrap_or(0);
        if diam.is_none_or(|d| d > max_strong_diam) {
            oversized.push(c);
        }
        clusters.push(ClusterStats {
            cluster: c,
            size: members.len(),
            strong_diameter: diam,
            tree_depth,
        });
    }
    PartitionReport {
        clusters,
        cut_edges,
        cut_fraction: if g.m() == 0 {
            0.0
        } else {
            cut_edges as f64 / g.m() as f64
        },
        oversized,
    }
}

fn strong_diameter(g: &WeightedGraph, p: &Partition, members: &[NodeId]) -> Option<u32> {
    let c = p.cluster_of(members[0]);
    let mut dist = vec![u32::MAX; g.n()];
    let mut best = 0;
    for &s in members {
        for &v in members {
            dist[v as usize] = u32::MAX;
        }
        dist[s as usize] = 0;
        let mut queue = VecDeque::from([s]);
        let mut reached = 1;
        while let Some(x) = queue.pop_front() {
            for y in g.neighbors(x) {
                if p.cluster_of(y) == c && dist[y as usize] == u32::MAX {
                    dist[y as usize] = dist[x as usize] + 1;
                    best = best.max(dist[y as usize]);
                    reached += 1;
                    queue.push_back(y);
                }
            }
        }
        if reached != members.len() {
            return None;
        }
    }
    Some(best)
}
