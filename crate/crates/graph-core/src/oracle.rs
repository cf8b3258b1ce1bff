//! Sequential reference computations used to check the distributed protocols.

use crate::error::GraphError;
use crate::graph::{NodeId, WeightedGraph};

#[derive(Debug, Clone)]
pub struct Dsu {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl Dsu {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Maximum over node pairs of the unweighted distance.
pub fn hop_diameter(g: &WeightedGraph) -> Result<u32, GraphError> {
    g.ensure_connected()?;
    let mut best = 0;
    for s in g.nodes() {
        best = best.max(*g.bfs(s).iter().max().unwrap_or(&0));
    }
    Ok(best)
}

/// Eccentricity of `v` (connected graphs only).
pub fn eccentricity(g: &WeightedGraph, v: NodeId) -> u32 {
    g.bfs(v).into_iter().max().unwrap_or(0)
}

/// Edge indices of the unique MST, sorted by weight.
pub fn kruskal_mst(g: &WeightedGraph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.m()).collect();
    order.sort_by_key(|&i| g.edge(i).w);
    let mut dsu = Dsu::new(g.n());
    order
        .into_iter()
        .filter(|&i| {
            let e = g.edge(i);
            dsu.union(e.u as usize, e.v as usize)
        })
        .collect()
}

/// Sorts edge indices by weight and removes duplicates.
pub fn canonical_edge_set(g: &WeightedGraph, edges: impl IntoIterator<Item = usize>) -> Vec<usize> {
    let mut v: Vec<usize> = edges.into_iter().collect();
    v.sort_by_key(|&i| g.edge(i).w);
    v.dedup();
    v
}

/// Diameter in hops of the tree containing `start`, by double sweep.
pub fn tree_diameter(adj: &[Vec<usize>], start: usize) -> u32 {
    let far = |src: usize| -> (usize, u32) {
        let mut dist = std::collections::HashMap::new();
        let mut stack = vec![src];
        dist.insert(src, 0u32);
        let mut best = (src, 0);
        while let Some(x) = stack.pop() {
            let d = dist[&x];
            if d > best.1 {
                best = (x, d);
            }
            for &y in &adj[x] {
                if !dist.contains_key(&y) {
                    dist.insert(y, d + 1);
                    stack.push(y);
                }
            }
        }
        best
    };
    let (a, _) = far(start);
    far(a).1
}
