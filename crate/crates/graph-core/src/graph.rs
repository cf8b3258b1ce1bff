use std::collections::{HashSet, VecDeque};

use crate::error::GraphError;

/// Node identity. Nodes are numbered `0..n` and the number doubles as the ID.
pub type NodeId = u32;
pub type Weight = u64;
/// Local port number of an incident edge, in file order.
pub type PortId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    pub w: Weight,
}

impl Edge {
    pub fn other(&self, x: NodeId) -> NodeId {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }

    /// Endpoints ordered low-high.
    pub fn key(&self) -> (NodeId, NodeId) {
        (self.u.min(self.v), self.u.max(self.v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Port {
    pub edge: usize,
    pub peer: NodeId,
    /// Port number of this edge at `peer`.
    pub back: PortId,
}

/// Immutable undirected graph with distinct positive weights and per-node port lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    ports: Vec<Vec<Port>>,
}

impl WeightedGraph {
    /// Validates structure (range, loops, parallels, weights). Connectivity is
    /// checked separately by [`WeightedGraph::ensure_connected`].
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self, GraphError> {
        let mut seen_pairs = HashSet::with_capacity(edges.len());
        let mut seen_weights = HashSet::with_capacity(edges.len());
        let mut ports: Vec<Vec<Port>> = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            for x in [e.u, e.v] {
                if x as usize >= n {
                    return Err(GraphError::NodeOutOfRange { node: x, n });
                }
            }
            if e.u == e.v {
                return Err(GraphError::SelfLoop(e.u));
            }
            if e.w == 0 {
                return Err(GraphError::ZeroWeight(e.u, e.v));
            }
            if !seen_pairs.insert(e.key()) {
                return Err(GraphError::ParallelEdge(e.u, e.v));
            }
            if !seen_weights.insert(e.w) {
                return Err(GraphError::DuplicateWeight(e.w));
            }
            let pu = ports[e.u as usize].len() as PortId;
            let pv = ports[e.v as usize].len() as PortId;
            ports[e.u as usize].push(Port { edge: i, peer: e.v, back: pv });
            ports[e.v as usize].push(Port { edge: i, peer: e.u, back: pu });
        }
        Ok(Self { n, edges, ports })
    }

    /// Like [`WeightedGraph::new`] but also requires connectivity.
    pub fn connected(n: usize, edges: Vec<Edge>) -> Result<Self, GraphError> {
        let g = Self::new(n, edges)?;
        g.ensure_connected()?;
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> Edge {
        self.edges[i]
    }

    pub fn ports(&self, v: NodeId) -> &[Port] {
        &self.ports[v as usize]
    }

    pub fn port(&self, v: NodeId, p: PortId) -> Port {
        self.ports[v as usize][p as usize]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.ports[v as usize].len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        0..self.n as NodeId
    }

    /// Port at `v` leading to `peer`, if adjacent.
    pub fn port_to(&self, v: NodeId, peer: NodeId) -> Option<PortId> {
        self.ports[v as usize]
            .iter()
            .position(|p| p.peer == peer)
            .map(|p| p as PortId)
    }

    pub fn neighbors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.ports[v as usize].iter().map(|p| p.peer)
    }

    /// Unweighted BFS distances from `src`; `u32::MAX` marks unreachable nodes.
    pub fn bfs(&self, src: NodeId) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.n];
        let mut queue = VecDeque::new();
        dist[src as usize] = 0;
        queue.push_back(src);
        while let Some(x) = queue.pop_front() {
            let d = dist[x as usize];
            for y in self.neighbors(x) {
                if dist[y as usize] == u32::MAX {
                    dist[y as usize] = d + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.bfs(0).iter().all(|&d| d != u32::MAX)
    }

    pub fn ensure_connected(&self) -> Result<(), GraphError> {
        if self.n == 0 {
            return Err(GraphError::InvalidParams("graph has no nodes".into()));
        }
        if self.is_connected() {
            Ok(())
        } else {
            Err(GraphError::Disconnected)
        }
    }

    /// Index of the edge joining `a` and `b`.
    pub fn edge_between(&self, a: NodeId, b: NodeId) -> Option<usize> {
        self.port_to(a, b).map(|p| self.port(a, p).edge)
    }
}

/// Plain adjacency view used by round-based executors: vertex ids for tie-breaking
/// and neighbour lists in port order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    pub ids: Vec<u32>,
    pub adj: Vec<Vec<usize>>,
}

impl Topology {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn bfs(&self, src: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.len()];
        let mut queue = VecDeque::new();
        dist[src] = 0;
        queue.push_back(src);
        while let Some(x) = queue.pop_front() {
            for &y in &self.adj[x] {
                if dist[y] == u32::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Unweighted diameter, or `None` when disconnected.
    pub fn diameter(&self) -> Option<u32> {
        let mut best = 0;
        for s in 0..self.len() {
            for d in self.bfs(s) {
                if d == u32::MAX {
                    return None;
                }
                best = best.max(d);
            }
        }
        Some(best)
    }
}

impl From<&WeightedGraph> for Topology {
    fn from(g: &WeightedGraph) -> Self {
        Topology {
            ids: g.nodes().collect(),
            adj: (0..g.n())
                .map(|v| g.ports[v].iter().map(|p| p.peer as usize).collect())
                .collect(),
        }
    }
}
