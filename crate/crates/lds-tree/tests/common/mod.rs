// Shared fixtures; not every test binary uses every helper.
#![allow(dead_code)]

use std::collections::VecDeque;

use graph_core::{generate_graph, Edge, GraphKind, NodeId, WeightedGraph};
use sim_kernel::{DelayKind, DelayModel, Network};

pub fn graph(n: usize, edges: &[(u32, u32)]) -> WeightedGraph {
    let edges = edges
        .iter()
        .enumerate()
        .map(|(i, &(u, v))| Edge { u, v, w: i as u64 + 1 })
        .collect();
    WeightedGraph::connected(n, edges).unwrap()
}

pub fn path(n: u32) -> WeightedGraph {
    graph(n as usize, &(1..n).map(|i| (i - 1, i)).collect::<Vec<_>>())
}

pub fn star(leaves: u32) -> WeightedGraph {
    graph(leaves as usize + 1, &(1..=leaves).map(|i| (0, i)).collect::<Vec<_>>())
}

pub fn complete(n: u32) -> WeightedGraph {
    generate_graph(GraphKind::Complete, n as usize, 1).unwrap()
}

pub fn cycle(n: usize) -> WeightedGraph {
    generate_graph(GraphKind::Cycle { chords: 0 }, n, 1).unwrap()
}

pub fn er(n: usize, p: f64, seed: u64) -> WeightedGraph {
    generate_graph(GraphKind::ErdosRenyi { p }, n, seed).unwrap()
}

pub fn net(g: &WeightedGraph, kind: DelayKind, seed: u64) -> Network<'_> {
    Network::new(g, DelayModel::new(kind, seed, g.m()), seed, 200_000_000)
}

pub const DELAYS: [DelayKind; 4] = [
    DelayKind::Unit,
    DelayKind::Uniform,
    DelayKind::PerEdgeConstant,
    DelayKind::LaggyEdge {
        slow_fraction: 0.2,
        fast_delay: 1e-3,
    },
];

pub fn bfs_dist(adj: &[Vec<usize>], s: usize) -> Vec<u32> {
    let mut d = vec![u32::MAX; adj.len()];
    d[s] = 0;
    let mut q = VecDeque::from([s]);
    while let Some(x) = q.pop_front() {
        for &y in &adj[x] {
            if d[y] == u32::MAX {
                d[y] = d[x] + 1;
                q.push_back(y);
            }
        }
    }
    d
}

/// For each participant, the `(dist + start, id)`-minimal id over everybody.
pub fn brute_force_centres(adj: &[Vec<usize>], ids: &[u32], starts: &[u32]) -> Vec<u32> {
    let all: Vec<Vec<u32>> = (0..adj.len()).map(|u| bfs_dist(adj, u)).collect();
    (0..adj.len())
        .map(|v| {
            (0..adj.len())
                .filter(|&u| all[u][v] != u32::MAX)
                .map(|u| (all[u][v] + starts[u], ids[u]))
                .min()
                .unwrap()
                .1
        })
        .collect()
}

pub fn adjacency(g: &WeightedGraph) -> Vec<Vec<usize>> {
    g.nodes()
        .map(|v| g.ports(v).iter().map(|p| p.peer as usize).collect())
        .collect()
}

/// Checks a parent array is a spanning tree rooted at `root`; returns its depth.
pub fn spanning_depth(g: &WeightedGraph, parent: &[Option<NodeId>], root: NodeId) -> u32 {
    assert_eq!(parent[root as usize], None, "root has a parent");
    let mut depth = 0;
    for v in g.nodes() {
        let mut x = v;
        let mut d = 0;
        while let Some(p) = parent[x as usize] {
            assert!(g.port_to(x, p).is_some(), "{x} -> {p} is not an edge");
            x = p;
            d += 1;
            assert!(d <= g.n() as u32, "cycle through {v}");
        }
        assert_eq!(x, root, "{v} does not reach the root");
        depth = depth.max(d);
    }
    depth
}
