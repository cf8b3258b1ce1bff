// Shared fixtures; not every test binary uses every helper.
#![allow(dead_code)]

use graph_core::{generate_graph, kruskal_mst, Edge, GraphKind, WeightedGraph};
use sim_kernel::DelayKind;
use sing_mst::{run_sing_mst, MstConfig, MstRun, Wakeup};

pub fn graph(n: usize, edges: &[(u32, u32, u64)]) -> WeightedGraph {
    let edges = edges.iter().map(|&(u, v, w)| Edge { u, v, w }).collect();
    WeightedGraph::connected(n, edges).unwrap()
}

pub fn path(n: u32) -> WeightedGraph {
    graph(n as usize, &(1..n).map(|i| (i - 1, i, u64::from(i))).collect::<Vec<_>>())
}

pub fn er(n: usize, p: f64, seed: u64) -> WeightedGraph {
    generate_graph(GraphKind::ErdosRenyi { p }, n, seed).unwrap()
}

pub fn kind_graph(kind: GraphKind, n: usize, seed: u64) -> WeightedGraph {
    generate_graph(kind, n, seed).unwrap()
}

pub fn cfg(delay: DelayKind, wakeup: Wakeup, seed: u64) -> MstConfig {
    MstConfig {
        delay,
        wakeup,
        seed,
        ..MstConfig::default()
    }
}

pub fn run(g: &WeightedGraph, delay: DelayKind, seed: u64) -> MstRun {
    run_sing_mst(g, &cfg(delay, Wakeup::SingleRandom, seed)).unwrap()
}

pub fn oracle(g: &WeightedGraph) -> Vec<usize> {
    kruskal_mst(g)
}

pub const DELAYS: [DelayKind; 3] = [
    DelayKind::Unit,
    DelayKind::Uniform,
    DelayKind::LaggyEdge {
        slow_fraction: 0.2,
        fast_delay: 1e-3,
    },
];

pub fn net(g: &WeightedGraph, kind: DelayKind, seed: u64) -> sim_kernel::Network<'_> {
    sim_kernel::Network::new(g, sim_kernel::DelayModel::new(kind, seed, g.m()), seed, 500_000_000)
}

/// Edge index of every parent link in a forest.
pub fn forest_edges(g: &WeightedGraph, f: &toolbox::Forest) -> Vec<usize> {
    f.tree_edges()
        .into_iter()
        .map(|(a, b)| g.edge_between(a, b).unwrap())
        .collect()
}
