// Shared fixtures; not every test binary uses every helper.
#![allow(dead_code)]

use graph_core::{generate_graph, Edge, GraphKind, NodeId, Partition, WeightedGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sim_kernel::{DelayKind, DelayModel, Network};
use toolbox::Forest;

pub fn graph(n: usize, edges: &[(u32, u32)]) -> WeightedGraph {
    let edges = edges
        .iter()
        .enumerate()
        .map(|(i, &(u, v))| Edge { u, v, w: i as u64 + 1 })
        .collect();
    WeightedGraph::connected(n, edges).unwrap()
}

pub fn star(leaves: u32) -> WeightedGraph {
    graph(leaves as usize + 1, &(1..=leaves).map(|i| (0, i)).collect::<Vec<_>>())
}

pub fn path(n: u32) -> WeightedGraph {
    graph(n as usize, &(1..n).map(|i| (i - 1, i)).collect::<Vec<_>>())
}

/// Complete binary tree with `levels` levels, heap numbering.
pub fn binary_tree(levels: u32) -> WeightedGraph {
    let n = (1u32 << levels) - 1;
    graph(n as usize, &(1..n).map(|i| ((i - 1) / 2, i)).collect::<Vec<_>>())
}

/// Tree rooted at `root` following BFS parents.
pub fn bfs_tree(g: &WeightedGraph, root: NodeId) -> Forest {
    let p = Partition::whole(g, root);
    Forest::spanning(g, p.parents()).unwrap()
}

/// BFS tree from node 0 cut at random edges; each fragment is its own cluster.
pub fn random_forest(g: &WeightedGraph, cuts: f64, seed: u64) -> Forest {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let whole = Partition::whole(g, 0);
    let mut parent: Vec<Option<NodeId>> = whole.parents().to_vec();
    for p in parent.iter_mut() {
        if p.is_some() && rng.gen_bool(cuts) {
            *p = None;
        }
    }
    let mut root: Vec<NodeId> = g.nodes().collect();
    for v in g.nodes() {
        let mut x = v;
        while let Some(p) = parent[x as usize] {
            x = p;
        }
        root[v as usize] = x;
    }
    Forest::from_parents(g, &parent, &root).unwrap()
}

pub fn random_tree_graph(n: usize, seed: u64) -> WeightedGraph {
    generate_graph(GraphKind::TreePlusEdges { extra: 0 }, n, seed).unwrap()
}

pub fn net(g: &WeightedGraph, kind: DelayKind, seed: u64) -> Network<'_> {
    Network::new(g, DelayModel::new(kind, seed, g.m()), seed, 50_000_000)
}
