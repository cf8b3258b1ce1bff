mod common;

use std::collections::BTreeMap;

use common::*;
use graph_core::{hop_diameter, NodeId};
use lds_tree::StConsConfig;
use sim_kernel::{DelayKind, WakeupSchedule};
use sing_mst::*;
use toolbox::{Forest, MoeTuple};

fn preprocess(g: &graph_core::WeightedGraph, seed: u64) -> (sim_kernel::Network<'_>, Preprocessed) {
    let mut net = net(g, DelayKind::Uniform, seed);
    let entries = net.entries_from_schedule(&WakeupSchedule::single_random(g.n(), seed)).unwrap();
    let cfg = StConsConfig {
        beta: Some(0.25),
        seed,
        ..StConsConfig::default()
    };
    let pre = stage1(&mut net, &entries, &cfg).unwrap();
    (net, pre)
}

#[test]
fn single_node_elects_itself() {
    let g = graph(1, &[]);
    let (_, pre) = preprocess(&g, 0);
    assert_eq!(pre.leader, 0);
    assert_eq!(pre.tree_diameter, 0);
    assert_eq!(pre.known_diameter, vec![Some(0)]);
}

#[test]
fn star_tree_diameter_is_one_or_two() {
    let g = graph(6, &[(0, 1, 1), (0, 2, 2), (0, 3, 3), (0, 4, 4), (0, 5, 5)]);
    let (_, pre) = preprocess(&g, 3);
    assert!(matches!(pre.tree_diameter, 1 | 2));
    assert_eq!(pre.tree.roots(), vec![pre.leader]);
}

#[test]
fn tree_diameter_is_at_least_half_the_graph_diameter() {
    for seed in 0..10 {
        let g = er(128, 0.1, seed);
        let d = hop_diameter(&g).unwrap();
        let (_, pre) = preprocess(&g, seed);
        assert!(pre.tree_diameter >= d.div_ceil(2), "seed {seed}");
        assert!(pre.known_diameter.iter().all(|&k| k == Some(pre.tree_diameter)));
        assert_eq!(pre.tree.roots(), vec![pre.leader]);
        // Flooding election keeps the largest id.
        assert_eq!(pre.leader, 127);
    }
}

fn blocks(g: &graph_core::WeightedGraph, size: u32) -> Forest {
    let n = g.n() as u32;
    let parents: Vec<Option<NodeId>> = (0..n).map(|v| (v % size != 0).then(|| v - 1)).collect();
    let clusters: Vec<u32> = (0..n).map(|v| v - v % size).collect();
    Forest::from_parents(g, &parents, &clusters).unwrap()
}

#[test]
fn census_of_one_fragment() {
    let g = path(9);
    let tree = blocks(&g, 9);
    let mut net = net(&g, DelayKind::Uniform, 1);
    let c = census(&mut net, &tree, 0, &tree).unwrap();
    assert_eq!(c.count, 1);
    assert_eq!(c.sizes, BTreeMap::from([(0, 9)]));
    assert!(c.known.iter().all(|&k| k == Some(1)));
}

#[test]
fn census_of_equal_blocks() {
    let g = path(12);
    let tree = blocks(&g, 12);
    let frags = blocks(&g, 3);
    let mut net = net(&g, DelayKind::Uniform, 2);
    let c = census(&mut net, &tree, 0, &frags).unwrap();
    assert_eq!(c.count, 4);
    assert!(c.sizes.values().all(|&s| s == 3));
    // Node 1 routes towards every other fragment root through its child.
    assert_eq!(c.routes[1].len(), 3);
}

#[test]
fn two_fragments_merge_over_their_only_edge() {
    let g = path(4);
    let tree = blocks(&g, 4);
    let frags = blocks(&g, 2);
    let mut net = net(&g, DelayKind::Uniform, 5);
    let c = census(&mut net, &tree, 0, &frags).unwrap();
    let m = stage3(&mut net, &tree, 0, &frags, &c).unwrap();
    assert_eq!(m.phases, 2);
    assert_eq!(m.clusters, vec![1, 1]);
    let bridge = g.edge_between(1, 2).unwrap();
    assert_eq!(m.cluster_edges[1], vec![bridge]);
    assert_eq!(m.cluster_edges[2], vec![bridge]);
    assert!(m.cluster_edges[0].is_empty() && m.cluster_edges[3].is_empty());
    assert!(m.cluster_of.iter().all(|&c| c == 0));
}

#[test]
fn one_cluster_makes_merging_a_no_op() {
    let g = path(4);
    let tree = blocks(&g, 4);
    let mut net = net(&g, DelayKind::Uniform, 5);
    let c = census(&mut net, &tree, 0, &tree).unwrap();
    let m = stage3(&mut net, &tree, 0, &tree, &c).unwrap();
    assert!(m.cluster_edges.iter().all(Vec::is_empty));
    assert_eq!(m.clusters, vec![1, 1]);
}

fn tuple(w: u64, u: NodeId, v: NodeId, from: u32, to: u32) -> MoeTuple {
    MoeTuple { w, u, v, from, to }
}

#[test]
fn leader_merge_takes_each_clusters_lightest_proposal() {
    // Fragments 0, 3, 6 in clusters 0, 0, 6 and fragment 9 alone.
    let mut at = BTreeMap::from([(0, 0), (3, 0), (6, 6), (9, 9)]);
    let proposals = BTreeMap::from([
        (0, Some(tuple(7, 1, 6, 0, 6))),
        (3, Some(tuple(4, 4, 9, 0, 9))),
        (6, Some(tuple(7, 6, 1, 6, 0))),
        (9, Some(tuple(4, 9, 4, 9, 0))),
    ]);
    let v = leader_merge(&mut at, &proposals).unwrap();
    // Cluster 0 picks weight 4 (from fragment 3), cluster 6 weight 7, cluster 9 weight 4.
    assert_eq!(v[&0].edge, None);
    assert_eq!(v[&3].edge, Some((4, 9)));
    assert_eq!(v[&6].edge, Some((6, 1)));
    assert_eq!(v[&9].edge, Some((9, 4)));
    assert!(at.values().all(|&c| c == 0));
    assert!(v.values().all(|x| x.cluster == 0));
}

#[test]
fn leader_merge_rejects_a_proposal_inside_a_cluster() {
    let mut at = BTreeMap::from([(0, 0), (3, 0)]);
    let proposals = BTreeMap::from([(0, Some(tuple(1, 0, 3, 0, 0))), (3, None)]);
    assert!(leader_merge(&mut at, &proposals).is_err());
}

#[test]
fn exchange_delivers_by_port() {
    let g = path(3);
    let mut net = net(&g, DelayKind::Uniform, 0);
    // Node 1 sends to both neighbours; they answer.
    let sends = vec![vec![(0, Flag(true))], vec![(0, Flag(false)), (1, Flag(true))], vec![(0, Flag(false))]];
    let inbox = exchange(&mut net, 0, sends, &[1, 2, 1]).unwrap();
    assert_eq!(inbox[0], vec![(0, Flag(false))]);
    assert_eq!(inbox[2], vec![(0, Flag(true))]);
    let mut mid = inbox[1].clone();
    mid.sort_by_key(|x| x.0);
    assert_eq!(mid, vec![(0, Flag(true)), (1, Flag(false))]);
    assert_eq!(net.messages(), 4);
}

#[test]
fn exchange_detects_a_missing_message() {
    let g = path(2);
    let mut net = net(&g, DelayKind::Unit, 0);
    let sends = vec![vec![(0, Flag(true))], vec![]];
    assert!(exchange(&mut net, 0, sends, &[1, 1]).is_err());
}
