mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use graph_core::{GraphKind, NodeId, WeightedGraph};
use proptest::prelude::*;
use sim_kernel::DelayKind;
use sing_mst::*;

#[test]
fn small_helpers() {
    assert_eq!(log_star(1), 0);
    assert_eq!(log_star(2), 1);
    assert_eq!(log_star(16), 3);
    assert_eq!(log_star(65536), 4);
    assert_eq!(log_star(65537), 5);
    assert_eq!(coloring_rounds(256), 18);
    assert_eq!(ceil_log2(0), 0);
    assert_eq!(ceil_log2(1), 0);
    assert_eq!(ceil_log2(5), 3);
    assert_eq!(ceil_log2(8), 3);
    // ceil(log2 sqrt n) against ceil(log2 D').
    assert_eq!(ghs_phase_count(1, 0), 0);
    assert_eq!(ghs_phase_count(2, 1), 1);
    assert_eq!(ghs_phase_count(16, 3), 2);
    assert_eq!(ghs_phase_count(17, 3), 3);
    assert_eq!(ghs_phase_count(16, 9), 4);
}

#[test]
fn cole_vishkin_step() {
    // 0b1010 vs parent 0b1000: lowest differing bit 1, own bit 1 -> 3.
    assert_eq!(cv_step(0b1010, Some(0b1000)), 3);
    // Roots compare in bit 0.
    assert_eq!(cv_step(0b1010, None), 0);
    assert_eq!(cv_step(0b1011, None), 1);
}

fn check_cv(parents: &[Option<usize>], ids: &[u64]) -> Result<(), String> {
    let mut color = ids.to_vec();
    for _ in 0..coloring_rounds(parents.len()) {
        color = (0..parents.len())
            .map(|v| cv_step(color[v], parents[v].map(|p| color[p])))
            .collect();
    }
    for (v, p) in parents.iter().enumerate() {
        if color[v] >= 6 {
            return Err(format!("node {v} colour {}", color[v]));
        }
        if let Some(p) = *p {
            if color[p] == color[v] {
                return Err(format!("{v} and its parent {p} share {}", color[v]));
            }
        }
    }
    Ok(())
}

proptest! {
    #[test]
    fn cole_vishkin_reaches_six_colours(
        raw in prop::collection::vec((any::<bool>(), any::<prop::sample::Index>()), 1..300),
        salt in any::<u64>(),
    ) {
        let n = raw.len();
        let parents: Vec<Option<usize>> = raw
            .iter()
            .enumerate()
            .map(|(v, (root, ix))| (v > 0 && !root).then(|| ix.index(v)))
            .collect();
        // Distinct ids, as fragment ids are.
        let ids: Vec<u64> = (0..n as u64).map(|v| v.wrapping_mul(2654435761) ^ (salt & 0xffff_0000)).collect();
        prop_assert!(check_cv(&parents, &ids).is_ok());
    }
}

/// Every invariant a Stage II phase must satisfy, checked from a snapshot.
fn check_phase(g: &WeightedGraph, s: &PhaseSnapshot, mst: &BTreeSet<usize>) {
    let n = g.n();
    let i = s.phase;
    // Activity equals the offline diameter rule.
    let before_diam = fragment_diameters(g, &s.before);
    for (r, &a) in &s.activity {
        assert_eq!(a, u64::from(before_diam[r]) <= 1u64 << i, "phase {i} fragment {r}");
    }
    // Proposals only from active fragments, each the true lightest outgoing edge.
    for (&r, m) in &s.proposed {
        assert!(s.activity[&r]);
        let frag = |v: NodeId| s.before.fragment_of(v);
        let lightest = g
            .edges()
            .iter()
            .filter(|e| (frag(e.u) == r) != (frag(e.v) == r))
            .map(|e| e.w)
            .min();
        assert_eq!(Some(m.w), lightest);
        assert!(mst.contains(&g.edge_between(m.u, m.v).unwrap()));
    }
    // Supergraph parents follow proposals.
    for (&r, &p) in &s.supergraph {
        if let Some(p) = p {
            assert_eq!(s.proposed[&r].to, p);
            assert_ne!(s.colors[&r], s.colors[&p], "colour clash {r}-{p}");
        }
        assert!(s.colors[&r] < 6);
    }
    // Matching: supergraph edges, disjoint, maximal.
    let mut seen = BTreeSet::new();
    for &(p, c) in &s.matching {
        assert_eq!(s.supergraph[&c], Some(p));
        assert!(seen.insert(p) && seen.insert(c));
    }
    for (&r, &p) in &s.supergraph {
        if let Some(p) = p {
            assert!(seen.contains(&r) || seen.contains(&p), "edge {r}-{p} uncovered");
        }
    }
    // Re-added edges come from unmatched active fragments with a proposal.
    for r in &s.readded {
        assert!(s.activity[r] && !seen.contains(r) && s.proposed.contains_key(r));
    }
    // Soundness and the guarantees.
    for e in forest_edges(g, &s.after) {
        assert!(mst.contains(&e), "phase {i} fragment edge {e} not in the MST");
    }
    assert!(s.fragments() as u64 <= (n as u64) >> i.min(63) || i == 0);
    // Every fragment id is its root and the smallest id it absorbed.
    for r in s.after.roots() {
        let members: Vec<NodeId> = g.nodes().filter(|&v| s.after.fragment_of(v) == r).collect();
        let least = members.iter().map(|&v| s.before.fragment_of(v)).min().unwrap();
        assert_eq!(r, least);
    }
}

fn check_run(g: &WeightedGraph, delay: DelayKind, seed: u64) -> MstRun {
    let r = run(g, delay, seed);
    let mst: BTreeSet<usize> = oracle(g).into_iter().collect();
    assert_eq!(r.ghs.snapshots.len() as u32, r.ghs.phases);
    for s in &r.ghs.snapshots {
        check_phase(g, s, &mst);
    }
    r
}

#[test]
fn triangle_merges_in_phase_zero() {
    let g = graph(3, &[(0, 1, 1), (1, 2, 2), (0, 2, 3)]);
    let r = check_run(&g, DelayKind::Uniform, 0);
    let s = &r.ghs.snapshots[0];
    assert!(s.activity.values().all(|&a| a));
    let weights: BTreeMap<NodeId, u64> = s.proposed.iter().map(|(&f, m)| (f, m.w)).collect();
    assert_eq!(weights, BTreeMap::from([(0, 1), (1, 1), (2, 2)]));
    assert_eq!(s.fragments(), 1);
    let mut edges = forest_edges(&g, &s.after);
    edges.sort_unstable();
    assert_eq!(edges, vec![0, 1]);
}

#[test]
fn mutual_pair_roots_at_the_smaller_id() {
    let g = path(2);
    let r = check_run(&g, DelayKind::Uniform, 0);
    let s = &r.ghs.snapshots[0];
    assert_eq!(s.supergraph, BTreeMap::from([(0, None), (1, Some(0))]));
    assert_eq!(s.matching, vec![(0, 1)]);
    assert_eq!(s.after.roots(), vec![0]);
}

#[test]
fn chain_of_five_is_coloured_and_matched() {
    // Weights fall along the path, so each node points to the next and 3-4 is mutual.
    let g = graph(5, &[(0, 1, 5), (1, 2, 4), (2, 3, 3), (3, 4, 2)]);
    let r = check_run(&g, DelayKind::Uniform, 2);
    let s = &r.ghs.snapshots[0];
    assert_eq!(
        s.supergraph,
        BTreeMap::from([(0, Some(1)), (1, Some(2)), (2, Some(3)), (3, None), (4, Some(3))])
    );
    assert!(!s.matching.is_empty());
}

#[test]
fn star_of_fragments_merges_into_one_tree() {
    let g = graph(6, &[(0, 1, 1), (0, 2, 2), (0, 3, 3), (0, 4, 4), (0, 5, 5)]);
    let r = check_run(&g, DelayKind::Uniform, 4);
    let s = &r.ghs.snapshots[0];
    assert!(s.supergraph.iter().all(|(&f, &p)| p == if f == 0 { None } else { Some(0) }));
    assert_eq!(s.matching.len(), 1);
    assert_eq!(s.readded.len(), 4);
    assert_eq!(s.after.roots(), vec![0]);
    assert!(s.after.depths().iter().all(|&d| d <= 1));
}

#[test]
fn path_of_eight_halves_every_phase() {
    for seed in 0..10 {
        let g = path(8);
        let r = check_run(&g, DelayKind::Uniform, seed);
        for s in &r.ghs.snapshots {
            assert!(s.fragments() <= 8 >> s.phase, "seed {seed} phase {}", s.phase);
        }
    }
}

#[test]
fn random_graphs_keep_fragments_inside_the_mst() {
    let mut untouched = 0;
    let mut readd_to_inactive = 0;
    for seed in 0..12 {
        let g = er(128, 0.1, seed);
        let r = check_run(&g, DELAYS[seed as usize % 3], seed);
        for s in &r.ghs.snapshots {
            let mut touched: BTreeSet<NodeId> = s.matching.iter().flat_map(|&(a, b)| [a, b]).collect();
            for f in &s.readded {
                touched.insert(*f);
                let to = s.proposed[f].to;
                touched.insert(to);
                if !s.activity[&to] {
                    readd_to_inactive += 1;
                }
            }
            for r in s.before.roots().into_iter().filter(|r| !touched.contains(r)) {
                untouched += 1;
                let before: Vec<NodeId> = g.nodes().filter(|&v| s.before.fragment_of(v) == r).collect();
                let after: Vec<NodeId> = g.nodes().filter(|&v| s.after.fragment_of(v) == r).collect();
                assert_eq!(before, after);
                for &v in &before {
                    assert_eq!(s.before.parent_node(v), s.after.parent_node(v));
                }
            }
        }
    }
    assert!(untouched > 0);
    assert!(readd_to_inactive > 0);
}

#[test]
fn other_families_too() {
    let kinds = [
        GraphKind::Grid { width: 8 },
        GraphKind::Cycle { chords: 6 },
        GraphKind::TreePlusEdges { extra: 10 },
        GraphKind::Geometric { radius: 0.25 },
    ];
    for (k, kind) in kinds.into_iter().enumerate() {
        for seed in 0..3 {
            let g = kind_graph(kind, 64, seed);
            check_run(&g, DELAYS[(k + seed as usize) % 3], seed);
        }
    }
}
