mod common;

use common::*;
use graph_core::{validate_partition, NodeId};
use lds_tree::{
    delta_max, flood_sync, initial_states, mpx_alpha, mpx_stats, mpx_sync, mpx_trace, mpx_with_starts,
    outcome_partition, states_partition, LdsError, MpxRounds,
};
use proptest::prelude::*;
use toolbox::lockstep;

#[test]
fn equal_starts_give_singletons() {
    let g = er(40, 0.2, 3);
    let adj = adjacency(&g);
    let ids: Vec<u32> = g.nodes().collect();
    let dm = delta_max(40, 0.5);
    let out = mpx_with_starts(&adj, &ids, &vec![dm; 40], 0);
    assert_eq!(out.center, ids);
    assert!(out.join_round.iter().all(|&r| r == dm));
    let report = validate_partition(&g, &outcome_partition(&g, &out), 0);
    assert_eq!(report.cut_fraction, 1.0);
}

#[test]
fn one_early_start_takes_everything() {
    let g = path(10);
    let adj = adjacency(&g);
    let ids: Vec<u32> = g.nodes().collect();
    let dm = delta_max(10, 0.3);
    assert!(9 < dm - 1);
    let mut starts = vec![dm; 10];
    starts[4] = 1;
    let out = mpx_with_starts(&adj, &ids, &starts, 0);
    assert!(out.center.iter().all(|&c| c == 4));
    for v in 0..10u32 {
        assert_eq!(out.join_round[v as usize], v.abs_diff(4) + 1);
    }
    assert_eq!(out.parent[4], None);
    assert_eq!(out.parent[0], Some(1));
    assert_eq!(out.parent[9], Some(8));
}

#[test]
fn winning_id_ties_go_to_the_smaller_id_and_lowest_port() {
    // 0 and 1 start together and both reach 2 and 3 in the same round.
    let g = graph(4, &[(0, 2), (1, 2), (0, 3), (1, 3)]);
    let adj = adjacency(&g);
    let out = mpx_with_starts(&adj, &[0, 1, 2, 3], &[1, 1, 9, 9], 0);
    assert_eq!(out.center, vec![0, 1, 0, 0]);
    // Two carriers of id 1 at a node that would take it: force 0 out.
    let out = mpx_with_starts(&adj, &[5, 1, 2, 3], &[2, 1, 9, 9], 0);
    assert_eq!(out.center, vec![5, 1, 1, 1]);
    assert_eq!(out.parent[2], Some(1));
}

#[test]
fn sync_reference_matches_brute_force_on_random_graphs() {
    for seed in 0..500 {
        let g = er(128, 0.05, seed % 25);
        let (p, out) = mpx_sync(&g, 0.2, seed);
        let adj = adjacency(&g);
        let ids: Vec<u32> = g.nodes().collect();
        assert_eq!(out.center, brute_force_centres(&adj, &ids, &out.start), "seed {seed}");
        let dm = delta_max(128, 0.2);
        let report = validate_partition(&g, &p, 2 * dm);
        assert!(report.oversized.is_empty());
        assert!(report.max_tree_depth() <= dm);
        for v in g.nodes() {
            let trace = mpx_trace(&adj, &ids, &out.start, v as usize);
            assert_eq!(trace.arrivals[0].0, out.center[v as usize]);
        }
    }
}

#[test]
fn tree_parents_step_one_hop_closer_to_the_centre() {
    let g = er(64, 0.1, 5);
    let (p, out) = mpx_sync(&g, 0.3, 11);
    for v in g.nodes() {
        if let Some(u) = p.parent(v) {
            assert_eq!(out.join_round[u as usize] + 1, out.join_round[v as usize]);
            assert_eq!(out.center[u as usize], out.center[v as usize]);
        }
    }
}

#[test]
fn skipping_idle_rounds_matches_the_round_by_round_rule() {
    for seed in 0..20 {
        let g = er(50, 0.08, seed);
        let beta = 0.15;
        let (p, _) = mpx_sync(&g, beta, seed);
        let states = initial_states(&g, beta, seed);
        let rounds = delta_max(50, beta) + 1;
        let states = lockstep(&g, &MpxRounds { g: &g }, states, rounds).unwrap();
        assert_eq!(states_partition(&g, &states).unwrap(), p);
    }
}

#[test]
fn budgeted_flooding_leaves_far_nodes_out() {
    let g = path(6);
    let adj = adjacency(&g);
    let ids: Vec<u32> = g.nodes().collect();
    let mut starts = vec![u32::MAX; 6];
    starts[0] = 1;
    let f = flood_sync(&adj, &ids, &starts, 3);
    assert_eq!(f.center, vec![Some(0), Some(0), Some(0), None, None, None]);
}

#[test]
fn stats_on_complete_graph_stay_within_the_diameter_bound() {
    let g = complete(50);
    let s = mpx_stats(&[g], 0.3, 40, 1).unwrap();
    let bound = 4.0 * (50f64).ln() / 0.3;
    assert!(s.trials.iter().all(|t| (t.max_strong_diameter as f64) <= bound));
    assert!(s.max_strong_diameter <= 1);
}

#[test]
fn stats_on_sparse_random_graph_cut_at_most_twice_beta() {
    let g = er(200, 0.05, 9);
    let s = mpx_stats(&[g], 0.2, 200, 1000).unwrap();
    assert_eq!(s.trials.len(), 200);
    assert!(s.cut_fraction.mean <= 0.4, "{:?}", s.cut_fraction);
    assert!(s.diameter_ratio.is_some());
}

#[test]
fn stats_on_long_cycle_respect_the_strong_diameter_bound() {
    let g = cycle(256);
    let s = mpx_stats(&[g], 0.3, 200, 5).unwrap();
    // 4 ln 256 / 0.3 = 73.9357
    assert!(s.trials.iter().all(|t| (t.max_strong_diameter as f64) <= 73.9357));
}

#[test]
fn stats_need_thirty_trials() {
    assert!(matches!(
        mpx_stats(&[path(5)], 0.3, 29, 0),
        Err(LdsError::TooFewTrials { trials: 29, min: 30 })
    ));
}

#[test]
fn alpha_simulation_on_unit_delays_reproduces_the_reference() {
    let g = er(60, 0.08, 2);
    let (p, _) = mpx_sync(&g, 0.3, 77);
    let mut net = net(&g, sim_kernel::DelayKind::Unit, 4);
    let (q, _) = mpx_alpha(&mut net, 1, 0.3, 77).unwrap();
    assert_eq!(p, q);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn alpha_simulation_equals_reference_under_every_delay_model(
        n in 5usize..28,
        p in 0.1f64..0.5,
        gseed in 0u64..1000,
        seed in 0u64..1000,
        beta in 0.2f64..0.9,
    ) {
        let g = er(n, p.max(3.0 * (n as f64).ln() / n as f64).min(1.0), gseed);
        let (want, _) = mpx_sync(&g, beta, seed);
        for kind in DELAYS {
            let mut net = net(&g, kind, seed ^ 0xabc);
            let (got, _) = mpx_alpha(&mut net, 1, beta, seed).unwrap();
            prop_assert_eq!(&got, &want);
        }
    }

    #[test]
    fn assignment_is_the_lexicographic_argmin(
        n in 2usize..40,
        p in 0.05f64..0.6,
        gseed in 0u64..1000,
        starts in proptest::collection::vec(1u32..12, 40),
    ) {
        let g = er(n, p.max(3.0 * (n as f64).ln() / n as f64).min(1.0), gseed);
        let adj = adjacency(&g);
        let ids: Vec<u32> = g.nodes().collect();
        let starts = &starts[..n];
        let out = mpx_with_starts(&adj, &ids, starts, 0);
        prop_assert_eq!(&out.center, &brute_force_centres(&adj, &ids, starts));
        let part = outcome_partition(&g, &out);
        let dm = *starts.iter().max().unwrap();
        for v in g.nodes() {
            prop_assert!(part.depth_of(v as NodeId) < dm);
        }
    }
}
