mod common;

use common::*;
use graph_core::hop_diameter;
use lds_tree::{
    depth_bound, st_cons, st_cons_async, st_cons_sync, StConsConfig, StConsMode,
};
use proptest::prelude::*;
use sim_kernel::DelayKind;

fn small_beta(seed: u64) -> StConsConfig {
    StConsConfig {
        beta: Some(0.25),
        seed,
        ..StConsConfig::default()
    }
}

#[test]
fn complete_graph_with_guess_one_is_a_single_bfs_layer() {
    let g = complete(20);
    let cfg = StConsConfig {
        initial_guess: 1,
        ..StConsConfig::default()
    };
    for mode in [StConsMode::DirectSync, StConsMode::AsyncSimulated] {
        let out = st_cons(&g, 7, &cfg, mode).unwrap();
        assert_eq!(out.params.unwrap().i_max, 0);
        assert_eq!(out.depth, 1);
        assert_eq!(spanning_depth(&g, &out.parent, 7), 1);
        assert_eq!(out.attempts.len(), 1);
        assert_eq!(out.attempts[0].bfs_layers, Some(1));
    }
}

#[test]
fn star_from_its_centre_is_the_star() {
    let g = star(12);
    for mode in [StConsMode::DirectSync, StConsMode::AsyncSimulated] {
        let out = st_cons(&g, 0, &StConsConfig::default(), mode).unwrap();
        assert_eq!(out.depth, 1);
        assert_eq!(out.diameter, 2);
        assert!((1..13).all(|v| out.parent[v] == Some(0)));
    }
}

#[test]
fn tiny_graphs_use_the_flooding_tree() {
    let g = path(4);
    for mode in [StConsMode::DirectSync, StConsMode::AsyncSimulated] {
        let out = st_cons(&g, 1, &StConsConfig::default(), mode).unwrap();
        assert!(out.trivial);
        assert_eq!(out.parent, vec![Some(1), None, Some(1), Some(2)]);
        assert_eq!(out.depth, 2);
    }
}

#[test]
fn random_graphs_get_spanning_trees_within_the_depth_bound() {
    for seed in 0..50 {
        let g = er(256, 0.05, seed);
        let d = hop_diameter(&g).unwrap();
        let root = (seed * 37 % 256) as u32;
        let cfg = StConsConfig {
            seed,
            ..StConsConfig::default()
        };
        let out = st_cons_sync(&g, root, &cfg).unwrap();
        let depth = spanning_depth(&g, &out.parent, root);
        assert_eq!(depth, out.depth);
        assert!(depth <= 255);
        assert!((depth as f64) <= depth_bound(256, 1.0, d));
        assert!(out.diameter <= 2 * depth);
    }
}

#[test]
fn asynchronous_construction_reproduces_the_lock_step_tree() {
    for (i, kind) in DELAYS.into_iter().enumerate() {
        let g = er(90, 0.06, i as u64);
        let cfg = small_beta(31 + i as u64);
        let want = st_cons_sync(&g, 5, &cfg).unwrap();
        let mut net = net(&g, kind, 3);
        let got = st_cons_async(&mut net, 1, 5, &cfg).unwrap();
        assert_eq!(got, want);
        assert!(want.params.unwrap().i_max >= 2);
        spanning_depth(&g, &got.parent, 5);
    }
}

#[test]
fn short_bfs_budget_forces_guess_doubling() {
    let g = path(100);
    let cfg = StConsConfig {
        bfs_budget: Some(1),
        initial_guess: 1,
        ..small_beta(2)
    };
    let want = st_cons_sync(&g, 0, &cfg).unwrap();
    assert!(want.attempts.len() > 1);
    assert!(want.attempts.iter().rev().skip(1).all(|a| !a.covered));
    let guesses: Vec<u64> = want.attempts.iter().map(|a| a.guess).collect();
    assert!(guesses.windows(2).all(|w| w[1] == 2 * w[0]));
    let mut net = net(&g, DelayKind::Uniform, 8);
    let got = st_cons_async(&mut net, 1, 0, &cfg).unwrap();
    assert_eq!(got.attempts, want.attempts);
    assert_eq!(got.parent, want.parent);
    assert_eq!(spanning_depth(&g, &got.parent, 0), got.depth);
}

#[test]
fn covering_guesses_stay_covering_when_doubled() {
    for seed in 0..12 {
        let g = er(40, 0.08, seed);
        let mut ok = Vec::new();
        for j in 0..7 {
            let cfg = StConsConfig {
                initial_guess: 1 << j,
                max_attempts: 1,
                bfs_budget: Some(2),
                ..small_beta(seed)
            };
            ok.push(st_cons_sync(&g, 0, &cfg).is_ok());
        }
        if let Some(first) = ok.iter().position(|&x| x) {
            assert!(ok[first..].iter().all(|&x| x), "seed {seed}: {ok:?}");
        }
    }
}

#[test]
fn bad_root_is_rejected() {
    let g = path(6);
    assert!(st_cons_sync(&g, 6, &StConsConfig::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn output_is_a_spanning_tree_rooted_at_the_root(
        n in 5usize..70,
        p in 0.04f64..0.5,
        gseed in 0u64..1000,
        seed in 0u64..1000,
        root_pick in 0usize..1000,
        formula in any::<bool>(),
    ) {
        let g = er(n, p.max(3.0 * (n as f64).ln() / n as f64), gseed);
        let root = (root_pick % n) as u32;
        let cfg = if formula {
            StConsConfig { seed, ..StConsConfig::default() }
        } else {
            small_beta(seed)
        };
        let out = st_cons_sync(&g, root, &cfg).unwrap();
        let depth = spanning_depth(&g, &out.parent, root);
        prop_assert_eq!(depth, out.depth);
        prop_assert!(depth as usize <= n - 1);
        let d = hop_diameter(&g).unwrap();
        prop_assert!((depth as f64) <= depth_bound(n, 1.0, d));
    }
}
