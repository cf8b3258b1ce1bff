mod common;

use common::*;
use graph_core::{generate_graph, GraphKind, NodeId, PortId};
use proptest::prelude::*;
use sim_kernel::{DelayKind, Payload, SimTime, HEADER_BITS};
use toolbox::*;

#[derive(Debug, Clone, PartialEq)]
struct Val(u64);

impl Payload for Val {
    fn bits(&self, word: u32) -> u32 {
        HEADER_BITS + word
    }
}

/// Every node sends its value on each port and replaces it with a hash of
/// what it heard, so any reordering or lost message changes the result.
struct Gossip;

impl SyncAlgorithm for Gossip {
    /// Value, degree, everything heard.
    type State = (u64, u32, Vec<(u32, PortId, u64)>);
    type Msg = Val;

    fn send(&self, _: NodeId, s: &mut Self::State, round: u32) -> Vec<(PortId, Val)> {
        (0..s.1).map(|p| (p, Val(s.0 + round as u64))).collect()
    }

    fn receive(&self, _: NodeId, s: &mut Self::State, round: u32, inbox: Vec<(PortId, Val)>) {
        for (p, Val(x)) in inbox {
            s.0 = s.0.wrapping_mul(31).wrapping_add(x ^ p as u64);
            s.2.push((round, p, x));
        }
    }
}

#[test]
fn alpha_matches_lockstep_on_k4() {
    let g = generate_graph(GraphKind::Complete, 4, 0).unwrap();
    let init: Vec<_> = (0..4).map(|v| (v * 17 + 1, 3, Vec::new())).collect();
    let want = lockstep(&g, &Gossip, init.clone(), 3).unwrap();
    for seed in 0..5 {
        let mut n = net(&g, DelayKind::Uniform, seed);
        let got = alpha_simulate(&mut n, 0, &Gossip, init.clone(), 3).unwrap();
        assert_eq!(got, want);
        // Data, acks and one safe per directed edge per round.
        assert_eq!(n.messages(), 3 * (2 * 12 + 12));
    }
}

#[test]
fn zero_rounds_send_nothing() {
    let g = generate_graph(GraphKind::Complete, 4, 0).unwrap();
    let mut n = net(&g, DelayKind::Uniform, 0);
    let init: Vec<_> = (0..4).map(|v| (v, 3, Vec::new())).collect();
    assert_eq!(alpha_simulate(&mut n, 0, &Gossip, init.clone(), 0).unwrap(), init);
    assert_eq!(n.messages(), 0);
}

/// Sends on port 0 twice in one round.
struct Chatty;

impl SyncAlgorithm for Chatty {
    type State = ();
    type Msg = Val;
    fn send(&self, _: NodeId, _: &mut (), _: u32) -> Vec<(PortId, Val)> {
        vec![(0, Val(1)), (0, Val(2))]
    }
    fn receive(&self, _: NodeId, _: &mut (), _: u32, _: Vec<(PortId, Val)>) {}
}

#[test]
fn two_messages_on_one_edge_in_a_round_are_rejected() {
    let g = path(2);
    assert!(matches!(
        lockstep(&g, &Chatty, vec![(), ()], 1),
        Err(ToolboxError::CrowdedPort { count: 2, .. })
    ));
    let mut n = net(&g, DelayKind::Unit, 0);
    assert!(alpha_simulate(&mut n, 0, &Chatty, vec![(), ()], 1).is_err());
}

#[test]
fn beta_with_empty_body_on_a_star() {
    let g = star(4);
    let t = bfs_tree(&g, 0);
    let mut n = net(&g, DelayKind::Unit, 0);
    beta_counter::<ToolboxError>(&mut n, 0, &t, 1, |_, _| Ok(())).unwrap();
    let r = n.finish(vec![]);
    assert_eq!(r.message_count, 8);
    assert!(r.completion_time <= SimTime::from_units(4.0));
}

#[test]
fn beta_with_no_phases_is_silent() {
    let g = star(4);
    let t = bfs_tree(&g, 0);
    let mut n = net(&g, DelayKind::Unit, 0);
    beta_counter::<ToolboxError>(&mut n, 0, &t, 0, |_, _| Ok(())).unwrap();
    assert_eq!(n.messages(), 0);
}

#[test]
fn beta_phases_run_in_order_on_a_path() {
    let g = path(5);
    let t = bfs_tree(&g, 0);
    let mut n = net(&g, DelayKind::Unit, 0);
    let mut seen = Vec::new();
    beta_counter::<ToolboxError>(&mut n, 0, &t, 3, |net, p| {
        seen.push(p);
        frag_bcast_all(net, 1, &t, Count(p as u64))?;
        Ok(())
    })
    .unwrap();
    assert_eq!(seen, vec![0, 1, 2]);
    let r = n.finish(vec![]);
    assert_eq!(r.per_stage[&0].messages, 3 * 8);
    assert!(r.completion_time <= SimTime::from_units(3.0 * 8.0 + 4.0 + 3.0 * 8.0));
}

#[test]
fn beta_needs_a_single_tree() {
    let g = path(3);
    let f = Forest::singletons(&g);
    let mut n = net(&g, DelayKind::Unit, 0);
    assert!(beta_counter::<ToolboxError>(&mut n, 0, &f, 1, |_, _| Ok(())).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn alpha_is_faithful_under_every_delay_model(seed in any::<u64>(), n in 2usize..24, rounds in 1u32..6, which in 0usize..3) {
        let g = generate_graph(GraphKind::sparse_er(n), n, seed).unwrap();
        let kind = [DelayKind::Unit, DelayKind::Uniform, DelayKind::laggy(0.4)][which];
        let init: Vec<_> = g.nodes().map(|v| (v as u64 ^ seed, g.degree(v) as u32, Vec::new())).collect();
        let want = lockstep(&g, &Gossip, init.clone(), rounds).unwrap();
        let mut net = net(&g, kind, seed);
        prop_assert_eq!(alpha_simulate(&mut net, 0, &Gossip, init, rounds).unwrap(), want);
    }
}
