use graph_core::{generate_graph, GraphKind, NodeId, PortId, WeightedGraph};
use proptest::prelude::*;
use sim_kernel::*;

#[derive(Debug, Clone)]
struct Word(u32);

impl Payload for Word {
    fn bits(&self, word: u32) -> u32 {
        HEADER_BITS + self.0 * word
    }
}

/// Each node forwards the first message it sees to every other port, then stops.
struct Flood {
    seen: Vec<bool>,
}

impl Protocol for Flood {
    type Msg = Word;
    fn on_enter(&mut self, ctx: &mut Ctx<'_, Word>) {
        let v = ctx.id() as usize;
        if !self.seen[v] && ctx.degree() > 0 {
            self.seen[v] = true;
            ctx.send_all(Word(1));
        }
        ctx.terminate();
    }
    fn on_message(&mut self, _: &mut Ctx<'_, Word>, _: PortId, _: Word) {}
}

/// Woken nodes start a flood; others forward on first receipt.
struct Relay {
    seen: Vec<bool>,
}

impl Protocol for Relay {
    type Msg = Word;
    fn on_enter(&mut self, ctx: &mut Ctx<'_, Word>) {
        let v = ctx.id() as usize;
        if ctx.spontaneous() && !self.seen[v] {
            self.seen[v] = true;
            ctx.send_all(Word(1));
            ctx.terminate();
        }
    }
    fn on_message(&mut self, ctx: &mut Ctx<'_, Word>, port: PortId, _: Word) {
        let v = ctx.id() as usize;
        if !self.seen[v] {
            self.seen[v] = true;
            for p in 0..ctx.degree() as PortId {
                if p != port {
                    ctx.send(p, Word(1));
                }
            }
            ctx.terminate();
        }
    }
}

/// Every node announces itself once on each port and leaves after hearing
/// from all neighbours, so nothing arrives after termination.
struct Hello {
    heard: Vec<usize>,
}

impl Protocol for Hello {
    type Msg = Word;
    fn on_enter(&mut self, ctx: &mut Ctx<'_, Word>) {
        ctx.send_all(Word(1));
    }
    fn on_message(&mut self, ctx: &mut Ctx<'_, Word>, _: PortId, _: Word) {
        let v = ctx.id() as usize;
        self.heard[v] += 1;
        if self.heard[v] == ctx.degree() {
            ctx.terminate();
        }
    }
}

fn hello_run(g: &WeightedGraph, kind: DelayKind, w: &WakeupSchedule) -> RunReport {
    let mut net = Network::new(g, DelayModel::new(kind, 7, g.m()), 1, 1_000_000);
    net.enable_trace();
    let entries = net.entries_from_schedule(w).unwrap();
    let mut p = Hello { heard: vec![0; g.n()] };
    net.session(0, &mut p, &entries).unwrap();
    net.finish(Vec::new())
}

fn path(n: usize) -> WeightedGraph {
    generate_graph(GraphKind::Path, n, 0).unwrap()
}

fn relay_run(g: &WeightedGraph, kind: DelayKind, w: &WakeupSchedule) -> RunReport {
    let mut net = Network::new(g, DelayModel::new(kind, 7, g.m()), 1, 1_000_000);
    net.enable_trace();
    let entries: Vec<Entry> = w
        .wake_time
        .iter()
        .map(|t| t.map_or(Entry::OnMessage, Entry::Wake))
        .collect();
    let mut p = Relay { seen: vec![false; g.n()] };
    net.session(0, &mut p, &entries).unwrap();
    net.finish(Vec::new())
}

#[test]
fn flooding_a_path_from_one_end() {
    // Hand simulation: the wave crosses one edge per unit, one message per edge.
    let g = path(5);
    let r = relay_run(&g, DelayKind::Unit, &WakeupSchedule::single(5, 0));
    assert_eq!(r.completion_time, SimTime::from_units(4.0));
    assert_eq!(r.message_count, 4);
    assert!(r.terminated);
    account(&r).unwrap();
}

#[test]
fn golden_trace_on_three_node_path() {
    let g = path(3);
    let r = relay_run(&g, DelayKind::Unit, &WakeupSchedule::single(3, 0));
    let word = word_bits(3);
    let bits = HEADER_BITS + word;
    assert_eq!(
        r.trace.unwrap(),
        vec![
            format!("t=1.000000000 deliver 0->1 stage=0 bits={bits}"),
            format!("t=2.000000000 deliver 1->2 stage=0 bits={bits}"),
        ]
    );
}

#[test]
fn identical_seeds_give_identical_reports() {
    let g = generate_graph(GraphKind::ErdosRenyi { p: 0.2 }, 40, 3).unwrap();
    let w = WakeupSchedule::staggered_uniform(40, 5, 3.0);
    let a = hello_run(&g, DelayKind::Uniform, &w);
    let b = hello_run(&g, DelayKind::Uniform, &w);
    assert_eq!(a, b);
}

#[test]
fn delay_samples() {
    let unit = DelayModel::new(DelayKind::Unit, 1, 10);
    assert_eq!(unit.sample(3, 99), SimTime::UNIT);
    let uni = DelayModel::new(DelayKind::Uniform, 1, 10);
    assert_eq!(uni.sample(4, 7), uni.sample(4, 7));
    assert_eq!(
        DelayModel::new(DelayKind::Uniform, 1, 10).sample(4, 7),
        uni.sample(4, 7)
    );
    assert_ne!(uni.sample(4, 7), uni.sample(4, 8));
    let pec = DelayModel::new(DelayKind::PerEdgeConstant, 2, 10);
    assert_eq!(pec.sample(5, 0), pec.sample(5, 1000));
}

#[test]
fn laggy_adversary_slows_exact_fraction() {
    let m = DelayModel::new(DelayKind::laggy(0.5), 11, 100);
    let slow = (0..100).filter(|&e| m.is_slow(e)).count();
    assert_eq!(slow, 50);
    let at_one = (0..200).filter(|&d| m.sample(d, 0) == SimTime::UNIT).count();
    assert_eq!(at_one, 100);
    assert_eq!(
        (0..200).map(|d| m.sample(d, 3)).min().unwrap(),
        SimTime::from_units(DEFAULT_FAST_DELAY)
    );
}

#[test]
fn empty_protocol_sends_nothing() {
    struct Quiet;
    impl Protocol for Quiet {
        type Msg = Word;
        fn on_enter(&mut self, ctx: &mut Ctx<'_, Word>) {
            ctx.terminate();
        }
        fn on_message(&mut self, _: &mut Ctx<'_, Word>, _: PortId, _: Word) {}
    }
    let g = path(4);
    let r = run(
        &g,
        &mut Quiet,
        DelayModel::new(DelayKind::Unit, 0, g.m()),
        &WakeupSchedule::all_at_zero(4),
        0,
        100,
    )
    .unwrap();
    assert_eq!(r.message_count, 0);
    account(&r).unwrap();
}

#[test]
fn single_message_is_counted_once() {
    let g = path(2);
    let r = relay_run(&g, DelayKind::Uniform, &WakeupSchedule::single(2, 1));
    assert_eq!(r.message_count, 1);
    account(&r).unwrap();
}

#[test]
fn oversize_payload_is_rejected() {
    struct Big;
    impl Protocol for Big {
        type Msg = Word;
        fn on_enter(&mut self, ctx: &mut Ctx<'_, Word>) {
            ctx.send(0, Word(PAYLOAD_WORDS));
            ctx.terminate();
        }
        fn on_message(&mut self, _: &mut Ctx<'_, Word>, _: PortId, _: Word) {}
    }
    let g = path(2);
    let err = run(
        &g,
        &mut Big,
        DelayModel::new(DelayKind::Unit, 0, 1),
        &WakeupSchedule::single(2, 0),
        0,
        100,
    )
    .unwrap_err();
    assert!(matches!(err, SimError::PayloadTooLarge { .. }));
}

#[test]
fn late_message_after_termination_is_an_error() {
    let g = path(2);
    let err = run(
        &g,
        &mut Flood { seen: vec![false; 2] },
        DelayModel::new(DelayKind::Unit, 0, 1),
        &WakeupSchedule::all_at_zero(2),
        0,
        100,
    )
    .unwrap_err();
    assert!(matches!(err, SimError::MessageAfterTermination { .. }));
}

#[test]
fn non_terminating_node_is_reported() {
    struct Lazy;
    impl Protocol for Lazy {
        type Msg = Word;
        fn on_enter(&mut self, _: &mut Ctx<'_, Word>) {}
        fn on_message(&mut self, _: &mut Ctx<'_, Word>, _: PortId, _: Word) {}
    }
    let g = path(3);
    let err = run(
        &g,
        &mut Lazy,
        DelayModel::new(DelayKind::Unit, 0, 2),
        &WakeupSchedule::single(3, 1),
        0,
        100,
    )
    .unwrap_err();
    assert_eq!(err, SimError::Stalled { stage: 0, nodes: vec![1] });
}

#[test]
fn event_budget_is_enforced() {
    /// Two nodes bounce a token forever.
    struct PingPong;
    impl Protocol for PingPong {
        type Msg = Word;
        fn on_enter(&mut self, ctx: &mut Ctx<'_, Word>) {
            if ctx.id() == 0 {
                ctx.send(0, Word(1));
            }
        }
        fn on_message(&mut self, ctx: &mut Ctx<'_, Word>, port: PortId, m: Word) {
            ctx.send(port, m);
        }
    }
    let g = path(2);
    let err = run(
        &g,
        &mut PingPong,
        DelayModel::new(DelayKind::Uniform, 0, 1),
        &WakeupSchedule::all_at_zero(2),
        0,
        50,
    )
    .unwrap_err();
    assert!(matches!(err, SimError::BudgetExceeded { budget: 50, .. }));
}

/// Session 1: node 0 notifies node 1. Session 2: node 0 sends immediately but
/// node 1 only enters at t = 5, so the message waits in its buffer.
#[test]
fn early_stage_messages_are_buffered_until_entry() {
    struct Note {
        got_at: Vec<Option<SimTime>>,
    }
    impl Protocol for Note {
        type Msg = Word;
        fn on_enter(&mut self, ctx: &mut Ctx<'_, Word>) {
            if ctx.id() == 0 {
                ctx.send(0, Word(1));
                ctx.terminate();
            }
        }
        fn on_message(&mut self, ctx: &mut Ctx<'_, Word>, _: PortId, _: Word) {
            self.got_at[ctx.id() as usize] = Some(ctx.now());
            ctx.terminate();
        }
    }
    let g = path(2);
    let mut net = Network::new(&g, DelayModel::new(DelayKind::Unit, 0, 1), 0, 100);
    let mut first = Note { got_at: vec![None; 2] };
    net.session(1, &mut first, &[Entry::At(SimTime::ZERO), Entry::OnMessage])
        .unwrap();
    assert_eq!(first.got_at[1], Some(SimTime::UNIT));
    let mut second = Note { got_at: vec![None; 2] };
    net.session(
        2,
        &mut second,
        &[Entry::At(SimTime::ZERO), Entry::At(SimTime::from_units(5.0))],
    )
    .unwrap();
    assert_eq!(second.got_at[1], Some(SimTime::from_units(5.0)));
    let r = net.finish(Vec::new());
    assert_eq!(r.message_count, 2);
    assert_eq!(r.per_stage[&2].messages, 1);
    assert_eq!(r.completion_time, SimTime::from_units(5.0));
    account(&r).unwrap();
}

#[test]
fn account_detects_mismatch() {
    let g = path(3);
    let mut r = relay_run(&g, DelayKind::Unit, &WakeupSchedule::single(3, 0));
    r.message_count += 1;
    assert!(matches!(account(&r), Err(IntegrityError::StageSum { .. })));
}

/// Node 2 streams numbered tokens to node 0, which forwards each to node 1;
/// node 1 checks order and per-hop latency.
struct Stream {
    k: u32,
    next: u32,
    violations: u32,
}

#[derive(Debug, Clone)]
struct Stamped {
    index: u32,
    sent: SimTime,
}

impl Payload for Stamped {
    fn bits(&self, word: u32) -> u32 {
        HEADER_BITS + 2 * word
    }
}

impl Protocol for Stream {
    type Msg = Stamped;
    fn on_enter(&mut self, ctx: &mut Ctx<'_, Stamped>) {
        if ctx.id() == 2 {
            for index in 0..self.k {
                ctx.send(0, Stamped { index, sent: ctx.now() });
            }
            ctx.terminate();
        }
    }
    fn on_message(&mut self, ctx: &mut Ctx<'_, Stamped>, _: PortId, m: Stamped) {
        let lag = ctx.now() - m.sent;
        if lag == SimTime::ZERO || lag > SimTime::UNIT {
            self.violations += 1;
        }
        match ctx.id() {
            0 => {
                ctx.send(0, Stamped { index: m.index, sent: ctx.now() });
                if m.index + 1 == self.k {
                    ctx.terminate();
                }
            }
            _ => {
                if m.index != self.next {
                    self.violations += 1;
                }
                self.next += 1;
                if self.next == self.k {
                    ctx.terminate();
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn links_are_fifo_and_delays_bounded(seed in any::<u64>(), k in 1u32..40) {
        // Edge order fixes port 0 at every node: 0-1 first, then 2-0.
        let g = WeightedGraph::connected(
            3,
            vec![
                graph_core::Edge { u: 0, v: 1, w: 1 },
                graph_core::Edge { u: 2, v: 0, w: 2 },
            ],
        )
        .unwrap();
        let mut p = Stream { k, next: 0, violations: 0 };
        let entries = [Entry::OnMessage, Entry::OnMessage, Entry::At(SimTime::ZERO)];
        let mut net = Network::new(&g, DelayModel::new(DelayKind::Uniform, seed, 2), seed, 10_000);
        net.session(0, &mut p, &entries).unwrap();
        prop_assert_eq!(p.violations, 0);
        prop_assert_eq!(p.next, k);
    }

    #[test]
    fn staggered_runs_are_deterministic_and_consistent(seed in any::<u64>(), n in 2usize..30) {
        let g = generate_graph(GraphKind::sparse_er(n), n, seed).unwrap();
        let w = WakeupSchedule::staggered_uniform(n, seed, 2.0);
        let a = hello_run(&g, DelayKind::laggy(0.3), &w);
        prop_assert_eq!(&a, &hello_run(&g, DelayKind::laggy(0.3), &w));
        prop_assert!(account(&a).is_ok());
        prop_assert!(a.terminated);
        prop_assert_eq!(a.message_count, 2 * g.m() as u64);
    }
}

#[test]
fn node_seeds_differ_per_node() {
    struct Seeds(Vec<u64>);
    impl Protocol for Seeds {
        type Msg = Word;
        fn on_enter(&mut self, ctx: &mut Ctx<'_, Word>) {
            self.0[ctx.id() as usize] = ctx.node_seed(3);
            ctx.terminate();
        }
        fn on_message(&mut self, _: &mut Ctx<'_, Word>, _: PortId, _: Word) {}
    }
    let g = path(6);
    let mut s = Seeds(vec![0; 6]);
    run(&g, &mut s, DelayModel::new(DelayKind::Unit, 0, 5), &WakeupSchedule::all_at_zero(6), 9, 100)
        .unwrap();
    let mut uniq = s.0.clone();
    uniq.sort();
    uniq.dedup();
    assert_eq!(uniq.len(), 6);
    let _: NodeId = 0;
}

#[test]
fn a_message_wakes_a_node_before_its_alarm() {
    struct Probe {
        entered: Vec<Option<(SimTime, bool)>>,
    }
    impl Protocol for Probe {
        type Msg = Word;
        fn on_enter(&mut self, ctx: &mut Ctx<'_, Word>) {
            self.entered[ctx.id() as usize] = Some((ctx.now(), ctx.spontaneous()));
            if ctx.id() == 0 {
                ctx.send(0, Word(1));
                ctx.terminate();
            }
        }
        fn on_message(&mut self, ctx: &mut Ctx<'_, Word>, _: PortId, _: Word) {
            ctx.terminate();
        }
    }
    let g = path(2);
    let mut net = Network::new(&g, DelayModel::new(DelayKind::Unit, 0, 1), 0, 100);
    let mut p = Probe { entered: vec![None; 2] };
    net.session(
        0,
        &mut p,
        &[Entry::Wake(SimTime::ZERO), Entry::Wake(SimTime::from_units(10.0))],
    )
    .unwrap();
    assert_eq!(p.entered[0], Some((SimTime::ZERO, true)));
    assert_eq!(p.entered[1], Some((SimTime::UNIT, false)));
    assert_eq!(net.finish(Vec::new()).completion_time, SimTime::UNIT);
}
