use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BinaryHeap};

use graph_core::{NodeId, PortId, Weight, WeightedGraph};

use crate::delay::DelayModel;
use crate::error::SimError;
use crate::report::{RunReport, StageStats};
use crate::time::SimTime;
use crate::wakeup::WakeupSchedule;

/// Multiple of the word size a single payload may occupy.
pub const PAYLOAD_WORDS: u32 = 8;

/// Word size in bits: `ceil(log2 n)`, floored at 4 so tiny graphs can still
/// carry a full edge tuple.
pub fn word_bits(n: usize) -> u32 {
    let mut b = 0;
    while (1usize << b) < n {
        b += 1;
    }
    b.max(4)
}

/// Kind header charged on every message.
pub const HEADER_BITS: u32 = 4;

/// Size accounting for protocol messages.
pub trait Payload: Clone + std::fmt::Debug {
    /// Encoded size given the word size.
    fn bits(&self, word: u32) -> u32;
}

/// Per-node callbacks. Implementations keep one state record per node and may
/// touch only the record of `ctx.id()`; neighbours are addressed by port.
pub trait Protocol {
    type Msg: Payload;
    fn on_enter(&mut self, ctx: &mut Ctx<'_, Self::Msg>);
    fn on_message(&mut self, ctx: &mut Ctx<'_, Self::Msg>, port: PortId, msg: Self::Msg);
}

/// How a node joins a session.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Entry {
    /// Spontaneously at the given time (never before its previous exit);
    /// earlier messages wait in the buffer.
    At(SimTime),
    /// Spontaneously at the given time, or earlier when a message arrives.
    Wake(SimTime),
    /// When its first message of the session arrives.
    OnMessage,
    /// Not involved; receiving a message is an error.
    Skip,
}

pub struct Ctx<'a, M> {
    node: NodeId,
    g: &'a WeightedGraph,
    degree: usize,
    n: usize,
    now: SimTime,
    seed: u64,
    out: &'a mut Vec<(PortId, M)>,
    terminate: bool,
    failure: Option<String>,
    spontaneous: bool,
}

impl<M: Clone> Ctx<'_, M> {
    /// In `on_enter`: whether the node entered on its own schedule rather
    /// than because a message arrived.
    pub fn spontaneous(&self) -> bool {
        self.spontaneous
    }

    pub fn id(&self) -> NodeId {
        self.node
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Weight of the edge behind a local port (known to the node).
    pub fn port_weight(&self, port: PortId) -> Weight {
        self.g.edge(self.g.port(self.node, port).edge).w
    }

    /// Network size, known to every node.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    /// Private random seed of this node for the given purpose.
    pub fn node_seed(&self, salt: u64) -> u64 {
        mix(mix(self.seed ^ salt.rotate_left(17)) ^ self.node as u64)
    }

    pub fn send(&mut self, port: PortId, msg: M) {
        self.out.push((port, msg));
    }

    pub fn send_all(&mut self, msg: M) {
        for p in 0..self.degree as PortId {
            self.out.push((p, msg.clone()));
        }
    }

    /// Ends this node's part in the session after the current callback.
    pub fn terminate(&mut self) {
        self.terminate = true;
    }

    pub fn fail(&mut self, reason: impl Into<String>) {
        self.failure.get_or_insert(reason.into());
    }
}

/// SplitMix64 finaliser, used to derive independent per-node seeds.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct Event<M> {
    key: (SimTime, NodeId, u8, PortId, u64),
    in_port: PortId,
    msg: Option<M>,
}

impl<M> PartialEq for Event<M> {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}
impl<M> Eq for Event<M> {}
impl<M> PartialOrd for Event<M> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<M> Ord for Event<M> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.cmp(&other.key)
    }
}

const ENTER: u8 = 0;
const DELIVER: u8 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Waiting,
    Active,
    Done,
}

/// Result of one session.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionReport {
    pub stage: u16,
    pub messages: u64,
    pub entered: Vec<bool>,
    pub start: Option<SimTime>,
    pub end: Option<SimTime>,
}

/// Persistent network state shared by consecutive sessions: link FIFO tails,
/// per-link message indices, per-node exit times and counters.
pub struct Network<'g> {
    g: &'g WeightedGraph,
    delays: DelayModel,
    seed: u64,
    word: u32,
    link_tail: Vec<SimTime>,
    link_count: Vec<u64>,
    exit: Vec<SimTime>,
    seq: u64,
    events: u64,
    budget: u64,
    sent: u64,
    delivered: u64,
    first_wake: Option<SimTime>,
    stages: BTreeMap<u16, StageStats>,
    trace: Option<Vec<String>>,
    all_terminated: bool,
}

impl<'g> Network<'g> {
    pub fn new(g: &'g WeightedGraph, delays: DelayModel, seed: u64, event_budget: u64) -> Self {
        Self {
            g,
            delays,
            seed,
            word: word_bits(g.n()),
            link_tail: vec![SimTime::ZERO; 2 * g.m()],
            link_count: vec![0; 2 * g.m()],
            exit: vec![SimTime::ZERO; g.n()],
            seq: 0,
            events: 0,
            budget: event_budget,
            sent: 0,
            delivered: 0,
            first_wake: None,
            stages: BTreeMap::new(),
            trace: None,
            all_terminated: true,
        }
    }

    pub fn enable_trace(&mut self) {
        self.trace = Some(Vec::new());
    }

    pub fn trace(&self) -> Option<&[String]> {
        self.trace.as_deref()
    }

    pub fn graph(&self) -> &'g WeightedGraph {
        self.g
    }

    pub fn word(&self) -> u32 {
        self.word
    }

    pub fn messages(&self) -> u64 {
        self.delivered
    }

    /// Time at which each node last left a session.
    pub fn exit_times(&self) -> &[SimTime] {
        &self.exit
    }

    pub fn exit_time(&self, v: NodeId) -> SimTime {
        self.exit[v as usize]
    }

    /// Entries for a session every node joins as soon as it left the previous one.
    pub fn entries_after_exit(&self) -> Vec<Entry> {
        self.exit.iter().map(|&t| Entry::At(t)).collect()
    }

    /// Entries derived from a wake-up schedule.
    pub fn entries_from_schedule(&self, w: &WakeupSchedule) -> Result<Vec<Entry>, SimError> {
        if w.wake_time.len() != self.g.n() || !w.is_valid() {
            return Err(SimError::BadSchedule {
                n: self.g.n(),
                got: w.wake_time.len(),
            });
        }
        Ok(w.wake_time
            .iter()
            .map(|t| t.map_or(Entry::OnMessage, Entry::Wake))
            .collect())
    }

    /// Runs one protocol until its queue drains. Messages reaching a node
    /// before it enters are buffered and handed over on entry.
    pub fn session<P: Protocol>(
        &mut self,
        stage: u16,
        proto: &mut P,
        entries: &[Entry],
    ) -> Result<SessionReport, SimError> {
        let n = self.g.n();
        assert_eq!(entries.len(), n, "one entry per node");
        let mut heap: BinaryHeap<Reverse<Event<P::Msg>>> = BinaryHeap::new();
        let mut phase = vec![Phase::Waiting; n];
        let mut scheduled = vec![false; n];
        let mut buffer: Vec<Vec<(PortId, P::Msg)>> = vec![Vec::new(); n];
        let mut report = SessionReport {
            stage,
            messages: 0,
            entered: vec![false; n],
            start: None,
            end: None,
        };
        for (v, e) in entries.iter().enumerate() {
            if let Entry::At(t) | Entry::Wake(t) = *e {
                let t = t.max(self.exit[v]);
                heap.push(Reverse(self.enter_event(v as NodeId, t, true)));
                scheduled[v] = matches!(e, Entry::At(_));
            }
        }
        let mut clock = SimTime::ZERO;
        let mut out: Vec<(PortId, P::Msg)> = Vec::new();
        while let Some(Reverse(ev)) = heap.pop() {
            self.events += 1;
            if self.events > self.budget {
                let mut snapshot = vec![format!("{:?}", ev.key)];
                snapshot.extend(heap.iter().take(4).map(|Reverse(e)| format!("{:?}", e.key)));
                return Err(SimError::BudgetExceeded {
                    budget: self.budget,
                    at: ev.key.0,
                    queued: heap.len() + 1,
                    snapshot,
                });
            }
            let (t, v, kind, _, _) = ev.key;
            debug_assert!(t >= clock, "event time went backwards");
            clock = t;
            let vi = v as usize;
            if kind == DELIVER {
                let msg = ev.msg.expect("deliveries carry a message");
                self.delivered += 1;
                report.messages += 1;
                if let Some(tr) = self.trace.as_mut() {
                    let src = self.g.port(v, ev.in_port).peer;
                    tr.push(format!(
                        "t={t} deliver {src}->{v} stage={stage} bits={}",
                        msg.bits(self.word)
                    ));
                }
                match phase[vi] {
                    Phase::Done => return Err(SimError::MessageAfterTermination { node: v, stage }),
                    Phase::Active => {
                        self.dispatch(
                            proto, &mut heap, &mut phase, &mut out, v, t, Some((ev.in_port, msg)), false,
                        )?;
                    }
                    Phase::Waiting => {
                        if entries[vi] == Entry::Skip {
                            return Err(SimError::UnexpectedParticipant { node: v });
                        }
                        buffer[vi].push((ev.in_port, msg));
                        if !scheduled[vi] {
                            scheduled[vi] = true;
                            let at = t.max(self.exit[vi]);
                            heap.push(Reverse(self.enter_event(v, at, false)));
                        }
                    }
                }
            } else {
                if phase[vi] != Phase::Waiting {
                    continue;
                }
                phase[vi] = Phase::Active;
                report.entered[vi] = true;
                report.start = Some(report.start.map_or(t, |s| s.min(t)));
                if self.first_wake.is_none_or(|f| t < f) && self.stages.is_empty() {
                    self.first_wake = Some(t);
                }
                let spontaneous = ev.key.3 == 0;
                self.dispatch(proto, &mut heap, &mut phase, &mut out, v, t, None, spontaneous)?;
                for (port, msg) in std::mem::take(&mut buffer[vi]) {
                    if phase[vi] == Phase::Done {
                        return Err(SimError::MessageAfterTermination { node: v, stage });
                    }
                    self.dispatch(proto, &mut heap, &mut phase, &mut out, v, t, Some((port, msg)), false)?;
                }
            }
        }
        let stalled: Vec<NodeId> = (0..n)
            .filter(|&v| phase[v] == Phase::Active)
            .map(|v| v as NodeId)
            .collect();
        if !stalled.is_empty() {
            self.all_terminated = false;
            return Err(SimError::Stalled {
                stage,
                nodes: stalled,
            });
        }
        for v in 0..n {
            if report.entered[v] {
                report.end = Some(report.end.map_or(self.exit[v], |e| e.max(self.exit[v])));
            }
        }
        let st = self.stages.entry(stage).or_default();
        st.messages += report.messages;
        if let Some(s) = report.start {
            st.start = Some(st.start.map_or(s, |x| x.min(s)));
        }
        if let Some(e) = report.end {
            st.end = Some(st.end.map_or(e, |x| x.max(e)));
        }
        Ok(report)
    }

    fn enter_event<M>(&mut self, v: NodeId, t: SimTime, spontaneous: bool) -> Event<M> {
        self.seq += 1;
        Event {
            key: (t, v, ENTER, PortId::from(!spontaneous), self.seq),
            in_port: 0,
            msg: None,
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn dispatch<P: Protocol>(
        &mut self,
        proto: &mut P,
        heap: &mut BinaryHeap<Reverse<Event<P::Msg>>>,
        phase: &mut [Phase],
        out: &mut Vec<(PortId, P::Msg)>,
        v: NodeId,
        now: SimTime,
        msg: Option<(PortId, P::Msg)>,
        spontaneous: bool,
    ) -> Result<(), SimError> {
        out.clear();
        let g = self.g;
        let mut ctx = Ctx {
            node: v,
            g,
            degree: self.g.degree(v),
            n: self.g.n(),
            now,
            seed: self.seed,
            out,
            terminate: false,
            failure: None,
            spontaneous,
        };
        match msg {
            None => proto.on_enter(&mut ctx),
            Some((port, m)) => proto.on_message(&mut ctx, port, m),
        }
        let Ctx {
            terminate, failure, ..
        } = ctx;
        if let Some(reason) = failure {
            return Err(SimError::Protocol { node: v, reason });
        }
        let bound = PAYLOAD_WORDS * self.word;
        for (port, m) in out.drain(..) {
            if port as usize >= self.g.degree(v) {
                return Err(SimError::BadPort { node: v, port });
            }
            let bits = m.bits(self.word);
            if bits > bound {
                return Err(SimError::PayloadTooLarge {
                    node: v,
                    port,
                    bits,
                    bound,
                });
            }
            let p = self.g.port(v, port);
            let e = self.g.edge(p.edge);
            let d = 2 * p.edge + usize::from(v != e.u);
            let idx = self.link_count[d];
            self.link_count[d] += 1;
            let at = (now + self.delays.sample(d, idx)).max(self.link_tail[d]);
            self.link_tail[d] = at;
            self.seq += 1;
            self.sent += 1;
            heap.push(Reverse(Event {
                key: (at, p.peer, DELIVER, port, self.seq),
                in_port: p.back,
                msg: Some(m),
            }));
        }
        if terminate {
            phase[v as usize] = Phase::Done;
            self.exit[v as usize] = now;
        }
        Ok(())
    }

    /// Closes the run. `output` is the protocol-defined result (edge indices).
    pub fn finish(self, output: Vec<usize>) -> RunReport {
        let first = self.first_wake.unwrap_or(SimTime::ZERO);
        let last = self.exit.iter().copied().max().unwrap_or(SimTime::ZERO);
        RunReport {
            n: self.g.n(),
            message_count: self.delivered,
            sent: self.sent,
            first_wake: first,
            completion_time: last - first,
            per_stage: self.stages,
            output,
            terminated: self.all_terminated,
            queued_at_end: 0,
            trace: self.trace,
        }
    }
}

/// Single-session convenience wrapper.
pub fn run<P: Protocol>(
    g: &WeightedGraph,
    proto: &mut P,
    delays: DelayModel,
    wakeup: &WakeupSchedule,
    seed: u64,
    event_budget: u64,
) -> Result<RunReport, SimError> {
    let mut net = Network::new(g, delays, seed, event_budget);
    let entries = net.entries_from_schedule(wakeup)?;
    net.session(0, proto, &entries)?;
    Ok(net.finish(Vec::new()))
}
