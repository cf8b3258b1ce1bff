//! Running round-based algorithms on the asynchronous network.

use graph_core::{NodeId, PortId, WeightedGraph};
use sim_kernel::{Ctx, Entry, Network, Payload, Protocol, SimError, HEADER_BITS};

use crate::error::ToolboxError;
use crate::forest::Forest;
use crate::payload::Signal;

/// A synchronous algorithm in the send-then-receive round model. Round `r`
/// (from 1) first collects every node's outgoing messages, then hands each
/// node the messages addressed to it, sorted by port.
pub trait SyncAlgorithm {
    type State: Clone;
    type Msg: Payload;

    fn send(&self, v: NodeId, state: &mut Self::State, round: u32) -> Vec<(PortId, Self::Msg)>;

    fn receive(&self, v: NodeId, state: &mut Self::State, round: u32, inbox: Vec<(PortId, Self::Msg)>);
}

fn check_ports<M>(
    v: NodeId,
    degree: usize,
    round: u32,
    out: &[(PortId, M)],
) -> Result<(), ToolboxError> {
    if let Some(&(port, _)) = out.iter().find(|(p, _)| *p as usize >= degree) {
        return Err(SimError::BadPort { node: v, port }.into());
    }
    let mut ports: Vec<PortId> = out.iter().map(|(p, _)| *p).collect();
    ports.sort_unstable();
    for w in ports.windows(2) {
        if w[0] == w[1] {
            let count = ports.iter().filter(|&&p| p == w[0]).count();
            return Err(ToolboxError::CrowdedPort {
                node: v,
                port: w[0],
                round,
                count,
            });
        }
    }
    Ok(())
}

/// Lock-step reference execution.
pub fn lockstep<A: SyncAlgorithm>(
    g: &WeightedGraph,
    algo: &A,
    mut states: Vec<A::State>,
    rounds: u32,
) -> Result<Vec<A::State>, ToolboxError> {
    for r in 1..=rounds {
        let mut inbox: Vec<Vec<(PortId, A::Msg)>> = vec![Vec::new(); g.n()];
        for v in g.nodes() {
            let out = algo.send(v, &mut states[v as usize], r);
            check_ports(v, g.degree(v), r, &out)?;
            for (p, m) in out {
                let port = g.port(v, p);
                inbox[port.peer as usize].push((port.back, m));
            }
        }
        for v in g.nodes() {
            let mut got = std::mem::take(&mut inbox[v as usize]);
            got.sort_by_key(|(p, _)| *p);
            algo.receive(v, &mut states[v as usize], r, got);
        }
    }
    Ok(states)
}

#[derive(Debug, Clone)]
pub enum AlphaMsg<M> {
    Data { odd: bool, msg: M },
    Ack,
    Safe { odd: bool },
}

impl<M: Payload> Payload for AlphaMsg<M> {
    fn bits(&self, word: u32) -> u32 {
        match self {
            AlphaMsg::Data { msg, .. } => msg.bits(word) + 1,
            AlphaMsg::Ack => HEADER_BITS,
            AlphaMsg::Safe { .. } => HEADER_BITS + 1,
        }
    }
}

struct Alpha<'a, A: SyncAlgorithm> {
    algo: &'a A,
    rounds: u32,
    states: Vec<A::State>,
    round: Vec<u32>,
    unacked: Vec<usize>,
    safe_sent: Vec<bool>,
    safes: Vec<[usize; 2]>,
    inbox: Vec<[Vec<(PortId, A::Msg)>; 2]>,
    error: Option<ToolboxError>,
}

impl<A: SyncAlgorithm> Alpha<'_, A> {
    fn begin_round(&mut self, ctx: &mut Ctx<'_, AlphaMsg<A::Msg>>) {
        let v = ctx.id();
        let vi = v as usize;
        let r = self.round[vi];
        let out = self.algo.send(v, &mut self.states[vi], r);
        if let Err(e) = check_ports(v, ctx.degree(), r, &out) {
            ctx.fail(e.to_string());
            self.error.get_or_insert(e);
            return;
        }
        self.unacked[vi] = out.len();
        self.safe_sent[vi] = false;
        for (p, msg) in out {
            ctx.send(p, AlphaMsg::Data { odd: r % 2 == 1, msg });
        }
        self.after_acks(ctx);
    }

    fn after_acks(&mut self, ctx: &mut Ctx<'_, AlphaMsg<A::Msg>>) {
        let vi = ctx.id() as usize;
        if self.unacked[vi] == 0 && !self.safe_sent[vi] {
            self.safe_sent[vi] = true;
            ctx.send_all(AlphaMsg::Safe {
                odd: self.round[vi] % 2 == 1,
            });
        }
        self.try_advance(ctx);
    }

    fn try_advance(&mut self, ctx: &mut Ctx<'_, AlphaMsg<A::Msg>>) {
        let v = ctx.id();
        let vi = v as usize;
        let r = self.round[vi];
        let slot = (r % 2) as usize;
        if !self.safe_sent[vi] || self.safes[vi][slot] < ctx.degree() {
            return;
        }
        self.safes[vi][slot] = 0;
        let mut got = std::mem::take(&mut self.inbox[vi][slot]);
        got.sort_by_key(|(p, _)| *p);
        self.algo.receive(v, &mut self.states[vi], r, got);
        if r == self.rounds {
            ctx.terminate();
        } else {
            self.round[vi] = r + 1;
            self.begin_round(ctx);
        }
    }
}

impl<A: SyncAlgorithm> Protocol for Alpha<'_, A> {
    type Msg = AlphaMsg<A::Msg>;

    fn on_enter(&mut self, ctx: &mut Ctx<'_, Self::Msg>) {
        if self.rounds == 0 {
            ctx.terminate();
        } else {
            self.round[ctx.id() as usize] = 1;
            self.begin_round(ctx);
        }
    }

    fn on_message(&mut self, ctx: &mut Ctx<'_, Self::Msg>, port: PortId, msg: Self::Msg) {
        let vi = ctx.id() as usize;
        match msg {
            AlphaMsg::Data { odd, msg } => {
                ctx.send(port, AlphaMsg::Ack);
                self.inbox[vi][usize::from(odd)].push((port, msg));
            }
            AlphaMsg::Ack => {
                self.unacked[vi] -= 1;
                self.after_acks(ctx);
            }
            AlphaMsg::Safe { odd } => {
                self.safes[vi][usize::from(odd)] += 1;
                self.try_advance(ctx);
            }
        }
    }
}

/// Runs `rounds` rounds of `algo` on the asynchronous network with an
/// alpha synchronizer: a node announces it is safe once its messages of the
/// round are acknowledged, and moves on after hearing safe from every
/// neighbour. Every node enters when it left the previous session.
pub fn alpha_simulate<A: SyncAlgorithm>(
    net: &mut Network<'_>,
    stage: u16,
    algo: &A,
    states: Vec<A::State>,
    rounds: u32,
) -> Result<Vec<A::State>, ToolboxError> {
    let n = net.graph().n();
    let mut proto = Alpha {
        algo,
        rounds,
        states,
        round: vec![0; n],
        unacked: vec![0; n],
        safe_sent: vec![false; n],
        safes: vec![[0; 2]; n],
        inbox: (0..n).map(|_| [Vec::new(), Vec::new()]).collect(),
        error: None,
    };
    let entries = net.entries_after_exit();
    let result = net.session(stage, &mut proto, &entries);
    if let Some(e) = proto.error {
        return Err(e);
    }
    result?;
    Ok(proto.states)
}

/// Root-to-leaves signal without acknowledgements.
struct Go<'f> {
    tree: &'f Forest,
}

impl Protocol for Go<'_> {
    type Msg = Signal;

    fn on_enter(&mut self, ctx: &mut Ctx<'_, Signal>) {
        if self.tree.view(ctx.id()).root_flag {
            self.on_message(ctx, 0, Signal);
        }
    }

    fn on_message(&mut self, ctx: &mut Ctx<'_, Signal>, _: PortId, _: Signal) {
        for &c in &self.tree.view(ctx.id()).children {
            ctx.send(c, Signal);
        }
        ctx.terminate();
    }
}

/// Leaves-to-root completion signal.
struct Done<'f> {
    tree: &'f Forest,
    waiting: Vec<usize>,
}

impl Done<'_> {
    fn check(&mut self, ctx: &mut Ctx<'_, Signal>) {
        let v = ctx.id();
        if self.waiting[v as usize] == 0 {
            if let Some(p) = self.tree.view(v).parent {
                ctx.send(p, Signal);
            }
            ctx.terminate();
        }
    }
}

impl Protocol for Done<'_> {
    type Msg = Signal;

    fn on_enter(&mut self, ctx: &mut Ctx<'_, Signal>) {
        self.check(ctx);
    }

    fn on_message(&mut self, ctx: &mut Ctx<'_, Signal>, _: PortId, _: Signal) {
        self.waiting[ctx.id() as usize] -= 1;
        self.check(ctx);
    }
}

/// One pulse of a beta synchronizer over a spanning tree: the root's go
/// signal travels down, every node runs its part of `body`, and completion
/// is converge-cast back. Returns the value produced by `body`.
pub fn beta_pulse<T, E>(
    net: &mut Network<'_>,
    stage: u16,
    tree: &Forest,
    body: impl FnOnce(&mut Network<'_>) -> Result<T, E>,
) -> Result<T, E>
where
    E: From<ToolboxError>,
{
    let root = single_root(tree)?;
    let mut entries = vec![Entry::OnMessage; tree.len()];
    entries[root as usize] = Entry::At(net.exit_time(root));
    net.session(stage, &mut Go { tree }, &entries)
        .map_err(ToolboxError::from)?;
    let out = body(net)?;
    let mut done = Done {
        tree,
        waiting: tree.views().iter().map(|v| v.children.len()).collect(),
    };
    let entries = net.entries_after_exit();
    net.session(stage, &mut done, &entries)
        .map_err(ToolboxError::from)?;
    Ok(out)
}

/// Drives `phases` pulses; `body(net, p)` runs phase `p` (from 0).
pub fn beta_counter<E>(
    net: &mut Network<'_>,
    stage: u16,
    tree: &Forest,
    phases: u32,
    mut body: impl FnMut(&mut Network<'_>, u32) -> Result<(), E>,
) -> Result<(), E>
where
    E: From<ToolboxError>,
{
    for p in 0..phases {
        beta_pulse(net, stage, tree, |net| body(net, p))?;
    }
    Ok(())
}

fn single_root(tree: &Forest) -> Result<NodeId, ToolboxError> {
    match tree.roots().as_slice() {
        [r] => Ok(*r),
        roots => Err(ToolboxError::Forest(format!(
            "synchronizer needs one spanning tree, found {} roots",
            roots.len()
        ))),
    }
}
