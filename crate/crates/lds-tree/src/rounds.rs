//! Round-by-round simulation of an algorithm whose participants are clusters.
//! Each round the cluster root broadcasts a directive down its tree, every
//! member sends exactly one message on each live crossing edge, and the
//! replies are folded back up to the root. One message per crossing edge per
//! round means the k-th message on an edge always belongs to round k, so no
//! acknowledgements are needed. A cluster that will never send again marks
//! its last round; neighbours stop expecting it afterwards.

use std::collections::VecDeque;

use graph_core::{ClusterId, NodeId, Partition, PortId, WeightedGraph};
use sim_kernel::{Ctx, Entry, Network, Payload, Protocol, HEADER_BITS};
use toolbox::ToolboxError;

/// What every node knows about its surroundings at the start of a level.
#[derive(Debug, Clone)]
pub struct Local {
    pub cluster: Vec<ClusterId>,
    pub parent: Vec<Option<PortId>>,
    pub children: Vec<Vec<PortId>>,
    /// `(neighbour id, neighbour cluster)` per port.
    pub peers: Vec<Vec<(NodeId, ClusterId)>>,
}

impl Local {
    pub fn new(g: &WeightedGraph, p: &Partition, peers: Vec<Vec<(NodeId, ClusterId)>>) -> Self {
        let mut children = vec![Vec::new(); g.n()];
        let mut parent = vec![None; g.n()];
        for v in g.nodes() {
            if let Some(u) = p.parent(v) {
                parent[v as usize] = g.port_to(v, u);
                children[u as usize].push(g.port_to(u, v).expect("tree edge"));
            }
        }
        for c in &mut children {
            c.sort_unstable();
        }
        Self {
            cluster: p.assignment().to_vec(),
            parent,
            children,
            peers,
        }
    }

    pub fn is_root(&self, v: NodeId) -> bool {
        self.parent[v as usize].is_none()
    }

    fn crossing(&self, v: NodeId) -> Vec<bool> {
        let c = self.cluster[v as usize];
        self.peers[v as usize].iter().map(|&(_, d)| d != c).collect()
    }
}

pub trait ClusterRounds {
    type Down: Payload;
    type Cross: Payload;
    type Up: Payload;

    /// At a cluster root: the directive for `round` and whether it is the
    /// cluster's last round.
    fn begin(&mut self, root: NodeId, round: u32) -> (Self::Down, bool);
    fn on_down(&mut self, _v: NodeId, _down: &Self::Down) {}
    fn cross(&mut self, v: NodeId, port: PortId, down: &Self::Down) -> Self::Cross;
    fn fold(
        &mut self,
        v: NodeId,
        down: &Self::Down,
        inbox: Vec<(PortId, Self::Cross)>,
        kids: Vec<(PortId, Self::Up)>,
    ) -> Self::Up;
    fn end(&mut self, root: NodeId, round: u32, up: Self::Up);
}

#[derive(Debug, Clone)]
pub enum RoundMsg<D, X, U> {
    Down(D, bool),
    Cross(X, bool),
    Up(U),
}

impl<D: Payload, X: Payload, U: Payload> Payload for RoundMsg<D, X, U> {
    fn bits(&self, word: u32) -> u32 {
        // Inner payloads already count one header; the last-round flag is one bit.
        match self {
            RoundMsg::Down(d, _) => d.bits(word) + 1,
            RoundMsg::Cross(x, _) => x.bits(word) + 1,
            RoundMsg::Up(u) => u.bits(word),
        }
    }
}

struct NodeRounds<D, X, U> {
    round: u32,
    current: Option<(D, bool)>,
    live: Vec<bool>,
    queue: Vec<VecDeque<(X, bool)>>,
    kids: Vec<(PortId, U)>,
}

struct Driver<'l, A: ClusterRounds> {
    local: &'l Local,
    algo: &'l mut A,
    nodes: Vec<NodeRounds<A::Down, A::Cross, A::Up>>,
    rounds: u32,
}

type Msg<A> = RoundMsg<<A as ClusterRounds>::Down, <A as ClusterRounds>::Cross, <A as ClusterRounds>::Up>;

impl<A: ClusterRounds> Driver<'_, A> {
    fn down(&mut self, ctx: &mut Ctx<'_, Msg<A>>, d: A::Down, last: bool) {
        let v = ctx.id();
        let st = &mut self.nodes[v as usize];
        st.round += 1;
        self.rounds = self.rounds.max(st.round);
        self.algo.on_down(v, &d);
        for &c in &self.local.children[v as usize] {
            ctx.send(c, RoundMsg::Down(d.clone(), last));
        }
        for p in 0..self.nodes[v as usize].live.len() {
            if self.nodes[v as usize].live[p] {
                let x = self.algo.cross(v, p as PortId, &d);
                ctx.send(p as PortId, RoundMsg::Cross(x, last));
            }
        }
        self.nodes[v as usize].current = Some((d, last));
    }

    fn advance(&mut self, ctx: &mut Ctx<'_, Msg<A>>) {
        let v = ctx.id();
        loop {
            let st = &mut self.nodes[v as usize];
            let ready = st.current.is_some()
                && st.kids.len() == self.local.children[v as usize].len()
                && st.live.iter().zip(&st.queue).all(|(&l, q)| !l || !q.is_empty());
            if !ready {
                return;
            }
            let (d, last) = st.current.take().unwrap();
            let mut inbox = Vec::new();
            for p in 0..st.live.len() {
                if st.live[p] {
                    let (x, their_last) = st.queue[p].pop_front().unwrap();
                    if their_last {
                        st.live[p] = false;
                    }
                    inbox.push((p as PortId, x));
                }
            }
            let mut kids = std::mem::take(&mut st.kids);
            kids.sort_by_key(|(p, _)| *p);
            let round = st.round;
            let up = self.algo.fold(v, &d, inbox, kids);
            match self.local.parent[v as usize] {
                Some(p) => {
                    ctx.send(p, RoundMsg::Up(up));
                    if last {
                        ctx.terminate();
                    }
                    return;
                }
                None => {
                    self.algo.end(v, round, up);
                    if last {
                        ctx.terminate();
                        return;
                    }
                    let (d, last) = self.algo.begin(v, round + 1);
                    self.down(ctx, d, last);
                }
            }
        }
    }
}

impl<A: ClusterRounds> Protocol for Driver<'_, A> {
    type Msg = Msg<A>;

    fn on_enter(&mut self, ctx: &mut Ctx<'_, Self::Msg>) {
        if self.local.is_root(ctx.id()) {
            let (d, last) = self.algo.begin(ctx.id(), 1);
            self.down(ctx, d, last);
            self.advance(ctx);
        }
    }

    fn on_message(&mut self, ctx: &mut Ctx<'_, Self::Msg>, port: PortId, msg: Self::Msg) {
        let v = ctx.id() as usize;
        match msg {
            RoundMsg::Down(d, last) => self.down(ctx, d, last),
            RoundMsg::Cross(x, last) => {
                if !self.nodes[v].live.get(port as usize).copied().unwrap_or(false) {
                    ctx.fail(format!("crossing message on inactive port {port}"));
                    return;
                }
                self.nodes[v].queue[port as usize].push_back((x, last));
            }
            RoundMsg::Up(u) => self.nodes[v].kids.push((port, u)),
        }
        self.advance(ctx);
    }
}

/// Runs cluster rounds until every cluster has finished its last round.
/// Returns the largest round number reached.
pub fn run_rounds<A: ClusterRounds>(
    net: &mut Network<'_>,
    stage: u16,
    local: &Local,
    algo: &mut A,
) -> Result<u32, ToolboxError> {
    let g = net.graph();
    let nodes = g
        .nodes()
        .map(|v| {
            let live = local.crossing(v);
            NodeRounds {
                round: 0,
                current: None,
                queue: vec![VecDeque::new(); live.len()],
                live,
                kids: Vec::new(),
            }
        })
        .collect();
    let mut driver = Driver {
        local,
        algo,
        nodes,
        rounds: 0,
    };
    let entries = net.entries_after_exit();
    net.session(stage, &mut driver, &entries)?;
    Ok(driver.rounds)
}

/// Every node sends its value once on every edge and collects one value per port.
pub fn announce<T: Payload>(
    net: &mut Network<'_>,
    stage: u16,
    values: Vec<T>,
) -> Result<Vec<Vec<T>>, ToolboxError> {
    struct Announce<T> {
        values: Vec<T>,
        heard: Vec<Vec<Option<T>>>,
        missing: Vec<usize>,
    }
    impl<T: Payload> Protocol for Announce<T> {
        type Msg = T;
        fn on_enter(&mut self, ctx: &mut Ctx<'_, T>) {
            ctx.send_all(self.values[ctx.id() as usize].clone());
            if self.missing[ctx.id() as usize] == 0 {
                ctx.terminate();
            }
        }
        fn on_message(&mut self, ctx: &mut Ctx<'_, T>, port: PortId, msg: T) {
            let v = ctx.id() as usize;
            if self.heard[v][port as usize].replace(msg).is_some() {
                ctx.fail(format!("second announcement on port {port}"));
            }
            self.missing[v] -= 1;
            if self.missing[v] == 0 {
                ctx.terminate();
            }
        }
    }
    let g = net.graph();
    let mut proto = Announce {
        values,
        heard: g.nodes().map(|v| vec![None; g.degree(v)]).collect(),
        missing: g.nodes().map(|v| g.degree(v)).collect(),
    };
    let entries = net.entries_after_exit();
    net.session(stage, &mut proto, &entries)?;
    Ok(proto
        .heard
        .into_iter()
        .map(|h| h.into_iter().map(|x| x.expect("all ports heard")).collect())
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NameTag {
    pub id: NodeId,
    pub cluster: ClusterId,
}

impl Payload for NameTag {
    fn bits(&self, word: u32) -> u32 {
        HEADER_BITS + 2 * word
    }
}

/// Exchanges `(id, cluster)` over every edge and builds the level's [`Local`].
pub fn learn_level(net: &mut Network<'_>, stage: u16, p: &Partition) -> Result<Local, ToolboxError> {
    let g = net.graph();
    let tags = g
        .nodes()
        .map(|v| NameTag {
            id: v,
            cluster: p.cluster_of(v),
        })
        .collect();
    let heard = announce(net, stage, tags)?;
    let peers = heard
        .into_iter()
        .map(|h| h.into_iter().map(|t| (t.id, t.cluster)).collect())
        .collect();
    Ok(Local::new(g, p, peers))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FloodMsg {
    Flood,
    Echo,
}

impl Payload for FloodMsg {
    fn bits(&self, _: u32) -> u32 {
        HEADER_BITS
    }
}

/// Flood from `root` with echo: every edge carries exactly two messages and
/// the root terminates last. Returns the parent of each node in the flooding
/// tree (the port the first flood arrived on, as a node id).
pub fn flood_echo(net: &mut Network<'_>, stage: u16, root: NodeId) -> Result<Vec<Option<NodeId>>, ToolboxError> {
    struct Flooding {
        parent: Vec<Option<PortId>>,
        seen: Vec<bool>,
        missing: Vec<usize>,
    }
    impl Flooding {
        fn settle(&mut self, ctx: &mut Ctx<'_, FloodMsg>) {
            let v = ctx.id() as usize;
            if self.missing[v] == 0 {
                if let Some(p) = self.parent[v] {
                    ctx.send(p, FloodMsg::Echo);
                }
                ctx.terminate();
            }
        }
    }
    impl Protocol for Flooding {
        type Msg = FloodMsg;
        fn on_enter(&mut self, ctx: &mut Ctx<'_, FloodMsg>) {
            if ctx.spontaneous() {
                let v = ctx.id() as usize;
                self.seen[v] = true;
                self.missing[v] = ctx.degree();
                ctx.send_all(FloodMsg::Flood);
                self.settle(ctx);
            }
        }
        fn on_message(&mut self, ctx: &mut Ctx<'_, FloodMsg>, port: PortId, msg: FloodMsg) {
            let v = ctx.id() as usize;
            if msg == FloodMsg::Flood && !self.seen[v] {
                self.seen[v] = true;
                self.parent[v] = Some(port);
                self.missing[v] = ctx.degree() - 1;
                for p in 0..ctx.degree() as PortId {
                    if p != port {
                        ctx.send(p, FloodMsg::Flood);
                    }
                }
            } else {
                self.missing[v] -= 1;
            }
            self.settle(ctx);
        }
    }
    let g = net.graph();
    let mut proto = Flooding {
        parent: vec![None; g.n()],
        seen: vec![false; g.n()],
        missing: vec![0; g.n()],
    };
    let entries: Vec<Entry> = g
        .nodes()
        .map(|v| {
            if v == root {
                Entry::At(net.exit_time(v))
            } else {
                Entry::OnMessage
            }
        })
        .collect();
    net.session(stage, &mut proto, &entries)?;
    Ok(g.nodes()
        .map(|v| proto.parent[v as usize].map(|p| g.port(v, p).peer))
        .collect())
}
