//! Pipelined routing of individual messages towards and away from the root.
//!
//! Upcast forwards each item to the parent as soon as it arrives; links are
//! FIFO, so no per-item acknowledgement is needed and the root's closing
//! broadcast cannot overtake an item. Downcast closes every branch it used
//! with an end marker and counts acknowledgements on the way back.

use std::collections::BTreeMap;

use graph_core::{NodeId, PortId};
use sim_kernel::{Ctx, Entry, Network, Payload, Protocol, SimTime, HEADER_BITS};

use crate::error::ToolboxError;
use crate::forest::Forest;

/// Per node: which child port leads to a given node of its subtree.
pub type Routes = Vec<BTreeMap<NodeId, PortId>>;

#[derive(Debug, Clone)]
pub enum CastMsg<M> {
    Item { node: NodeId, msg: M },
    End,
    Ack(u64),
}

impl<M: Payload> Payload for CastMsg<M> {
    fn bits(&self, word: u32) -> u32 {
        match self {
            CastMsg::Item { msg, .. } => msg.bits(word) + word,
            CastMsg::End => HEADER_BITS,
            CastMsg::Ack(_) => HEADER_BITS + word,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UpcastOutcome<M> {
    /// Items gathered at each root with their origin.
    pub at_root: BTreeMap<NodeId, Vec<(NodeId, M)>>,
    /// When each root held all expected items.
    pub gathered: BTreeMap<NodeId, SimTime>,
    /// When each root saw the closing broadcast acknowledged.
    pub finished: BTreeMap<NodeId, SimTime>,
    /// Routing knowledge picked up on the way.
    pub routes: Routes,
    pub messages: u64,
}

/// What a root decides after each arrival.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gather {
    Waiting,
    Complete,
    /// More arrived than the root can account for.
    Overflow,
}

struct Up<'f, M, G> {
    forest: &'f Forest,
    items: Vec<Vec<M>>,
    goal: G,
    at_root: BTreeMap<NodeId, Vec<(NodeId, M)>>,
    gathered: BTreeMap<NodeId, SimTime>,
    finished: BTreeMap<NodeId, SimTime>,
    routes: Routes,
    pending: Vec<usize>,
}

impl<M: Payload, G: FnMut(NodeId, &[(NodeId, M)]) -> Gather> Up<'_, M, G> {
    fn collect(&mut self, ctx: &mut Ctx<'_, CastMsg<M>>, node: NodeId, msg: M) {
        let v = ctx.id();
        let bag = self.at_root.entry(v).or_default();
        bag.push((node, msg));
        self.judge(ctx);
    }

    fn judge(&mut self, ctx: &mut Ctx<'_, CastMsg<M>>) {
        let v = ctx.id();
        let bag = self.at_root.entry(v).or_default();
        match (self.goal)(v, bag) {
            Gather::Waiting => {}
            Gather::Overflow => ctx.fail(format!("root got {} items, more than it accounts for", bag.len())),
            Gather::Complete => {
                if self.gathered.insert(v, ctx.now()).is_some() {
                    ctx.fail("root completed twice");
                    return;
                }
                self.close(ctx);
            }
        }
    }

    /// Closing broadcast with acknowledgements.
    fn close(&mut self, ctx: &mut Ctx<'_, CastMsg<M>>) {
        let v = ctx.id();
        let kids = &self.forest.view(v).children;
        for &c in kids {
            ctx.send(c, CastMsg::End);
        }
        self.pending[v as usize] = kids.len();
        self.maybe_leave(ctx);
    }

    fn maybe_leave(&mut self, ctx: &mut Ctx<'_, CastMsg<M>>) {
        let v = ctx.id();
        if self.pending[v as usize] > 0 {
            return;
        }
        match self.forest.view(v).parent {
            Some(p) => ctx.send(p, CastMsg::Ack(0)),
            None => {
                self.finished.insert(v, ctx.now());
            }
        }
        ctx.terminate();
    }
}

impl<M: Payload, G: FnMut(NodeId, &[(NodeId, M)]) -> Gather> Protocol for Up<'_, M, G> {
    type Msg = CastMsg<M>;

    fn on_enter(&mut self, ctx: &mut Ctx<'_, Self::Msg>) {
        let v = ctx.id();
        let mine = std::mem::take(&mut self.items[v as usize]);
        match self.forest.view(v).parent {
            Some(p) => {
                for msg in mine {
                    ctx.send(p, CastMsg::Item { node: v, msg });
                }
            }
            None => {
                let bag = self.at_root.entry(v).or_default();
                bag.extend(mine.into_iter().map(|m| (v, m)));
                self.judge(ctx);
            }
        }
    }

    fn on_message(&mut self, ctx: &mut Ctx<'_, Self::Msg>, port: PortId, msg: Self::Msg) {
        let v = ctx.id();
        match msg {
            CastMsg::Item { node, msg } => {
                self.routes[v as usize].insert(node, port);
                match self.forest.view(v).parent {
                    Some(p) => ctx.send(p, CastMsg::Item { node, msg }),
                    None => self.collect(ctx, node, msg),
                }
            }
            CastMsg::End => self.close(ctx),
            CastMsg::Ack(_) => {
                self.pending[v as usize] -= 1;
                self.maybe_leave(ctx);
            }
        }
    }
}

/// Gathers `items` (origin, message) at the roots of their fragments. Each
/// fragment root in `expected` knows exactly how many items it will receive.
pub fn upcast<M: Payload>(
    net: &mut Network<'_>,
    stage: u16,
    forest: &Forest,
    items: Vec<(NodeId, M)>,
    expected: &BTreeMap<NodeId, usize>,
) -> Result<UpcastOutcome<M>, ToolboxError> {
    let roots: Vec<NodeId> = expected.keys().copied().collect();
    upcast_until(net, stage, forest, items, &roots, |v, bag| {
        let want = expected[&v];
        match bag.len().cmp(&want) {
            std::cmp::Ordering::Less => Gather::Waiting,
            std::cmp::Ordering::Equal => Gather::Complete,
            std::cmp::Ordering::Greater => Gather::Overflow,
        }
    })
}

/// Upcast for roots that cannot count their items in advance: `goal` looks
/// at everything gathered so far and decides when the root may close.
pub fn upcast_until<M, G>(
    net: &mut Network<'_>,
    stage: u16,
    forest: &Forest,
    items: Vec<(NodeId, M)>,
    roots: &[NodeId],
    goal: G,
) -> Result<UpcastOutcome<M>, ToolboxError>
where
    M: Payload,
    G: FnMut(NodeId, &[(NodeId, M)]) -> Gather,
{
    let n = forest.len();
    for &r in roots {
        if !forest.view(r).root_flag {
            return Err(ToolboxError::NotARoot(r));
        }
    }
    let roots: std::collections::BTreeSet<NodeId> = roots.iter().copied().collect();
    let mut per_node = vec![Vec::new(); n];
    for (v, m) in items {
        if !roots.contains(&forest.fragment_of(v)) {
            return Err(ToolboxError::NotARoot(forest.fragment_of(v)));
        }
        per_node[v as usize].push(m);
    }
    let mut entries = forest.entries(net, |f| roots.contains(&f));
    for v in 0..n {
        if !per_node[v].is_empty() {
            entries[v] = Entry::At(net.exit_time(v as NodeId));
        }
    }
    let mut proto = Up {
        forest,
        items: per_node,
        goal,
        at_root: BTreeMap::new(),
        gathered: BTreeMap::new(),
        finished: BTreeMap::new(),
        routes: vec![BTreeMap::new(); n],
        pending: vec![0; n],
    };
    let report = net.session(stage, &mut proto, &entries)?;
    if let Some(&r) = roots.iter().find(|&r| !proto.gathered.contains_key(r)) {
        return Err(ToolboxError::Forest(format!("root {r} never completed its upcast")));
    }
    Ok(UpcastOutcome {
        at_root: proto.at_root,
        gathered: proto.gathered,
        finished: proto.finished,
        routes: proto.routes,
        messages: report.messages,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DowncastOutcome<M> {
    /// Messages that reached each node.
    pub delivered: Vec<Vec<M>>,
    pub finished: BTreeMap<NodeId, SimTime>,
    pub messages: u64,
}

struct Down<'f, 'r, M> {
    forest: &'f Forest,
    routes: &'r Routes,
    outgoing: BTreeMap<NodeId, Vec<(NodeId, M)>>,
    delivered: Vec<Vec<M>>,
    forwarded: Vec<BTreeMap<PortId, u64>>,
    received: Vec<u64>,
    pending: Vec<usize>,
    finished: BTreeMap<NodeId, SimTime>,
}

impl<M: Payload> Down<'_, '_, M> {
    fn route(&mut self, ctx: &mut Ctx<'_, CastMsg<M>>, dest: NodeId, msg: M) {
        let v = ctx.id();
        if dest == v {
            self.delivered[v as usize].push(msg);
            return;
        }
        match self.routes[v as usize].get(&dest) {
            Some(&p) => {
                *self.forwarded[v as usize].entry(p).or_default() += 1;
                ctx.send(p, CastMsg::Item { node: dest, msg });
            }
            None => ctx.fail(format!("no route to {dest}")),
        }
    }

    fn close(&mut self, ctx: &mut Ctx<'_, CastMsg<M>>) {
        let v = ctx.id() as usize;
        let used: Vec<PortId> = self.forwarded[v].keys().copied().collect();
        for &p in &used {
            ctx.send(p, CastMsg::End);
        }
        self.pending[v] = used.len();
        self.maybe_leave(ctx);
    }

    fn maybe_leave(&mut self, ctx: &mut Ctx<'_, CastMsg<M>>) {
        let v = ctx.id();
        if self.pending[v as usize] > 0 {
            return;
        }
        match self.forest.view(v).parent {
            Some(p) => ctx.send(p, CastMsg::Ack(self.received[v as usize])),
            None => {
                self.finished.insert(v, ctx.now());
            }
        }
        ctx.terminate();
    }
}

impl<M: Payload> Protocol for Down<'_, '_, M> {
    type Msg = CastMsg<M>;

    fn on_enter(&mut self, ctx: &mut Ctx<'_, Self::Msg>) {
        let v = ctx.id();
        if let Some(list) = self.outgoing.remove(&v) {
            for (dest, msg) in list {
                self.route(ctx, dest, msg);
            }
            self.close(ctx);
        }
    }

    fn on_message(&mut self, ctx: &mut Ctx<'_, Self::Msg>, port: PortId, msg: Self::Msg) {
        let v = ctx.id() as usize;
        match msg {
            CastMsg::Item { node, msg } => {
                self.received[v] += 1;
                self.route(ctx, node, msg);
            }
            CastMsg::End => self.close(ctx),
            CastMsg::Ack(count) => {
                if self.forwarded[v].get(&port) != Some(&count) {
                    ctx.fail("acknowledged count differs from forwarded count");
                }
                self.pending[v] -= 1;
                self.maybe_leave(ctx);
            }
        }
    }
}

/// Routes each `(destination, message)` from its fragment root along
/// `routes`. Destinations without a route are rejected before anything is sent.
pub fn downcast<M: Payload>(
    net: &mut Network<'_>,
    stage: u16,
    forest: &Forest,
    routes: &Routes,
    items: BTreeMap<NodeId, Vec<(NodeId, M)>>,
) -> Result<DowncastOutcome<M>, ToolboxError> {
    let n = forest.len();
    for (&r, list) in &items {
        if !forest.view(r).root_flag {
            return Err(ToolboxError::NotARoot(r));
        }
        for &(dest, _) in list {
            let mut x = r;
            let mut hops = 0;
            while x != dest {
                match routes[x as usize].get(&dest) {
                    Some(&p) if forest.view(x).children.contains(&p) && hops < n => {
                        x = net.graph().port(x, p).peer;
                        hops += 1;
                    }
                    _ => return Err(ToolboxError::Unroutable { node: x, dest }),
                }
            }
        }
    }
    let entries = forest.entries(net, |f| items.contains_key(&f));
    let mut proto = Down {
        forest,
        routes,
        outgoing: items,
        delivered: vec![Vec::new(); n],
        forwarded: vec![BTreeMap::new(); n],
        received: vec![0; n],
        pending: vec![0; n],
        finished: BTreeMap::new(),
    };
    let report = net.session(stage, &mut proto, &entries)?;
    Ok(DowncastOutcome {
        delivered: proto.delivered,
        finished: proto.finished,
        messages: report.messages,
    })
}
