//! Broadcast-and-echo over fragment trees: the root pushes a value down, every
//! node folds its children's replies into one reply for its parent.

use std::collections::BTreeMap;

use graph_core::{NodeId, PortId};
use sim_kernel::{Ctx, Network, Payload, Protocol, SimTime};

use crate::error::ToolboxError;
use crate::forest::Forest;
use crate::payload::{Count, Signal, Span};

#[derive(Debug, Clone)]
pub enum WaveMsg<D, U> {
    Down(D),
    Up(U),
}

impl<D: Payload, U: Payload> Payload for WaveMsg<D, U> {
    fn bits(&self, word: u32) -> u32 {
        match self {
            WaveMsg::Down(d) => d.bits(word),
            WaveMsg::Up(u) => u.bits(word),
        }
    }
}

/// Result of one wave over a set of fragments.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveOutcome<D, U> {
    /// Value each node received (roots hold their own).
    pub received: Vec<Option<D>>,
    /// Folded reply per fragment root.
    pub at_root: BTreeMap<NodeId, U>,
    /// When each root saw the last reply.
    pub finished: BTreeMap<NodeId, SimTime>,
    pub messages: u64,
}

struct Wave<'f, D, U, F> {
    forest: &'f Forest,
    fold: F,
    got: Vec<Option<D>>,
    replies: Vec<Vec<Option<U>>>,
    pending: Vec<usize>,
    at_root: BTreeMap<NodeId, U>,
    finished: BTreeMap<NodeId, SimTime>,
}

impl<D, U, F> Wave<'_, D, U, F>
where
    D: Payload,
    U: Payload,
    F: FnMut(NodeId, &D, Vec<U>) -> U,
{
    fn start(&mut self, ctx: &mut Ctx<'_, WaveMsg<D, U>>, d: D) {
        let v = ctx.id();
        let view = self.forest.view(v);
        for &c in &view.children {
            ctx.send(c, WaveMsg::Down(d.clone()));
        }
        self.got[v as usize] = Some(d);
        self.pending[v as usize] = view.children.len();
        self.replies[v as usize] = vec![None; view.children.len()];
        self.maybe_reply(ctx);
    }

    fn maybe_reply(&mut self, ctx: &mut Ctx<'_, WaveMsg<D, U>>) {
        let v = ctx.id();
        if self.pending[v as usize] > 0 {
            return;
        }
        let kids: Vec<U> = std::mem::take(&mut self.replies[v as usize])
            .into_iter()
            .map(|u| u.expect("all replies in"))
            .collect();
        let d = self.got[v as usize].as_ref().expect("wave reached node");
        let up = (self.fold)(v, d, kids);
        match self.forest.view(v).parent {
            Some(p) => ctx.send(p, WaveMsg::Up(up)),
            None => {
                self.at_root.insert(v, up);
                self.finished.insert(v, ctx.now());
            }
        }
        ctx.terminate();
    }
}

impl<D, U, F> Protocol for Wave<'_, D, U, F>
where
    D: Payload,
    U: Payload,
    F: FnMut(NodeId, &D, Vec<U>) -> U,
{
    type Msg = WaveMsg<D, U>;

    fn on_enter(&mut self, ctx: &mut Ctx<'_, Self::Msg>) {
        let v = ctx.id();
        if self.forest.view(v).root_flag {
            let d = self.got[v as usize].clone().expect("root holds the value");
            self.start(ctx, d);
        }
    }

    fn on_message(&mut self, ctx: &mut Ctx<'_, Self::Msg>, port: PortId, msg: Self::Msg) {
        let v = ctx.id() as usize;
        match msg {
            WaveMsg::Down(d) => self.start(ctx, d),
            WaveMsg::Up(u) => {
                let i = self.forest.view(ctx.id()).children.binary_search(&port);
                match i {
                    Ok(i) if self.replies[v][i].is_none() => {
                        self.replies[v][i] = Some(u);
                        self.pending[v] -= 1;
                        self.maybe_reply(ctx);
                    }
                    _ => ctx.fail("reply from a non-child or twice"),
                }
            }
        }
    }
}

/// Runs broadcast-and-echo in every fragment whose root appears in `start`.
/// `fold(v, value, child_replies)` computes `v`'s reply.
pub fn wave_echo<D, U, F>(
    net: &mut Network<'_>,
    stage: u16,
    forest: &Forest,
    start: &BTreeMap<NodeId, D>,
    fold: F,
) -> Result<WaveOutcome<D, U>, ToolboxError>
where
    D: Payload,
    U: Payload,
    F: FnMut(NodeId, &D, Vec<U>) -> U,
{
    let n = forest.len();
    for &r in start.keys() {
        if !forest.view(r).root_flag {
            return Err(ToolboxError::NotARoot(r));
        }
    }
    let mut got = vec![None; n];
    for (&r, d) in start {
        got[r as usize] = Some(d.clone());
    }
    let mut proto = Wave {
        forest,
        fold,
        got,
        replies: vec![Vec::new(); n],
        pending: vec![0; n],
        at_root: BTreeMap::new(),
        finished: BTreeMap::new(),
    };
    let entries = forest.entries(net, |f| start.contains_key(&f));
    let report = net.session(stage, &mut proto, &entries)?;
    Ok(WaveOutcome {
        received: proto.got,
        at_root: proto.at_root,
        finished: proto.finished,
        messages: report.messages,
    })
}

/// Delivers each root's message to its whole fragment; the root learns of
/// completion through the acknowledgement echo.
pub fn frag_bcast<M: Payload>(
    net: &mut Network<'_>,
    stage: u16,
    forest: &Forest,
    msgs: &BTreeMap<NodeId, M>,
) -> Result<WaveOutcome<M, Signal>, ToolboxError> {
    wave_echo(net, stage, forest, msgs, |_, _, _| Signal)
}

/// Same message from every fragment root.
pub fn frag_bcast_all<M: Payload>(
    net: &mut Network<'_>,
    stage: u16,
    forest: &Forest,
    msg: M,
) -> Result<WaveOutcome<M, Signal>, ToolboxError> {
    let msgs = forest.roots().into_iter().map(|r| (r, msg.clone())).collect();
    frag_bcast(net, stage, forest, &msgs)
}

/// Size of every fragment, at its root.
pub fn tree_count(
    net: &mut Network<'_>,
    stage: u16,
    forest: &Forest,
) -> Result<BTreeMap<NodeId, u64>, ToolboxError> {
    let start = forest.roots().into_iter().map(|r| (r, Signal)).collect();
    let out = wave_echo(net, stage, forest, &start, |_, _, kids: Vec<Count>| {
        Count(1 + kids.iter().map(|c| c.0).sum::<u64>())
    })?;
    Ok(out.at_root.into_iter().map(|(r, c)| (r, c.0)).collect())
}

/// Hop diameter of every fragment tree, at its root.
pub fn diam_calc(
    net: &mut Network<'_>,
    stage: u16,
    forest: &Forest,
) -> Result<BTreeMap<NodeId, u32>, ToolboxError> {
    let start = forest.roots().into_iter().map(|r| (r, Signal)).collect();
    let out = wave_echo(net, stage, forest, &start, |_, _, kids: Vec<Span>| {
        let mut arms: Vec<u32> = kids.iter().map(|k| k.height + 1).collect();
        arms.sort_unstable_by(|a, b| b.cmp(a));
        let through = arms.iter().take(2).sum::<u32>();
        let longest = kids.iter().map(|k| k.longest).fold(through, u32::max);
        Span {
            height: arms.first().copied().unwrap_or(0),
            longest,
        }
    })?;
    Ok(out.at_root.into_iter().map(|(r, s)| (r, s.longest)).collect())
}
