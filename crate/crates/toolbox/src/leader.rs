use graph_core::{NodeId, PortId};
use sim_kernel::{Ctx, Entry, Network, Payload, Protocol, HEADER_BITS};

use crate::error::ToolboxError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Election {
    pub leader: NodeId,
    /// Leader id as known at every node.
    pub known: Vec<Option<NodeId>>,
}

/// Leader election with termination detection that also wakes every node.
pub trait LeaderElection {
    fn elect(
        &self,
        net: &mut Network<'_>,
        stage: u16,
        entries: &[Entry],
    ) -> Result<Election, ToolboxError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElectionKind {
    ReferenceFlooding,
}

/// Every awake node floods a wave carrying its id; a node joins the largest
/// wave it has seen and echoes it back once all its other neighbours
/// answered. Only the wave of the largest id completes, and its initiator
/// announces itself down the wave's tree.
#[derive(Debug, Clone, Copy, Default)]
pub struct FloodingElection;

#[derive(Debug, Clone)]
pub enum ElectMsg {
    Wave(NodeId),
    Echo(NodeId),
    Elected(NodeId),
}

impl Payload for ElectMsg {
    fn bits(&self, word: u32) -> u32 {
        HEADER_BITS + word
    }
}

struct Flood {
    best: Vec<Option<NodeId>>,
    parent: Vec<Option<PortId>>,
    answers: Vec<usize>,
    children: Vec<Vec<PortId>>,
    known: Vec<Option<NodeId>>,
}

impl Flood {
    fn needed(&self, ctx: &Ctx<'_, ElectMsg>) -> usize {
        let v = ctx.id() as usize;
        ctx.degree() - usize::from(self.parent[v].is_some())
    }

    fn join(&mut self, ctx: &mut Ctx<'_, ElectMsg>, id: NodeId, from: Option<PortId>) {
        let v = ctx.id() as usize;
        self.best[v] = Some(id);
        self.parent[v] = from;
        self.answers[v] = 0;
        self.children[v].clear();
        for p in 0..ctx.degree() as PortId {
            if Some(p) != from {
                ctx.send(p, ElectMsg::Wave(id));
            }
        }
        self.check(ctx);
    }

    fn check(&mut self, ctx: &mut Ctx<'_, ElectMsg>) {
        let v = ctx.id() as usize;
        if self.answers[v] < self.needed(ctx) {
            return;
        }
        let id = self.best[v].expect("in a wave");
        match self.parent[v] {
            Some(p) => ctx.send(p, ElectMsg::Echo(id)),
            None => self.announce(ctx, id),
        }
    }

    fn announce(&mut self, ctx: &mut Ctx<'_, ElectMsg>, id: NodeId) {
        let v = ctx.id() as usize;
        self.known[v] = Some(id);
        for &c in &self.children[v] {
            ctx.send(c, ElectMsg::Elected(id));
        }
        ctx.terminate();
    }
}

impl Protocol for Flood {
    type Msg = ElectMsg;

    fn on_enter(&mut self, ctx: &mut Ctx<'_, ElectMsg>) {
        let id = ctx.id();
        self.join(ctx, id, None);
    }

    fn on_message(&mut self, ctx: &mut Ctx<'_, ElectMsg>, port: PortId, msg: ElectMsg) {
        let v = ctx.id() as usize;
        let best = self.best[v].expect("entered before receiving");
        match msg {
            ElectMsg::Wave(id) if id > best => self.join(ctx, id, Some(port)),
            ElectMsg::Wave(id) if id == best => {
                self.answers[v] += 1;
                self.check(ctx);
            }
            ElectMsg::Echo(id) if id == best => {
                self.answers[v] += 1;
                self.children[v].push(port);
                self.check(ctx);
            }
            ElectMsg::Elected(id) => self.announce(ctx, id),
            _ => {}
        }
    }
}

impl LeaderElection for FloodingElection {
    fn elect(
        &self,
        net: &mut Network<'_>,
        stage: u16,
        entries: &[Entry],
    ) -> Result<Election, ToolboxError> {
        let n = net.graph().n();
        let mut proto = Flood {
            best: vec![None; n],
            parent: vec![None; n],
            answers: vec![0; n],
            children: vec![Vec::new(); n],
            known: vec![None; n],
        };
        net.session(stage, &mut proto, entries)?;
        let leader = proto.known.iter().flatten().copied().max().ok_or_else(|| {
            ToolboxError::Forest("nobody woke up".to_string())
        })?;
        Ok(Election {
            leader,
            known: proto.known,
        })
    }
}

/// Elects a leader with the chosen implementation.
pub fn leader_elect(
    net: &mut Network<'_>,
    stage: u16,
    entries: &[Entry],
    kind: ElectionKind,
) -> Result<Election, ToolboxError> {
    match kind {
        ElectionKind::ReferenceFlooding => FloodingElection.elect(net, stage, entries),
    }
}
