use graph_core::PortId;
use sim_kernel::{Ctx, Entry, Network, Payload, Protocol};
use toolbox::ToolboxError;

/// Received messages, by node, tagged with the arrival port.
pub type Inbox<M> = Vec<Vec<(PortId, M)>>;

struct Swap<M> {
    sends: Vec<Vec<(PortId, M)>>,
    missing: Vec<usize>,
    inbox: Inbox<M>,
}

impl<M: Payload> Swap<M> {
    fn check(&mut self, ctx: &mut Ctx<'_, M>) {
        if self.missing[ctx.id() as usize] == 0 {
            ctx.terminate();
        }
    }
}

impl<M: Payload> Protocol for Swap<M> {
    type Msg = M;

    fn on_enter(&mut self, ctx: &mut Ctx<'_, M>) {
        for (p, m) in std::mem::take(&mut self.sends[ctx.id() as usize]) {
            ctx.send(p, m);
        }
        self.check(ctx);
    }

    fn on_message(&mut self, ctx: &mut Ctx<'_, M>, port: PortId, msg: M) {
        let v = ctx.id() as usize;
        if self.missing[v] == 0 {
            ctx.fail(format!("unannounced message on port {port}"));
            return;
        }
        self.missing[v] -= 1;
        self.inbox[v].push((port, msg));
        self.check(ctx);
    }
}

/// One round of port-addressed messages between neighbours. Every node knows
/// how many messages it will receive and leaves once they are in; nodes with
/// nothing to send or receive sit the session out.
pub fn exchange<M: Payload>(
    net: &mut Network<'_>,
    stage: u16,
    sends: Vec<Vec<(PortId, M)>>,
    expect: &[usize],
) -> Result<Inbox<M>, ToolboxError> {
    let n = net.graph().n();
    assert!(sends.len() == n && expect.len() == n, "one slot per node");
    let entries: Vec<Entry> = (0..n)
        .map(|v| {
            if !sends[v].is_empty() {
                Entry::At(net.exit_time(v as u32))
            } else if expect[v] > 0 {
                Entry::OnMessage
            } else {
                Entry::Skip
            }
        })
        .collect();
    let mut proto = Swap {
        sends,
        missing: expect.to_vec(),
        inbox: vec![Vec::new(); n],
    };
    net.session(stage, &mut proto, &entries)?;
    if let Some(v) = proto.missing.iter().position(|&k| k > 0) {
        return Err(ToolboxError::Forest(format!(
            "node {v} still waits for {} messages",
            proto.missing[v]
        )));
    }
    Ok(proto.inbox)
}
