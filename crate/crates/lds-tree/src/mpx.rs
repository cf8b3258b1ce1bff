//! Exponentially shifted flooding: every node draws a shift, starts its own
//! cluster at round `S_v` unless an earlier wave reached it, and joins the
//! smallest ID it hears first.

use graph_core::{NodeId, Partition, PortId, Topology, WeightedGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sim_kernel::{mix, Network, Payload, HEADER_BITS};
use toolbox::{alpha_simulate, SyncAlgorithm, ToolboxError};

use crate::params::delta_max;

/// Inverse-CDF exponential sample for `u` in `(0, 1]`.
pub fn sample_exponential(beta: f64, u: f64) -> f64 {
    -u.ln() / beta
}

/// The shift drawn by the participant named `id` under `seed`; identical in
/// every execution mode.
pub fn shift_for(seed: u64, id: u32, beta: f64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed ^ mix(id as u64 + 1)));
    let u = 1.0 - rng.gen::<f64>();
    sample_exponential(beta, u)
}

/// `max(1, delta_max - floor(shift))`.
pub fn start_round(shift: f64, delta_max: u32) -> u32 {
    let f = shift.floor();
    if f >= delta_max as f64 {
        1
    } else {
        (delta_max - f as u32).max(1)
    }
}

/// Start rounds for the given ids plus how many shifts fell outside the window.
pub fn start_rounds(ids: &[u32], beta: f64, delta_max: u32, seed: u64) -> (Vec<u32>, usize) {
    let mut overflow = 0;
    let starts = ids
        .iter()
        .map(|&id| {
            let s = shift_for(seed, id, beta);
            if s >= delta_max as f64 {
                overflow += 1;
            }
            start_round(s, delta_max)
        })
        .collect();
    (starts, overflow)
}

/// Result of a flooding run over an adjacency list; `None` marks participants
/// that no wave reached within the round limit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flood {
    pub center: Vec<Option<u32>>,
    /// Neighbour index (not port) the winning ID came from.
    pub parent: Vec<Option<usize>>,
    pub join_round: Vec<Option<u32>>,
}

/// Lock-step flooding with the given start rounds (`u32::MAX` = never starts).
/// Idle stretches with nothing in flight are skipped, which leaves the result
/// identical to running every round.
pub fn flood_sync(adj: &[Vec<usize>], ids: &[u32], starts: &[u32], last_round: u32) -> Flood {
    let n = adj.len();
    let mut out = Flood {
        center: vec![None; n],
        parent: vec![None; n],
        join_round: vec![None; n],
    };
    let mut pending: Vec<(u32, usize)> = (0..n)
        .filter(|&v| starts[v] != u32::MAX)
        .map(|v| (starts[v], v))
        .collect();
    pending.sort_unstable();
    let mut next_start = 0;
    let mut frontier: Vec<usize> = Vec::new();
    let mut fresh = vec![false; n];
    let mut touched_in = vec![0u32; n];
    let mut round = 1u32;
    loop {
        while next_start < pending.len() && pending[next_start].0 < round {
            next_start += 1;
        }
        if frontier.is_empty() {
            match pending[next_start..].iter().find(|&&(_, v)| out.center[v].is_none()) {
                Some(&(s, _)) => round = round.max(s),
                None => break,
            }
        }
        if round > last_round {
            break;
        }
        let mut joined: Vec<(usize, u32, Option<usize>)> = Vec::new();
        let mut touched = vec![];
        for &u in &frontier {
            for &v in &adj[u] {
                if out.center[v].is_none() && touched_in[v] != round {
                    touched_in[v] = round;
                    touched.push(v);
                }
            }
        }
        for &v in &touched {
            let mut best: Option<(u32, usize)> = None;
            for (port, &u) in adj[v].iter().enumerate() {
                if fresh[u] {
                    let id = out.center[u].unwrap();
                    if best.is_none_or(|(b, _)| id < b) {
                        best = Some((id, port));
                    }
                }
            }
            let (id, port) = best.unwrap();
            if starts[v] == round && ids[v] < id {
                joined.push((v, ids[v], None));
            } else {
                joined.push((v, id, Some(adj[v][port])));
            }
        }
        let mut k = next_start;
        while k < pending.len() && pending[k].0 == round {
            let v = pending[k].1;
            if out.center[v].is_none() && touched_in[v] != round {
                joined.push((v, ids[v], None));
            }
            k += 1;
        }
        for &u in &frontier {
            fresh[u] = false;
        }
        frontier.clear();
        for (v, c, p) in joined {
            out.center[v] = Some(c);
            out.parent[v] = p;
            out.join_round[v] = Some(round);
            fresh[v] = true;
            frontier.push(v);
        }
        if round == u32::MAX {
            break;
        }
        round += 1;
    }
    out
}

/// Decomposition computed by the lock-step reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MpxOutcome {
    pub center: Vec<u32>,
    pub parent: Vec<Option<usize>>,
    pub join_round: Vec<u32>,
    pub start: Vec<u32>,
    /// Shifts that reached the window width and were clipped to start round 1.
    pub overflow: usize,
}

/// Reference decomposition over an adjacency list with explicit start rounds.
pub fn mpx_with_starts(adj: &[Vec<usize>], ids: &[u32], starts: &[u32], overflow: usize) -> MpxOutcome {
    let last = starts.iter().copied().max().unwrap_or(0);
    let f = flood_sync(adj, ids, starts, last);
    MpxOutcome {
        center: f.center.into_iter().map(|c| c.expect("every participant starts by its own round")).collect(),
        parent: f.parent,
        join_round: f.join_round.into_iter().map(Option::unwrap).collect(),
        start: starts.to_vec(),
        overflow,
    }
}

pub fn graph_adjacency(g: &WeightedGraph) -> Vec<Vec<usize>> {
    g.nodes()
        .map(|v| g.ports(v).iter().map(|p| p.peer as usize).collect())
        .collect()
}

/// Lock-step decomposition of a communication graph.
pub fn mpx_sync(g: &WeightedGraph, beta: f64, seed: u64) -> (Partition, MpxOutcome) {
    let ids: Vec<u32> = g.nodes().collect();
    let (starts, overflow) = start_rounds(&ids, beta, delta_max(g.n(), beta), seed);
    let out = mpx_with_starts(&graph_adjacency(g), &ids, &starts, overflow);
    (outcome_partition(g, &out), out)
}

/// Lock-step decomposition of a cluster graph; `delta_max` comes from the
/// size of the underlying network.
pub fn mpx_sync_topology(t: &Topology, beta: f64, delta_max: u32, seed: u64) -> MpxOutcome {
    let (starts, overflow) = start_rounds(&t.ids, beta, delta_max, seed);
    mpx_with_starts(&t.adj, &t.ids, &starts, overflow)
}

pub fn outcome_partition(g: &WeightedGraph, out: &MpxOutcome) -> Partition {
    Partition::new(
        g,
        out.center.clone(),
        out.parent.iter().map(|p| p.map(|u| u as NodeId)).collect(),
    )
    .expect("flooding trees are valid partitions")
}

/// Arrival rounds `S_u + dist(u, v) - 1` at `observer`, as `(id, round)`
/// sorted by round then id. The observer joins the first entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MpxTrace {
    pub observer: usize,
    pub arrivals: Vec<(u32, u32)>,
}

pub fn mpx_trace(adj: &[Vec<usize>], ids: &[u32], starts: &[u32], observer: usize) -> MpxTrace {
    let mut dist = vec![u32::MAX; adj.len()];
    let mut queue = std::collections::VecDeque::from([observer]);
    dist[observer] = 0;
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if dist[y] == u32::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    let mut arrivals: Vec<(u32, u32)> = (0..adj.len())
        .filter(|&u| dist[u] != u32::MAX)
        .map(|u| (ids[u], starts[u] + dist[u] - 1))
        .collect();
    arrivals.sort_by_key(|&(id, d)| (d, id));
    MpxTrace { observer, arrivals }
}

/// Per-node state of the round-based formulation.
#[derive(Debug, Clone, PartialEq)]
pub struct MpxNodeState {
    pub shift: f64,
    pub start: u32,
    pub assigned_to: Option<u32>,
    pub parent_port: Option<PortId>,
    pub join_round: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClusterName(pub u32);

impl Payload for ClusterName {
    fn bits(&self, word: u32) -> u32 {
        HEADER_BITS + word
    }
}

/// The flooding rule as a synchronous algorithm on the communication graph.
pub struct MpxRounds<'g> {
    pub g: &'g WeightedGraph,
}

impl SyncAlgorithm for MpxRounds<'_> {
    type State = MpxNodeState;
    type Msg = ClusterName;

    fn send(&self, v: NodeId, st: &mut MpxNodeState, round: u32) -> Vec<(PortId, ClusterName)> {
        match (st.join_round, st.assigned_to) {
            (Some(j), Some(c)) if j + 1 == round => (0..self.g.degree(v) as PortId)
                .map(|p| (p, ClusterName(c)))
                .collect(),
            _ => Vec::new(),
        }
    }

    fn receive(&self, v: NodeId, st: &mut MpxNodeState, round: u32, inbox: Vec<(PortId, ClusterName)>) {
        if st.assigned_to.is_some() {
            return;
        }
        let mut best: Option<(u32, Option<PortId>)> = None;
        for (p, ClusterName(c)) in inbox {
            if best.is_none_or(|(b, _)| c < b) {
                best = Some((c, Some(p)));
            }
        }
        if st.start == round && best.is_none_or(|(b, _)| v < b) {
            best = Some((v, None));
        }
        if let Some((c, p)) = best {
            st.assigned_to = Some(c);
            st.parent_port = p;
            st.join_round = Some(round);
        }
    }
}

pub fn initial_states(g: &WeightedGraph, beta: f64, seed: u64) -> Vec<MpxNodeState> {
    let dm = delta_max(g.n(), beta);
    g.nodes()
        .map(|v| {
            let shift = shift_for(seed, v, beta);
            MpxNodeState {
                shift,
                start: start_round(shift, dm),
                assigned_to: None,
                parent_port: None,
                join_round: None,
            }
        })
        .collect()
}

pub fn states_partition(g: &WeightedGraph, states: &[MpxNodeState]) -> Result<Partition, graph_core::GraphError> {
    let mut cluster = Vec::with_capacity(g.n());
    let mut parent = Vec::with_capacity(g.n());
    for (v, st) in states.iter().enumerate() {
        let c = st.assigned_to.ok_or_else(|| {
            graph_core::GraphError::InvalidPartition(format!("node {v} was never assigned"))
        })?;
        cluster.push(c);
        parent.push(st.parent_port.map(|p| g.port(v as NodeId, p).peer));
    }
    Partition::new(g, cluster, parent)
}

/// The decomposition on the asynchronous network through the alpha
/// synchronizer, `delta_max + 1` rounds.
pub fn mpx_alpha(
    net: &mut Network<'_>,
    stage: u16,
    beta: f64,
    seed: u64,
) -> Result<(Partition, Vec<MpxNodeState>), ToolboxError> {
    let g = net.graph();
    let states = initial_states(g, beta, seed);
    let rounds = delta_max(g.n(), beta).saturating_add(1);
    let states = alpha_simulate(net, stage, &MpxRounds { g }, states, rounds)?;
    let p = states_partition(g, &states).map_err(|e| ToolboxError::Forest(e.to_string()))?;
    Ok((p, states))
}
