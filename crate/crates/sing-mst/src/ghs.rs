//! Fragment growth with controlled diameter. Every phase only fragments of
//! small diameter look for their lightest outgoing edge; the resulting
//! forest of fragments is 6-coloured, matched, and merged along matching
//! edges plus the edges of fragments left unmatched.

use std::collections::BTreeMap;

use graph_core::{tree_diameter, Dsu, NodeId, PortId, WeightedGraph};
use lds_tree::announce;
use sim_kernel::Network;
use toolbox::{
    beta_counter, beta_pulse, diam_calc, find_moe, frag_bcast, upcast, wave_echo, Count, Forest, MoeTuple,
    Signal,
};

use crate::error::MstError;
use crate::exchange::exchange;
use crate::payload::{Best, Candidate, Flag, Link, MatchNote, MoeValue, Offer, Tally};

pub const STAGE_TWO: u16 = 2;
pub const MATCHING_ROUNDS: u32 = 6;
/// A merged component is a matched pair with single fragments hanging off
/// either end, so three hops carry the smallest id everywhere.
pub const SPREAD_ROUNDS: u32 = 3;

pub fn log_star(n: usize) -> u32 {
    let mut x = n as f64;
    let mut k = 0;
    while x > 1.0 {
        x = x.log2();
        k += 1;
    }
    k
}

pub fn coloring_rounds(n: usize) -> u32 {
    2 * log_star(n) + 10
}

/// Smallest `k` with `2^k >= x` (0 for `x <= 1`).
pub fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// `max(ceil(log2 sqrt n), ceil(log2 d))`.
pub fn ghs_phase_count(n: usize, tree_diameter: u32) -> u32 {
    let half = ceil_log2(n as u64).div_ceil(2);
    let root = (0..=half).find(|&k| 1u64 << (2 * k) >= n as u64).unwrap_or(half);
    root.max(ceil_log2(u64::from(tree_diameter)))
}

/// One Cole-Vishkin reduction. A supergraph root compares against a colour
/// differing in the lowest bit.
pub fn cv_step(own: u64, parent: Option<u64>) -> u64 {
    let other = parent.unwrap_or(own ^ 1);
    let k = u64::from((own ^ other).trailing_zeros());
    2 * k + ((own >> k) & 1)
}

/// Tree diameter of every fragment, keyed by root.
pub fn fragment_diameters(g: &WeightedGraph, f: &Forest) -> BTreeMap<NodeId, u32> {
    let mut adj = vec![Vec::new(); g.n()];
    for (a, b) in f.tree_edges() {
        adj[a as usize].push(b as usize);
        adj[b as usize].push(a as usize);
    }
    f.roots().into_iter().map(|r| (r, tree_diameter(&adj, r as usize))).collect()
}

/// What a phase looked like, for checking against offline recomputation.
#[derive(Debug, Clone)]
pub struct PhaseSnapshot {
    pub phase: u32,
    pub before: Forest,
    pub activity: BTreeMap<NodeId, bool>,
    pub proposed: BTreeMap<NodeId, MoeTuple>,
    /// Fragment to its parent fragment in the supergraph forest.
    pub supergraph: BTreeMap<NodeId, Option<NodeId>>,
    pub colors: BTreeMap<NodeId, u64>,
    /// (parent fragment, child fragment).
    pub matching: Vec<(NodeId, NodeId)>,
    pub readded: Vec<NodeId>,
    pub after: Forest,
    pub max_diameter: u32,
}

impl PhaseSnapshot {
    pub fn fragments(&self) -> usize {
        self.after.roots().len()
    }
}

#[derive(Debug, Clone)]
pub struct GhsOutcome {
    pub fragments: Forest,
    pub phases: u32,
    pub snapshots: Vec<PhaseSnapshot>,
}

/// Local knowledge about supergraph edges, per node.
struct Wiring {
    moe_port: Vec<Option<PortId>>,
    up_port: Vec<Option<PortId>>,
    children: Vec<Vec<(PortId, NodeId)>>,
    root_edge: Vec<bool>,
    nbr_frag: Vec<Vec<NodeId>>,
}

impl Wiring {
    fn derive(
        frags: &Forest,
        frag_moe: &[Option<MoeTuple>],
        neighbours: &[Vec<(NodeId, NodeId)>],
        heard: &[Vec<MoeValue>],
    ) -> Result<Self, MstError> {
        let n = frags.len();
        let mut w = Wiring {
            moe_port: vec![None; n],
            up_port: vec![None; n],
            children: vec![Vec::new(); n],
            root_edge: vec![false; n],
            nbr_frag: neighbours.iter().map(|ps| ps.iter().map(|&(_, c)| c).collect()).collect(),
        };
        for v in 0..n {
            let vid = v as NodeId;
            let f = frags.view(vid).fragment_id;
            for (p, &(x, fx)) in neighbours[v].iter().enumerate() {
                let p = p as PortId;
                let mine = frag_moe[v].is_some_and(|m| m.u == vid && m.v == x);
                let theirs = heard[v][p as usize].0.is_some_and(|m| m.u == x && m.v == vid);
                let mutual = mine && theirs;
                if mutual && f == fx {
                    return Err(MstError::protocol("supergraph", format!("fragment {f} chose an inner edge")));
                }
                if mine {
                    w.moe_port[v] = Some(p);
                    if mutual && f < fx {
                        w.root_edge[v] = true;
                    } else {
                        w.up_port[v] = Some(p);
                    }
                }
                if theirs && !(mutual && fx < f) {
                    w.children[v].push((p, fx));
                }
            }
        }
        Ok(w)
    }
}

/// State kept at a fragment root during one phase.
#[derive(Debug, Clone)]
struct Head {
    active: bool,
    moe: Option<MoeTuple>,
    parent: Option<NodeId>,
    children: BTreeMap<NodeId, bool>,
    color: u64,
    partner: Option<NodeId>,
}

fn pulse<T>(
    net: &mut Network<'_>,
    tree: &Forest,
    body: impl FnOnce(&mut Network<'_>) -> Result<T, MstError>,
) -> Result<T, MstError> {
    beta_pulse(net, STAGE_TWO, tree, body)
}

/// Stage II: grows fragments for the number of phases fixed by `n` and the
/// diameter of `tree`, synchronised over `tree`.
pub fn controlled_ghs(net: &mut Network<'_>, tree: &Forest, tree_diameter: u32) -> Result<GhsOutcome, MstError> {
    let g = net.graph();
    let phases = ghs_phase_count(g.n(), tree_diameter);
    let rounds = coloring_rounds(g.n());
    let mut fragments = Forest::singletons(g);
    let mut snapshots = Vec::new();
    beta_counter(net, STAGE_TWO, tree, phases, |net, i| {
        let snap = run_phase(net, tree, &fragments, i, rounds)?;
        fragments = snap.after.clone();
        snapshots.push(snap);
        Ok::<(), MstError>(())
    })?;
    Ok(GhsOutcome {
        fragments,
        phases,
        snapshots,
    })
}

fn run_phase(
    net: &mut Network<'_>,
    tree: &Forest,
    frags: &Forest,
    phase: u32,
    cv_rounds: u32,
) -> Result<PhaseSnapshot, MstError> {
    let g = net.graph();
    let n = g.n();
    let s = STAGE_TWO;
    let roots = frags.roots();
    let limit = 1u64 << phase.min(63);
    let frag_of: Vec<NodeId> = (0..n as NodeId).map(|v| frags.fragment_of(v)).collect();

    // Step 1: activity.
    let (diam, told) = pulse(net, tree, |net| {
        let diam = diam_calc(net, s, frags)?;
        let flags = diam.iter().map(|(&r, &d)| (r, Flag(u64::from(d) <= limit))).collect();
        let told = frag_bcast(net, s, frags, &flags)?;
        Ok((diam, told.received))
    })?;
    let active: Vec<bool> = told.iter().map(|f| f.is_some_and(|f| f.0)).collect();
    let active_roots: Vec<NodeId> = roots.iter().copied().filter(|&r| active[r as usize]).collect();

    // Step 2: lightest outgoing edges of active fragments.
    let (found, told) = pulse(net, tree, |net| {
        let found = find_moe(net, s, frags, &active_roots)?;
        let values = found.at_root.iter().map(|(&r, &m)| (r, MoeValue(m))).collect();
        let told = frag_bcast(net, s, frags, &values)?;
        Ok((found, told.received))
    })?;
    let frag_moe: Vec<Option<MoeTuple>> = told.iter().map(|m| m.and_then(|m| m.0)).collect();

    // Step 3: every node tells every neighbour its fragment's edge.
    let heard = pulse(net, tree, |net| {
        Ok(announce(net, s, frag_moe.iter().map(|&m| MoeValue(m)).collect())?)
    })?;
    let wiring = Wiring::derive(frags, &frag_moe, &found.neighbours, &heard)?;

    // Step 4: supergraph roots and child lists.
    let (tally, kids) = pulse(net, tree, |net| {
        let start = roots.iter().map(|&r| (r, Signal)).collect();
        let tally = wave_echo(net, s, frags, &start, |v, _, kids: Vec<Tally>| Tally {
            tree_root: wiring.root_edge[v as usize] || kids.iter().any(|k| k.tree_root),
            children: wiring.children[v as usize].len() as u64 + kids.iter().map(|k| k.children).sum::<u64>(),
        })?
        .at_root;
        let items = (0..n)
            .flat_map(|v| wiring.children[v].iter().map(move |&(_, c)| (v as NodeId, Count(u64::from(c)))))
            .collect();
        let expected = tally.iter().map(|(&r, t)| (r, t.children as usize)).collect();
        let kids = upcast(net, s, frags, items, &expected)?.at_root;
        Ok((tally, kids))
    })?;
    let mut heads: BTreeMap<NodeId, Head> = BTreeMap::new();
    for &r in &roots {
        let moe = found.at_root.get(&r).copied().flatten();
        let parent = moe.filter(|_| !tally[&r].tree_root).map(|m| m.to);
        let children = kids[&r].iter().map(|&(_, c)| (c.0 as NodeId, false)).collect();
        heads.insert(
            r,
            Head {
                active: active[r as usize],
                moe,
                parent,
                children,
                color: u64::from(r),
                partner: None,
            },
        );
    }
    for (&r, h) in &heads {
        if let Some(p) = h.parent {
            if !heads.get(&p).is_some_and(|ph| ph.children.contains_key(&r)) {
                return Err(MstError::protocol("supergraph", format!("{p} does not list child {r}")));
            }
        }
    }

    // Step 5: colour the supergraph forest.
    for _ in 0..cv_rounds {
        let parent_colors = tree_round(
            net,
            tree,
            frags,
            &wiring,
            &heads,
            |_, h| Count(h.color),
            |_, c: &Count| *c,
            None,
        )?;
        for (r, h) in heads.iter_mut() {
            let from_parent = parent_colors[r].iter().find_map(|(_, m)| match m {
                TreeMsg::Down(c) => Some(c.0),
                TreeMsg::Up(_) => None,
            });
            h.color = cv_step(h.color, from_parent);
        }
    }
    for (&r, h) in &heads {
        let clash = h.parent.is_some_and(|p| heads[&p].color == h.color);
        if h.color >= 6 || clash {
            return Err(MstError::protocol("coloring", format!("fragment {r} ends with colour {}", h.color)));
        }
    }

    // Step 6: match by colour classes.
    for c in 0..u64::from(MATCHING_ROUNDS) {
        let mut picks: BTreeMap<NodeId, NodeId> = BTreeMap::new();
        for (&r, h) in heads.iter_mut() {
            if h.color == c && h.partner.is_none() {
                if let Some(k) = h.children.iter().find(|(_, &m)| !m).map(|(&k, _)| k) {
                    h.partner = Some(k);
                    h.children.insert(k, true);
                    picks.insert(r, k);
                }
            }
        }
        let status = |f: NodeId, o: &Offer| Link::Status {
            fragment: f,
            matched: o.matched,
        };
        let got = tree_round(
            net,
            tree,
            frags,
            &wiring,
            &heads,
            |r, h| Offer {
                pick: picks.get(&r).copied(),
                matched: h.partner.is_some(),
            },
            |child, o: &Offer| Link::Pick(o.pick == Some(child)),
            Some(&status),
        )?;
        for (r, list) in got {
            let h = heads.get_mut(&r).expect("every root answers");
            for (_, m) in list {
                match m {
                    TreeMsg::Down(Link::Pick(true)) => {
                        if h.partner.is_some() {
                            return Err(MstError::protocol("matching", format!("{r} picked twice")));
                        }
                        h.partner = h.parent;
                    }
                    TreeMsg::Up(Link::Status { fragment, matched }) => {
                        let mine = h.partner == Some(fragment);
                        match h.children.get_mut(&fragment) {
                            Some(slot) => *slot = matched || mine,
                            None => {
                                return Err(MstError::protocol("matching", format!("{fragment} is not a child of {r}")))
                            }
                        }
                    }
                    _ => {}
                }
            }
        }
    }
    let mut matching = Vec::new();
    for (&r, h) in &heads {
        if let Some(p) = h.partner {
            if heads[&p].partner != Some(r) {
                return Err(MstError::protocol("matching", format!("{r} and {p} disagree")));
            }
            if h.parent == Some(p) {
                matching.push((p, r));
            } else if heads[&p].parent != Some(r) {
                return Err(MstError::protocol("matching", format!("{r}-{p} is not a supergraph edge")));
            }
        } else if let Some(p) = h.parent {
            if heads[&p].partner.is_none() {
                return Err(MstError::protocol("matching", format!("edge {r}-{p} left uncovered")));
            }
        }
    }
    matching.sort_unstable();

    // Step 7: matched edges and the edges of unmatched active fragments.
    let notes: BTreeMap<NodeId, MatchNote> = heads
        .iter()
        .map(|(&r, h)| {
            (
                r,
                MatchNote {
                    partner: h.partner,
                    readd: h.active && h.partner.is_none() && h.moe.is_some(),
                },
            )
        })
        .collect();
    let readded: Vec<NodeId> = notes.iter().filter(|(_, m)| m.readd).map(|(&r, _)| r).collect();
    let told = pulse(net, tree, |net| Ok(frag_bcast(net, s, frags, &notes)?.received))?;
    let mut mark: Vec<Vec<bool>> = Vec::with_capacity(n);
    for v in 0..n {
        let note = told[v].expect("every fragment hears its note");
        let row = (0..g.degree(v as NodeId))
            .map(|p| {
                let fx = wiring.nbr_frag[v][p];
                let p = p as PortId;
                let own = wiring.moe_port[v] == Some(p) && (note.readd || note.partner == Some(fx));
                let child = wiring.children[v].contains(&(p, fx)) && note.partner == Some(fx);
                own || child
            })
            .collect();
        mark.push(row);
    }
    let sends = mark
        .iter()
        .map(|row| row.iter().enumerate().map(|(p, &b)| (p as PortId, Flag(b))).collect())
        .collect();
    let expect: Vec<usize> = (0..n).map(|v| g.degree(v as NodeId)).collect();
    let inbox = pulse(net, tree, |net| Ok(exchange(net, s, sends, &expect)?))?;
    let merge_ports: Vec<Vec<PortId>> = (0..n)
        .map(|v| {
            let mut ports: Vec<PortId> = inbox[v]
                .iter()
                .filter(|(p, f)| f.0 || mark[v][*p as usize])
                .map(|&(p, _)| p)
                .collect();
            ports.sort_unstable();
            ports
        })
        .collect();

    // Step 8: spread the smallest fragment id over each component.
    let mut best: Vec<NodeId> = frag_of.clone();
    let mut via: Vec<Option<NodeId>> = vec![None; n];
    let mut offer: Vec<Option<(NodeId, PortId)>> = vec![None; n];
    let mut root_best: BTreeMap<NodeId, Best> = roots.iter().map(|&r| (r, Best { id: r, via: None })).collect();
    for _ in 0..SPREAD_ROUNDS {
        let sends = (0..n)
            .map(|v| merge_ports[v].iter().map(|&p| (p, Count(u64::from(best[v])))).collect())
            .collect();
        let expect: Vec<usize> = merge_ports.iter().map(Vec::len).collect();
        let inbox = pulse(net, tree, |net| Ok(exchange(net, s, sends, &expect)?))?;
        for v in 0..n {
            for &(p, c) in &inbox[v] {
                let c = c.0 as NodeId;
                if c < best[v] && offer[v].is_none_or(|(b, _)| c < b) {
                    offer[v] = Some((c, p));
                }
            }
        }
        let cand = pulse(net, tree, |net| {
            let start = roots.iter().map(|&r| (r, Signal)).collect();
            Ok(wave_echo(net, s, frags, &start, |v, _, kids: Vec<Candidate>| {
                let own = offer[v as usize].map(|(b, _)| (b, v));
                Candidate(kids.into_iter().filter_map(|k| k.0).chain(own).min())
            })?
            .at_root)
        })?;
        for (r, c) in cand {
            if let Some((b, w)) = c.0 {
                let cur = root_best.get_mut(&r).expect("every root");
                if b < cur.id {
                    *cur = Best { id: b, via: Some(w) };
                }
            }
        }
        let told = pulse(net, tree, |net| Ok(frag_bcast(net, s, frags, &root_best)?.received))?;
        for v in 0..n {
            let b = told[v].expect("every node hears the settled id");
            best[v] = b.id;
            via[v] = b.via;
        }
    }
    check_spread(g, frags, &merge_ports, &root_best)?;

    // Re-orient towards the node carrying the new id.
    let movers: BTreeMap<NodeId, usize> = root_best.iter().filter(|(_, b)| b.via.is_some()).map(|(&r, _)| (r, 1)).collect();
    let items: Vec<(NodeId, Signal)> = root_best.values().filter_map(|b| b.via.map(|w| (w, Signal))).collect();
    let routes = pulse(net, tree, |net| Ok(upcast(net, s, frags, items, &movers)?.routes))?;
    let new_parent: Vec<Option<PortId>> = (0..n)
        .map(|v| match via[v] {
            Some(w) if w as usize == v => offer[v].map(|(_, p)| p),
            Some(w) if routes[v].contains_key(&w) => Some(routes[v][&w]),
            _ => frags.view(v as NodeId).parent,
        })
        .collect();
    let sends = (0..n)
        .map(|v| merge_ports[v].iter().map(|&p| (p, Flag(new_parent[v] == Some(p)))).collect())
        .collect();
    let expect: Vec<usize> = merge_ports.iter().map(Vec::len).collect();
    let inbox = pulse(net, tree, |net| Ok(exchange(net, s, sends, &expect)?))?;
    for v in 0..n {
        for &(p, f) in &inbox[v] {
            if f.0 == (new_parent[v] == Some(p)) {
                return Err(MstError::protocol("merge", format!("edge at {v} port {p} oriented both ways or neither")));
            }
        }
    }
    let parents: Vec<Option<NodeId>> = (0..n)
        .map(|v| new_parent[v].map(|p| g.port(v as NodeId, p).peer))
        .collect();
    let after = Forest::from_parents(g, &parents, &best)?;
    if let Some(v) = (0..n as NodeId).find(|&v| after.fragment_of(v) != best[v as usize]) {
        return Err(MstError::protocol("merge", format!("node {v} is not under the root named {}", best[v as usize])));
    }

    let max_diameter = fragment_diameters(g, &after).values().copied().max().unwrap_or(0);
    Ok(PhaseSnapshot {
        phase,
        before: frags.clone(),
        activity: diam.keys().map(|&r| (r, active[r as usize])).collect(),
        proposed: heads.iter().filter_map(|(&r, h)| h.moe.map(|m| (r, m))).collect(),
        supergraph: heads.iter().map(|(&r, h)| (r, h.parent)).collect(),
        colors: heads.iter().map(|(&r, h)| (r, h.color)).collect(),
        matching,
        readded,
        after,
        max_diameter,
    })
}

/// Offline check that the spread rounds reached every fragment of every
/// merged component.
fn check_spread(
    g: &WeightedGraph,
    frags: &Forest,
    merge_ports: &[Vec<PortId>],
    settled: &BTreeMap<NodeId, Best>,
) -> Result<(), MstError> {
    let mut dsu = Dsu::new(g.n());
    for (v, ports) in merge_ports.iter().enumerate() {
        for &p in ports {
            let x = g.port(v as NodeId, p).peer;
            dsu.union(frags.fragment_of(v as NodeId) as usize, frags.fragment_of(x) as usize);
        }
    }
    let mut least: BTreeMap<usize, NodeId> = BTreeMap::new();
    for &r in settled.keys() {
        let c = dsu.find(r as usize);
        let e = least.entry(c).or_insert(r);
        *e = (*e).min(r);
    }
    for (&r, b) in settled {
        let want = least[&dsu.find(r as usize)];
        if b.id != want {
            return Err(MstError::protocol("merge", format!("fragment {r} settled on {} instead of {want}", b.id)));
        }
    }
    Ok(())
}

/// Messages a fragment root gathers in one supergraph round.
#[derive(Debug, Clone)]
enum TreeMsg<M> {
    Down(M),
    Up(M),
}

impl<M: sim_kernel::Payload> sim_kernel::Payload for TreeMsg<M> {
    fn bits(&self, word: u32) -> u32 {
        match self {
            TreeMsg::Down(m) | TreeMsg::Up(m) => m.bits(word) + 1,
        }
    }
}

/// One simulated supergraph round in three synchronised sub-steps: each
/// root broadcasts `say`; nodes on supergraph edges send `down` to child
/// fragments (and `up` to the parent fragment when given); everything
/// received is upcast to the root, which knows how many pieces to expect.
#[allow(clippy::too_many_arguments)]
fn tree_round<B, M>(
    net: &mut Network<'_>,
    tree: &Forest,
    frags: &Forest,
    wiring: &Wiring,
    heads: &BTreeMap<NodeId, Head>,
    say: impl Fn(NodeId, &Head) -> B,
    down: impl Fn(NodeId, &B) -> M,
    up: Option<&dyn Fn(NodeId, &B) -> M>,
) -> Result<BTreeMap<NodeId, Vec<(NodeId, TreeMsg<M>)>>, MstError>
where
    B: sim_kernel::Payload,
    M: sim_kernel::Payload,
{
    let n = frags.len();
    let s = STAGE_TWO;
    let values: BTreeMap<NodeId, B> = heads.iter().map(|(&r, h)| (r, say(r, h))).collect();
    let known = pulse(net, tree, |net| Ok(frag_bcast(net, s, frags, &values)?.received))?;
    let mut sends: Vec<Vec<(PortId, TreeMsg<M>)>> = vec![Vec::new(); n];
    let mut expect = vec![0usize; n];
    for v in 0..n {
        let b = known[v].as_ref().expect("every fragment broadcasts");
        let f = frags.fragment_of(v as NodeId);
        for &(p, child) in &wiring.children[v] {
            sends[v].push((p, TreeMsg::Down(down(child, b))));
        }
        if let Some(p) = wiring.up_port[v] {
            expect[v] += 1;
            if let Some(up) = up {
                sends[v].push((p, TreeMsg::Up(up(f, b))));
            }
        }
        if up.is_some() {
            expect[v] += wiring.children[v].len();
        }
    }
    let inbox = pulse(net, tree, |net| Ok(exchange(net, s, sends, &expect)?))?;
    let items: Vec<(NodeId, TreeMsg<M>)> = inbox
        .into_iter()
        .enumerate()
        .flat_map(|(v, list)| list.into_iter().map(move |(_, m)| (v as NodeId, m)))
        .collect();
    let expected: BTreeMap<NodeId, usize> = heads
        .iter()
        .map(|(&r, h)| {
            let from_kids = if up.is_some() { h.children.len() } else { 0 };
            (r, usize::from(h.parent.is_some()) + from_kids)
        })
        .collect();
    pulse(net, tree, |net| Ok(upcast(net, s, frags, items, &expected)?.at_root))
}
