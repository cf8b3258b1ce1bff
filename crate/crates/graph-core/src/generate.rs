use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::GraphError;
use crate::graph::{Edge, NodeId, WeightedGraph};

/// Random kinds are resampled with `seed + 1` up to this many times.
pub const MAX_RETRIES: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphKind {
    Path,
    /// Ring plus `chords` random extra edges.
    Cycle { chords: usize },
    /// Row-major grid of the given width; the last row may be partial.
    Grid { width: usize },
    Complete,
    ErdosRenyi { p: f64 },
    /// Points in the unit square joined when closer than `radius`.
    Geometric { radius: f64 },
    /// Random recursive tree plus `extra` random non-tree edges.
    TreePlusEdges { extra: usize },
}

impl GraphKind {
    pub fn name(&self) -> &'static str {
        match self {
            GraphKind::Path => "path",
            GraphKind::Cycle { .. } => "cycle",
            GraphKind::Grid { .. } => "grid",
            GraphKind::Complete => "complete",
            GraphKind::ErdosRenyi { .. } => "erdos_renyi",
            GraphKind::Geometric { .. } => "geometric",
            GraphKind::TreePlusEdges { .. } => "tree_plus_edges",
        }
    }

    fn is_random(&self) -> bool {
        matches!(
            self,
            GraphKind::ErdosRenyi { .. } | GraphKind::Geometric { .. }
        )
    }

    /// Erdős–Rényi with edge probability `2 ln n / n`, capped at 1.
    pub fn sparse_er(n: usize) -> Self {
        let nf = n.max(2) as f64;
        GraphKind::ErdosRenyi {
            p: (2.0 * nf.ln() / nf).min(1.0),
        }
    }

    /// Square-ish grid for `n` nodes.
    pub fn square_grid(n: usize) -> Self {
        GraphKind::Grid {
            width: ((n as f64).sqrt().ceil() as usize).max(1),
        }
    }
}

/// Deterministic generator: the same `(kind, n, seed)` always yields the same graph.
pub fn generate_graph(kind: GraphKind, n: usize, seed: u64) -> Result<WeightedGraph, GraphError> {
    validate(kind, n)?;
    let attempts = if kind.is_random() { MAX_RETRIES } else { 1 };
    for attempt in 0..attempts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt as u64));
        let pairs = structure(kind, n, &mut rng);
        let g = assign_weights(n, pairs, &mut rng)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    if kind.is_random() {
        Err(GraphError::RetriesExhausted(attempts))
    } else {
        Err(GraphError::Disconnected)
    }
}

fn validate(kind: GraphKind, n: usize) -> Result<(), GraphError> {
    if n == 0 {
        return Err(GraphError::InvalidParams("n must be at least 1".into()));
    }
    let bad = |m: &str| Err(GraphError::InvalidParams(m.into()));
    match kind {
        GraphKind::Cycle { chords } if n < 3 && chords > 0 => bad("cycle needs n >= 3 for chords"),
        GraphKind::Grid { width: 0 } => bad("grid width must be positive"),
        GraphKind::ErdosRenyi { p } if !(p > 0.0 && p <= 1.0) => bad("p must lie in (0, 1]"),
        GraphKind::Geometric { radius } if !(radius > 0.0 && radius.is_finite()) => {
            bad("radius must be positive")
        }
        GraphKind::Cycle { chords } | GraphKind::TreePlusEdges { extra: chords }
            if chords > max_edges(n) =>
        {
            bad("more extra edges requested than the graph can hold")
        }
        _ => Ok(()),
    }
}

fn max_edges(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

fn structure(kind: GraphKind, n: usize, rng: &mut ChaCha8Rng) -> Vec<(NodeId, NodeId)> {
    let id = |x: usize| x as NodeId;
    let mut pairs = Vec::new();
    match kind {
        GraphKind::Path => pairs.extend((1..n).map(|i| (id(i - 1), id(i)))),
        GraphKind::Cycle { chords } => {
            pairs.extend((1..n).map(|i| (id(i - 1), id(i))));
            if n >= 3 {
                pairs.push((id(n - 1), 0));
            }
            add_random(&mut pairs, n, chords, rng);
        }
        GraphKind::Grid { width } => {
            for i in 0..n {
                if i % width + 1 < width && i + 1 < n {
                    pairs.push((id(i), id(i + 1)));
                }
                if i + width < n {
                    pairs.push((id(i), id(i + width)));
                }
            }
        }
        GraphKind::Complete => {
            for a in 0..n {
                for b in a + 1..n {
                    pairs.push((id(a), id(b)));
                }
            }
        }
        GraphKind::ErdosRenyi { p } => {
            for a in 0..n {
                for b in a + 1..n {
                    if rng.gen_bool(p) {
                        pairs.push((id(a), id(b)));
                    }
                }
            }
        }
        GraphKind::Geometric { radius } => {
            let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen(), rng.gen())).collect();
            for a in 0..n {
                for b in a + 1..n {
                    let (dx, dy) = (pts[a].0 - pts[b].0, pts[a].1 - pts[b].1);
                    if dx * dx + dy * dy <= radius * radius {
                        pairs.push((id(a), id(b)));
                    }
                }
            }
        }
        GraphKind::TreePlusEdges { extra } => {
            for i in 1..n {
                pairs.push((id(rng.gen_range(0..i)), id(i)));
            }
            add_random(&mut pairs, n, extra, rng);
        }
    }
    pairs
}

fn add_random(pairs: &mut Vec<(NodeId, NodeId)>, n: usize, count: usize, rng: &mut ChaCha8Rng) {
    let mut present: HashSet<(NodeId, NodeId)> =
        pairs.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    let target = (pairs.len() + count).min(max_edges(n));
    while pairs.len() < target {
        let a = rng.gen_range(0..n) as NodeId;
        let b = rng.gen_range(0..n) as NodeId;
        if a != b && present.insert((a.min(b), a.max(b))) {
            pairs.push((a, b));
        }
    }
}

fn assign_weights(
    n: usize,
    pairs: Vec<(NodeId, NodeId)>,
    rng: &mut ChaCha8Rng,
) -> Result<WeightedGraph, GraphError> {
    let mut weights: Vec<u64> = (1..=pairs.len() as u64).collect();
    weights.shuffle(rng);
    let edges = pairs
        .into_iter()
        .zip(weights)
        .map(|((u, v), w)| Edge { u, v, w })
        .collect();
    WeightedGraph::new(n, edges)
}
