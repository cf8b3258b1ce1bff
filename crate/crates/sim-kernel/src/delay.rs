use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::time::SimTime;

pub const DEFAULT_FAST_DELAY: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DelayKind {
    Unit,
    Uniform,
    PerEdgeConstant,
    /// `slow_fraction` of the edges (both directions) take 1.0, the rest `fast_delay`.
    LaggyEdge { slow_fraction: f64, fast_delay: f64 },
}

impl DelayKind {
    pub fn laggy(slow_fraction: f64) -> Self {
        DelayKind::LaggyEdge {
            slow_fraction,
            fast_delay: DEFAULT_FAST_DELAY,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DelayKind::Unit => "unit",
            DelayKind::Uniform => "uniform",
            DelayKind::PerEdgeConstant => "per_edge_constant",
            DelayKind::LaggyEdge { .. } => "laggy_edge_adversary",
        }
    }
}

/// Oblivious delay adversary: every delay is a pure function of
/// `(seed, directed edge, message index)` and lies in `(0, 1]`.
#[derive(Debug, Clone)]
pub struct DelayModel {
    kind: DelayKind,
    base: ChaCha8Rng,
    slow: Vec<bool>,
}

impl DelayModel {
    /// `m` is the number of undirected edges; edge `e` owns directed ids `2e` and `2e + 1`.
    pub fn new(kind: DelayKind, seed: u64, m: usize) -> Self {
        let base = ChaCha8Rng::seed_from_u64(seed);
        let slow = match kind {
            DelayKind::LaggyEdge { slow_fraction, .. } => {
                let count = ((slow_fraction.clamp(0.0, 1.0) * m as f64).round() as usize).min(m);
                let mut order: Vec<usize> = (0..m).collect();
                order.shuffle(&mut base.clone());
                let mut slow = vec![false; m];
                for &e in &order[..count] {
                    slow[e] = true;
                }
                slow
            }
            _ => Vec::new(),
        };
        Self { kind, base, slow }
    }

    pub fn kind(&self) -> DelayKind {
        self.kind
    }

    pub fn is_slow(&self, edge: usize) -> bool {
        self.slow.get(edge).copied().unwrap_or(false)
    }

    pub fn sample(&self, directed_edge: usize, msg_index: u64) -> SimTime {
        match self.kind {
            DelayKind::Unit => SimTime::UNIT,
            DelayKind::Uniform => self.draw(directed_edge, msg_index),
            DelayKind::PerEdgeConstant => self.draw(directed_edge, 0),
            DelayKind::LaggyEdge { fast_delay, .. } => {
                if self.slow[directed_edge / 2] {
                    SimTime::UNIT
                } else {
                    SimTime::from_units(fast_delay).clamp(SimTime(1), SimTime::UNIT)
                }
            }
        }
    }

    /// Uniform on `{1, ..., TICKS_PER_UNIT}` ticks, i.e. on `(0, 1]`.
    fn draw(&self, stream: usize, index: u64) -> SimTime {
        let mut rng = self.base.clone();
        rng.set_stream(stream as u64);
        rng.set_word_pos(index as u128 * 4);
        SimTime(rng.gen_range(1..=SimTime::TICKS_PER_UNIT))
    }
}
