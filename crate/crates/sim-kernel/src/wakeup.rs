use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::time::SimTime;

/// Spontaneous wake-up times; `None` means the node only wakes when a message arrives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WakeupSchedule {
    pub wake_time: Vec<Option<SimTime>>,
}

impl WakeupSchedule {
    pub fn all_at_zero(n: usize) -> Self {
        Self {
            wake_time: vec![Some(SimTime::ZERO); n],
        }
    }

    pub fn single(n: usize, v: usize) -> Self {
        let mut wake_time = vec![None; n];
        wake_time[v] = Some(SimTime::ZERO);
        Self { wake_time }
    }

    pub fn single_random(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::single(n, rng.gen_range(0..n))
    }

    /// Every node wakes at an independent uniform time in `[0, span]`; the
    /// earliest is shifted to zero so time counts from the first wake-up.
    pub fn staggered_uniform(n: usize, seed: u64, span: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<SimTime> = (0..n)
            .map(|_| SimTime::from_units(rng.gen_range(0.0..=span.max(0.0))))
            .collect();
        let first = raw.iter().copied().min().unwrap_or(SimTime::ZERO);
        Self {
            wake_time: raw.into_iter().map(|t| Some(t - first)).collect(),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.wake_time.iter().any(Option::is_some)
    }
}
