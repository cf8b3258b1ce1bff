use graph_core::{hop_diameter, induced_cluster_graph, validate_partition, WeightedGraph};

use crate::error::LdsError;
use crate::mpx::mpx_sync;

pub const MIN_TRIALS: usize = 30;

#[derive(Debug, Clone, PartialEq)]
pub struct MpxTrial {
    pub graph: usize,
    pub seed: u64,
    pub cut_fraction: f64,
    pub max_strong_diameter: u32,
    pub max_tree_depth: u32,
    pub clusters: usize,
    /// Cluster-graph diameter over graph diameter.
    pub diameter_ratio: Option<f64>,
    pub overflow: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(xs: &[f64]) -> Option<Self> {
        if xs.is_empty() {
            return None;
        }
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = if xs.len() > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
        } else {
            0.0
        };
        Some(Self {
            mean,
            sd: var.sqrt(),
            min: xs.iter().copied().fold(f64::INFINITY, f64::min),
            max: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MpxStats {
    pub beta: f64,
    pub trials: Vec<MpxTrial>,
    pub cut_fraction: Summary,
    pub max_strong_diameter: u32,
    pub diameter_ratio: Option<Summary>,
}

/// Runs `trials` seeded decompositions of every graph and summarises them.
/// Fewer than [`MIN_TRIALS`] trials are refused.
pub fn mpx_stats(
    graphs: &[WeightedGraph],
    beta: f64,
    trials: usize,
    seed: u64,
) -> Result<MpxStats, LdsError> {
    if trials < MIN_TRIALS {
        return Err(LdsError::TooFewTrials { trials, min: MIN_TRIALS });
    }
    let results = mpx_trials(graphs, beta, trials, seed)?;
    Ok(MpxStats::from_trials(beta, results))
}

/// The raw trials behind [`mpx_stats`], without the sample-size floor.
/// Trials are split across threads; results are in (graph, trial) order.
pub fn mpx_trials(
    graphs: &[WeightedGraph],
    beta: f64,
    trials: usize,
    seed: u64,
) -> Result<Vec<MpxTrial>, LdsError> {
    if !(beta > 0.0) {
        return Err(LdsError::BadBeta(beta));
    }
    if trials == 0 || graphs.is_empty() {
        return Err(LdsError::TooFewTrials { trials, min: 1 });
    }
    let diameters: Vec<u32> = graphs
        .iter()
        .map(hop_diameter)
        .collect::<Result<_, _>>()?;
    let jobs: Vec<(usize, u64)> = (0..graphs.len())
        .flat_map(|gi| (0..trials as u64).map(move |t| (gi, seed.wrapping_add(t))))
        .collect();
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(jobs.len().max(1));
    let chunk = jobs.len().div_ceil(threads).max(1);
    let mut results: Vec<MpxTrial> = std::thread::scope(|s| {
        let handles: Vec<_> = jobs
            .chunks(chunk)
            .map(|part| {
                let diameters = &diameters;
                s.spawn(move || {
                    part.iter()
                        .map(|&(gi, sd)| trial(&graphs[gi], gi, diameters[gi], beta, sd))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("trial thread")).collect()
    });
    results.sort_by_key(|t| (t.graph, t.seed));
    Ok(results)
}

impl MpxStats {
    /// Summary of a non-empty list of trials.
    pub fn from_trials(beta: f64, trials: Vec<MpxTrial>) -> Self {
        let cuts: Vec<f64> = trials.iter().map(|t| t.cut_fraction).collect();
        let ratios: Vec<f64> = trials.iter().filter_map(|t| t.diameter_ratio).collect();
        MpxStats {
            beta,
            cut_fraction: Summary::of(&cuts).expect("at least one trial"),
            max_strong_diameter: trials.iter().map(|t| t.max_strong_diameter).max().unwrap_or(0),
            diameter_ratio: Summary::of(&ratios),
            trials,
        }
    }
}

fn trial(g: &WeightedGraph, gi: usize, diameter: u32, beta: f64, seed: u64) -> MpxTrial {
    let (p, out) = mpx_sync(g, beta, seed);
    let report = validate_partition(g, &p, u32::MAX);
    let cg = induced_cluster_graph(g, &p).expect("partition matches graph");
    let ratio = cg
        .topology()
        .diameter()
        .filter(|_| diameter > 0)
        .map(|d| d as f64 / diameter as f64);
    MpxTrial {
        graph: gi,
        seed,
        cut_fraction: report.cut_fraction,
        max_strong_diameter: report.max_strong_diameter().expect("flooding clusters are connected"),
        max_tree_depth: report.max_tree_depth(),
        clusters: report.clusters.len(),
        diameter_ratio: ratio,
        overflow: out.overflow,
    }
}
