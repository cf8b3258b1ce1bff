use std::path::Path;

use graph_core::{canonical_edge_set, dump_edges, kruskal_mst, Edge, WeightedGraph};
use lds_tree::{mpx_trials, MpxStats};
use rayon::prelude::*;
use serde::Serialize;
use sing_mst::{run_sing_mst, MstConfig};

use crate::config::{read_graph, ExperimentConfig, GraphSpec, SweepConfig};
use crate::error::CliError;
use crate::metrics::{measure, MetricsRow};
use crate::scaling::{summarize, ScalingSummary};

/// Runs every seed of a validated configuration, in seed order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<MetricsRow>, CliError> {
    cfg.validate()?;
    let hash = cfg.hash();
    let fixed = match &cfg.graph {
        GraphSpec::File { path } => Some(read_graph(path)?),
        _ => None,
    };
    cfg.seeds
        .par_iter()
        .map(|&seed| {
            let g = match &fixed {
                Some(g) => g.clone(),
                None => cfg.graph.build(cfg.n, seed)?,
            };
            measure(&g, &cfg.mst_config(seed), &hash).map(|(row, _)| row)
        })
        .collect()
}

/// Sweeps every (n, delay model, seed) and fits the scaling exponents.
pub fn run_sweep(cfg: &SweepConfig) -> Result<(Vec<MetricsRow>, ScalingSummary), CliError> {
    cfg.validate()?;
    let jobs: Vec<(ExperimentConfig, String, u64)> = cfg
        .points()
        .into_iter()
        .flat_map(|p| {
            let hash = p.hash();
            p.seeds.clone().into_iter().map(move |s| (p.clone(), hash.clone(), s))
        })
        .collect();
    let rows: Vec<MetricsRow> = jobs
        .par_iter()
        .map(|(p, hash, seed)| {
            let g = p.graph.build(p.n, *seed)?;
            measure(&g, &p.mst_config(*seed), hash).map(|(row, _)| row)
        })
        .collect::<Result<_, _>>()?;
    let summary = summarize(&rows, cfg.envelope);
    Ok((rows, summary))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MpxReport {
    pub kind: String,
    pub n: usize,
    pub beta: f64,
    pub trials: usize,
    pub mean_cut_fraction: f64,
    pub sd_cut_fraction: f64,
    pub max_strong_diam: u32,
    pub bound_4ln_over_beta: f64,
    pub diam_ratio_mean: Option<f64>,
    pub max_tree_depth: u32,
}

pub fn mpx_report(spec: &GraphSpec, n: usize, beta: f64, trials: usize, seed: u64) -> Result<MpxReport, CliError> {
    if n == 0 {
        return Err(CliError::Config("n must be positive".into()));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(CliError::Config(format!("beta {beta} must be positive")));
    }
    if trials == 0 {
        return Err(CliError::Config("trials must be positive".into()));
    }
    let g = spec.build(Some(n), seed)?;
    let raw = mpx_trials(std::slice::from_ref(&g), beta, trials, seed).map_err(|e| CliError::Run(e.to_string()))?;
    let depth = raw.iter().map(|t| t.max_tree_depth).max().unwrap_or(0);
    let stats = MpxStats::from_trials(beta, raw);
    Ok(MpxReport {
        kind: spec.kind(n).map_or("file", |k| k.name()).to_string(),
        n: g.n(),
        beta,
        trials,
        mean_cut_fraction: stats.cut_fraction.mean,
        sd_cut_fraction: stats.cut_fraction.sd,
        max_strong_diam: stats.max_strong_diameter,
        bound_4ln_over_beta: 4.0 * (g.n() as f64).ln() / beta,
        diam_ratio_mean: stats.diameter_ratio.map(|s| s.mean),
        max_tree_depth: depth,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    /// The computed tree as `u v w` lines sorted by weight.
    pub dump: String,
    /// Oracle edges the run missed.
    pub missing: Vec<Edge>,
    /// Edges the run reported that the oracle does not have.
    pub extra: Vec<Edge>,
}

impl Verification {
    pub fn ok(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }
}

pub fn verify_graph(g: &WeightedGraph, seed: u64) -> Result<Verification, CliError> {
    let cfg = MstConfig {
        seed,
        ..MstConfig::default()
    };
    let run = run_sing_mst(g, &cfg).map_err(|e| CliError::Run(e.to_string()))?;
    let got = canonical_edge_set(g, run.mst.iter().copied());
    let want = kruskal_mst(g);
    let diff = |a: &[usize], b: &[usize]| -> Vec<Edge> {
        a.iter().filter(|e| !b.contains(e)).map(|&e| g.edge(e)).collect()
    };
    Ok(Verification {
        dump: dump_edges(g, &got),
        missing: diff(&want, &got),
        extra: diff(&got, &want),
    })
}

pub fn verify_file(path: &Path, seed: u64) -> Result<Verification, CliError> {
    verify_graph(&read_graph(path)?, seed)
}
