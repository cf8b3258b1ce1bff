use std::path::Path;
use std::time::Instant;

use graph_core::{canonical_edge_set, hop_diameter, kruskal_mst, WeightedGraph};
use serde::{Deserialize, Serialize};
use sim_kernel::account;
use sing_mst::{run_sing_mst, MstConfig, MstRun};

use crate::error::CliError;

/// One CSV row per (configuration, seed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub config_hash: String,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    /// Hop diameter of the input graph.
    #[serde(rename = "D")]
    pub d: u32,
    /// Diameter of the spanning tree built in preprocessing.
    #[serde(rename = "D_prime")]
    pub d_prime: u32,
    pub messages_total: u64,
    /// `;`-separated, ordered by stage number.
    pub messages_per_stage: String,
    pub time_total: f64,
    pub time_per_stage: String,
    pub mst_ok: bool,
    pub fragments_after_stage2: u64,
    pub wall_clock_ms: u64,
}

pub const CSV_HEADER: [&str; 13] = [
    "config_hash",
    "seed",
    "n",
    "m",
    "D",
    "D_prime",
    "messages_total",
    "messages_per_stage",
    "time_total",
    "time_per_stage",
    "mst_ok",
    "fragments_after_stage2",
    "wall_clock_ms",
];

/// Runs the algorithm once and checks it against Kruskal.
///
/// Errors from the simulator or a failed message-count reconciliation are
/// returned; a wrong tree is reported through `mst_ok`.
pub fn measure(g: &WeightedGraph, cfg: &MstConfig, config_hash: &str) -> Result<(MetricsRow, MstRun), CliError> {
    let d = hop_diameter(g).map_err(|e| CliError::Config(e.to_string()))?;
    let start = Instant::now();
    let run = run_sing_mst(g, cfg).map_err(|e| CliError::Run(e.to_string()))?;
    let wall = start.elapsed();
    account(&run.report).map_err(|e| CliError::Run(e.to_string()))?;
    let mst_ok = canonical_edge_set(g, run.mst.iter().copied()) == kruskal_mst(g);
    let stages = &run.report.per_stage;
    let row = MetricsRow {
        config_hash: config_hash.to_string(),
        seed: cfg.seed,
        n: g.n(),
        m: g.m(),
        d,
        d_prime: run.tree_diameter,
        messages_total: run.report.message_count,
        messages_per_stage: join(stages.values().map(|s| s.messages.to_string())),
        time_total: run.report.completion_time.as_units(),
        time_per_stage: join(stages.values().map(|s| format!("{:.3}", s.span().as_units()))),
        mst_ok,
        fragments_after_stage2: run.base_fragments,
        wall_clock_ms: wall.as_millis() as u64,
    };
    Ok((row, run))
}

fn join(parts: impl Iterator<Item = String>) -> String {
    parts.collect::<Vec<_>>().join(";")
}

pub fn write_csv(path: &Path, rows: &[MetricsRow]) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Run(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    if rows.is_empty() {
        w.write_record(CSV_HEADER).map_err(io)?;
    }
    for r in rows {
        w.serialize(r).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_csv(path: &Path) -> Result<Vec<MetricsRow>, CliError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::Config(e.to_string()))?;
    r.deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}
