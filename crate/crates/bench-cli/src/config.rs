use std::path::{Path, PathBuf};

use graph_core::{generate_graph, parse_graph, GraphKind, WeightedGraph};
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use sha2::{Digest, Sha256};
use sim_kernel::{DelayKind, DEFAULT_FAST_DELAY};
use sing_mst::{MstConfig, Wakeup};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSpec {
    /// Edge probability defaults to `2 ln n / n`.
    ErdosRenyi {
        #[serde(default)]
        p: Option<f64>,
    },
    /// Width defaults to a square layout.
    Grid {
        #[serde(default)]
        width: Option<usize>,
    },
    /// Chords default to `n / 8`.
    Cycle {
        #[serde(default)]
        chords: Option<usize>,
    },
    /// Extra edges default to `n / 4`.
    TreePlusEdges {
        #[serde(default)]
        extra: Option<usize>,
    },
    Path,
    Complete,
    Geometric {
        radius: f64,
    },
    File {
        path: PathBuf,
    },
}

impl GraphSpec {
    /// Parses a bare kind name with default parameters.
    pub fn from_name(name: &str) -> Result<Self, CliError> {
        Ok(match name {
            "erdos_renyi" | "er" => GraphSpec::ErdosRenyi { p: None },
            "grid" => GraphSpec::Grid { width: None },
            "cycle" => GraphSpec::Cycle { chords: None },
            "tree_plus_edges" => GraphSpec::TreePlusEdges { extra: None },
            "path" => GraphSpec::Path,
            "complete" => GraphSpec::Complete,
            other => return Err(CliError::Config(format!("unknown graph kind {other:?}"))),
        })
    }

    pub fn kind(&self, n: usize) -> Option<GraphKind> {
        Some(match *self {
            GraphSpec::ErdosRenyi { p } => match p {
                Some(p) => GraphKind::ErdosRenyi { p },
                None => GraphKind::sparse_er(n),
            },
            GraphSpec::Grid { width } => match width {
                Some(width) => GraphKind::Grid { width },
                None => GraphKind::square_grid(n),
            },
            GraphSpec::Cycle { chords } => GraphKind::Cycle {
                chords: chords.unwrap_or(n / 8),
            },
            GraphSpec::TreePlusEdges { extra } => GraphKind::TreePlusEdges {
                extra: extra.unwrap_or(n / 4),
            },
            GraphSpec::Path => GraphKind::Path,
            GraphSpec::Complete => GraphKind::Complete,
            GraphSpec::Geometric { radius } => GraphKind::Geometric { radius },
            GraphSpec::File { .. } => return None,
        })
    }

    pub fn build(&self, n: Option<usize>, seed: u64) -> Result<WeightedGraph, CliError> {
        match self {
            GraphSpec::File { path } => read_graph(path),
            _ => {
                let n = n.ok_or_else(|| CliError::Config("generated graphs need `n`".into()))?;
                let kind = self.kind(n).expect("generated kind");
                generate_graph(kind, n, seed).map_err(|e| CliError::Config(e.to_string()))
            }
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        match *self {
            GraphSpec::ErdosRenyi { p: Some(p) } if !(p > 0.0 && p <= 1.0) => {
                Err(CliError::Config(format!("edge probability {p} outside (0, 1]")))
            }
            GraphSpec::Grid { width: Some(0) } => Err(CliError::Config("grid width must be positive".into())),
            GraphSpec::Geometric { radius } if !(radius > 0.0) => {
                Err(CliError::Config(format!("radius {radius} must be positive")))
            }
            _ => Ok(()),
        }
    }
}

pub fn read_graph(path: &Path) -> Result<WeightedGraph, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_graph(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DelaySpec {
    Unit,
    #[default]
    Uniform,
    PerEdgeConstant,
    LaggyEdgeAdversary {
        slow_fraction: f64,
        #[serde(default)]
        fast_delay: Option<f64>,
    },
}

impl DelaySpec {
    pub fn kind(&self) -> DelayKind {
        match *self {
            DelaySpec::Unit => DelayKind::Unit,
            DelaySpec::Uniform => DelayKind::Uniform,
            DelaySpec::PerEdgeConstant => DelayKind::PerEdgeConstant,
            DelaySpec::LaggyEdgeAdversary {
                slow_fraction,
                fast_delay,
            } => DelayKind::LaggyEdge {
                slow_fraction,
                fast_delay: fast_delay.unwrap_or(DEFAULT_FAST_DELAY),
            },
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        if let DelaySpec::LaggyEdgeAdversary {
            slow_fraction,
            fast_delay,
        } = *self
        {
            if !(0.0..=1.0).contains(&slow_fraction) {
                return Err(CliError::Config(format!("slow_fraction {slow_fraction} outside [0, 1]")));
            }
            if fast_delay.is_some_and(|d| !(d > 0.0 && d <= 1.0)) {
                return Err(CliError::Config("fast_delay must lie in (0, 1]".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum WakeupSpec {
    #[default]
    SingleRandom,
    AllAtZero,
    StaggeredUniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub summary: Option<PathBuf>,
}

fn one() -> f64 {
    1.0
}

fn default_beta() -> Option<f64> {
    Some(0.25)
}

fn default_span() -> f64 {
    5.0
}

fn default_delays() -> Vec<DelaySpec> {
    vec![DelaySpec::Uniform]
}

/// Algorithm and environment settings shared by single runs and sweeps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graph: GraphSpec,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default = "one")]
    pub epsilon: f64,
    /// Shift rate of the spanning-tree construction; `null` selects the
    /// polylogarithmic rate.
    #[serde(default = "default_beta")]
    pub beta: Option<f64>,
    #[serde(default)]
    pub delay: DelaySpec,
    #[serde(default)]
    pub wakeup: WakeupSpec,
    /// Wake-up window for `staggered_uniform`.
    #[serde(default = "default_span")]
    pub stagger_span: f64,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub output: OutputSpec,
}

/// Frozen constants for the scaling envelopes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Envelope {
    pub c_m: f64,
    pub c_t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub graph: GraphSpec,
    pub n: Vec<usize>,
    #[serde(default = "default_delays")]
    pub delays: Vec<DelaySpec>,
    #[serde(default = "one")]
    pub epsilon: f64,
    #[serde(default = "default_beta")]
    pub beta: Option<f64>,
    #[serde(default)]
    pub wakeup: WakeupSpec,
    #[serde(default = "default_span")]
    pub stagger_span: f64,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub envelope: Option<Envelope>,
    #[serde(default)]
    pub output: OutputSpec,
}

fn check_common(epsilon: f64, beta: Option<f64>, span: f64, seeds: &[u64]) -> Result<(), CliError> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(CliError::Config(format!("epsilon {epsilon} outside (0, 1]")));
    }
    if let Some(b) = beta {
        if !(b > 0.0 && b < 1.0 / 3.0) {
            return Err(CliError::Config(format!("beta {b} outside (0, 1/3)")));
        }
    }
    if !(span >= 0.0 && span.is_finite()) {
        return Err(CliError::Config(format!("stagger_span {span} must be finite and non-negative")));
    }
    if seeds.is_empty() {
        return Err(CliError::Config("at least one seed is required".into()));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        self.graph.validate()?;
        self.delay.validate()?;
        check_common(self.epsilon, self.beta, self.stagger_span, &self.seeds)?;
        match (&self.graph, self.n) {
            (GraphSpec::File { .. }, _) => Ok(()),
            (_, None) => Err(CliError::Config("generated graphs need `n`".into())),
            (_, Some(0)) => Err(CliError::Config("n must be positive".into())),
            _ => Ok(()),
        }
    }

    pub fn mst_config(&self, seed: u64) -> MstConfig {
        MstConfig {
            epsilon: self.epsilon,
            tree_beta: self.beta,
            delay: self.delay.kind(),
            wakeup: wakeup(self.wakeup, self.stagger_span),
            seed,
            ..MstConfig::default()
        }
    }

    /// Short stable digest of the configuration.
    pub fn hash(&self) -> String {
        digest(self)
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        self.graph.validate()?;
        if matches!(self.graph, GraphSpec::File { .. }) {
            return Err(CliError::Config("sweeps need a generated graph kind".into()));
        }
        for d in &self.delays {
            d.validate()?;
        }
        check_common(self.epsilon, self.beta, self.stagger_span, &self.seeds)?;
        let mut distinct = self.n.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() < 3 || distinct[0] == 0 {
            return Err(CliError::Config("a sweep needs at least three distinct positive n".into()));
        }
        if self.delays.is_empty() {
            return Err(CliError::Config("a sweep needs at least one delay model".into()));
        }
        Ok(())
    }

    /// The single-run configurations, one per (n, delay model).
    pub fn points(&self) -> Vec<ExperimentConfig> {
        let mut out = Vec::new();
        for &n in &self.n {
            for &delay in &self.delays {
                out.push(ExperimentConfig {
                    graph: self.graph.clone(),
                    n: Some(n),
                    epsilon: self.epsilon,
                    beta: self.beta,
                    delay,
                    wakeup: self.wakeup,
                    stagger_span: self.stagger_span,
                    seeds: self.seeds.clone(),
                    output: OutputSpec::default(),
                });
            }
        }
        out
    }
}

pub fn wakeup(spec: WakeupSpec, span: f64) -> Wakeup {
    match spec {
        WakeupSpec::SingleRandom => Wakeup::SingleRandom,
        WakeupSpec::AllAtZero => Wakeup::AllAtZero,
        WakeupSpec::StaggeredUniform => Wakeup::Staggered { span },
    }
}

fn digest<T: Serialize>(x: &T) -> String {
    let text = serde_json::to_string(x).expect("configs serialise");
    hex::encode(&Sha256::digest(text.as_bytes())[..8])
}

/// Reads and validates a JSON configuration; unknown keys are errors.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}
