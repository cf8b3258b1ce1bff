//! Low-depth rooted spanning tree: repeated decomposition and merging of
//! cluster trees, then a BFS over the final clusters from the root's cluster,
//! inside a loop that doubles the diameter guess until the BFS covers the graph.

use std::collections::BTreeMap;

use graph_core::{tree_diameter, ClusterId, NodeId, Partition, WeightedGraph};
use sim_kernel::{mix, DelayKind, DelayModel, Network, Payload, HEADER_BITS};
use toolbox::{frag_bcast, wave_echo, Count, Forest, Signal};

use crate::cluster_ops::{cluster_flood, cluster_merge, MergeRole};
use crate::error::LdsError;
use crate::level::{bfs_cluster_stage, transform_sync, LevelState, Merged, SuperTrees};
use crate::mpx::{mpx_sync_topology, start_rounds};
use crate::params::{bfs_round_budget, derive_params, derive_params_with_beta, LdsParams};
use crate::rounds::{announce, flood_echo, learn_level};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StConsMode {
    /// Lock-step execution of every stage, no message passing.
    DirectSync,
    /// Every stage as sessions on the asynchronous network.
    AsyncSimulated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StConsConfig {
    pub epsilon: f64,
    /// Replaces `ln(n)^(-1/eps')`; must lie in `(0, 1/3)`.
    pub beta: Option<f64>,
    pub initial_guess: u64,
    /// BFS layers allowed over the final clusters; defaults to the
    /// polylogarithmic budget (saturating).
    pub bfs_budget: Option<u32>,
    pub budget_scale: f64,
    pub max_attempts: u32,
    pub seed: u64,
}

impl Default for StConsConfig {
    fn default() -> Self {
        Self {
            epsilon: 1.0,
            beta: None,
            initial_guess: 2,
            bfs_budget: None,
            budget_scale: 1.0,
            max_attempts: 40,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Attempt {
    pub guess: u64,
    pub phases: u32,
    pub clusters: usize,
    pub bfs_layers: Option<u32>,
    pub covered: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StConsOutcome {
    pub root: NodeId,
    pub parent: Vec<Option<NodeId>>,
    pub depth: u32,
    pub diameter: u32,
    /// Built by plain flooding because `n` is below the layered regime.
    pub trivial: bool,
    pub params: Option<LdsParams>,
    pub attempts: Vec<Attempt>,
    /// Partitions of the successful attempt, level 0 first.
    pub levels: Vec<Partition>,
}

impl StConsOutcome {
    fn new(g: &WeightedGraph, root: NodeId, parent: Vec<Option<NodeId>>) -> Self {
        let mut adj = vec![Vec::new(); g.n()];
        for (v, p) in parent.iter().enumerate() {
            if let Some(p) = p {
                adj[v].push(*p as usize);
                adj[*p as usize].push(v);
            }
        }
        let depth = (0..g.n())
            .map(|v| {
                let mut x = v;
                let mut d = 0;
                while let Some(p) = parent[x] {
                    x = p as usize;
                    d += 1;
                }
                d
            })
            .max()
            .unwrap_or(0);
        Self {
            root,
            depth,
            diameter: tree_diameter(&adj, root as usize),
            parent,
            trivial: false,
            params: None,
            attempts: Vec::new(),
            levels: Vec::new(),
        }
    }

    /// The tree as a one-cluster partition named by the root.
    pub fn partition(&self, g: &WeightedGraph) -> Result<Partition, LdsError> {
        Ok(Partition::new(g, vec![self.root; g.n()], self.parent.clone())?)
    }
}

pub fn phase_seed(seed: u64, guess: u64, phase: u32) -> u64 {
    mix(seed ^ mix(guess ^ ((phase as u64) << 48)))
}

/// One way of executing the stages.
trait Stages {
    fn graph(&self) -> &WeightedGraph;
    fn phase(&mut self, level: &LevelState, p: &LdsParams, seed: u64) -> Result<LevelState, LdsError>;
    /// BFS over the clusters from the root's cluster and the merged tree.
    fn bfs(&mut self, level: &LevelState, root: NodeId, budget: u32) -> Result<(Merged, Option<u32>), LdsError>;
    fn covered(&mut self, merged: &Merged, root: NodeId) -> Result<bool, LdsError>;
    fn flooding_tree(&mut self, root: NodeId) -> Result<Vec<Option<NodeId>>, LdsError>;
}

struct Direct<'g> {
    g: &'g WeightedGraph,
}

impl Stages for Direct<'_> {
    fn graph(&self) -> &WeightedGraph {
        self.g
    }

    fn phase(&mut self, level: &LevelState, p: &LdsParams, seed: u64) -> Result<LevelState, LdsError> {
        let t = level.topology(self.g);
        let out = mpx_sync_topology(&t, p.beta, p.delta_max, seed);
        let trees = SuperTrees {
            center: out.center.into_iter().map(Some).collect(),
            parent: out.parent,
        };
        let merged = transform_sync(self.g, level, &t, &trees, |c| c)?;
        Ok(LevelState {
            level: level.level + 1,
            partition: merged.into_partition(self.g)?,
        })
    }

    fn bfs(&mut self, level: &LevelState, root: NodeId, budget: u32) -> Result<(Merged, Option<u32>), LdsError> {
        let bfs = bfs_cluster_stage(self.g, level, level.partition.cluster_of(root), budget)?;
        let layers = bfs.layer.iter().flatten().max().copied();
        let merged = transform_sync(self.g, level, &bfs.topology, &bfs.trees, |_| root)?;
        Ok((merged, layers))
    }

    fn covered(&mut self, merged: &Merged, _: NodeId) -> Result<bool, LdsError> {
        Ok(merged.covers_all())
    }

    fn flooding_tree(&mut self, root: NodeId) -> Result<Vec<Option<NodeId>>, LdsError> {
        let dist = self.g.bfs(root);
        Ok(self
            .g
            .nodes()
            .map(|v| {
                (v != root).then(|| {
                    self.g
                        .neighbors(v)
                        .find(|&u| dist[u as usize] + 1 == dist[v as usize])
                        .expect("connected graph")
                })
            })
            .collect())
    }
}

struct Simulated<'n, 'g> {
    net: &'n mut Network<'g>,
    stage: u16,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Covered(bool);

impl Payload for Covered {
    fn bits(&self, _: u32) -> u32 {
        HEADER_BITS + 1
    }
}

impl Stages for Simulated<'_, '_> {
    fn graph(&self) -> &WeightedGraph {
        self.net.graph()
    }

    fn phase(&mut self, level: &LevelState, p: &LdsParams, seed: u64) -> Result<LevelState, LdsError> {
        let g = self.net.graph();
        let local = learn_level(self.net, self.stage, &level.partition)?;
        let ids: Vec<ClusterId> = level.partition.clusters().into_keys().collect();
        let (starts, _) = start_rounds(&ids, p.beta, p.delta_max, seed);
        let start: BTreeMap<ClusterId, u32> = ids.into_iter().zip(starts).collect();
        let (joined, _) = cluster_flood(self.net, self.stage, &local, &start, p.delta_max.saturating_add(1))?;
        let roles = joined
            .iter()
            .map(|(&c, j)| {
                (
                    c,
                    MergeRole {
                        in_tree: true,
                        super_parent: j.parent,
                    },
                )
            })
            .collect();
        let preferred: Vec<bool> = g.nodes().map(|v| local.is_root(v)).collect();
        let cap = p.delta_max.saturating_add(3);
        let (merged, _) = cluster_merge(self.net, self.stage, &local, &roles, &preferred, cap)?;
        Ok(LevelState {
            level: level.level + 1,
            partition: merged.into_partition(g)?,
        })
    }

    fn bfs(&mut self, level: &LevelState, root: NodeId, budget: u32) -> Result<(Merged, Option<u32>), LdsError> {
        let g = self.net.graph();
        let local = learn_level(self.net, self.stage, &level.partition)?;
        let start = BTreeMap::from([(level.partition.cluster_of(root), 1)]);
        let (joined, _) = cluster_flood(self.net, self.stage, &local, &start, budget.saturating_add(1))?;
        let layers = joined.values().filter_map(|j| j.round).max().map(|r| r - 1);
        let roles = joined
            .iter()
            .map(|(&c, j)| {
                (
                    c,
                    MergeRole {
                        in_tree: j.center.is_some(),
                        super_parent: j.parent,
                    },
                )
            })
            .collect();
        let preferred: Vec<bool> = g.nodes().map(|v| v == root).collect();
        let cap = budget.saturating_add(3);
        let (merged, _) = cluster_merge(self.net, self.stage, &local, &roles, &preferred, cap)?;
        Ok((merged, layers))
    }

    fn covered(&mut self, merged: &Merged, root: NodeId) -> Result<bool, LdsError> {
        let g = self.net.graph();
        let flags = g.nodes().map(|v| Covered(merged.cluster[v as usize].is_some())).collect();
        let heard = announce(self.net, self.stage, flags)?;
        let uncovered_peers: Vec<u64> = g
            .nodes()
            .map(|v| heard[v as usize].iter().filter(|c| !c.0).count() as u64)
            .collect();
        let clusters: Vec<ClusterId> = g
            .nodes()
            .map(|v| merged.cluster[v as usize].unwrap_or(v))
            .collect();
        let forest = Forest::from_parents(g, &merged.parent, &clusters)?;
        let out = wave_echo(
            self.net,
            self.stage,
            &forest,
            &BTreeMap::from([(root, Signal)]),
            |v, _, kids: Vec<Count>| Count(uncovered_peers[v as usize] + kids.iter().map(|k| k.0).sum::<u64>()),
        )?;
        let ok = out.at_root.get(&root).is_some_and(|c| c.0 == 0);
        if ok {
            frag_bcast(self.net, self.stage, &forest, &BTreeMap::from([(root, Signal)]))?;
        } else {
            flood_echo(self.net, self.stage, root)?;
        }
        Ok(ok)
    }

    fn flooding_tree(&mut self, root: NodeId) -> Result<Vec<Option<NodeId>>, LdsError> {
        Ok(flood_echo(self.net, self.stage, root)?)
    }
}

fn construct(exec: &mut dyn Stages, root: NodeId, cfg: &StConsConfig) -> Result<StConsOutcome, LdsError> {
    let n = exec.graph().n();
    if root as usize >= n {
        return Err(LdsError::BadRoot { root, n });
    }
    exec.graph().ensure_connected()?;
    let mut guess = cfg.initial_guess.max(1);
    let mut attempts = Vec::new();
    for _ in 0..cfg.max_attempts.max(1) {
        let params = match cfg.beta {
            Some(b) => derive_params_with_beta(n, cfg.epsilon, guess, b),
            None => derive_params(n, cfg.epsilon, guess),
        };
        let p = match params {
            Ok(p) => p,
            Err(LdsError::UseTrivial { .. }) => {
                let parent = exec.flooding_tree(root)?;
                let mut out = StConsOutcome::new(exec.graph(), root, parent);
                out.trivial = true;
                return Ok(out);
            }
            Err(e) => return Err(e),
        };
        let mut level = LevelState::initial(n);
        let mut levels = vec![level.partition.clone()];
        for phase in 1..=p.i_max {
            level = exec.phase(&level, &p, phase_seed(cfg.seed, guess, phase))?;
            levels.push(level.partition.clone());
        }
        let budget = cfg
            .bfs_budget
            .unwrap_or_else(|| bfs_round_budget(n, p.epsilon_prime, cfg.budget_scale));
        let (merged, layers) = exec.bfs(&level, root, budget)?;
        let covered = exec.covered(&merged, root)?;
        attempts.push(Attempt {
            guess,
            phases: p.i_max,
            clusters: level.partition.clusters().len(),
            bfs_layers: layers,
            covered,
        });
        if covered {
            let mut out = StConsOutcome::new(exec.graph(), root, merged.parent);
            out.params = Some(p);
            out.attempts = attempts;
            out.levels = levels;
            return Ok(out);
        }
        guess = guess.saturating_mul(2);
    }
    Err(LdsError::GuessExhausted {
        attempts: attempts.len() as u32,
    })
}

/// Lock-step construction.
pub fn st_cons_sync(g: &WeightedGraph, root: NodeId, cfg: &StConsConfig) -> Result<StConsOutcome, LdsError> {
    construct(&mut Direct { g }, root, cfg)
}

/// Construction as sessions on `net`; every node takes part from its exit
/// time of the previous session.
pub fn st_cons_async(
    net: &mut Network<'_>,
    stage: u16,
    root: NodeId,
    cfg: &StConsConfig,
) -> Result<StConsOutcome, LdsError> {
    construct(&mut Simulated { net, stage }, root, cfg)
}

/// Event budget for the stand-alone asynchronous mode.
pub const STANDALONE_EVENT_BUDGET: u64 = 2_000_000_000;

pub fn st_cons(
    g: &WeightedGraph,
    root: NodeId,
    cfg: &StConsConfig,
    mode: StConsMode,
) -> Result<StConsOutcome, LdsError> {
    match mode {
        StConsMode::DirectSync => st_cons_sync(g, root, cfg),
        StConsMode::AsyncSimulated => {
            let delays = DelayModel::new(DelayKind::Uniform, cfg.seed, g.m());
            let mut net = Network::new(g, delays, cfg.seed, STANDALONE_EVENT_BUDGET);
            st_cons_async(&mut net, 1, root, cfg)
        }
    }
}
