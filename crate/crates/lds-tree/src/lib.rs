//! Low-diameter decompositions by exponentially shifted flooding, and the
//! layered construction of a low-depth rooted spanning tree on top of them.

mod cluster_ops;
mod error;
mod level;
mod mpx;
mod params;
mod rounds;
mod st_cons;
mod stats;

pub use cluster_ops::{cluster_flood, cluster_merge, Joined, MergeRole};
pub use error::LdsError;
pub use level::{attach_edge, bfs_cluster_stage, ClusterBfs, reroot, transform_sync, LevelState, Merged, SuperTrees};
pub use mpx::{
    flood_sync, graph_adjacency, initial_states, mpx_alpha, mpx_sync, mpx_sync_topology, mpx_trace,
    mpx_with_starts, outcome_partition, sample_exponential, shift_for, start_round, start_rounds,
    states_partition, ClusterName, Flood, MpxNodeState, MpxOutcome, MpxRounds, MpxTrace,
};
pub use params::{
    bfs_round_budget, delta_max, depth_bound, derive_params, derive_params_with_beta, epsilon_prime,
    layered_beta, layered_regime, phase_count, LdsParams,
};
pub use rounds::{announce, flood_echo, learn_level, run_rounds, ClusterRounds, Local, NameTag, RoundMsg};
pub use st_cons::{
    phase_seed, st_cons, st_cons_async, st_cons_sync, Attempt, StConsConfig, StConsMode, StConsOutcome,
    STANDALONE_EVENT_BUDGET,
};
pub use stats::{mpx_stats, mpx_trials, MpxStats, MpxTrial, Summary, MIN_TRIALS};
