//! Building blocks for protocols on fragment trees: broadcast with
//! acknowledgement, pipelined up- and downcast, minimum outgoing edge search,
//! counting, tree diameter, leader election, and alpha/beta synchronizers.
//!
//! Every operation runs as one kernel session over a [`Forest`] and returns
//! only after each participating node has terminated, so callers can chain
//! operations stage by stage.

mod cast;
mod error;
mod forest;
mod leader;
mod moe;
mod payload;
mod sync;
mod wave;

pub use cast::{downcast, upcast, upcast_until, CastMsg, DowncastOutcome, Gather, Routes, UpcastOutcome};
pub use error::ToolboxError;
pub use forest::{Forest, FragmentView};
pub use leader::{leader_elect, ElectMsg, Election, ElectionKind, FloodingElection, LeaderElection};
pub use moe::{find_moe, MoeMsg, MoeOutcome, MoeTuple};
pub use payload::{Count, Signal, Span};
pub use sync::{alpha_simulate, beta_counter, beta_pulse, lockstep, AlphaMsg, SyncAlgorithm};
pub use wave::{diam_calc, frag_bcast, frag_bcast_all, tree_count, wave_echo, WaveMsg, WaveOutcome};
