//! Asynchronous minimum spanning tree construction in three stages: a
//! low-depth spanning tree rooted at an elected leader, fragment growth with
//! bounded diameter synchronised over that tree, and leader-directed merging
//! of the remaining fragments into clusters.

mod census;
mod error;
mod exchange;
mod ghs;
mod payload;
mod run;
mod stage1;
mod stage3;

pub use census::{census, Census};
pub use error::MstError;
pub use exchange::{exchange, Inbox};
pub use ghs::{
    ceil_log2, coloring_rounds, controlled_ghs, cv_step, fragment_diameters, ghs_phase_count, log_star, GhsOutcome,
    PhaseSnapshot, MATCHING_ROUNDS, SPREAD_ROUNDS, STAGE_TWO,
};
pub use payload::{Best, Candidate, Flag, Link, MatchNote, MoeValue, Offer, Tally, Verdict};
pub use run::{run_sing_mst, MstConfig, MstRun, NodeMstOutput, Wakeup};
pub use stage1::{stage1, Preprocessed, STAGE_ONE};
pub use stage3::{leader_merge, stage3, SoftMerge, STAGE_THREE};
