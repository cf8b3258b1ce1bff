//! Deterministic discrete-event engine for asynchronous message passing: FIFO
//! links, per-message delays in `(0, 1]`, adversarial wake-up, and exact
//! message/time accounting.
//!
//! A run is a sequence of *sessions* on one [`Network`]. Each session executes a
//! [`Protocol`] until its queue drains; nodes enter a session no earlier than
//! they left the previous one, and early messages are buffered until entry.

mod delay;
mod engine;
mod error;
mod report;
mod time;
mod wakeup;

pub use delay::{DelayKind, DelayModel, DEFAULT_FAST_DELAY};
pub use engine::{
    mix, run, word_bits, Ctx, Entry, Network, Payload, Protocol, SessionReport, HEADER_BITS,
    PAYLOAD_WORDS,
};
pub use error::{IntegrityError, SimError};
pub use report::{account, RunReport, StageStats};
pub use time::SimTime;
pub use wakeup::WakeupSchedule;
