use std::collections::BTreeMap;

use crate::error::IntegrityError;
use crate::time::SimTime;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StageStats {
    pub messages: u64,
    pub start: Option<SimTime>,
    pub end: Option<SimTime>,
}

impl StageStats {
    pub fn span(&self) -> SimTime {
        match (self.start, self.end) {
            (Some(s), Some(e)) => e - s,
            _ => SimTime::ZERO,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub n: usize,
    /// Delivered envelopes.
    pub message_count: u64,
    pub sent: u64,
    pub first_wake: SimTime,
    /// Last termination minus first wake-up.
    pub completion_time: SimTime,
    pub per_stage: BTreeMap<u16, StageStats>,
    /// Protocol result as edge indices.
    pub output: Vec<usize>,
    pub terminated: bool,
    pub queued_at_end: usize,
    pub trace: Option<Vec<String>>,
}

/// Cross-checks the counters of a finished run.
pub fn account(r: &RunReport) -> Result<(), IntegrityError> {
    let per_stage: u64 = r.per_stage.values().map(|s| s.messages).sum();
    if per_stage != r.message_count {
        return Err(IntegrityError::StageSum {
            total: r.message_count,
            per_stage,
        });
    }
    if r.terminated && r.queued_at_end != 0 {
        return Err(IntegrityError::QueueNotEmpty(r.queued_at_end));
    }
    if r.terminated && r.sent != r.message_count {
        return Err(IntegrityError::SentDelivered {
            sent: r.sent,
            delivered: r.message_count,
        });
    }
    let finish = r.first_wake + r.completion_time;
    for (&stage, s) in &r.per_stage {
        if let Some(end) = s.end {
            if end > finish {
                return Err(IntegrityError::StageOutsideRun {
                    stage,
                    end,
                    completion: r.completion_time,
                });
            }
        }
    }
    Ok(())
}
