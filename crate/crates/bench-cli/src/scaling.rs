use serde::Serialize;

use crate::config::Envelope;
use crate::metrics::MetricsRow;

/// Slope and intercept of the least-squares line through `(x, y)`.
pub fn fit_line(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let k = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

fn ln3(n: usize) -> f64 {
    (n as f64).ln().max(1.0).powi(3)
}

/// Observed message constant: `messages / (m ln³ n)`.
pub fn message_constant(r: &MetricsRow) -> f64 {
    r.messages_total as f64 / (r.m.max(1) as f64 * ln3(r.n))
}

/// Observed time constant: `time / ((D' + √n) ln³ n)`.
pub fn time_constant(r: &MetricsRow) -> f64 {
    r.time_total / ((r.d_prime as f64 + (r.n as f64).sqrt()) * ln3(r.n))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingSummary {
    pub rows: usize,
    pub distinct_n: usize,
    pub all_mst_ok: bool,
    /// Slope of `ln(messages/m)` against `ln ln n`.
    pub messages_per_m_loglog_exponent: Option<f64>,
    /// Slope of `ln(messages / (m ln³ n))` against `ln n`: growth left over
    /// once the polylogarithmic budget is divided out.
    pub messages_per_m_power_of_n: Option<f64>,
    /// Slope of `ln time` against `ln(D' + √n)`.
    pub time_exponent: Option<f64>,
    pub max_message_constant: f64,
    pub max_time_constant: f64,
    pub envelope: Option<Envelope>,
    pub within_envelope: Option<bool>,
    pub pass: bool,
}

/// Largest power of `n` tolerated in `messages/m` after removing polylog factors.
pub const MAX_POWER_OF_N: f64 = 0.15;

pub fn summarize(rows: &[MetricsRow], envelope: Option<Envelope>) -> ScalingSummary {
    let mut ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    let usable: Vec<&MetricsRow> = rows.iter().filter(|r| r.n >= 3 && r.m > 0).collect();
    let per_m = |r: &MetricsRow| r.messages_total.max(1) as f64 / r.m as f64;
    let loglog: Vec<(f64, f64)> = usable
        .iter()
        .map(|r| ((r.n as f64).ln().ln(), per_m(r).ln()))
        .collect();
    let power: Vec<(f64, f64)> = usable
        .iter()
        .map(|r| ((r.n as f64).ln(), message_constant(r).max(f64::MIN_POSITIVE).ln()))
        .collect();
    let time: Vec<(f64, f64)> = usable
        .iter()
        .filter(|r| r.time_total > 0.0)
        .map(|r| ((r.d_prime as f64 + (r.n as f64).sqrt()).ln(), r.time_total.ln()))
        .collect();
    let max_m = rows.iter().map(message_constant).fold(0.0, f64::max);
    let max_t = rows.iter().map(time_constant).fold(0.0, f64::max);
    let all_ok = !rows.is_empty() && rows.iter().all(|r| r.mst_ok);
    let power_of_n = fit_line(&power).map(|f| f.0);
    let within = envelope.map(|e| max_m <= e.c_m && max_t <= e.c_t);
    let pass = all_ok && power_of_n.is_some_and(|p| p <= MAX_POWER_OF_N) && within.unwrap_or(true);
    ScalingSummary {
        rows: rows.len(),
        distinct_n: ns.len(),
        all_mst_ok: all_ok,
        messages_per_m_loglog_exponent: fit_line(&loglog).map(|f| f.0),
        messages_per_m_power_of_n: power_of_n,
        time_exponent: fit_line(&time).map(|f| f.0),
        max_message_constant: max_m,
        max_time_constant: max_t,
        envelope,
        within_envelope: within,
        pass,
    }
}
