use crate::error::LdsError;

/// Parameters of one layered construction attempt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdsParams {
    pub n: usize,
    pub epsilon: f64,
    pub epsilon_prime: f64,
    pub beta: f64,
    pub delta_max: u32,
    pub i_max: u32,
    pub d_guess: u64,
}

pub fn epsilon_prime(epsilon: f64) -> f64 {
    epsilon / (2.0 * 15f64.ln())
}

/// `ln(n)^(-1/eps')`.
pub fn layered_beta(n: usize, epsilon_prime: f64) -> f64 {
    (n as f64).ln().powf(-1.0 / epsilon_prime)
}

/// Width of the start-time window, `floor(2 ln n / beta)`, saturating.
pub fn delta_max(n: usize, beta: f64) -> u32 {
    let w = (2.0 * (n as f64).ln() / beta).floor();
    if w >= u32::MAX as f64 {
        u32::MAX
    } else {
        w.max(0.0) as u32
    }
}

/// Number of decomposition phases, `ceil(log_{1/(3 beta)} d)`; zero for `d <= 1`.
pub fn phase_count(beta: f64, d_guess: u64) -> u32 {
    if d_guess <= 1 {
        return 0;
    }
    let x = (d_guess as f64).ln() / (1.0 / (3.0 * beta)).ln();
    // Exact powers land a hair above the integer in floating point.
    (x - 1e-9).ceil().max(0.0) as u32
}

/// Round budget `scale * ln(n)^(2 + 4/eps')` of the cluster BFS, saturating.
pub fn bfs_round_budget(n: usize, epsilon_prime: f64, scale: f64) -> u32 {
    let b = (scale * (n as f64).ln().powf(2.0 + 4.0 / epsilon_prime)).ceil();
    if !b.is_finite() || b >= u32::MAX as f64 {
        u32::MAX
    } else {
        b.max(1.0) as u32
    }
}

/// Depth guarantee `5 ln(n)^(1 + 1/eps') * d^(1 + eps)` for hop diameter `d`.
pub fn depth_bound(n: usize, epsilon: f64, d: u32) -> f64 {
    let ep = epsilon_prime(epsilon);
    5.0 * (n as f64).ln().powf(1.0 + 1.0 / ep) * (d.max(1) as f64).powf(1.0 + epsilon)
}

/// Whether the layered regime applies (`n >= 3` and `ln ln n >= 2 eps' ln 3`).
pub fn layered_regime(n: usize, epsilon: f64) -> bool {
    n >= 3 && (n as f64).ln().ln() >= 2.0 * epsilon_prime(epsilon) * 3f64.ln()
}

pub fn derive_params(n: usize, epsilon: f64, d_guess: u64) -> Result<LdsParams, LdsError> {
    check_epsilon(epsilon)?;
    let beta = layered_beta(n, epsilon_prime(epsilon));
    derive_params_with_beta(n, epsilon, d_guess, beta)
}

/// Same as [`derive_params`] but with a caller-chosen `beta`, for runs where
/// the formula value makes the start-time window impractically wide.
pub fn derive_params_with_beta(
    n: usize,
    epsilon: f64,
    d_guess: u64,
    beta: f64,
) -> Result<LdsParams, LdsError> {
    check_epsilon(epsilon)?;
    if !layered_regime(n, epsilon) {
        return Err(LdsError::UseTrivial { n });
    }
    if !(beta > 0.0 && 3.0 * beta < 1.0) {
        return Err(LdsError::BadBeta(beta));
    }
    Ok(LdsParams {
        n,
        epsilon,
        epsilon_prime: epsilon_prime(epsilon),
        beta,
        delta_max: delta_max(n, beta),
        i_max: phase_count(beta, d_guess),
        d_guess,
    })
}

fn check_epsilon(epsilon: f64) -> Result<(), LdsError> {
    if epsilon > 0.0 && epsilon <= 1.0 {
        Ok(())
    } else {
        Err(LdsError::BadEpsilon(epsilon))
    }
}
