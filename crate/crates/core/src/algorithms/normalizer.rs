//! Sort-and-scan solvers for the relu normalization equation
//! `sum_y w(y) relu((r(y) - lambda) / beta) = 1`.

use crate::error::{Error, Result};
use crate::instances::DiscreteDistribution;

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveBeta(beta))
    }
}

/// Root of `(1/N) sum_i relu((r_i - lambda) / beta) = 1` for an empirical
/// sample of rewards.
pub fn compute_norm_constant_empirical(rewards: &[f64], beta: f64) -> Result<f64> {
    check_beta(beta)?;
    if rewards.is_empty() {
        return Err(Error::Precondition("empty reward sample".into()));
    }
    let mut sorted = rewards.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let n = sorted.len() as f64;
    let top = sorted[0];
    // Running sums over the bins scanned so far, measured from the top reward.
    let mut excess = 0.0;
    let mut count = 0usize;
    let mut i = 0;
    while i < sorted.len() {
        let value = sorted[i];
        while i < sorted.len() && sorted[i] == value {
            excess += sorted[i] - top;
            count += 1;
            i += 1;
        }
        let lambda = top + (excess - beta * n) / count as f64;
        if i == sorted.len() || lambda >= sorted[i] {
            return Ok(lambda);
        }
    }
    unreachable!("scan always terminates at the lowest bin")
}

/// Root of `sum_y w(y) relu((r(y) - lambda) / beta) = 1`.
pub fn compute_norm_constant_weighted(
    rewards: &[f64],
    weights: &DiscreteDistribution,
    beta: f64,
) -> Result<f64> {
    check_beta(beta)?;
    if rewards.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            found: rewards.len(),
        });
    }
    let w = weights.weights();
    let mut order: Vec<usize> = (0..rewards.len()).filter(|&i| w[i] > 0.0).collect();
    if order.is_empty() {
        return Err(Error::ZeroMassRow { row: 0 });
    }
    order.sort_unstable_by(|&a, &b| rewards[b].total_cmp(&rewards[a]));
    let top = rewards[order[0]];
    let mut excess = 0.0;
    let mut mass = 0.0;
    let mut i = 0;
    while i < order.len() {
        let value = rewards[order[i]];
        while i < order.len() && rewards[order[i]] == value {
            excess += w[order[i]] * (rewards[order[i]] - top);
            mass += w[order[i]];
            i += 1;
        }
        let lambda = top + (excess - beta) / mass;
        if i == order.len() || lambda >= rewards[order[i]] {
            return Ok(lambda);
        }
    }
    unreachable!("scan always terminates at the lowest bin")
}

/// `(1/N) sum_i relu((r_i - lambda) / beta)`.
pub fn phi_empirical(rewards: &[f64], beta: f64, lambda: f64) -> f64 {
    rewards.iter().map(|&r| ((r - lambda) / beta).max(0.0)).sum::<f64>() / rewards.len() as f64
}

/// `sum_y w(y) relu((r(y) - lambda) / beta)`.
pub fn phi_weighted(rewards: &[f64], weights: &[f64], beta: f64, lambda: f64) -> f64 {
    rewards
        .iter()
        .zip(weights)
        .map(|(&r, &w)| w * ((r - lambda) / beta).max(0.0))
        .sum()
}

/// Bisection for the root of a decreasing `phi - 1` on `[lo, hi]`. Used as an
/// independent check on the scan.
pub(crate) fn bisect_root(phi: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if phi(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
