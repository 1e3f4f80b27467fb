//! Exact distributional quantities on finite response sets.

use crate::error::{Error, Result};
use crate::instances::{DiscreteDistribution, ProblemInstance};

fn same_len(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: a,
            found: b,
        })
    }
}

/// `sum pi(y) r(y)`.
pub fn expected_reward(policy: &DiscreteDistribution, reward: &[f64]) -> Result<f64> {
    same_len(policy.len(), reward.len())?;
    Ok(policy.weights().iter().zip(reward).map(|(p, r)| p * r).sum())
}

/// Squared reward-model error under the base policy of one prompt.
pub fn reward_error(instance: &ProblemInstance, prompt: usize) -> f64 {
    let p = instance.prompt(prompt);
    p.base_policy()
        .weights()
        .iter()
        .zip(p.reward_model().iter().zip(p.true_reward()))
        .map(|(w, (a, b))| w * (a - b) * (a - b))
        .sum()
}

/// Iterates `(pi, pi_ref)` pairs, failing on mass outside the reference
/// support.
fn covered_pairs<'a>(
    pi: &'a DiscreteDistribution,
    pi_ref: &'a DiscreteDistribution,
) -> Result<impl Iterator<Item = (f64, f64)> + 'a> {
    same_len(pi_ref.len(), pi.len())?;
    if let Some(index) = pi
        .weights()
        .iter()
        .zip(pi_ref.weights())
        .position(|(&p, &r)| p > 0.0 && r <= 0.0)
    {
        return Err(Error::UncoveredSupport { index });
    }
    Ok(pi
        .weights()
        .iter()
        .zip(pi_ref.weights())
        .filter(|(&p, _)| p > 0.0)
        .map(|(&p, &r)| (p, r)))
}

/// `sum pi^2 / pi_ref`.
pub fn coverage_l1(pi: &DiscreteDistribution, pi_ref: &DiscreteDistribution) -> Result<f64> {
    Ok(covered_pairs(pi, pi_ref)?.map(|(p, r)| p * p / r).sum())
}

/// `max pi / pi_ref`.
pub fn coverage_inf(pi: &DiscreteDistribution, pi_ref: &DiscreteDistribution) -> Result<f64> {
    Ok(covered_pairs(pi, pi_ref)?.map(|(p, r)| p / r).fold(0.0, f64::max))
}

/// `(1/alpha) sum pi (pi/pi_ref)^(alpha-1)`.
pub fn coverage_alpha(
    pi: &DiscreteDistribution,
    pi_ref: &DiscreteDistribution,
    alpha: f64,
) -> Result<f64> {
    if !(alpha > 1.0) {
        return Err(Error::Precondition(format!("alpha must exceed 1, got {alpha}")));
    }
    let s: f64 = covered_pairs(pi, pi_ref)?
        .map(|(p, r)| p * (p / r).powf(alpha - 1.0))
        .sum();
    Ok(s / alpha)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub c_one: f64,
    pub c_inf: f64,
    /// `(alpha, C_alpha)` in the order requested.
    pub c_alpha: Vec<(f64, f64)>,
}

pub fn coverage_report(
    pi: &DiscreteDistribution,
    pi_ref: &DiscreteDistribution,
    alphas: &[f64],
) -> Result<CoverageReport> {
    Ok(CoverageReport {
        c_one: coverage_l1(pi, pi_ref)?,
        c_inf: coverage_inf(pi, pi_ref)?,
        c_alpha: alphas
            .iter()
            .map(|&a| coverage_alpha(pi, pi_ref, a).map(|c| (a, c)))
            .collect::<Result<_>>()?,
    })
}

/// Total variation distance.
pub fn tv_distance(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    same_len(p.len(), q.len())?;
    let s: f64 = p
        .weights()
        .iter()
        .zip(q.weights())
        .map(|(a, b)| (a - b).abs())
        .sum();
    Ok(0.5 * s)
}

/// Target mass above the ratio cap `m`. Indices with zero reference mass
/// contribute their full target mass.
///
/// Panics if the two distributions differ in length.
pub fn e_m_divergence(pi: &DiscreteDistribution, pi_ref: &DiscreteDistribution, m: f64) -> f64 {
    assert_eq!(pi.len(), pi_ref.len(), "dimension mismatch");
    pi.weights()
        .iter()
        .zip(pi_ref.weights())
        .map(|(&p, &r)| if r > 0.0 { (p - m * r).max(0.0) } else { p })
        .sum()
}

/// Smallest `m >= 1` with `e_m_divergence(pi, pi_ref, m) <= eps`, or
/// infinity when uncovered mass alone exceeds `eps`.
///
/// Panics if the two distributions differ in length.
pub fn m_star(pi: &DiscreteDistribution, pi_ref: &DiscreteDistribution, eps: f64) -> f64 {
    assert_eq!(pi.len(), pi_ref.len(), "dimension mismatch");
    let mut uncovered = 0.0;
    let mut ratios: Vec<(f64, f64, f64)> = Vec::with_capacity(pi.len());
    for (&p, &r) in pi.weights().iter().zip(pi_ref.weights()) {
        if r > 0.0 {
            ratios.push((p / r, p, r));
        } else {
            uncovered += p;
        }
    }
    if uncovered > eps {
        return f64::INFINITY;
    }
    ratios.sort_by(|a, b| b.0.total_cmp(&a.0));
    if ratios.first().is_none_or(|t| t.0 <= 1.0) {
        return 1.0;
    }
    // On [t_{k+1}, t_k] the divergence is uncovered + P_k - m Q_k.
    let (mut top_pi, mut top_ref) = (0.0, 0.0);
    for k in 0..ratios.len() {
        top_pi += ratios[k].1;
        top_ref += ratios[k].2;
        let lower = ratios.get(k + 1).map_or(1.0, |t| t.0.max(1.0));
        let at_lower = uncovered + top_pi - lower * top_ref;
        if at_lower > eps {
            return ((uncovered + top_pi - eps) / top_ref).max(1.0);
        }
        if lower <= 1.0 {
            break;
        }
    }
    1.0
}
