//! Closed-form policies and output laws on a single prompt.

use crate::algorithms::{bisect_root, check_beta, compute_norm_constant_weighted, phi_weighted, Fallback};
use crate::divergences::expected_reward;
use crate::error::{Error, Result};
use crate::instances::{DiscreteDistribution, ProblemInstance};

/// The relu-shaped regularized policy and its normalizer.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizedSolution {
    pub policy: DiscreteDistribution,
    pub lambda: f64,
    pub beta: f64,
    /// `J_rhat(pi) - (beta/2) (C1[pi] - 1)`.
    pub objective_value: f64,
}

/// `sum pi r_hat - (beta/2) (sum pi^2/pi_ref - 1)`. Mass outside the
/// reference support scores minus infinity.
pub fn chi2_objective(pi_ref: &[f64], r_hat: &[f64], beta: f64, pi: &[f64]) -> f64 {
    let mut reward = 0.0;
    let mut c_one = 0.0;
    for ((&p, &r), &q) in pi.iter().zip(r_hat).zip(pi_ref) {
        if p == 0.0 {
            continue;
        }
        if q <= 0.0 {
            return f64::NEG_INFINITY;
        }
        reward += p * r;
        c_one += p * p / q;
    }
    reward - 0.5 * beta * (c_one - 1.0)
}

/// `pi_ref * relu((r_hat - lambda) / beta)`, unnormalized.
pub fn relu_tilt(pi_ref: &[f64], r_hat: &[f64], beta: f64, lambda: f64) -> Vec<f64> {
    pi_ref
        .iter()
        .zip(r_hat)
        .map(|(&q, &r)| q * ((r - lambda) / beta).max(0.0))
        .collect()
}

pub fn exact_chi2_policy(
    instance: &ProblemInstance,
    prompt: usize,
    beta: f64,
) -> Result<RegularizedSolution> {
    check_beta(beta)?;
    let p = instance.prompt(prompt);
    let pi_ref = p.base_policy();
    let r_hat = p.reward_model();
    let lambda = compute_norm_constant_weighted(r_hat, pi_ref, beta)?;
    if cfg!(debug_assertions) {
        let phi = |l: f64| phi_weighted(r_hat, pi_ref.weights(), beta, l);
        let cap = instance.reward_cap();
        let check = bisect_root(phi, -beta, cap - beta, 1e-12);
        debug_assert!(
            (check - lambda).abs() <= 1e-9 * (1.0 + beta),
            "normalizer scan {lambda} disagrees with bisection {check}"
        );
    }
    let policy = DiscreteDistribution::new(relu_tilt(pi_ref.weights(), r_hat, beta, lambda))?;
    let objective_value = chi2_objective(pi_ref.weights(), r_hat, beta, policy.weights());
    Ok(RegularizedSolution {
        policy,
        lambda,
        beta,
        objective_value,
    })
}

/// `pi_ref * exp(r_hat / beta)`, normalized.
pub fn exact_kl_policy(
    instance: &ProblemInstance,
    prompt: usize,
    beta: f64,
) -> Result<DiscreteDistribution> {
    check_beta(beta)?;
    let p = instance.prompt(prompt);
    let top = p
        .base_policy()
        .weights()
        .iter()
        .zip(p.reward_model())
        .filter(|(&q, _)| q > 0.0)
        .map(|(_, &r)| r)
        .fold(f64::NEG_INFINITY, f64::max);
    let tilted = p
        .base_policy()
        .weights()
        .iter()
        .zip(p.reward_model())
        .map(|(&q, &r)| if q > 0.0 { q * ((r - top) / beta).exp() } else { 0.0 })
        .collect();
    DiscreteDistribution::from_unnormalized(tilted)
}

/// Law of the preferred element among `n` i.i.d. draws from `weights`, under
/// the order (reward ascending, index descending).
pub fn bon_law(weights: &[f64], rewards: &[f64], n: u64) -> Vec<f64> {
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| rewards[a].total_cmp(&rewards[b]).then(b.cmp(&a)));
    let mut law = vec![0.0; weights.len()];
    let total: f64 = weights.iter().sum();
    let n = n as f64;
    // Work from the top of the order with tail masses to keep F^N accurate
    // when F is close to one.
    let mut above = 0.0f64;
    for &y in order.iter().rev() {
        let w = weights[y] / total;
        if w > 0.0 {
            let upper = (n * (-above).clamp(-1.0, 0.0).ln_1p()).exp();
            let lower = (n * (-(above + w)).clamp(-1.0, 0.0).ln_1p()).exp();
            law[y] = (upper - lower).max(0.0);
        }
        above += w;
    }
    law
}

pub fn exact_bon_law(instance: &ProblemInstance, prompt: usize, n: u64) -> Result<DiscreteDistribution> {
    if n == 0 {
        return Err(Error::Precondition("N must be positive".into()));
    }
    let p = instance.prompt(prompt);
    DiscreteDistribution::new(bon_law(p.base_policy().weights(), p.reward_model(), n))
}

/// Output law of a rejection-type sampler with its per-draw statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplerLaw {
    pub law: DiscreteDistribution,
    /// Probability that a single draw is accepted.
    pub accept_probability: f64,
    /// Probability that all `N` draws are rejected.
    pub fallback_probability: f64,
    /// Expected loop position at termination, counting a fallback as `N + 1`.
    pub expected_steps: f64,
    /// Set when the target has no mass on the reference support.
    pub degenerate: bool,
}

fn sampler_law(
    target: &[f64],
    pi_ref: &[f64],
    m: f64,
    n: u64,
    rejected_fallback: impl FnOnce(&[f64]) -> Vec<f64>,
) -> Result<SamplerLaw> {
    if !(m > 0.0) {
        return Err(Error::Precondition(format!("rejection cap must be positive, got {m}")));
    }
    if n == 0 {
        return Err(Error::Precondition("N must be positive".into()));
    }
    if target.len() != pi_ref.len() {
        return Err(Error::DimensionMismatch {
            expected: pi_ref.len(),
            found: target.len(),
        });
    }
    let capped: Vec<f64> = target
        .iter()
        .zip(pi_ref)
        .map(|(&t, &q)| t.min(m * q).max(0.0))
        .collect();
    let mass: f64 = capped.iter().sum();
    if mass <= 0.0 {
        return Ok(SamplerLaw {
            law: DiscreteDistribution::new(pi_ref.to_vec())?,
            accept_probability: 0.0,
            fallback_probability: 1.0,
            expected_steps: n as f64 + 1.0,
            degenerate: true,
        });
    }
    let accept = (mass / m).min(1.0);
    let q = (n as f64 * (-accept).ln_1p()).exp();
    // Law of a single draw given that it was rejected.
    let rejected: Vec<f64> = capped
        .iter()
        .zip(pi_ref)
        .map(|(&c, &r)| (r - c / m).max(0.0))
        .collect();
    let fallback = rejected_fallback(&rejected);
    let law: Vec<f64> = capped
        .iter()
        .zip(&fallback)
        .map(|(&c, &f)| (1.0 - q) * c / mass + q * f)
        .collect();
    Ok(SamplerLaw {
        law: DiscreteDistribution::from_unnormalized(law)?,
        accept_probability: accept,
        fallback_probability: q,
        expected_steps: (1.0 - q) / accept + q,
        degenerate: false,
    })
}

/// Output law of rejection sampling toward `target` with cap `m` and `n`
/// attempts, falling back to a reference draw.
pub fn exact_rejection_law(
    target: &DiscreteDistribution,
    pi_ref: &DiscreteDistribution,
    m: f64,
    n: u64,
) -> Result<SamplerLaw> {
    let r = pi_ref.weights().to_vec();
    sampler_law(target.weights(), pi_ref.weights(), m, n, |_| r)
}

/// Output law of the pessimistic sampler given a fixed normalizer
/// `lambda_hat` and fresh rejection draws.
pub fn exact_itp_law(
    instance: &ProblemInstance,
    prompt: usize,
    beta: f64,
    lambda_hat: f64,
    n: u64,
) -> Result<SamplerLaw> {
    exact_itp_law_with_fallback(instance, prompt, beta, lambda_hat, n, Fallback::ReferenceDraw)
}

/// As [`exact_itp_law`], with a choice of fallback. The best-of-N fallback
/// selects among the `n` rejected draws.
pub fn exact_itp_law_with_fallback(
    instance: &ProblemInstance,
    prompt: usize,
    beta: f64,
    lambda_hat: f64,
    n: u64,
    fallback: Fallback,
) -> Result<SamplerLaw> {
    check_beta(beta)?;
    let cap = instance.reward_cap();
    let slack = 1e-12 * (1.0 + cap + beta);
    if !(lambda_hat >= -beta - slack && lambda_hat <= cap - beta + slack) {
        return Err(Error::Precondition(format!(
            "normalizer {lambda_hat} outside [-beta, r_max - beta]"
        )));
    }
    let p = instance.prompt(prompt);
    let pi_ref = p.base_policy().weights();
    let r_hat = p.reward_model();
    let target = relu_tilt(pi_ref, r_hat, beta, lambda_hat);
    let m = (cap - lambda_hat) / beta;
    match fallback {
        Fallback::ReferenceDraw => sampler_law(&target, pi_ref, m, n, |_| pi_ref.to_vec()),
        Fallback::BestOfN => sampler_law(&target, pi_ref, m, n, |rejected| {
            if rejected.iter().sum::<f64>() > 0.0 {
                bon_law(rejected, r_hat, n)
            } else {
                pi_ref.to_vec()
            }
        }),
    }
}

/// `J(comparator) - J(achieved)` under the true reward.
pub fn regret(
    instance: &ProblemInstance,
    prompt: usize,
    comparator: &DiscreteDistribution,
    achieved: &DiscreteDistribution,
) -> Result<f64> {
    let r = instance.prompt(prompt).true_reward();
    Ok(expected_reward(comparator, r)? - expected_reward(achieved, r)?)
}

/// `(1/4) sqrt(c_star eps^2)`; `asserted` is false below `c_star = 16`, where
/// the bound is not claimed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkylineBound {
    pub value: f64,
    pub asserted: bool,
}

pub fn skyline_bound(c_star: f64, eps_rm: f64) -> SkylineBound {
    SkylineBound {
        value: 0.25 * (c_star * eps_rm * eps_rm).sqrt(),
        asserted: c_star >= 16.0,
    }
}
