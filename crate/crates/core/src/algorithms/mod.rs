//! Query-based selection algorithms driven by an [`OracleSession`].

mod normalizer;

pub use normalizer::{
    compute_norm_constant_empirical, compute_norm_constant_weighted, phi_empirical, phi_weighted,
};
pub(crate) use normalizer::{bisect_root, check_beta};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::oracle::{Draw, OracleSession};

/// Result of one algorithm run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignmentOutcome {
    pub chosen_response: usize,
    /// Queries issued by this run.
    pub queries_used: u64,
    /// One-based position of the accepted draw in the rejection loop.
    pub accepted_at: Option<u64>,
    pub fallback_used: bool,
    pub lambda_hat: Option<f64>,
}

impl AlignmentOutcome {
    /// Number of rejection steps taken, counting a fallback as `n + 1`.
    pub fn acceptance_step(&self, n: u64) -> f64 {
        self.accepted_at.unwrap_or(n + 1) as f64
    }
}

/// Position of the preferred draw: highest modeled reward, ties broken toward
/// the lowest response index.
pub(crate) fn preferred(draws: &[Draw]) -> usize {
    let mut best = 0;
    for (i, d) in draws.iter().enumerate().skip(1) {
        let b = &draws[best];
        if d.modeled_reward > b.modeled_reward
            || (d.modeled_reward == b.modeled_reward && d.response_index < b.response_index)
        {
            best = i;
        }
    }
    best
}

/// Draws `n` responses and keeps the one with the highest modeled reward.
pub fn best_of_n(session: &mut OracleSession<'_>, n: usize) -> AlignmentOutcome {
    assert!(n >= 1, "best_of_n needs at least one draw");
    let draws = session.draw_batch(n);
    AlignmentOutcome {
        chosen_response: draws[preferred(&draws)].response_index,
        queries_used: n as u64,
        accepted_at: None,
        fallback_used: false,
        lambda_hat: None,
    }
}

/// Runs the accept/reject loop over `draws`, returning the accepted draw and
/// its one-based position.
fn accept_among(
    session: &mut OracleSession<'_>,
    draws: impl IntoIterator<Item = Draw>,
    weight: impl Fn(&Draw) -> f64,
    m: f64,
) -> Option<(Draw, u64)> {
    for (i, d) in draws.into_iter().enumerate() {
        let p = (weight(&d) / m).min(1.0);
        if session.coin() < p {
            return Some((d, i as u64 + 1));
        }
    }
    None
}

/// Rejection sampling with cap `m` over `n` fresh draws; falls back to an
/// extra draw when nothing is accepted.
pub fn rejection_sampling(
    session: &mut OracleSession<'_>,
    weight: impl Fn(usize) -> f64,
    m: f64,
    n: usize,
) -> AlignmentOutcome {
    assert!(m > 0.0, "rejection cap must be positive");
    assert!(n >= 1, "rejection sampling needs at least one draw");
    let start = session.queries_used();
    let mut accepted = None;
    for i in 0..n {
        let d = session.draw();
        if session.coin() < (weight(d.response_index) / m).min(1.0) {
            accepted = Some((d, i as u64 + 1));
            break;
        }
    }
    let (chosen_response, accepted_at, fallback_used) = match accepted {
        Some((d, at)) => (d.response_index, Some(at), false),
        None => (session.draw().response_index, None, true),
    };
    AlignmentOutcome {
        chosen_response,
        queries_used: session.queries_used() - start,
        accepted_at,
        fallback_used,
        lambda_hat: None,
    }
}

/// What to return when the rejection loop accepts nothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fallback {
    /// One extra base-policy draw.
    #[default]
    ReferenceDraw,
    /// Best of the draws already made.
    BestOfN,
}

/// Whether the rejection loop reuses the draws that estimated the normalizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    #[default]
    Reuse,
    Fresh,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ItpParams {
    pub beta: f64,
    pub n: usize,
    pub fallback: Fallback,
    pub sampling: Sampling,
    /// Use this normalizer instead of estimating one.
    pub lambda_override: Option<f64>,
}

impl ItpParams {
    pub fn new(beta: f64, n: usize) -> Self {
        Self {
            beta,
            n,
            fallback: Fallback::default(),
            sampling: Sampling::default(),
            lambda_override: None,
        }
    }
}

/// Estimates the normalizer from `n` draws, then rejection-samples toward
/// `pi_ref * relu((r_hat - lambda) / beta)` with cap `(r_max - lambda) / beta`.
pub fn inference_time_pessimism(
    session: &mut OracleSession<'_>,
    params: &ItpParams,
) -> Result<AlignmentOutcome> {
    check_beta(params.beta)?;
    assert!(params.n >= 1, "inference_time_pessimism needs at least one draw");
    let (beta, n) = (params.beta, params.n);
    let start = session.queries_used();
    let first = session.draw_batch(n);
    let lambda = match params.lambda_override {
        Some(l) => l,
        None => {
            let rewards: Vec<f64> = first.iter().map(|d| d.modeled_reward).collect();
            compute_norm_constant_empirical(&rewards, beta)?
        }
    };
    let m = (session.reward_cap() - lambda) / beta;
    let weight = |d: &Draw| ((d.modeled_reward - lambda) / beta).max(0.0);
    let pool = match params.sampling {
        Sampling::Reuse => first,
        Sampling::Fresh => session.draw_batch(n),
    };
    let accepted = accept_among(session, pool.iter().copied(), weight, m);
    let (chosen_response, accepted_at, fallback_used) = match accepted {
        Some((d, at)) => (d.response_index, Some(at), false),
        None => {
            let chosen = match params.fallback {
                Fallback::ReferenceDraw => session.draw().response_index,
                Fallback::BestOfN => pool[preferred(&pool)].response_index,
            };
            (chosen, None, true)
        }
    };
    Ok(AlignmentOutcome {
        chosen_response,
        queries_used: session.queries_used() - start,
        accepted_at,
        fallback_used,
        lambda_hat: Some(lambda),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{build_tabular_instance, ProblemInstance, TabularSpec};

    fn two_arm() -> ProblemInstance {
        build_tabular_instance(&TabularSpec::single(
            vec![0.5, 0.5],
            vec![1.0, 0.0],
            vec![1.0, 0.0],
            1.0,
        ))
        .unwrap()
    }

    #[test]
    fn bon_single_draw_is_the_draw() {
        let inst = two_arm();
        let mut a = OracleSession::new(&inst, 0, 9);
        let mut b = OracleSession::new(&inst, 0, 9);
        let out = best_of_n(&mut a, 1);
        assert_eq!(out.chosen_response, b.draw().response_index);
        assert_eq!(out.queries_used, 1);
    }

    #[test]
    fn bon_picks_max_when_present() {
        let inst = two_arm();
        let mut s = OracleSession::new(&inst, 0, 1);
        for _ in 0..100 {
            let mut probe = s.clone();
            let draws = probe.draw_batch(8);
            let out = best_of_n(&mut s, 8);
            let has_best = draws.iter().any(|d| d.response_index == 0);
            assert_eq!(out.chosen_response == 0, has_best);
        }
    }

    #[test]
    fn tie_break_prefers_lowest_index() {
        let d = |i, r| Draw {
            response_index: i,
            base_likelihood: 0.5,
            modeled_reward: r,
        };
        let draws = [d(3, 0.5), d(1, 0.5), d(2, 0.4)];
        assert_eq!(preferred(&draws), 1);
    }

    #[test]
    fn rejection_unit_weight_accepts_first() {
        let inst = two_arm();
        let mut s = OracleSession::new(&inst, 0, 4);
        let out = rejection_sampling(&mut s, |_| 2.0, 2.0, 5);
        assert_eq!(out.accepted_at, Some(1));
        assert!(!out.fallback_used);
        assert_eq!(out.queries_used, 1);
    }

    #[test]
    fn rejection_zero_weight_falls_back() {
        let inst = two_arm();
        let mut s = OracleSession::new(&inst, 0, 4);
        let out = rejection_sampling(&mut s, |_| 0.0, 1.0, 5);
        assert!(out.fallback_used);
        assert_eq!(out.accepted_at, None);
        assert_eq!(out.queries_used, 6);
    }

    #[test]
    fn itp_query_accounting() {
        let inst = two_arm();
        for seed in 0..200 {
            let mut s = OracleSession::new(&inst, 0, seed);
            let out = inference_time_pessimism(&mut s, &ItpParams::new(0.5, 4)).unwrap();
            let expected = if out.fallback_used { 5 } else { 4 };
            assert_eq!(out.queries_used, expected);
            assert!(out.accepted_at.is_none_or(|a| a <= out.queries_used));
            let mut params = ItpParams::new(0.5, 4);
            params.fallback = Fallback::BestOfN;
            let mut s = OracleSession::new(&inst, 0, seed);
            assert_eq!(inference_time_pessimism(&mut s, &params).unwrap().queries_used, 4);
        }
    }

    #[test]
    fn itp_single_draw_lambda() {
        let inst = two_arm();
        let mut s = OracleSession::new(&inst, 0, 3);
        let mut probe = s.clone();
        let r = probe.draw().modeled_reward;
        let out = inference_time_pessimism(&mut s, &ItpParams::new(0.25, 1)).unwrap();
        assert_eq!(out.lambda_hat, Some(r - 0.25));
    }
}
