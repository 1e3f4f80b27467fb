//! Tabular problem instances.
//!
//! A [`ProblemInstance`] is a finite set of prompts, each with a base policy
//! over an opaque response index set, a reward model and a true reward, all
//! bounded by a common reward cap. Instances are validated on construction
//! and immutable afterwards.

mod fixtures;

pub use fixtures::{
    build_cinf_lower_instance, build_cone_lower_instance, build_skyline_instance, CinfVariant,
    ConeVariant, LowerBoundFixture, RewardMap, SkylineFixture,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the total mass of a normalized distribution.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Largest deviation from unit mass that input rows may carry and still be
/// renormalized rather than rejected.
pub const RENORMALIZE_TOLERANCE: f64 = 1e-9;

/// Nonnegative weights over a finite index set.
///
/// When `normalized` is set the weights sum to one within
/// [`MASS_TOLERANCE`]; otherwise the value is a pseudo-distribution with
/// arbitrary nonnegative mass.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    weights: Vec<f64>,
    normalized: bool,
}

impl DiscreteDistribution {
    /// Builds a normalized distribution. Mass within rounding of one is kept
    /// as given, so rebuilding from stored weights is idempotent; mass within
    /// [`RENORMALIZE_TOLERANCE`] is rescaled.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        Self::new_row(weights, 0)
    }

    fn new_row(mut weights: Vec<f64>, row: usize) -> Result<Self> {
        check_entries(&weights, row)?;
        let sum: f64 = weights.iter().sum();
        if sum <= 0.0 {
            return Err(Error::ZeroMassRow { row });
        }
        if (sum - 1.0).abs() > RENORMALIZE_TOLERANCE {
            return Err(Error::NormalizationDrift { row, sum });
        }
        if (sum - 1.0).abs() > weights.len() as f64 * f64::EPSILON {
            weights.iter_mut().for_each(|w| *w /= sum);
        }
        Ok(Self {
            weights,
            normalized: true,
        })
    }

    /// Normalizes arbitrary positive-mass weights.
    pub fn from_unnormalized(mut weights: Vec<f64>) -> Result<Self> {
        check_entries(&weights, 0)?;
        let sum: f64 = weights.iter().sum();
        if sum <= 0.0 {
            return Err(Error::ZeroMassRow { row: 0 });
        }
        weights.iter_mut().for_each(|w| *w /= sum);
        Ok(Self {
            weights,
            normalized: true,
        })
    }

    /// A pseudo-distribution: nonnegative weights with no mass constraint.
    pub fn pseudo(weights: Vec<f64>) -> Result<Self> {
        check_entries(&weights, 0)?;
        Ok(Self {
            weights,
            normalized: false,
        })
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform distribution over an empty set");
        Self {
            weights: vec![1.0 / n as f64; n],
            normalized: true,
        }
    }

    pub fn point_mass(n: usize, index: usize) -> Self {
        assert!(index < n, "point mass index out of range");
        let mut weights = vec![0.0; n];
        weights[index] = 1.0;
        Self {
            weights,
            normalized: true,
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn into_weights(self) -> Vec<f64> {
        self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn get(&self, index: usize) -> f64 {
        self.weights[index]
    }

    /// Cumulative sums with the final entry pinned to the total mass of the
    /// last positive entry, so inverse-CDF lookups never run off the end.
    pub(crate) fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = self
            .weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        if let Some(last_positive) = self.weights.iter().rposition(|&w| w > 0.0) {
            let total = cdf[last_positive];
            for c in &mut cdf[last_positive..] {
                *c = total;
            }
        }
        cdf
    }
}

fn check_entries(weights: &[f64], row: usize) -> Result<()> {
    for (index, &w) in weights.iter().enumerate() {
        if !w.is_finite() {
            return Err(Error::NonFinite { row, index });
        }
        if w < 0.0 {
            return Err(Error::NegativeWeight {
                row,
                index,
                value: w,
            });
        }
    }
    Ok(())
}

/// One prompt of a tabular instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Prompt {
    pub(crate) id: String,
    pub(crate) base_policy: DiscreteDistribution,
    pub(crate) reward_model: Vec<f64>,
    pub(crate) true_reward: Vec<f64>,
    pub(crate) comparator: Option<DiscreteDistribution>,
    pub(crate) cdf: Vec<f64>,
}

impl Prompt {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn response_count(&self) -> usize {
        self.base_policy.len()
    }

    pub fn base_policy(&self) -> &DiscreteDistribution {
        &self.base_policy
    }

    pub fn reward_model(&self) -> &[f64] {
        &self.reward_model
    }

    pub fn true_reward(&self) -> &[f64] {
        &self.true_reward
    }

    /// The comparator attached to this prompt, if any.
    pub fn comparator(&self) -> Option<&DiscreteDistribution> {
        self.comparator.as_ref()
    }

    /// The attached comparator, or a point mass on the first maximizer of
    /// the true reward.
    pub fn comparator_or_greedy(&self) -> DiscreteDistribution {
        match &self.comparator {
            Some(c) => c.clone(),
            None => {
                let best = argmax_lowest_index(&self.true_reward);
                DiscreteDistribution::point_mass(self.response_count(), best)
            }
        }
    }
}

pub(crate) fn argmax_lowest_index(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Finite prompt/response problem with base policy, reward model and true
/// reward.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    prompts: Vec<Prompt>,
    reward_cap: f64,
    prompt_distribution: Option<DiscreteDistribution>,
}

impl ProblemInstance {
    pub fn prompts(&self) -> &[Prompt] {
        &self.prompts
    }

    pub fn prompt(&self, index: usize) -> &Prompt {
        &self.prompts[index]
    }

    pub fn prompt_index(&self, id: &str) -> Result<usize> {
        self.prompts
            .iter()
            .position(|p| p.id == id)
            .ok_or_else(|| Error::UnknownPrompt(id.to_string()))
    }

    pub fn reward_cap(&self) -> f64 {
        self.reward_cap
    }

    /// The prompt distribution as supplied, if any.
    pub fn explicit_prompt_distribution(&self) -> Option<&DiscreteDistribution> {
        self.prompt_distribution.as_ref()
    }

    /// The prompt distribution, defaulting to uniform.
    pub fn prompt_distribution(&self) -> DiscreteDistribution {
        self.prompt_distribution
            .clone()
            .unwrap_or_else(|| DiscreteDistribution::uniform(self.prompts.len()))
    }

    /// Returns a copy with the given per-prompt comparators attached.
    pub fn with_comparator(mut self, comparator: &ComparatorPolicy) -> Result<Self> {
        if comparator.per_prompt.len() != self.prompts.len() {
            return Err(Error::DimensionMismatch {
                expected: self.prompts.len(),
                found: comparator.per_prompt.len(),
            });
        }
        for (p, c) in self.prompts.iter_mut().zip(&comparator.per_prompt) {
            if c.len() != p.response_count() {
                return Err(Error::DimensionMismatch {
                    expected: p.response_count(),
                    found: c.len(),
                });
            }
            p.comparator = Some(c.clone());
        }
        Ok(self)
    }

    /// Comparator for every prompt, falling back to the greedy true-reward
    /// policy where none is attached.
    pub fn comparator(&self) -> ComparatorPolicy {
        ComparatorPolicy {
            per_prompt: self.prompts.iter().map(Prompt::comparator_or_greedy).collect(),
        }
    }

    /// Serializable form of this instance.
    pub fn to_spec(&self) -> TabularSpec {
        TabularSpec {
            prompts: self
                .prompts
                .iter()
                .map(|p| PromptSpec {
                    id: p.id.clone(),
                    weights: p.base_policy.weights().to_vec(),
                    r_hat: p.reward_model.clone(),
                    r_star: p.true_reward.clone(),
                    pi_star: p.comparator.as_ref().map(|c| c.weights().to_vec()),
                })
                .collect(),
            r_max: self.reward_cap,
            rho: self
                .prompt_distribution
                .as_ref()
                .map(|d| d.weights().to_vec()),
        }
    }
}

/// Per-prompt comparator policy.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparatorPolicy {
    pub per_prompt: Vec<DiscreteDistribution>,
}

impl ComparatorPolicy {
    pub fn single(policy: DiscreteDistribution) -> Self {
        Self {
            per_prompt: vec![policy],
        }
    }
}

/// Raw instance description; also the on-disk instance file schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TabularSpec {
    pub prompts: Vec<PromptSpec>,
    pub r_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PromptSpec {
    pub id: String,
    pub weights: Vec<f64>,
    pub r_hat: Vec<f64>,
    pub r_star: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi_star: Option<Vec<f64>>,
}

impl TabularSpec {
    /// Single-prompt spec with id `x0`.
    pub fn single(weights: Vec<f64>, r_hat: Vec<f64>, r_star: Vec<f64>, r_max: f64) -> Self {
        Self {
            prompts: vec![PromptSpec {
                id: "x0".to_string(),
                weights,
                r_hat,
                r_star,
                pi_star: None,
            }],
            r_max,
            rho: None,
        }
    }
}

/// Validates a raw spec into a [`ProblemInstance`].
pub fn build_tabular_instance(spec: &TabularSpec) -> Result<ProblemInstance> {
    if !spec.r_max.is_finite() || spec.r_max < 1.0 {
        return Err(Error::RewardCapTooSmall(spec.r_max));
    }
    if spec.prompts.is_empty() {
        return Err(Error::EmptyInstance);
    }
    let mut prompts = Vec::with_capacity(spec.prompts.len());
    for (row, p) in spec.prompts.iter().enumerate() {
        if prompts.iter().any(|q: &Prompt| q.id == p.id) {
            return Err(Error::DuplicatePrompt(p.id.clone()));
        }
        let base_policy = DiscreteDistribution::new_row(p.weights.clone(), row)?;
        let n = base_policy.len();
        for (field, values) in [("r_hat", &p.r_hat), ("r_star", &p.r_star)] {
            if values.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: values.len(),
                });
            }
            check_rewards(field, values, row, spec.r_max)?;
        }
        let comparator = match &p.pi_star {
            Some(w) => {
                if w.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: w.len(),
                    });
                }
                Some(DiscreteDistribution::new_row(w.clone(), row)?)
            }
            None => None,
        };
        let cdf = base_policy.cumulative();
        prompts.push(Prompt {
            id: p.id.clone(),
            base_policy,
            reward_model: p.r_hat.clone(),
            true_reward: p.r_star.clone(),
            comparator,
            cdf,
        });
    }
    let prompt_distribution = match &spec.rho {
        Some(rho) => {
            if rho.len() != prompts.len() {
                return Err(Error::DimensionMismatch {
                    expected: prompts.len(),
                    found: rho.len(),
                });
            }
            Some(DiscreteDistribution::new(rho.clone())?)
        }
        None => None,
    };
    Ok(ProblemInstance {
        prompts,
        reward_cap: spec.r_max,
        prompt_distribution,
    })
}

fn check_rewards(field: &'static str, values: &[f64], row: usize, r_max: f64) -> Result<()> {
    for (index, &value) in values.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite { row, index });
        }
        if !(0.0..=r_max).contains(&value) {
            return Err(Error::RewardOutOfRange {
                field,
                row,
                index,
                value,
                r_max,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_prompt(weights: Vec<f64>) -> TabularSpec {
        let n = weights.len();
        TabularSpec::single(weights, vec![0.0; n], vec![0.0; n], 1.0)
    }

    #[test]
    fn well_formed_instance() {
        let spec = TabularSpec::single(vec![0.5, 0.5], vec![1.0, 0.0], vec![1.0, 0.0], 1.0);
        let inst = build_tabular_instance(&spec).unwrap();
        assert_eq!(inst.prompts().len(), 1);
        assert_eq!(inst.prompt(0).base_policy().weights(), &[0.5, 0.5]);
        assert_eq!(inst.reward_cap(), 1.0);
    }

    #[test]
    fn negative_weight_rejected() {
        let err = build_tabular_instance(&one_prompt(vec![0.5, -0.1, 0.6])).unwrap_err();
        assert!(matches!(err, Error::NegativeWeight { index: 1, .. }));
    }

    #[test]
    fn tiny_drift_is_renormalized() {
        let inst = build_tabular_instance(&one_prompt(vec![0.5, 0.5 + 1e-12])).unwrap();
        let w = inst.prompt(0).base_policy().weights();
        let direct: f64 = w[0] + w[1];
        assert!((direct - 1.0).abs() <= MASS_TOLERANCE);
        assert!(w[1] > w[0]);
    }

    #[test]
    fn large_drift_rejected() {
        let err = build_tabular_instance(&one_prompt(vec![0.5, 0.6])).unwrap_err();
        assert!(matches!(err, Error::NormalizationDrift { .. }));
    }

    #[test]
    fn zero_mass_row_rejected() {
        let err = build_tabular_instance(&one_prompt(vec![0.0, 0.0])).unwrap_err();
        assert_eq!(err, Error::ZeroMassRow { row: 0 });
    }

    #[test]
    fn reward_out_of_range_rejected() {
        let spec = TabularSpec::single(vec![0.5, 0.5], vec![1.5, 0.0], vec![0.0, 0.0], 1.0);
        let err = build_tabular_instance(&spec).unwrap_err();
        assert!(matches!(err, Error::RewardOutOfRange { field: "r_hat", index: 0, .. }));
    }

    #[test]
    fn reward_cap_below_one_rejected() {
        let spec = TabularSpec::single(vec![1.0], vec![0.0], vec![0.0], 0.5);
        assert_eq!(build_tabular_instance(&spec).unwrap_err(), Error::RewardCapTooSmall(0.5));
    }

    #[test]
    fn unknown_prompt_lookup() {
        let inst = build_tabular_instance(&one_prompt(vec![1.0])).unwrap();
        assert_eq!(inst.prompt_index("x0").unwrap(), 0);
        assert_eq!(
            inst.prompt_index("nope").unwrap_err(),
            Error::UnknownPrompt("nope".into())
        );
    }

    #[test]
    fn cumulative_is_pinned_at_last_positive_entry() {
        let d = DiscreteDistribution::new(vec![0.1, 0.2, 0.7, 0.0]).unwrap();
        let cdf = d.cumulative();
        assert_eq!(cdf[2], cdf[3]);
        assert!((cdf[1] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn greedy_comparator_defaults_to_lowest_index_maximizer() {
        let spec = TabularSpec::single(vec![0.5, 0.25, 0.25], vec![0.0; 3], vec![0.2, 0.9, 0.9], 1.0);
        let inst = build_tabular_instance(&spec).unwrap();
        assert_eq!(inst.comparator().per_prompt[0].weights(), &[0.0, 1.0, 0.0]);
    }
}
