//! Lower-bound constructions on a single prompt.
//!
//! Every builder returns its rewards inside `[0, r_max]`. Constructions whose
//! raw rewards leave that range are shifted and rescaled by a common affine
//! map, recorded in [`RewardMap`], so that regret values can be mapped back.

use super::{build_tabular_instance, ComparatorPolicy, DiscreteDistribution, ProblemInstance, TabularSpec};
use crate::error::{Error, Result};

/// Default reward cap for fixtures.
pub const FIXTURE_REWARD_CAP: f64 = 1.0;

/// Affine map `stored = (raw + shift) * scale` applied to both reward vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardMap {
    pub shift: f64,
    pub scale: f64,
}

impl RewardMap {
    pub const IDENTITY: Self = Self {
        shift: 0.0,
        scale: 1.0,
    };

    /// Converts a difference of stored rewards (such as a regret) back to raw
    /// units.
    pub fn raw_difference(&self, stored: f64) -> f64 {
        stored / self.scale
    }

    pub fn apply(&self, raw: f64) -> f64 {
        (raw + self.shift) * self.scale
    }

    /// Smallest map that brings every value into `[0, r_max]`.
    fn fitting(values: &[f64], r_max: f64) -> Self {
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let shift = if lo < 0.0 { -lo } else { 0.0 };
        let hi = values.iter().map(|v| v + shift).fold(0.0, f64::max);
        let scale = if hi > r_max { r_max / hi } else { 1.0 };
        Self { shift, scale }
    }
}

/// A constructed instance together with its comparator and reward map.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundFixture {
    pub instance: ProblemInstance,
    pub comparator: ComparatorPolicy,
    pub reward_map: RewardMap,
}

impl LowerBoundFixture {
    fn assemble(
        pi_ref: Vec<f64>,
        pi_star: Vec<f64>,
        r_hat: Vec<f64>,
        r_star: Vec<f64>,
    ) -> Result<Self> {
        let all: Vec<f64> = r_hat.iter().chain(&r_star).copied().collect();
        let reward_map = RewardMap::fitting(&all, FIXTURE_REWARD_CAP);
        let map = |v: Vec<f64>| -> Vec<f64> {
            v.into_iter()
                .map(|x| reward_map.apply(x).clamp(0.0, FIXTURE_REWARD_CAP))
                .collect()
        };
        let mut spec = TabularSpec::single(pi_ref, map(r_hat), map(r_star), FIXTURE_REWARD_CAP);
        spec.prompts[0].pi_star = Some(pi_star);
        let instance = build_tabular_instance(&spec)?;
        let comparator = instance.comparator();
        Ok(Self {
            instance,
            comparator,
            reward_map,
        })
    }

    /// Same fixture under a larger reward cap. Stored rewards are unchanged.
    pub fn with_reward_cap(self, r_max: f64) -> Result<Self> {
        let mut spec = self.instance.to_spec();
        spec.r_max = r_max;
        Ok(Self {
            instance: build_tabular_instance(&spec)?,
            ..self
        })
    }

    /// The comparator on the only prompt.
    pub fn comparator_policy(&self) -> &DiscreteDistribution {
        &self.comparator.per_prompt[0]
    }
}

/// Reward layout for the three-response construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CinfVariant {
    SmallN,
    LargeN,
}

/// Three responses `(y0, y_star, y_bad)` with
/// `pi_ref = (1 - 1/(2N) - 1/C, 1/C, 1/(2N))` and the comparator fixed on
/// `y_star`.
pub fn build_cinf_lower_instance(
    c: f64,
    n: u64,
    eps_rm: f64,
    variant: CinfVariant,
) -> Result<LowerBoundFixture> {
    if !(c >= 1.0) || !c.is_finite() {
        return Err(Error::InfeasibleParameters(format!(
            "coverage level must be at least 1, got {c}"
        )));
    }
    if n == 0 {
        return Err(Error::InfeasibleParameters("N must be positive".into()));
    }
    if !(0.0..=1.0).contains(&eps_rm) {
        return Err(Error::InfeasibleParameters(format!(
            "reward error {eps_rm} outside [0, 1]"
        )));
    }
    let bad = 1.0 / (2.0 * n as f64);
    let star = 1.0 / c;
    let rest = 1.0 - bad - star;
    if rest < 0.0 {
        return Err(Error::InfeasibleParameters(format!(
            "C={c}, N={n} gives negative mass {rest} on y0"
        )));
    }
    let pi_ref = vec![rest, star, bad];
    let pi_star = vec![0.0, 1.0, 0.0];
    let eps2 = eps_rm * eps_rm;
    let (r_hat, r_star) = match variant {
        CinfVariant::SmallN => {
            let gap = (c * eps2).sqrt().min(1.0);
            (vec![0.0, 1.0 - gap, 0.0], vec![0.0, 1.0, 0.0])
        }
        CinfVariant::LargeN => {
            let delta = (n as f64 * eps2).sqrt().min(1.0);
            let gap = (c / 2.0 * eps2).sqrt().min(1.0);
            (vec![0.0, 1.0 - gap, 1.0], vec![0.0, 1.0, 1.0 - delta])
        }
    };
    LowerBoundFixture::assemble(pi_ref, pi_star, r_hat, r_star)
}

/// Reward layout for the geometric construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConeVariant {
    /// Rewards separate the high-ratio tail; `p` sets the layer index.
    Part1 { p: f64 },
    /// Rewards that mislead best-of-N at budget `N`.
    Part2,
}

impl ConeVariant {
    pub const PART1: Self = Self::Part1 { p: 1.0 / 3.0 };
}

/// `I = ceil(log2 C)`, clamped at zero.
pub fn cone_level(c: f64) -> u32 {
    if c <= 1.0 {
        0
    } else {
        c.log2().ceil() as u32
    }
}

/// Geometric instance `pi_ref(i) = 3 * 4^-i` over `i = 1, 2, ...` truncated
/// once the remaining reference tail drops below `truncation_tail`.
/// Response index `j` stands for `i = j + 1`.
pub fn build_cone_lower_instance(
    c: f64,
    truncation_tail: f64,
    variant: ConeVariant,
    eps: f64,
    n: u64,
) -> Result<LowerBoundFixture> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Precondition(format!("eps must lie in (0, 1], got {eps}")));
    }
    if !(c >= 1.0 / (2.0 * eps)) || !c.is_finite() {
        return Err(Error::Precondition(format!(
            "C={c} is below 1/(2 eps) = {}",
            1.0 / (2.0 * eps)
        )));
    }
    if !(truncation_tail > 0.0 && truncation_tail <= 1e-6) {
        return Err(Error::Precondition(format!(
            "truncation tail {truncation_tail} outside (0, 1e-6]"
        )));
    }
    if n == 0 {
        return Err(Error::Precondition("N must be positive".into()));
    }
    let level = cone_level(c) as i32;
    let eps2 = eps * eps;

    let layer = match variant {
        ConeVariant::Part1 { p } => {
            if !(p > 0.0 && p <= 0.5) {
                return Err(Error::Precondition(format!("p must lie in (0, 1/2], got {p}")));
            }
            let c_one = 1.0 + level as f64 / 3.0;
            ((-p * (c_one * eps2).log2()).floor() as i32).max(1)
        }
        ConeVariant::Part2 => ((n as f64).log2() / 2.0).floor().max(1.0) as i32,
    };

    let mut last = 1;
    while 4f64.powi(-last) >= truncation_tail {
        last += 1;
    }
    let last = last.max(level + 1).max(layer + 1);

    let mut pi_ref = Vec::with_capacity(last as usize);
    let mut pi_star = Vec::with_capacity(last as usize);
    for i in 1..=last {
        let r = 3.0 * 4f64.powi(-i);
        pi_ref.push(r);
        pi_star.push(if i <= level {
            2f64.powi(-i)
        } else {
            2f64.powi(level) * r
        });
    }
    // Fold the dropped tail into the last retained response.
    let tail = 4f64.powi(-last);
    *pi_ref.last_mut().unwrap() += tail;
    *pi_star.last_mut().unwrap() += 2f64.powi(level) * tail;

    let k = layer;
    let (r_hat, r_star): (Vec<f64>, Vec<f64>) = match variant {
        ConeVariant::Part1 { .. } => {
            let delta = |i: i32| 2f64.powi(i) * (eps2 / (4.0 * k as f64)).sqrt();
            (1..=last)
                .map(|i| {
                    if i < k {
                        (delta(i), 0.0)
                    } else {
                        (0.5 - delta(k) / 2.0, 0.5 + delta(k) / 2.0)
                    }
                })
                .unzip()
        }
        ConeVariant::Part2 => {
            let delta = |i: i32| 2f64.powi(i) * (eps2 / (8.0 * k as f64)).sqrt();
            let s = (k as f64).sqrt() * delta(k);
            (1..=last)
                .map(|i| {
                    if i < k {
                        (0.5 - delta(i) / 2.0, 0.5 + delta(i) / 2.0)
                    } else if i == k {
                        (0.5 + s / 2.0, 0.5 - s / 2.0)
                    } else {
                        (0.5 - s / 2.0, 0.5 + s / 2.0)
                    }
                })
                .unzip()
        }
    };
    LowerBoundFixture::assemble(pi_ref, pi_star, r_hat, r_star)
}

/// Instance with `r_hat = 0` whose true reward separates `pi_star` from
/// `pi_hat` at reward error `eps^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SkylineFixture {
    pub fixture: LowerBoundFixture,
    /// Raw true reward before the affine map.
    pub raw_true_reward: Vec<f64>,
    /// `sum (pi_star - pi_hat)^2 / pi_ref`.
    pub chi_gap: f64,
}

pub fn build_skyline_instance(
    pi_ref: &DiscreteDistribution,
    pi_star: &DiscreteDistribution,
    pi_hat: &DiscreteDistribution,
    eps: f64,
) -> Result<SkylineFixture> {
    let n = pi_ref.len();
    for d in [pi_star, pi_hat] {
        if d.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: d.len(),
            });
        }
    }
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::Precondition(format!("eps must be nonnegative, got {eps}")));
    }
    let diff: Vec<f64> = pi_star
        .weights()
        .iter()
        .zip(pi_hat.weights())
        .map(|(a, b)| a - b)
        .collect();
    let mut chi_gap = 0.0;
    for (index, (&d, &r)) in diff.iter().zip(pi_ref.weights()).enumerate() {
        if d != 0.0 {
            if r <= 0.0 {
                return Err(Error::UncoveredSupport { index });
            }
            chi_gap += d * d / r;
        }
    }
    let raw_true_reward: Vec<f64> = if chi_gap > 0.0 {
        let norm = chi_gap.sqrt();
        diff.iter()
            .zip(pi_ref.weights())
            .map(|(&d, &r)| if d == 0.0 { 0.0 } else { eps * d / r / norm })
            .collect()
    } else {
        vec![0.0; n]
    };
    let fixture = LowerBoundFixture::assemble(
        pi_ref.weights().to_vec(),
        pi_star.weights().to_vec(),
        vec![0.0; n],
        raw_true_reward.clone(),
    )?;
    Ok(SkylineFixture {
        fixture,
        raw_true_reward,
        chi_gap,
    })
}
