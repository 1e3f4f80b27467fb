//! The acceptance suite: ten end-to-end checks, each returning a report.
//!
//! Every check is deterministic. Thresholds are those of the acceptance
//! list; nothing here is tuned to make a check pass.

pub mod oracle;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algorithms::{best_of_n, compute_norm_constant_empirical, phi_empirical};
use crate::divergences::{
    coverage_alpha, coverage_inf, coverage_l1, e_m_divergence, m_star, reward_error, tv_distance,
};
use crate::exact::{chi2_objective, exact_bon_law, exact_chi2_policy, exact_rejection_law, regret};
use crate::experiments::{
    estimate_regret_mc, lambda_concentration_trial, prescribed_sample_size, sweep_n, Algorithm,
    Mode, RunParams, SweepConfig,
};
use crate::instances::{
    build_cinf_lower_instance, build_cone_lower_instance, build_skyline_instance,
    build_tabular_instance, CinfVariant, ConeVariant, DiscreteDistribution, ProblemInstance,
    TabularSpec,
};
use crate::io::{checksum, render_records, Format};
use crate::oracle::{derive_seed, OracleSession};
use oracle::{bisect_empirical_normalizer, enumerate_bon_law, log_uniform, random_rewards, random_simplex};

const SEED: u64 = 0x5eed_a11e;

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl std::fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} [{:>2}] {}: {} ({:.2}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

fn timed(id: u8, title: &'static str, body: impl FnOnce() -> (bool, String)) -> CriterionReport {
    let start = Instant::now();
    let (passed, detail) = body();
    CriterionReport {
        id,
        title,
        passed,
        detail,
        elapsed: start.elapsed(),
    }
}

pub const CRITERIA: [(u8, fn() -> CriterionReport); 10] = [
    (1, normalizer_exactness),
    (2, kkt_optimality),
    (3, bon_equivalence),
    (4, rejection_tv_bound),
    (5, overoptimization_curve),
    (6, small_n_impossibility),
    (7, lambda_concentration),
    (8, m_star_bounds),
    (9, skyline_identity),
    (10, determinism),
];

/// Runs the selected checks (all when `ids` is empty) in order.
pub fn run(ids: &[u8]) -> Vec<CriterionReport> {
    CRITERIA
        .iter()
        .filter(|(id, _)| ids.is_empty() || ids.contains(id))
        .map(|(_, f)| f())
        .collect()
}

fn single_instance(pi_ref: Vec<f64>, r_hat: Vec<f64>, r_star: Vec<f64>) -> ProblemInstance {
    build_tabular_instance(&TabularSpec::single(pi_ref, r_hat, r_star, 1.0))
        .expect("generated instance is valid")
}

/// Empirical normalizer against bisection on random samples up to 1e5
/// rewards, plus a timing run at 1e6.
pub fn normalizer_exactness() -> CriterionReport {
    timed(1, "normalizer exactness", || {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
        let (mut worst_phi, mut worst_gap) = (0.0f64, 0.0f64);
        let mut bracket_misses = 0;
        for i in 0..10_000 {
            let n = if i < 8 {
                100_000
            } else {
                log_uniform(&mut rng, 1.0, 1e5).round().max(1.0) as usize
            };
            let rewards = random_rewards(&mut rng, n);
            let beta = log_uniform(&mut rng, 1e-3, 10.0);
            let lambda = compute_norm_constant_empirical(&rewards, beta).expect("valid input");
            worst_phi = worst_phi.max((phi_empirical(&rewards, beta, lambda) - 1.0).abs());
            worst_gap = worst_gap.max((lambda - bisect_empirical_normalizer(&rewards, beta)).abs());
            let lo = rewards.iter().copied().fold(f64::INFINITY, f64::min) - beta;
            let hi = rewards.iter().copied().fold(f64::NEG_INFINITY, f64::max) - beta / n as f64;
            if !(lambda >= lo - 1e-12 && lambda <= hi + 1e-12) {
                bracket_misses += 1;
            }
        }
        let big = random_rewards(&mut rng, 1_000_000);
        let start = Instant::now();
        let lambda = compute_norm_constant_empirical(&big, 0.1).expect("valid input");
        let big_time = start.elapsed().as_secs_f64();
        let big_phi = (phi_empirical(&big, 0.1, lambda) - 1.0).abs();
        let passed = worst_phi <= 1e-9
            && worst_gap <= 1e-9
            && bracket_misses == 0
            && big_phi <= 1e-9
            && big_time < 5.0;
        (
            passed,
            format!(
                "max |phi-1| = {worst_phi:.2e}, max |lambda - bisection| = {worst_gap:.2e}, \
                 bracket misses = {bracket_misses}, N=1e6 in {big_time:.3}s"
            ),
        )
    })
}

/// Random simplex points and local perturbations never beat the closed form.
pub fn kkt_optimality() -> CriterionReport {
    timed(2, "chi-squared KKT optimality", || {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 2);
        let mut worst = f64::NEG_INFINITY;
        let mut lambda_out = 0;
        for _ in 0..100 {
            let k = rng.random_range(2..=6);
            let pi_ref = random_simplex(&mut rng, k);
            let r_hat = random_rewards(&mut rng, k);
            let beta = log_uniform(&mut rng, 0.01, 10.0);
            let inst = single_instance(pi_ref.clone(), r_hat.clone(), r_hat.clone());
            let sol = exact_chi2_policy(&inst, 0, beta).expect("valid instance");
            if !(sol.lambda >= -beta - 1e-12 && sol.lambda <= 1.0 - beta + 1e-12) {
                lambda_out += 1;
            }
            let best = sol.objective_value;
            let star = sol.policy.weights().to_vec();
            let support: Vec<usize> = (0..k).filter(|&i| star[i] > 0.0).collect();
            for _ in 0..10_000 {
                let mut p = random_simplex(&mut rng, k);
                if rng.random_bool(0.3) {
                    let keep = rng.random_range(0..k);
                    for (i, x) in p.iter_mut().enumerate() {
                        if i != keep && rng.random_bool(0.5) {
                            *x = 0.0;
                        }
                    }
                    let s: f64 = p.iter().sum();
                    p.iter_mut().for_each(|x| *x /= s);
                }
                worst = worst.max(chi2_objective(&pi_ref, &r_hat, beta, &p) - best);
            }
            for _ in 0..10_000 {
                let mut d: Vec<f64> = (0..k).map(|_| rng.random::<f64>() - 0.5).collect();
                for i in 0..k {
                    if star[i] == 0.0 {
                        d[i] = d[i].abs();
                    }
                }
                let shift = d.iter().sum::<f64>() / support.len() as f64;
                for &i in &support {
                    d[i] -= shift;
                }
                let room = (0..k)
                    .filter(|&i| d[i] < 0.0)
                    .map(|i| star[i] / -d[i])
                    .fold(f64::INFINITY, f64::min);
                let t = log_uniform(&mut rng, 1e-8, 1e-1).min(room * rng.random::<f64>());
                let q: Vec<f64> = star.iter().zip(&d).map(|(s, d)| (s + t * d).max(0.0)).collect();
                worst = worst.max(chi2_objective(&pi_ref, &r_hat, beta, &q) - best);
            }
        }
        (
            worst <= 1e-8 && lambda_out == 0,
            format!("max competitor advantage = {worst:.2e}, lambda outside range = {lambda_out}"),
        )
    })
}

/// Closed-form best-of-N law against enumeration and simulation.
pub fn bon_equivalence() -> CriterionReport {
    timed(3, "best-of-N law equivalence", || {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 3);
        let mut worst = 0.0f64;
        let mut instances = Vec::new();
        for _ in 0..50 {
            let k = rng.random_range(2..=4);
            let pi_ref = random_simplex(&mut rng, k);
            let r_hat = random_rewards(&mut rng, k);
            let inst = single_instance(pi_ref.clone(), r_hat.clone(), r_hat.clone());
            for n in 1..=4u32 {
                let exact = exact_bon_law(&inst, 0, n as u64).expect("valid");
                let brute = enumerate_bon_law(&pi_ref, &r_hat, n);
                for (a, b) in exact.weights().iter().zip(&brute) {
                    worst = worst.max((a - b).abs());
                }
            }
            instances.push(inst);
        }
        let replicates = 100_000u64;
        let mut worst_z = 0.0f64;
        let mut mc_fail = 0;
        for (j, inst) in instances.iter().take(5).enumerate() {
            let n = 1 + j % 4;
            let counts = (0..replicates)
                .into_par_iter()
                .map(|r| {
                    let mut s = OracleSession::new(inst, 0, derive_seed(SEED ^ 3, &[j as u64, r]));
                    best_of_n(&mut s, n).chosen_response
                })
                .fold(
                    || vec![0u64; inst.prompt(0).response_count()],
                    |mut c, y| {
                        c[y] += 1;
                        c
                    },
                )
                .reduce(
                    || vec![0u64; inst.prompt(0).response_count()],
                    |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect(),
                );
            let law = exact_bon_law(inst, 0, n as u64).expect("valid");
            for (c, &p) in counts.iter().zip(law.weights()) {
                let freq = *c as f64 / replicates as f64;
                let sigma = (p * (1.0 - p) / replicates as f64).sqrt();
                if sigma == 0.0 {
                    if freq != p {
                        mc_fail += 1;
                    }
                } else {
                    let z = (freq - p).abs() / sigma;
                    worst_z = worst_z.max(z);
                    if z > 3.0 {
                        mc_fail += 1;
                    }
                }
            }
        }
        (
            worst <= 1e-12 && mc_fail == 0,
            format!(
                "max |exact - enumeration| = {worst:.2e}; simulation: max z = {worst_z:.2}, \
                 entries beyond 3 sigma = {mc_fail}"
            ),
        )
    })
}

/// Exact rejection-sampling law against the stated TV bound on an (M, N)
/// grid.
pub fn rejection_tv_bound() -> CriterionReport {
    timed(4, "rejection sampling TV bound", || {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 4);
        let n_grid = [1u64, 2, 5, 10, 20, 50, 100, 200, 500, 1000];
        let mut violations = 0;
        let mut worst_excess = f64::NEG_INFINITY;
        let mut doubled_violations = 0;
        let mut example = None;
        let start = Instant::now();
        for _ in 0..20 {
            let k = rng.random_range(2..=8);
            let pi_ref = DiscreteDistribution::new(random_simplex(&mut rng, k)).expect("simplex");
            let pi = DiscreteDistribution::new(random_simplex(&mut rng, k)).expect("simplex");
            let c_inf = coverage_inf(&pi, &pi_ref).expect("full support");
            let top = (2.0 * c_inf).max(2.0);
            for i in 0..10 {
                let m = top.powf(i as f64 / 9.0);
                let e_m = e_m_divergence(&pi, &pi_ref, m);
                for &n in &n_grid {
                    let law = exact_rejection_law(&pi, &pi_ref, m, n).expect("valid");
                    let tv = tv_distance(&pi, &law.law).expect("same size");
                    let tail = (-(n as f64) * (1.0 - e_m) / m).exp();
                    let bound = e_m + 0.5 * tail;
                    if tv > bound + 1e-12 {
                        violations += 1;
                        let excess = tv - bound;
                        if excess > worst_excess {
                            worst_excess = excess;
                            example = Some((m, n, tv, bound));
                        }
                    }
                    if tv > e_m + tail + 1e-12 {
                        doubled_violations += 1;
                    }
                }
            }
        }
        let secs = start.elapsed().as_secs_f64();
        let mut detail = format!(
            "{violations} of 2000 grid points exceed E_M + exp(-N(1-E_M)/M)/2; \
             {doubled_violations} exceed E_M + exp(-N(1-E_M)/M); {secs:.3}s"
        );
        if let Some((m, n, tv, bound)) = example {
            detail.push_str(&format!("; worst at M={m:.3}, N={n}: TV={tv:.4} > {bound:.4}"));
        }
        (violations == 0 && secs < 1.0, detail)
    })
}

/// Best-of-N regret grows with N on the geometric fixture while the
/// pessimistic sampler does not degrade.
pub fn overoptimization_curve() -> CriterionReport {
    timed(5, "overoptimization curve", || {
        let eps = 0.05;
        let f = build_cone_lower_instance(1.0 / eps, 1e-9, ConeVariant::Part2, eps, 4096)
            .expect("valid fixture");
        let inst = &f.instance;
        let star = f.comparator_policy();
        let raw = |stored: f64| f.reward_map.raw_difference(stored);
        let bon_regret = |n: u64| {
            let law = exact_bon_law(inst, 0, n).expect("valid");
            raw(regret(inst, 0, star, &law).expect("same size"))
        };
        let (r16, r4096) = (bon_regret(16), bon_regret(4096));
        let floor = (1.0 - (-3.0f64).exp()) * (4096.0 * eps * eps / 32.0).sqrt();

        let c_one = coverage_l1(star, inst.prompt(0).base_policy()).expect("covered");
        let beta = (eps * eps / c_one).sqrt() * f.reward_map.scale;
        let start = Instant::now();
        let est = |n: u64| {
            estimate_regret_mc(inst, 0, Algorithm::Itp, &RunParams::new(n, Some(beta)), 10_000, SEED ^ 5 ^ n)
                .expect("valid")
        };
        let (i256, i4096) = (est(256), est(4096));
        let secs = start.elapsed().as_secs_f64();
        let (m256, m4096) = (raw(i256.mean), raw(i4096.mean));
        let se = raw((i256.std_error.powi(2) + i4096.std_error.powi(2)).sqrt());
        let passed = r4096 >= floor && r4096 > r16 && m4096 <= m256 + 2.0 * se && secs < 60.0;
        (
            passed,
            format!(
                "BoN regret N=16: {r16:.4}, N=4096: {r4096:.4} (floor {floor:.4}); \
                 pessimistic regret N=256: {m256:.4}, N=4096: {m4096:.4} (2 SE = {:.4}); \
                 simulation {secs:.1}s",
                2.0 * se
            ),
        )
    })
}

/// Best-of-N regret on the three-response fixture at small N.
pub fn small_n_impossibility() -> CriterionReport {
    timed(6, "small-N impossibility", || {
        let (c, eps, n) = (64.0, 0.05, 16u64);
        let f = build_cinf_lower_instance(c, n, eps, CinfVariant::SmallN).expect("valid fixture");
        let law = exact_bon_law(&f.instance, 0, n).expect("valid");
        let r = f
            .reward_map
            .raw_difference(regret(&f.instance, 0, f.comparator_policy(), &law).expect("same size"));
        let target = (2.0 * (c * eps * eps).sqrt()).min(1.0);
        let miss = (1.0 - 1.0 / c).powi(n as i32);
        (
            r > target,
            format!(
                "exact BoN regret {r:.5} vs required > {target:.3}; \
                 probability that y* is never drawn = {miss:.5}"
            ),
        )
    })
}

/// Estimated normalizers land in the good mass window at the prescribed N.
pub fn lambda_concentration() -> CriterionReport {
    timed(7, "normalizer concentration", || {
        let (r_max, beta, delta) = (1.0, 0.5, 0.05);
        let n = prescribed_sample_size(r_max, beta, delta);
        let k = 100;
        let inst = single_instance(
            vec![1.0 / k as f64; k],
            (0..k).map(|i| i as f64 / (k - 1) as f64).collect(),
            vec![0.0; k],
        );
        let start = Instant::now();
        let frac = lambda_concentration_trial(&inst, 0, beta, n as usize, 200, SEED ^ 7).expect("valid");
        let secs = start.elapsed().as_secs_f64();
        (
            n == 1121 && frac >= 0.9 && secs < 10.0,
            format!("N = {n}, fraction in window = {frac:.3}, {secs:.3}s"),
        )
    })
}

/// The E_M divergence at the moment-based threshold is at most eps, and
/// vanishes at the uniform coverage.
pub fn m_star_bounds() -> CriterionReport {
    timed(8, "E_M threshold bounds", || {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 8);
        let mut worst = f64::NEG_INFINITY;
        let mut at_cinf = 0.0f64;
        let mut m_star_excess = f64::NEG_INFINITY;
        for _ in 0..100 {
            let k = rng.random_range(2..=8);
            let pi_ref = DiscreteDistribution::new(random_simplex(&mut rng, k)).expect("simplex");
            let pi = DiscreteDistribution::new(random_simplex(&mut rng, k)).expect("simplex");
            let eps = rng.random_range(0.01..=1.0);
            for alpha in [1.5, 2.0, 3.0] {
                let c = coverage_alpha(&pi, &pi_ref, alpha).expect("covered");
                let m = (c / eps).powf(1.0 / (alpha - 1.0));
                worst = worst.max(e_m_divergence(&pi, &pi_ref, m) - eps);
            }
            let c_inf = coverage_inf(&pi, &pi_ref).expect("covered");
            at_cinf = at_cinf.max(e_m_divergence(&pi, &pi_ref, c_inf));
            let c_one = coverage_l1(&pi, &pi_ref).expect("covered");
            m_star_excess = m_star_excess.max(m_star(&pi, &pi_ref, eps) - c_inf.min(c_one / eps));
        }
        (
            worst <= 1e-12 && at_cinf <= 1e-12 && m_star_excess <= 1e-9,
            format!(
                "max E_M - eps = {worst:.2e}, max E_(C_inf) = {at_cinf:.2e}, \
                 max M*_eps - min(C_inf, C1/eps) = {m_star_excess:.2e}"
            ),
        )
    })
}

/// The skyline construction meets its reward-error budget and its regret
/// identity.
pub fn skyline_identity() -> CriterionReport {
    timed(9, "skyline construction", || {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 9);
        let (mut worst_err, mut worst_gap) = (f64::NEG_INFINITY, 0.0f64);
        for _ in 0..100 {
            let k = rng.random_range(2..=8);
            let pi_ref = DiscreteDistribution::new(random_simplex(&mut rng, k)).expect("simplex");
            let pi_star = DiscreteDistribution::new(random_simplex(&mut rng, k)).expect("simplex");
            let pi_hat = DiscreteDistribution::new(random_simplex(&mut rng, k)).expect("simplex");
            let eps = rng.random_range(0.001..=0.5);
            let s = build_skyline_instance(&pi_ref, &pi_star, &pi_hat, eps).expect("covered");
            let f = &s.fixture;
            worst_err = worst_err.max(reward_error(&f.instance, 0) - eps * eps);
            let r = f
                .reward_map
                .raw_difference(regret(&f.instance, 0, &pi_star, &pi_hat).expect("same size"));
            worst_gap = worst_gap.max((r - eps * s.chi_gap.sqrt()).abs());
        }
        (
            worst_err <= 1e-12 && worst_gap <= 1e-10,
            format!("max error - eps^2 = {worst_err:.2e}, max |regret - identity| = {worst_gap:.2e}"),
        )
    })
}

/// Configuration used by the determinism check and the bundled example.
pub fn determinism_config() -> SweepConfig {
    SweepConfig {
        algorithms: vec![Algorithm::Bon, Algorithm::Itp, Algorithm::Reference],
        n_grid: vec![1, 4, 16, 64],
        beta_grid: vec![0.1, 1.0],
        replicates: 50,
        seed: 7,
        mode: Mode::MonteCarlo,
        ..SweepConfig::default()
    }
}

/// Sweep output is byte-identical across thread counts.
pub fn determinism() -> CriterionReport {
    timed(10, "determinism across thread counts", || {
        let inst = single_instance(vec![0.2, 0.3, 0.5], vec![0.9, 0.6, 0.1], vec![0.2, 0.8, 0.4]);
        let config = determinism_config();
        let sums: Vec<String> = [1usize, 4]
            .iter()
            .map(|&threads| {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .expect("thread pool");
                let records = pool.install(|| sweep_n(&inst, &config)).expect("valid config");
                checksum(&render_records(&records, Format::Csv).expect("nonempty"))
            })
            .collect();
        (
            sums[0] == sums[1],
            format!("checksums {} / {}", &sums[0][..16], &sums[1][..16]),
        )
    })
}
