//! Slow reference computations and random generators used by the checks.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Law of best-of-`n` by enumerating all `|Y|^n` tuples. Ties go to the
/// lowest response index.
pub fn enumerate_bon_law(weights: &[f64], rewards: &[f64], n: u32) -> Vec<f64> {
    let k = weights.len();
    let mut law = vec![0.0; k];
    let mut tuple = vec![0usize; n as usize];
    loop {
        let mut prob = 1.0;
        let mut best = tuple[0];
        for &y in &tuple {
            prob *= weights[y];
            if rewards[y] > rewards[best] || (rewards[y] == rewards[best] && y < best) {
                best = y;
            }
        }
        law[best] += prob;
        let mut pos = 0;
        loop {
            if pos == tuple.len() {
                return law;
            }
            tuple[pos] += 1;
            if tuple[pos] < k {
                break;
            }
            tuple[pos] = 0;
            pos += 1;
        }
    }
}

/// Empirical normalizer by bisection over `[min - beta, max - beta]`, with
/// the mass function evaluated through sorted prefix sums.
pub fn bisect_empirical_normalizer(rewards: &[f64], beta: f64) -> f64 {
    let mut sorted = rewards.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut suffix = vec![0.0; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + sorted[i];
    }
    let phi = |lambda: f64| {
        let k = sorted.partition_point(|&r| r <= lambda);
        (suffix[k] - lambda * (n - k) as f64) / (n as f64 * beta)
    };
    let (mut lo, mut hi) = (sorted[0] - beta, sorted[n - 1] - beta);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if phi(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Uniform draw from the simplex, optionally with some entries zeroed.
pub fn random_simplex(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    w
}

/// Rewards in `[0, 1]`, sometimes drawn from a coarse grid to force ties.
pub fn random_rewards(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    if rng.random_bool(0.3) {
        (0..k).map(|_| rng.random_range(0..5) as f64 / 4.0).collect()
    } else {
        (0..k).map(|_| rng.random::<f64>()).collect()
    }
}

/// Log-uniform draw on `[lo, hi]`.
pub fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}
