use infer_align::algorithms::{compute_norm_constant_empirical, compute_norm_constant_weighted, phi_empirical, phi_weighted};
use infer_align::divergences::{coverage_inf, coverage_l1, e_m_divergence, m_star, tv_distance};
use infer_align::exact::{bon_law, chi2_objective, exact_chi2_policy, exact_rejection_law};
use infer_align::experiments::{Algorithm, ExperimentRecord};
use infer_align::instances::{build_tabular_instance, DiscreteDistribution, ProblemInstance, TabularSpec};
use infer_align::io::{fmt_sig17, parse_instance_str, read_records_csv, read_records_json, render_instance, render_records, Format};
use infer_align::oracle::OracleSession;
use infer_align::verify::oracle::enumerate_bon_law;
use proptest::prelude::*;

fn simplex(k: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, k).prop_map(|w| {
        let s: f64 = w.iter().sum();
        w.into_iter().map(|x| x / s).collect()
    })
}

/// Rewards in `[0, 1]`, half the time on a coarse grid so ties occur.
fn rewards(k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop_oneof![
        prop::collection::vec(0.0f64..=1.0, k),
        prop::collection::vec((0u8..4).prop_map(|v| v as f64 / 3.0), k),
    ]
}

fn pair(k: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    simplex(k).prop_flat_map(|w| {
        let k = w.len();
        (Just(w), rewards(k))
    })
}

fn dist(w: &[f64]) -> DiscreteDistribution {
    DiscreteDistribution::new(w.to_vec()).unwrap()
}

fn instance(w: &[f64], r: &[f64]) -> ProblemInstance {
    build_tabular_instance(&TabularSpec::single(w.to_vec(), r.to_vec(), r.to_vec(), 1.0)).unwrap()
}

fn same_len_simplices(n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (2usize..=6).prop_flat_map(move |k| prop::collection::vec(simplex(k..=k), n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn tv_is_a_bounded_metric(ps in same_len_simplices(3)) {
        let (a, b, c) = (dist(&ps[0]), dist(&ps[1]), dist(&ps[2]));
        let ab = tv_distance(&a, &b).unwrap();
        prop_assert!((0.0..=1.0 + 1e-15).contains(&ab));
        prop_assert_eq!(ab, tv_distance(&b, &a).unwrap());
        prop_assert_eq!(tv_distance(&a, &a).unwrap(), 0.0);
        let via = tv_distance(&a, &c).unwrap() + tv_distance(&c, &b).unwrap();
        prop_assert!(ab <= via + 1e-12);
    }

    #[test]
    fn e_m_is_nonincreasing_and_vanishes_at_c_inf(ps in same_len_simplices(2), m1 in 0.0f64..10.0, dm in 0.0f64..10.0) {
        let (pi, pi_ref) = (dist(&ps[0]), dist(&ps[1]));
        let (lo, hi) = (e_m_divergence(&pi, &pi_ref, m1), e_m_divergence(&pi, &pi_ref, m1 + dm));
        prop_assert!(hi <= lo + 1e-15);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&lo));
        let c_inf = coverage_inf(&pi, &pi_ref).unwrap();
        prop_assert!(e_m_divergence(&pi, &pi_ref, c_inf) <= 1e-12);
    }

    #[test]
    fn coverage_ordering(ps in same_len_simplices(2)) {
        let (pi, pi_ref) = (dist(&ps[0]), dist(&ps[1]));
        let c1 = coverage_l1(&pi, &pi_ref).unwrap();
        let ci = coverage_inf(&pi, &pi_ref).unwrap();
        prop_assert!(c1 >= 1.0 - 1e-12);
        prop_assert!(ci >= c1 - 1e-12);
    }

    #[test]
    fn m_star_meets_its_budget(ps in same_len_simplices(2), eps in 0.001f64..1.0) {
        let (pi, pi_ref) = (dist(&ps[0]), dist(&ps[1]));
        let m = m_star(&pi, &pi_ref, eps);
        prop_assert!(m.is_finite());
        prop_assert!(e_m_divergence(&pi, &pi_ref, m) <= eps + 1e-12);
        if m > 1.0 + 1e-9 {
            prop_assert!(e_m_divergence(&pi, &pi_ref, m * (1.0 - 1e-6)) > eps - 1e-12);
        }
    }

    #[test]
    fn empirical_normalizer_solves_and_brackets(r in prop::collection::vec(0.0f64..=1.0, 1..200), beta in 0.001f64..10.0) {
        let lambda = compute_norm_constant_empirical(&r, beta).unwrap();
        prop_assert!((phi_empirical(&r, beta, lambda) - 1.0).abs() <= 1e-9);
        let lo = r.iter().copied().fold(f64::INFINITY, f64::min) - beta;
        let hi = r.iter().copied().fold(f64::NEG_INFINITY, f64::max) - beta / r.len() as f64;
        prop_assert!(lambda >= lo - 1e-12 && lambda <= hi + 1e-12);
    }

    #[test]
    fn normalizer_responds_monotonically(r in prop::collection::vec(0.0f64..=1.0, 1..50), beta in 0.01f64..5.0, i in any::<prop::sample::Index>(), bump in 0.0f64..1.0, shift in -3.0f64..3.0) {
        let base = compute_norm_constant_empirical(&r, beta).unwrap();
        let mut up = r.clone();
        up[i.index(r.len())] += bump;
        prop_assert!(compute_norm_constant_empirical(&up, beta).unwrap() >= base - 1e-12);
        let moved: Vec<f64> = r.iter().map(|x| x + shift).collect();
        let shifted = compute_norm_constant_empirical(&moved, beta).unwrap();
        prop_assert!((shifted - base - shift).abs() <= 1e-9);
    }

    #[test]
    fn weighted_normalizer_matches_mass((w, r) in pair(1..=8), beta in 0.001f64..10.0) {
        let lambda = compute_norm_constant_weighted(&r, &dist(&w), beta).unwrap();
        prop_assert!((phi_weighted(&r, &w, beta, lambda) - 1.0).abs() <= 1e-9);
        prop_assert!(lambda >= -beta - 1e-12 && lambda <= 1.0 - beta + 1e-12);
    }

    #[test]
    fn chi2_policy_beats_simple_competitors((w, r) in pair(1..=8), beta in 0.01f64..10.0) {
        let sol = exact_chi2_policy(&instance(&w, &r), 0, beta).unwrap();
        prop_assert!((sol.policy.mass() - 1.0).abs() <= 1e-12);
        prop_assert!(sol.objective_value >= chi2_objective(&w, &r, beta, &w) - 1e-12);
        for y in 0..w.len() {
            let point = DiscreteDistribution::point_mass(w.len(), y);
            prop_assert!(sol.objective_value >= chi2_objective(&w, &r, beta, point.weights()) - 1e-12);
            if sol.policy.get(y) > 0.0 {
                prop_assert!(r[y] > sol.lambda);
            }
        }
    }

    #[test]
    fn bon_law_matches_enumeration((w, r) in pair(1..=4), n in 1u32..=4) {
        let law = bon_law(&w, &r, n as u64);
        let brute = enumerate_bon_law(&w, &r, n);
        for (a, b) in law.iter().zip(&brute) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn bon_reward_improves_with_n((w, r) in pair(1..=8), n in 1u64..200) {
        let mean = |law: &[f64]| law.iter().zip(&r).map(|(p, x)| p * x).sum::<f64>();
        let a = bon_law(&w, &r, n);
        let b = bon_law(&w, &r, n + 1);
        prop_assert!((a.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(mean(&b) >= mean(&a) - 1e-12);
        if n == 1 {
            for (p, q) in a.iter().zip(&w) {
                prop_assert!((p - q).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn rejection_law_is_a_distribution(ps in same_len_simplices(2), m in 1.0f64..50.0, n in 1u64..100) {
        let (pi, pi_ref) = (dist(&ps[0]), dist(&ps[1]));
        let law = exact_rejection_law(&pi, &pi_ref, m, n).unwrap();
        prop_assert!((law.law.mass() - 1.0).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&law.fallback_probability));
        if m >= coverage_inf(&pi, &pi_ref).unwrap() {
            let tv = tv_distance(&pi, &law.law).unwrap();
            prop_assert!(tv <= law.fallback_probability + 1e-12);
        }
    }

    #[test]
    fn sessions_replay_from_seed((w, r) in pair(1..=6), seed in any::<u64>()) {
        let inst = instance(&w, &r);
        let mut a = OracleSession::new(&inst, 0, seed);
        let mut b = OracleSession::new(&inst, 0, seed);
        prop_assert_eq!(a.draw_batch(32), b.draw_batch(32));
        prop_assert_eq!(a.queries_used(), 32);
    }

    #[test]
    fn sig17_round_trips(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(fmt_sig17(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn records_round_trip(rows in prop::collection::vec((0u8..3, 1u64..1000, prop::option::of(0.001f64..100.0), 0u64..50, any::<u64>(), -1.0f64..1.0, 0.0f64..1.0), 1..20)) {
        let mut recs: Vec<ExperimentRecord> = rows
            .into_iter()
            .enumerate()
            .map(|(i, (a, n, beta, rep, seed, x, y))| ExperimentRecord {
                algorithm: [Algorithm::Reference, Algorithm::Bon, Algorithm::Itp][a as usize],
                n,
                beta,
                replicate: rep * 100 + i as u64,
                seed,
                true_reward: y,
                modeled_reward: y * y,
                regret: x,
                queries_used: n + 1,
                fallback_rate: y,
                acceptance_step: None,
            })
            .collect();
        infer_align::io::sort_records(&mut recs);
        let csv = String::from_utf8(render_records(&recs, Format::Csv).unwrap()).unwrap();
        prop_assert_eq!(&read_records_csv(&csv).unwrap(), &recs);
        let json = String::from_utf8(render_records(&recs, Format::Json).unwrap()).unwrap();
        prop_assert_eq!(&read_records_json(&json).unwrap(), &recs);
    }

    #[test]
    fn instance_files_round_trip((w, r) in pair(1..=6)) {
        let inst = instance(&w, &r);
        prop_assert_eq!(parse_instance_str(&render_instance(&inst), "t").unwrap(), inst);
    }
}
