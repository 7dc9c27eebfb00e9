use chung_lil::analytic::small_ball_sup;
use chung_lil::montecarlo::{estimate_small_dev, truncation_stats, DistributionSpec, McConfig};
use chung_lil::weights::{phi, EpsilonSchedule};
use proptest::prelude::*;

fn dist_strategy() -> impl Strategy<Value = DistributionSpec> {
    prop_oneof![
        Just(DistributionSpec::Rademacher),
        Just(DistributionSpec::StdNormal),
        (0.1f64..5.0).prop_map(|w| DistributionSpec::CenteredUniform { half_width: w }),
        (1.5f64..20.0).prop_map(DistributionSpec::two_point_unit),
        Just(DistributionSpec::AtomsDoublyExp { c: 1.0, k_max: 3 }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn estimates_are_valid_and_thread_independent(
        dist in dist_strategy(),
        n in 2u64..3_000,
        eps in 0.0f64..2.5,
        tau in 0.0f64..1.0,
        seed in any::<u64>(),
        threads in 2usize..5,
    ) {
        let sched = EpsilonSchedule::tau_over_loglog(tau);
        let one = estimate_small_dev(&dist, n, eps, sched, &McConfig::new(300, seed), None).unwrap();
        let many = estimate_small_dev(&dist, n, eps, sched, &McConfig::new(300, seed).with_threads(threads), None).unwrap();
        prop_assert_eq!(one.p_hat.to_bits(), many.p_hat.to_bits());
        prop_assert!((0.0..=1.0).contains(&one.p_hat));
        let se = (one.p_hat * (1.0 - one.p_hat) / 300.0).sqrt();
        prop_assert_eq!(one.stderr, se);
        let level = eps + sched.offset(n);
        prop_assert!((one.threshold - dist.sigma() * phi(n) * level).abs() <= 1e-12 * one.threshold.max(1.0));
    }

    #[test]
    fn larger_barrier_never_hurts(n in 2u64..2_000, eps in 0.1f64..1.5, seed in any::<u64>()) {
        let cfg = McConfig::new(200, seed);
        let z = EpsilonSchedule::zero();
        let lo = estimate_small_dev(&DistributionSpec::Rademacher, n, eps, z, &cfg, None).unwrap();
        let hi = estimate_small_dev(&DistributionSpec::Rademacher, n, eps * 1.3, z, &cfg, None).unwrap();
        prop_assert!(hi.successes >= lo.successes);
        prop_assert!(hi.reference >= lo.reference);
    }

    #[test]
    fn truncation_invariants(dist in dist_strategy(), n in 1u64..200, p in 0.01f64..0.49, seed in any::<u64>()) {
        let s = truncation_stats(&dist, n, p, &McConfig::new(8, seed)).unwrap();
        prop_assert!(s.threshold > 0.0);
        prop_assert!(s.b_n >= 0.0 && s.b_n <= n as f64 * dist.variance() * (1.0 + 1e-12));
        prop_assert!(s.delta_quantiles.min >= 0.0);
        if dist.support_bound().is_some_and(|b| s.threshold >= b) {
            prop_assert!((s.b_n_over_n_sigma2 - 1.0).abs() < 1e-12);
            prop_assert_eq!(s.delta_quantiles.max, 0.0);
        }
    }
}

#[test]
fn reference_is_brownian_small_ball() {
    let n = 10_000;
    let e = estimate_small_dev(&DistributionSpec::StdNormal, n, 0.8, EpsilonSchedule::zero(), &McConfig::new(100, 0), None)
        .unwrap();
    let x = 0.8 * phi(n) / (n as f64).sqrt();
    assert_eq!(e.reference, small_ball_sup(x, 1e-12).unwrap().value);
}

#[test]
fn oracle_agreement_normal_walk() {
    // Donsker gap budget: 3 stderr plus 0.01 at n = 1e5
    let n = 100_000u64;
    let cfg = McConfig::new(100_000, 99).with_threads(std::thread::available_parallelism().map_or(1, |v| v.get()));
    for eps in [0.8, 1.0, 1.4] {
        let e = estimate_small_dev(&DistributionSpec::StdNormal, n, eps, EpsilonSchedule::zero(), &cfg, None).unwrap();
        assert!((e.p_hat - e.reference).abs() <= 3.0 * e.stderr + 0.01, "ε = {eps}: {} vs {}", e.p_hat, e.reference);
    }
}
