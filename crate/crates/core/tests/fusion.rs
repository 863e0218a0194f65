mod common;

use coopsense::detector::Hypothesis;
use coopsense::fusion::{
    apply_reporting_errors, coop_qf, coop_qm, optimize_vote_count, reported_probability,
    total_error, total_error_over_noise_states, vote, CooperativeRates, FusionConfig, NoiseState,
    VoteConvention,
};
use coopsense::specfun::Probability;
use coopsense::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

fn p(v: f64) -> Probability {
    Probability::new(v).unwrap()
}

const GRID: [f64; 5] = [0.01, 0.1, 0.35, 0.7, 0.99];

#[test]
fn binomial_tails_match_enumeration() {
    for k in 1..=10usize {
        for &pf in &GRID {
            for &pd in &GRID {
                for n in 1..=k {
                    let qf = coop_qf(k, n, p(pf)).unwrap().value();
                    let qm = coop_qm(k, n, p(pd)).unwrap().value();
                    assert!((qf - common::enumerate_at_least(&vec![pf; k], n)).abs() < 1e-12);
                    assert!(
                        (qm - (1.0 - common::enumerate_at_least(&vec![pd; k], n))).abs() < 1e-12
                    );
                }
            }
        }
    }
}

#[test]
fn optimum_matches_enumerated_scan() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(41);
    for _ in 0..200 {
        let k = rng.random_range(1..=10);
        let (pf, pd, a) = (
            rng.random::<f64>(),
            rng.random::<f64>(),
            rng.random::<f64>(),
        );
        let errors: Vec<f64> = (1..=k)
            .map(|n| {
                a * common::enumerate_at_least(&vec![pf; k], n)
                    + (1.0 - a) * (1.0 - common::enumerate_at_least(&vec![pd; k], n))
            })
            .collect();
        let best = errors.iter().cloned().fold(f64::INFINITY, f64::min);
        let opt = optimize_vote_count(k, p(pf), p(pd), p(a)).unwrap();
        assert!((opt.total_error - best).abs() < 1e-12);
        assert!((errors[opt.votes - 1] - best).abs() < 1e-12);
        assert_eq!(opt.n_star, k - opt.votes);
    }
}

#[test]
fn simulated_fusion_matches_closed_form() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(42);
    let (k, n, pd, q) = (6, 3, 0.4, 0.05);
    let trials = 1_000_000u64;
    let mut fused = 0u64;
    for _ in 0..trials {
        let local: Vec<Hypothesis> = (0..k)
            .map(|_| {
                if rng.random::<f64>() < pd {
                    Hypothesis::H1
                } else {
                    Hypothesis::H0
                }
            })
            .collect();
        let reported = apply_reporting_errors(&local, p(q), &mut rng);
        if vote(&reported, n).unwrap().is_present() {
            fused += 1;
        }
    }
    let want = 1.0
        - coop_qm(k, n, reported_probability(p(pd), p(q)))
            .unwrap()
            .value();
    let se = (want * (1.0 - want) / trials as f64).sqrt();
    assert!((fused as f64 / trials as f64 - want).abs() < 4.0 * se);
}

#[test]
fn convention_and_validation() {
    let cfg =
        FusionConfig::with_convention(6, 5, VoteConvention::Complement, p(0.5), p(0.0)).unwrap();
    assert_eq!((cfg.votes, cfg.n_star()), (1, 5));
    assert!(
        FusionConfig::with_convention(6, 6, VoteConvention::Complement, p(0.5), p(0.0)).is_err()
    );
    assert!(
        FusionConfig::with_convention(6, 7, VoteConvention::Threshold, p(0.5), p(0.0)).is_err()
    );
    assert!(
        FusionConfig::with_convention(6, 2, VoteConvention::Threshold, p(0.5), p(0.6)).is_err()
    );
    assert!(coop_qf(3, 0, p(0.1)).is_err());
    assert!(coop_qm(3, 4, p(0.1)).is_err());
}

#[test]
fn noise_state_weights_must_normalize() {
    let s = |w0, w1| NoiseState {
        weight_h0: w0,
        weight_h1: w1,
        qf: p(0.2),
        qm: p(0.4),
    };
    let ok = total_error_over_noise_states(p(0.25), &[s(0.5, 0.3), s(0.5, 0.7)]).unwrap();
    assert!((ok - (0.25 * 0.2 + 0.75 * 0.4)).abs() < 1e-15);
    assert!(matches!(
        total_error_over_noise_states(p(0.5), &[s(0.5, 0.5), s(0.4, 0.5)]),
        Err(Error::Normalization { which: "H0", .. })
    ));
    assert!(matches!(
        total_error_over_noise_states(p(0.5), &[s(0.5, 0.5), s(0.5, 0.6)]),
        Err(Error::Normalization { which: "H1", .. })
    ));
}

#[test]
fn perfect_reporting_leaves_rates_unchanged() {
    let fusion = FusionConfig {
        sus: 7,
        votes: 3,
        prior_h0: p(0.4),
        report_error: p(0.0),
    };
    let r = CooperativeRates::for_rule(&fusion, p(0.05), p(0.8)).unwrap();
    assert_eq!(r.qf, coop_qf(7, 3, p(0.05)).unwrap());
    assert_eq!(r.qm, coop_qm(7, 3, p(0.8)).unwrap());
    let noisy = CooperativeRates::for_rule(
        &FusionConfig {
            report_error: p(0.001),
            ..fusion
        },
        p(0.05),
        p(0.8),
    )
    .unwrap();
    assert!(noisy.qf.value() > r.qf.value());
    assert!(noisy.qm.value() > r.qm.value());
}

proptest! {
    #[test]
    fn tails_are_complementary(k in 1usize..40, n in 1usize..40, pr in 0.0f64..=1.0) {
        prop_assume!(n <= k);
        let a = coop_qf(k, n, p(pr)).unwrap().value();
        let b = coop_qf(k, k - n + 1, p(1.0 - pr)).unwrap().value();
        prop_assert!((a + b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tails_are_monotone(k in 1usize..40, n in 1usize..40, pr in 0.0f64..0.99, d in 0.0f64..0.01) {
        prop_assume!(n <= k);
        let q = coop_qf(k, n, p(pr)).unwrap().value();
        prop_assert!(coop_qf(k, n, p(pr + d)).unwrap().value() >= q - 1e-14);
        if n < k {
            prop_assert!(coop_qf(k, n + 1, p(pr)).unwrap().value() <= q + 1e-14);
        }
        let m = coop_qm(k, n, p(pr)).unwrap().value();
        prop_assert!(coop_qm(k, n, p(pr + d)).unwrap().value() <= m + 1e-14);
    }

    #[test]
    fn total_error_is_a_convex_combination(a in 0.0f64..=1.0, qf in 0.0f64..=1.0, qm in 0.0f64..=1.0) {
        let e = total_error(p(a), p(qf), p(qm));
        prop_assert!(e >= qf.min(qm) - 1e-15 && e <= qf.max(qm) + 1e-15);
    }
}
