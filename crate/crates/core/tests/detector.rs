mod common;

use coopsense::detector::{
    analytic_pd, analytic_pd_gaussian_signal, analytic_pf, decide, energy_statistic,
    pdf_normalized, pf_pm_from_pdf, DetectorConfig, Hypothesis,
};
use coopsense::noise_model::generate_noise;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_distr::{Distribution, Exp};
use rand_xoshiro::Xoshiro256PlusPlus;

fn standard_errors(hits: u64, n: u64, p: f64) -> f64 {
    (hits as f64 / n as f64 - p).abs() / (p * (1.0 - p) / n as f64).sqrt()
}

#[test]
fn simulated_noise_energy_matches_false_alarm_closed_form() {
    let cfg = DetectorConfig {
        samples: 5,
        time_bandwidth: 5.0,
        gamma: 12.0,
        channel_gain: 1.0,
        signal_variance: 0.0,
    };
    let thr = cfg.per_sample_threshold();
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(21);
    let n = 200_000u64;
    let hits = (0..n)
        .filter(|_| {
            let y = generate_noise(2.0, cfg.samples, &mut rng).unwrap();
            decide(energy_statistic(&y, 2.0).unwrap(), thr).is_present()
        })
        .count() as u64;
    let pf = analytic_pf(5.0, 12.0).unwrap().value();
    assert!(standard_errors(hits, n, pf) < 4.0);
}

#[test]
fn exponential_model_matches_simulation() {
    let (w, snr, gamma) = (1.3, 0.8, 1.7);
    let (pf, pm) = pf_pm_from_pdf(gamma, w, snr).unwrap();
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(22);
    let n = 200_000u64;
    let h0 = Exp::new(1.0 / w).unwrap();
    let h1 = Exp::new(1.0 / (w * (1.0 + snr))).unwrap();
    let fa = (0..n).filter(|_| h0.sample(&mut rng) >= gamma).count() as u64;
    let miss = (0..n).filter(|_| h1.sample(&mut rng) < gamma).count() as u64;
    assert!(standard_errors(fa, n, pf.value()) < 4.0);
    assert!(standard_errors(miss, n, pm.value()) < 4.0);
}

#[test]
fn exponential_densities_normalize() {
    for (w, snr) in [(0.5, 0.0), (1.0, 0.1), (2.0, 3.0)] {
        for hyp in [Hypothesis::H0, Hypothesis::H1] {
            let f = |y: f64| pdf_normalized(y, w, snr, hyp).unwrap();
            let top = 60.0 * w * (1.0 + snr);
            let total = common::integrate(&f, 0.0, top, 200);
            assert!((total - 1.0).abs() < 1e-8, "{w} {snr} {hyp:?}: {total}");
        }
    }
}

#[test]
fn density_integral_matches_closed_form_rates() {
    let (w, snr, gamma) = (1.1, 0.4, 2.0);
    let (pf, pm) = pf_pm_from_pdf(gamma, w, snr).unwrap();
    let top = 80.0 * w * (1.0 + snr);
    let tail = common::integrate(
        &|y| pdf_normalized(y, w, snr, Hypothesis::H0).unwrap(),
        gamma,
        top,
        200,
    );
    let head = common::integrate(
        &|y| pdf_normalized(y, w, snr, Hypothesis::H1).unwrap(),
        0.0,
        gamma,
        50,
    );
    assert!((tail - pf.value()).abs() < 1e-10);
    assert!((head - pm.value()).abs() < 1e-10);
}

#[test]
fn paper_operating_point() {
    let pf = analytic_pf(5.0, 30.0).unwrap().value();
    let pd = analytic_pd(5.0, 0.5, 30.0).unwrap().value();
    assert!((pf - 0.000856641210775300).abs() < 1e-14);
    assert!((pd - 0.00224445592815112).abs() < 1e-13);
}

proptest! {
    #[test]
    fn detection_dominates_false_alarm(u in 1.0f64..200.0, snr in 0.0f64..50.0, gamma in 0.0f64..500.0) {
        let pf = analytic_pf(u, gamma).unwrap().value();
        prop_assert!(analytic_pd(u, snr, gamma).unwrap().value() >= pf - 1e-14);
        prop_assert!(analytic_pd_gaussian_signal(u, snr, gamma).unwrap().value() >= pf - 1e-14);
    }

    #[test]
    fn detection_is_monotone(u in 1.0f64..100.0, snr in 0.0f64..20.0, gamma in 0.0f64..300.0, d in 0.01f64..5.0) {
        let pd = analytic_pd(u, snr, gamma).unwrap().value();
        prop_assert!(analytic_pd(u, snr + d, gamma).unwrap().value() >= pd - 1e-14);
        prop_assert!(analytic_pd(u, snr, gamma + d).unwrap().value() <= pd + 1e-14);
        let pf = analytic_pf(u, gamma).unwrap().value();
        prop_assert!(analytic_pf(u, gamma + d).unwrap().value() <= pf + 1e-14);
    }

    #[test]
    fn statistic_scales_inversely_with_variance(v in 0.01f64..10.0, seed in any::<u64>()) {
        let y = generate_noise(1.0, 16, &mut Xoshiro256PlusPlus::seed_from_u64(seed)).unwrap();
        let a = energy_statistic(&y, v).unwrap().value();
        let b = energy_statistic(&y, 2.0 * v).unwrap().value();
        prop_assert!((a - 2.0 * b).abs() <= 1e-12 * a.max(1.0));
    }
}
