//! Seeded Monte Carlo checks of the samplers and the statistics toolkit.
//!
//! Seeds are fixed up front; each test uses its own.

use rbs_core::stats::{
    balance_report, covariance_summary, coverage_probe, ks_uniformity, ks_uniformity_rows,
    variance_reduction_experiment, variance_reduction_experiment_with,
};
use rbs_core::{Density, Method, SampleBatch, SamplerConfig, SeededGenerator};

const DRAWS: usize = 100_000;

fn batch(n: usize, method: Method, seed: u64, count: usize) -> SampleBatch {
    SampleBatch::generate(&SamplerConfig::new(n, method, seed), count).unwrap()
}

fn assert_uniform_marginals(b: &SampleBatch) {
    for k in 0..b.config.n {
        let r = ks_uniformity(b, k).unwrap();
        assert!(
            r.passes(0.01),
            "n={} {:?} coordinate {k}: D={} p={}",
            b.config.n,
            b.config.method,
            r.statistic,
            r.p_value
        );
    }
}

#[test]
fn ks_rejects_at_the_nominal_rate_under_uniformity() {
    let mut g = SeededGenerator::new(11);
    let reps = 10_000;
    let mut rejections = 0;
    for _ in 0..reps {
        let rows: Vec<[f64; 1]> = (0..200).map(|_| [g.uniform()]).collect();
        if !ks_uniformity_rows(&rows, 0).unwrap().passes(0.01) {
            rejections += 1;
        }
    }
    let rate = rejections as f64 / reps as f64;
    assert!((0.005..=0.015).contains(&rate), "rejection rate {rate}");
}

#[test]
fn pair_degenerate_sampler_is_antithetic() {
    let b = batch(2, Method::Degenerate, 21, DRAWS);
    assert_uniform_marginals(&b);
    let c = covariance_summary(&b).unwrap();
    assert!((c.covariance[0][1] + 1.0 / 3.0).abs() <= 3.0 * c.standard_errors[0][1] + 1e-12);
}

#[test]
fn even_degenerate_m2() {
    let b = batch(4, Method::Degenerate, 22, DRAWS);
    assert_uniform_marginals(&b);
    let c = covariance_summary(&b).unwrap();
    assert!(
        (c.covariance[0][2] + 1.0 / 3.0).abs() <= 3.0 * c.standard_errors[0][2] + 1e-12,
        "cov(X1, X3) = {}",
        c.covariance[0][2]
    );
}

#[test]
fn odd_degenerate_m2() {
    assert_uniform_marginals(&batch(5, Method::Degenerate, 23, DRAWS));
}

#[test]
fn odd_redistributed_m2() {
    let b = batch(5, Method::Redistributed, 24, DRAWS);
    assert_uniform_marginals(&b);
    assert!(balance_report(&b).unwrap().max_abs_sum <= 1e-12 * 5.0);
}

#[test]
fn even_redistributed_m3() {
    assert_uniform_marginals(&batch(6, Method::Redistributed, 25, DRAWS));
}

#[test]
fn symmetrized_n4_reaches_the_minimal_covariance() {
    let b = batch(4, Method::Symmetrized, 26, DRAWS);
    assert_uniform_marginals(&b);
    let c = covariance_summary(&b).unwrap();
    assert!((c.alpha_target + 1.0 / 9.0).abs() < 1e-15);
    assert!(c.pairs_off_target(3.0).is_empty(), "{:?}", c.covariance);
    assert!(c.sum_identity_within(3.0));
}

#[test]
fn odd_redistributed_sum_identity() {
    let c = covariance_summary(&batch(7, Method::Redistributed, 27, DRAWS)).unwrap();
    assert!(
        c.sum_identity_within(3.0),
        "{} vs {} (se {})",
        c.sum_identity_hat,
        c.sum_identity_target,
        c.sum_identity_se
    );
}

#[test]
fn gr_model_is_balanced_uniform_for_three_and_four() {
    for (n, seed) in [(3usize, 28u64), (4, 29)] {
        let config = SamplerConfig::new(n, Method::GrModel, seed).with_density(Density::natural(n));
        let b = SampleBatch::generate(&config, 1_000_000).unwrap();
        assert_uniform_marginals(&b);
    }
}

#[test]
fn unsymmetrized_even_samples_stay_in_the_image() {
    let cfg = SamplerConfig::new(8, Method::Redistributed, 31);
    let r = coverage_probe(&cfg, 4, DRAWS).unwrap();
    assert_eq!(r.l_image_violation_fraction, Some(0.0));
}

#[test]
fn symmetrized_n8_leaves_the_image() {
    let cfg = SamplerConfig::new(8, Method::Symmetrized, 32);
    let r = coverage_probe(&cfg, 4, DRAWS).unwrap();
    assert!(r.l_image_violation_fraction.unwrap() > 0.0);
}

#[test]
fn symmetrized_n5_fills_the_interior() {
    let cfg = SamplerConfig::new(5, Method::Symmetrized, 33);
    let r = coverage_probe(&cfg, 4, 1_000_000).unwrap();
    assert!(r.interior_cells > 0);
    assert!(
        r.interior_unoccupied.is_empty(),
        "{:?}",
        r.interior_unoccupied
    );
}

#[test]
fn redistributed_n4_fills_the_interior() {
    let cfg = SamplerConfig::new(4, Method::Redistributed, 34);
    let r = coverage_probe(&cfg, 4, DRAWS).unwrap();
    assert!(
        r.interior_unoccupied.is_empty(),
        "{:?}",
        r.interior_unoccupied
    );
}

#[test]
fn balanced_sampling_reduces_variance_of_a_quadratic() {
    let v = variance_reduction_experiment_with(
        &[0.0, 1.0, 1.0],
        4,
        10_000,
        &SeededGenerator::new(35),
        Method::Symmetrized,
    )
    .unwrap();
    assert!(v.var_rbs < v.var_iid, "{} vs {}", v.var_rbs, v.var_iid);
}

#[test]
fn linear_and_constant_functions_are_exact() {
    let g = SeededGenerator::new(36);
    let v = variance_reduction_experiment(&[0.0, 7.0], 6, 10_000, &g).unwrap();
    assert!(v.mean_rbs.abs() <= 1e-12 && v.max_abs_rbs <= 1e-12);
    assert!(v.var_rbs <= 1e-24);
    let v = variance_reduction_experiment(&[5.0], 6, 1_000, &g).unwrap();
    assert_eq!((v.var_iid, v.var_rbs), (0.0, 0.0));
}
