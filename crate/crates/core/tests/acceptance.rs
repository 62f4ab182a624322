//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.
//!
//! Every seed is a fixed constant below. Set `RBS_SWEEP_MAX=250` to extend the
//! Gerow-Robson sweep beyond the default upper limit of 60.

use std::process::ExitCode;
use std::time::Instant;

use num_traits::{One, Zero};
use rayon::prelude::*;
use rbs_core::exact::{int, rat, RationalFunction, RationalPolynomial};
use rbs_core::geometry::{
    apply_permutation, balanced_greedy_order, balanced_order_odd, odd_order_sums, prefix_sums,
};
use rbs_core::gr_analysis::{
    big_c, gr_model_marginal_cdf, laplace_transfer, phi, phi_integral, pn_prime_poly,
    polytope_volume, sturm_root_count, verify_no_gr_density, Verdict,
};
use rbs_core::samplers::{invert_even, invert_odd, redistributed_even_map, redistributed_odd_map};
use rbs_core::stats::{
    balance_report, covariance_summary, coverage_probe, ks_uniformity,
    variance_reduction_experiment_with,
};
use rbs_core::{
    BalancedVector, Density, Method, SampleBatch, SamplerConfig, SeededGenerator, Sign,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const SAMPLES: usize = 100_000;

/// Seed of criterion `criterion` for method slot `slot` at size `n`.
fn seed(criterion: u64, slot: u64, n: usize) -> u64 {
    criterion * 1_000_000 + slot * 1_000 + n as u64
}

/// Samplers that produce random balanced samples at size `n`, with their slot.
fn shipping_methods(n: usize) -> Vec<(u64, Method)> {
    let mut out = vec![(1, Method::Degenerate)];
    if n >= 4 {
        out.push((2, Method::Redistributed));
        out.push((3, Method::Symmetrized));
    }
    if n == 3 || n == 4 {
        out.push((4, Method::GrModel));
    }
    out
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let expected = [
        (
            3,
            Verdict::DensityExistsRobson,
            RationalFunction::new(
                RationalPolynomial::from_integers(&[3]),
                RationalPolynomial::from_integers(&[2, 1]),
            ),
        ),
        (
            4,
            Verdict::DensityExistsGerow,
            RationalFunction::new(
                RationalPolynomial::from_integers(&[4]),
                RationalPolynomial::from_integers(&[3, 1]),
            ),
        ),
        (
            5,
            Verdict::NoDensityProven,
            RationalFunction::new(
                RationalPolynomial::from_integers(&[230, 115]),
                RationalPolynomial::from_integers(&[192, 130, 23]),
            ),
        ),
    ];
    for (n, verdict, transfer) in expected {
        let transfer = transfer.map_err(|e| e.to_string())?;
        let report = verify_no_gr_density(n).map_err(|e| e.to_string())?;
        check(report.verdict == verdict, || {
            format!("n={n}: verdict {}", report.verdict.name())
        })?;
        let got = laplace_transfer(n).map_err(|e| e.to_string())?;
        check(got.same_function(&transfer), || {
            format!("n={n}: transfer {}/{}", got.numerator, got.denominator)
        })?;
    }
    let elapsed = start.elapsed().as_secs_f64();
    check(elapsed < 1.0, || format!("took {elapsed:.3}s"))?;
    Ok(format!("exact transfers for n=3,4,5 in {elapsed:.3}s"))
}

fn criterion_2() -> Outcome {
    let max: usize = std::env::var("RBS_SWEEP_MAX")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(60)
        .max(6);
    let start = Instant::now();
    let reports: Vec<_> = (6..=max)
        .into_par_iter()
        .map(|n| verify_no_gr_density(n).map_err(|e| format!("n={n}: {e}")))
        .collect::<Result<_, _>>()?;
    let sweep = start.elapsed().as_secs_f64();
    for r in &reports {
        let inside = r
            .a0_interval
            .as_ref()
            .is_some_and(|(lo, hi)| lo > &int(-3) && hi < &int(-2));
        check(
            r.distinct_real_root_count == r.degree
                && inside
                && r.sign_at_minus3 < 0
                && r.sign_at_minus2 > 0
                && r.verdict == Verdict::NoDensityProven,
            || format!("n={}: {} ({})", r.n, r.verdict.name(), r.reason),
        )?;
    }
    // Independent count of the real roots by a Sturm sequence.
    let start = Instant::now();
    let sturm_max = max.min(60);
    let counts: Vec<_> = (6..=sturm_max)
        .into_par_iter()
        .map(|n| sturm_root_count(n).map_err(|e| format!("n={n}: {e}")))
        .collect::<Result<_, _>>()?;
    for (r, (count, squarefree)) in reports.iter().zip(counts) {
        check(count == r.degree && squarefree, || {
            format!("n={}: Sturm counts {count} of {} roots", r.n, r.degree)
        })?;
    }
    let cross = start.elapsed().as_secs_f64();
    Ok(format!(
        "n=6..{max} no_density_proven in {sweep:.1}s; Sturm cross-check n=6..{sturm_max} in {cross:.1}s"
    ))
}

fn criterion_3() -> Outcome {
    let want = RationalPolynomial::from_coeffs(vec![rat(24, 23), int(0), rat(-3, 23)]);
    let got = pn_prime_poly(5).map_err(|e| e.to_string())?;
    check(got == want, || format!("P_5' = {got}"))?;
    let c = big_c(5).map_err(|e| e.to_string())?;
    check(c == rat(3, 23), || format!("C_5 = {c}"))?;
    Ok("P_5' = (24 - 3s^2)/23, C_5 = 3/23".into())
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    for n in 3..=60usize {
        let p = pn_prime_poly(n).map_err(|e| e.to_string())?;
        check(p.integrate(&int(0), &int(1)).is_one(), || {
            format!("n={n}: P_n' does not integrate to 1")
        })?;
        let w = int(n as i64 - 2);
        let total = phi_integral(n, &-w.clone(), &w).map_err(|e| e.to_string())?;
        check(total.is_one(), || {
            format!("n={n}: phi integrates to {total}")
        })?;
        let lhs = phi(n + 1, &int(1)).map_err(|e| e.to_string())?;
        let rhs = phi_integral(n, &int(0), &int(2)).map_err(|e| e.to_string())? / int(2);
        check(lhs == rhs, || {
            format!("n={n}: phi_(n+1)(1) = {lhs} != {rhs}")
        })?;
    }
    Ok(format!("n=3..60 in {:.2}s", start.elapsed().as_secs_f64()))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut tests = 0;
    let mut min_p = 1.0_f64;
    let mut failures = Vec::new();
    for n in 2..=12 {
        for (slot, method) in shipping_methods(n) {
            let config = SamplerConfig::new(n, method, seed(5, slot, n));
            let batch = SampleBatch::generate(&config, SAMPLES).map_err(|e| e.to_string())?;
            let balance = balance_report(&batch).map_err(|e| e.to_string())?;
            check(balance.max_abs_sum <= 1e-12 * n as f64, || {
                format!("n={n} {method}: max |sum| {:e}", balance.max_abs_sum)
            })?;
            for k in 0..n {
                let r = ks_uniformity(&batch, k).map_err(|e| e.to_string())?;
                tests += 1;
                min_p = min_p.min(r.p_value);
                if !r.passes(0.01) {
                    failures.push(format!("n={n} {method} x{}: p={:.4}", k + 1, r.p_value));
                }
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    check(failures.is_empty(), || {
        format!(
            "{} of {tests} KS tests below 0.01: {}",
            failures.len(),
            failures.join(", ")
        )
    })?;
    check(elapsed < 60.0, || format!("took {elapsed:.1}s"))?;
    Ok(format!(
        "{tests} KS tests, min p = {min_p:.4}, {elapsed:.1}s"
    ))
}

fn criterion_6() -> Outcome {
    let mut pairs = 0;
    let mut off = Vec::new();
    let mut identities = 0;
    for n in 2..=12 {
        for (slot, method) in shipping_methods(n) {
            let config = SamplerConfig::new(n, method, seed(6, slot, n));
            let batch = SampleBatch::generate(&config, SAMPLES).map_err(|e| e.to_string())?;
            let c = covariance_summary(&batch).map_err(|e| e.to_string())?;
            identities += 1;
            check(c.sum_identity_within(3.0), || {
                format!(
                    "n={n} {method}: sum identity {:.5} vs {:.5} (se {:.5})",
                    c.sum_identity_hat, c.sum_identity_target, c.sum_identity_se
                )
            })?;
            if method == Method::Symmetrized {
                pairs += n * (n - 1) / 2;
                for (k, j) in c.pairs_off_target(3.0) {
                    off.push(format!(
                        "n={n} ({},{}): {:.5} vs {:.5} (se {:.5})",
                        k + 1,
                        j + 1,
                        c.covariance[k][j],
                        c.alpha_target,
                        c.standard_errors[k][j]
                    ));
                }
            }
        }
    }
    check(off.is_empty(), || {
        format!(
            "{} of {pairs} pairs beyond 3 SE: {}",
            off.len(),
            off.join(", ")
        )
    })?;
    Ok(format!(
        "{pairs} symmetrized pairs within 3 SE, {identities} sum identities"
    ))
}

fn criterion_7() -> Outcome {
    let mut worst = 0.0_f64;
    let mut runs = 0;
    for (ci, c) in [-10.0, -6.5, -1.0, 0.25, 1.0, 3.7, 10.0]
        .into_iter()
        .enumerate()
    {
        for n in 2..=12 {
            for (slot, method) in shipping_methods(n) {
                let gen = SeededGenerator::new(seed(7, 10 * ci as u64 + slot, n));
                let v = variance_reduction_experiment_with(&[0.0, c], n, 10_000, &gen, method)
                    .map_err(|e| e.to_string())?;
                runs += 1;
                worst = worst.max(v.max_abs_rbs);
                check(v.max_abs_rbs <= 1e-12, || {
                    format!("C={c} n={n} {method}: max |mean| {:e}", v.max_abs_rbs)
                })?;
            }
        }
    }
    Ok(format!("{runs} runs x 10^4 trials, worst |mean| {worst:e}"))
}

fn small_target(gen: &mut SeededGenerator, n: usize, bound: f64) -> BalancedVector {
    let v: Vec<f64> = (0..n).map(|_| gen.uniform()).collect();
    let mean = v.iter().sum::<f64>() / n as f64;
    let mut y: Vec<f64> = v.iter().map(|c| c - mean).collect();
    let top = y.iter().fold(0.0_f64, |a, c| a.max(c.abs()));
    let scale = bound * gen.unit() / top;
    y.iter_mut().for_each(|c| *c *= scale);
    let s: f64 = y.iter().sum();
    y[0] -= s;
    BalancedVector::new(y).expect("small balanced target")
}

fn max_residual(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn criterion_8() -> Outcome {
    let mut gen = SeededGenerator::new(seed(8, 0, 0));
    let mut worst = 0.0_f64;
    for _ in 0..10_000 {
        let n = 2 * (2 + (gen.unit() * 6.0) as usize);
        let y = small_target(&mut gen, n, 0.999 / n as f64);
        let (x, t) = invert_even(&y).map_err(|e| e.to_string())?;
        let back = redistributed_even_map(&x, &t).map_err(|e| e.to_string())?;
        worst = worst.max(max_residual(back.coords(), y.coords()));
    }
    for _ in 0..10_000 {
        let m = 2 + (gen.unit() * 6.0) as usize;
        let y = small_target(&mut gen, 2 * m + 1, 0.999 / (2 * m) as f64);
        let b = gen.sign();
        let (x, t) = invert_odd(&y, b).map_err(|e| e.to_string())?;
        let back = redistributed_odd_map(&x, &t, b).map_err(|e| e.to_string())?;
        worst = worst.max(max_residual(back.coords(), y.coords()));
    }
    check(worst < 1e-12, || format!("worst residual {worst:e}"))?;
    Ok(format!("2 x 10^4 targets, worst residual {worst:e}"))
}

fn criterion_9() -> Outcome {
    let plain = SamplerConfig::new(8, Method::Redistributed, seed(9, 2, 8));
    let r = coverage_probe(&plain, 4, SAMPLES).map_err(|e| e.to_string())?;
    let plain_fraction = r.l_image_violation_fraction.unwrap_or(f64::NAN);
    check(plain_fraction == 0.0, || {
        format!("unsymmetrized violation fraction {plain_fraction}")
    })?;
    let sym = SamplerConfig::new(8, Method::Symmetrized, seed(9, 3, 8));
    let r = coverage_probe(&sym, 4, SAMPLES).map_err(|e| e.to_string())?;
    let sym_fraction = r.l_image_violation_fraction.unwrap_or(0.0);
    check(sym_fraction > 0.0, || {
        "symmetrized sampler never left the image".into()
    })?;
    Ok(format!(
        "unsymmetrized 0, symmetrized {sym_fraction:.4} (seed {})",
        sym.seed
    ))
}

fn criterion_10() -> Outcome {
    let n = 5;
    let g = Density::natural(n);
    let config = SamplerConfig::new(n, Method::GrModel, seed(10, 4, n)).with_density(g.clone());
    let count = 1_000_000;
    let batch = SampleBatch::generate(&config, count).map_err(|e| e.to_string())?;
    let mut min_p = 1.0_f64;
    for k in 0..n {
        min_p = min_p.min(ks_uniformity(&batch, k).map_err(|e| e.to_string())?.p_value);
    }
    check(min_p < 1e-4, || format!("smallest KS p-value {min_p:e}"))?;
    let oracle = gr_model_marginal_cdf(&g, n, 0.5).map_err(|e| e.to_string())?;
    let se = (oracle * (1.0 - oracle) / count as f64).sqrt();
    let mut worst = 0.0_f64;
    for k in 0..n {
        let hit = batch
            .vectors
            .iter()
            .filter(|v| v.coords()[k] <= 0.5)
            .count();
        let z = (hit as f64 / count as f64 - oracle).abs() / se;
        worst = worst.max(z);
        check(z <= 3.0, || {
            format!("x{}: CDF(0.5) is {z:.2} SE from {oracle:.5}", k + 1)
        })?;
    }
    Ok(format!(
        "min KS p {min_p:.1e}; oracle CDF(0.5) = {oracle:.5} (uniform 0.75), worst {worst:.2} SE"
    ))
}

fn boxed_balanced(gen: &mut SeededGenerator, n: usize) -> BalancedVector {
    let v: Vec<f64> = (0..n).map(|_| gen.uniform()).collect();
    let mean = v.iter().sum::<f64>() / n as f64;
    let mut y: Vec<f64> = v.iter().map(|c| c - mean).collect();
    let top = y.iter().fold(0.0_f64, |a, c| a.max(c.abs()));
    if top > 1.0 {
        y.iter_mut().for_each(|c| *c /= top);
    }
    let s: f64 = y.iter().sum();
    let k = (0..n)
        .min_by(|&a, &b| y[a].abs().total_cmp(&y[b].abs()))
        .unwrap_or(0);
    y[k] -= s;
    BalancedVector::new(y).expect("boxed balanced vector")
}

/// Alternates sampler draws with centered uniform vectors.
fn random_balanced(gen: &mut SeededGenerator, n: usize, i: usize) -> BalancedVector {
    if i.is_multiple_of(2) {
        let config = SamplerConfig::new(n, Method::Auto, gen.fork(i as u64).seed());
        rbs_core::Sampler::new(&config).expect("valid n").sample()
    } else {
        boxed_balanced(gen, n)
    }
}

fn criterion_11() -> Outcome {
    const SLACK: f64 = 1e-12;
    let mut gen = SeededGenerator::new(seed(11, 0, 0));
    let mut violations = 0;
    for i in 0..10_000 {
        let n = 2 + (gen.unit() * 14.0) as usize;
        let w = random_balanced(&mut gen, n, i);
        let perm = balanced_greedy_order(&w);
        let sums = prefix_sums(&apply_permutation(w.coords(), &perm));
        violations += sums.iter().filter(|s| s.abs() > 1.0 + SLACK).count();
    }
    for i in 0..10_000 {
        let n = 2 * (2 + (gen.unit() * 6.0) as usize) + 1;
        let w = random_balanced(&mut gen, n, i);
        let (perm, b): (Vec<usize>, Sign) = balanced_order_odd(&w).map_err(|e| e.to_string())?;
        let sums = odd_order_sums(&apply_permutation(w.coords(), &perm), b);
        violations += sums.iter().filter(|s| s.abs() > 1.0 + SLACK).count();
    }
    check(violations == 0, || {
        format!("{violations} partial sums outside [-1, 1]")
    })?;
    Ok("2 x 10^4 inputs, n up to 15, zero violations".into())
}

fn criterion_12() -> Outcome {
    let v2 = polytope_volume(3).map_err(|e| e.to_string())?;
    check(v2.rational == int(3) && v2.radicand == 3, || {
        format!("V_2 = {} sqrt({})", v2.rational, v2.radicand)
    })?;
    let v3 = polytope_volume(4).map_err(|e| e.to_string())?;
    check(v3.rational == rat(32, 3) && v3.radicand == 1, || {
        format!("V_3 = {} sqrt({})", v3.rational, v3.radicand)
    })?;
    check(
        !phi(5, &int(0)).map_err(|e| e.to_string())?.is_zero(),
        || "phi_5(0) vanished".into(),
    )?;
    Ok("V_2 = 3 sqrt(3), V_3 = 32/3".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("GR classification, n = 3, 4, 5", criterion_1),
        ("GR sweep, n = 6..60", criterion_2),
        ("P_5' and C_5 exact", criterion_3),
        ("normalization identities", criterion_4),
        ("sampler marginals", criterion_5),
        ("covariance", criterion_6),
        ("linear elimination", criterion_7),
        ("round-trip inversion", criterion_8),
        ("coverage gap witness", criterion_9),
        ("GR model marginal failure at n = 5", criterion_10),
        ("ordering lemmas", criterion_11),
        ("volume cross-check", criterion_12),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {reason} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
