//! Statistical checks on batches of balanced vectors: marginal uniformity,
//! balance, covariance identities, support coverage and variance reduction.

use std::collections::BTreeMap;

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::geometry::{
    in_cyclic_difference_image, BalancedVector, BALANCE_TOL_PER_COORD, DEFAULT_TOL,
};
use crate::rng::SeededGenerator;
use crate::samplers::{Method, SampleBatch, Sampler, SamplerConfig};

/// Bins of the secondary chi-square diagnostic.
pub const CHI_SQUARE_BINS: usize = 64;

/// Smallest batch accepted by [`covariance_summary`].
pub const MIN_COVARIANCE_ROWS: usize = 1000;

/// Largest `n` accepted by [`coverage_probe`].
pub const MAX_COVERAGE_N: usize = 8;

/// Margin defining the interior cells of [`coverage_probe`].
pub const COVERAGE_SHRINK: f64 = 0.9;

fn check_rows<R: AsRef<[f64]>>(rows: &[R], coordinate: usize) -> Result<()> {
    let Some(first) = rows.first() else {
        return Err(Error::InvalidInput("empty batch".into()));
    };
    let n = first.as_ref().len();
    if coordinate >= n {
        return Err(Error::InvalidInput(format!(
            "coordinate {coordinate} out of range for n = {n}"
        )));
    }
    if let Some(i) = rows.iter().position(|r| r.as_ref().len() != n) {
        return Err(Error::InvalidInput(format!(
            "row {i} has {} coordinates, expected {n}",
            rows[i].as_ref().len()
        )));
    }
    Ok(())
}

fn uniform_cdf(x: f64) -> f64 {
    (0.5 * (x + 1.0)).clamp(0.0, 1.0)
}

/// One-sample Kolmogorov-Smirnov test of one coordinate against `U[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformityResult {
    pub coordinate: usize,
    pub statistic: f64,
    pub p_value: f64,
    pub count: usize,
}

impl UniformityResult {
    pub fn passes(&self, level: f64) -> bool {
        self.p_value > level
    }
}

/// `P{D_N > d}` from the asymptotic Kolmogorov law, with Stephens' small
/// sample correction `λ = (√N + 0.12 + 0.11/√N) d`.
pub fn kolmogorov_p_value(count: usize, d: f64) -> f64 {
    let rn = (count as f64).sqrt();
    let lambda = (rn + 0.12 + 0.11 / rn) * d;
    if lambda <= 0.0 {
        return 1.0;
    }
    let p = if lambda < 1.18 {
        // P{K <= λ} = sqrt(2π)/λ Σ exp(-(2j-1)² π² / (8 λ²)).
        let c = -std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let s: f64 = (1..=6)
            .map(|j| {
                let k = (2 * j - 1) as f64;
                (c * k * k).exp()
            })
            .sum();
        1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * s
    } else {
        let c = -2.0 * lambda * lambda;
        let mut s = 0.0;
        for j in 1..=100 {
            let jf = j as f64;
            let term = (c * jf * jf).exp();
            s += if j % 2 == 1 { term } else { -term };
            if term < 1e-300 {
                break;
            }
        }
        2.0 * s
    };
    p.clamp(0.0, 1.0)
}

/// KS uniformity of `coordinate` over arbitrary rows.
pub fn ks_uniformity_rows<R: AsRef<[f64]>>(
    rows: &[R],
    coordinate: usize,
) -> Result<UniformityResult> {
    check_rows(rows, coordinate)?;
    let mut v: Vec<f64> = rows.iter().map(|r| r.as_ref()[coordinate]).collect();
    if v.iter().any(|x| x.is_nan()) {
        return Err(Error::InvalidInput("NaN in batch".into()));
    }
    v.sort_by(f64::total_cmp);
    let nf = v.len() as f64;
    let statistic = v
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = uniform_cdf(x);
            ((i + 1) as f64 / nf - f).max(f - i as f64 / nf)
        })
        .fold(0.0, f64::max);
    Ok(UniformityResult {
        coordinate,
        statistic,
        p_value: kolmogorov_p_value(v.len(), statistic),
        count: v.len(),
    })
}

pub fn ks_uniformity(batch: &SampleBatch, coordinate: usize) -> Result<UniformityResult> {
    ks_uniformity_rows(&batch.vectors, coordinate)
}

/// Pearson chi-square against `U[-1, 1]` with equal bins; a secondary diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiSquareResult {
    pub coordinate: usize,
    pub bins: usize,
    pub statistic: f64,
    pub p_value: f64,
}

pub fn chi_square_uniformity<R: AsRef<[f64]>>(
    rows: &[R],
    coordinate: usize,
    bins: usize,
) -> Result<ChiSquareResult> {
    check_rows(rows, coordinate)?;
    if bins < 2 {
        return Err(Error::InvalidInput(
            "chi-square needs at least 2 bins".into(),
        ));
    }
    let mut counts = vec![0u64; bins];
    for r in rows {
        let u = uniform_cdf(r.as_ref()[coordinate]);
        let b = ((u * bins as f64) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let expected = rows.len() as f64 / bins as f64;
    let statistic: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let law = ChiSquared::new((bins - 1) as f64)
        .map_err(|e| Error::Numeric(format!("chi-square law: {e}")))?;
    Ok(ChiSquareResult {
        coordinate,
        bins,
        statistic,
        p_value: 1.0 - law.cdf(statistic),
    })
}

/// Worst coordinate sum over a batch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BalanceReport {
    pub n: usize,
    pub max_abs_sum: f64,
    pub worst_row: usize,
    pub threshold: f64,
    pub balanced: bool,
}

pub fn balance_report_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<BalanceReport> {
    check_rows(rows, 0)?;
    let n = rows[0].as_ref().len();
    let (worst_row, max_abs_sum) = rows
        .iter()
        .map(|r| r.as_ref().iter().sum::<f64>().abs())
        .enumerate()
        .fold(
            (0, 0.0),
            |best, (i, s)| if s > best.1 { (i, s) } else { best },
        );
    let threshold = BALANCE_TOL_PER_COORD * n as f64;
    Ok(BalanceReport {
        n,
        max_abs_sum,
        worst_row,
        threshold,
        balanced: max_abs_sum <= threshold,
    })
}

pub fn balance_report(batch: &SampleBatch) -> Result<BalanceReport> {
    balance_report_rows(&batch.vectors)
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let nf = values.len() as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    (mean, (var / nf).sqrt())
}

/// Pairwise covariances and the two identities every exchangeable or merely
/// balanced uniform sample must meet.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CovarianceSummary {
    pub n: usize,
    pub count: usize,
    /// Unbiased covariance matrix; the diagonal holds variances.
    pub covariance: Vec<Vec<f64>>,
    /// Standard error of each entry of `covariance`.
    pub standard_errors: Vec<Vec<f64>>,
    /// Mean off-diagonal covariance.
    pub alpha_hat: f64,
    pub alpha_se: f64,
    /// `-1/(3(n-1))`, the common covariance of any exchangeable sample.
    pub alpha_target: f64,
    /// `Σ_{k≠j} Ê(X_k X_j)`.
    pub sum_identity_hat: f64,
    pub sum_identity_se: f64,
    /// `-n/3`.
    pub sum_identity_target: f64,
}

impl CovarianceSummary {
    pub fn sum_identity_within(&self, ses: f64) -> bool {
        (self.sum_identity_hat - self.sum_identity_target).abs() <= ses * self.sum_identity_se
    }

    /// Pairs `(k, j)`, `k < j`, whose covariance lies more than `ses` standard
    /// errors from `alpha_target`.
    pub fn pairs_off_target(&self, ses: f64) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for k in 0..self.n {
            for j in k + 1..self.n {
                let d = (self.covariance[k][j] - self.alpha_target).abs();
                if d > ses * self.standard_errors[k][j] {
                    out.push((k, j));
                }
            }
        }
        out
    }
}

pub fn covariance_summary_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<CovarianceSummary> {
    if rows.len() < MIN_COVARIANCE_ROWS {
        return Err(Error::InvalidInput(format!(
            "covariance summary needs at least {MIN_COVARIANCE_ROWS} rows, got {}",
            rows.len()
        )));
    }
    check_rows(rows, 0)?;
    let n = rows[0].as_ref().len();
    if n < 2 {
        return Err(Error::InvalidInput(
            "covariance summary needs n >= 2".into(),
        ));
    }
    let count = rows.len();
    let nf = count as f64;
    let mut means = vec![0.0; n];
    for r in rows {
        for (m, x) in means.iter_mut().zip(r.as_ref()) {
            *m += x;
        }
    }
    means.iter_mut().for_each(|m| *m /= nf);

    let mut sum = vec![vec![0.0; n]; n];
    let mut sum_sq = vec![vec![0.0; n]; n];
    let mut alpha_terms = Vec::with_capacity(count);
    let mut identity_terms = Vec::with_capacity(count);
    let pairs = (n * (n - 1)) as f64;
    let mut c = vec![0.0; n];
    for r in rows {
        let x = r.as_ref();
        for k in 0..n {
            c[k] = x[k] - means[k];
        }
        let mut off = 0.0;
        for k in 0..n {
            for j in k..n {
                let p = c[k] * c[j];
                sum[k][j] += p;
                sum_sq[k][j] += p * p;
                if j != k {
                    off += 2.0 * p;
                }
            }
        }
        alpha_terms.push(off / pairs);
        let s: f64 = x.iter().sum();
        let sq: f64 = x.iter().map(|v| v * v).sum();
        identity_terms.push(s * s - sq);
    }
    let mut covariance = vec![vec![0.0; n]; n];
    let mut standard_errors = vec![vec![0.0; n]; n];
    for k in 0..n {
        for j in k..n {
            let mean_p = sum[k][j] / nf;
            let var_p = (sum_sq[k][j] / nf - mean_p * mean_p).max(0.0) * nf / (nf - 1.0);
            let cov = sum[k][j] / (nf - 1.0);
            let se = (var_p / nf).sqrt();
            covariance[k][j] = cov;
            covariance[j][k] = cov;
            standard_errors[k][j] = se;
            standard_errors[j][k] = se;
        }
    }
    let (alpha_mean, alpha_se) = mean_and_se(&alpha_terms);
    let (sum_identity_hat, sum_identity_se) = mean_and_se(&identity_terms);
    Ok(CovarianceSummary {
        n,
        count,
        covariance,
        standard_errors,
        alpha_hat: alpha_mean * nf / (nf - 1.0),
        alpha_se,
        alpha_target: -1.0 / (3.0 * (n as f64 - 1.0)),
        sum_identity_hat,
        sum_identity_se,
        sum_identity_target: -(n as f64) / 3.0,
    })
}

pub fn covariance_summary(batch: &SampleBatch) -> Result<CovarianceSummary> {
    covariance_summary_rows(&batch.vectors)
}

/// Spread of the sample mean `f̄_n = (1/n) Σ f(X_k)` under i.i.d. and
/// balanced sampling.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceReduction {
    pub n: usize,
    pub trials: usize,
    pub method: Method,
    pub mean_iid: f64,
    pub var_iid: f64,
    pub mean_rbs: f64,
    pub var_rbs: f64,
    /// `max |f̄_n|` over the balanced trials.
    pub max_abs_rbs: f64,
}

fn eval_poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn sample_variance(v: &[f64]) -> (f64, f64) {
    let nf = v.len() as f64;
    let mean = v.iter().sum::<f64>() / nf;
    (
        mean,
        v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (nf - 1.0),
    )
}

/// [`variance_reduction_experiment_with`] using the default method for `n`.
pub fn variance_reduction_experiment(
    f: &[f64],
    n: usize,
    trials: usize,
    gen: &SeededGenerator,
) -> Result<VarianceReduction> {
    variance_reduction_experiment_with(f, n, trials, gen, Method::Auto)
}

/// `f` is a polynomial, ascending coefficients. The i.i.d. and balanced runs
/// draw from independent forks of `gen`.
pub fn variance_reduction_experiment_with(
    f: &[f64],
    n: usize,
    trials: usize,
    gen: &SeededGenerator,
    method: Method,
) -> Result<VarianceReduction> {
    if f.is_empty() || f.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidInput(
            "f needs at least one finite coefficient".into(),
        ));
    }
    if trials < 100 {
        return Err(Error::InvalidInput(format!(
            "need at least 100 trials, got {trials}"
        )));
    }
    let config = SamplerConfig::new(n, method, gen.fork(1).seed());
    let mut sampler = Sampler::new(&config)?;
    let nf = n as f64;
    let mut iid_gen = gen.fork(0);
    let iid: Vec<f64> = (0..trials)
        .map(|_| (0..n).map(|_| eval_poly(f, iid_gen.uniform())).sum::<f64>() / nf)
        .collect();
    let rbs: Vec<f64> = (0..trials)
        .map(|_| {
            let y: BalancedVector = sampler.sample();
            y.coords().iter().map(|&x| eval_poly(f, x)).sum::<f64>() / nf
        })
        .collect();
    let (mean_iid, var_iid) = sample_variance(&iid);
    let (mean_rbs, var_rbs) = sample_variance(&rbs);
    Ok(VarianceReduction {
        n,
        trials,
        method: sampler.method(),
        mean_iid,
        var_iid,
        mean_rbs,
        var_rbs,
        max_abs_rbs: rbs.iter().fold(0.0, |m, v| m.max(v.abs())),
    })
}

/// Occupancy of the cells `sign(x_k) ⌈|x_k| B⌉` of `M(n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub n: usize,
    pub method: Method,
    pub buckets: usize,
    pub samples: usize,
    pub occupied_cells: usize,
    pub hits: Vec<(Vec<i32>, u64)>,
    /// Cells inside `0.9 M(n)` that meet the hyperplane in positive volume.
    pub interior_cells: usize,
    pub interior_unoccupied: Vec<Vec<i32>>,
    /// Fraction of draws whose consecutive pair sums fall outside the image
    /// of the cyclic difference map; present for even `n`.
    pub l_image_violation_fraction: Option<f64>,
}

fn cell_of(x: &[f64], buckets: usize) -> Vec<i32> {
    x.iter()
        .map(|&v| {
            let b = ((v.abs() * buckets as f64).ceil() as i32).min(buckets as i32);
            if v < 0.0 {
                -b
            } else {
                b
            }
        })
        .collect()
}

/// `[lo, hi]` covered by bucket `key`, in units of `1/B`.
fn bucket_range(key: i32) -> (i32, i32) {
    if key > 0 {
        (key - 1, key)
    } else {
        (key, key + 1)
    }
}

fn interior_cells(n: usize, buckets: usize) -> Vec<Vec<i32>> {
    let top = (COVERAGE_SHRINK * buckets as f64 + 1e-9).floor() as i32;
    let keys: Vec<i32> = (-top..=top).filter(|&k| k != 0).collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        let cell: Vec<i32> = idx.iter().map(|&i| keys[i]).collect();
        let (lo, hi) = cell.iter().fold((0, 0), |(l, h), &k| {
            let (a, b) = bucket_range(k);
            (l + a, h + b)
        });
        if lo < 0 && hi > 0 {
            out.push(cell);
        }
        let mut pos = 0;
        loop {
            if pos == n {
                return out;
            }
            idx[pos] += 1;
            if idx[pos] < keys.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

pub fn coverage_probe(
    config: &SamplerConfig,
    buckets: usize,
    samples: usize,
) -> Result<CoverageReport> {
    let n = config.n;
    if n > MAX_COVERAGE_N {
        return Err(Error::InvalidDimension {
            got: n,
            reason: "coverage probes are limited to n <= 8",
        });
    }
    if buckets == 0 {
        return Err(Error::InvalidInput("need at least one bucket".into()));
    }
    let mut sampler = Sampler::new(config)?;
    let mut hits: BTreeMap<Vec<i32>, u64> = BTreeMap::new();
    let mut violations = 0usize;
    let mut r = vec![0.0; n / 2];
    for _ in 0..samples {
        let y = sampler.sample();
        let c = y.coords();
        *hits.entry(cell_of(c, buckets)).or_default() += 1;
        if n.is_multiple_of(2) {
            for (k, rk) in r.iter_mut().enumerate() {
                *rk = c[2 * k] + c[2 * k + 1];
            }
            if !in_cyclic_difference_image(&r, DEFAULT_TOL)? {
                violations += 1;
            }
        }
    }
    let interior = interior_cells(n, buckets);
    let interior_unoccupied: Vec<Vec<i32>> = interior
        .iter()
        .filter(|c| !hits.contains_key(*c))
        .cloned()
        .collect();
    Ok(CoverageReport {
        n,
        method: sampler.method(),
        buckets,
        samples,
        occupied_cells: hits.len(),
        hits: hits.into_iter().collect(),
        interior_cells: interior.len(),
        interior_unoccupied,
        l_image_violation_fraction: n
            .is_multiple_of(2)
            .then(|| violations as f64 / samples.max(1) as f64),
    })
}
