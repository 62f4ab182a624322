use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use rbs_core::geometry::{build_simplex_model, embed};
use rbs_core::gr_analysis::{verify_no_gr_density, GrReport, Verdict};
use rbs_core::stats::{
    balance_report_rows, chi_square_uniformity, covariance_summary_rows, ks_uniformity_rows,
    variance_reduction_experiment_with, BalanceReport, ChiSquareResult, CovarianceSummary,
    UniformityResult, VarianceReduction, CHI_SQUARE_BINS, MIN_COVARIANCE_ROWS,
};
use rbs_core::{BalancedVector, Density, Method, Sampler, SamplerConfig, SeededGenerator};
use serde::Serialize;

use crate::cli::{DemoVarianceArgs, EmbedArgs, SampleArgs, StatsArgs, VerifyGrArgs};
use crate::error::{CliError, CliResult};
use crate::manifest::{flags, RunManifest};
use crate::table::{read_csv, write_csv, x_header};

const UNIFORMITY_LEVEL: f64 = 0.01;

#[derive(Serialize)]
struct Report<'a, R: Serialize, S: Serialize> {
    manifest: &'a RunManifest,
    results: R,
    summary: S,
}

fn write_json(path: &Path, value: &impl Serialize) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Verification(format!("report serialization: {e}")))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn parse_coeffs(spec: &str, what: &str) -> CliResult<Vec<f64>> {
    let body = spec.strip_prefix("poly:").ok_or_else(|| {
        CliError::Usage(format!(
            "{what} must look like poly:c0,c1,..., got '{spec}'"
        ))
    })?;
    body.split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Usage(format!("bad coefficient '{c}' in {what}")))
        })
        .collect()
}

/// `power:P` is the normalized `(P+1) s^P`; `poly:c0,c1,...` is taken as given.
pub fn parse_density(spec: &str) -> CliResult<Density> {
    if let Some(p) = spec.strip_prefix("power:") {
        let p: f64 = p
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("bad exponent in --g {spec}")))?;
        return Density::power(p).map_err(CliError::from_config);
    }
    Density::polynomial(parse_coeffs(spec, "--g")?).map_err(CliError::from_config)
}

fn parse_method(s: &str) -> CliResult<Method> {
    s.parse().map_err(CliError::from_config)
}

pub fn sample(args: &SampleArgs) -> CliResult<()> {
    let method = parse_method(&args.method)?;
    let mut config = SamplerConfig::new(args.n, method, args.seed);
    if let Some(g) = &args.g {
        if method != Method::GrModel {
            return Err(CliError::Usage("--g only applies to --method gr".into()));
        }
        config = config.with_density(parse_density(g)?);
    }
    config.validate().map_err(CliError::from_config)?;
    let sampler = Sampler::new(&config).map_err(CliError::from_config)?;
    let manifest = RunManifest::new(
        "sample",
        flags([
            ("n", args.n.to_string()),
            ("method", method.name().to_string()),
            ("count", args.count.to_string()),
            ("seed", args.seed.to_string()),
            ("g", args.g.clone().unwrap_or_default()),
        ]),
        Some(args.seed),
    );
    let rows = sampler.take(args.count).map(BalancedVector::into_coords);
    write_csv(&args.out, &manifest, &x_header(args.n), rows)
}

#[derive(Serialize)]
struct SweepSummary {
    from: usize,
    to: usize,
    verdict_counts: BTreeMap<&'static str, usize>,
    /// Every `n >= 5` in range has a proven nonexistence verdict.
    no_density_for_all_n_ge_5: bool,
}

pub fn verify_gr(args: &VerifyGrArgs) -> CliResult<()> {
    if args.from < 3 {
        return Err(CliError::Usage(format!(
            "--from must be at least 3, got {}",
            args.from
        )));
    }
    if args.to < args.from {
        return Err(CliError::Usage(format!(
            "--to ({}) is below --from ({})",
            args.to, args.from
        )));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("--jobs: {e}")))?;
    let start = Instant::now();
    let results: Vec<GrReport> = pool.install(|| {
        (args.from..=args.to)
            .into_par_iter()
            .map(verify_no_gr_density)
            .collect::<Result<_, _>>()
    })?;
    eprintln!(
        "verified n = {}..{} in {:.2}s",
        args.from,
        args.to,
        start.elapsed().as_secs_f64()
    );
    let mut verdict_counts = BTreeMap::new();
    for r in &results {
        *verdict_counts.entry(r.verdict.name()).or_insert(0) += 1;
    }
    let unproven: Vec<usize> = results
        .iter()
        .filter(|r| r.n >= 5 && r.verdict != Verdict::NoDensityProven)
        .map(|r| r.n)
        .collect();
    let summary = SweepSummary {
        from: args.from,
        to: args.to,
        verdict_counts,
        no_density_for_all_n_ge_5: unproven.is_empty(),
    };
    let manifest = RunManifest::new(
        "verify-gr",
        flags([
            ("from", args.from.to_string()),
            ("to", args.to.to_string()),
            ("jobs", args.jobs.to_string()),
        ]),
        None,
    );
    write_json(
        &args.out,
        &Report {
            manifest: &manifest,
            results: &results,
            summary,
        },
    )?;
    if unproven.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "inconclusive for n = {unproven:?}"
        )))
    }
}

#[derive(Serialize)]
struct StatsResults {
    n: usize,
    count: usize,
    uniformity: Vec<UniformityResult>,
    chi_square: Vec<ChiSquareResult>,
    balance: BalanceReport,
    /// Absent below the minimum row count.
    covariance: Option<CovarianceSummary>,
}

#[derive(Serialize)]
struct StatsSummary {
    level: f64,
    all_marginals_uniform: bool,
    balanced: bool,
    sum_identity_within_3_se: Option<bool>,
    alpha_hat: Option<f64>,
}

pub fn stats(args: &StatsArgs) -> CliResult<()> {
    let table = read_csv(&args.input)?;
    let rows = &table.rows;
    let uniformity = (0..table.n)
        .map(|k| ks_uniformity_rows(rows, k))
        .collect::<Result<Vec<_>, _>>()?;
    let chi_square = (0..table.n)
        .map(|k| chi_square_uniformity(rows, k, CHI_SQUARE_BINS))
        .collect::<Result<Vec<_>, _>>()?;
    let balance = balance_report_rows(rows)?;
    let covariance = if rows.len() >= MIN_COVARIANCE_ROWS {
        Some(covariance_summary_rows(rows)?)
    } else {
        None
    };
    let summary = StatsSummary {
        level: UNIFORMITY_LEVEL,
        all_marginals_uniform: uniformity.iter().all(|u| u.passes(UNIFORMITY_LEVEL)),
        balanced: balance.balanced,
        sum_identity_within_3_se: covariance.as_ref().map(|c| c.sum_identity_within(3.0)),
        alpha_hat: covariance.as_ref().map(|c| c.alpha_hat),
    };
    let manifest = RunManifest::new(
        "stats",
        flags([
            ("in", args.input.display().to_string()),
            ("report", args.report.display().to_string()),
        ]),
        None,
    );
    let worst_row = balance.worst_row;
    let balanced = balance.balanced;
    let max_abs_sum = balance.max_abs_sum;
    write_json(
        &args.report,
        &Report {
            manifest: &manifest,
            results: StatsResults {
                n: table.n,
                count: rows.len(),
                uniformity,
                chi_square,
                balance,
                covariance,
            },
            summary,
        },
    )?;
    if balanced {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "data row {} sums to {max_abs_sum:e}",
            worst_row + 1
        )))
    }
}

pub fn demo_variance(args: &DemoVarianceArgs) -> CliResult<()> {
    let f = parse_coeffs(&args.function, "--fn")?;
    let method = parse_method(&args.method)?;
    SamplerConfig::new(args.n, method, args.seed)
        .validate()
        .map_err(CliError::from_config)?;
    let gen = SeededGenerator::new(args.seed);
    let result: VarianceReduction =
        variance_reduction_experiment_with(&f, args.n, args.trials, &gen, method)
            .map_err(CliError::from_config)?;
    let ratio = if result.var_iid > 0.0 {
        Some(result.var_rbs / result.var_iid)
    } else {
        None
    };
    let manifest = RunManifest::new(
        "demo-variance",
        flags([
            ("n", args.n.to_string()),
            ("fn", args.function.clone()),
            ("trials", args.trials.to_string()),
            ("seed", args.seed.to_string()),
            ("method", method.name().to_string()),
        ]),
        Some(args.seed),
    );
    let report = Report {
        manifest: &manifest,
        results: &result,
        summary: BTreeMap::from([("variance_ratio_rbs_over_iid", ratio)]),
    };
    match &args.out {
        Some(path) => write_json(path, &report),
        None => {
            let text = serde_json::to_string_pretty(&report)
                .map_err(|e| CliError::Verification(e.to_string()))?;
            println!("{text}");
            Ok(())
        }
    }
}

pub fn embed_cmd(args: &EmbedArgs) -> CliResult<()> {
    let table = read_csv(&args.input)?;
    let n = table.n;
    let model = build_simplex_model(n)?;
    let mut out = Vec::with_capacity(table.rows.len());
    for (i, row) in table.rows.into_iter().enumerate() {
        let x = BalancedVector::new(row)
            .map_err(|e| CliError::Verification(format!("data row {}: {e}", i + 1)))?;
        let e = embed(&model, &x)?;
        let mut full = x.into_coords();
        full.extend(e);
        out.push(full);
    }
    let mut header = x_header(n);
    header.extend((1..n).map(|k| format!("e{k}")));
    let manifest = RunManifest::new(
        "embed",
        flags([
            ("in", args.input.display().to_string()),
            ("out", args.out.display().to_string()),
        ]),
        None,
    );
    write_csv(&args.out, &manifest, &header, out)
}
