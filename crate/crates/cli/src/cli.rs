use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Random balanced samples: generation, Gerow-Robson verification, statistics.
#[derive(Debug, Parser)]
#[command(name = "rbs", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw balanced vectors and write them as CSV.
    Sample(SampleArgs),
    /// Decide Gerow-Robson density existence for a range of n.
    VerifyGr(VerifyGrArgs),
    /// Uniformity, covariance and balance report for a sample CSV.
    Stats(StatsArgs),
    /// Compare i.i.d. and balanced sample means of a polynomial.
    DemoVariance(DemoVarianceArgs),
    /// Append simplex-model coordinates e1..e(n-1) to a sample CSV.
    Embed(EmbedArgs),
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub n: usize,
    /// auto, degenerate, redistributed, symmetrized or gr.
    #[arg(long, default_value = "auto")]
    pub method: String,
    #[arg(long)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Radius density for `--method gr`: power:P or poly:c0,c1,...
    #[arg(long)]
    pub g: Option<String>,
}

#[derive(Debug, Args)]
pub struct VerifyGrArgs {
    #[arg(long)]
    pub from: usize,
    #[arg(long)]
    pub to: usize,
    #[arg(long)]
    pub out: PathBuf,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub report: PathBuf,
}

#[derive(Debug, Args)]
pub struct DemoVarianceArgs {
    #[arg(long)]
    pub n: usize,
    /// Polynomial f as poly:c0,c1,... (ascending powers).
    #[arg(long = "fn")]
    pub function: String,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "auto")]
    pub method: String,
    /// Report path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}
