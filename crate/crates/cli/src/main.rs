mod cli;
mod commands;
mod error;
mod manifest;
mod table;

use std::process::ExitCode;

use clap::Parser;

use crate::cli::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Sample(a) => commands::sample(a),
        Command::VerifyGr(a) => commands::verify_gr(a),
        Command::Stats(a) => commands::stats(a),
        Command::DemoVariance(a) => commands::demo_variance(a),
        Command::Embed(a) => commands::embed_cmd(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rbs: {e}");
            e.exit_code()
        }
    }
}
