//! `flyover` command line: view generation runs, disparity alignment,
//! frame interpolation, metrics, and sequence preprocessing.

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::CliError;

#[derive(Parser)]
#[command(
    name = "flyover",
    about = "Perpetual view generation from a single RGBD image",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a flythrough sequence from one image+disparity pair.
    Fly(commands::fly::FlyArgs),
    /// Fit raw disparity to sparse 3D keypoints and write the aligned map.
    Align(commands::align::AlignArgs),
    /// Insert geometry-aware in-between frames into a sequence.
    Interp(commands::interp::InterpArgs),
    /// Sliding-window Fréchet distances and per-frame MSE.
    Metrics(commands::metrics::MetricsArgs),
    /// Letterbox removal, speed normalization and stride selection.
    Prep(commands::prep::PrepArgs),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fly(args) => commands::fly::run(args),
        Command::Align(args) => commands::align::run(args),
        Command::Interp(args) => commands::interp::run(args),
        Command::Metrics(args) => commands::metrics::run(args),
        Command::Prep(args) => commands::prep::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Args(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Aborted { step, error }) => {
            eprintln!("{}: sequence aborted at step {step}: {error}", error.name());
            ExitCode::from(3)
        }
        Err(CliError::Data(e)) => {
            eprintln!("{}: {e}", e.name());
            ExitCode::from(4)
        }
    }
}
