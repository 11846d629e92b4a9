use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use log::error;
use plap_cli::{run, Campaign, ExperimentConfig, RunOptions};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Subcommand {
    Roots,
    Shoot,
    Blowup,
    Martin,
    Grid,
    Bochner,
    All,
}

impl From<Subcommand> for Campaign {
    fn from(s: Subcommand) -> Self {
        match s {
            Subcommand::Roots => Campaign::Roots,
            Subcommand::Shoot => Campaign::Shoot,
            Subcommand::Blowup => Campaign::Blowup,
            Subcommand::Martin => Campaign::Martin,
            Subcommand::Grid => Campaign::Grid,
            Subcommand::Bochner => Campaign::Bochner,
            Subcommand::All => Campaign::All,
        }
    }
}

/// Runs a verification campaign and writes its CSV artifacts.
///
/// Exit status: 0 when every check passes, 1 when a check fails, 2 for
/// configuration or usage errors. Set PLAP_LOG=error|info|debug for logging.
#[derive(Debug, Parser)]
#[command(name = "plap", version)]
struct Cli {
    #[arg(value_enum)]
    campaign: Subcommand,
    /// JSON configuration; every key is optional.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config's `output`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run independent steps concurrently.
    #[arg(long)]
    parallel: bool,
    /// Seed for the randomized sweeps (overrides the config's `seed`).
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("PLAP_LOG", "error")).init();

    let cfg = match &cli.config {
        Some(path) => match ExperimentConfig::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        None => ExperimentConfig::default(),
    };
    let opts = RunOptions {
        out: cli.out,
        parallel: cli.parallel,
        seed: cli.seed,
    };
    match run(cli.campaign.into(), &cfg, &opts) {
        Ok(report) => {
            print!("{}", report.summary_text());
            if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            error!("{e}");
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
