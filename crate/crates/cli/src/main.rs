//! `mestbench`: simulation studies and empirical benchmarks for the
//! exponent-family binary regression estimators and their baselines.
//!
//! Exit codes: 0 success, 2 configuration/data error, 3 fit error.

mod commands;
mod config;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::ConfigFile;
use mestbench_core::ingest::DATA_DIR_ENV;

#[derive(Debug)]
pub enum CliError {
    /// Malformed or invalid configuration.
    Config(String),
    /// Missing or unreadable data, unwritable outputs.
    Data(String),
    /// An estimator failed.
    Fit(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Data(_) => 2,
            CliError::Fit(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Data(m) | CliError::Fit(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "mestbench",
    version,
    about = "Benchmark harness for exponent-family binary regression estimators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Run configuration file ([section] key = value format).
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Worker threads for independent cells.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Master seed override (takes precedence over the config file).
    #[arg(long)]
    seed: Option<u64>,
    /// Dataset directory (overrides the MESTBENCH_DATA_DIR environment
    /// variable; default ./data).
    #[arg(long)]
    data_dir: Option<PathBuf>,
}

impl CommonArgs {
    fn data_dir(&self) -> PathBuf {
        self.data_dir
            .clone()
            .or_else(|| std::env::var_os(DATA_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("data"))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the simulation study grid and write the summary tables.
    Simulate(CommonArgs),
    /// Fit one method on one dataset; write draws, plots, and tables.
    Fit(CommonArgs),
    /// Compare methods across empirical datasets.
    Benchmark {
        #[command(flatten)]
        common: CommonArgs,
        /// Restrict the AUC table to the four proposed methods.
        #[arg(long)]
        auc_proposed_only: bool,
    },
    /// Fit one method and rank individuals by fitted utility.
    Rum {
        #[command(flatten)]
        common: CommonArgs,
        /// How many individuals to print.
        #[arg(long, default_value_t = 10)]
        top_k: usize,
    },
    /// Pretty-print result tables from an output directory.
    Report {
        /// Directory holding previously emitted CSV tables.
        #[arg(long)]
        dir: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(common) => {
            let config = ConfigFile::load(&common.config)?;
            commands::cmd_simulate(&config, &common.out, common.workers, common.seed)
        }
        Command::Fit(common) => {
            let config = ConfigFile::load(&common.config)?;
            commands::cmd_fit(&config, &common.out, &common.data_dir(), common.seed)
        }
        Command::Benchmark { common, auc_proposed_only } => {
            let config = ConfigFile::load(&common.config)?;
            commands::cmd_benchmark(
                &config,
                &common.out,
                &common.data_dir(),
                common.seed,
                auc_proposed_only,
            )
        }
        Command::Rum { common, top_k } => {
            let config = ConfigFile::load(&common.config)?;
            commands::cmd_rum(&config, &common.out, &common.data_dir(), common.seed, top_k)
        }
        Command::Report { dir } => commands::cmd_report(&dir),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}
