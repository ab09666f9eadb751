//! `sosbm` - batch experiment runner for the skew-oscillating-sticky
//! Brownian motion laboratory.
//!
//! Exit codes: 0 = all checks pass, 1 = checks failed, 2 = configuration or
//! IO error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{cmd_convergence, cmd_estimate, cmd_simulate, cmd_verify, EstimateArgs};
use config::{parse_test_function, parse_u_family, ExperimentConfig};

#[derive(Parser)]
#[command(name = "sosbm", about = "simulation and inference for sticky-skew-oscillating Brownian motion")]
struct Cli {
    /// Number of worker threads (default: available cores). Results are
    /// parallelism-invariant.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Override the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override the config output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Suppress the timestamp line in manifests (byte-identical reruns).
    #[arg(long, global = true)]
    no_timestamp: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate paths at the largest ladder resolution and write one CSV per
    /// path plus a manifest.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the convergence experiment over the resolution ladder and emit a
    /// summary table.
    Convergence {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a verification audit and write its report CSV.
    Verify {
        /// kernel | bounds | scaling | prop57 | reduction
        #[arg(long)]
        scope: String,
        /// Optional config supplying the audited process parameters.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Estimate parameters from a path CSV file.
    Estimate {
        #[arg(long)]
        input: PathBuf,
        /// Known right volatility sigma(0+).
        #[arg(long)]
        sigma_plus: Option<f64>,
        /// Known left volatility sigma(0-).
        #[arg(long)]
        sigma_minus: Option<f64>,
        /// Joint estimation of all four parameters (volatilities first).
        #[arg(long)]
        joint: bool,
        /// Test function (hat | indicator_pos | indicator_neg | gauss_hole | gauss).
        #[arg(long, default_value = "hat")]
        g: String,
        /// Normalizing sequence (sqrt | log | pow:ALPHA).
        #[arg(long, default_value = "sqrt")]
        u: String,
    },
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global().ok();
    }
    let load = |path: &PathBuf| -> anyhow::Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::load(path)?;
        if let Some(seed) = cli.seed {
            cfg.seed = seed;
        }
        if let Some(out) = &cli.out {
            cfg.out = out.clone();
        }
        Ok(cfg)
    };

    match &cli.command {
        Command::Simulate { config } => cmd_simulate(&load(config)?, cli.no_timestamp),
        Command::Convergence { config } => cmd_convergence(&load(config)?),
        Command::Verify { scope, config } => {
            let cfg = config.as_ref().map(&load).transpose()?;
            let out = cli.out.clone().or_else(|| cfg.as_ref().map(|c| c.out.clone())).unwrap_or_else(|| PathBuf::from("out"));
            cmd_verify(scope, cfg.as_ref(), &out, cli.seed.unwrap_or(0))
        }
        Command::Estimate { input, sigma_plus, sigma_minus, joint, g, u } => {
            let args = EstimateArgs {
                input: input.clone(),
                sigma_plus: *sigma_plus,
                sigma_minus: *sigma_minus,
                joint: *joint,
                g: parse_test_function(g)?,
                u: parse_u_family(u)?,
                out: cli.out.clone(),
            };
            cmd_estimate(&args)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
