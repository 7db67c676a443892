// `!(x > 0.0)` deliberately rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;
use error::CliError;
use output::OutputDir;

/// Stationary solutions of the dimensionless Vlasov-Fokker-Planck equation.
#[derive(Debug, Parser)]
#[command(name = "vfp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overriding `output_dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// RNG seed, overriding `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Check the structural assumptions on V and psi.
    Validate,
    /// Fixed points of the mean-field map per lambda.
    FixedPoints,
    /// Critical temperature from the implicit equation and the map-slope oracle.
    LambdaC,
    /// Fixed-point branches over a lambda sweep, as CSV and SVG.
    Bifurcation,
    /// Particle simulation of the kinetic or overdamped dynamics.
    Simulate,
    /// Finite-difference stationarity residual of the lifted measure.
    Residual,
    /// Small-temperature means and concentration about the wells.
    Asymptotics,
}

/// Caps rayon's global pool at `VFP_THREADS` when set.
fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("VFP_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            CliError::Config(format!(
                "VFP_THREADS must be a positive integer, got {value:?}"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn execute(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let path = cli
        .config
        .ok_or_else(|| CliError::Config("--config <file.json> is required".into()))?;
    let mut cfg = RunConfig::load(&path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = cli.out {
        cfg.output_dir = Some(out);
    }
    if let Command::Validate = cli.command {
        return commands::validate(&cfg);
    }
    let out = OutputDir::create(cfg.output_dir())?;
    match cli.command {
        Command::Validate => unreachable!("handled above"),
        Command::FixedPoints => commands::fixed_points(&cfg, &out),
        Command::LambdaC => commands::lambda_c(&cfg, &out),
        Command::Bifurcation => commands::bifurcation(&cfg, &out),
        Command::Simulate => commands::simulate(&cfg, &out),
        Command::Residual => commands::residual(&cfg, &out),
        Command::Asymptotics => commands::asymptotics(&cfg, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vfp: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
