//! Argument parsing and dispatch.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::commands::{self, output_dir, Context, Outcome};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::parallel::pool;

/// Environment variable that overrides `--threads`.
pub const THREADS_ENV: &str = "CMC_THREADS";

#[derive(Debug, Parser)]
#[command(name = "cmc", version, about = "CMC surfaces in hyperbolic 3-space from flat rank-one connections")]
pub struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; 0 picks the number of cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Pass/fail threshold of the command (overrides the config).
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Flatness residual of the seed's connection over the grid.
    Flatness,
    /// Integrate the frame and write mesh, geometry table and report.
    Surface,
    /// Holonomy around the configured loop and its unitarity defect.
    Monodromy,
    /// Fourier-mode Jacobi potentials and their Dirichlet spectra.
    Jacobi,
    /// Rebuild the immersion from the Gauss map through the Aiyama–Akutagawa connection.
    AaCompare,
}

fn threads(flag: Option<usize>, env: Option<String>) -> Result<Option<usize>, CliError> {
    match env {
        Some(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Config(format!("{THREADS_ENV} = {v:?} is not a thread count"))),
        None => Ok(flag),
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::Config("--config is required".into()))?;
    let config = RunConfig::load(path)?;
    if let Some(t) = cli.tolerance {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Config(format!("--tolerance {t} must be positive")));
        }
    }
    let threads = threads(cli.threads, std::env::var(THREADS_ENV).ok())?;
    let out = output_dir(cli.out.as_deref(), &config);
    let ctx = Context { config, out, tolerance: cli.tolerance };
    let pool = pool(threads).map_err(CliError::config)?;
    pool.install(|| match cli.command {
        Command::Flatness => commands::flatness(&ctx),
        Command::Surface => commands::surface(&ctx),
        Command::Monodromy => commands::monodromy(&ctx),
        Command::Jacobi => commands::jacobi(&ctx),
        Command::AaCompare => commands::aa_compare(&ctx),
    })
}

/// Runs the command and maps the result to the exit-code contract:
/// 0 success, 1 numerical or criterion failure, 2 usage or config error.
pub fn exit_code(cli: &Cli) -> u8 {
    match run(cli) {
        Ok(o) => {
            println!("{}: {}", if o.passed { "ok" } else { "failed" }, o.summary);
            u8::from(!o.passed)
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
