//! `nonlocality` command-line tool.

mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::commands::{ChshEmbedArgs, LvBoundArgs, OptimizeArgs, ResistanceArgs, Table1Args, WitnessScanArgs};
use crate::error::{CliError, Result};

/// Environment variable overriding the worker thread count.
const THREADS_ENV: &str = "NONLOCALITY_THREADS";

#[derive(Parser)]
#[command(name = "nonlocality", version, about = "Bell violations, noise thresholds and witness scans for two qudits")]
struct Cli {
    /// Write a JSON run manifest to this path after a successful run.
    #[arg(long, global = true, value_name = "PATH")]
    manifest: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Violation for the maximally entangled state and the operator maximum per dimension.
    Table1(Table1Args),
    /// Minimum eigenvalue of W - k·Pₐ^{T_A} over a grid of k.
    WitnessScan(WitnessScanArgs),
    /// Critical noise weight for a state under the canonical settings.
    Resistance(ResistanceArgs),
    /// Closed-form and numeric resistance of CHSH settings embedded in dimension d.
    ChshEmbed(ChshEmbedArgs),
    /// See-saw search over states and projective measurements.
    Optimize(OptimizeArgs),
    /// Local-variable bound by deterministic-strategy enumeration.
    LvBound(LvBoundArgs),
}

#[derive(Serialize)]
struct RunManifest {
    command: &'static str,
    parameters: serde_json::Value,
    outputs: Vec<String>,
    wall_time: f64,
    library_version: &'static str,
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    // fails only if a pool already exists, which cannot happen here
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    let start = Instant::now();
    let (name, parameters, outputs) = match &cli.command {
        Command::Table1(a) => ("table1", serde_json::to_value(a)?, commands::table1(a)?),
        Command::WitnessScan(a) => ("witness-scan", serde_json::to_value(a)?, commands::witness_scan(a)?),
        Command::Resistance(a) => ("resistance", serde_json::to_value(a)?, commands::resistance(a)?),
        Command::ChshEmbed(a) => ("chsh-embed", serde_json::to_value(a)?, commands::chsh_embed(a)?),
        Command::Optimize(a) => ("optimize", serde_json::to_value(a)?, commands::optimize(a)?),
        Command::LvBound(a) => ("lv-bound", serde_json::to_value(a)?, commands::lv_bound(a)?),
    };
    if let Some(path) = &cli.manifest {
        let manifest = RunManifest {
            command: name,
            parameters,
            outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
            wall_time: start.elapsed().as_secs_f64(),
            library_version: nonlocality::VERSION,
        };
        output::emit(&output::json_string(&manifest)?, Some(path))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
