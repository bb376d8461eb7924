//! `chainbell`: curves, oracle verification, conjecture scans, sweeps and
//! hidden-variable checks for the temporal CH functional of an XX chain.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 a numerical
//! check failed.

mod commands;
mod config;
mod output;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::Value;

use config::{expand_config, CommandKind, RunArgs, RunConfig};
use output::{manifest_path, write_manifest, write_table, RunManifest};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] chainbell_core::Error),
    #[error("cannot write {0}: {1}")]
    Output(PathBuf, std::io::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("no eigenvector convention reproduces the oracle propagator: {0}")]
    ConventionUnresolved(Value),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::ConventionUnresolved(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "chainbell", version, about, args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// I(t) and its propagator components for one chain
    Curve(RunArgs),
    /// Exact diagonalization against the closed form, plus structural checks
    Verify(RunArgs),
    /// Scan the pair-contraction relation over chain lengths
    Conjecture(RunArgs),
    /// Curves for every combination of --n-sites and --mu-over-j
    Sweep(RunArgs),
    /// Hidden-variable identities on seeded random two-qubit instances
    Hv(RunArgs),
    /// Re-run the configuration recorded in a manifest
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
struct ReplayArgs {
    /// Manifest written next to an earlier data file
    manifest: PathBuf,
    /// Where to write the regenerated data; stdout when absent
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Deserialize)]
struct StoredManifest {
    config: RunConfig,
}

fn build_config(command: Command) -> Result<RunConfig, CliError> {
    let (kind, args) = match command {
        Command::Curve(a) => (CommandKind::Curve, a),
        Command::Verify(a) => (CommandKind::Verify, a),
        Command::Conjecture(a) => (CommandKind::Conjecture, a),
        Command::Sweep(a) => (CommandKind::Sweep, a),
        Command::Hv(a) => (CommandKind::Hv, a),
        Command::Replay(r) => {
            let text = fs::read_to_string(&r.manifest).map_err(|e| {
                CliError::Usage(format!(
                    "cannot read manifest {}: {e}",
                    r.manifest.display()
                ))
            })?;
            let stored: StoredManifest = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("not a chainbell manifest: {e}")))?;
            let mut config = stored.config;
            config.output = r.output;
            if r.threads.is_some() {
                config.threads = r.threads;
            }
            config.validate()?;
            return Ok(config);
        }
    };
    RunConfig::resolve(kind, args)
}

fn execute(config: &RunConfig) -> Result<bool, CliError> {
    let started = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0);
    let clock = Instant::now();

    let outcome = match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {n} threads: {e}")))?
            .install(|| commands::run(config))?,
        None => commands::run(config)?,
    };

    write_table(
        &outcome.table,
        config.output.as_deref(),
        config.format,
        config,
        outcome.convention,
    )?;
    for check in &outcome.checks {
        eprintln!("{}", check.line());
    }
    if let Some(c) = outcome.convention {
        eprintln!("convention: {c}");
    }
    let all_pass = outcome.checks.iter().all(|c| c.pass);

    if let Some(path) = &config.output {
        let manifest = RunManifest {
            tool: "chainbell",
            version: env!("CARGO_PKG_VERSION"),
            schema: outcome.table.schema(),
            config: config.clone(),
            convention_used: outcome.convention,
            convention_probe: outcome.probe,
            data_file: Some(path.clone()),
            started_unix_seconds: started,
            wall_clock_seconds: clock.elapsed().as_secs_f64(),
            checks: outcome.checks,
            all_checks_pass: all_pass,
            summary: outcome.summary,
        };
        let mpath = manifest_path(path);
        write_manifest(&manifest, &mpath)?;
        eprintln!("wrote {} and {}", path.display(), mpath.display());
    }
    Ok(all_pass)
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().collect();
    let args = match expand_config(raw) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = build_config(cli.command).and_then(|config| execute(&config));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
