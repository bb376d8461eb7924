//! Run configuration: flags, the key=value config file and per-command
//! defaults, resolved into one serializable [`RunConfig`].

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use chainbell_core::oracle::{OracleLimits, DEFAULT_MAX_SITES};
use chainbell_core::{ChainParams, Convention};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_SEED: u64 = 20240611;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Curve,
    Verify,
    Conjecture,
    Sweep,
    Hv,
}

impl CommandKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CommandKind::Curve => "curve",
            CommandKind::Verify => "verify",
            CommandKind::Conjecture => "conjecture",
            CommandKind::Sweep => "sweep",
            CommandKind::Hv => "hv",
        }
    }
}

impl fmt::Display for CommandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ConventionChoice {
    Auto,
    Plain,
    Alternating,
}

impl ConventionChoice {
    pub fn forced(&self) -> Option<Convention> {
        match self {
            ConventionChoice::Auto => None,
            ConventionChoice::Plain => Some(Convention::Plain),
            ConventionChoice::Alternating => Some(Convention::Alternating),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every computing subcommand. All optional so that the
/// config file and the per-command defaults can fill the gaps.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// key=value file mirroring the long flags; flags given on the command line win
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Chain length; a comma-separated list for verify, conjecture and sweep
    #[arg(long, value_delimiter = ',', value_name = "N[,N...]")]
    pub n_sites: Option<Vec<usize>>,
    #[arg(long, allow_hyphen_values = true)]
    pub coupling_j: Option<f64>,
    /// Field in units of J; a comma-separated list for verify, conjecture and sweep
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        value_name = "X[,X...]"
    )]
    pub mu_over_j: Option<Vec<f64>>,
    /// Largest time of the grid (raw time, tJ = t * J)
    #[arg(long, allow_hyphen_values = true)]
    pub t_max: Option<f64>,
    /// Number of grid intervals; the grid has t_steps + 1 points
    #[arg(long)]
    pub t_steps: Option<usize>,
    #[arg(long, value_enum)]
    pub convention: Option<ConventionChoice>,
    /// Data file; the manifest goes to <output>.manifest.json. Stdout when absent
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Largest chain the exact-diagonalization oracle may build
    #[arg(long)]
    pub oracle_max_n: Option<usize>,
    /// Permit --oracle-max-n above the default cap (up to the hard maximum)
    #[arg(long)]
    pub allow_large_oracle: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Random instances for the hidden-variable checks
    #[arg(long)]
    pub instances: Option<usize>,
    /// Worker threads; defaults to the available hardware
    #[arg(long)]
    pub threads: Option<usize>,
}

/// Fully resolved configuration; recorded in every manifest and enough to
/// replay a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub n_sites: Vec<usize>,
    pub coupling_j: f64,
    pub mu_over_j: Vec<f64>,
    pub t_max: f64,
    pub t_steps: usize,
    pub convention: ConventionChoice,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub oracle_max_n: usize,
    pub allow_large_oracle: bool,
    pub rng_seed: u64,
    pub instances: usize,
    pub threads: Option<usize>,
}

struct Defaults {
    n_sites: Vec<usize>,
    mu_over_j: Vec<f64>,
    t_max: f64,
    t_steps: usize,
}

fn defaults(command: CommandKind) -> Defaults {
    match command {
        CommandKind::Curve => Defaults {
            n_sites: vec![16],
            mu_over_j: vec![-1.0],
            t_max: 40.0,
            t_steps: 2000,
        },
        CommandKind::Verify => Defaults {
            n_sites: (2..=8).collect(),
            mu_over_j: vec![-1.0, 0.0, 2.0],
            t_max: 3.0,
            t_steps: 30,
        },
        CommandKind::Conjecture => Defaults {
            n_sites: (2..=10).collect(),
            mu_over_j: vec![-1.0],
            t_max: 3.0,
            t_steps: 30,
        },
        CommandKind::Sweep => Defaults {
            n_sites: vec![4, 8, 16, 32, 64, 128],
            mu_over_j: vec![-1.0],
            t_max: 200.0,
            t_steps: 2000,
        },
        CommandKind::Hv => Defaults {
            n_sites: vec![2],
            mu_over_j: vec![-1.0],
            t_max: 0.0,
            t_steps: 1,
        },
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl RunConfig {
    pub fn resolve(command: CommandKind, args: RunArgs) -> Result<Self, CliError> {
        let d = defaults(command);
        let config = RunConfig {
            command,
            n_sites: args.n_sites.unwrap_or(d.n_sites),
            coupling_j: args.coupling_j.unwrap_or(1.0),
            mu_over_j: args.mu_over_j.unwrap_or(d.mu_over_j),
            t_max: args.t_max.unwrap_or(d.t_max),
            t_steps: args.t_steps.unwrap_or(d.t_steps),
            convention: args.convention.unwrap_or(ConventionChoice::Auto),
            output: args.output,
            format: args.format.unwrap_or(Format::Csv),
            oracle_max_n: args.oracle_max_n.unwrap_or(DEFAULT_MAX_SITES),
            allow_large_oracle: args.allow_large_oracle,
            rng_seed: args.seed.unwrap_or(DEFAULT_SEED),
            instances: args.instances.unwrap_or(100),
            threads: args.threads,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.t_steps == 0 {
            return Err(usage("--t-steps must be at least 1"));
        }
        if !(self.t_max >= 0.0 && self.t_max.is_finite()) {
            return Err(usage(format!(
                "--t-max must be finite and nonnegative, got {}",
                self.t_max
            )));
        }
        if !self.coupling_j.is_finite() {
            return Err(usage("--coupling-j must be finite"));
        }
        if self.n_sites.is_empty() || self.mu_over_j.is_empty() {
            return Err(usage("--n-sites and --mu-over-j need at least one value"));
        }
        if self.command == CommandKind::Curve
            && (self.n_sites.len() != 1 || self.mu_over_j.len() != 1)
        {
            return Err(usage(
                "curve takes a single --n-sites and a single --mu-over-j",
            ));
        }
        if self.command == CommandKind::Hv && self.instances == 0 {
            return Err(usage("--instances must be at least 1"));
        }
        if self.threads == Some(0) {
            return Err(usage("--threads must be at least 1"));
        }
        for &n in &self.n_sites {
            self.params(n, self.mu_over_j[0])?;
        }
        for &mu in &self.mu_over_j {
            if !mu.is_finite() {
                return Err(usage("--mu-over-j values must be finite"));
            }
        }
        self.oracle_limits()?;
        Ok(())
    }

    pub fn params(&self, n_sites: usize, mu_over_j: f64) -> Result<ChainParams, CliError> {
        Ok(ChainParams::from_ratio(
            n_sites,
            self.coupling_j,
            mu_over_j,
        )?)
    }

    pub fn oracle_limits(&self) -> Result<OracleLimits, CliError> {
        let limits = if self.allow_large_oracle {
            OracleLimits::with_override(self.oracle_max_n)
        } else {
            OracleLimits::new(self.oracle_max_n)
        };
        Ok(limits?)
    }

    /// Sorted, deduplicated chain lengths.
    pub fn sorted_sites(&self) -> Vec<usize> {
        let mut v = self.n_sites.clone();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Sorted, deduplicated fields.
    pub fn sorted_fields(&self) -> Vec<f64> {
        let mut v = self.mu_over_j.clone();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}

const BOOLEAN_KEYS: [&str; 1] = ["allow-large-oracle"];

/// Turns a key=value file into `--key=value` arguments. Blank lines and
/// lines starting with `#` are skipped; keys may use `-` or `_`.
pub fn config_file_args(path: &Path) -> Result<Vec<String>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config file {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            usage(format!(
                "{}:{}: expected key=value",
                path.display(),
                lineno + 1
            ))
        })?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key == "config" {
            return Err(usage(format!(
                "{}:{}: nested config files are not supported",
                path.display(),
                lineno + 1
            )));
        }
        if BOOLEAN_KEYS.contains(&key.as_str()) {
            match value {
                "true" => out.push(format!("--{key}")),
                "false" => {}
                _ => {
                    return Err(usage(format!(
                        "{}:{}: {key} must be true or false",
                        path.display(),
                        lineno + 1
                    )))
                }
            }
        } else {
            out.push(format!("--{key}={value}"));
        }
    }
    Ok(out)
}

/// Splices config-file arguments in front of the command-line ones, right
/// after the subcommand, so that later (command-line) values override them.
pub fn expand_config(raw: Vec<String>) -> Result<Vec<String>, CliError> {
    let mut config_path = None;
    let mut iter = raw.iter().enumerate().skip(1);
    while let Some((_, arg)) = iter.next() {
        if arg == "--config" {
            config_path = iter.next().map(|(_, v)| v.clone());
        } else if let Some(v) = arg.strip_prefix("--config=") {
            config_path = Some(v.to_string());
        }
    }
    let Some(path) = config_path else {
        return Ok(raw);
    };
    let extra = config_file_args(Path::new(&path))?;
    let subcommand_at = raw
        .iter()
        .skip(1)
        .position(|a| !a.starts_with('-'))
        .map(|p| p + 1)
        .ok_or_else(|| usage("--config needs a subcommand"))?;
    let mut out = raw[..=subcommand_at].to_vec();
    out.extend(extra);
    out.extend_from_slice(&raw[subcommand_at + 1..]);
    Ok(out)
}
