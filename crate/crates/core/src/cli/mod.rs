//! Batch front end: `pphi2 <subcommand> [--config PATH] [--seed N]
//! [--threads N] [--out DIR] [--tolerance-scale F]`.
//!
//! Every run writes `results.csv`, `summary.json` and `manifest.json` to the
//! output directory. Exit code 0 means every check passed, 1 that some
//! check failed, 2 a configuration or runtime error.

pub mod config;
pub mod report;
pub mod run;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

pub use config::{parse_config, parse_config_str, RunConfig};
pub use report::Report;

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "pphi2", version, about = "Thermal P(phi)_2 lattice simulator and verification suite")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads, 0 for all cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Multiplies every tolerance; 0 makes all inexact checks fail.
    #[arg(long, global = true)]
    pub tolerance_scale: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    /// Draw free-field configurations.
    Sample,
    /// Exactness and Monte Carlo checks on the configured lattice.
    Battery,
    /// Relativistic KMS tube classification and boundary KMS check.
    TubeScan,
    /// Truncated Fock space: spectrum, field bounds, Gibbs Hoelder trials.
    Fock,
    /// Axis-swap symmetry of the Euclidean measure.
    Nelson,
    /// Covariance oracle tables.
    TabulateOracles,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    #[command(flatten)]
    Experiment(Experiment),
    /// Re-run an experiment from its manifest.json.
    Rerun { manifest: PathBuf },
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Sample => "sample",
            Experiment::Battery => "battery",
            Experiment::TubeScan => "tube-scan",
            Experiment::Fock => "fock",
            Experiment::Nelson => "nelson",
            Experiment::TabulateOracles => "tabulate-oracles",
        }
    }
}

/// Everything needed to repeat a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub package: String,
    pub version: String,
    pub command: Experiment,
    pub config: RunConfig,
}

impl Manifest {
    pub fn new(command: Experiment, config: RunConfig) -> Self {
        Self {
            schema_version: report::MANIFEST_SCHEMA_VERSION,
            package: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command,
            config,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let m: Manifest = serde_json::from_str(&text)
            .map_err(|e| Error::ParseError { line: e.line(), message: e.to_string() })?;
        m.config.validate()?;
        Ok(m)
    }
}

/// Outcome of one experiment run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: Report,
    pub out_dir: PathBuf,
}

/// Runs `command` with `config` and writes all output files.
pub fn run(command: Experiment, config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let out_dir = PathBuf::from(&config.out);
    std::fs::create_dir_all(&out_dir).map_err(|e| Error::Io(format!("{}: {e}", out_dir.display())))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::InvalidRunParameters(e.to_string()))?;
    let (report, extra) = pool.install(|| -> Result<(Report, Option<serde_json::Value>)> {
        Ok(match command {
            Experiment::Sample => (run::sample(config)?, None),
            Experiment::Battery => (run::battery(config)?, None),
            Experiment::TubeScan => (run::tube(config)?, None),
            Experiment::Fock => {
                let (r, j) = run::fock(config)?;
                (r, Some(j))
            }
            Experiment::Nelson => (run::nelson(config)?, None),
            Experiment::TabulateOracles => (run::tabulate_oracles(config)?, None),
        })
    })?;
    report.write(&out_dir, command.name())?;
    if let Some(j) = extra {
        report::write_json(&out_dir.join("fock.json"), &j)?;
    }
    report::write_json(&out_dir.join("manifest.json"), &Manifest::new(command, config.clone()))?;
    Ok(RunOutcome { report, out_dir })
}

fn resolve(cli: &Cli) -> Result<(Experiment, RunConfig)> {
    let (command, mut config) = match &cli.command {
        Command::Experiment(e) => {
            let config = match &cli.config {
                Some(p) => parse_config(p)?,
                None => RunConfig::default(),
            };
            (*e, config)
        }
        Command::Rerun { manifest } => {
            let m = Manifest::load(manifest)?;
            (m.command, m.config)
        }
    };
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    if let Some(t) = cli.threads {
        config.threads = t;
    }
    if let Some(o) = &cli.out {
        config.out = o.to_string_lossy().into_owned();
    }
    if let Some(t) = cli.tolerance_scale {
        config.tolerance_scale = t;
    }
    config.validate()?;
    Ok((command, config))
}

/// Parses arguments, runs, reports on stderr, and returns the exit code.
pub fn main_with_args<I: IntoIterator<Item = String>>(args: I) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = resolve(&cli).and_then(|(command, config)| run(command, &config).map(|o| (command, o)));
    match outcome {
        Ok((command, o)) => {
            let checks = o.report.checks();
            for c in &checks {
                eprintln!("{} {:<16} {}/{} rows", if c.pass { "ok  " } else { "FAIL" }, c.name, c.rows - c.failed, c.rows);
            }
            eprintln!("{}: results in {}", command.name(), o.out_dir.display());
            if o.report.pass() {
                0
            } else {
                let failing: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
                eprintln!("failing checks: {}", failing.join(", "));
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
