//! `ndsim`: neighbor discovery analysis and simulation from the command line.

mod analyze;
mod config;
mod detect;
mod fixtures;
mod format;
mod selftest;
mod simulate;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use config::{ExperimentConfig, Preset};

#[derive(Debug, Parser)]
#[command(
    name = "ndsim",
    version,
    about = "Slotted-ALOHA neighbor discovery with SINR capture"
)]
struct Cli {
    /// Flat TOML configuration; keys not given fall back to the preset.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base seed, overriding the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Number of replications, overriding the configuration.
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[arg(long, global = true, value_enum)]
    detector: Option<DetectorKind>,
    /// Discovery radius of the RST detector in meters.
    #[arg(long, global = true)]
    r0: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analytic curves.
    Analyze {
        #[arg(value_enum)]
        figure: Figure,
    },
    /// Replicated discovery runs.
    Simulate {
        /// Role pattern CSV (`label,T,L,...` per node, reference first).
        #[arg(long)]
        pattern: Option<PathBuf>,
    },
    /// Matched filter vs RST detection on a deployment.
    Detect {
        #[arg(value_enum)]
        scenario: DetectScenario,
    },
    /// Runs the built-in invariant checks.
    Selftest,
    /// Prints a regenerated deployment fixture.
    #[command(hide = true)]
    Fixture {
        #[arg(value_enum)]
        scenario: DetectScenario,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    /// Optimal transmit probability and expected successes against tau.
    Fig1,
    /// Discovery rate per second for M-PSK.
    Fig2,
    /// Scripted three-node run with both predictions.
    Fig3,
    /// Membership probability against normalised distance.
    Fig4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DetectorKind {
    Mf,
    Rst,
    Oracle,
}

impl DetectorKind {
    pub fn name(self) -> &'static str {
        match self {
            DetectorKind::Mf => "mf",
            DetectorKind::Rst => "rst",
            DetectorKind::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DetectScenario {
    Deploy1,
    Deploy2,
    Random,
}

/// Options shared by every command after the configuration is resolved.
pub struct Run {
    pub config: ExperimentConfig,
    pub out: PathBuf,
    pub detector: Option<DetectorKind>,
    pub r0: Option<f64>,
}

impl Run {
    pub fn write(&self, name: &str, contents: &str) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.out).with_context(|| format!("creating {}", self.out.display()))?;
        let path = self.out.join(name);
        std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
        Ok(path)
    }
}

fn resolve(cli: &Cli, fallback: Preset) -> Result<ExperimentConfig> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path, fallback)?,
        None => ExperimentConfig::preset(fallback),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(trials) = cli.trials {
        config.trials = trials;
    }
    Ok(config)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let fallback = match cli.command {
        Command::Detect { .. } => Preset::Detection,
        _ => Preset::ThreeNode,
    };
    let run = Run {
        config: resolve(&cli, fallback)?,
        out: cli.out.clone(),
        detector: cli.detector,
        r0: cli.r0,
    };
    match &cli.command {
        Command::Analyze { figure } => analyze::run(&run, *figure)?,
        Command::Simulate { pattern } => simulate::run(&run, pattern.as_deref().map(Path::to_path_buf))?,
        Command::Detect { scenario } => detect::run(&run, *scenario, cli.trials)?,
        Command::Selftest => {
            if !selftest::run() {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Fixture { scenario } => print!("{}", fixtures::generate(*scenario)?.to_json()),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
