//! Command-line interface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use lt_eval_core::generators::{RedetectionSpec, DEFAULT_LOOPS};
use lt_eval_core::ThresholdGrid;

use crate::commands::{self, OutputLock, RunConfig, SimulateOptions};
use crate::error::{Error, Result};

/// Long-term tracker evaluation: precision/recall/F analysis of tracker
/// outputs against a dataset manifest.
#[derive(Debug, Parser)]
#[command(name = "lt-eval", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Dataset manifest (sequences.json).
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Directory with one sub-directory of outputs per tracker.
    #[arg(long)]
    pub results: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Number of certainty thresholds.
    #[arg(long, default_value_t = ThresholdGrid::DEFAULT_SIZE)]
    pub grid: usize,
    /// Annotation strides for the sparsity analysis.
    #[arg(long = "Ns", value_delimiter = ',', default_values_t = lt_eval_core::analyses::DEFAULT_STRIDES)]
    pub strides: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (LT_EVAL_JOBS overrides).
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank trackers by maximal tracking F-score.
    Evaluate(Common),
    /// Scores under sparse (every N-th frame) annotation.
    Sparsity(Common),
    /// F-score per visual attribute.
    Attributes(Common),
    /// F-score by disappearance frequency.
    Groups(Common),
    /// Initialization and per-frame speed.
    Speed(Common),
    /// Re-detection experiment: generate, score, or analyze influence.
    Redetect {
        #[command(flatten)]
        common: Common,
        /// Build the staged re-detection dataset from the manifest frames.
        #[arg(long)]
        generate: bool,
        #[arg(long, default_value_t = 5)]
        warmup: usize,
        #[arg(long, default_value_t = 300)]
        post: usize,
    },
    /// Looped sequences from targets that never disappear.
    Loops {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = DEFAULT_LOOPS)]
        loops: usize,
    },
    /// Dataset disappearance statistics.
    Stats(Common),
    /// Synthetic dataset with theoretical and simulated trackers.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = SimulateOptions::default().sequences)]
        sequences: usize,
        #[arg(long, default_value_t = SimulateOptions::default().length.0)]
        min_len: usize,
        #[arg(long, default_value_t = SimulateOptions::default().length.1)]
        max_len: usize,
        #[arg(long, default_value_t = SimulateOptions::default().disappearances.0)]
        min_disappearances: usize,
        #[arg(long, default_value_t = SimulateOptions::default().disappearances.1)]
        max_disappearances: usize,
    },
}

fn jobs(requested: Option<usize>) -> Result<usize> {
    if let Ok(v) = std::env::var("LT_EVAL_JOBS") {
        return v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::Config(format!("LT_EVAL_JOBS: invalid value `{v}`")));
    }
    match requested {
        Some(0) => Err(Error::Config("--jobs must be positive".into())),
        Some(n) => Ok(n),
        None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

impl Common {
    pub fn config(&self) -> Result<RunConfig> {
        if self.grid < 2 {
            return Err(Error::Config("--grid must be at least 2".into()));
        }
        if self.strides.is_empty() || self.strides.contains(&0) {
            return Err(Error::Config("--Ns must list positive strides".into()));
        }
        Ok(RunConfig {
            manifest: self.manifest.clone(),
            results: self.results.clone(),
            output_dir: self.out.clone(),
            grid_size: self.grid,
            strides: self.strides.clone(),
            seed: self.seed,
            jobs: jobs(self.jobs)?,
        })
    }
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Evaluate(c)
            | Command::Sparsity(c)
            | Command::Attributes(c)
            | Command::Groups(c)
            | Command::Speed(c)
            | Command::Stats(c) => c,
            Command::Redetect { common, .. }
            | Command::Loops { common, .. }
            | Command::Simulate { common, .. } => common,
        }
    }

    /// Checks that the inputs this command needs exist.
    fn validate(&self, cfg: &RunConfig) -> Result<()> {
        match self {
            Command::Simulate { .. } => Ok(()),
            Command::Stats(_) | Command::Redetect { generate: true, .. } => {
                cfg.manifest().map(drop)
            }
            Command::Loops { .. } => {
                cfg.manifest()?;
                if cfg.results.is_some() {
                    cfg.results()?;
                }
                Ok(())
            }
            _ => {
                cfg.manifest()?;
                cfg.results().map(drop)
            }
        }
    }
}

/// Runs a parsed command; returns the files written.
pub fn run(cli: Cli) -> Result<Vec<PathBuf>> {
    let cfg = cli.command.common().config()?;
    cli.command.validate(&cfg)?;
    let _lock = OutputLock::acquire(&cfg.output_dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    log::info!("running with {} worker threads", cfg.jobs);
    pool.install(|| match &cli.command {
        Command::Evaluate(_) => commands::cmd_evaluate(&cfg),
        Command::Sparsity(_) => commands::cmd_sparsity(&cfg),
        Command::Attributes(_) => commands::cmd_attributes(&cfg),
        Command::Groups(_) => commands::cmd_groups(&cfg),
        Command::Speed(_) => commands::cmd_speed(&cfg),
        Command::Stats(_) => commands::cmd_stats(&cfg),
        Command::Redetect { generate, warmup, post, .. } => {
            commands::cmd_redetect(&cfg, *generate, RedetectionSpec::new(*warmup, *post)?)
        }
        Command::Loops { loops, .. } => {
            if *loops == 0 {
                return Err(Error::Config("--loops must be positive".into()));
            }
            commands::cmd_loops(&cfg, *loops)
        }
        Command::Simulate {
            sequences,
            min_len,
            max_len,
            min_disappearances,
            max_disappearances,
            ..
        } => commands::cmd_simulate(
            &cfg,
            &SimulateOptions {
                sequences: *sequences,
                length: (*min_len, *max_len),
                disappearances: (*min_disappearances, *max_disappearances),
            },
        ),
    })
}
