//! Command-line harness: seeded training runs, capacity sweeps against the
//! random baseline, and plot-data extraction from run directories.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use mecnet::config::RunConfig;
use mecnet::harness::{self, SweepAxis};

#[derive(Parser)]
#[command(name = "mecnet", version, about = "MEC/UAV vehicular network resource manager")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train the agent and write the run directory (manifest, reward log,
    /// checkpoints, final model).
    Train {
        /// Flat key=value config file.
        #[arg(long)]
        config: PathBuf,
        /// Output run directory.
        #[arg(long)]
        out: PathBuf,
        /// Override the configured episode count.
        #[arg(long)]
        episodes: Option<usize>,
        /// Override the configured steps per episode.
        #[arg(long)]
        steps: Option<usize>,
        /// Override both scenario and agent seeds.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Sweep server capacities and compare the trained policy against the
    /// random scheme.
    Evaluate {
        /// Trained model checkpoint.
        #[arg(long)]
        model: PathBuf,
        /// Flat key=value config file.
        #[arg(long)]
        config: PathBuf,
        /// Capacity axes to sweep.
        #[arg(long, value_enum, default_values_t = vec![AxisArg::Spectrum, AxisArg::Compute, AxisArg::Cache])]
        sweep: Vec<AxisArg>,
        /// Evaluation steps per sweep point (overrides the config).
        #[arg(long)]
        trials: Option<usize>,
        /// Override both scenario and agent seeds.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory for the evaluation table.
        #[arg(long)]
        out: PathBuf,
    },
    /// Turn run artifacts into plot-ready two-column text files.
    Plotdata {
        /// Run directory holding rewards.csv and/or evaluation.csv.
        #[arg(long)]
        run: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    Spectrum,
    Compute,
    Cache,
}

impl From<AxisArg> for SweepAxis {
    fn from(axis: AxisArg) -> Self {
        match axis {
            AxisArg::Spectrum => SweepAxis::Spectrum,
            AxisArg::Compute => SweepAxis::Compute,
            AxisArg::Cache => SweepAxis::Cache,
        }
    }
}

fn apply_seed(config: &mut RunConfig, seed: Option<u64>) {
    if let Some(seed) = seed {
        config.scenario.rng_seed = seed;
        config.agent.seed = seed;
    }
}

fn run() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Train {
            config,
            out,
            episodes,
            steps,
            seed,
        } => {
            let mut run_config = RunConfig::from_path(&config)
                .with_context(|| format!("loading {}", config.display()))?;
            if let Some(episodes) = episodes {
                run_config.episodes = episodes;
            }
            if let Some(steps) = steps {
                run_config.episode_steps = steps;
            }
            apply_seed(&mut run_config, seed);
            run_config.validate()?;
            let summary = harness::run_train(&run_config, &out)?;
            let last = summary.episodes.last();
            println!(
                "trained {} episodes ({} steps each); final episode reward {}; model at {}",
                summary.episodes.len(),
                run_config.episode_steps,
                last.map_or(f64::NAN, |r| r.reward),
                summary.model_path.display()
            );
            Ok(())
        }
        Command::Evaluate {
            model,
            config,
            sweep,
            trials,
            seed,
            out,
        } => {
            let mut run_config = RunConfig::from_path(&config)
                .with_context(|| format!("loading {}", config.display()))?;
            apply_seed(&mut run_config, seed);
            let trials = trials.unwrap_or(run_config.eval_trials);
            let axes: Vec<SweepAxis> = sweep.into_iter().map(SweepAxis::from).collect();
            let records = harness::run_evaluate(&run_config, &model, &axes, trials, &out)?;
            println!("{}", mecnet::metrics::EVALUATION_TABLE_HEADER);
            for r in &records {
                println!(
                    "{},{},{},{},{},{}",
                    r.axis,
                    r.multiplier,
                    r.policy.name(),
                    r.trials,
                    r.delay_ratio,
                    r.qos_ratio
                );
            }
            Ok(())
        }
        Command::Plotdata { run } => {
            let written = harness::write_plot_data(&run)?;
            for path in written {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
