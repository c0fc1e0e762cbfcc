//! Run orchestration behind the command-line interface: seeded training runs
//! with manifests and checkpoints, capacity sweeps comparing the trained
//! policy against the random scheme, and plot-data extraction.

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::agent::{AgentError, DdpgAgent, EpisodeRecord};
use crate::baseline::random_policy;
use crate::config::{ConfigError, RunConfig};
use crate::env::{Env, EnvError};
use crate::metrics::{RewardLog, EVALUATION_TABLE_HEADER};
use crate::network::ServerCapacities;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error("io error on {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("model expects {expected}-dim {what}, environment provides {got}")]
    ShapeMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("missing run artifact {0}")]
    MissingArtifact(PathBuf),
    #[error("cannot parse {path}: {reason}")]
    BadArtifact { path: String, reason: String },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    }
}

pub const MANIFEST_FILE: &str = "manifest.cfg";
pub const REWARD_LOG_FILE: &str = "rewards.csv";
pub const MODEL_FILE: &str = "model.bin";
pub const EVALUATION_FILE: &str = "evaluation.csv";

/// Capacity axis swept during evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Spectrum,
    Compute,
    Cache,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 3] = [SweepAxis::Spectrum, SweepAxis::Compute, SweepAxis::Cache];

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Spectrum => "spectrum",
            SweepAxis::Compute => "compute",
            SweepAxis::Cache => "cache",
        }
    }

    /// Scales this axis of both the MeNB and the UAVs by `factor`.
    pub fn scale(self, caps: &ServerCapacities, factor: f64) -> ServerCapacities {
        let mut scaled = *caps;
        match self {
            SweepAxis::Spectrum => {
                scaled.menb_spectrum_hz *= factor;
                scaled.uav_spectrum_hz *= factor;
            }
            SweepAxis::Compute => {
                scaled.menb_compute_cps *= factor;
                scaled.uav_compute_cps *= factor;
            }
            SweepAxis::Cache => {
                scaled.menb_cache_bits *= factor;
                scaled.uav_cache_bits *= factor;
            }
        }
        scaled
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Sweep points as multiples of the configured baseline capacities.
pub const SWEEP_MULTIPLIERS: [f64; 3] = [0.5, 1.0, 2.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyKind {
    Ddpg,
    Random,
}

impl PolicyKind {
    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Ddpg => "ddpg",
            PolicyKind::Random => "random",
        }
    }
}

/// One row of the evaluation table.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub axis: SweepAxis,
    pub multiplier: f64,
    pub policy: PolicyKind,
    pub trials: usize,
    pub delay_ratio: f64,
    pub qos_ratio: f64,
}

#[derive(Debug)]
pub struct TrainSummary {
    pub episodes: Vec<EpisodeRecord>,
    pub model_path: PathBuf,
}

/// Trains an agent per the config, writing into `out_dir`:
/// a manifest (a reusable config file describing the run exactly), the
/// append-only reward log, periodic checkpoints, and the final model.
pub fn run_train(config: &RunConfig, out_dir: &Path) -> Result<TrainSummary, HarnessError> {
    config.validate()?;
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let manifest_path = out_dir.join(MANIFEST_FILE);
    let manifest = format!(
        "# training run manifest (mecnet {})\n# reusable as a config file\n{}",
        env!("CARGO_PKG_VERSION"),
        config.to_config_string()
    );
    fs::write(&manifest_path, manifest).map_err(io_err(&manifest_path))?;

    let mut env = Env::new(
        &config.scenario,
        config.caps,
        config.radio,
        config.reward_clip,
        config.episode_steps,
    )?;
    let mut agent = DdpgAgent::new(env.state_dim(), env.action_dim(), config.agent.clone())?;

    let log_path = out_dir.join(REWARD_LOG_FILE);
    let mut log = RewardLog::create(&log_path).map_err(io_err(&log_path))?;
    let mut episodes = Vec::with_capacity(config.episodes);
    let mut state = env.reset()?;
    for episode in 1..=config.episodes {
        let (reward, next) = agent.run_episode(&mut env, state)?;
        state = next;
        let record = EpisodeRecord { episode, reward };
        log.append(&record).map_err(io_err(&log_path))?;
        episodes.push(record);
        if config.checkpoint_interval > 0 && episode % config.checkpoint_interval == 0 {
            let path = out_dir.join(format!("model_ep{episode:05}.bin"));
            agent.save_to_path(&path)?;
        }
    }
    let model_path = out_dir.join(MODEL_FILE);
    agent.save_to_path(&model_path)?;
    Ok(TrainSummary {
        episodes,
        model_path,
    })
}

/// Runs `trials` evaluation steps for both policies at every requested sweep
/// point and writes the evaluation table to `out_dir`. The trained actor
/// runs without exploration noise; the random scheme redraws a decision
/// every step. Both face identical traffic (mobility does not depend on
/// decisions), so records at one sweep point are directly comparable.
pub fn run_evaluate(
    config: &RunConfig,
    model_path: &Path,
    axes: &[SweepAxis],
    trials: usize,
    out_dir: &Path,
) -> Result<Vec<SweepRecord>, HarnessError> {
    config.validate()?;
    let agent = DdpgAgent::load_from_path(model_path, config.agent.clone())?;
    let expected_state = crate::env::state_dim(config.scenario.max_vehicles);
    let expected_action = crate::env::action_dim(config.scenario.max_vehicles);
    if agent.state_dim() != expected_state {
        return Err(HarnessError::ShapeMismatch {
            what: "state",
            expected: agent.state_dim(),
            got: expected_state,
        });
    }
    if agent.action_dim() != expected_action {
        return Err(HarnessError::ShapeMismatch {
            what: "action",
            expected: agent.action_dim(),
            got: expected_action,
        });
    }

    let mut points = Vec::new();
    if trials > 0 {
        for &axis in axes {
            for &multiplier in &SWEEP_MULTIPLIERS {
                points.push((axis, multiplier));
            }
        }
    }
    let records: Result<Vec<Vec<SweepRecord>>, HarnessError> = points
        .par_iter()
        .map(|&(axis, multiplier)| {
            let caps = axis.scale(&config.caps, multiplier);
            let mut out = Vec::with_capacity(2);
            for policy in [PolicyKind::Ddpg, PolicyKind::Random] {
                out.push(evaluate_policy(
                    config, caps, &agent, policy, axis, multiplier, trials,
                )?);
            }
            Ok(out)
        })
        .collect();
    let records: Vec<SweepRecord> = records?.into_iter().flatten().collect();

    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let table_path = out_dir.join(EVALUATION_FILE);
    write_evaluation_table(&table_path, &records)?;
    Ok(records)
}

fn evaluate_policy(
    config: &RunConfig,
    caps: ServerCapacities,
    agent: &DdpgAgent,
    policy: PolicyKind,
    axis: SweepAxis,
    multiplier: f64,
    trials: usize,
) -> Result<SweepRecord, HarnessError> {
    let mut env = Env::new(
        &config.scenario,
        caps,
        config.radio,
        config.reward_clip,
        trials.max(1),
    )?;
    // Separate stream for the random scheme, fixed per sweep point.
    let mut policy_rng = ChaCha12Rng::seed_from_u64(config.scenario.rng_seed ^ 0x5eed_ba5e);
    let mut state = env.reset()?;
    let mut tasks = 0usize;
    let mut delay_hits = 0usize;
    let mut qos_hits = 0usize;
    for _ in 0..trials {
        let outcome = match policy {
            PolicyKind::Ddpg => {
                let action = agent.act(&state)?;
                env.step(&action)?
            }
            PolicyKind::Random => {
                let decision = random_policy(&env.world, &mut policy_rng);
                env.step_with_decision(&decision)?
            }
        };
        tasks += outcome.report.vehicles.len();
        delay_hits += outcome.report.vehicles.iter().filter(|v| v.delay_ok).count();
        qos_hits += outcome.report.vehicles.iter().filter(|v| v.qos_ok).count();
        state = outcome.state;
    }
    let (delay_ratio, qos_ratio) = if tasks == 0 {
        (1.0, 1.0)
    } else {
        (
            delay_hits as f64 / tasks as f64,
            qos_hits as f64 / tasks as f64,
        )
    };
    Ok(SweepRecord {
        axis,
        multiplier,
        policy,
        trials,
        delay_ratio,
        qos_ratio,
    })
}

pub fn write_evaluation_table(path: &Path, records: &[SweepRecord]) -> Result<(), HarnessError> {
    let mut text = String::from(EVALUATION_TABLE_HEADER);
    text.push('\n');
    for r in records {
        text.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.axis,
            r.multiplier,
            r.policy.name(),
            r.trials,
            r.delay_ratio,
            r.qos_ratio
        ));
    }
    fs::write(path, text).map_err(io_err(path))
}

pub fn read_evaluation_table(path: &Path) -> Result<Vec<SweepRecord>, HarnessError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let bad = |reason: &str| HarnessError::BadArtifact {
        path: path.display().to_string(),
        reason: reason.to_string(),
    };
    let mut lines = text.lines();
    if lines.next() != Some(EVALUATION_TABLE_HEADER) {
        return Err(bad("unexpected header"));
    }
    let mut records = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(bad("wrong field count"));
        }
        let axis = match fields[0] {
            "spectrum" => SweepAxis::Spectrum,
            "compute" => SweepAxis::Compute,
            "cache" => SweepAxis::Cache,
            _ => return Err(bad("unknown axis")),
        };
        let policy = match fields[2] {
            "ddpg" => PolicyKind::Ddpg,
            "random" => PolicyKind::Random,
            _ => return Err(bad("unknown policy")),
        };
        records.push(SweepRecord {
            axis,
            multiplier: fields[1].parse().map_err(|_| bad("bad multiplier"))?,
            policy,
            trials: fields[3].parse().map_err(|_| bad("bad trials"))?,
            delay_ratio: fields[4].parse().map_err(|_| bad("bad delay ratio"))?,
            qos_ratio: fields[5].parse().map_err(|_| bad("bad qos ratio"))?,
        });
    }
    Ok(records)
}

/// Extracts plot-ready whitespace-separated files from a run directory:
/// `plot_rewards.dat` (episode, reward) from the training log, and one
/// `plot_ratios_<axis>.dat` per swept axis (multiplier plus the four
/// policy/metric series) from the evaluation table. Reruns are idempotent.
pub fn write_plot_data(run_dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let mut written = Vec::new();
    let rewards = run_dir.join(REWARD_LOG_FILE);
    let table = run_dir.join(EVALUATION_FILE);
    if !rewards.exists() && !table.exists() {
        return Err(HarnessError::MissingArtifact(rewards));
    }
    if rewards.exists() {
        let text = fs::read_to_string(&rewards).map_err(io_err(&rewards))?;
        let records = crate::metrics::read_reward_log(&text).map_err(|reason| {
            HarnessError::BadArtifact {
                path: rewards.display().to_string(),
                reason,
            }
        })?;
        let mut out = String::from("# episode reward\n");
        for r in &records {
            out.push_str(&format!("{} {}\n", r.episode, r.reward));
        }
        let path = run_dir.join("plot_rewards.dat");
        fs::write(&path, out).map_err(io_err(&path))?;
        written.push(path);
    }
    if table.exists() {
        let records = read_evaluation_table(&table)?;
        for axis in SweepAxis::ALL {
            let mut multipliers: Vec<f64> = records
                .iter()
                .filter(|r| r.axis == axis)
                .map(|r| r.multiplier)
                .collect();
            multipliers.sort_by(f64::total_cmp);
            multipliers.dedup();
            if multipliers.is_empty() {
                continue;
            }
            let mut out =
                String::from("# multiplier ddpg_delay ddpg_qos random_delay random_qos\n");
            for m in multipliers {
                let find = |policy: PolicyKind| {
                    records
                        .iter()
                        .find(|r| r.axis == axis && r.multiplier == m && r.policy == policy)
                };
                let (Some(d), Some(r)) = (find(PolicyKind::Ddpg), find(PolicyKind::Random)) else {
                    return Err(HarnessError::BadArtifact {
                        path: table.display().to_string(),
                        reason: format!("incomplete policy pair at {axis} x{m}"),
                    });
                };
                out.push_str(&format!(
                    "{} {} {} {} {}\n",
                    m, d.delay_ratio, d.qos_ratio, r.delay_ratio, r.qos_ratio
                ));
            }
            let path = run_dir.join(format!("plot_ratios_{axis}.dat"));
            fs::write(&path, out).map_err(io_err(&path))?;
            written.push(path);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::ScenarioConfig;
    use crate::agent::AgentConfig;

    /// Small config that trains in well under a second.
    fn tiny_config() -> RunConfig {
        RunConfig {
            scenario: ScenarioConfig {
                max_vehicles: 2,
                ..ScenarioConfig::default()
            },
            episodes: 6,
            episode_steps: 10,
            checkpoint_interval: 3,
            eval_trials: 5,
            agent: AgentConfig {
                hidden_sizes: vec![8],
                buffer_capacity: 40,
                batch_size: 4,
                noise_decay_steps: 50,
                ..AgentConfig::default()
            },
            ..RunConfig::default()
        }
    }

    #[test]
    fn train_writes_all_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run");
        let config = tiny_config();
        let summary = run_train(&config, &out).unwrap();
        assert_eq!(summary.episodes.len(), 6);
        assert!(out.join(MANIFEST_FILE).exists());
        assert!(out.join(REWARD_LOG_FILE).exists());
        assert!(out.join(MODEL_FILE).exists());
        assert!(out.join("model_ep00003.bin").exists());
        assert!(out.join("model_ep00006.bin").exists());
        // The manifest parses back to the exact run config.
        let reparsed = RunConfig::from_path(out.join(MANIFEST_FILE)).unwrap();
        assert_eq!(reparsed, config);
    }

    #[test]
    fn rerun_with_same_seed_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let config = tiny_config();
        let a = dir.path().join("a");
        let b = dir.path().join("b");
        run_train(&config, &a).unwrap();
        run_train(&config, &b).unwrap();
        let log_a = fs::read(a.join(REWARD_LOG_FILE)).unwrap();
        let log_b = fs::read(b.join(REWARD_LOG_FILE)).unwrap();
        assert_eq!(log_a, log_b);
        let model_a = fs::read(a.join(MODEL_FILE)).unwrap();
        let model_b = fs::read(b.join(MODEL_FILE)).unwrap();
        assert_eq!(model_a, model_b);
    }

    #[test]
    fn evaluate_produces_paired_records_with_ordered_ratios() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run");
        let config = tiny_config();
        run_train(&config, &out).unwrap();
        let records = run_evaluate(
            &config,
            &out.join(MODEL_FILE),
            &[SweepAxis::Cache],
            40,
            &out,
        )
        .unwrap();
        // 3 multipliers x 2 policies.
        assert_eq!(records.len(), 6);
        for r in &records {
            assert!(r.qos_ratio <= r.delay_ratio + 1e-12);
            assert!((0.0..=1.0).contains(&r.qos_ratio));
        }
        let reread = read_evaluation_table(&out.join(EVALUATION_FILE)).unwrap();
        assert_eq!(reread, records);
    }

    #[test]
    fn evaluate_with_zero_trials_gives_empty_table() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run");
        let config = tiny_config();
        run_train(&config, &out).unwrap();
        let records =
            run_evaluate(&config, &out.join(MODEL_FILE), &SweepAxis::ALL, 0, &out).unwrap();
        assert!(records.is_empty());
        let reread = read_evaluation_table(&out.join(EVALUATION_FILE)).unwrap();
        assert!(reread.is_empty());
    }

    #[test]
    fn evaluate_rejects_mismatched_model() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run");
        let config = tiny_config();
        run_train(&config, &out).unwrap();
        let mut bigger = config.clone();
        bigger.scenario.max_vehicles = 3;
        let err = run_evaluate(&bigger, &out.join(MODEL_FILE), &SweepAxis::ALL, 5, &out);
        assert!(matches!(err, Err(HarnessError::ShapeMismatch { .. })));
    }

    #[test]
    fn plot_data_is_idempotent_and_complete() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run");
        let config = tiny_config();
        run_train(&config, &out).unwrap();
        run_evaluate(
            &config,
            &out.join(MODEL_FILE),
            &[SweepAxis::Spectrum, SweepAxis::Compute],
            10,
            &out,
        )
        .unwrap();
        let first = write_plot_data(&out).unwrap();
        assert_eq!(first.len(), 3); // rewards + two swept axes
        let snapshot: Vec<Vec<u8>> = first.iter().map(|p| fs::read(p).unwrap()).collect();
        let rewards_text = fs::read_to_string(&first[0]).unwrap();
        assert!(rewards_text.starts_with("# episode reward\n"));
        assert_eq!(rewards_text.lines().count(), 1 + config.episodes);
        let ratios_text = fs::read_to_string(&first[1]).unwrap();
        assert!(ratios_text.starts_with("# multiplier ddpg_delay ddpg_qos random_delay random_qos"));
        assert_eq!(ratios_text.lines().count(), 1 + SWEEP_MULTIPLIERS.len());
        let second = write_plot_data(&out).unwrap();
        assert_eq!(first, second);
        for (path, bytes) in second.iter().zip(snapshot) {
            assert_eq!(fs::read(path).unwrap(), bytes);
        }
    }

    #[test]
    fn plot_data_without_artifacts_errors() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            write_plot_data(dir.path()),
            Err(HarnessError::MissingArtifact(_))
        ));
    }

    #[test]
    fn doubling_cache_never_hurts_the_random_scheme() {
        // Paired monotonicity: same seeds, same traffic, same random
        // decisions; only the cache axis changes.
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run");
        let mut config = tiny_config();
        config.eval_trials = 1000;
        run_train(&config, &out).unwrap();
        let records = run_evaluate(
            &config,
            &out.join(MODEL_FILE),
            &[SweepAxis::Cache],
            1000,
            &out,
        )
        .unwrap();
        let ratio_at = |m: f64| {
            records
                .iter()
                .find(|r| r.policy == PolicyKind::Random && r.multiplier == m)
                .unwrap()
                .qos_ratio
        };
        assert!(ratio_at(1.0) >= ratio_at(0.5));
        assert!(ratio_at(2.0) >= ratio_at(1.0));
    }
}
