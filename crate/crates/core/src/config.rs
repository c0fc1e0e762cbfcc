//! Flat `key = value` configuration files.
//!
//! One file carries every parameter of a run: scenario geometry, server
//! capacities, radio constants, environment shaping, agent hyperparameters,
//! and harness settings. Every key in the schema is required, so a run
//! manifest (which uses the same format) fully describes the run. `#` starts
//! a comment, blank lines are ignored, and unknown keys are rejected.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::agent::AgentConfig;
use crate::network::{RadioParams, ServerCapacities};
use crate::scenario::{Interval, ScenarioConfig};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config line {line}: expected 'key = value', got '{text}'")]
    Malformed { line: usize, text: String },
    #[error("config key '{0}' appears twice")]
    DuplicateKey(String),
    #[error("missing config key '{0}'")]
    MissingKey(String),
    #[error("unknown config key '{0}'")]
    UnknownKey(String),
    #[error("config key '{key}': cannot parse '{value}' as {wanted}")]
    BadValue {
        key: String,
        value: String,
        wanted: &'static str,
    },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// Parsed key/value pairs with consumption tracking, so leftover keys can be
/// reported as unknown.
struct KvMap {
    values: HashMap<String, String>,
    used: Vec<String>,
}

impl KvMap {
    fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut values = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Malformed {
                    line: idx + 1,
                    text: raw.trim().to_string(),
                });
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if values.insert(key.clone(), value).is_some() {
                return Err(ConfigError::DuplicateKey(key));
            }
        }
        Ok(Self {
            values,
            used: Vec::new(),
        })
    }

    fn raw(&mut self, key: &str) -> Result<&str, ConfigError> {
        match self.values.get(key) {
            Some(v) => {
                self.used.push(key.to_string());
                Ok(v)
            }
            None => Err(ConfigError::MissingKey(key.to_string())),
        }
    }

    fn f64(&mut self, key: &str) -> Result<f64, ConfigError> {
        let value = self.raw(key)?.to_string();
        value.parse().map_err(|_| ConfigError::BadValue {
            key: key.to_string(),
            value,
            wanted: "a number",
        })
    }

    fn usize(&mut self, key: &str) -> Result<usize, ConfigError> {
        let value = self.raw(key)?.to_string();
        value.parse().map_err(|_| ConfigError::BadValue {
            key: key.to_string(),
            value,
            wanted: "a non-negative integer",
        })
    }

    fn u64(&mut self, key: &str) -> Result<u64, ConfigError> {
        let value = self.raw(key)?.to_string();
        value.parse().map_err(|_| ConfigError::BadValue {
            key: key.to_string(),
            value,
            wanted: "a non-negative integer",
        })
    }

    fn usize_list(&mut self, key: &str) -> Result<Vec<usize>, ConfigError> {
        let value = self.raw(key)?.to_string();
        value
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| ConfigError::BadValue {
                key: key.to_string(),
                value,
                wanted: "a comma-separated list of integers",
            })
    }

    fn finish(self) -> Result<(), ConfigError> {
        let mut unknown: Vec<&String> = self
            .values
            .keys()
            .filter(|k| !self.used.contains(k))
            .collect();
        unknown.sort();
        match unknown.first() {
            Some(k) => Err(ConfigError::UnknownKey((*k).clone())),
            None => Ok(()),
        }
    }
}

/// Every parameter of a training or evaluation run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioConfig,
    pub caps: ServerCapacities,
    pub radio: RadioParams,
    /// Upper clip applied to each reward term.
    pub reward_clip: f64,
    /// Steps per training episode.
    pub episode_steps: usize,
    /// Training episodes per run.
    pub episodes: usize,
    pub agent: AgentConfig,
    /// Checkpoint every this many episodes (0 = only the final model).
    pub checkpoint_interval: usize,
    /// Evaluation steps per sweep point.
    pub eval_trials: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioConfig::default(),
            caps: ServerCapacities::default(),
            radio: RadioParams::default(),
            reward_clip: 0.1,
            episode_steps: 100,
            episodes: 500,
            agent: AgentConfig::default(),
            checkpoint_interval: 100,
            eval_trials: 1000,
        }
    }
}

impl RunConfig {
    pub fn from_path<P: AsRef<Path>>(path: P) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_str_checked(&text)
    }

    pub fn from_str_checked(text: &str) -> Result<Self, ConfigError> {
        let mut kv = KvMap::parse(text)?;
        let scenario = ScenarioConfig {
            road_length_m: kv.f64("road_length_m")?,
            menb_position_m: [kv.f64("menb_x_m")?, kv.f64("menb_y_m")?, kv.f64("menb_z_m")?],
            uav_altitude_m: kv.f64("uav_altitude_m")?,
            uav_speed_mps: kv.f64("uav_speed_mps")?,
            menb_range_m: kv.f64("menb_range_m")?,
            uav_range_m: kv.f64("uav_range_m")?,
            uav_min_separation_m: kv.f64("uav_min_separation_m")?,
            max_vehicles: kv.usize("max_vehicles")?,
            vehicle_speed_mps: Interval::new(
                kv.f64("vehicle_speed_min_mps")?,
                kv.f64("vehicle_speed_max_mps")?,
            ),
            task_compute_cycles: Interval::new(
                kv.f64("task_compute_min_cycles")?,
                kv.f64("task_compute_max_cycles")?,
            ),
            task_data_bits: Interval::new(
                kv.f64("task_data_min_bits")?,
                kv.f64("task_data_max_bits")?,
            ),
            task_deadline_s: Interval::new(
                kv.f64("task_deadline_min_s")?,
                kv.f64("task_deadline_max_s")?,
            ),
            step_duration_s: kv.f64("step_duration_s")?,
            rng_seed: kv.u64("rng_seed")?,
        };
        let caps = ServerCapacities {
            menb_spectrum_hz: kv.f64("menb_spectrum_hz")?,
            uav_spectrum_hz: kv.f64("uav_spectrum_hz")?,
            menb_compute_cps: kv.f64("menb_compute_cps")?,
            uav_compute_cps: kv.f64("uav_compute_cps")?,
            menb_cache_bits: kv.f64("menb_cache_bits")?,
            uav_cache_bits: kv.f64("uav_cache_bits")?,
        };
        let radio = RadioParams {
            tx_power_w: kv.f64("tx_power_w")?,
            noise_power_w: kv.f64("noise_power_w")?,
        };
        let agent = AgentConfig {
            actor_lr: kv.f64("actor_lr")?,
            critic_lr: kv.f64("critic_lr")?,
            discount: kv.f64("discount")?,
            actor_blend: kv.f64("actor_soft_update")?,
            critic_blend: kv.f64("critic_soft_update")?,
            buffer_capacity: kv.usize("buffer_capacity")?,
            batch_size: kv.usize("batch_size")?,
            noise_scale_init: kv.f64("noise_scale_init")?,
            noise_scale_final: kv.f64("noise_scale_final")?,
            noise_decay_steps: kv.u64("noise_decay_steps")?,
            hidden_sizes: kv.usize_list("hidden_sizes")?,
            grad_clip_norm: kv.f64("grad_clip_norm")?,
            seed: kv.u64("agent_seed")?,
        };
        let config = Self {
            scenario,
            caps,
            radio,
            reward_clip: kv.f64("reward_clip")?,
            episode_steps: kv.usize("episode_steps")?,
            episodes: kv.usize("episodes")?,
            agent,
            checkpoint_interval: kv.usize("checkpoint_interval")?,
            eval_trials: kv.usize("eval_trials")?,
        };
        kv.finish()?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.scenario
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.caps.validate().map_err(ConfigError::Invalid)?;
        self.radio.validate().map_err(ConfigError::Invalid)?;
        self.agent.validate().map_err(ConfigError::Invalid)?;
        if !(self.reward_clip > 0.0) {
            return Err(ConfigError::Invalid("reward_clip must be positive".into()));
        }
        if self.episode_steps == 0 {
            return Err(ConfigError::Invalid("episode_steps must be positive".into()));
        }
        Ok(())
    }

    /// Renders the config in its own file format; parsing the result yields
    /// an identical config, so manifests double as reusable config files.
    pub fn to_config_string(&self) -> String {
        let s = &self.scenario;
        let mut out = String::new();
        let _ = writeln!(out, "# scenario");
        let _ = writeln!(out, "road_length_m = {}", s.road_length_m);
        let _ = writeln!(out, "menb_x_m = {}", s.menb_position_m[0]);
        let _ = writeln!(out, "menb_y_m = {}", s.menb_position_m[1]);
        let _ = writeln!(out, "menb_z_m = {}", s.menb_position_m[2]);
        let _ = writeln!(out, "uav_altitude_m = {}", s.uav_altitude_m);
        let _ = writeln!(out, "uav_speed_mps = {}", s.uav_speed_mps);
        let _ = writeln!(out, "menb_range_m = {}", s.menb_range_m);
        let _ = writeln!(out, "uav_range_m = {}", s.uav_range_m);
        let _ = writeln!(out, "uav_min_separation_m = {}", s.uav_min_separation_m);
        let _ = writeln!(out, "max_vehicles = {}", s.max_vehicles);
        let _ = writeln!(out, "vehicle_speed_min_mps = {}", s.vehicle_speed_mps.min);
        let _ = writeln!(out, "vehicle_speed_max_mps = {}", s.vehicle_speed_mps.max);
        let _ = writeln!(out, "task_compute_min_cycles = {}", s.task_compute_cycles.min);
        let _ = writeln!(out, "task_compute_max_cycles = {}", s.task_compute_cycles.max);
        let _ = writeln!(out, "task_data_min_bits = {}", s.task_data_bits.min);
        let _ = writeln!(out, "task_data_max_bits = {}", s.task_data_bits.max);
        let _ = writeln!(out, "task_deadline_min_s = {}", s.task_deadline_s.min);
        let _ = writeln!(out, "task_deadline_max_s = {}", s.task_deadline_s.max);
        let _ = writeln!(out, "step_duration_s = {}", s.step_duration_s);
        let _ = writeln!(out, "rng_seed = {}", s.rng_seed);
        let _ = writeln!(out);
        let _ = writeln!(out, "# server capacities");
        let _ = writeln!(out, "menb_spectrum_hz = {}", self.caps.menb_spectrum_hz);
        let _ = writeln!(out, "uav_spectrum_hz = {}", self.caps.uav_spectrum_hz);
        let _ = writeln!(out, "menb_compute_cps = {}", self.caps.menb_compute_cps);
        let _ = writeln!(out, "uav_compute_cps = {}", self.caps.uav_compute_cps);
        let _ = writeln!(out, "menb_cache_bits = {}", self.caps.menb_cache_bits);
        let _ = writeln!(out, "uav_cache_bits = {}", self.caps.uav_cache_bits);
        let _ = writeln!(out);
        let _ = writeln!(out, "# radio");
        let _ = writeln!(out, "tx_power_w = {}", self.radio.tx_power_w);
        let _ = writeln!(out, "noise_power_w = {}", self.radio.noise_power_w);
        let _ = writeln!(out);
        let _ = writeln!(out, "# environment");
        let _ = writeln!(out, "reward_clip = {}", self.reward_clip);
        let _ = writeln!(out, "episode_steps = {}", self.episode_steps);
        let _ = writeln!(out);
        let a = &self.agent;
        let hidden: Vec<String> = a.hidden_sizes.iter().map(|h| h.to_string()).collect();
        let _ = writeln!(out, "# agent");
        let _ = writeln!(out, "actor_lr = {}", a.actor_lr);
        let _ = writeln!(out, "critic_lr = {}", a.critic_lr);
        let _ = writeln!(out, "discount = {}", a.discount);
        let _ = writeln!(out, "actor_soft_update = {}", a.actor_blend);
        let _ = writeln!(out, "critic_soft_update = {}", a.critic_blend);
        let _ = writeln!(out, "buffer_capacity = {}", a.buffer_capacity);
        let _ = writeln!(out, "batch_size = {}", a.batch_size);
        let _ = writeln!(out, "noise_scale_init = {}", a.noise_scale_init);
        let _ = writeln!(out, "noise_scale_final = {}", a.noise_scale_final);
        let _ = writeln!(out, "noise_decay_steps = {}", a.noise_decay_steps);
        let _ = writeln!(out, "hidden_sizes = {}", hidden.join(","));
        let _ = writeln!(out, "grad_clip_norm = {}", a.grad_clip_norm);
        let _ = writeln!(out, "agent_seed = {}", a.seed);
        let _ = writeln!(out);
        let _ = writeln!(out, "# harness");
        let _ = writeln!(out, "episodes = {}", self.episodes);
        let _ = writeln!(out, "checkpoint_interval = {}", self.checkpoint_interval);
        let _ = writeln!(out, "eval_trials = {}", self.eval_trials);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_through_text() {
        let config = RunConfig::default();
        let text = config.to_config_string();
        let parsed = RunConfig::from_str_checked(&text).unwrap();
        assert_eq!(parsed, config);
    }

    #[test]
    fn shipped_default_config_matches_builtin_defaults() {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/default.cfg");
        let parsed = RunConfig::from_path(path).unwrap();
        assert_eq!(parsed, RunConfig::default());
    }

    #[test]
    fn shipped_full_scale_config_parses() {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/full_scale.cfg");
        let parsed = RunConfig::from_path(path).unwrap();
        assert_eq!(parsed.episode_steps, 1100);
        assert_eq!(parsed.episodes, 1000);
        assert_eq!(parsed.eval_trials, 10000);
    }

    #[test]
    fn missing_key_is_named() {
        let text = RunConfig::default()
            .to_config_string()
            .lines()
            .filter(|l| !l.starts_with("critic_lr"))
            .collect::<Vec<_>>()
            .join("\n");
        match RunConfig::from_str_checked(&text) {
            Err(ConfigError::MissingKey(key)) => assert_eq!(key, "critic_lr"),
            other => panic!("expected MissingKey, got {other:?}"),
        }
    }

    #[test]
    fn unknown_key_is_named() {
        let mut text = RunConfig::default().to_config_string();
        text.push_str("mystery_knob = 3\n");
        match RunConfig::from_str_checked(&text) {
            Err(ConfigError::UnknownKey(key)) => assert_eq!(key, "mystery_knob"),
            other => panic!("expected UnknownKey, got {other:?}"),
        }
    }

    #[test]
    fn unparseable_value_is_reported_with_key() {
        let text = RunConfig::default()
            .to_config_string()
            .replace("discount = 0.9", "discount = often");
        match RunConfig::from_str_checked(&text) {
            Err(ConfigError::BadValue { key, .. }) => assert_eq!(key, "discount"),
            other => panic!("expected BadValue, got {other:?}"),
        }
    }

    #[test]
    fn malformed_line_is_rejected() {
        let mut text = RunConfig::default().to_config_string();
        text.push_str("justakeyword\n");
        assert!(matches!(
            RunConfig::from_str_checked(&text),
            Err(ConfigError::Malformed { .. })
        ));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let mut text = String::from("\n# leading comment\n\n");
        text.push_str(&RunConfig::default().to_config_string());
        text.push_str("\n# trailing comment\n");
        assert!(RunConfig::from_str_checked(&text).is_ok());
    }

    #[test]
    fn semantic_validation_runs_after_parsing() {
        let text = RunConfig::default()
            .to_config_string()
            .replace("discount = 0.9", "discount = 1.5");
        assert!(matches!(
            RunConfig::from_str_checked(&text),
            Err(ConfigError::Invalid(_))
        ));
    }
}
