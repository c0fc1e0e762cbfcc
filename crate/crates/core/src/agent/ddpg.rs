//! Deterministic actor-critic learner: evaluation and target copies of both
//! networks, replay-driven one-step updates, decaying Gaussian exploration
//! noise, and the training loop.
//!
//! Updates are plain stochastic gradient steps at the configured learning
//! rates. Target networks track the evaluation networks through soft blending
//! and never receive gradients themselves.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::agent::mlp::{Activation, Mlp};
use crate::agent::replay::{ReplayBuffer, Transition};
use crate::env::{Env, EnvError};

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("invalid agent config: {0}")]
    InvalidConfig(String),
    #[error("update called with an empty batch")]
    EmptyBatch,
    #[error("agent expects {expected}-dim {what}, got {got}")]
    ShapeMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error("checkpoint io: {0}")]
    Io(#[from] io::Error),
    #[error("bad checkpoint: {0}")]
    BadCheckpoint(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentConfig {
    pub actor_lr: f64,
    pub critic_lr: f64,
    /// Discount factor on future rewards.
    pub discount: f64,
    /// Soft-update rate of the actor target network.
    pub actor_blend: f64,
    /// Soft-update rate of the critic target network.
    pub critic_blend: f64,
    pub buffer_capacity: usize,
    pub batch_size: usize,
    /// Exploration noise scale at step 0.
    pub noise_scale_init: f64,
    /// Noise floor after the decay window.
    pub noise_scale_final: f64,
    /// Environment steps over which the noise scale decays linearly.
    pub noise_decay_steps: u64,
    pub hidden_sizes: Vec<usize>,
    /// Global-norm gradient clip; 0 disables clipping.
    pub grad_clip_norm: f64,
    pub seed: u64,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            actor_lr: 0.0005,
            critic_lr: 0.005,
            discount: 0.9,
            actor_blend: 0.05,
            critic_blend: 0.05,
            buffer_capacity: 10_000,
            batch_size: 32,
            noise_scale_init: 0.5,
            noise_scale_final: 0.02,
            noise_decay_steps: 30_000,
            hidden_sizes: vec![128, 128],
            grad_clip_norm: 1.0,
            seed: 1,
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.actor_lr < 0.0 || self.critic_lr < 0.0 {
            return Err("learning rates must be non-negative".into());
        }
        if !(self.discount > 0.0 && self.discount < 1.0) {
            return Err("discount must lie in (0, 1)".into());
        }
        for (name, k) in [
            ("actor_blend", self.actor_blend),
            ("critic_blend", self.critic_blend),
        ] {
            if !(k > 0.0 && k <= 1.0) {
                return Err(format!("{name} must lie in (0, 1]"));
            }
        }
        if self.buffer_capacity == 0 || self.batch_size == 0 {
            return Err("buffer_capacity and batch_size must be positive".into());
        }
        if self.noise_scale_init < 0.0 || self.noise_scale_final < 0.0 {
            return Err("noise scales must be non-negative".into());
        }
        if self.noise_scale_final > self.noise_scale_init {
            return Err("noise_scale_final must not exceed noise_scale_init".into());
        }
        if self.hidden_sizes.is_empty() || self.hidden_sizes.contains(&0) {
            return Err("hidden_sizes must be non-empty and positive".into());
        }
        if self.grad_clip_norm < 0.0 {
            return Err("grad_clip_norm must be non-negative".into());
        }
        Ok(())
    }
}

/// Training log entry: total reward accumulated over one episode.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRecord {
    /// 1-based episode index.
    pub episode: usize,
    pub reward: f64,
}

pub struct DdpgAgent {
    pub actor: Mlp,
    pub critic: Mlp,
    pub actor_target: Mlp,
    pub critic_target: Mlp,
    pub buffer: ReplayBuffer,
    config: AgentConfig,
    state_dim: usize,
    action_dim: usize,
    /// Environment steps taken so far; drives the noise decay.
    env_steps: u64,
    rng: ChaCha12Rng,
}

const CHECKPOINT_MAGIC: &[u8; 4] = b"DDP1";

impl DdpgAgent {
    pub fn new(
        state_dim: usize,
        action_dim: usize,
        config: AgentConfig,
    ) -> Result<Self, AgentError> {
        config.validate().map_err(AgentError::InvalidConfig)?;
        if state_dim == 0 || action_dim == 0 {
            return Err(AgentError::InvalidConfig(
                "state and action dimensions must be positive".into(),
            ));
        }
        let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
        let mut actor_sizes = vec![state_dim];
        actor_sizes.extend(&config.hidden_sizes);
        actor_sizes.push(action_dim);
        let mut critic_sizes = vec![state_dim + action_dim];
        critic_sizes.extend(&config.hidden_sizes);
        critic_sizes.push(1);
        let actor = Mlp::new(&actor_sizes, Activation::Tanh, &mut rng);
        let critic = Mlp::new(&critic_sizes, Activation::Identity, &mut rng);
        Ok(Self {
            actor_target: actor.clone(),
            critic_target: critic.clone(),
            actor,
            critic,
            buffer: ReplayBuffer::new(config.buffer_capacity),
            state_dim,
            action_dim,
            env_steps: 0,
            rng,
            config,
        })
    }

    pub fn config(&self) -> &AgentConfig {
        &self.config
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn action_dim(&self) -> usize {
        self.action_dim
    }

    pub fn env_steps(&self) -> u64 {
        self.env_steps
    }

    /// Current exploration noise scale: linear decay from the initial value
    /// to the floor over the configured step window.
    pub fn noise_scale(&self) -> f64 {
        let c = &self.config;
        if c.noise_decay_steps == 0 || self.env_steps >= c.noise_decay_steps {
            return c.noise_scale_final;
        }
        let t = self.env_steps as f64 / c.noise_decay_steps as f64;
        c.noise_scale_init + (c.noise_scale_final - c.noise_scale_init) * t
    }

    /// Deterministic policy output for `state`.
    pub fn act(&self, state: &[f64]) -> Result<Vec<f64>, AgentError> {
        self.check_state(state)?;
        Ok(self.actor.forward(state))
    }

    /// Policy output plus Gaussian exploration noise, clamped to the
    /// actuator range; advances the noise decay clock.
    pub fn act_explore(&mut self, state: &[f64]) -> Result<Vec<f64>, AgentError> {
        let mut action = self.act(state)?;
        let scale = self.noise_scale();
        for a in &mut action {
            let n: f64 = self.rng.sample(StandardNormal);
            *a = (*a + scale * n).clamp(-1.0, 1.0);
        }
        self.env_steps += 1;
        Ok(action)
    }

    /// Q estimate of the evaluation critic for a state-action pair.
    pub fn q_value(&self, state: &[f64], action: &[f64]) -> Result<f64, AgentError> {
        self.check_state(state)?;
        self.check_action(action)?;
        Ok(self.critic.forward(&concat(state, action))[0])
    }

    /// One descent step of the evaluation critic on the mean squared
    /// one-step temporal-difference error; returns the pre-step loss.
    /// Targets come from the target actor and target critic.
    pub fn critic_update(&mut self, batch: &[Transition]) -> Result<f64, AgentError> {
        if batch.is_empty() {
            return Err(AgentError::EmptyBatch);
        }
        self.check_batch(batch)?;
        let m = batch.len() as f64;
        let mut grads = self.critic.zero_gradients();
        let mut loss = 0.0;
        for t in batch {
            let next_action = self.actor_target.forward(&t.next_state);
            let q_next = self.critic_target.forward(&concat(&t.next_state, &next_action))[0];
            let target = t.reward + self.config.discount * q_next;
            let trace = self.critic.forward_trace(&concat(&t.state, &t.action));
            let q = trace.output()[0];
            let err = q - target;
            loss += err * err;
            self.critic.backward(&trace, &[2.0 * err / m], &mut grads);
        }
        clip_gradients(&mut grads, self.config.grad_clip_norm);
        self.critic.apply_gradients(&grads, -self.config.critic_lr);
        Ok(loss / m)
    }

    /// One ascent step of the evaluation actor on the mean critic value of
    /// its own actions, with gradients flowing through the critic; returns
    /// the pre-step objective. The critic itself is left untouched.
    pub fn actor_update(&mut self, batch: &[Transition]) -> Result<f64, AgentError> {
        if batch.is_empty() {
            return Err(AgentError::EmptyBatch);
        }
        self.check_batch(batch)?;
        let m = batch.len() as f64;
        let mut actor_grads = self.actor.zero_gradients();
        // Scratch space: critic parameter gradients are computed but unused.
        let mut critic_scratch = self.critic.zero_gradients();
        let mut objective = 0.0;
        for t in batch {
            let actor_trace = self.actor.forward_trace(&t.state);
            let action = actor_trace.output().to_vec();
            let critic_trace = self.critic.forward_trace(&concat(&t.state, &action));
            objective += critic_trace.output()[0];
            let input_grad = self.critic.backward(&critic_trace, &[1.0 / m], &mut critic_scratch);
            self.actor.backward(&actor_trace, &input_grad[self.state_dim..], &mut actor_grads);
        }
        clip_gradients(&mut actor_grads, self.config.grad_clip_norm);
        self.actor.apply_gradients(&actor_grads, self.config.actor_lr);
        Ok(objective / m)
    }

    /// Blends both evaluation networks into their targets at the configured
    /// rates.
    pub fn soft_update(&mut self) {
        self.actor_target.blend_from(&self.actor, self.config.actor_blend);
        self.critic_target.blend_from(&self.critic, self.config.critic_blend);
    }

    /// Runs one episode: explore, store, and (once the buffer is full)
    /// update critic, actor, and targets every step. The episode starts from
    /// `state` and returns the total reward plus the closing state, which
    /// seeds the next episode.
    pub fn run_episode(
        &mut self,
        env: &mut Env,
        state: Vec<f64>,
    ) -> Result<(f64, Vec<f64>), AgentError> {
        env.begin_episode();
        let mut state = state;
        let mut total = 0.0;
        loop {
            let action = self.act_explore(&state)?;
            let out = env.step(&action)?;
            let ready = self.buffer.is_full();
            self.buffer.push(Transition {
                state,
                action,
                reward: out.reward,
                next_state: out.state.clone(),
            });
            if ready {
                let batch = self.buffer.sample(&mut self.rng, self.config.batch_size);
                self.critic_update(&batch)?;
                self.actor_update(&batch)?;
                self.soft_update();
            }
            total += out.reward;
            state = out.state;
            if out.done {
                return Ok((total, state));
            }
        }
    }

    /// Full training run: resets the environment once, then chains episodes,
    /// carrying each closing state into the next episode.
    pub fn train(
        &mut self,
        env: &mut Env,
        episodes: usize,
    ) -> Result<Vec<EpisodeRecord>, AgentError> {
        if env.state_dim() != self.state_dim {
            return Err(AgentError::ShapeMismatch {
                what: "state",
                expected: self.state_dim,
                got: env.state_dim(),
            });
        }
        if env.action_dim() != self.action_dim {
            return Err(AgentError::ShapeMismatch {
                what: "action",
                expected: self.action_dim,
                got: env.action_dim(),
            });
        }
        let mut state = env.reset()?;
        let mut log = Vec::with_capacity(episodes);
        for episode in 1..=episodes {
            let (reward, next) = self.run_episode(env, state)?;
            state = next;
            log.push(EpisodeRecord { episode, reward });
        }
        Ok(log)
    }

    /// Writes the checkpoint: magic `DDP1`, u32 state dim, u32 action dim,
    /// u64 environment-step counter, then the four networks (actor, critic,
    /// actor target, critic target) in the flat network format.
    pub fn save<W: Write>(&self, w: &mut W) -> Result<(), AgentError> {
        w.write_all(CHECKPOINT_MAGIC)?;
        w.write_all(&(self.state_dim as u32).to_le_bytes())?;
        w.write_all(&(self.action_dim as u32).to_le_bytes())?;
        w.write_all(&self.env_steps.to_le_bytes())?;
        for net in [&self.actor, &self.critic, &self.actor_target, &self.critic_target] {
            net.save(w)?;
        }
        Ok(())
    }

    pub fn save_to_path<P: AsRef<Path>>(&self, path: P) -> Result<(), AgentError> {
        let mut w = BufWriter::new(File::create(path)?);
        self.save(&mut w)?;
        w.flush()?;
        Ok(())
    }

    /// Restores a checkpoint. The replay buffer starts empty; `config`
    /// supplies the run-time hyperparameters and must agree with the stored
    /// network shapes.
    pub fn load<R: Read>(r: &mut R, config: AgentConfig) -> Result<Self, AgentError> {
        config.validate().map_err(AgentError::InvalidConfig)?;
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != CHECKPOINT_MAGIC {
            return Err(AgentError::BadCheckpoint("bad magic".into()));
        }
        let mut u32buf = [0u8; 4];
        r.read_exact(&mut u32buf)?;
        let state_dim = u32::from_le_bytes(u32buf) as usize;
        r.read_exact(&mut u32buf)?;
        let action_dim = u32::from_le_bytes(u32buf) as usize;
        let mut u64buf = [0u8; 8];
        r.read_exact(&mut u64buf)?;
        let env_steps = u64::from_le_bytes(u64buf);
        let actor = Mlp::load(r)?;
        let critic = Mlp::load(r)?;
        let actor_target = Mlp::load(r)?;
        let critic_target = Mlp::load(r)?;
        if actor.input_dim() != state_dim
            || actor.output_dim() != action_dim
            || critic.input_dim() != state_dim + action_dim
            || critic.output_dim() != 1
        {
            return Err(AgentError::BadCheckpoint(
                "network shapes disagree with header dims".into(),
            ));
        }
        Ok(Self {
            actor,
            critic,
            actor_target,
            critic_target,
            buffer: ReplayBuffer::new(config.buffer_capacity),
            state_dim,
            action_dim,
            env_steps,
            rng: ChaCha12Rng::seed_from_u64(config.seed),
            config,
        })
    }

    pub fn load_from_path<P: AsRef<Path>>(path: P, config: AgentConfig) -> Result<Self, AgentError> {
        let mut r = BufReader::new(File::open(path)?);
        Self::load(&mut r, config)
    }

    fn check_state(&self, state: &[f64]) -> Result<(), AgentError> {
        if state.len() != self.state_dim {
            return Err(AgentError::ShapeMismatch {
                what: "state",
                expected: self.state_dim,
                got: state.len(),
            });
        }
        Ok(())
    }

    fn check_action(&self, action: &[f64]) -> Result<(), AgentError> {
        if action.len() != self.action_dim {
            return Err(AgentError::ShapeMismatch {
                what: "action",
                expected: self.action_dim,
                got: action.len(),
            });
        }
        Ok(())
    }

    fn check_batch(&self, batch: &[Transition]) -> Result<(), AgentError> {
        for t in batch {
            self.check_state(&t.state)?;
            self.check_state(&t.next_state)?;
            self.check_action(&t.action)?;
        }
        Ok(())
    }
}

fn concat(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut v = Vec::with_capacity(a.len() + b.len());
    v.extend_from_slice(a);
    v.extend_from_slice(b);
    v
}

fn clip_gradients(grads: &mut crate::agent::mlp::Gradients, max_norm: f64) {
    if max_norm <= 0.0 {
        return;
    }
    let norm = grads.global_norm();
    if norm > max_norm {
        grads.scale(max_norm / norm);
    }
}
