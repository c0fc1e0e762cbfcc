//! RL view of the simulator: flat state vectors, projection of raw actor
//! outputs into feasible allocation decisions, per-step rewards, and the
//! step/reset loop.
//!
//! State layout (length `5 * max_vehicles + 6`, padded with zeros when fewer
//! vehicles are present, every feature min-max scaled to [0, 1]):
//!
//! ```text
//! [compute_1..N | data_1..N | deadline_1..N | x_1..N | y_1..N |
//!  uav_x_1, uav_x_2, uav_y_1, uav_y_2, uav_z_1, uav_z_2]
//! ```
//!
//! Raw action layout (length `4 * max_vehicles`, coordinates in [-1, 1]):
//! one association logit per vehicle followed by one allocation logit per
//! vehicle for spectrum, compute, and cache.

use thiserror::Error;

use crate::network::{
    evaluate, AllocationDecision, DecisionError, EvaluationReport, RadioParams,
    ServerCapacities, ServerId, SERVERS,
};
use crate::scenario::{
    Coverage, Interval, ScenarioConfig, ScenarioError, WorldState, ROAD_HALF_WIDTH_M,
};

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("world holds {count} vehicles, state encoding allows {max}")]
    TooManyVehicles { count: usize, max: usize },
    #[error("raw action has length {got}, expected {expected}")]
    BadActionLength { expected: usize, got: usize },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Decision(#[from] DecisionError),
    #[error("invalid environment parameter: {0}")]
    InvalidParams(String),
}

/// Flat state vector length for a given vehicle capacity.
pub const fn state_dim(max_vehicles: usize) -> usize {
    5 * max_vehicles + 6
}

/// Raw action vector length for a given vehicle capacity.
pub const fn action_dim(max_vehicles: usize) -> usize {
    4 * max_vehicles
}

/// Encodes the world into the scaled flat state vector described in the
/// module docs. Slots of absent vehicles stay exactly zero.
pub fn encode_state(world: &WorldState) -> Result<Vec<f64>, EnvError> {
    let c = &world.config;
    let m = c.max_vehicles;
    let n = world.vehicles.len();
    if n > m {
        return Err(EnvError::TooManyVehicles { count: n, max: m });
    }
    let road = Interval::new(0.0, c.road_length_m);
    let lateral = Interval::new(-ROAD_HALF_WIDTH_M, ROAD_HALF_WIDTH_M);
    let altitude = Interval::new(0.0, c.uav_altitude_m);
    let mut s = vec![0.0; state_dim(m)];
    for (i, v) in world.vehicles.iter().enumerate() {
        s[i] = c.task_compute_cycles.scale(v.task.compute_cycles);
        s[m + i] = c.task_data_bits.scale(v.task.data_bits);
        s[2 * m + i] = c.task_deadline_s.scale(v.task.deadline_s);
        s[3 * m + i] = road.scale(v.position[0]);
        s[4 * m + i] = lateral.scale(v.position[1]);
    }
    let base = 5 * m;
    s[base] = road.scale(world.uavs[0].position[0]);
    s[base + 1] = road.scale(world.uavs[1].position[0]);
    s[base + 2] = lateral.scale(world.uavs[0].position[1]);
    s[base + 3] = lateral.scale(world.uavs[1].position[1]);
    s[base + 4] = altitude.scale(world.uavs[0].position[2]);
    s[base + 5] = altitude.scale(world.uavs[1].position[2]);
    Ok(s)
}

/// Normalized exponentials: positive weights summing to exactly 1.
fn softmax(logits: &[f64]) -> Vec<f64> {
    if logits.is_empty() {
        return Vec::new();
    }
    let peak = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - peak).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Projects a raw actor output onto the feasible decision set.
///
/// Association: a vehicle outside both UAV cells is pinned to the MeNB;
/// a covered vehicle goes to the MeNB when its logit is >= 0 and to its
/// covering UAV otherwise. Allocation: per server and resource, the served
/// vehicles' logits pass through a normalized exponential, so fractions are
/// positive and sum to exactly 1. The projection accepts any real inputs.
pub fn decode_action(raw: &[f64], world: &WorldState) -> Result<AllocationDecision, EnvError> {
    let m = world.config.max_vehicles;
    let n = world.vehicles.len();
    if raw.len() != action_dim(m) {
        return Err(EnvError::BadActionLength {
            expected: action_dim(m),
            got: raw.len(),
        });
    }
    if n > m {
        return Err(EnvError::TooManyVehicles { count: n, max: m });
    }
    let mut decision = AllocationDecision::empty(n);
    for i in 0..n {
        decision.serving[i] = match world.coverage(world.vehicles[i].id)? {
            Coverage::MenbOnly => ServerId::Menb,
            Coverage::UnderUav(j) => {
                if raw[i] >= 0.0 {
                    ServerId::Menb
                } else {
                    ServerId::Uav(j)
                }
            }
        };
    }
    for server in SERVERS {
        let served = decision.served_by(server);
        if served.is_empty() {
            continue;
        }
        for (offset, fractions) in [
            (m, &mut decision.spectrum_frac),
            (2 * m, &mut decision.compute_frac),
            (3 * m, &mut decision.cache_frac),
        ] {
            let logits: Vec<f64> = served.iter().map(|&i| raw[offset + i]).collect();
            for (&i, f) in served.iter().zip(softmax(&logits)) {
                fractions[i] = f;
            }
        }
    }
    Ok(decision)
}

/// Per-vehicle reward terms and the averaged step reward.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardBreakdown {
    /// Deadline-side term per vehicle, clipped from above.
    pub delay_rewards: Vec<f64>,
    /// Cache-side term per vehicle, clipped from above.
    pub cache_rewards: Vec<f64>,
    /// Mean over present vehicles of the two terms' sum; 0 for an empty world.
    pub step_reward: f64,
}

/// Logarithmic reward on the deadline and cache margins.
///
/// Each term is `log2(ratio + 0.01)` clipped from above at `clip`, where the
/// ratio is deadline/delay for the delay term and allocated-cache/data-size
/// for the cache term. An infinite delay scores `log2(0.01)`. Terms are
/// positive exactly when the ratio exceeds 0.99.
pub fn reward(world: &WorldState, report: &EvaluationReport, clip: f64) -> RewardBreakdown {
    let n = world.vehicles.len();
    let mut delay_rewards = Vec::with_capacity(n);
    let mut cache_rewards = Vec::with_capacity(n);
    let mut total = 0.0;
    for (v, o) in world.vehicles.iter().zip(&report.vehicles) {
        let delay_ratio = v.task.deadline_s / o.delay_s; // +inf delay -> 0
        let r_de = (delay_ratio + 0.01).log2().min(clip);
        let cache_ratio = o.cache_alloc_bits / v.task.data_bits;
        let r_ca = (cache_ratio + 0.01).log2().min(clip);
        total += r_de + r_ca;
        delay_rewards.push(r_de);
        cache_rewards.push(r_ca);
    }
    RewardBreakdown {
        delay_rewards,
        cache_rewards,
        step_reward: if n == 0 { 0.0 } else { total / n as f64 },
    }
}

/// Result of one environment step.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    /// Encoded state after the world advanced.
    pub state: Vec<f64>,
    pub reward: f64,
    pub breakdown: RewardBreakdown,
    /// Scoring of the decision on the pre-advance world.
    pub report: EvaluationReport,
    /// True once the configured episode length is reached.
    pub done: bool,
}

/// Simulator wrapped in step/reset semantics for a learning agent.
///
/// One instance is single-threaded; independent instances can run in
/// parallel for evaluation sweeps.
#[derive(Debug, Clone)]
pub struct Env {
    pub world: WorldState,
    pub caps: ServerCapacities,
    pub radio: RadioParams,
    pub reward_clip: f64,
    pub episode_steps: usize,
    step_in_episode: usize,
}

impl Env {
    pub fn new(
        scenario: &ScenarioConfig,
        caps: ServerCapacities,
        radio: RadioParams,
        reward_clip: f64,
        episode_steps: usize,
    ) -> Result<Self, EnvError> {
        caps.validate().map_err(EnvError::InvalidParams)?;
        radio.validate().map_err(EnvError::InvalidParams)?;
        if !(reward_clip > 0.0) {
            return Err(EnvError::InvalidParams("reward_clip must be positive".into()));
        }
        if episode_steps == 0 {
            return Err(EnvError::InvalidParams("episode_steps must be positive".into()));
        }
        Ok(Self {
            world: WorldState::init(scenario)?,
            caps,
            radio,
            reward_clip,
            episode_steps,
            step_in_episode: 0,
        })
    }

    pub fn state_dim(&self) -> usize {
        state_dim(self.world.config.max_vehicles)
    }

    pub fn action_dim(&self) -> usize {
        action_dim(self.world.config.max_vehicles)
    }

    /// Re-creates the world from the configured seed and returns the initial
    /// state.
    pub fn reset(&mut self) -> Result<Vec<f64>, EnvError> {
        self.world = WorldState::init(&self.world.config.clone())?;
        self.step_in_episode = 0;
        self.state()
    }

    /// Starts a new episode without resetting the world, so the closing state
    /// of one episode seeds the next.
    pub fn begin_episode(&mut self) {
        self.step_in_episode = 0;
    }

    pub fn state(&self) -> Result<Vec<f64>, EnvError> {
        Ok(encode_state(&self.world)?)
    }

    /// Decodes, scores, rewards, advances the world, and encodes the next
    /// state.
    pub fn step(&mut self, raw: &[f64]) -> Result<StepOutcome, EnvError> {
        let decision = decode_action(raw, &self.world)?;
        self.step_with_decision(&decision)
    }

    /// As [`Env::step`] but with an explicit decision (used by baselines).
    pub fn step_with_decision(
        &mut self,
        decision: &AllocationDecision,
    ) -> Result<StepOutcome, EnvError> {
        let report = evaluate(&self.world, decision, &self.caps, &self.radio)?;
        let breakdown = reward(&self.world, &report, self.reward_clip);
        self.world.advance();
        self.step_in_episode += 1;
        Ok(StepOutcome {
            state: self.state()?,
            reward: breakdown.step_reward,
            done: self.step_in_episode >= self.episode_steps,
            breakdown,
            report,
        })
    }
}
