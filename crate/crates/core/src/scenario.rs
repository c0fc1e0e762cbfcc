//! Physical world model: a straight two-way road served by an MEC-mounted
//! macro base station (MeNB) and two MEC-mounted UAVs patrolling above it.
//!
//! The world advances in fixed time slots. Each slot every vehicle moves
//! along the road (wrapping at the segment ends so the population stays
//! constant), both UAVs shuttle inside their patrol zones, and every vehicle
//! draws a fresh computing task. All randomness flows from a single seeded
//! generator embedded in [`WorldState`], so equal seeds give bitwise-equal
//! trajectories.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

/// Lateral offset of each driving direction from the road axis, in meters.
pub const LANE_OFFSET_M: f64 = 2.5;

/// Lateral extent used when scaling y coordinates into [0, 1].
pub const ROAD_HALF_WIDTH_M: f64 = 5.0;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid scenario config: {0}")]
    InvalidConfig(String),
    #[error("unknown vehicle id {0}")]
    UnknownVehicle(usize),
}

/// Closed interval used for sampling and min-max feature scaling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub min: f64,
    pub max: f64,
}

impl Interval {
    pub fn new(min: f64, max: f64) -> Self {
        Self { min, max }
    }

    pub fn width(&self) -> f64 {
        self.max - self.min
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.min && v <= self.max
    }

    /// Uniform sample from the interval.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        if self.width() <= 0.0 {
            self.min
        } else {
            rng.random_range(self.min..=self.max)
        }
    }

    /// Min-max scaling of `v` into [0, 1]; degenerate intervals map to 0.5.
    pub fn scale(&self, v: f64) -> f64 {
        if self.width() <= 0.0 {
            0.5
        } else {
            (v - self.min) / self.width()
        }
    }

    /// Inverse of [`Interval::scale`].
    pub fn unscale(&self, s: f64) -> f64 {
        if self.width() <= 0.0 {
            self.min
        } else {
            self.min + s * self.width()
        }
    }
}

/// Per-vehicle computing task offloading request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaskRequest {
    /// CPU cycles the task needs.
    pub compute_cycles: f64,
    /// Input data that must be uploaded and cached, in bits.
    pub data_bits: f64,
    /// Maximum tolerated end-to-end delay, in seconds.
    pub deadline_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleState {
    pub id: usize,
    /// Ground position (x along the road, y across it), in meters.
    pub position: [f64; 2],
    /// Signed speed along the road axis, m/s.
    pub speed_mps: f64,
    pub task: TaskRequest,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UavState {
    /// 1 or 2.
    pub id: u8,
    /// (x, y, z) in meters; z stays at the configured altitude.
    pub position: [f64; 3],
    /// +1 or -1 along the road axis.
    pub heading: f64,
}

/// Which MEC server covers a vehicle's current position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coverage {
    /// Only the MeNB can serve the vehicle.
    MenbOnly,
    /// A UAV cell (0-based index) covers the vehicle, in addition to the MeNB.
    UnderUav(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// Length of the simulated road segment, meters.
    pub road_length_m: f64,
    /// MeNB antenna position (x, y, z), meters.
    pub menb_position_m: [f64; 3],
    /// Fixed UAV flight altitude, meters.
    pub uav_altitude_m: f64,
    /// UAV patrol speed, m/s.
    pub uav_speed_mps: f64,
    /// MeNB communication range, meters.
    pub menb_range_m: f64,
    /// UAV communication range (horizontal), meters.
    pub uav_range_m: f64,
    /// Minimum horizontal separation kept between the two UAVs, meters.
    pub uav_min_separation_m: f64,
    /// Number of vehicles on the segment (constant over time).
    pub max_vehicles: usize,
    /// Vehicle speed magnitudes are drawn from this interval, m/s.
    pub vehicle_speed_mps: Interval,
    /// Task compute demand interval, CPU cycles.
    pub task_compute_cycles: Interval,
    /// Task data size interval, bits.
    pub task_data_bits: Interval,
    /// Task deadline interval, seconds.
    pub task_deadline_s: Interval,
    /// Simulated duration of one time slot, seconds.
    pub step_duration_s: f64,
    pub rng_seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            road_length_m: 1200.0,
            menb_position_m: [600.0, 0.0, 50.0],
            uav_altitude_m: 40.0,
            uav_speed_mps: 10.0,
            menb_range_m: 600.0,
            uav_range_m: 100.0,
            uav_min_separation_m: 300.0,
            max_vehicles: 4,
            vehicle_speed_mps: Interval::new(10.0, 20.0),
            task_compute_cycles: Interval::new(50.0e6, 100.0e6),
            task_data_bits: Interval::new(500.0, 1000.0),
            task_deadline_s: Interval::new(0.010, 0.050),
            step_duration_s: 0.1,
            rng_seed: 1,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let err = |m: &str| Err(ScenarioError::InvalidConfig(m.to_string()));
        if self.max_vehicles == 0 {
            return err("max_vehicles must be at least 1");
        }
        for (name, v) in [
            ("road_length_m", self.road_length_m),
            ("uav_altitude_m", self.uav_altitude_m),
            ("uav_speed_mps", self.uav_speed_mps),
            ("menb_range_m", self.menb_range_m),
            ("uav_range_m", self.uav_range_m),
            ("step_duration_s", self.step_duration_s),
        ] {
            if !(v > 0.0) {
                return err(&format!("{name} must be positive"));
            }
        }
        if self.uav_min_separation_m < 0.0 {
            return err("uav_min_separation_m must be non-negative");
        }
        for (name, iv) in [
            ("vehicle_speed_mps", self.vehicle_speed_mps),
            ("task_compute_cycles", self.task_compute_cycles),
            ("task_data_bits", self.task_data_bits),
            ("task_deadline_s", self.task_deadline_s),
        ] {
            if !(iv.min > 0.0) || iv.min > iv.max {
                return err(&format!("{name} must satisfy 0 < min <= max"));
            }
        }
        if self.uav_range_m >= self.menb_range_m {
            return err("uav_range_m must be smaller than menb_range_m");
        }
        let menb_x = self.menb_position_m[0];
        if menb_x.max(self.road_length_m - menb_x) > self.menb_range_m {
            return err("road segment must lie within menb_range_m of the MeNB");
        }
        let [left, right] = self.patrol_zones();
        if left.width() <= 0.0 || right.width() <= 0.0 {
            return err("uav_min_separation_m leaves no patrol room on one side of the MeNB");
        }
        Ok(())
    }

    /// Patrol zone of each UAV: one per side of the MeNB, kept apart by the
    /// configured minimum separation.
    pub fn patrol_zones(&self) -> [Interval; 2] {
        let menb_x = self.menb_position_m[0];
        let half_gap = self.uav_min_separation_m / 2.0;
        [
            Interval::new(0.0, menb_x - half_gap),
            Interval::new(menb_x + half_gap, self.road_length_m),
        ]
    }
}

/// Snapshot of every moving object plus the outstanding task requests.
///
/// The state is a plain value: cloning it forks the world (including its
/// random stream), and clones may be advanced independently on other threads.
#[derive(Debug, Clone)]
pub struct WorldState {
    pub vehicles: Vec<VehicleState>,
    pub uavs: [UavState; 2],
    pub config: ScenarioConfig,
    rng: ChaCha12Rng,
}

impl WorldState {
    /// Builds the initial world: vehicles uniformly placed on the road, UAVs
    /// at the centers of their patrol zones, one fresh task per vehicle.
    pub fn init(config: &ScenarioConfig) -> Result<Self, ScenarioError> {
        config.validate()?;
        let mut rng = ChaCha12Rng::seed_from_u64(config.rng_seed);
        let vehicles = (0..config.max_vehicles)
            .map(|id| {
                let x = rng.random_range(0.0..config.road_length_m);
                let dir = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                let speed = dir * config.vehicle_speed_mps.sample(&mut rng);
                let task = sample_task(config, &mut rng);
                VehicleState {
                    id,
                    position: [x, dir * LANE_OFFSET_M],
                    speed_mps: speed,
                    task,
                }
            })
            .collect();
        let zones = config.patrol_zones();
        let uavs = [
            UavState {
                id: 1,
                position: [midpoint(zones[0]), 0.0, config.uav_altitude_m],
                heading: 1.0,
            },
            UavState {
                id: 2,
                position: [midpoint(zones[1]), 0.0, config.uav_altitude_m],
                heading: -1.0,
            },
        ];
        Ok(Self {
            vehicles,
            uavs,
            config: config.clone(),
            rng,
        })
    }

    pub fn vehicle_count(&self) -> usize {
        self.vehicles.len()
    }

    pub fn menb_position(&self) -> [f64; 3] {
        self.config.menb_position_m
    }

    /// Advances the world by one time slot: vehicles move with wrap-around,
    /// UAVs shuttle inside their patrol zones, and every vehicle draws a
    /// fresh task request.
    pub fn advance(&mut self) {
        let dt = self.config.step_duration_s;
        let road = self.config.road_length_m;
        for v in &mut self.vehicles {
            v.position[0] = (v.position[0] + v.speed_mps * dt).rem_euclid(road);
            v.task = sample_task(&self.config, &mut self.rng);
        }
        let zones = self.config.patrol_zones();
        let dist = self.config.uav_speed_mps * dt;
        for (uav, zone) in self.uavs.iter_mut().zip(zones) {
            uav.position[0] = shuttle(uav.position[0], &mut uav.heading, zone, dist);
        }
    }

    /// Which server's cell the vehicle currently sits in. A vehicle inside a
    /// UAV's horizontal range maps to that UAV (the nearer one when both
    /// ranges overlap, UAV 1 on exact ties); everything else is MeNB-only.
    pub fn coverage(&self, vehicle_id: usize) -> Result<Coverage, ScenarioError> {
        let v = self
            .vehicles
            .iter()
            .find(|v| v.id == vehicle_id)
            .ok_or(ScenarioError::UnknownVehicle(vehicle_id))?;
        let mut best: Option<(usize, f64)> = None;
        for (j, uav) in self.uavs.iter().enumerate() {
            let d = horizontal_distance(v.position, uav.position);
            if d <= self.config.uav_range_m && best.is_none_or(|(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        Ok(match best {
            Some((j, _)) => Coverage::UnderUav(j),
            None => Coverage::MenbOnly,
        })
    }
}

fn sample_task<R: Rng>(config: &ScenarioConfig, rng: &mut R) -> TaskRequest {
    TaskRequest {
        compute_cycles: config.task_compute_cycles.sample(rng),
        data_bits: config.task_data_bits.sample(rng),
        deadline_s: config.task_deadline_s.sample(rng),
    }
}

fn midpoint(zone: Interval) -> f64 {
    (zone.min + zone.max) / 2.0
}

/// Moves `x` by `dist` along `heading`, reflecting at the zone boundaries.
fn shuttle(x: f64, heading: &mut f64, zone: Interval, dist: f64) -> f64 {
    let mut pos = x + *heading * dist;
    loop {
        if pos > zone.max {
            pos = 2.0 * zone.max - pos;
            *heading = -1.0;
        } else if pos < zone.min {
            pos = 2.0 * zone.min - pos;
            *heading = 1.0;
        } else {
            return pos;
        }
    }
}

pub(crate) fn horizontal_distance(a: [f64; 2], b: [f64; 3]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}
