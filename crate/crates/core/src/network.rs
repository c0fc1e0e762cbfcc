//! Uplink channel model and allocation scoring.
//!
//! Rates follow the Shannon form over deterministic log-distance path loss.
//! MeNB uplinks get a dedicated band; the two UAVs reuse one band, so a
//! transmission to one UAV interferes at the other on the overlapping part
//! of the subband layout. `evaluate` turns an [`AllocationDecision`] into
//! per-vehicle delays and satisfaction flags plus the aggregate objective
//! (the number of tasks whose deadline and cache requirements are both met).

use thiserror::Error;

use crate::scenario::{Coverage, TaskRequest, WorldState};

/// Per-server, per-resource fraction sums must match 1 this tightly.
pub const FRACTION_SUM_TOLERANCE: f64 = 1e-9;

/// Path-loss distances are clamped below this to avoid the d -> 0 singularity.
const MIN_PATH_DISTANCE_M: f64 = 1.0;

#[derive(Debug, Error, PartialEq)]
pub enum DecisionError {
    #[error("decision covers {got} vehicles, world has {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("vehicle {vehicle}: fraction {value} outside [0, 1]")]
    FractionOutOfRange { vehicle: usize, value: f64 },
    #[error("vehicle {vehicle}: association infeasible for its coverage")]
    InfeasibleAssociation { vehicle: usize },
    #[error("{server:?} {resource} fractions sum to {sum}, expected 1")]
    SimplexSumViolation {
        server: ServerId,
        resource: &'static str,
        sum: f64,
    },
}

/// Total resource pools of the three MEC servers. Both UAVs share one
/// definition: each carries `uav_*` of every resource, and they reuse the
/// same spectrum band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServerCapacities {
    pub menb_spectrum_hz: f64,
    pub uav_spectrum_hz: f64,
    pub menb_compute_cps: f64,
    pub uav_compute_cps: f64,
    pub menb_cache_bits: f64,
    pub uav_cache_bits: f64,
}

impl Default for ServerCapacities {
    fn default() -> Self {
        Self {
            menb_spectrum_hz: 10.0e6,
            uav_spectrum_hz: 2.0e6,
            menb_compute_cps: 250.0e9,
            uav_compute_cps: 30.0e9,
            menb_cache_bits: 50.0e3,
            uav_cache_bits: 6.0e3,
        }
    }
}

impl ServerCapacities {
    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [
            ("menb_spectrum_hz", self.menb_spectrum_hz),
            ("uav_spectrum_hz", self.uav_spectrum_hz),
            ("menb_compute_cps", self.menb_compute_cps),
            ("uav_compute_cps", self.uav_compute_cps),
            ("menb_cache_bits", self.menb_cache_bits),
            ("uav_cache_bits", self.uav_cache_bits),
        ] {
            if !(v > 0.0) {
                return Err(format!("{name} must be positive"));
            }
        }
        Ok(())
    }

    pub fn spectrum_of(&self, server: ServerId) -> f64 {
        match server {
            ServerId::Menb => self.menb_spectrum_hz,
            ServerId::Uav(_) => self.uav_spectrum_hz,
        }
    }

    pub fn compute_of(&self, server: ServerId) -> f64 {
        match server {
            ServerId::Menb => self.menb_compute_cps,
            ServerId::Uav(_) => self.uav_compute_cps,
        }
    }

    pub fn cache_of(&self, server: ServerId) -> f64 {
        match server {
            ServerId::Menb => self.menb_cache_bits,
            ServerId::Uav(_) => self.uav_cache_bits,
        }
    }
}

/// Vehicle transmit power and receiver noise, shared by every uplink.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioParams {
    pub tx_power_w: f64,
    pub noise_power_w: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            tx_power_w: 1.0,
            // -104 dBm, i.e. 10^-13.4 W.
            noise_power_w: 3.9810717055349693e-14,
        }
    }
}

impl RadioParams {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.tx_power_w > 0.0) {
            return Err("tx_power_w must be positive".into());
        }
        if !(self.noise_power_w > 0.0) {
            return Err("noise_power_w must be positive".into());
        }
        Ok(())
    }
}

/// One of the three MEC servers; UAVs are indexed 0 and 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ServerId {
    Menb,
    Uav(usize),
}

pub const SERVERS: [ServerId; 3] = [ServerId::Menb, ServerId::Uav(0), ServerId::Uav(1)];

/// Joint association and resource split for every vehicle currently present.
///
/// `serving[i]` is vehicle i's server; the three fraction vectors hold the
/// share of that server's spectrum/compute/cache granted to the vehicle.
/// On each server that serves at least one vehicle, the served vehicles'
/// fractions of every resource sum to 1 (a server nobody uses idles with all
/// fractions zero).
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationDecision {
    pub serving: Vec<ServerId>,
    pub spectrum_frac: Vec<f64>,
    pub compute_frac: Vec<f64>,
    pub cache_frac: Vec<f64>,
}

impl AllocationDecision {
    pub fn empty(n: usize) -> Self {
        Self {
            serving: vec![ServerId::Menb; n],
            spectrum_frac: vec![0.0; n],
            compute_frac: vec![0.0; n],
            cache_frac: vec![0.0; n],
        }
    }

    /// Vehicles (by index) served by `server`, in index order.
    pub fn served_by(&self, server: ServerId) -> Vec<usize> {
        self.serving
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == server)
            .map(|(i, _)| i)
            .collect()
    }

    /// Checks every structural invariant against the world's coverage map.
    pub fn validate(&self, world: &WorldState) -> Result<(), DecisionError> {
        let n = world.vehicles.len();
        if self.serving.len() != n
            || self.spectrum_frac.len() != n
            || self.compute_frac.len() != n
            || self.cache_frac.len() != n
        {
            return Err(DecisionError::LengthMismatch {
                expected: n,
                got: self.serving.len(),
            });
        }
        for i in 0..n {
            for f in [self.spectrum_frac[i], self.compute_frac[i], self.cache_frac[i]] {
                if !f.is_finite() || !(0.0..=1.0).contains(&f) {
                    return Err(DecisionError::FractionOutOfRange {
                        vehicle: i,
                        value: f,
                    });
                }
            }
            match self.serving[i] {
                ServerId::Menb => {}
                ServerId::Uav(j) => {
                    // Only the UAV whose cell covers the vehicle may serve it.
                    let covered = world
                        .coverage(world.vehicles[i].id)
                        .map_err(|_| DecisionError::InfeasibleAssociation { vehicle: i })?;
                    if covered != Coverage::UnderUav(j) {
                        return Err(DecisionError::InfeasibleAssociation { vehicle: i });
                    }
                }
            }
        }
        for server in SERVERS {
            let served = self.served_by(server);
            if served.is_empty() {
                continue;
            }
            for (resource, fractions) in [
                ("spectrum", &self.spectrum_frac),
                ("compute", &self.compute_frac),
                ("cache", &self.cache_frac),
            ] {
                let sum: f64 = served.iter().map(|&i| fractions[i]).sum();
                if (sum - 1.0).abs() > FRACTION_SUM_TOLERANCE {
                    return Err(DecisionError::SimplexSumViolation {
                        server,
                        resource,
                        sum,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Linear power gain of a vehicle-to-MeNB uplink at 3-D distance `d` meters.
pub fn gain_to_menb(distance_m: f64) -> f64 {
    let d = distance_m.max(MIN_PATH_DISTANCE_M);
    10f64.powf((-30.0 - 35.0 * d.log10()) / 10.0)
}

/// Linear power gain of a vehicle-to-UAV uplink at 3-D distance `d` meters.
pub fn gain_to_uav(distance_m: f64) -> f64 {
    let d = distance_m.max(MIN_PATH_DISTANCE_M);
    10f64.powf((-40.0 - 35.0 * d.log10()) / 10.0)
}

/// Uplink rate to the MeNB, bits/s, on an interference-free band.
pub fn rate_menb(
    spectrum_frac: f64,
    gain: f64,
    caps: &ServerCapacities,
    radio: &RadioParams,
) -> f64 {
    let snr = radio.tx_power_w * gain / radio.noise_power_w;
    caps.menb_spectrum_hz * spectrum_frac * (1.0 + snr).log2()
}

/// Uplink rate to a UAV, bits/s, with co-channel interference from the
/// other UAV's reused band.
pub fn rate_uav(
    spectrum_frac: f64,
    own_gain: f64,
    interferer_gain: f64,
    caps: &ServerCapacities,
    radio: &RadioParams,
) -> f64 {
    let sinr = radio.tx_power_w * own_gain
        / (radio.tx_power_w * interferer_gain + radio.noise_power_w);
    caps.uav_spectrum_hz * spectrum_frac * (1.0 + sinr).log2()
}

/// End-to-end task delay: upload time plus processing time on the serving
/// server. A vehicle granted no spectrum or no compute can never finish, so
/// the delay is +inf.
pub fn task_delay(task: &TaskRequest, uplink_rate_bps: f64, compute_share_cps: f64) -> f64 {
    if uplink_rate_bps <= 0.0 || compute_share_cps <= 0.0 {
        return f64::INFINITY;
    }
    task.data_bits / uplink_rate_bps + task.compute_cycles / compute_share_cps
}

#[derive(Debug, Clone, PartialEq)]
pub struct VehicleOutcome {
    pub vehicle_id: usize,
    pub server: ServerId,
    pub uplink_rate_bps: f64,
    pub delay_s: f64,
    pub cache_alloc_bits: f64,
    /// Deadline met: delay within the task's tolerance (equality counts).
    pub delay_ok: bool,
    /// Allocated cache holds the task data (equality counts).
    pub cache_ok: bool,
    /// Both requirements met.
    pub qos_ok: bool,
}

/// Scoring of one decision on one world snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub vehicles: Vec<VehicleOutcome>,
    /// Number of vehicles with `qos_ok`.
    pub objective: usize,
    /// Fraction of tasks meeting their deadline; 1.0 for an empty world.
    pub delay_ratio: f64,
    /// Fraction of tasks meeting deadline and cache needs; 1.0 when empty.
    pub qos_ratio: f64,
}

/// Contiguous subband interval of each vehicle served by a UAV, laid out in
/// vehicle-index order: (vehicle index, start, end) in band fractions.
fn subband_intervals(decision: &AllocationDecision, uav: usize) -> Vec<(usize, f64, f64)> {
    let mut acc = 0.0;
    decision
        .serving
        .iter()
        .enumerate()
        .filter(|(_, s)| **s == ServerId::Uav(uav))
        .map(|(i, _)| {
            let start = acc;
            acc += decision.spectrum_frac[i];
            (i, start, acc)
        })
        .collect()
}

/// Average interference gain over vehicle `i`'s subband at UAV `victim`:
/// the gains of the other UAV's uplinks, weighted by how much of their
/// subbands overlap vehicle `i`'s.
fn effective_interferer_gain(
    world: &WorldState,
    intervals: &[Vec<(usize, f64, f64)>; 2],
    victim: usize,
    vehicle: usize,
) -> f64 {
    let &(_, start, end) = intervals[victim]
        .iter()
        .find(|(i, _, _)| *i == vehicle)
        .expect("vehicle is served by this UAV");
    let width = end - start;
    if width <= 0.0 {
        return 0.0;
    }
    let uav_pos = world.uavs[victim].position;
    intervals[1 - victim]
        .iter()
        .map(|&(k, ks, ke)| {
            let overlap = (end.min(ke) - start.max(ks)).max(0.0);
            if overlap > 0.0 {
                let d = distance_3d(world.vehicles[k].position, uav_pos);
                gain_to_uav(d) * overlap / width
            } else {
                0.0
            }
        })
        .sum()
}

/// Scores `decision` on `world`: uplink rates, end-to-end delays, deadline
/// and cache flags per vehicle, and the number of fully satisfied tasks.
pub fn evaluate(
    world: &WorldState,
    decision: &AllocationDecision,
    caps: &ServerCapacities,
    radio: &RadioParams,
) -> Result<EvaluationReport, DecisionError> {
    decision.validate(world)?;
    let intervals = [
        subband_intervals(decision, 0),
        subband_intervals(decision, 1),
    ];
    let mut outcomes = Vec::with_capacity(world.vehicles.len());
    for (i, v) in world.vehicles.iter().enumerate() {
        let server = decision.serving[i];
        let rate = match server {
            ServerId::Menb => {
                let d = distance_3d(v.position, world.menb_position());
                rate_menb(decision.spectrum_frac[i], gain_to_menb(d), caps, radio)
            }
            ServerId::Uav(j) => {
                let d = distance_3d(v.position, world.uavs[j].position);
                let interferer = effective_interferer_gain(world, &intervals, j, i);
                rate_uav(decision.spectrum_frac[i], gain_to_uav(d), interferer, caps, radio)
            }
        };
        let compute_share = caps.compute_of(server) * decision.compute_frac[i];
        let delay = task_delay(&v.task, rate, compute_share);
        let cache_alloc = caps.cache_of(server) * decision.cache_frac[i];
        let delay_ok = v.task.deadline_s - delay >= 0.0;
        let cache_ok = cache_alloc - v.task.data_bits >= 0.0;
        outcomes.push(VehicleOutcome {
            vehicle_id: v.id,
            server,
            uplink_rate_bps: rate,
            delay_s: delay,
            cache_alloc_bits: cache_alloc,
            delay_ok,
            cache_ok,
            qos_ok: delay_ok && cache_ok,
        });
    }
    let n = outcomes.len();
    let delay_hits = outcomes.iter().filter(|o| o.delay_ok).count();
    let qos_hits = outcomes.iter().filter(|o| o.qos_ok).count();
    Ok(EvaluationReport {
        objective: qos_hits,
        delay_ratio: if n == 0 { 1.0 } else { delay_hits as f64 / n as f64 },
        qos_ratio: if n == 0 { 1.0 } else { qos_hits as f64 / n as f64 },
        vehicles: outcomes,
    })
}

pub(crate) fn distance_3d(ground: [f64; 2], elevated: [f64; 3]) -> f64 {
    let dx = ground[0] - elevated[0];
    let dy = ground[1] - elevated[1];
    let dz = elevated[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{ScenarioConfig, WorldState};
    use approx::assert_relative_eq;

    fn world_with_positions(positions: &[[f64; 2]]) -> WorldState {
        let config = ScenarioConfig {
            max_vehicles: positions.len(),
            ..ScenarioConfig::default()
        };
        let mut world = WorldState::init(&config).unwrap();
        for (v, p) in world.vehicles.iter_mut().zip(positions) {
            v.position = *p;
        }
        world
    }

    /// Equal split of every resource on the MeNB.
    fn menb_equal_split(n: usize) -> AllocationDecision {
        let f = 1.0 / n as f64;
        AllocationDecision {
            serving: vec![ServerId::Menb; n],
            spectrum_frac: vec![f; n],
            compute_frac: vec![f; n],
            cache_frac: vec![f; n],
        }
    }

    #[test]
    fn menb_gain_examples() {
        assert_relative_eq!(gain_to_menb(1.0), 1.0e-3, max_relative = 1e-12);
        assert_relative_eq!(gain_to_menb(100.0), 1.0e-10, max_relative = 1e-12);
        assert_relative_eq!(gain_to_menb(10.0), 3.162277660168379e-7, max_relative = 1e-12);
    }

    #[test]
    fn uav_gain_examples() {
        assert_relative_eq!(gain_to_uav(1.0), 1.0e-4, max_relative = 1e-12);
        assert_relative_eq!(gain_to_uav(100.0), 1.0e-11, max_relative = 1e-12);
    }

    #[test]
    fn uav_gain_is_ten_db_below_menb_gain() {
        for d in [0.2, 1.0, 3.7, 55.0, 240.0, 900.0] {
            assert_relative_eq!(gain_to_uav(d) * 10.0, gain_to_menb(d), max_relative = 1e-12);
        }
    }

    #[test]
    fn gain_clamps_below_one_meter() {
        assert_eq!(gain_to_menb(0.001), gain_to_menb(1.0));
        assert_eq!(gain_to_uav(0.0), gain_to_uav(1.0));
    }

    #[test]
    fn menb_rate_examples() {
        let caps = ServerCapacities::default();
        let radio = RadioParams::default();
        assert_eq!(rate_menb(0.0, 1e-10, &caps, &radio), 0.0);
        // SNR = 10^3.4, 10 MHz band, one tenth of it allocated.
        let rate = rate_menb(0.1, 1e-10, &caps, &radio);
        assert_relative_eq!(rate, 1.1295129755562190e7, max_relative = 1e-10);
        let doubled = rate_menb(0.2, 1e-10, &caps, &radio);
        assert_relative_eq!(doubled, 2.0 * rate, max_relative = 1e-12);
    }

    #[test]
    fn uav_rate_examples() {
        let caps = ServerCapacities::default();
        let radio = RadioParams::default();
        // No interference: collapses to the single-server rate on the UAV band.
        let quiet = rate_uav(0.3, 1e-10, 0.0, &caps, &radio);
        let reference = rate_menb(0.3, 1e-10, &caps, &radio) * caps.uav_spectrum_hz
            / caps.menb_spectrum_hz;
        assert_relative_eq!(quiet, reference, max_relative = 1e-12);

        // Equal own and interferer gain with negligible noise: SINR ~ 1.
        let tiny_noise = RadioParams {
            tx_power_w: 1.0,
            noise_power_w: 1e-30,
        };
        let rate = rate_uav(0.5, 1e-10, 1e-10, &caps, &tiny_noise);
        assert_relative_eq!(rate, caps.uav_spectrum_hz * 0.5, max_relative = 1e-9);

        // Frozen spectral-efficiency check: SINR = 1e-11 / (1e-13 + 10^-13.4).
        let se = rate_uav(1.0, 1e-11, 1e-13, &caps, &radio) / caps.uav_spectrum_hz;
        assert_relative_eq!(se, 6.18041195779255, max_relative = 1e-10);
    }

    #[test]
    fn rate_monotonicity() {
        let caps = ServerCapacities::default();
        let radio = RadioParams::default();
        let base = rate_uav(0.4, 1e-11, 1e-13, &caps, &radio);
        assert!(rate_uav(0.5, 1e-11, 1e-13, &caps, &radio) > base);
        assert!(rate_uav(0.4, 2e-11, 1e-13, &caps, &radio) > base);
        assert!(rate_uav(0.4, 1e-11, 2e-13, &caps, &radio) < base);
    }

    #[test]
    fn task_delay_example() {
        let task = TaskRequest {
            compute_cycles: 5e7,
            data_bits: 1e3,
            deadline_s: 0.05,
        };
        let delay = task_delay(&task, 1e6, 5e9);
        assert_relative_eq!(delay, 0.011, max_relative = 1e-12);
        // Zero compute share can never finish.
        assert!(task_delay(&task, 1e6, 0.0).is_infinite());
        // Doubling both stages halves the delay.
        assert_relative_eq!(task_delay(&task, 2e6, 1e10), delay / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn evaluate_all_pass_counts_everyone() {
        let world = world_with_positions(&[[580.0, 2.5], [600.0, -2.5], [620.0, 2.5]]);
        let decision = menb_equal_split(3);
        let report = evaluate(
            &world,
            &decision,
            &ServerCapacities::default(),
            &RadioParams::default(),
        )
        .unwrap();
        assert_eq!(report.objective, 3);
        assert_eq!(report.delay_ratio, 1.0);
        assert_eq!(report.qos_ratio, 1.0);
    }

    #[test]
    fn cache_exactly_equal_to_demand_passes() {
        let mut world = world_with_positions(&[[600.0, 2.5]]);
        world.vehicles[0].task.data_bits = 800.0;
        let caps = ServerCapacities {
            menb_cache_bits: 800.0,
            ..ServerCapacities::default()
        };
        let decision = menb_equal_split(1);
        let report = evaluate(&world, &decision, &caps, &RadioParams::default()).unwrap();
        assert!(report.vehicles[0].cache_ok);
        assert_eq!(report.vehicles[0].cache_alloc_bits, 800.0);
    }

    #[test]
    fn evaluate_rejects_bad_simplex_sum() {
        let world = world_with_positions(&[[580.0, 2.5], [620.0, -2.5]]);
        let mut decision = menb_equal_split(2);
        decision.compute_frac[0] = 0.3;
        let err = evaluate(
            &world,
            &decision,
            &ServerCapacities::default(),
            &RadioParams::default(),
        )
        .unwrap_err();
        assert!(matches!(err, DecisionError::SimplexSumViolation { .. }));
    }

    #[test]
    fn evaluate_rejects_infeasible_association() {
        // A vehicle parked under the MeNB is far outside both UAV cells.
        let world = world_with_positions(&[[600.0, 2.5]]);
        let decision = AllocationDecision {
            serving: vec![ServerId::Uav(0)],
            spectrum_frac: vec![1.0],
            compute_frac: vec![1.0],
            cache_frac: vec![1.0],
        };
        let err = evaluate(
            &world,
            &decision,
            &ServerCapacities::default(),
            &RadioParams::default(),
        )
        .unwrap_err();
        assert_eq!(err, DecisionError::InfeasibleAssociation { vehicle: 0 });
    }

    #[test]
    fn evaluate_rejects_out_of_range_fraction() {
        let world = world_with_positions(&[[600.0, 2.5]]);
        let mut decision = menb_equal_split(1);
        decision.cache_frac[0] = 1.5;
        assert!(matches!(
            evaluate(
                &world,
                &decision,
                &ServerCapacities::default(),
                &RadioParams::default()
            ),
            Err(DecisionError::FractionOutOfRange { .. })
        ));
    }

    #[test]
    fn qos_ratio_never_exceeds_delay_ratio() {
        let world = world_with_positions(&[[500.0, 2.5], [600.0, -2.5], [700.0, 2.5]]);
        let caps = ServerCapacities {
            // Starve the cache so QoS fails while delays pass.
            menb_cache_bits: 100.0,
            ..ServerCapacities::default()
        };
        let report = evaluate(
            &world,
            &menb_equal_split(3),
            &caps,
            &RadioParams::default(),
        )
        .unwrap();
        assert!(report.qos_ratio <= report.delay_ratio);
        assert_eq!(report.objective, 0);
    }

    #[test]
    fn uav_uplinks_interfere_across_cells() {
        // One vehicle under each UAV, each taking its server's whole band:
        // the subbands overlap fully, so each uplink sees the other vehicle.
        let config = ScenarioConfig::default();
        let mut world = WorldState::init(&config).unwrap();
        let u0 = world.uavs[0].position;
        let u1 = world.uavs[1].position;
        world.vehicles[0].position = [u0[0], 0.0];
        world.vehicles[1].position = [u1[0], 0.0];
        world.vehicles[2].position = [config.menb_position_m[0], 2.5];
        world.vehicles[3].position = [config.menb_position_m[0], -2.5];
        let decision = AllocationDecision {
            serving: vec![
                ServerId::Uav(0),
                ServerId::Uav(1),
                ServerId::Menb,
                ServerId::Menb,
            ],
            spectrum_frac: vec![1.0, 1.0, 0.5, 0.5],
            compute_frac: vec![1.0, 1.0, 0.5, 0.5],
            cache_frac: vec![1.0, 1.0, 0.5, 0.5],
        };
        let caps = ServerCapacities::default();
        let radio = RadioParams::default();
        let report = evaluate(&world, &decision, &caps, &radio).unwrap();

        // Reproduce vehicle 0's rate by hand with the interferer's gain.
        let own = gain_to_uav(distance_3d(world.vehicles[0].position, u0));
        let inter = gain_to_uav(distance_3d(world.vehicles[1].position, u0));
        let expected = rate_uav(1.0, own, inter, &caps, &radio);
        assert_relative_eq!(report.vehicles[0].uplink_rate_bps, expected, max_relative = 1e-12);
        // And it must be strictly below the interference-free rate.
        assert!(expected < rate_uav(1.0, own, 0.0, &caps, &radio));
    }

    #[test]
    fn objective_monotone_in_capacities() {
        let world = world_with_positions(&[[420.0, 2.5], [600.0, -2.5], [780.0, 2.5]]);
        let radio = RadioParams::default();
        // Tight caps chosen so some flags fail.
        let caps = ServerCapacities {
            menb_spectrum_hz: 2.0e5,
            menb_compute_cps: 4.0e9,
            menb_cache_bits: 2.0e3,
            ..ServerCapacities::default()
        };
        let decision = menb_equal_split(3);
        let base = evaluate(&world, &decision, &caps, &radio).unwrap().objective;
        for scaled in [
            ServerCapacities { menb_spectrum_hz: caps.menb_spectrum_hz * 4.0, ..caps },
            ServerCapacities { menb_compute_cps: caps.menb_compute_cps * 4.0, ..caps },
            ServerCapacities { menb_cache_bits: caps.menb_cache_bits * 4.0, ..caps },
        ] {
            let objective = evaluate(&world, &decision, &scaled, &radio).unwrap().objective;
            assert!(objective >= base);
        }
    }
}
