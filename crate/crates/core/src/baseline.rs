//! Comparison policies: the uniform random scheme and an exhaustive
//! grid-search oracle for tiny instances.
//!
//! The oracle enumerates every coverage-feasible association pattern crossed
//! with every grid-quantized allocation on each server's simplex, scoring
//! each candidate with [`evaluate`]. Within its decision class it is exact,
//! which makes it the reference for validating the evaluator and for
//! bounding what any grid-respecting policy can achieve.

use rand::Rng;
use thiserror::Error;

use crate::network::{
    evaluate, AllocationDecision, EvaluationReport, RadioParams, ServerCapacities, ServerId,
    SERVERS,
};
use crate::scenario::{Coverage, WorldState};

/// Largest instance the oracle accepts.
pub const MAX_ORACLE_VEHICLES: usize = 4;
/// Largest per-resource grid resolution the oracle accepts.
pub const MAX_GRID_DIVISIONS: usize = 5;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("instance with {0} vehicles is too large for exhaustive search (max {MAX_ORACLE_VEHICLES})")]
    InstanceTooLarge(usize),
    #[error("grid resolution {0} unsupported (must be 1..={MAX_GRID_DIVISIONS})")]
    BadResolution(usize),
}

/// Coverage-feasible uniform random decision: vehicles inside a UAV cell
/// flip a fair coin between the MeNB and that UAV, everyone else stays on
/// the MeNB; per server, allocation fractions are uniform on the simplex
/// (normalized exponentials of uniform draws).
pub fn random_policy<R: Rng>(world: &WorldState, rng: &mut R) -> AllocationDecision {
    let n = world.vehicles.len();
    let mut decision = AllocationDecision::empty(n);
    for (i, v) in world.vehicles.iter().enumerate() {
        decision.serving[i] = match world.coverage(v.id).expect("vehicle ids are dense") {
            Coverage::MenbOnly => ServerId::Menb,
            Coverage::UnderUav(j) => {
                if rng.random_bool(0.5) {
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
        for fractions in [
            &mut decision.spectrum_frac,
            &mut decision.compute_frac,
            &mut decision.cache_frac,
        ] {
            let weights: Vec<f64> = served
                .iter()
                .map(|_| {
                    let u: f64 = rng.random();
                    // Exponential draw; floored so a lone vehicle still gets 1.0.
                    (-(1.0 - u).ln()).max(1e-12)
                })
                .collect();
            let total: f64 = weights.iter().sum();
            for (&i, w) in served.iter().zip(&weights) {
                fractions[i] = w / total;
            }
        }
    }
    decision
}

/// All ways to split `total` grid units over `parts` slots, in
/// lexicographic order. Zero parts yields the single empty split.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return vec![Vec::new()];
    }
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for rest in compositions(total - first, parts - 1) {
            let mut row = Vec::with_capacity(parts);
            row.push(first);
            row.extend(rest);
            out.push(row);
        }
    }
    out
}

/// Per-vehicle server candidates in enumeration order (MeNB first).
fn association_candidates(world: &WorldState) -> Vec<Vec<ServerId>> {
    world
        .vehicles
        .iter()
        .map(|v| match world.coverage(v.id).expect("vehicle ids are dense") {
            Coverage::MenbOnly => vec![ServerId::Menb],
            Coverage::UnderUav(j) => vec![ServerId::Menb, ServerId::Uav(j)],
        })
        .collect()
}

/// Visits every decision of the oracle's class: each coverage-feasible
/// association pattern crossed with each grid split of every server simplex,
/// in a fixed lexicographic order.
pub fn for_each_grid_decision<F: FnMut(&AllocationDecision)>(
    world: &WorldState,
    grid_divisions: usize,
    mut visit: F,
) -> Result<(), OracleError> {
    let n = world.vehicles.len();
    if n > MAX_ORACLE_VEHICLES {
        return Err(OracleError::InstanceTooLarge(n));
    }
    if grid_divisions == 0 || grid_divisions > MAX_GRID_DIVISIONS {
        return Err(OracleError::BadResolution(grid_divisions));
    }
    let candidates = association_candidates(world);
    let mut assoc_idx = vec![0usize; n];
    loop {
        let serving: Vec<ServerId> = assoc_idx
            .iter()
            .zip(&candidates)
            .map(|(&k, c)| c[k])
            .collect();
        visit_allocations(&serving, grid_divisions, &mut visit);
        // Advance the association odometer.
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(());
            }
            pos -= 1;
            assoc_idx[pos] += 1;
            if assoc_idx[pos] < candidates[pos].len() {
                break;
            }
            assoc_idx[pos] = 0;
        }
    }
}

fn visit_allocations<F: FnMut(&AllocationDecision)>(
    serving: &[ServerId],
    grid: usize,
    visit: &mut F,
) {
    let n = serving.len();
    let mut decision = AllocationDecision::empty(n);
    decision.serving = serving.to_vec();
    let served: Vec<Vec<usize>> = SERVERS
        .iter()
        .map(|&s| decision.served_by(s))
        .collect();
    let comps: Vec<Vec<Vec<usize>>> = served
        .iter()
        .map(|ids| compositions(grid, ids.len()))
        .collect();
    // Nine allocation slots: (server, resource) pairs, server-major.
    let slots: Vec<&Vec<Vec<usize>>> = comps.iter().flat_map(|c| [c, c, c]).collect();
    let mut idx = vec![0usize; slots.len()];
    loop {
        for (slot, &choice) in idx.iter().enumerate() {
            let server = slot / 3;
            let split = &slots[slot][choice];
            let fractions = match slot % 3 {
                0 => &mut decision.spectrum_frac,
                1 => &mut decision.compute_frac,
                _ => &mut decision.cache_frac,
            };
            for (&i, &units) in served[server].iter().zip(split) {
                fractions[i] = units as f64 / grid as f64;
            }
        }
        visit(&decision);
        let mut pos = slots.len();
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < slots[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Best decision found by exhaustive search.
#[derive(Debug, Clone)]
pub struct BruteForceResult {
    pub decision: AllocationDecision,
    pub objective: usize,
    pub report: EvaluationReport,
}

/// Exact maximizer of the satisfied-task count over the oracle's decision
/// class. Ties break toward lower total delay, then toward the earlier
/// decision in enumeration order; the result is deterministic.
pub fn brute_force(
    world: &WorldState,
    caps: &ServerCapacities,
    radio: &RadioParams,
    grid_divisions: usize,
) -> Result<BruteForceResult, OracleError> {
    let mut best: Option<(AllocationDecision, EvaluationReport, f64)> = None;
    for_each_grid_decision(world, grid_divisions, |decision| {
        let report =
            evaluate(world, decision, caps, radio).expect("enumerated decisions are feasible");
        let total_delay: f64 = report.vehicles.iter().map(|o| o.delay_s).sum();
        let better = match &best {
            None => true,
            Some((_, best_report, best_delay)) => {
                report.objective > best_report.objective
                    || (report.objective == best_report.objective && total_delay < *best_delay)
            }
        };
        if better {
            best = Some((decision.clone(), report, total_delay));
        }
    })?;
    let (decision, report, _) = best.expect("enumeration visits at least one decision");
    Ok(BruteForceResult {
        decision,
        objective: report.objective,
        report,
    })
}

/// Uniform random decision from the oracle's own grid class (random
/// coverage-feasible association plus one uniformly drawn grid split per
/// server and resource). Useful for dominance checks against the oracle.
pub fn random_grid_decision<R: Rng>(
    world: &WorldState,
    grid_divisions: usize,
    rng: &mut R,
) -> Result<AllocationDecision, OracleError> {
    let n = world.vehicles.len();
    if n > MAX_ORACLE_VEHICLES {
        return Err(OracleError::InstanceTooLarge(n));
    }
    if grid_divisions == 0 || grid_divisions > MAX_GRID_DIVISIONS {
        return Err(OracleError::BadResolution(grid_divisions));
    }
    let candidates = association_candidates(world);
    let mut decision = AllocationDecision::empty(n);
    for (i, c) in candidates.iter().enumerate() {
        decision.serving[i] = c[rng.random_range(0..c.len())];
    }
    for server in SERVERS {
        let served = decision.served_by(server);
        if served.is_empty() {
            continue;
        }
        let comps = compositions(grid_divisions, served.len());
        for fractions in [
            &mut decision.spectrum_frac,
            &mut decision.compute_frac,
            &mut decision.cache_frac,
        ] {
            let split = &comps[rng.random_range(0..comps.len())];
            for (&i, &units) in served.iter().zip(split) {
                fractions[i] = units as f64 / grid_divisions as f64;
            }
        }
    }
    Ok(decision)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{ScenarioConfig, WorldState};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn world(seed: u64, n: usize) -> WorldState {
        let config = ScenarioConfig {
            max_vehicles: n,
            rng_seed: seed,
            ..ScenarioConfig::default()
        };
        WorldState::init(&config).unwrap()
    }

    #[test]
    fn single_vehicle_gets_everything() {
        let world = world(1, 1);
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        for _ in 0..20 {
            let d = random_policy(&world, &mut rng);
            assert_eq!(d.spectrum_frac[0], 1.0);
            assert_eq!(d.compute_frac[0], 1.0);
            assert_eq!(d.cache_frac[0], 1.0);
        }
    }

    #[test]
    fn menb_only_vehicles_never_go_to_a_uav() {
        let mut w = world(2, 3);
        for (i, v) in w.vehicles.iter_mut().enumerate() {
            v.position = [595.0 + 5.0 * i as f64, 2.5];
        }
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..50 {
            let d = random_policy(&w, &mut rng);
            assert!(d.serving.iter().all(|s| *s == ServerId::Menb));
        }
    }

    #[test]
    fn random_decisions_always_satisfy_invariants() {
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        for seed in 0..30 {
            let mut w = world(seed, 4);
            for _ in 0..seed % 7 {
                w.advance();
            }
            for _ in 0..20 {
                let d = random_policy(&w, &mut rng);
                assert!(d.validate(&w).is_ok());
            }
        }
    }

    #[test]
    fn simplex_sampling_is_unbiased() {
        // Three vehicles pinned far from the UAV cells: all on the MeNB, so
        // each spectrum fraction is a Dirichlet(1,1,1) marginal with mean 1/3.
        let mut w = world(5, 3);
        for (i, v) in w.vehicles.iter_mut().enumerate() {
            v.position = [590.0 + 10.0 * i as f64, 2.5];
        }
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        let draws = 100_000;
        let mut mean = 0.0;
        for _ in 0..draws {
            mean += random_policy(&w, &mut rng).spectrum_frac[0];
        }
        mean /= draws as f64;
        // 3 sigma of the sample mean: sqrt(var/n), var = (1/3)(2/3)/4.
        assert!((mean - 1.0 / 3.0).abs() < 2.24e-3, "mean {mean}");
    }

    #[test]
    fn compositions_cover_the_simplex_grid() {
        let comps = compositions(3, 2);
        assert_eq!(
            comps,
            vec![vec![0, 3], vec![1, 2], vec![2, 1], vec![3, 0]]
        );
        assert_eq!(compositions(5, 3).len(), 21); // C(7, 2)
        assert_eq!(compositions(4, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn oracle_finds_the_single_feasible_task() {
        let mut w = world(7, 1);
        w.vehicles[0].position = [600.0, 2.5];
        let result = brute_force(
            &w,
            &ServerCapacities::default(),
            &RadioParams::default(),
            3,
        )
        .unwrap();
        assert_eq!(result.objective, 1);
        assert_eq!(result.decision.spectrum_frac[0], 1.0);
    }

    #[test]
    fn zero_cache_makes_every_task_fail() {
        let w = world(8, 2);
        let caps = ServerCapacities {
            menb_cache_bits: 1e-9,
            uav_cache_bits: 1e-9,
            ..ServerCapacities::default()
        };
        let result = brute_force(&w, &caps, &RadioParams::default(), 3).unwrap();
        assert_eq!(result.objective, 0);
    }

    #[test]
    fn oracle_dominates_random_grid_decisions() {
        let w = world(9, 2);
        let caps = ServerCapacities::default();
        let radio = RadioParams::default();
        let oracle = brute_force(&w, &caps, &radio, 4).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(10);
        for _ in 0..10_000 {
            let d = random_grid_decision(&w, 4, &mut rng).unwrap();
            let report = evaluate(&w, &d, &caps, &radio).unwrap();
            assert!(report.objective <= oracle.objective);
        }
    }

    #[test]
    fn oracle_is_deterministic() {
        let w = world(11, 3);
        let caps = ServerCapacities::default();
        let radio = RadioParams::default();
        let a = brute_force(&w, &caps, &radio, 3).unwrap();
        let b = brute_force(&w, &caps, &radio, 3).unwrap();
        assert_eq!(a.decision, b.decision);
        assert_eq!(a.objective, b.objective);
    }

    #[test]
    fn oracle_rejects_oversized_instances() {
        let w = world(12, 4);
        assert_eq!(
            for_each_grid_decision(&w, 6, |_| {}),
            Err(OracleError::BadResolution(6))
        );
        let big = world(13, 5);
        assert!(matches!(
            brute_force(&big, &ServerCapacities::default(), &RadioParams::default(), 2),
            Err(OracleError::InstanceTooLarge(5))
        ));
    }

    #[test]
    fn enumerated_decisions_are_feasible_and_counted() {
        let mut w = world(14, 2);
        // One vehicle under UAV 1, one MeNB-only.
        let uav_x = w.uavs[0].position[0];
        w.vehicles[0].position = [uav_x, 0.0];
        w.vehicles[1].position = [600.0, 2.5];
        let mut count = 0usize;
        for_each_grid_decision(&w, 2, |d| {
            assert!(d.validate(&w).is_ok());
            count += 1;
        })
        .unwrap();
        // Pattern A (both MeNB): split 2 units over 2 vehicles -> 3 options
        // per resource = 27. Pattern B (one per server): single-vehicle
        // simplexes collapse to one option each = 1. Total 28.
        assert_eq!(count, 28);
    }
}
