//! Exact solver: per-type column generation over customer subsets followed
//! by a branch-and-bound search for the cheapest exact cover that respects
//! the fleet's unit counts. A brute-force enumerator serves as an oracle.

mod brute;
mod columns;
mod key;
mod search;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use brute::{brute_force, BRUTE_FORCE_LIMIT};

use crate::energy::{tour_distance, tour_energy, EnergyError};
use crate::feasibility::{check_solution, CheckOptions, FeasibilityError, FeasibilityReport};
use crate::model::{Fleet, Instance};

/// Largest instance the subset tables are built for.
pub const MAX_CUSTOMERS: usize = 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    MinEnergy,
    MinDistance,
}

/// How ties on total distance are broken under [`Objective::MinDistance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Least energy among the shortest solutions.
    MinEnergy,
    /// First shortest solution in the solver's canonical order, energy
    /// ignored.
    Lexicographic,
}

/// Whether every unit of every type must fly a tour, or up to `count` may.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FleetUsage {
    All,
    AtMost,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub objective: Objective,
    pub tie_break: TieBreak,
    pub time_limit_s: f64,
    /// Worker threads for column generation; 0 picks the machine's count.
    pub threads: usize,
    pub enable_volume: bool,
    pub enable_time_windows: bool,
    /// Log the bound and gap of time-limited runs.
    pub report_gap: bool,
    pub fleet_usage: FleetUsage,
    /// Bound and dominance pruning in the partition search. Turning it off
    /// only costs time.
    pub pruning: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            objective: Objective::MinEnergy,
            tie_break: TieBreak::MinEnergy,
            time_limit_s: 3600.0,
            threads: 0,
            enable_volume: false,
            enable_time_windows: false,
            report_gap: true,
            fleet_usage: FleetUsage::All,
            pruning: true,
        }
    }
}

impl SolveOptions {
    pub fn check_options(&self) -> CheckOptions {
        CheckOptions {
            enable_volume: self.enable_volume,
            enable_time_windows: self.enable_time_windows,
            fleet_usage: self.fleet_usage,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tour {
    #[serde(rename = "type")]
    pub drone_type: usize,
    pub unit: usize,
    pub visits: Vec<usize>,
    #[serde(default)]
    pub energy: f64,
    #[serde(default)]
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub tours: Vec<Tour>,
    pub total_energy: f64,
    pub total_distance: f64,
}

impl Solution {
    /// Recomputes every tour's energy and distance, and the totals.
    pub fn from_tours(mut tours: Vec<Tour>, fleet: &Fleet, instance: &Instance) -> Result<Self, SolveError> {
        for t in &mut tours {
            let drone = fleet.get(t.drone_type).ok_or(SolveError::UnknownDroneType(t.drone_type))?;
            t.energy = tour_energy(&t.visits, drone, instance)?;
            t.distance = tour_distance(&t.visits, instance)?;
        }
        let total_energy = tours.iter().map(|t| t.energy).sum();
        let total_distance = tours.iter().map(|t| t.distance).sum();
        Ok(Self { tours, total_energy, total_distance })
    }

    pub fn empty() -> Self {
        Self { tours: Vec::new(), total_energy: 0.0, total_distance: 0.0 }
    }
}

/// On-disk solution with its optimality status.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    #[serde(flatten)]
    pub solution: Solution,
    pub proven_optimal: bool,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub best: Option<Solution>,
    pub proven_optimal: bool,
    /// `(best - bound) / bound`; zero when proven optimal.
    pub relative_gap: f64,
    pub nodes_explored: u64,
    pub wall_time_s: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("no feasible solution")]
    Infeasible,
    #[error("time limit reached before any feasible solution was found")]
    TimeLimit,
    #[error("{n} customers exceed the limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("invalid options: {0}")]
    InvalidOptions(String),
    #[error("unknown drone type {0}")]
    UnknownDroneType(usize),
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error(transparent)]
    Feasibility(#[from] FeasibilityError),
}

/// Tours from `(type position, visits)` pairs, numbered per type by
/// ascending lowest customer id and sorted by (type, unit).
pub(crate) fn canonical_tours(mut chosen: Vec<(usize, Vec<usize>)>, fleet: &Fleet) -> Vec<Tour> {
    chosen.sort_by_key(|(pos, v)| (*pos, v.iter().copied().min().unwrap_or(0)));
    let mut next_unit = vec![1; fleet.len()];
    chosen
        .into_iter()
        .map(|(pos, visits)| {
            let unit = next_unit[pos];
            next_unit[pos] += 1;
            Tour { drone_type: fleet.types()[pos].type_id, unit, visits, energy: 0.0, distance: 0.0 }
        })
        .collect()
}

fn validate_inputs(instance: &Instance, fleet: &Fleet, options: &SolveOptions) -> Result<(), SolveError> {
    if !(options.time_limit_s > 0.0) {
        return Err(SolveError::InvalidOptions(format!("time limit {} must be positive", options.time_limit_s)));
    }
    if fleet.is_empty() {
        return Err(SolveError::InvalidOptions("fleet has no drone types".into()));
    }
    if options.enable_volume {
        for t in fleet.types().iter().filter(|t| t.volume_capacity.is_some()) {
            if let Some(c) = instance.customers().iter().find(|c| c.package_volume.is_none()) {
                log::error!("drone type {} has a volume limit", t.type_id);
                return Err(FeasibilityError::MissingVolume(c.id).into());
            }
        }
    }
    if options.enable_time_windows {
        let missing = |s: String| Err(FeasibilityError::MissingTemporalData(s).into());
        if instance.service_time().is_none() {
            return missing("instance has no service time".into());
        }
        if let Some(t) = fleet.types().iter().find(|t| t.speed.is_none()) {
            return missing(format!("drone type {} has no speed", t.type_id));
        }
        if let Some(c) = instance.customers().iter().find(|c| c.time_window.is_none()) {
            return missing(format!("customer {} has no time window", c.id));
        }
    }
    Ok(())
}

/// Optimal routing for `instance` with `fleet`, or the best solution found
/// within the time limit.
pub fn solve(instance: &Instance, fleet: &Fleet, options: &SolveOptions) -> Result<SolveResult, SolveError> {
    let n = instance.len();
    if n > MAX_CUSTOMERS {
        return Err(SolveError::TooLarge { n, limit: MAX_CUSTOMERS });
    }
    validate_inputs(instance, fleet, options)?;
    let start = Instant::now();
    let deadline = start.checked_add(Duration::from_secs_f64(options.time_limit_s.min(1e9)));

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.threads)
        .build()
        .map_err(|e| SolveError::InvalidOptions(format!("thread pool: {e}")))?;
    let columns: Vec<columns::Column> = pool.install(|| {
        fleet
            .types()
            .iter()
            .enumerate()
            .flat_map(|(pos, drone)| columns::generate(instance, drone, pos, options))
            .collect()
    });
    log::debug!("{} columns after {:.3}s", columns.len(), start.elapsed().as_secs_f64());

    let masses: Vec<f64> = (0..=n).map(|i| instance.mass(i)).collect();
    let input = search::SearchInput {
        n,
        columns: &columns,
        counts: fleet.types().iter().map(|t| t.count).collect(),
        payload_caps: fleet.types().iter().map(|t| t.payload_capacity()).collect(),
        masses,
        usage: options.fleet_usage,
        secondary: options.objective == Objective::MinDistance && options.tie_break == TieBreak::MinEnergy,
        pruning: options.pruning,
        deadline,
    };
    let outcome = search::run(&input);
    let wall_time_s = start.elapsed().as_secs_f64();

    let Some((key, chosen)) = outcome.best else {
        return Err(if outcome.complete { SolveError::Infeasible } else { SolveError::TimeLimit });
    };
    let chosen = chosen.into_iter().map(|ci| (columns[ci].type_pos, columns[ci].visits.clone())).collect();
    let best = Solution::from_tours(canonical_tours(chosen, fleet), fleet, instance)?;
    let relative_gap = if outcome.complete {
        0.0
    } else if outcome.root_bound > 0.0 {
        ((key.primary - outcome.root_bound) / outcome.root_bound).max(0.0)
    } else {
        f64::INFINITY
    };
    if !outcome.complete && options.report_gap {
        log::info!("time limit: incumbent {:.4}, bound {:.4}, gap {:.4}", key.primary, outcome.root_bound, relative_gap);
    }
    Ok(SolveResult {
        best: Some(best),
        proven_optimal: outcome.complete,
        relative_gap,
        nodes_explored: outcome.nodes,
        wall_time_s,
    })
}

/// Scores a given set of routes from scratch. Tours with an unknown type or
/// customer contribute nothing to the totals; the report flags them.
pub fn evaluate_fixed_routes(
    solution: &Solution,
    fleet: &Fleet,
    instance: &Instance,
    options: &CheckOptions,
) -> (f64, f64, FeasibilityReport) {
    let mut energy = 0.0;
    let mut distance = 0.0;
    for t in &solution.tours {
        if let Some(drone) = fleet.get(t.drone_type) {
            if let (Ok(e), Ok(d)) = (tour_energy(&t.visits, drone, instance), tour_distance(&t.visits, instance)) {
                energy += e;
                distance += d;
            }
        }
    }
    (energy, distance, check_solution(solution, fleet, instance, options))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{appendix_d_instance, Customer, DistanceMatrix, DroneType, Point};

    fn unit_type(count: usize) -> DroneType {
        DroneType {
            type_id: 1,
            self_mass: 10.0,
            takeoff_coeff: 1.0,
            flight_coeff: 1.0,
            max_total_mass: 1000.0,
            energy_capacity: 1e6,
            count,
            volume_capacity: None,
            speed: None,
        }
    }

    fn example2() -> Instance {
        let d = DistanceMatrix::from_rows(vec![vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.8], vec![1.0, 1.8, 0.0]]).unwrap();
        let cs = vec![Customer::new(1, Point::new(1.0, 0.0), 5.0), Customer::new(2, Point::new(0.0, 1.0), 5.0)];
        Instance::with_distances(Point::ORIGIN, cs, d).unwrap()
    }

    #[test]
    fn example2_two_drones_and_one() {
        let inst = example2();
        let two = Fleet::new(vec![unit_type(2)]).unwrap();
        let r = solve(&inst, &two, &SolveOptions::default()).unwrap();
        assert!((r.best.as_ref().unwrap().total_energy - 100.0).abs() < 1e-9);
        assert!(r.proven_optimal);
        let one = Fleet::new(vec![unit_type(1)]).unwrap();
        let r = solve(&inst, &one, &SolveOptions::default()).unwrap();
        assert!((r.best.unwrap().total_energy - 102.0).abs() < 1e-9);
    }

    #[test]
    fn small_only_is_infeasible() {
        let inst = appendix_d_instance(10).unwrap();
        assert_eq!(solve(&inst, &Fleet::small_only(), &SolveOptions::default()), Err(SolveError::Infeasible));
    }

    #[test]
    fn units_are_canonical() {
        let chosen = vec![(0, vec![5, 2]), (1, vec![3]), (0, vec![1])];
        let tours = canonical_tours(chosen, &Fleet::table3());
        assert_eq!(tours[0].visits, vec![1]);
        assert_eq!((tours[0].drone_type, tours[0].unit), (1, 1));
        assert_eq!((tours[1].drone_type, tours[1].unit), (1, 2));
        assert_eq!((tours[2].drone_type, tours[2].unit), (2, 1));
    }

    #[test]
    fn rejects_bad_options_and_sizes() {
        let inst = example2();
        let fleet = Fleet::new(vec![unit_type(2)]).unwrap();
        let opts = SolveOptions { time_limit_s: 0.0, ..Default::default() };
        assert!(matches!(solve(&inst, &fleet, &opts), Err(SolveError::InvalidOptions(_))));
        let big = Instance::new(
            Point::ORIGIN,
            (1..=23).map(|i| Customer::new(i, Point::new(i as f64, 0.0), 1.0)).collect(),
        )
        .unwrap();
        assert!(matches!(solve(&big, &fleet, &SolveOptions::default()), Err(SolveError::TooLarge { .. })));
        assert!(matches!(brute_force(&big, &fleet, &SolveOptions::default()), Err(SolveError::TooLarge { .. })));
        let opts = SolveOptions { enable_time_windows: true, ..Default::default() };
        assert!(matches!(solve(&inst, &fleet, &opts), Err(SolveError::Feasibility(_))));
    }

    #[test]
    fn solution_file_json_shape() {
        let inst = example2();
        let fleet = Fleet::new(vec![unit_type(2)]).unwrap();
        let sol = solve(&inst, &fleet, &SolveOptions::default()).unwrap().best.unwrap();
        let file = SolutionFile { solution: sol.clone(), proven_optimal: true, gap: 0.0 };
        let v: serde_json::Value = serde_json::to_value(&file).unwrap();
        assert_eq!(v["tours"][0]["type"], 1);
        assert_eq!(v["tours"][0]["unit"], 1);
        assert!(v["total_energy"].is_number() && v["total_distance"].is_number());
        assert_eq!(v["proven_optimal"], true);
        let back: SolutionFile = serde_json::from_value(v).unwrap();
        assert_eq!(back.solution, sol);
    }
}
