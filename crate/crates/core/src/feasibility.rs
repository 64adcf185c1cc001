//! Tour and solution constraint checks shared by the solver, the brute-force
//! oracle and the MILP evaluator.
//!
//! Every bound is inclusive with an absolute slack of [`FEASIBILITY_TOL`].
//! Violations are tagged with the constraint they break: `6` coverage,
//! `8` unit reuse, `10` depot inside a tour or an empty tour, `14` weight,
//! `15` energy, `16` self-loop, `C1` volume, `C3` time windows, plus `ID`,
//! `TYPE`, `UNIT`, `DISPATCH` and `MISSING` for malformed input.

use serde::Serialize;
use thiserror::Error;

use crate::energy::{tour_energy, tour_weight_profile, EnergyError};
use crate::model::{DroneType, Fleet, Instance};
use crate::solver::{FleetUsage, Solution};

pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeasibilityError {
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error("customer {0} has no package volume but the drone has a volume limit")]
    MissingVolume(usize),
    #[error("time-window data missing: {0}")]
    MissingTemporalData(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub tag: &'static str,
    /// Position of the tour in the checked solution, when tour-specific.
    pub tour: Option<usize>,
    pub measured: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    feasible: bool,
    violations: Vec<Violation>,
}

impl Default for FeasibilityReport {
    fn default() -> Self {
        Self { feasible: true, violations: Vec::new() }
    }
}

impl FeasibilityReport {
    pub fn feasible(&self) -> bool {
        self.feasible
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub fn has_tag(&self, tag: &str) -> bool {
        self.violations.iter().any(|v| v.tag == tag)
    }

    fn push(&mut self, tag: &'static str, tour: Option<usize>, measured: f64, bound: f64) {
        self.violations.push(Violation { tag, tour, measured, bound });
        self.feasible = false;
    }

    /// Records a violation when `measured` exceeds `bound` beyond tolerance.
    fn check(&mut self, tag: &'static str, measured: f64, bound: f64) {
        if measured > bound + FEASIBILITY_TOL {
            self.push(tag, None, measured, bound);
        }
    }

    fn merge(&mut self, other: FeasibilityReport, tour: usize) {
        for mut v in other.violations {
            v.tour = Some(tour);
            self.violations.push(v);
            self.feasible = false;
        }
    }
}

/// Launch mass against the drone's maximum total mass.
pub fn check_weight(visits: &[usize], drone: &DroneType, instance: &Instance) -> Result<FeasibilityReport, FeasibilityError> {
    let launch = tour_weight_profile(visits, drone, instance)?.launch_mass();
    let mut r = FeasibilityReport::default();
    r.check("14", launch, drone.max_total_mass);
    Ok(r)
}

pub fn check_energy(visits: &[usize], drone: &DroneType, instance: &Instance) -> Result<FeasibilityReport, FeasibilityError> {
    let e = tour_energy(visits, drone, instance)?;
    let mut r = FeasibilityReport::default();
    r.check("15", e, drone.energy_capacity);
    Ok(r)
}

/// Summed package volume against `V_k`; always feasible when the drone has
/// no volume limit.
pub fn check_volume(visits: &[usize], drone: &DroneType, instance: &Instance) -> Result<FeasibilityReport, FeasibilityError> {
    let mut r = FeasibilityReport::default();
    let Some(cap) = drone.volume_capacity else {
        return Ok(r);
    };
    let mut total = 0.0;
    for &v in visits {
        let c = instance.customer(v).ok_or(EnergyError::UnknownCustomer(v))?;
        total += c.package_volume.ok_or(FeasibilityError::MissingVolume(v))?;
    }
    r.check("C1", total, cap);
    Ok(r)
}

/// Earliest service start at each visited customer. The drone leaves the
/// depot at time 0, may wait for a window to open, and spends the service
/// time at every customer before flying on.
pub fn service_start_times(visits: &[usize], drone: &DroneType, instance: &Instance) -> Result<Vec<f64>, FeasibilityError> {
    if visits.is_empty() {
        return Ok(Vec::new());
    }
    let speed = drone.speed.ok_or_else(|| FeasibilityError::MissingTemporalData(format!("drone type {} has no speed", drone.type_id)))?;
    let service = instance.service_time().ok_or_else(|| FeasibilityError::MissingTemporalData("instance has no service time".into()))?;
    let mut times = Vec::with_capacity(visits.len());
    let mut prev = 0;
    let mut ready = 0.0;
    for (k, &v) in visits.iter().enumerate() {
        let c = instance.customer(v).ok_or(EnergyError::UnknownCustomer(v))?;
        let w = c.time_window.ok_or_else(|| FeasibilityError::MissingTemporalData(format!("customer {v} has no time window")))?;
        let depart = if k == 0 { 0.0 } else { ready + service };
        let r = w.earliest.max(depart + instance.distance(prev, v) / speed);
        times.push(r);
        ready = r;
        prev = v;
    }
    Ok(times)
}

pub fn check_time_windows(visits: &[usize], drone: &DroneType, instance: &Instance) -> Result<FeasibilityReport, FeasibilityError> {
    let times = service_start_times(visits, drone, instance)?;
    let mut r = FeasibilityReport::default();
    for (&v, &t) in visits.iter().zip(&times) {
        let latest = instance.customer(v).and_then(|c| c.time_window).map_or(f64::INFINITY, |w| w.latest);
        r.check("C3", t, latest);
    }
    Ok(r)
}

/// Which optional constraint families a solution check covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    pub enable_volume: bool,
    pub enable_time_windows: bool,
    pub fleet_usage: FleetUsage,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { enable_volume: false, enable_time_windows: false, fleet_usage: FleetUsage::All }
    }
}

/// Checks coverage, unit usage, tour shape and every per-tour cap. Never
/// fails: malformed input shows up as violations.
pub fn check_solution(solution: &Solution, fleet: &Fleet, instance: &Instance, options: &CheckOptions) -> FeasibilityReport {
    let n = instance.len();
    let mut report = FeasibilityReport::default();
    let mut visit_count = vec![0usize; n + 1];
    let mut units = std::collections::BTreeMap::<(usize, usize), usize>::new();

    for (idx, tour) in solution.tours.iter().enumerate() {
        let Some(drone) = fleet.get(tour.drone_type) else {
            report.push("TYPE", Some(idx), 1.0, 0.0);
            continue;
        };
        if tour.unit == 0 || tour.unit > drone.count {
            report.push("UNIT", Some(idx), 1.0, 0.0);
        }
        *units.entry((tour.drone_type, tour.unit)).or_default() += 1;

        if tour.visits.is_empty() {
            report.push("10", Some(idx), 1.0, 0.0);
            continue;
        }
        let depot_visits = tour.visits.iter().filter(|&&v| v == 0).count();
        if depot_visits > 0 {
            report.push("10", Some(idx), depot_visits as f64, 0.0);
        }
        let loops = tour.visits.windows(2).filter(|w| w[0] == w[1]).count();
        if loops > 0 {
            report.push("16", Some(idx), loops as f64, 0.0);
        }
        let unknown = tour.visits.iter().filter(|&&v| v > n).count();
        if unknown > 0 {
            report.push("ID", Some(idx), unknown as f64, 0.0);
        }
        let known: Vec<usize> = tour.visits.iter().copied().filter(|&v| v >= 1 && v <= n).collect();
        for &v in &known {
            visit_count[v] += 1;
        }

        let mut per_tour = |r: Result<FeasibilityReport, FeasibilityError>| match r {
            Ok(r) => report.merge(r, idx),
            Err(_) => report.push("MISSING", Some(idx), 1.0, 0.0),
        };
        per_tour(check_weight(&known, drone, instance));
        per_tour(check_energy(&known, drone, instance));
        if options.enable_volume {
            per_tour(check_volume(&known, drone, instance));
        }
        if options.enable_time_windows {
            per_tour(check_time_windows(&known, drone, instance));
        }
    }

    for &count in &visit_count[1..=n] {
        if count != 1 {
            report.push("6", None, (count as f64 - 1.0).abs(), 0.0);
        }
    }
    for &count in units.values() {
        if count > 1 {
            report.push("8", None, count as f64, 1.0);
        }
    }
    if options.fleet_usage == FleetUsage::All {
        for t in fleet.types() {
            let used = units.keys().filter(|(k, u)| *k == t.type_id && *u >= 1 && *u <= t.count).count();
            if used < t.count {
                report.push("DISPATCH", None, (t.count - used) as f64, 0.0);
            }
        }
    }
    report
}
