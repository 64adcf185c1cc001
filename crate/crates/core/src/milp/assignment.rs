//! Mapping a combinatorial solution onto model variables and checking every
//! row of the model against it.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{Family, MilpError, MilpModel, Sense, VarKind, VariableIndex};
use crate::energy::tour_weight_profile;
use crate::feasibility::{check_solution, service_start_times};
use crate::model::{Fleet, Instance};
use crate::solver::Solution;

pub type Assignment = BTreeMap<VariableIndex, f64>;

const TOLERANCE: f64 = 1e-6;

/// Variable values implied by `solution`. Nodes a tour does not visit get
/// `w = m0`, `u = 1` and `r = a_i`.
pub fn solution_to_assignment(solution: &Solution, model: &MilpModel, instance: &Instance, fleet: &Fleet) -> Result<Assignment, MilpError> {
    let mut a = Assignment::new();
    if model.n == 0 {
        return Ok(a);
    }
    let report = check_solution(solution, fleet, instance, &model.options.check_options());
    if !report.feasible() {
        return Err(MilpError::InfeasibleInput(report));
    }
    for (&v, var) in &model.variables {
        let default = match v.family {
            Family::W => fleet.types()[v.k - 1].self_mass,
            Family::U => 1.0,
            Family::R => instance.customer(v.i).and_then(|c| c.time_window).map_or(var.lower, |w| w.earliest),
            _ => 0.0,
        };
        a.insert(v, default);
    }
    for tour in &solution.tours {
        if tour.visits.is_empty() {
            continue;
        }
        let p = fleet.position_of(tour.drone_type).expect("checked by check_solution");
        let (k, t) = (p + 1, tour.unit);
        let drone = &fleet.types()[p];
        let q = tour.visits.len() as f64;
        let profile = tour_weight_profile(&tour.visits, drone, instance).expect("checked by check_solution");
        for &(node, mass) in profile.entries() {
            a.insert(VariableIndex::w(node, k, t), mass);
        }
        let path: Vec<usize> = std::iter::once(0).chain(tour.visits.iter().copied()).chain(std::iter::once(0)).collect();
        for leg in path.windows(2) {
            let (i, j) = (leg[0], leg[1]);
            a.insert(VariableIndex::x(i, j, k, t), 1.0);
            let w = a[&VariableIndex::w(i, k, t)];
            a.insert(VariableIndex::z(i, j, k, t), w);
            if i > 0 && j > 0 && model.variables.contains_key(&VariableIndex::s(i, j, k, t)) {
                a.insert(VariableIndex::s(i, j, k, t), q);
            }
        }
        for (pos, &c) in tour.visits.iter().enumerate() {
            if model.variables.contains_key(&VariableIndex::u(c, k, t)) {
                a.insert(VariableIndex::u(c, k, t), (pos + 1) as f64);
            }
            if model.variables.contains_key(&VariableIndex::y(c, k, t)) {
                a.insert(VariableIndex::y(c, k, t), 1.0);
            }
        }
        if model.options.time_windows {
            let times = service_start_times(&tour.visits, drone, instance).map_err(|e| MilpError::MissingData(e.to_string()))?;
            for (&c, &r) in tour.visits.iter().zip(&times) {
                a.insert(VariableIndex::r(c, k, t), r);
            }
        }
    }
    Ok(a)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowViolation {
    pub tag: &'static str,
    pub name: String,
    /// Signed slack: negative by the amount the row is violated.
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub objective: f64,
    pub violations: Vec<RowViolation>,
}

impl Evaluation {
    pub fn feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Objective value and every row, bound or integrality requirement broken
/// by more than 1e-6.
pub fn evaluate_assignment(model: &MilpModel, assignment: &Assignment) -> Result<Evaluation, MilpError> {
    if let Some(missing) = model.variables.keys().find(|v| !assignment.contains_key(v)) {
        return Err(MilpError::MissingVariable(*missing));
    }
    let value = |v: &VariableIndex| assignment[v];
    let objective = model.objective.iter().map(|(v, c)| c * value(v)).sum();
    let mut violations = Vec::new();
    for row in &model.constraints {
        let lhs = row.lhs(value);
        let slack = match row.sense {
            Sense::Le => row.rhs - lhs,
            Sense::Ge => lhs - row.rhs,
            Sense::Eq => -(lhs - row.rhs).abs(),
        };
        if slack < -TOLERANCE {
            violations.push(RowViolation { tag: row.tag, name: row.name(), slack });
        }
    }
    for (v, var) in &model.variables {
        let x = value(v);
        let slack = (x - var.lower).min(var.upper - x);
        if slack < -TOLERANCE {
            violations.push(RowViolation { tag: "bounds", name: v.to_string(), slack });
        }
        if var.kind == VarKind::Binary {
            let off = (x - x.round()).abs();
            if off > TOLERANCE {
                violations.push(RowViolation { tag: "17", name: v.to_string(), slack: -off });
            }
        }
    }
    Ok(Evaluation { objective, violations })
}

/// Debug view of an assignment: active arcs plus node-level values keyed by
/// `i_k_t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssignmentDump {
    pub x: Vec<[usize; 4]>,
    pub w: BTreeMap<String, f64>,
    pub u: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub r: BTreeMap<String, f64>,
}

impl AssignmentDump {
    pub fn new(assignment: &Assignment) -> Self {
        let mut dump = AssignmentDump { x: Vec::new(), w: BTreeMap::new(), u: BTreeMap::new(), r: BTreeMap::new() };
        for (v, &val) in assignment {
            let key = format!("{}_{}_{}", v.i, v.k, v.t);
            match v.family {
                Family::X if val > 0.5 => dump.x.push([v.i, v.j, v.k, v.t]),
                Family::W => {
                    dump.w.insert(key, val);
                }
                Family::U => {
                    dump.u.insert(key, val);
                }
                Family::R => {
                    dump.r.insert(key, val);
                }
                _ => {}
            }
        }
        dump
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::{line_instance, unit_fleet};
    use super::super::{build_model, MilpOptions};
    use super::*;
    use crate::model::{Customer, DroneType, Point};
    use crate::solver::{solve, FleetUsage, SolveOptions, Tour};

    fn example1() -> (Instance, Fleet, Solution) {
        let customers = vec![
            Customer::new(1, Point::new(1.0, 0.0), 1.0),
            Customer::new(2, Point::new(1.0, 1.0), 10.0),
            Customer::new(3, Point::new(0.0, 1.0), 1.0),
        ];
        let inst = Instance::new(Point::new(0.0, 0.0), customers).unwrap();
        let drone = DroneType {
            type_id: 1,
            self_mass: 10.0,
            takeoff_coeff: 1.0,
            flight_coeff: 1.0,
            max_total_mass: 30.0,
            energy_capacity: 1e4,
            count: 1,
            volume_capacity: None,
            speed: None,
        };
        let fleet = Fleet::new(vec![drone]).unwrap();
        let tour = Tour { drone_type: 1, unit: 1, visits: vec![2, 1, 3], energy: 0.0, distance: 0.0 };
        let sol = Solution::from_tours(vec![tour], &fleet, &inst).unwrap();
        (inst, fleet, sol)
    }

    #[test]
    fn example_route_maps_to_arcs_and_positions() {
        let (inst, fleet, sol) = example1();
        let model = build_model(&inst, &fleet, &MilpOptions::default()).unwrap();
        let a = solution_to_assignment(&sol, &model, &inst, &fleet).unwrap();
        let active: Vec<_> = a.iter().filter(|(v, &x)| v.family == Family::X && x == 1.0).map(|(v, _)| (v.i, v.j)).collect();
        assert_eq!(active, vec![(0, 2), (1, 3), (2, 1), (3, 0)]);
        let u: Vec<f64> = (1..=3).map(|i| a[&VariableIndex::u(i, 1, 1)]).collect();
        assert_eq!(u, vec![2.0, 1.0, 3.0]);
        assert_eq!(a[&VariableIndex::z(0, 2, 1, 1)], 22.0);
        let eval = evaluate_assignment(&model, &a).unwrap();
        assert!(eval.feasible(), "{:?}", eval.violations);
        assert!((eval.objective - (77.0 + 33.0 * 2f64.sqrt())).abs() < 1e-9);
    }

    #[test]
    fn self_loop_is_reported() {
        let (inst, fleet, sol) = example1();
        let model = build_model(&inst, &fleet, &MilpOptions::default()).unwrap();
        let mut a = solution_to_assignment(&sol, &model, &inst, &fleet).unwrap();
        a.insert(VariableIndex::x(2, 2, 1, 1), 1.0);
        let eval = evaluate_assignment(&model, &a).unwrap();
        assert!(eval.violations.iter().any(|v| v.tag == "16"));
    }

    #[test]
    fn missing_variable_is_an_error() {
        let (inst, fleet, sol) = example1();
        let model = build_model(&inst, &fleet, &MilpOptions::default()).unwrap();
        let mut a = solution_to_assignment(&sol, &model, &inst, &fleet).unwrap();
        a.remove(&VariableIndex::w(3, 1, 1));
        assert_eq!(evaluate_assignment(&model, &a), Err(MilpError::MissingVariable(VariableIndex::w(3, 1, 1))));
    }

    #[test]
    fn infeasible_solution_is_rejected() {
        let (inst, fleet, mut sol) = example1();
        sol.tours[0].visits.pop();
        let model = build_model(&inst, &fleet, &MilpOptions::default()).unwrap();
        assert!(matches!(solution_to_assignment(&sol, &model, &inst, &fleet), Err(MilpError::InfeasibleInput(_))));
    }

    #[test]
    fn empty_instance_gives_empty_assignment() {
        let inst = Instance::new(Point::new(0.0, 0.0), Vec::new()).unwrap();
        let fleet = unit_fleet(1);
        let model = build_model(&inst, &fleet, &MilpOptions::default()).unwrap();
        let a = solution_to_assignment(&Solution::empty(), &model, &inst, &fleet).unwrap();
        assert!(a.is_empty());
    }

    /// With one customer and one unit, enumerate all 16 arc patterns and
    /// derive the continuous values from the arcs: exactly the out-and-back
    /// pattern satisfies the model.
    #[test]
    fn single_customer_model_has_one_integer_solution() {
        let inst = line_instance(1);
        let fleet = unit_fleet(1);
        let d = &fleet.types()[0];
        let model = build_model(&inst, &fleet, &MilpOptions::default()).unwrap();
        let m1 = inst.mass(1);
        let mut feasible = Vec::new();
        for bits in 0u32..16 {
            let x = |i: usize, j: usize| (bits >> (2 * i + j) & 1) as f64;
            let mut a = Assignment::new();
            let w0 = d.self_mass + m1 * (x(1, 0) + x(1, 1));
            let w1 = if x(0, 1) == 1.0 { w0 - m1 } else { d.self_mass };
            let w = [w0, w1];
            for (i, &wi) in w.iter().enumerate() {
                a.insert(VariableIndex::w(i, 1, 1), wi);
                for j in 0..2 {
                    a.insert(VariableIndex::x(i, j, 1, 1), x(i, j));
                    a.insert(VariableIndex::z(i, j, 1, 1), x(i, j) * wi);
                }
            }
            a.insert(VariableIndex::u(1, 1, 1), 1.0);
            if evaluate_assignment(&model, &a).unwrap().feasible() {
                feasible.push(bits);
            }
        }
        // x_01 is bit 1, x_10 is bit 2
        assert_eq!(feasible, vec![0b0110]);
    }

    #[test]
    fn partial_dispatch_satisfies_relaxed_model() {
        let inst = line_instance(5);
        let fleet = Fleet::table3();
        let usage = FleetUsage::AtMost;
        let result = solve(&inst, &fleet, &SolveOptions { fleet_usage: usage, ..Default::default() }).unwrap();
        let sol = result.best.unwrap();
        assert!(sol.tours.len() < fleet.total_units());
        let options = MilpOptions { symmetry_breaking: true, fleet_usage: usage, ..Default::default() };
        let model = build_model(&inst, &fleet, &options).unwrap();
        let a = solution_to_assignment(&sol, &model, &inst, &fleet).unwrap();
        let eval = evaluate_assignment(&model, &a).unwrap();
        assert!(eval.feasible(), "{:?}", eval.violations);
        assert!((eval.objective - sol.total_energy).abs() < 1e-6);
    }

    #[test]
    fn dump_lists_active_arcs() {
        let (inst, fleet, sol) = example1();
        let model = build_model(&inst, &fleet, &MilpOptions::default()).unwrap();
        let a = solution_to_assignment(&sol, &model, &inst, &fleet).unwrap();
        let json = serde_json::to_value(AssignmentDump::new(&a)).unwrap();
        assert_eq!(json["x"][0], serde_json::json!([0, 2, 1, 1]));
        assert_eq!(json["u"]["2_1_1"], 1.0);
        assert!(json.get("r").is_none());
    }
}
