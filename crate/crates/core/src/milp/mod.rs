//! The fully linearized G-DRP as an explicit MILP: variables, tagged rows,
//! LP-format export and an evaluator that plugs a combinatorial solution
//! into every row.
//!
//! Index conventions: nodes `i, j` run over `0..=n` with 0 the depot, `k` is
//! the 1-based position of a drone type in the fleet and `t` the 1-based unit
//! (tour) of that type.

mod assignment;
mod lp;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::feasibility::{CheckOptions, FeasibilityReport};
use crate::model::{Fleet, Instance};
use crate::solver::FleetUsage;

pub use assignment::{evaluate_assignment, solution_to_assignment, Assignment, AssignmentDump, Evaluation, RowViolation};
pub use lp::{export_lp, parse_lp, ParsedLp, ParsedRow};

/// Largest `n` for which the lexicographic ordering weights `2^(n-i)` are
/// exact in an `f64`.
pub const SYMMETRY_ENCODING_LIMIT: usize = 52;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MilpError {
    #[error("solution is not feasible: {0:?}")]
    InfeasibleInput(FeasibilityReport),
    #[error("assignment has no value for {0}")]
    MissingVariable(VariableIndex),
    #[error("{0}")]
    MissingData(String),
    #[error("LP parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Service start time (time-window variant only).
    R,
    /// Arc indicator times customers on the tour.
    S,
    /// MTZ position.
    U,
    /// Total mass on departure from a node.
    W,
    /// Arc indicator.
    X,
    /// Customer served by a tour (symmetry breaking only).
    Y,
    /// Arc indicator times departure mass.
    Z,
}

impl Family {
    pub fn letter(self) -> char {
        match self {
            Family::R => 'r',
            Family::S => 's',
            Family::U => 'u',
            Family::W => 'w',
            Family::X => 'x',
            Family::Y => 'y',
            Family::Z => 'z',
        }
    }

    /// Whether the family carries a second node index.
    pub fn is_arc(self) -> bool {
        matches!(self, Family::S | Family::X | Family::Z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VariableIndex {
    pub family: Family,
    pub i: usize,
    /// Second node for arc families, 0 otherwise.
    pub j: usize,
    pub k: usize,
    pub t: usize,
}

impl VariableIndex {
    pub fn arc(family: Family, i: usize, j: usize, k: usize, t: usize) -> Self {
        debug_assert!(family.is_arc());
        Self { family, i, j, k, t }
    }

    pub fn node(family: Family, i: usize, k: usize, t: usize) -> Self {
        debug_assert!(!family.is_arc());
        Self { family, i, j: 0, k, t }
    }

    pub fn x(i: usize, j: usize, k: usize, t: usize) -> Self {
        Self::arc(Family::X, i, j, k, t)
    }

    pub fn z(i: usize, j: usize, k: usize, t: usize) -> Self {
        Self::arc(Family::Z, i, j, k, t)
    }

    pub fn s(i: usize, j: usize, k: usize, t: usize) -> Self {
        Self::arc(Family::S, i, j, k, t)
    }

    pub fn w(i: usize, k: usize, t: usize) -> Self {
        Self::node(Family::W, i, k, t)
    }

    pub fn u(i: usize, k: usize, t: usize) -> Self {
        Self::node(Family::U, i, k, t)
    }

    pub fn y(i: usize, k: usize, t: usize) -> Self {
        Self::node(Family::Y, i, k, t)
    }

    pub fn r(i: usize, k: usize, t: usize) -> Self {
        Self::node(Family::R, i, k, t)
    }

    /// Index tuple without the family, as used in names and dumps.
    pub fn indices(&self) -> Vec<usize> {
        if self.family.is_arc() {
            vec![self.i, self.j, self.k, self.t]
        } else {
            vec![self.i, self.k, self.t]
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        let mut parts = name.split('_');
        let family = match parts.next()? {
            "r" => Family::R,
            "s" => Family::S,
            "u" => Family::U,
            "w" => Family::W,
            "x" => Family::X,
            "y" => Family::Y,
            "z" => Family::Z,
            _ => return None,
        };
        let nums: Vec<usize> = parts.map(|p| p.parse().ok()).collect::<Option<_>>()?;
        match (family.is_arc(), nums.as_slice()) {
            (true, &[i, j, k, t]) => Some(Self::arc(family, i, j, k, t)),
            (false, &[i, k, t]) => Some(Self::node(family, i, k, t)),
            _ => None,
        }
    }
}

impl fmt::Display for VariableIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family.letter())?;
        for v in self.indices() {
            write!(f, "_{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Variable {
    pub lower: f64,
    pub upper: f64,
    pub kind: VarKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub tag: &'static str,
    /// Row indices, joined into the row name after the tag.
    pub indices: Vec<usize>,
    pub coefficients: BTreeMap<VariableIndex, f64>,
    pub sense: Sense,
    pub rhs: f64,
}

impl LinearConstraint {
    pub fn name(&self) -> String {
        let mut s = format!("c{}", self.tag);
        for v in &self.indices {
            s.push('_');
            s.push_str(&v.to_string());
        }
        s
    }

    pub fn lhs(&self, value: impl Fn(&VariableIndex) -> f64) -> f64 {
        self.coefficients.iter().map(|(v, c)| c * value(v)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MilpOptions {
    pub symmetry_breaking: bool,
    pub time_windows: bool,
    pub volume: bool,
    pub fleet_usage: FleetUsage,
}

impl Default for MilpOptions {
    fn default() -> Self {
        Self { symmetry_breaking: false, time_windows: false, volume: false, fleet_usage: FleetUsage::All }
    }
}

impl MilpOptions {
    pub fn check_options(&self) -> CheckOptions {
        CheckOptions {
            enable_volume: self.volume,
            enable_time_windows: self.time_windows,
            fleet_usage: self.fleet_usage,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilpModel {
    pub n: usize,
    /// Units per type, in fleet order.
    pub units: Vec<usize>,
    pub options: MilpOptions,
    /// Set when the lexicographic ordering rows were dropped because `n`
    /// exceeds [`SYMMETRY_ENCODING_LIMIT`].
    pub symmetry_downgraded: bool,
    pub variables: BTreeMap<VariableIndex, Variable>,
    pub objective: BTreeMap<VariableIndex, f64>,
    pub constraints: Vec<LinearConstraint>,
}

impl MilpModel {
    pub fn count(&self, tag: &str) -> usize {
        self.constraints.iter().filter(|c| c.tag == tag).count()
    }

    pub fn counts(&self) -> BTreeMap<&'static str, usize> {
        let mut m = BTreeMap::new();
        for c in &self.constraints {
            *m.entry(c.tag).or_insert(0) += 1;
        }
        m
    }

    pub fn family_size(&self, family: Family) -> usize {
        self.variables.keys().filter(|v| v.family == family).count()
    }

    /// `(k, t)` pairs in model order.
    pub fn tours(&self) -> Vec<(usize, usize)> {
        self.units.iter().enumerate().flat_map(|(p, &h)| (1..=h).map(move |t| (p + 1, t))).collect()
    }
}

/// Closed-form number of rows per tag for `n` customers and `units[k]`
/// units of each type.
pub fn expected_row_counts(n: usize, units: &[usize], options: &MilpOptions) -> BTreeMap<&'static str, usize> {
    let mut m = BTreeMap::new();
    if n == 0 {
        return m;
    }
    let h: usize = units.iter().sum();
    let chain: usize = units.iter().map(|&u| u.saturating_sub(1)).sum();
    let nodes = n + 1;
    m.insert("6", n);
    m.insert("7", n);
    m.insert("8", h);
    m.insert("9", h);
    m.insert("10", n * nodes * h);
    m.insert("11", h);
    m.insert("14", h);
    m.insert("16", nodes * h);
    m.insert("FC", n * h);
    for tag in ["B2", "B3", "B4", "B5"] {
        m.insert(tag, nodes * nodes * h);
    }
    m.insert("B6", h);
    m.insert("B7", n * n * h);
    m.insert("B8", n * n * h);
    if options.time_windows {
        m.insert("C2", n * n * h);
        m.insert("C3", 2 * n * h);
    } else {
        for tag in ["B9", "B10", "B11", "B12"] {
            m.insert(tag, n * (n - 1) * h);
        }
    }
    if options.symmetry_breaking {
        m.insert("B14", chain);
        if n <= SYMMETRY_ENCODING_LIMIT {
            m.insert("B15", chain);
            m.insert("B16", n * h);
        }
    }
    if options.volume {
        m.insert("C1", h);
    }
    m.retain(|_, c| *c > 0);
    m
}

struct Builder {
    variables: BTreeMap<VariableIndex, Variable>,
    constraints: Vec<LinearConstraint>,
}

impl Builder {
    fn var(&mut self, index: VariableIndex, lower: f64, upper: f64, kind: VarKind) {
        self.variables.insert(index, Variable { lower, upper, kind });
    }

    fn row(&mut self, tag: &'static str, indices: &[usize], terms: impl IntoIterator<Item = (VariableIndex, f64)>, sense: Sense, rhs: f64) {
        let mut coefficients = BTreeMap::new();
        for (v, c) in terms {
            debug_assert!(self.variables.contains_key(&v), "undeclared {v}");
            *coefficients.entry(v).or_insert(0.0) += c;
        }
        coefficients.retain(|_, c: &mut f64| *c != 0.0);
        self.constraints.push(LinearConstraint { tag, indices: indices.to_vec(), coefficients, sense, rhs });
    }
}

/// Builds the linearized model. With `time_windows` the MTZ rows are
/// replaced by big-M sequencing on service start times; `volume` adds the
/// per-tour volume cap.
pub fn build_model(instance: &Instance, fleet: &Fleet, options: &MilpOptions) -> Result<MilpModel, MilpError> {
    let n = instance.len();
    let units: Vec<usize> = fleet.types().iter().map(|t| t.count).collect();
    let mut b = Builder { variables: BTreeMap::new(), constraints: Vec::new() };
    let mut objective = BTreeMap::new();
    let mut downgraded = false;
    if n == 0 {
        return Ok(MilpModel {
            n,
            units,
            options: *options,
            symmetry_downgraded: false,
            variables: b.variables,
            objective,
            constraints: b.constraints,
        });
    }
    let use_y = options.symmetry_breaking && n <= SYMMETRY_ENCODING_LIMIT;
    if options.symmetry_breaking && !use_y {
        log::warn!("n = {n} exceeds {SYMMETRY_ENCODING_LIMIT}; keeping only the dispatch-order symmetry rows");
        downgraded = true;
    }
    let temporal = if options.time_windows { Some(Temporal::new(instance, fleet)?) } else { None };
    if options.volume {
        if let Some(t) = fleet.types().iter().find(|t| t.volume_capacity.is_none()) {
            return Err(MilpError::MissingData(format!("drone type {} has no volume capacity", t.type_id)));
        }
        if let Some(c) = instance.customers().iter().find(|c| c.package_volume.is_none()) {
            return Err(MilpError::MissingData(format!("customer {} has no package volume", c.id)));
        }
    }

    let nf = n as f64;
    let nodes = 0..=n;
    let customers = 1..=n;
    let mut tours = Vec::new();
    for (p, drone) in fleet.types().iter().enumerate() {
        for t in 1..=drone.count {
            tours.push((p + 1, t, drone));
        }
    }

    for &(k, t, drone) in &tours {
        for i in nodes.clone() {
            for j in nodes.clone() {
                b.var(VariableIndex::x(i, j, k, t), 0.0, 1.0, VarKind::Binary);
                b.var(VariableIndex::z(i, j, k, t), 0.0, drone.max_total_mass, VarKind::Continuous);
                let c = instance.leg_coefficients(drone, i, j);
                let coeff = c.takeoff_coeff + c.flight_coeff * instance.distance(i, j);
                if coeff != 0.0 {
                    objective.insert(VariableIndex::z(i, j, k, t), coeff);
                }
            }
            b.var(VariableIndex::w(i, k, t), drone.self_mass, drone.max_total_mass, VarKind::Continuous);
        }
        for i in customers.clone() {
            if let Some(tw) = &temporal {
                b.var(VariableIndex::r(i, k, t), 0.0, tw.horizon, VarKind::Continuous);
            } else {
                b.var(VariableIndex::u(i, k, t), 1.0, nf, VarKind::Continuous);
                for j in customers.clone().filter(|&j| j != i) {
                    b.var(VariableIndex::s(i, j, k, t), 0.0, nf, VarKind::Continuous);
                }
            }
            if use_y {
                b.var(VariableIndex::y(i, k, t), 0.0, 1.0, VarKind::Binary);
            }
        }
    }

    let x = VariableIndex::x;
    let launches = |k: usize, t: usize| (1..=n).map(move |j| (x(0, j, k, t), 1.0));
    // customers served by tour (k, t)
    let served = |k: usize, t: usize| (0..=n).flat_map(move |i| (1..=n).filter(move |&j| j != i).map(move |j| (x(i, j, k, t), 1.0)));

    for j in customers.clone() {
        let terms = tours.iter().flat_map(|&(k, t, _)| nodes.clone().map(move |i| (x(i, j, k, t), 1.0)));
        b.row("6", &[j], terms, Sense::Eq, 1.0);
    }
    for i in customers.clone() {
        let terms = tours.iter().flat_map(|&(k, t, _)| nodes.clone().map(move |j| (x(i, j, k, t), 1.0)));
        b.row("7", &[i], terms, Sense::Eq, 1.0);
    }
    let launch_sense = if options.fleet_usage == FleetUsage::All { Sense::Eq } else { Sense::Le };
    for &(k, t, _) in &tours {
        b.row("8", &[k, t], launches(k, t), launch_sense, 1.0);
        b.row("9", &[k, t], (1..=n).map(|i| (x(i, 0, k, t), 1.0)), Sense::Le, 1.0);
    }
    for &(k, t, _) in &tours {
        for i in customers.clone() {
            for j in nodes.clone() {
                let terms = std::iter::once((x(i, j, k, t), 1.0)).chain(launches(k, t).map(|(v, c)| (v, -c)));
                b.row("10", &[i, j, k, t], terms, Sense::Le, 0.0);
            }
        }
    }
    for &(k, t, drone) in &tours {
        let terms = std::iter::once((VariableIndex::w(0, k, t), 1.0)).chain(
            customers.clone().flat_map(|i| nodes.clone().map(move |j| (x(i, j, k, t), -instance.mass(i)))),
        );
        b.row("11", &[k, t], terms, Sense::Eq, drone.self_mass);
    }
    for &(k, t, drone) in &tours {
        b.row("14", &[k, t], [(VariableIndex::w(0, k, t), 1.0)], Sense::Le, drone.max_total_mass);
    }
    for &(k, t, _) in &tours {
        for i in nodes.clone() {
            b.row("16", &[i, k, t], [(x(i, i, k, t), 1.0)], Sense::Eq, 0.0);
        }
    }
    // flow conservation per unit: a tour that enters a customer leaves it
    for &(k, t, _) in &tours {
        for j in customers.clone() {
            let inflow = nodes.clone().filter(|&i| i != j).map(|i| (x(i, j, k, t), 1.0));
            let outflow = nodes.clone().filter(|&l| l != j).map(|l| (x(j, l, k, t), -1.0));
            b.row("FC", &[j, k, t], inflow.chain(outflow), Sense::Eq, 0.0);
        }
    }

    for &(k, t, drone) in &tours {
        let (m0, cap) = (drone.self_mass, drone.max_total_mass);
        for i in nodes.clone() {
            for j in nodes.clone() {
                let (z, xv, w) = (VariableIndex::z(i, j, k, t), x(i, j, k, t), VariableIndex::w(i, k, t));
                let idx = [i, j, k, t];
                b.row("B2", &idx, [(z, 1.0), (xv, -cap)], Sense::Le, 0.0);
                b.row("B3", &idx, [(z, 1.0), (xv, -m0)], Sense::Ge, 0.0);
                // z <= w - m0 (1 - x)
                b.row("B4", &idx, [(z, 1.0), (w, -1.0), (xv, -m0)], Sense::Le, -m0);
                // z >= w - W (1 - x)
                b.row("B5", &idx, [(z, 1.0), (w, -1.0), (xv, -cap)], Sense::Ge, -cap);
            }
        }
        let energy = nodes
            .clone()
            .flat_map(|i| nodes.clone().map(move |j| VariableIndex::z(i, j, k, t)))
            .filter_map(|z| objective.get(&z).map(|&c| (z, c)));
        b.row("B6", &[k, t], energy, Sense::Le, drone.energy_capacity);
        for i in nodes.clone() {
            for j in customers.clone().filter(|&j| j != i) {
                let mj = instance.mass(j);
                let (wi, wj, xv) = (VariableIndex::w(i, k, t), VariableIndex::w(j, k, t), x(i, j, k, t));
                let idx = [i, j, k, t];
                // w_i - w_j - m_j <= (W - m0 - m_j)(1 - x)
                let up = cap - m0 - mj;
                b.row("B7", &idx, [(wi, 1.0), (wj, -1.0), (xv, up)], Sense::Le, mj + up);
                // w_i - w_j - m_j >= (m0 - W - m_j)(1 - x)
                let lo = m0 - cap - mj;
                b.row("B8", &idx, [(wi, 1.0), (wj, -1.0), (xv, lo)], Sense::Ge, mj + lo);
            }
        }
    }

    if let Some(tw) = &temporal {
        for &(k, t, _) in &tours {
            let p = k - 1;
            for i in nodes.clone() {
                for j in customers.clone().filter(|&j| j != i) {
                    // r_i + tau0 + tau_ij - r_j <= M (1 - x_ij), with r_0 = 0 and no service at the depot
                    let lag = tw.travel[p][i][j] + if i == 0 { 0.0 } else { tw.service };
                    let mut terms = vec![(VariableIndex::r(j, k, t), -1.0), (x(i, j, k, t), tw.big_m)];
                    if i > 0 {
                        terms.push((VariableIndex::r(i, k, t), 1.0));
                    }
                    b.row("C2", &[i, j, k, t], terms, Sense::Le, tw.big_m - lag);
                }
            }
            for i in customers.clone() {
                let (a, bnd) = tw.windows[i];
                b.row("C3", &[i, 0, k, t], [(VariableIndex::r(i, k, t), 1.0)], Sense::Ge, a);
                b.row("C3", &[i, 1, k, t], [(VariableIndex::r(i, k, t), 1.0)], Sense::Le, bnd);
            }
        }
    } else {
        for &(k, t, _) in &tours {
            let relax = options.fleet_usage == FleetUsage::AtMost;
            for i in customers.clone() {
                for j in customers.clone().filter(|&j| j != i) {
                    let s = VariableIndex::s(i, j, k, t);
                    let idx = [i, j, k, t];
                    // u_i - u_j + s_ij - Q (+ n D) <= -1 (+ n)
                    let mut terms: Vec<(VariableIndex, f64)> =
                        vec![(VariableIndex::u(i, k, t), 1.0), (VariableIndex::u(j, k, t), -1.0), (s, 1.0)];
                    terms.extend(served(k, t).map(|(v, c)| (v, -c)));
                    let mut rhs = -1.0;
                    if relax {
                        terms.extend(launches(k, t).map(|(v, _)| (v, nf)));
                        rhs += nf;
                    }
                    b.row("B9", &idx, terms, Sense::Le, rhs);
                    b.row("B10", &idx, [(s, 1.0), (x(i, j, k, t), -nf)], Sense::Le, 0.0);
                    b.row("B11", &idx, std::iter::once((s, 1.0)).chain(served(k, t).map(|(v, c)| (v, -c))), Sense::Le, 0.0);
                    let terms = [(s, 1.0), (x(i, j, k, t), -nf)].into_iter().chain(served(k, t).map(|(v, c)| (v, -c)));
                    b.row("B12", &idx, terms, Sense::Ge, -nf);
                }
            }
        }
    }

    if options.symmetry_breaking {
        for &(k, t, drone) in &tours {
            if t < drone.count {
                let terms = launches(k, t).chain(launches(k, t + 1).map(|(v, c)| (v, -c)));
                b.row("B14", &[k, t], terms, Sense::Ge, 0.0);
            }
        }
        if use_y {
            for &(k, t, drone) in &tours {
                if t < drone.count {
                    let weight = |i: usize| 2f64.powi((n - i) as i32);
                    let terms = customers
                        .clone()
                        .map(|i| (VariableIndex::y(i, k, t), weight(i)))
                        .chain(customers.clone().map(|i| (VariableIndex::y(i, k, t + 1), -weight(i))));
                    b.row("B15", &[k, t], terms, Sense::Ge, 0.0);
                }
            }
            for &(k, t, _) in &tours {
                for i in customers.clone() {
                    let terms = std::iter::once((VariableIndex::y(i, k, t), 1.0)).chain(nodes.clone().map(|j| (x(i, j, k, t), -1.0)));
                    b.row("B16", &[i, k, t], terms, Sense::Eq, 0.0);
                }
            }
        }
    }

    if options.volume {
        for &(k, t, drone) in &tours {
            let terms = customers
                .clone()
                .flat_map(|i| nodes.clone().map(move |j| (x(i, j, k, t), instance.customer(i).and_then(|c| c.package_volume).unwrap_or(0.0))));
            b.row("C1", &[k, t], terms, Sense::Le, drone.volume_capacity.unwrap_or(0.0));
        }
    }

    Ok(MilpModel {
        n,
        units,
        options: *options,
        symmetry_downgraded: downgraded,
        variables: b.variables,
        objective,
        constraints: b.constraints,
    })
}

/// Travel times, windows and the sequencing big-M.
struct Temporal {
    /// Per type position, `travel[p][i][j]` in hours.
    travel: Vec<Vec<Vec<f64>>>,
    service: f64,
    /// Indexed by customer id; entry 0 unused.
    windows: Vec<(f64, f64)>,
    big_m: f64,
    horizon: f64,
}

impl Temporal {
    fn new(instance: &Instance, fleet: &Fleet) -> Result<Self, MilpError> {
        let n = instance.len();
        let service = instance.service_time().ok_or_else(|| MilpError::MissingData("instance has no service time".into()))?;
        let mut windows = vec![(0.0, 0.0)];
        for c in instance.customers() {
            let w = c.time_window.ok_or_else(|| MilpError::MissingData(format!("customer {} has no time window", c.id)))?;
            windows.push((w.earliest, w.latest));
        }
        let mut travel = Vec::new();
        for d in fleet.types() {
            let speed = d.speed.ok_or_else(|| MilpError::MissingData(format!("drone type {} has no speed", d.type_id)))?;
            travel.push((0..=n).map(|i| (0..=n).map(|j| instance.distance(i, j) / speed).collect()).collect());
        }
        let horizon = windows[1..].iter().map(|w| w.1).fold(0.0, f64::max);
        let max_tau = travel.iter().flatten().flatten().copied().fold(0.0, f64::max);
        Ok(Self { travel, service, windows, big_m: horizon + service + max_tau, horizon })
    }
}
