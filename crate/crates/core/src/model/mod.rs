//! Instance and fleet data: customers, drone types, distance matrices and
//! the readers that produce them (JSON files, Solomon benchmarks and the
//! built-in reference instance).

mod builtin;
mod geometry;
mod io;
mod solomon;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use builtin::{appendix_d_instance, APPENDIX_D_CUSTOMERS};
pub use geometry::{apply_no_fly_detours, segment_crosses_interior, ConvexPolygon};
pub use io::{FleetFile, InstanceFile};
pub use solomon::{bundled_solomon, parse_solomon, rescale_solomon, SolomonData, SolomonNode, BUNDLED_SOLOMON};

/// Absolute tolerance used when comparing stored coordinates and masses.
pub const INPUT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid customer {id}: {reason}")]
    InvalidCustomer { id: usize, reason: String },
    #[error("invalid drone type {id}: {reason}")]
    InvalidDroneType { id: usize, reason: String },
    #[error("customer ids must be exactly 1..={n}, found {found:?}")]
    BadCustomerIds { n: usize, found: Vec<usize> },
    #[error("duplicate drone type id {0}")]
    DuplicateTypeId(usize),
    #[error("distance matrix must be {expected}x{expected}: {reason}")]
    BadDistanceMatrix { expected: usize, reason: String },
    #[error("node {0} lies inside a no-fly zone")]
    NodeInsideNoFlyZone(usize),
    #[error("obstacle {0} is not a convex polygon with at least three vertices")]
    BadObstacle(usize),
    #[error("parse error at line {line}: {reason}")]
    ParseError { line: usize, reason: String },
    #[error("depot row (node 0) missing")]
    MissingDepot,
    #[error("degenerate bounding box: all {0} coordinates are equal")]
    DegenerateBoundingBox(char),
    #[error("{what} = {value} outside {range}")]
    OutOfRange { what: &'static str, value: String, range: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("json: {0}")]
    Json(String),
}

/// Planar position in kilometres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Point {
    fn from(v: [f64; 2]) -> Self {
        Point::new(v[0], v[1])
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

/// Service window `[earliest, latest]` in hours.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeWindow {
    pub earliest: f64,
    pub latest: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Customer {
    /// Node index, 1-based.
    pub id: usize,
    pub position: Point,
    /// Package mass in kg.
    pub package_mass: f64,
    /// Package volume in litres.
    pub package_volume: Option<f64>,
    pub time_window: Option<TimeWindow>,
}

impl Customer {
    pub fn new(id: usize, position: Point, package_mass: f64) -> Self {
        Self { id, position, package_mass, package_volume: None, time_window: None }
    }

    pub fn with_volume(mut self, volume: f64) -> Self {
        self.package_volume = Some(volume);
        self
    }

    pub fn with_window(mut self, earliest: f64, latest: f64) -> Self {
        self.time_window = Some(TimeWindow { earliest, latest });
        self
    }

    fn validate(&self) -> Result<(), ModelError> {
        let bad = |reason: &str| ModelError::InvalidCustomer { id: self.id, reason: reason.into() };
        if !self.position.is_finite() {
            return Err(bad("position must be finite"));
        }
        if !(self.package_mass > 0.0) || !self.package_mass.is_finite() {
            return Err(bad("package mass must be positive"));
        }
        if let Some(v) = self.package_volume {
            if !(v >= 0.0) {
                return Err(bad("package volume must be non-negative"));
            }
        }
        if let Some(w) = self.time_window {
            if !(w.earliest <= w.latest) {
                return Err(bad("time window must satisfy earliest <= latest"));
            }
        }
        Ok(())
    }
}

/// Physical and energy parameters shared by all units of one drone type.
#[derive(Debug, Clone, PartialEq)]
pub struct DroneType {
    pub type_id: usize,
    /// Tare plus battery mass, kg.
    pub self_mass: f64,
    /// Takeoff, hover and landing coefficient, Wh/kg.
    pub takeoff_coeff: f64,
    /// Level-flight coefficient, Wh/(kg km).
    pub flight_coeff: f64,
    /// Maximum total (self + payload) mass, kg.
    pub max_total_mass: f64,
    /// Battery energy capacity, Wh.
    pub energy_capacity: f64,
    /// Number of units (or, with battery swaps at the depot, tours) available.
    pub count: usize,
    pub volume_capacity: Option<f64>,
    /// Cruise speed in km/h, used for travel times.
    pub speed: Option<f64>,
}

impl DroneType {
    pub fn payload_capacity(&self) -> f64 {
        self.max_total_mass - self.self_mass
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |reason: &str| ModelError::InvalidDroneType { id: self.type_id, reason: reason.into() };
        if !(self.self_mass > 0.0) {
            return Err(bad("self mass must be positive"));
        }
        if !(self.max_total_mass > self.self_mass) {
            return Err(bad("max total mass must exceed self mass"));
        }
        if !(self.takeoff_coeff >= 0.0) {
            return Err(bad("takeoff coefficient must be non-negative"));
        }
        if !(self.flight_coeff > 0.0) {
            return Err(bad("flight coefficient must be positive"));
        }
        if !(self.energy_capacity > 0.0) {
            return Err(bad("energy capacity must be positive"));
        }
        if self.count < 1 {
            return Err(bad("count must be at least 1"));
        }
        if let Some(v) = self.volume_capacity {
            if !(v >= 0.0) {
                return Err(bad("volume capacity must be non-negative"));
            }
        }
        if let Some(s) = self.speed {
            if !(s > 0.0) {
                return Err(bad("speed must be positive"));
            }
        }
        Ok(())
    }
}

/// Ordered collection of drone types; type `k` (1-based position) owns unit
/// indices `1..=count`.
#[derive(Debug, Clone, PartialEq)]
pub struct Fleet {
    types: Vec<DroneType>,
}

impl Fleet {
    pub fn new(types: Vec<DroneType>) -> Result<Self, ModelError> {
        let mut seen = std::collections::BTreeSet::new();
        for t in &types {
            t.validate()?;
            if !seen.insert(t.type_id) {
                return Err(ModelError::DuplicateTypeId(t.type_id));
            }
        }
        Ok(Self { types })
    }

    pub fn types(&self) -> &[DroneType] {
        &self.types
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    /// Position of the type with the given id.
    pub fn position_of(&self, type_id: usize) -> Option<usize> {
        self.types.iter().position(|t| t.type_id == type_id)
    }

    pub fn get(&self, type_id: usize) -> Option<&DroneType> {
        self.types.iter().find(|t| t.type_id == type_id)
    }

    pub fn total_units(&self) -> usize {
        self.types.iter().map(|t| t.count).sum()
    }

    /// Small drone (type 1) and large drone (type 2) with the baseline
    /// experimental parameters.
    pub fn table3() -> Self {
        Self { types: vec![small_drone(3), large_drone(2)] }
    }

    /// The baseline fleet with its small drones replaced by large ones, so
    /// the number of units stays at five.
    pub fn large_only() -> Self {
        Self { types: vec![large_drone(5)] }
    }

    pub fn small_only() -> Self {
        Self { types: vec![small_drone(3)] }
    }

    /// Copy of the fleet with one type's parameters changed.
    pub fn with_type(&self, type_id: usize, f: impl FnOnce(&mut DroneType)) -> Result<Self, ModelError> {
        let mut types = self.types.clone();
        if let Some(t) = types.iter_mut().find(|t| t.type_id == type_id) {
            f(t);
        }
        Fleet::new(types)
    }
}

fn small_drone(count: usize) -> DroneType {
    DroneType {
        type_id: 1,
        self_mass: 3.0,
        takeoff_coeff: 0.3,
        flight_coeff: 10.0,
        max_total_mass: 5.0,
        energy_capacity: 300.0,
        count,
        volume_capacity: None,
        speed: None,
    }
}

fn large_drone(count: usize) -> DroneType {
    DroneType {
        type_id: 2,
        self_mass: 10.0,
        takeoff_coeff: 1.0,
        flight_coeff: 5.0,
        max_total_mass: 20.0,
        energy_capacity: 1500.0,
        count,
        volume_capacity: None,
        speed: None,
    }
}

/// Square symmetric matrix of node-to-node distances in km, node 0 = depot.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    size: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, ModelError> {
        let size = rows.len();
        let bad = |reason: String| ModelError::BadDistanceMatrix { expected: size, reason };
        let mut data = Vec::with_capacity(size * size);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != size {
                return Err(bad(format!("row {i} has {} entries", row.len())));
            }
            data.extend_from_slice(row);
        }
        let m = Self { size, data };
        for i in 0..size {
            if m.get(i, i) != 0.0 {
                return Err(bad(format!("d[{i}][{i}] must be 0")));
            }
            for j in 0..size {
                let v = m.get(i, j);
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(bad(format!("d[{i}][{j}] = {v} must be finite and non-negative")));
                }
                if v != m.get(j, i) {
                    return Err(bad(format!("d[{i}][{j}] != d[{j}][{i}]")));
                }
            }
        }
        Ok(m)
    }

    pub(crate) fn zeros(size: usize) -> Self {
        Self { size, data: vec![0.0; size * size] }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.size + j]
    }

    pub(crate) fn set_symmetric(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.size + j] = v;
        self.data[j * self.size + i] = v;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.size).map(|r| r.to_vec()).collect()
    }
}

/// Straight-line distances between the depot (node 0) and the customers
/// (nodes `1..=n`, in slice order).
pub fn build_distance_matrix(depot: Point, customers: &[Customer]) -> DistanceMatrix {
    let positions: Vec<Point> = std::iter::once(depot).chain(customers.iter().map(|c| c.position)).collect();
    let mut m = DistanceMatrix::zeros(positions.len());
    for i in 0..positions.len() {
        for j in i + 1..positions.len() {
            m.set_symmetric(i, j, positions[i].distance(positions[j]));
        }
    }
    m
}

/// Per-leg coefficients replacing a type's global `e_l`, `e_f` on one arc,
/// e.g. to account for wind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegCoefficients {
    pub takeoff_coeff: f64,
    pub flight_coeff: f64,
}

/// Where the distance matrix came from; controls what is written back out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceSource {
    Euclidean,
    Override,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    depot: Point,
    customers: Vec<Customer>,
    distances: DistanceMatrix,
    distance_source: DistanceSource,
    /// Keyed by (type_id, from, to).
    leg_overrides: BTreeMap<(usize, usize, usize), LegCoefficients>,
    service_time: Option<f64>,
    obstacles: Vec<ConvexPolygon>,
}

impl Instance {
    /// Euclidean instance. Customers are sorted by id; ids must be `1..=n`.
    pub fn new(depot: Point, customers: Vec<Customer>) -> Result<Self, ModelError> {
        Self::build(depot, customers, None, Vec::new())
    }

    /// Instance with an explicit distance matrix (node 0 = depot).
    pub fn with_distances(depot: Point, customers: Vec<Customer>, distances: DistanceMatrix) -> Result<Self, ModelError> {
        Self::build(depot, customers, Some(distances), Vec::new())
    }

    /// Euclidean or explicit distances, then detours around `obstacles`.
    pub fn build(
        depot: Point,
        mut customers: Vec<Customer>,
        distances: Option<DistanceMatrix>,
        obstacles: Vec<ConvexPolygon>,
    ) -> Result<Self, ModelError> {
        if !depot.is_finite() {
            return Err(ModelError::InvalidParameter("depot position must be finite".into()));
        }
        customers.sort_by_key(|c| c.id);
        for c in &customers {
            c.validate()?;
        }
        let n = customers.len();
        if customers.iter().enumerate().any(|(i, c)| c.id != i + 1) {
            return Err(ModelError::BadCustomerIds { n, found: customers.iter().map(|c| c.id).collect() });
        }
        let (mut matrix, source) = match distances {
            Some(m) => {
                if m.size() != n + 1 {
                    return Err(ModelError::BadDistanceMatrix {
                        expected: n + 1,
                        reason: format!("got {}x{}", m.size(), m.size()),
                    });
                }
                (m, DistanceSource::Override)
            }
            None => (build_distance_matrix(depot, &customers), DistanceSource::Euclidean),
        };
        if !obstacles.is_empty() {
            let positions: Vec<Point> = std::iter::once(depot).chain(customers.iter().map(|c| c.position)).collect();
            matrix = apply_no_fly_detours(&matrix, &positions, &obstacles)?;
        }
        Ok(Self {
            depot,
            customers,
            distances: matrix,
            distance_source: source,
            leg_overrides: BTreeMap::new(),
            service_time: None,
            obstacles,
        })
    }

    pub fn with_service_time(mut self, hours: f64) -> Self {
        self.service_time = Some(hours);
        self
    }

    /// Override the energy coefficients of drone type `type_id` on arc `from -> to`.
    pub fn with_leg_coefficients(mut self, type_id: usize, from: usize, to: usize, coeffs: LegCoefficients) -> Self {
        self.leg_overrides.insert((type_id, from, to), coeffs);
        self
    }

    pub fn depot(&self) -> Point {
        self.depot
    }

    pub fn customers(&self) -> &[Customer] {
        &self.customers
    }

    /// Number of customers `n`.
    pub fn len(&self) -> usize {
        self.customers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.customers.is_empty()
    }

    pub fn customer(&self, id: usize) -> Option<&Customer> {
        id.checked_sub(1).and_then(|i| self.customers.get(i))
    }

    /// Package mass of node `id`; zero for the depot.
    pub fn mass(&self, id: usize) -> f64 {
        if id == 0 {
            0.0
        } else {
            self.customers[id - 1].package_mass
        }
    }

    pub fn position(&self, node: usize) -> Point {
        if node == 0 {
            self.depot
        } else {
            self.customers[node - 1].position
        }
    }

    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.distances.get(i, j)
    }

    pub fn distances(&self) -> &DistanceMatrix {
        &self.distances
    }

    pub fn distance_source(&self) -> DistanceSource {
        self.distance_source
    }

    pub fn obstacles(&self) -> &[ConvexPolygon] {
        &self.obstacles
    }

    pub fn service_time(&self) -> Option<f64> {
        self.service_time
    }

    pub fn leg_overrides(&self) -> &BTreeMap<(usize, usize, usize), LegCoefficients> {
        &self.leg_overrides
    }

    /// Effective coefficients for `drone` on arc `i -> j`.
    pub fn leg_coefficients(&self, drone: &DroneType, i: usize, j: usize) -> LegCoefficients {
        self.leg_overrides.get(&(drone.type_id, i, j)).copied().unwrap_or(LegCoefficients {
            takeoff_coeff: drone.takeoff_coeff,
            flight_coeff: drone.flight_coeff,
        })
    }

    pub fn total_mass(&self) -> f64 {
        self.customers.iter().map(|c| c.package_mass).sum()
    }

    /// Copy with package masses replaced (same order as `customers()`).
    pub fn with_masses(&self, masses: &[f64]) -> Result<Self, ModelError> {
        if masses.len() != self.len() {
            return Err(ModelError::InvalidParameter(format!("expected {} masses, got {}", self.len(), masses.len())));
        }
        let mut out = self.clone();
        for (c, &m) in out.customers.iter_mut().zip(masses) {
            c.package_mass = m;
            c.validate()?;
        }
        Ok(out)
    }

    /// Affine min-max map of package masses onto `[lo, hi]`.
    pub fn rescale_masses(&self, lo: f64, hi: f64) -> Result<Self, ModelError> {
        if !(lo > 0.0 && lo < hi) {
            return Err(ModelError::InvalidParameter(format!("mass range [{lo}, {hi}] must satisfy 0 < lo < hi")));
        }
        let masses: Vec<f64> = self.customers.iter().map(|c| c.package_mass).collect();
        let scaled = min_max_map(&masses, lo, hi).ok_or_else(|| ModelError::InvalidParameter("all masses are equal".into()))?;
        self.with_masses(&scaled)
    }

    /// Affine min-max map of customer coordinates onto a `width x height`
    /// rectangle centred on the depot. Distances are recomputed (Euclidean).
    pub fn rescale_area(&self, width: f64, height: f64) -> Result<Self, ModelError> {
        if !(width > 0.0 && height > 0.0) {
            return Err(ModelError::InvalidParameter("area sides must be positive".into()));
        }
        let xs: Vec<f64> = self.customers.iter().map(|c| c.position.x).collect();
        let ys: Vec<f64> = self.customers.iter().map(|c| c.position.y).collect();
        let cx = self.depot.x;
        let cy = self.depot.y;
        let nx = min_max_map(&xs, cx - width / 2.0, cx + width / 2.0).ok_or(ModelError::DegenerateBoundingBox('x'))?;
        let ny = min_max_map(&ys, cy - height / 2.0, cy + height / 2.0).ok_or(ModelError::DegenerateBoundingBox('y'))?;
        let customers = self
            .customers
            .iter()
            .zip(nx.into_iter().zip(ny))
            .map(|(c, (x, y))| Customer { position: Point::new(x, y), ..c.clone() })
            .collect();
        let mut out = Instance::build(self.depot, customers, None, self.obstacles.clone())?;
        out.leg_overrides = self.leg_overrides.clone();
        out.service_time = self.service_time;
        Ok(out)
    }

    /// Stretches every coordinate away from the depot by `fx` horizontally
    /// and `fy` vertically; obstacles are stretched with it. Distances are
    /// recomputed.
    pub fn scale_about_depot(&self, fx: f64, fy: f64) -> Result<Self, ModelError> {
        if !(fx > 0.0 && fy > 0.0 && fx.is_finite() && fy.is_finite()) {
            return Err(ModelError::InvalidParameter(format!("scale factors ({fx}, {fy}) must be positive")));
        }
        let d = self.depot;
        let map = |p: Point| Point::new(d.x + fx * (p.x - d.x), d.y + fy * (p.y - d.y));
        let customers = self.customers.iter().map(|c| Customer { position: map(c.position), ..c.clone() }).collect();
        let obstacles = self
            .obstacles
            .iter()
            .map(|o| ConvexPolygon::new(o.vertices().iter().map(|&p| map(p)).collect()).expect("scaling keeps convexity"))
            .collect();
        let mut out = Instance::build(self.depot, customers, None, obstacles)?;
        out.leg_overrides = self.leg_overrides.clone();
        out.service_time = self.service_time;
        Ok(out)
    }

    /// Sub-instance with the first `n` customers.
    pub fn truncated(&self, n: usize) -> Result<Self, ModelError> {
        if n > self.len() {
            return Err(ModelError::OutOfRange { what: "n", value: n.to_string(), range: format!("0..={}", self.len()) });
        }
        let customers = self.customers[..n].to_vec();
        let distances = match self.distance_source {
            DistanceSource::Euclidean => None,
            DistanceSource::Override => Some(DistanceMatrix::from_rows(
                self.distances.rows().into_iter().take(n + 1).map(|r| r[..=n].to_vec()).collect(),
            )?),
        };
        let mut out = Instance::build(self.depot, customers, distances, self.obstacles.clone())?;
        out.leg_overrides = self.leg_overrides.iter().filter(|((_, i, j), _)| *i <= n && *j <= n).map(|(k, v)| (*k, *v)).collect();
        out.service_time = self.service_time;
        Ok(out)
    }
}

/// Maps `values` affinely so that min -> lo and max -> hi. `None` when all
/// values coincide.
pub(crate) fn min_max_map(values: &[f64], lo: f64, hi: f64) -> Option<Vec<f64>> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(max > min) {
        return None;
    }
    Some(values.iter().map(|&v| lo + (v - min) / (max - min) * (hi - lo)).collect())
}
