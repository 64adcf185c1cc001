//! JSON schemas for instance and fleet files.

use serde::{Deserialize, Serialize};

use super::{
    ConvexPolygon, Customer, DistanceMatrix, DistanceSource, DroneType, Fleet, Instance, LegCoefficients, ModelError,
    Point,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CustomerRecord {
    pub id: usize,
    pub pos: Point,
    pub mass: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegRecord {
    #[serde(rename = "type")]
    pub type_id: usize,
    pub from: usize,
    pub to: usize,
    pub el: f64,
    pub ef: f64,
}

/// On-disk instance:
/// `{"depot":[x,y],"customers":[{"id":1,"pos":[x,y],"mass":m}],"distance_override":[[..]]?,"obstacles":[[[x,y],..]]?}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub depot: Point,
    pub customers: Vec<CustomerRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance_override: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub obstacles: Vec<Vec<Point>>,
    /// Hours spent at each customer.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub service_time: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub leg_coeffs: Vec<LegRecord>,
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance) -> Self {
        let customers = inst
            .customers()
            .iter()
            .map(|c| CustomerRecord {
                id: c.id,
                pos: c.position,
                mass: c.package_mass,
                volume: c.package_volume,
                window: c.time_window.map(|w| [w.earliest, w.latest]),
            })
            .collect();
        let distance_override = match inst.distance_source() {
            DistanceSource::Override => Some(inst.distances().rows()),
            DistanceSource::Euclidean => None,
        };
        Self {
            depot: inst.depot(),
            customers,
            distance_override,
            obstacles: inst.obstacles().iter().map(|o| o.vertices().to_vec()).collect(),
            service_time: inst.service_time(),
            leg_coeffs: inst
                .leg_overrides()
                .iter()
                .map(|(&(type_id, from, to), c)| LegRecord { type_id, from, to, el: c.takeoff_coeff, ef: c.flight_coeff })
                .collect(),
        }
    }

    pub fn into_instance(self) -> Result<Instance, ModelError> {
        let customers = self
            .customers
            .into_iter()
            .map(|r| {
                let mut c = Customer::new(r.id, r.pos, r.mass);
                c.package_volume = r.volume;
                if let Some([a, b]) = r.window {
                    c = c.with_window(a, b);
                }
                c
            })
            .collect();
        let distances = self.distance_override.map(DistanceMatrix::from_rows).transpose()?;
        let obstacles = self
            .obstacles
            .into_iter()
            .enumerate()
            .map(|(i, v)| ConvexPolygon::new(v).ok_or(ModelError::BadObstacle(i)))
            .collect::<Result<Vec<_>, _>>()?;
        let mut inst = Instance::build(self.depot, customers, distances, obstacles)?;
        if let Some(s) = self.service_time {
            if !(s >= 0.0) {
                return Err(ModelError::InvalidParameter(format!("service time {s} must be non-negative")));
            }
            inst = inst.with_service_time(s);
        }
        for r in self.leg_coeffs {
            if r.from > inst.len() || r.to > inst.len() {
                return Err(ModelError::InvalidParameter(format!("leg {}->{} outside the instance", r.from, r.to)));
            }
            if !(r.el >= 0.0 && r.ef >= 0.0) {
                return Err(ModelError::InvalidParameter(format!("negative coefficient on leg {}->{}", r.from, r.to)));
            }
            inst = inst.with_leg_coefficients(
                r.type_id,
                r.from,
                r.to,
                LegCoefficients { takeoff_coeff: r.el, flight_coeff: r.ef },
            );
        }
        Ok(inst)
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }
}

impl Instance {
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        InstanceFile::from_json(text)?.into_instance()
    }

    pub fn to_json(&self) -> String {
        InstanceFile::from_instance(self).to_json()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DroneRecord {
    pub id: usize,
    pub m0: f64,
    pub el: f64,
    pub ef: f64,
    #[serde(rename = "W")]
    pub max_total_mass: f64,
    #[serde(rename = "E")]
    pub energy_capacity: f64,
    pub count: usize,
    #[serde(rename = "V", default)]
    pub volume: Option<f64>,
    #[serde(default)]
    pub speed: Option<f64>,
}

/// On-disk fleet: `{"types":[{"id":1,"m0":3,"el":0.3,"ef":10,"W":5,"E":300,"count":3,"V":null,"speed":null}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FleetFile {
    pub types: Vec<DroneRecord>,
}

impl FleetFile {
    pub fn from_fleet(fleet: &Fleet) -> Self {
        Self {
            types: fleet
                .types()
                .iter()
                .map(|t| DroneRecord {
                    id: t.type_id,
                    m0: t.self_mass,
                    el: t.takeoff_coeff,
                    ef: t.flight_coeff,
                    max_total_mass: t.max_total_mass,
                    energy_capacity: t.energy_capacity,
                    count: t.count,
                    volume: t.volume_capacity,
                    speed: t.speed,
                })
                .collect(),
        }
    }

    pub fn into_fleet(self) -> Result<Fleet, ModelError> {
        Fleet::new(
            self.types
                .into_iter()
                .map(|r| DroneType {
                    type_id: r.id,
                    self_mass: r.m0,
                    takeoff_coeff: r.el,
                    flight_coeff: r.ef,
                    max_total_mass: r.max_total_mass,
                    energy_capacity: r.energy_capacity,
                    count: r.count,
                    volume_capacity: r.volume,
                    speed: r.speed,
                })
                .collect(),
        )
    }
}

impl Fleet {
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        serde_json::from_str::<FleetFile>(text).map_err(|e| ModelError::Json(e.to_string()))?.into_fleet()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&FleetFile::from_fleet(self)).expect("fleet serializes")
    }
}
