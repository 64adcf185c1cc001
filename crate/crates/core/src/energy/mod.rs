//! Payload-dependent energy: per-leg law, tour weight profiles, round trips
//! and the large-versus-small drone comparison.

pub mod power;

use thiserror::Error;

use crate::model::{DroneType, Instance};
pub use crate::model::LegCoefficients as LegEnergyParams;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnergyError {
    #[error("tour references customer {0}, which is not in the instance")]
    UnknownCustomer(usize),
}

/// `(e_l + e_f d) w`: energy of one takeoff-to-landing leg of length
/// `distance` flown at total mass `mass`.
#[inline]
pub fn leg_energy(params: LegEnergyParams, distance: f64, mass: f64) -> f64 {
    (params.takeoff_coeff + params.flight_coeff * distance) * mass
}

/// Total mass at each departure along a tour: depot first, then every
/// customer in visit order. The last entry is the empty drone.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightProfile {
    entries: Vec<(usize, f64)>,
}

impl WeightProfile {
    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn masses(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.1).collect()
    }

    pub fn launch_mass(&self) -> f64 {
        self.entries[0].1
    }

    pub fn final_mass(&self) -> f64 {
        self.entries[self.entries.len() - 1].1
    }
}

fn check_visits(visits: &[usize], instance: &Instance) -> Result<(), EnergyError> {
    match visits.iter().find(|&&v| v == 0 || v > instance.len()) {
        Some(&v) => Err(EnergyError::UnknownCustomer(v)),
        None => Ok(()),
    }
}

/// Package mass still on board when leaving the depot and after each
/// visit. Built from the back so the final entry is exactly zero.
fn remaining_payload(visits: &[usize], instance: &Instance) -> Vec<f64> {
    let mut rem = vec![0.0; visits.len() + 1];
    for k in (0..visits.len()).rev() {
        rem[k] = rem[k + 1] + instance.mass(visits[k]);
    }
    rem
}

pub fn tour_weight_profile(visits: &[usize], drone: &DroneType, instance: &Instance) -> Result<WeightProfile, EnergyError> {
    check_visits(visits, instance)?;
    let rem = remaining_payload(visits, instance);
    let entries = std::iter::once(0)
        .chain(visits.iter().copied())
        .zip(rem)
        .map(|(node, payload)| (node, drone.self_mass + payload))
        .collect();
    Ok(WeightProfile { entries })
}

/// Energy of `0 -> visits... -> 0`, honouring per-leg coefficient
/// overrides. An empty tour costs nothing.
pub fn tour_energy(visits: &[usize], drone: &DroneType, instance: &Instance) -> Result<f64, EnergyError> {
    if visits.is_empty() {
        check_visits(visits, instance)?;
        return Ok(0.0);
    }
    let profile = tour_weight_profile(visits, drone, instance)?;
    let mut total = 0.0;
    for (k, &(from, mass)) in profile.entries().iter().enumerate() {
        let to = visits.get(k).copied().unwrap_or(0);
        total += leg_energy(instance.leg_coefficients(drone, from, to), instance.distance(from, to), mass);
    }
    Ok(total)
}

/// Length of `0 -> visits... -> 0`.
pub fn tour_distance(visits: &[usize], instance: &Instance) -> Result<f64, EnergyError> {
    check_visits(visits, instance)?;
    if visits.is_empty() {
        return Ok(0.0);
    }
    let mut prev = 0;
    let mut total = 0.0;
    for &v in visits.iter().chain(std::iter::once(&0)) {
        total += instance.distance(prev, v);
        prev = v;
    }
    Ok(total)
}

/// Out-and-back delivery of one package over `distance` each way:
/// `(e_l + e_f d)(2 m_0 + m)`.
pub fn roundtrip_energy(drone: &DroneType, package_mass: f64, distance: f64) -> f64 {
    (drone.takeoff_coeff + drone.flight_coeff * distance) * (2.0 * drone.self_mass + package_mass)
}

/// Round-trip energy of `large` minus that of `small`; negative when the
/// large drone is cheaper.
pub fn fleet_energy_gap(large: &DroneType, small: &DroneType, package_mass: f64, distance: f64) -> f64 {
    let (a, b) = gap_coefficients(large, small, package_mass);
    a + b * distance
}

/// `(A, B)` with gap = A + B d.
fn gap_coefficients(large: &DroneType, small: &DroneType, m: f64) -> (f64, f64) {
    let wl = 2.0 * large.self_mass + m;
    let ws = 2.0 * small.self_mass + m;
    (large.takeoff_coeff * wl - small.takeoff_coeff * ws, large.flight_coeff * wl - small.flight_coeff * ws)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Crossover {
    /// The gap changes sign at this non-negative distance.
    Distance(f64),
    /// The gap keeps one sign (or is constant and non-zero) for all d >= 0.
    None,
    /// The two types cost the same at every distance.
    ZeroGap,
}

pub fn crossover_distance(large: &DroneType, small: &DroneType, package_mass: f64) -> Crossover {
    let (a, b) = gap_coefficients(large, small, package_mass);
    if b == 0.0 {
        return if a == 0.0 { Crossover::ZeroGap } else { Crossover::None };
    }
    let root = -a / b;
    if root >= 0.0 {
        Crossover::Distance(root)
    } else {
        Crossover::None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Customer, DistanceMatrix, Fleet, Point};

    fn unit_drone(m0: f64) -> DroneType {
        DroneType {
            type_id: 1,
            self_mass: m0,
            takeoff_coeff: 1.0,
            flight_coeff: 1.0,
            max_total_mass: 1000.0,
            energy_capacity: 1e6,
            count: 1,
            volume_capacity: None,
            speed: None,
        }
    }

    fn example1() -> Instance {
        Instance::new(
            Point::ORIGIN,
            vec![
                Customer::new(1, Point::new(1.0, 0.0), 1.0),
                Customer::new(2, Point::new(1.0, 1.0), 10.0),
                Customer::new(3, Point::new(0.0, 1.0), 1.0),
            ],
        )
        .unwrap()
    }

    fn example2() -> Instance {
        let d = DistanceMatrix::from_rows(vec![vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.8], vec![1.0, 1.8, 0.0]]).unwrap();
        let cs = vec![Customer::new(1, Point::new(1.0, 0.0), 5.0), Customer::new(2, Point::new(0.0, 1.0), 5.0)];
        Instance::with_distances(Point::ORIGIN, cs, d).unwrap()
    }

    const UNIT: LegEnergyParams = LegEnergyParams { takeoff_coeff: 1.0, flight_coeff: 1.0 };

    #[test]
    fn leg_energy_values() {
        assert_eq!(leg_energy(UNIT, 1.0, 22.0), 44.0);
        let e = leg_energy(UNIT, 2f64.sqrt(), 11.0);
        assert!((e - (11.0 + 11.0 * 2f64.sqrt())).abs() < 1e-12);
        assert_eq!(leg_energy(LegEnergyParams { takeoff_coeff: 0.0, flight_coeff: 7.0 }, 0.0, 10.0), 0.0);
    }

    #[test]
    fn example1_profiles() {
        let inst = example1();
        let d = unit_drone(10.0);
        assert_eq!(tour_weight_profile(&[1, 2, 3], &d, &inst).unwrap().masses(), vec![22.0, 21.0, 11.0, 10.0]);
        assert_eq!(tour_weight_profile(&[2, 1, 3], &d, &inst).unwrap().masses(), vec![22.0, 12.0, 11.0, 10.0]);
        let empty = tour_weight_profile(&[], &d, &inst).unwrap();
        assert_eq!(empty.entries(), &[(0, 10.0)]);
        assert_eq!(tour_weight_profile(&[4], &d, &inst), Err(EnergyError::UnknownCustomer(4)));
    }

    #[test]
    fn example1_energies() {
        let inst = example1();
        let d = unit_drone(10.0);
        assert!((tour_energy(&[1, 2, 3], &d, &inst).unwrap() - 128.0).abs() < 1e-12);
        let green = 77.0 + 33.0 * 2f64.sqrt();
        assert!((tour_energy(&[2, 1, 3], &d, &inst).unwrap() - green).abs() < 1e-12);
        assert!((tour_distance(&[1, 2, 3], &inst).unwrap() - 4.0).abs() < 1e-12);
        assert!((tour_distance(&[2, 1, 3], &inst).unwrap() - (2.0 + 2.0 * 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn example2_energies() {
        let inst = example2();
        let d = unit_drone(10.0);
        assert!((tour_energy(&[1, 2], &d, &inst).unwrap() - 102.0).abs() < 1e-12);
        let split = tour_energy(&[1], &d, &inst).unwrap() + tour_energy(&[2], &d, &inst).unwrap();
        assert!((split - 100.0).abs() < 1e-12);
        assert_eq!(roundtrip_energy(&d, 5.0, 1.0), 50.0);
        assert_eq!(roundtrip_energy(&d, 0.0, 0.0), 2.0 * d.takeoff_coeff * d.self_mass);
    }

    #[test]
    fn leg_overrides_apply() {
        let inst = example2().with_leg_coefficients(1, 0, 1, LegEnergyParams { takeoff_coeff: 2.0, flight_coeff: 3.0 });
        let d = unit_drone(10.0);
        // 0->1 at 15 kg with (2 + 3*1), 1->0 at 10 kg with unit coefficients
        assert!((tour_energy(&[1], &d, &inst).unwrap() - (75.0 + 20.0)).abs() < 1e-12);
    }

    #[test]
    fn table3_crossover_is_absent_at_two_kg() {
        let fleet = Fleet::table3();
        let (small, large) = (&fleet.types()[0], &fleet.types()[1]);
        let (a, b) = gap_coefficients(large, small, 2.0);
        assert!((a - 19.6).abs() < 1e-12);
        assert!((b - 30.0).abs() < 1e-12);
        assert_eq!(crossover_distance(large, small, 2.0), Crossover::None);
        assert_eq!(crossover_distance(small, small, 2.0), Crossover::ZeroGap);
        for d in [0.0, 1.0, 5.0] {
            assert_eq!(fleet_energy_gap(small, small, 1.3, d), 0.0);
        }
    }

    #[test]
    fn crossover_sign_on_grid() {
        let fleet = Fleet::table3();
        let small = fleet.types()[0].clone();
        // cheap-to-lift large drone with a higher flight coefficient: the
        // small drone wins far away
        let mut large = fleet.types()[1].clone();
        large.takeoff_coeff = 0.01;
        large.flight_coeff = 4.0;
        let m = 1.0;
        match crossover_distance(&large, &small, m) {
            Crossover::Distance(d_star) => {
                for k in 0..1000 {
                    let d = k as f64 * 0.01;
                    let gap = fleet_energy_gap(&large, &small, m, d);
                    if (d - d_star).abs() > 1e-9 {
                        assert_eq!(gap < 0.0, d < d_star, "d = {d}");
                    }
                }
            }
            other => panic!("expected a crossover, got {other:?}"),
        }
    }
}
