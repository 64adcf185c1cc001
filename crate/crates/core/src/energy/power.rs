//! Standalone power and energy calculators for multirotor flight phases.
//! SI units throughout (kg, m, s, W, J). The routing path only consumes
//! [`LegEnergyParams`](super::LegEnergyParams); [`flight_coeff_from_level_flight`]
//! bridges the two.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PowerError {
    #[error("lift-to-drag ratio undefined at speed {0} m/s")]
    UnknownSpeed(f64),
    #[error("{model:?} hover model needs parameter `{name}`")]
    MissingParameter { name: &'static str, model: HoverModel },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Lift-to-drag ratio as a function of airspeed.
#[derive(Debug, Clone, PartialEq)]
pub enum LiftToDrag {
    Constant(f64),
    /// `(speed m/s, ratio)` knots, interpolated linearly; undefined outside
    /// the first and last knot.
    Table(Vec<(f64, f64)>),
}

impl LiftToDrag {
    pub fn table(mut knots: Vec<(f64, f64)>) -> Result<Self, PowerError> {
        if knots.is_empty() {
            return Err(PowerError::InvalidParameter("lift-to-drag table is empty".into()));
        }
        knots.sort_by(|a, b| a.0.total_cmp(&b.0));
        if knots.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(PowerError::InvalidParameter("duplicate speed in lift-to-drag table".into()));
        }
        if knots.iter().any(|k| !(k.1 > 0.0)) {
            return Err(PowerError::InvalidParameter("lift-to-drag ratios must be positive".into()));
        }
        Ok(LiftToDrag::Table(knots))
    }

    pub fn at(&self, speed: f64) -> Result<f64, PowerError> {
        match self {
            LiftToDrag::Constant(v) => Ok(*v),
            LiftToDrag::Table(knots) => {
                let first = knots[0].0;
                let last = knots[knots.len() - 1].0;
                if !(speed >= first && speed <= last) {
                    return Err(PowerError::UnknownSpeed(speed));
                }
                let k = knots.partition_point(|p| p.0 < speed);
                if knots[k].0 == speed {
                    return Ok(knots[k].1);
                }
                let (s0, v0) = knots[k - 1];
                let (s1, v1) = knots[k];
                Ok(v0 + (v1 - v0) * (speed - s0) / (s1 - s0))
            }
        }
    }

    /// `(speed, nu*)`. A piecewise-linear curve peaks at a knot; the
    /// constant curve has no preferred speed.
    pub fn optimum(&self) -> (Option<f64>, f64) {
        match self {
            LiftToDrag::Constant(v) => (None, *v),
            LiftToDrag::Table(knots) => {
                let best = knots.iter().copied().fold(knots[0], |b, k| if k.1 > b.1 { k } else { b });
                (Some(best.0), best.1)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerModelParams {
    /// Airframe without battery or load, kg.
    pub tare_mass: f64,
    pub battery_mass: f64,
    pub load_mass: f64,
    /// m/s^2.
    pub gravity: f64,
    pub lift_to_drag: LiftToDrag,
    /// Battery-to-propeller efficiency in (0, 1].
    pub transfer_efficiency: f64,
    /// kg/m^3.
    pub air_density: Option<f64>,
    /// Area of one spinning blade disc, m^2.
    pub disc_area: Option<f64>,
    pub rotor_count: Option<u32>,
    /// `(alpha W/kg, beta W)` of the linear hover fit.
    pub linear_coeffs: Option<(f64, f64)>,
    pub power_constant: Option<f64>,
}

impl PowerModelParams {
    /// Level-flight parameters only; hover fields unset.
    pub fn new(tare_mass: f64, battery_mass: f64, load_mass: f64, lift_to_drag: LiftToDrag) -> Self {
        Self {
            tare_mass,
            battery_mass,
            load_mass,
            gravity: 9.81,
            lift_to_drag,
            transfer_efficiency: 1.0,
            air_density: None,
            disc_area: None,
            rotor_count: None,
            linear_coeffs: None,
            power_constant: None,
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.tare_mass + self.battery_mass + self.load_mass
    }

    pub fn validate(&self) -> Result<(), PowerError> {
        let bad = |s: &str| Err(PowerError::InvalidParameter(s.into()));
        if !(self.tare_mass >= 0.0 && self.battery_mass >= 0.0 && self.load_mass >= 0.0) {
            return bad("masses must be non-negative");
        }
        if !(self.gravity > 0.0) {
            return bad("gravity must be positive");
        }
        if !(self.transfer_efficiency > 0.0 && self.transfer_efficiency <= 1.0) {
            return bad("transfer efficiency must lie in (0, 1]");
        }
        if self.air_density.is_some_and(|r| !(r > 0.0)) || self.disc_area.is_some_and(|z| !(z > 0.0)) {
            return bad("air density and disc area must be positive");
        }
        if self.rotor_count == Some(0) {
            return bad("rotor count must be at least 1");
        }
        if let LiftToDrag::Constant(v) = self.lift_to_drag {
            if !(v > 0.0) {
                return bad("lift-to-drag ratio must be positive");
            }
        }
        Ok(())
    }
}

/// `m g s / nu(s)`, in W.
pub fn level_flight_power(params: &PowerModelParams, speed: f64) -> Result<f64, PowerError> {
    params.validate()?;
    let nu = params.lift_to_drag.at(speed)?;
    Ok(params.total_mass() * params.gravity * speed / nu)
}

/// Energy in J to fly `distance` m at the best lift-to-drag ratio:
/// `m g d / (nu* eta)`.
pub fn level_flight_energy(params: &PowerModelParams, distance: f64) -> Result<f64, PowerError> {
    params.validate()?;
    let (_, nu_star) = params.lift_to_drag.optimum();
    Ok(params.total_mass() * params.gravity * distance / (nu_star * params.transfer_efficiency))
}

/// Energy in J to fly `distance` m at a given speed: power times time over
/// efficiency.
pub fn level_flight_energy_at_speed(params: &PowerModelParams, distance: f64, speed: f64) -> Result<f64, PowerError> {
    if !(speed > 0.0) {
        return Err(PowerError::UnknownSpeed(speed));
    }
    let p = level_flight_power(params, speed)?;
    Ok(p * (distance / speed) / params.transfer_efficiency)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HoverModel {
    /// `m^{3/2} sqrt(g^3 / (2 rho zeta h))`
    Physics,
    /// `alpha m + beta`
    Linear,
    /// `c_p (m g)^{3/2}`
    PowerConstant,
}

pub fn hover_power(params: &PowerModelParams, model: HoverModel) -> Result<f64, PowerError> {
    params.validate()?;
    let m = params.total_mass();
    let g = params.gravity;
    let missing = |name| PowerError::MissingParameter { name, model };
    match model {
        HoverModel::Physics => {
            let rho = params.air_density.ok_or_else(|| missing("air_density"))?;
            let zeta = params.disc_area.ok_or_else(|| missing("disc_area"))?;
            let h = params.rotor_count.ok_or_else(|| missing("rotor_count"))? as f64;
            Ok(m.powf(1.5) * (g.powi(3) / (2.0 * rho * zeta * h)).sqrt())
        }
        HoverModel::Linear => {
            let (alpha, beta) = params.linear_coeffs.ok_or_else(|| missing("linear_coeffs"))?;
            Ok(alpha * m + beta)
        }
        HoverModel::PowerConstant => {
            let cp = params.power_constant.ok_or_else(|| missing("power_constant"))?;
            Ok(cp * (m * g).powf(1.5))
        }
    }
}

/// Level-flight energy per kg per km, in Wh/(kg km):
/// `g * 1000 / (nu* eta) / 3600`.
pub fn flight_coeff_from_level_flight(params: &PowerModelParams) -> Result<f64, PowerError> {
    params.validate()?;
    let (_, nu_star) = params.lift_to_drag.optimum();
    Ok(params.gravity * 1000.0 / (nu_star * params.transfer_efficiency) / 3600.0)
}

/// Published level-flight coefficient sets for a small and a large drone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlightCoeffPreset {
    Ld,
    R2,
}

impl FlightCoeffPreset {
    /// `(small e_f, large e_f)`.
    pub fn flight_coeffs(self) -> (f64, f64) {
        match self {
            FlightCoeffPreset::Ld => (4.20, 3.99),
            FlightCoeffPreset::R2 => (10.97, 8.81),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FlightCoeffPreset::Ld => "LD",
            FlightCoeffPreset::R2 => "R2",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ten_kg(nu: f64) -> PowerModelParams {
        PowerModelParams::new(4.0, 5.0, 1.0, LiftToDrag::Constant(nu))
    }

    #[test]
    fn level_flight_power_substitution() {
        let mut p = ten_kg(5.0);
        p.gravity = 10.0;
        assert_eq!(level_flight_power(&p, 10.0).unwrap(), 200.0);
        p.load_mass += 10.0;
        assert_eq!(level_flight_power(&p, 10.0).unwrap(), 400.0);
    }

    #[test]
    fn helicopter_versus_multirotor() {
        let heli = level_flight_power(&ten_kg(3.5), 12.0).unwrap();
        let multi = level_flight_power(&ten_kg(1.0), 12.0).unwrap();
        assert!((multi / heli - 3.5).abs() < 1e-12);
        let heli = level_flight_power(&ten_kg(5.0), 12.0).unwrap();
        assert!((multi / heli - 5.0).abs() < 1e-12);
    }

    #[test]
    fn level_flight_energy_values() {
        let p = ten_kg(2.0);
        assert_eq!(level_flight_energy(&p, 0.0).unwrap(), 0.0);
        assert!((level_flight_energy(&p, 1000.0).unwrap() - 49050.0).abs() < 1e-9);
        let mut half = p.clone();
        half.transfer_efficiency = 0.5;
        assert!((level_flight_energy(&half, 1000.0).unwrap() - 2.0 * 49050.0).abs() < 1e-9);
    }

    #[test]
    fn table_lookup_and_unknown_speed() {
        let ld = LiftToDrag::table(vec![(20.0, 2.0), (5.0, 1.0), (10.0, 3.0)]).unwrap();
        assert_eq!(ld.at(7.5).unwrap(), 2.0);
        assert_eq!(ld.at(10.0).unwrap(), 3.0);
        assert_eq!(ld.optimum(), (Some(10.0), 3.0));
        assert_eq!(ld.at(4.0), Err(PowerError::UnknownSpeed(4.0)));
        let p = PowerModelParams::new(1.0, 1.0, 0.0, ld);
        assert_eq!(level_flight_power(&p, 30.0), Err(PowerError::UnknownSpeed(30.0)));
    }

    #[test]
    fn optimal_energy_does_not_depend_on_speed() {
        let p = PowerModelParams::new(1.0, 1.0, 0.5, LiftToDrag::table(vec![(5.0, 1.0), (12.0, 2.5), (20.0, 1.5)]).unwrap());
        let (s_star, _) = p.lift_to_drag.optimum();
        let at_star = level_flight_energy_at_speed(&p, 3000.0, s_star.unwrap()).unwrap();
        assert!((at_star - level_flight_energy(&p, 3000.0).unwrap()).abs() < 1e-9);
        // with a constant ratio every speed is optimal
        let c = ten_kg(2.0);
        for s in [1.0, 7.0, 33.0] {
            assert!((level_flight_energy_at_speed(&c, 500.0, s).unwrap() - level_flight_energy(&c, 500.0).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn hover_models() {
        let mut p = ten_kg(1.0);
        p.linear_coeffs = Some((0.0, 7.0));
        assert_eq!(hover_power(&p, HoverModel::Linear).unwrap(), 7.0);
        assert_eq!(
            hover_power(&p, HoverModel::Physics),
            Err(PowerError::MissingParameter { name: "air_density", model: HoverModel::Physics })
        );

        p.air_density = Some(1.225);
        p.disc_area = Some(0.2);
        p.rotor_count = Some(4);
        let base = hover_power(&p, HoverModel::Physics).unwrap();
        // quarter the denominator, quadrupling g^3/(2 rho zeta h)
        p.disc_area = Some(0.05);
        assert!((hover_power(&p, HoverModel::Physics).unwrap() / base - 2.0).abs() < 1e-12);

        p.power_constant = Some(1.0 / (2.0 * 1.225 * 0.05 * 4.0f64).sqrt());
        let physics = hover_power(&p, HoverModel::Physics).unwrap();
        let cp = hover_power(&p, HoverModel::PowerConstant).unwrap();
        assert!((physics - cp).abs() < 1e-9 * physics);
    }

    #[test]
    fn presets_and_coefficient_derivation() {
        assert_eq!(FlightCoeffPreset::Ld.flight_coeffs(), (4.20, 3.99));
        assert_eq!(FlightCoeffPreset::R2.flight_coeffs(), (10.97, 8.81));
        let p = ten_kg(2.0);
        // 1 kg over 1 km = (9.81 * 1000 / 2) J
        let e = flight_coeff_from_level_flight(&p).unwrap();
        assert!((e - 9.81 * 1000.0 / 2.0 / 3600.0).abs() < 1e-12);
        let mut bad = p;
        bad.transfer_efficiency = 1.5;
        assert!(flight_coeff_from_level_flight(&bad).is_err());
    }
}
