//! Seeded random instances: uniform positions in a rectangle centred on
//! the depot, uniform package masses.

use anyhow::{bail, Result};
use gdrp_core::model::{Customer, Instance, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub customers: usize,
    pub seed: u64,
    pub width: f64,
    pub height: f64,
    pub mass_min: f64,
    pub mass_max: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        Self { customers: 10, seed: 0, width: 10.0, height: 10.0, mass_min: 0.5, mass_max: 2.0 }
    }
}

pub fn generate(p: &GenParams) -> Result<Instance> {
    if !(p.width > 0.0 && p.height > 0.0) {
        bail!("area sides must be positive");
    }
    if !(p.mass_min >= 0.0 && p.mass_min <= p.mass_max) {
        bail!("mass range [{}, {}] is invalid", p.mass_min, p.mass_max);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let (hw, hh) = (p.width / 2.0, p.height / 2.0);
    let customers = (1..=p.customers)
        .map(|id| {
            let x = rng.gen_range(-hw..=hw);
            let y = rng.gen_range(-hh..=hh);
            let m = rng.gen_range(p.mass_min..=p.mass_max);
            Customer::new(id, Point::new(x, y), m)
        })
        .collect();
    Ok(Instance::new(Point::ORIGIN, customers)?)
}
