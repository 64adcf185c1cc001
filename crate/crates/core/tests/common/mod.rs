#![allow(dead_code)]

use gdrp_core::model::{Customer, DroneType, Fleet, Instance, Point};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Depot at the centre of a `side x side` square, masses uniform in `masses`.
pub fn random_instance(rng: &mut ChaCha8Rng, n: usize, side: f64, masses: (f64, f64)) -> Instance {
    let h = side / 2.0;
    let customers = (1..=n)
        .map(|id| {
            let p = Point::new(rng.gen_range(-h..h), rng.gen_range(-h..h));
            Customer::new(id, p, rng.gen_range(masses.0..masses.1))
        })
        .collect();
    Instance::new(Point::ORIGIN, customers).unwrap()
}

/// Baseline-style small and large types with 1 or 2 units each.
pub fn random_fleet(rng: &mut ChaCha8Rng) -> Fleet {
    let base = Fleet::table3();
    let mut types: Vec<DroneType> = base.types().to_vec();
    types[0].count = rng.gen_range(1..=2);
    types[1].count = rng.gen_range(1..=2);
    Fleet::new(types).unwrap()
}

/// Random instance and fleet in the spirit of the reference experiments,
/// scaled down so tiny instances stay mostly feasible.
pub fn random_case(seed: u64, max_n: usize) -> (Instance, Fleet) {
    let mut r = rng(seed);
    let n = r.gen_range(1..=max_n);
    let inst = random_instance(&mut r, n, 8.0, (0.3, 2.5));
    let fleet = random_fleet(&mut r);
    (inst, fleet)
}
