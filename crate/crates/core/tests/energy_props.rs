use gdrp_core::energy::power::{level_flight_energy, level_flight_energy_at_speed, LiftToDrag, PowerModelParams};
use gdrp_core::energy::{fleet_energy_gap, leg_energy, roundtrip_energy, tour_energy, tour_weight_profile, LegEnergyParams};
use gdrp_core::model::{Customer, DistanceMatrix, DroneType, Fleet, Instance, Point};
use proptest::prelude::*;

fn drone(m0: f64, el: f64, ef: f64) -> DroneType {
    DroneType {
        type_id: 1,
        self_mass: m0,
        takeoff_coeff: el,
        flight_coeff: ef,
        max_total_mass: 1e6,
        energy_capacity: 1e12,
        count: 1,
        volume_capacity: None,
        speed: None,
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #[test]
    fn leg_energy_is_linear_in_mass_and_affine_in_distance(
        el in 0.0f64..3.0, ef in 0.1f64..12.0, d in 0.0f64..10.0, m in 0.0f64..30.0, s in 0.0f64..4.0, d2 in 0.0f64..10.0,
    ) {
        let p = LegEnergyParams { takeoff_coeff: el, flight_coeff: ef };
        prop_assert!(close(leg_energy(p, d, s * m), s * leg_energy(p, d, m)));
        prop_assert!(close(leg_energy(p, d, m) + leg_energy(p, d2, m), 2.0 * leg_energy(p, (d + d2) / 2.0, m)));
        prop_assert!(close(leg_energy(p, 0.0, m), el * m));
    }

    #[test]
    fn tour_energy_sums_legs_over_the_weight_profile(
        pts in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0, 0.1f64..2.0), 1..7),
        m0 in 1.0f64..12.0, el in 0.0f64..2.0, ef in 0.5f64..10.0,
    ) {
        let customers: Vec<Customer> = pts.iter().enumerate().map(|(i, &(x, y, m))| Customer::new(i + 1, Point::new(x, y), m)).collect();
        let inst = Instance::new(Point::ORIGIN, customers.clone()).unwrap();
        let d = drone(m0, el, ef);
        let visits: Vec<usize> = (1..=customers.len()).rev().collect();
        let profile = tour_weight_profile(&visits, &d, &inst).unwrap();
        // independent: carried mass before leg k is m0 plus the packages not yet delivered
        let mut expected = 0.0;
        let mut prev = Point::ORIGIN;
        for (k, &v) in visits.iter().chain(std::iter::once(&0)).enumerate() {
            let carried: f64 = m0 + visits[k..].iter().map(|&c| customers[c - 1].package_mass).sum::<f64>();
            let next = if v == 0 { Point::ORIGIN } else { customers[v - 1].position };
            expected += (el + ef * prev.distance(next)) * carried;
            prev = next;
            prop_assert!(close(profile.masses()[k], carried));
        }
        prop_assert!(close(tour_energy(&visits, &d, &inst).unwrap(), expected));
    }

    #[test]
    fn relabelling_twins_keeps_energy(x in -4.0f64..4.0, y in -4.0f64..4.0, m in 0.1f64..2.0, ox in -4.0f64..4.0, oy in -4.0f64..4.0, om in 0.1f64..2.0) {
        let customers = vec![
            Customer::new(1, Point::new(x, y), m),
            Customer::new(2, Point::new(ox, oy), om),
            Customer::new(3, Point::new(x, y), m),
        ];
        let inst = Instance::new(Point::ORIGIN, customers).unwrap();
        let d = Fleet::table3().types()[1].clone();
        prop_assert_eq!(tour_energy(&[1, 2, 3], &d, &inst).unwrap(), tour_energy(&[3, 2, 1], &d, &inst).unwrap());
    }

    #[test]
    fn heavier_first_never_costs_more_on_a_symmetric_layout(
        a in 0.1f64..5.0, b in 0.1f64..5.0, light in 0.1f64..2.0, extra in 0.01f64..2.0, el in 0.0f64..2.0, ef in 0.5f64..10.0,
    ) {
        let heavy = light + extra;
        let rows = vec![vec![0.0, a, a], vec![a, 0.0, b], vec![a, b, 0.0]];
        let customers = vec![Customer::new(1, Point::new(1.0, 0.0), heavy), Customer::new(2, Point::new(-1.0, 0.0), light)];
        let inst = Instance::with_distances(Point::ORIGIN, customers, DistanceMatrix::from_rows(rows).unwrap()).unwrap();
        let d = drone(5.0, el, ef);
        prop_assert!(tour_energy(&[1, 2], &d, &inst).unwrap() <= tour_energy(&[2, 1], &d, &inst).unwrap() + 1e-12);
    }

    #[test]
    fn roundtrip_matches_single_stop_tour(m in 0.0f64..5.0, dist in 0.01f64..8.0) {
        for d in Fleet::table3().types() {
            let inst = Instance::new(Point::ORIGIN, vec![Customer::new(1, Point::new(dist, 0.0), m)]).unwrap();
            prop_assert!(close(roundtrip_energy(d, m, dist), tour_energy(&[1], d, &inst).unwrap()));
        }
    }

    #[test]
    fn gap_second_differences_vanish(m in 0.0f64..5.0, d in 0.0f64..10.0, h in 0.01f64..2.0) {
        let f = Fleet::table3();
        let (small, large) = (&f.types()[0], &f.types()[1]);
        let g = |m: f64, d: f64| fleet_energy_gap(large, small, m, d);
        prop_assert!((g(m, d + 2.0 * h) - 2.0 * g(m, d + h) + g(m, d)).abs() <= 1e-9);
        prop_assert!((g(m + 2.0 * h, d) - 2.0 * g(m + h, d) + g(m, d)).abs() <= 1e-9);
    }

    #[test]
    fn level_flight_energy_does_not_depend_on_speed(nu in 1.0f64..20.0, s1 in 1.0f64..40.0, s2 in 1.0f64..40.0, dist in 1.0f64..1e4) {
        let p = PowerModelParams::new(2.0, 1.0, 0.5, LiftToDrag::Constant(nu));
        let a = level_flight_energy_at_speed(&p, dist, s1).unwrap();
        let b = level_flight_energy_at_speed(&p, dist, s2).unwrap();
        prop_assert!(close(a, b));
        prop_assert!(close(a, level_flight_energy(&p, dist).unwrap()));
    }
}
