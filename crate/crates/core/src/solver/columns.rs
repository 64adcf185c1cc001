//! Best visiting order for every load-feasible customer subset of one drone
//! type, by dynamic programming over subsets.
//!
//! `f(R, i)` is the cheapest way to leave node `i` carrying the packages of
//! `R`, serve all of `R` and land at the depot:
//! `f(R, i) = min_j c_ij (m_0 + mass(R)) + f(R - j, j)` with
//! `f({}, i) = c_i0 m_0`. The recurrence never looks at how `i` was reached,
//! so one table serves every subset.

use rayon::prelude::*;

use super::key::{scaled_distance, Key};
use super::{Objective, SolveOptions, TieBreak};
use crate::feasibility::FEASIBILITY_TOL;
use crate::model::{DroneType, Instance};

const ABSENT: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub(crate) struct Column {
    pub mask: u32,
    /// Position of the drone type in the fleet.
    pub type_pos: usize,
    pub visits: Vec<usize>,
    pub key: Key,
}

/// Per-type arc data and the subset tables.
struct Tables<'a> {
    n: usize,
    drone: &'a DroneType,
    instance: &'a Instance,
    /// `e_l + e_f d` per arc, row-major over nodes `0..=n`.
    cost: Vec<f64>,
    dist: Vec<f64>,
    /// Dense mask -> row index; `ABSENT` for load-infeasible masks.
    index: Vec<u32>,
    masks: Vec<u32>,
    mass: Vec<f64>,
    /// Minimum completion energy, `n + 1` entries per row.
    energy: Vec<f64>,
    energy_arg: Vec<u8>,
    /// Objective-specific completion keys (distance objective only).
    dkey: Vec<Key>,
    dkey_arg: Vec<u8>,
}

impl Tables<'_> {
    #[inline]
    fn c(&self, i: usize, j: usize) -> f64 {
        self.cost[i * (self.n + 1) + j]
    }

    #[inline]
    fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * (self.n + 1) + j]
    }

    #[inline]
    fn row(&self, mask: u32) -> usize {
        self.index[mask as usize] as usize
    }

    #[inline]
    fn at(&self, mask: u32, i: usize) -> usize {
        self.row(mask) * (self.n + 1) + i
    }

    #[inline]
    fn launch_weight(&self, mask: u32) -> f64 {
        self.drone.self_mass + self.mass[self.row(mask)]
    }
}

fn bit(customer: usize) -> u32 {
    1 << (customer - 1)
}

fn customers_of(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |b| mask >> b & 1 == 1).map(|b| b + 1)
}

/// Load-feasible masks grouped by size, each generated once from its subset
/// without the highest customer.
fn enumerate_masks(instance: &Instance, drone: &DroneType, volume: bool) -> (Vec<u32>, Vec<f64>, Vec<usize>) {
    let n = instance.len();
    let payload_cap = drone.max_total_mass + FEASIBILITY_TOL - drone.self_mass;
    let volume_cap = if volume { drone.volume_capacity } else { None };
    let vol = |c: usize| instance.customer(c).and_then(|c| c.package_volume).unwrap_or(0.0);

    let mut masks = vec![0u32];
    let mut mass = vec![0.0];
    let mut volumes = vec![0.0];
    let mut layer_start = vec![0usize, 1];
    let mut prev = 0..1;
    loop {
        let start = masks.len();
        for r in prev.clone() {
            let m = masks[r];
            let high = 32 - m.leading_zeros() as usize;
            for c in high + 1..=n {
                let w = mass[r] + instance.mass(c);
                let v = volumes[r] + vol(c);
                if w <= payload_cap && volume_cap.is_none_or(|cap| v <= cap + FEASIBILITY_TOL) {
                    masks.push(m | bit(c));
                    mass.push(w);
                    volumes.push(v);
                }
            }
        }
        if masks.len() == start {
            break;
        }
        layer_start.push(masks.len());
        prev = start..masks.len();
    }
    (masks, mass, layer_start)
}

pub(crate) fn generate(instance: &Instance, drone: &DroneType, type_pos: usize, options: &SolveOptions) -> Vec<Column> {
    let n = instance.len();
    let size = n + 1;
    let mut cost = vec![0.0; size * size];
    let mut dist = vec![0.0; size * size];
    for i in 0..size {
        for j in 0..size {
            let lc = instance.leg_coefficients(drone, i, j);
            let d = instance.distance(i, j);
            cost[i * size + j] = lc.takeoff_coeff + lc.flight_coeff * d;
            dist[i * size + j] = scaled_distance(d);
        }
    }
    let (masks, mass, layers) = enumerate_masks(instance, drone, options.enable_volume);
    let mut index = vec![ABSENT; 1usize << n];
    for (r, &m) in masks.iter().enumerate() {
        index[m as usize] = r as u32;
    }
    let rows = masks.len();
    let distance_objective = options.objective == Objective::MinDistance;
    let mut t = Tables {
        n,
        drone,
        instance,
        cost,
        dist,
        index,
        masks,
        mass,
        energy: vec![f64::INFINITY; rows * size],
        energy_arg: vec![0; rows * size],
        dkey: if distance_objective { vec![Key::INFINITE; rows * size] } else { Vec::new() },
        dkey_arg: if distance_objective { vec![0; rows * size] } else { Vec::new() },
    };
    let energy_tie = options.tie_break == TieBreak::MinEnergy;
    let m0 = drone.self_mass;

    for i in 0..size {
        t.energy[i] = t.c(i, 0) * m0;
        if distance_objective {
            t.dkey[i] = Key::new(t.d(i, 0), if energy_tie { t.c(i, 0) * m0 } else { 0.0 });
        }
    }

    for layer in layers.windows(2).skip(1) {
        let range = layer[0]..layer[1];
        let computed: Vec<(Vec<f64>, Vec<u8>, Vec<Key>, Vec<u8>)> = range
            .clone()
            .into_par_iter()
            .map(|r| {
                let mask = t.masks[r];
                let w = t.launch_weight(mask);
                let mut e = vec![f64::INFINITY; size];
                let mut ea = vec![0u8; size];
                let mut dk = vec![Key::INFINITE; if distance_objective { size } else { 0 }];
                let mut da = vec![0u8; dk.len()];
                for i in (0..size).filter(|&i| i == 0 || mask & bit(i) == 0) {
                    for j in customers_of(mask) {
                        let rest = mask & !bit(j);
                        let leg = t.c(i, j) * w;
                        let v = leg + t.energy[t.at(rest, j)];
                        if v < e[i] {
                            e[i] = v;
                            ea[i] = j as u8;
                        }
                        if distance_objective {
                            let sub = t.dkey[t.at(rest, j)];
                            let k = Key::new(t.d(i, j) + sub.primary, if energy_tie { leg + sub.secondary } else { 0.0 });
                            if k.lt(&dk[i]) {
                                dk[i] = k;
                                da[i] = j as u8;
                            }
                        }
                    }
                }
                (e, ea, dk, da)
            })
            .collect();
        for (r, (e, ea, dk, da)) in range.zip(computed) {
            t.energy[r * size..(r + 1) * size].copy_from_slice(&e);
            t.energy_arg[r * size..(r + 1) * size].copy_from_slice(&ea);
            if distance_objective {
                t.dkey[r * size..(r + 1) * size].copy_from_slice(&dk);
                t.dkey_arg[r * size..(r + 1) * size].copy_from_slice(&da);
            }
        }
    }

    let columns: Vec<Option<Column>> = (1..rows)
        .into_par_iter()
        .map(|r| best_order(&t, t.masks[r], options).map(|(visits, key)| Column { mask: t.masks[r], type_pos, visits, key }))
        .collect();
    columns.into_iter().flatten().collect()
}

/// Visit order stored in the tables for `mask`, starting at the depot.
fn unconstrained_order(t: &Tables, mask: u32, distance_objective: bool) -> Vec<usize> {
    let mut seq = Vec::with_capacity(mask.count_ones() as usize);
    let (mut rest, mut at) = (mask, 0usize);
    while rest != 0 {
        let k = t.at(rest, at);
        let j = if distance_objective { t.dkey_arg[k] } else { t.energy_arg[k] } as usize;
        seq.push(j);
        rest &= !bit(j);
        at = j;
    }
    seq
}

/// `(objective key, energy)` of a fixed order, accumulated from the back
/// exactly as the recurrence does.
fn sequence_key(t: &Tables, seq: &[usize], options: &SolveOptions) -> (Key, f64) {
    let m0 = t.drone.self_mass;
    let last = *seq.last().expect("non-empty order");
    let mut energy = t.c(last, 0) * m0;
    let mut dist = t.d(last, 0);
    let mut rest = 0u32;
    for k in (0..seq.len()).rev() {
        rest |= bit(seq[k]);
        let from = if k == 0 { 0 } else { seq[k - 1] };
        energy += t.c(from, seq[k]) * t.launch_weight(rest);
        dist += t.d(from, seq[k]);
    }
    let key = match options.objective {
        Objective::MinEnergy => Key::new(energy, 0.0),
        Objective::MinDistance => Key::new(dist, if options.tie_break == TieBreak::MinEnergy { energy } else { 0.0 }),
    };
    (key, energy)
}

fn windows_ok(t: &Tables, seq: &[usize]) -> bool {
    crate::feasibility::check_time_windows(seq, t.drone, t.instance).is_ok_and(|r| r.feasible())
}

fn best_order(t: &Tables, mask: u32, options: &SolveOptions) -> Option<(Vec<usize>, Key)> {
    let distance_objective = options.objective == Objective::MinDistance;
    let cap = t.drone.energy_capacity + FEASIBILITY_TOL;
    if t.energy[t.at(mask, 0)] > cap {
        return None;
    }
    let seq = unconstrained_order(t, mask, distance_objective);
    let (key, energy) = sequence_key(t, &seq, options);
    if energy <= cap && (!options.enable_time_windows || windows_ok(t, &seq)) {
        return Some((seq, key));
    }
    constrained_order(t, mask, options)
}

struct Dfs<'a, 'b> {
    t: &'a Tables<'b>,
    options: &'a SolveOptions,
    cap: f64,
    service: f64,
    speed: f64,
    seq: Vec<usize>,
    best: Option<(Vec<usize>, Key)>,
}

impl Dfs<'_, '_> {
    /// Lower bound on the objective of any completion from `at` with `rest`
    /// still on board.
    fn completion_bound(&self, rest: u32, at: usize) -> Key {
        let k = self.t.at(rest, at);
        match self.options.objective {
            Objective::MinEnergy => Key::new(self.t.energy[k], 0.0),
            Objective::MinDistance => self.t.dkey[k],
        }
    }

    fn run(&mut self, rest: u32, at: usize, prefix: Key, prefix_energy: f64, ready: f64) {
        let t = self.t;
        if prefix_energy + t.energy[t.at(rest, at)] > self.cap {
            return;
        }
        if let Some((_, best)) = &self.best {
            if !(prefix + self.completion_bound(rest, at)).lt(best) {
                return;
            }
        }
        if rest == 0 {
            let (key, energy) = sequence_key(t, &self.seq, self.options);
            if energy <= self.cap && self.best.as_ref().is_none_or(|(_, b)| key.lt(b)) {
                self.best = Some((self.seq.clone(), key));
            }
            return;
        }
        let w = t.launch_weight(rest);
        let energy_tie = self.options.tie_break == TieBreak::MinEnergy;
        for j in customers_of(rest) {
            let mut r_j = 0.0;
            if self.options.enable_time_windows {
                let window = t.instance.customer(j).and_then(|c| c.time_window).expect("windows validated");
                let depart = if at == 0 { 0.0 } else { ready + self.service };
                r_j = window.earliest.max(depart + t.instance.distance(at, j) / self.speed);
                if r_j > window.latest + FEASIBILITY_TOL {
                    continue;
                }
            }
            let leg = t.c(at, j) * w;
            let step = match self.options.objective {
                Objective::MinEnergy => Key::new(leg, 0.0),
                Objective::MinDistance => Key::new(t.d(at, j), if energy_tie { leg } else { 0.0 }),
            };
            self.seq.push(j);
            self.run(rest & !bit(j), j, prefix + step, prefix_energy + leg, r_j);
            self.seq.pop();
        }
    }
}

/// Exhaustive order search honouring the energy cap and time windows,
/// pruned by the unconstrained tables. Orders are tried lexicographically and
/// only strictly better ones replace the incumbent.
fn constrained_order(t: &Tables, mask: u32, options: &SolveOptions) -> Option<(Vec<usize>, Key)> {
    let mut dfs = Dfs {
        t,
        options,
        cap: t.drone.energy_capacity + FEASIBILITY_TOL,
        service: t.instance.service_time().unwrap_or(0.0),
        speed: t.drone.speed.unwrap_or(1.0),
        seq: Vec::new(),
        best: None,
    };
    dfs.run(mask, 0, Key::ZERO, 0.0, 0.0);
    dfs.best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{tour_distance, tour_energy};
    use crate::model::{Customer, Point};

    fn drone(cap: f64) -> DroneType {
        DroneType {
            type_id: 1,
            self_mass: 10.0,
            takeoff_coeff: 1.0,
            flight_coeff: 1.0,
            max_total_mass: 1000.0,
            energy_capacity: cap,
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

    fn column(cols: &[Column], mask: u32) -> Option<&Column> {
        cols.iter().find(|c| c.mask == mask)
    }

    #[test]
    fn energy_columns_match_direct_evaluation() {
        let inst = example1();
        let d = drone(1e6);
        let cols = generate(&inst, &d, 0, &SolveOptions::default());
        assert_eq!(cols.len(), 7);
        for c in &cols {
            let e = tour_energy(&c.visits, &d, &inst).unwrap();
            assert!((c.key.primary - e).abs() < 1e-9);
        }
        let all = column(&cols, 0b111).unwrap();
        assert_eq!(all.visits, vec![2, 1, 3]);
        assert!((all.key.primary - (77.0 + 33.0 * 2f64.sqrt())).abs() < 1e-9);
    }

    #[test]
    fn distance_columns_respect_the_energy_cap() {
        let inst = example1();
        let opts = SolveOptions { objective: Objective::MinDistance, tie_break: TieBreak::MinEnergy, ..Default::default() };
        let free = generate(&inst, &drone(1e6), 0, &opts);
        let all = column(&free, 0b111).unwrap();
        // both directions of the square have length 4 and energy 128
        assert_eq!(all.visits, vec![1, 2, 3]);
        assert_eq!(all.key.primary, 4e9);

        let capped = generate(&inst, &drone(125.0), 0, &opts);
        let all = column(&capped, 0b111).unwrap();
        assert!(tour_energy(&all.visits, &drone(125.0), &inst).unwrap() <= 125.0);
        let d = tour_distance(&all.visits, &inst).unwrap();
        assert!((all.key.primary - scaled_distance(d)).abs() <= 4.0);
        assert!(d > 4.0);
    }

    #[test]
    fn weight_limit_drops_subsets() {
        let inst = example1();
        let mut d = drone(1e6);
        d.max_total_mass = 21.0;
        let cols = generate(&inst, &d, 0, &SolveOptions::default());
        assert!(column(&cols, 0b111).is_none());
        assert!(column(&cols, 0b011).is_some());
    }

    #[test]
    fn time_windows_force_a_different_order() {
        let cs = vec![
            Customer::new(1, Point::new(1.0, 0.0), 1.0).with_window(0.0, 10.0),
            Customer::new(2, Point::new(1.0, 1.0), 10.0).with_window(2.5, 10.0),
            Customer::new(3, Point::new(0.0, 1.0), 1.0).with_window(0.0, 1.5),
        ];
        let inst = Instance::new(Point::ORIGIN, cs).unwrap().with_service_time(0.0);
        let mut d = drone(1e6);
        d.speed = Some(1.0);
        let opts = SolveOptions { enable_time_windows: true, ..Default::default() };
        let cols = generate(&inst, &d, 0, &opts);
        let all = column(&cols, 0b111).unwrap();
        assert_eq!(all.visits[0], 3);
        assert!(crate::feasibility::check_time_windows(&all.visits, &d, &inst).unwrap().feasible());
    }
}
