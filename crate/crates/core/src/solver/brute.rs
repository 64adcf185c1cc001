//! Exhaustive enumeration of ordered tours and unit assignments, used as an
//! oracle for the branch-and-bound solver on tiny instances.

use std::collections::HashMap;
use std::time::Instant;

use super::key::{scaled_distance, Key};
use super::{Objective, SolveError, SolveOptions, SolveResult, TieBreak};
use crate::energy::tour_energy;
use crate::feasibility::{check_energy, check_time_windows, check_volume, check_weight};
use crate::model::{Fleet, Instance};

pub const BRUTE_FORCE_LIMIT: usize = 8;

/// Tour length in whole 1e-9 km units, rounded per leg, so that tours of
/// equal length tie exactly.
fn scaled_tour_distance(visits: &[usize], instance: &Instance) -> f64 {
    let path: Vec<usize> = std::iter::once(0).chain(visits.iter().copied()).chain(std::iter::once(0)).collect();
    path.windows(2).map(|l| scaled_distance(instance.distance(l[0], l[1]))).sum()
}

struct Enumerator<'a> {
    instance: &'a Instance,
    fleet: &'a Fleet,
    options: &'a SolveOptions,
    max_blocks: usize,
    blocks: Vec<Vec<usize>>,
    /// (type position, visits) -> (energy, scaled distance) for feasible tours.
    cache: HashMap<(usize, Vec<usize>), Option<(f64, f64)>>,
    best: Option<(Key, Vec<(usize, Vec<usize>)>)>,
    error: Option<SolveError>,
}

impl Enumerator<'_> {
    fn evaluate(&mut self, pos: usize, visits: &[usize]) -> Option<(f64, f64)> {
        if let Some(v) = self.cache.get(&(pos, visits.to_vec())) {
            return *v;
        }
        let drone = &self.fleet.types()[pos];
        let inst = self.instance;
        let mut checks = vec![check_weight(visits, drone, inst), check_energy(visits, drone, inst)];
        if self.options.enable_volume {
            checks.push(check_volume(visits, drone, inst));
        }
        if self.options.enable_time_windows {
            checks.push(check_time_windows(visits, drone, inst));
        }
        let mut ok = true;
        for c in checks {
            match c {
                Ok(r) => ok &= r.feasible(),
                Err(e) => {
                    self.error.get_or_insert(e.into());
                    ok = false;
                }
            }
        }
        let value = ok.then(|| (tour_energy(visits, drone, inst).unwrap(), scaled_tour_distance(visits, inst)));
        self.cache.insert((pos, visits.to_vec()), value);
        value
    }

    fn key(&self, energy: f64, distance: f64) -> Key {
        match self.options.objective {
            Objective::MinEnergy => Key::new(energy, 0.0),
            Objective::MinDistance => {
                Key::new(distance, if self.options.tie_break == TieBreak::MinEnergy { energy } else { 0.0 })
            }
        }
    }

    /// Inserts `customer` into every position of every block, or opens a
    /// new block.
    fn arrange(&mut self, customer: usize) {
        if customer > self.instance.len() {
            self.assign(0, &mut Vec::new(), &mut vec![0; self.fleet.len()]);
            return;
        }
        for b in 0..self.blocks.len() {
            for p in 0..=self.blocks[b].len() {
                self.blocks[b].insert(p, customer);
                self.arrange(customer + 1);
                self.blocks[b].remove(p);
            }
        }
        if self.blocks.len() < self.max_blocks {
            self.blocks.push(vec![customer]);
            self.arrange(customer + 1);
            self.blocks.pop();
        }
    }

    fn assign(&mut self, b: usize, types: &mut Vec<usize>, used: &mut Vec<usize>) {
        if b == self.blocks.len() {
            if self.options.fleet_usage == super::FleetUsage::All
                && used.iter().zip(self.fleet.types()).any(|(&u, t)| u != t.count)
            {
                return;
            }
            let mut energy = 0.0;
            let mut distance = 0.0;
            for (blk, &pos) in self.blocks.clone().iter().zip(types.iter()) {
                match self.evaluate(pos, blk) {
                    Some((e, d)) => {
                        energy += e;
                        distance += d;
                    }
                    None => return,
                }
            }
            let key = self.key(energy, distance);
            if self.best.as_ref().is_none_or(|(b, _)| key.lt(b)) {
                let tours = self.blocks.iter().cloned().zip(types.iter().copied()).map(|(v, p)| (p, v)).collect();
                self.best = Some((key, tours));
            }
            return;
        }
        for pos in 0..self.fleet.len() {
            if used[pos] < self.fleet.types()[pos].count {
                used[pos] += 1;
                types.push(pos);
                self.assign(b + 1, types, used);
                types.pop();
                used[pos] -= 1;
            }
        }
    }
}

/// Exact optimum by enumerating every split of the customers into ordered
/// tours (at most one per unit) and every type assignment. Guarded to
/// `n <= 8`.
pub fn brute_force(instance: &Instance, fleet: &Fleet, options: &SolveOptions) -> Result<SolveResult, SolveError> {
    let n = instance.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(SolveError::TooLarge { n, limit: BRUTE_FORCE_LIMIT });
    }
    let start = Instant::now();
    let mut e = Enumerator {
        instance,
        fleet,
        options,
        max_blocks: fleet.total_units(),
        blocks: Vec::new(),
        cache: HashMap::new(),
        best: None,
        error: None,
    };
    e.arrange(1);
    if let Some(err) = e.error {
        return Err(err);
    }
    let (_, chosen) = e.best.ok_or(SolveError::Infeasible)?;
    let tours = super::canonical_tours(chosen, fleet);
    let best = super::Solution::from_tours(tours, fleet, instance)?;
    Ok(SolveResult {
        best: Some(best),
        proven_optimal: true,
        relative_gap: 0.0,
        nodes_explored: e.cache.len() as u64,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}
