//! Depth-first branch-and-bound over exact covers of the customer set by
//! columns, respecting the number of units per drone type.

use std::collections::HashMap;
use std::time::Instant;

use super::columns::Column;
use super::key::Key;
use super::FleetUsage;

/// Memo entries beyond this count are not recorded.
const MEMO_LIMIT: usize = 20_000_000;
const TIME_CHECK_INTERVAL: u64 = 1024;
/// Relative safety margin applied to the share bound against rounding.
const BOUND_MARGIN: f64 = 1.0 - 1e-12;

pub(crate) struct SearchInput<'a> {
    pub n: usize,
    pub columns: &'a [Column],
    pub counts: Vec<usize>,
    /// Payload capacity per type, kg.
    pub payload_caps: Vec<f64>,
    pub masses: Vec<f64>,
    pub usage: FleetUsage,
    /// Whether the key's secondary component matters (ties on primary are
    /// then not pruned).
    pub secondary: bool,
    pub pruning: bool,
    pub deadline: Option<Instant>,
}

pub(crate) struct SearchOutcome {
    pub best: Option<(Key, Vec<usize>)>,
    pub complete: bool,
    pub nodes: u64,
    pub root_bound: f64,
}

struct State<'a> {
    input: &'a SearchInput<'a>,
    /// Column indices whose lowest customer is `c`, best excess first.
    groups: Vec<Vec<usize>>,
    excess: Vec<f64>,
    share: Vec<f64>,
    radix: Vec<u64>,
    memo: HashMap<(u32, u64), Key>,
    chosen: Vec<usize>,
    best: Option<(Key, Vec<usize>)>,
    nodes: u64,
    aborted: bool,
}

/// Cheapest share of any column per customer. A column's cost is split
/// among its customers either by package mass or evenly; each split gives a
/// valid per-customer lower bound, and the larger sum is kept.
fn share_bounds(n: usize, columns: &[Column], masses: &[f64]) -> Vec<f64> {
    let mut by_mass = vec![f64::INFINITY; n + 1];
    let mut even = vec![f64::INFINITY; n + 1];
    for col in columns {
        let members: Vec<usize> = (1..=n).filter(|&c| col.mask >> (c - 1) & 1 == 1).collect();
        let total: f64 = members.iter().map(|&c| masses[c]).sum();
        for &c in &members {
            by_mass[c] = by_mass[c].min(col.key.primary * masses[c] / total);
            even[c] = even[c].min(col.key.primary / members.len() as f64);
        }
    }
    let sum = |v: &[f64]| v[1..].iter().sum::<f64>();
    if sum(&by_mass) >= sum(&even) {
        by_mass
    } else {
        even
    }
}

impl State<'_> {
    fn bound(&self, mask: u32) -> f64 {
        let mut b = 0.0;
        let mut m = mask;
        while m != 0 {
            let c = m.trailing_zeros() as usize + 1;
            b += self.share[c];
            m &= m - 1;
        }
        b * BOUND_MARGIN
    }

    fn code(&self, counts: &[usize]) -> u64 {
        counts.iter().zip(&self.radix).map(|(&c, &r)| c as u64 * r).sum()
    }

    fn beats_incumbent(&self, bound: f64) -> bool {
        match &self.best {
            None => true,
            Some((inc, _)) if self.input.secondary => bound <= inc.primary,
            Some((inc, _)) => bound < inc.primary,
        }
    }

    fn dfs(&mut self, rest: u32, counts: &mut Vec<usize>, prefix: Key) {
        if self.aborted {
            return;
        }
        self.nodes += 1;
        if self.nodes.is_multiple_of(TIME_CHECK_INTERVAL) {
            if let Some(deadline) = self.input.deadline {
                if Instant::now() >= deadline {
                    self.aborted = true;
                    return;
                }
            }
        }
        let input = self.input;
        let units_left: usize = counts.iter().sum();
        if rest == 0 {
            if input.usage == FleetUsage::All && units_left > 0 {
                return;
            }
            if self.best.as_ref().is_none_or(|(b, _)| prefix.lt(b)) {
                self.best = Some((prefix, self.chosen.clone()));
            }
            return;
        }
        if units_left == 0 {
            return;
        }
        if input.usage == FleetUsage::All && (rest.count_ones() as usize) < units_left {
            return;
        }
        let load: f64 = (1..=input.n).filter(|&c| rest >> (c - 1) & 1 == 1).map(|c| input.masses[c]).sum();
        let capacity: f64 = counts.iter().zip(&input.payload_caps).map(|(&h, &cap)| h as f64 * cap).sum();
        if load > capacity + 1e-9 {
            return;
        }

        let rest_bound = if input.pruning { self.bound(rest) } else { 0.0 };
        if input.pruning {
            if !self.beats_incumbent(prefix.primary + rest_bound) {
                return;
            }
            let key = (rest, self.code(counts));
            match self.memo.get(&key) {
                Some(seen) if !prefix.lt(seen) => return,
                _ => {
                    if self.memo.len() < MEMO_LIMIT || self.memo.contains_key(&key) {
                        self.memo.insert(key, prefix);
                    }
                }
            }
        }

        let lowest = rest.trailing_zeros() as usize + 1;
        for g in 0..self.groups[lowest].len() {
            let ci = self.groups[lowest][g];
            let col = &input.columns[ci];
            if input.pruning && !self.beats_incumbent(prefix.primary + self.excess[ci] + rest_bound) {
                // columns are sorted by excess, so no later one can do better
                break;
            }
            if col.mask & !rest != 0 || counts[col.type_pos] == 0 {
                continue;
            }
            counts[col.type_pos] -= 1;
            self.chosen.push(ci);
            self.dfs(rest & !col.mask, counts, prefix + col.key);
            self.chosen.pop();
            counts[col.type_pos] += 1;
            if self.aborted {
                return;
            }
        }
    }
}

pub(crate) fn run(input: &SearchInput) -> SearchOutcome {
    let n = input.n;
    let share = share_bounds(n, input.columns, &input.masses);
    let excess: Vec<f64> = input
        .columns
        .iter()
        .map(|col| {
            let s: f64 = (1..=n).filter(|&c| col.mask >> (c - 1) & 1 == 1).map(|c| share[c]).sum();
            col.key.primary - s * BOUND_MARGIN
        })
        .collect();
    let mut groups = vec![Vec::new(); n + 1];
    for (ci, col) in input.columns.iter().enumerate() {
        groups[col.mask.trailing_zeros() as usize + 1].push(ci);
    }
    for g in &mut groups {
        g.sort_by(|&a, &b| {
            excess[a]
                .total_cmp(&excess[b])
                .then(input.columns[a].mask.cmp(&input.columns[b].mask))
                .then(input.columns[a].type_pos.cmp(&input.columns[b].type_pos))
        });
    }
    let mut radix = Vec::with_capacity(input.counts.len());
    let mut r = 1u64;
    for &h in &input.counts {
        radix.push(r);
        r *= h as u64 + 1;
    }

    let all = if n == 0 { 0 } else { u32::MAX >> (32 - n) };
    let mut state = State {
        input,
        groups,
        excess,
        share,
        radix,
        memo: HashMap::new(),
        chosen: Vec::new(),
        best: None,
        nodes: 0,
        aborted: false,
    };
    let root_bound = if all == 0 { 0.0 } else { state.bound(all) };
    let mut counts = input.counts.clone();
    state.dfs(all, &mut counts, Key::ZERO);
    log::debug!("partition search: {} nodes, memo {} entries", state.nodes, state.memo.len());
    SearchOutcome { best: state.best, complete: !state.aborted, nodes: state.nodes, root_bound }
}
