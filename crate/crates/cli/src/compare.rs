//! Minimum-distance routing against minimum-energy routing on the same
//! instance, scored by energy.

use std::io::Write;

use anyhow::Result;
use gdrp_core::model::{Fleet, Instance};
use gdrp_core::solver::{evaluate_fixed_routes, solve, Objective, SolveError, SolveOptions, TieBreak};
use serde::Serialize;

use crate::sources::InstanceSource;

pub const SOLOMON_SETS: [&str; 3] = ["C101", "R101", "RC101"];
pub const SOLOMON_SUBSETS: std::ops::RangeInclusive<usize> = 1..=10;

/// The published summary over the thirty benchmark subsets.
pub const PAPER_SAVERS: usize = 20;
pub const PAPER_ROWS: usize = 30;
pub const PAPER_MEAN_SAVING_PCT: f64 = 2.17;
pub const PAPER_MAX_SAVING_PCT: f64 = 5.97;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub instance: String,
    #[serde(rename = "E_dist")]
    pub e_dist: Option<f64>,
    #[serde(rename = "E_energy")]
    pub e_energy: Option<f64>,
    pub saving_pct: Option<f64>,
    pub tie_break: TieBreak,
    /// `optimal`, `time_limit`, `infeasible` or an error message.
    pub status: String,
}

fn status_of(e: &SolveError) -> String {
    match e {
        SolveError::Infeasible => "infeasible".into(),
        SolveError::TimeLimit => "time_limit".into(),
        other => format!("error: {other}"),
    }
}

/// Solves `instance` under both objectives and scores the shortest routing
/// by energy.
pub fn compare_instance(label: &str, instance: &Instance, fleet: &Fleet, options: &SolveOptions, tie_break: TieBreak) -> CompareRow {
    let mut row = CompareRow { instance: label.to_string(), e_dist: None, e_energy: None, saving_pct: None, tie_break, status: String::new() };
    let dist_opts = SolveOptions { objective: Objective::MinDistance, tie_break, ..options.clone() };
    let energy_opts = SolveOptions { objective: Objective::MinEnergy, ..options.clone() };
    let (by_dist, by_energy) = match (solve(instance, fleet, &dist_opts), solve(instance, fleet, &energy_opts)) {
        (Ok(d), Ok(e)) => (d, e),
        (Err(err), _) | (_, Err(err)) => {
            row.status = status_of(&err);
            return row;
        }
    };
    let (Some(d), Some(e)) = (by_dist.best, by_energy.best) else {
        row.status = "time_limit".into();
        return row;
    };
    let (e_dist, _, report) = evaluate_fixed_routes(&d, fleet, instance, &dist_opts.check_options());
    if !report.feasible() {
        row.status = "error: shortest routing failed its own feasibility check".into();
        return row;
    }
    row.e_dist = Some(e_dist);
    row.e_energy = Some(e.total_energy);
    row.saving_pct = Some(100.0 * (e_dist - e.total_energy) / e_dist);
    row.status = if by_dist.proven_optimal && by_energy.proven_optimal { "optimal" } else { "time_limit" }.into();
    row
}

pub fn compare_sources(sources: &[InstanceSource], fleet: &Fleet, options: &SolveOptions, tie_break: TieBreak) -> Vec<CompareRow> {
    sources
        .iter()
        .map(|src| match src.load() {
            Ok(inst) => compare_instance(&src.label(), &inst, fleet, options, tie_break),
            Err(e) => CompareRow {
                instance: src.label(),
                e_dist: None,
                e_energy: None,
                saving_pct: None,
                tie_break,
                status: format!("error: {e:#}"),
            },
        })
        .collect()
}

/// The thirty ten-customer blocks.
pub fn solomon_sources() -> Vec<InstanceSource> {
    SOLOMON_SETS
        .iter()
        .flat_map(|s| SOLOMON_SUBSETS.map(move |k| InstanceSource::Solomon { source: s.to_string(), subset: k }))
        .collect()
}

pub fn write_csv<W: Write>(rows: &[CompareRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["instance", "E_dist", "E_energy", "saving_pct", "tie_break", "status"])?;
    let num = |v: Option<f64>| v.map(|v| format!("{v:.6}")).unwrap_or_default();
    for r in rows {
        let tie = match r.tie_break {
            TieBreak::MinEnergy => "min_energy",
            TieBreak::Lexicographic => "lexicographic",
        };
        w.write_record([r.instance.as_str(), &num(r.e_dist), &num(r.e_energy), &num(r.saving_pct), tie, &r.status])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub rows: usize,
    pub solved: usize,
    /// Rows with a saving above rounding noise.
    pub savers: usize,
    pub mean_saving_among_savers_pct: f64,
    pub max_saving_pct: f64,
    pub min_saving_pct: f64,
}

/// Savings at or below this are counted as ties.
pub const SAVING_EPS_PCT: f64 = 1e-9;

pub fn summarize(rows: &[CompareRow]) -> Summary {
    let savings: Vec<f64> = rows.iter().filter_map(|r| r.saving_pct).collect();
    let savers: Vec<f64> = savings.iter().copied().filter(|&s| s > SAVING_EPS_PCT).collect();
    Summary {
        rows: rows.len(),
        solved: savings.len(),
        savers: savers.len(),
        mean_saving_among_savers_pct: if savers.is_empty() { 0.0 } else { savers.iter().sum::<f64>() / savers.len() as f64 },
        max_saving_pct: savings.iter().copied().fold(0.0, f64::max),
        min_saving_pct: savings.iter().copied().fold(f64::INFINITY, f64::min),
    }
}

pub fn render_summary(s: &Summary) -> String {
    format!(
        "rows {}, solved {}, savers {}/{}, mean saving among savers {:.2}%, max saving {:.2}%\n\
         published: savers {PAPER_SAVERS}/{PAPER_ROWS}, mean saving among savers {PAPER_MEAN_SAVING_PCT:.2}%, max saving {PAPER_MAX_SAVING_PCT:.2}%\n",
        s.rows, s.solved, s.savers, s.solved, s.mean_saving_among_savers_pct, s.max_saving_pct
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{example1_instance, example_fleet};

    #[test]
    fn example1_saving() {
        let o = SolveOptions::default();
        let row = compare_instance("ex1", &example1_instance(), &example_fleet(1, 1e6), &o, TieBreak::MinEnergy);
        assert_eq!(row.status, "optimal");
        let expected = 100.0 * (128.0 - (77.0 + 33.0 * 2f64.sqrt())) / 128.0;
        assert!((row.saving_pct.unwrap() - expected).abs() < 1e-9);
    }

    #[test]
    fn csv_has_one_line_per_row() {
        let rows = vec![
            CompareRow { instance: "a".into(), e_dist: Some(2.0), e_energy: Some(1.0), saving_pct: Some(50.0), tie_break: TieBreak::Lexicographic, status: "optimal".into() },
            CompareRow { instance: "b".into(), e_dist: None, e_energy: None, saving_pct: None, tie_break: TieBreak::Lexicographic, status: "infeasible".into() },
        ];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "instance,E_dist,E_energy,saving_pct,tie_break,status\na,2.000000,1.000000,50.000000,lexicographic,optimal\nb,,,,lexicographic,infeasible\n");
        let s = summarize(&rows);
        assert_eq!((s.rows, s.solved, s.savers), (2, 1, 1));
    }

    #[test]
    fn thirty_solomon_blocks() {
        let s = solomon_sources();
        assert_eq!(s.len(), 30);
        assert_eq!(s[29].label(), "RC101-10");
    }
}
