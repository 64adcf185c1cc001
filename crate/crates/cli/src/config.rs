//! Optional JSON config file. Flags win over the file, the file wins over
//! built-in defaults.

use std::path::Path;

use anyhow::{Context, Result};
use gdrp_core::solver::{FleetUsage, Objective, SolveOptions, TieBreak};
use serde::{Deserialize, Serialize};

use crate::sources::SweepAxis;

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "GDRP_THREADS";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub threads: Option<usize>,
    pub time_limit_s: Option<f64>,
    pub objective: Option<Objective>,
    pub tie_break: Option<TieBreak>,
    pub fleet_usage: Option<FleetUsage>,
    pub report_gap: Option<bool>,
    /// Grid for `reproduce params-sweep`.
    pub params_sweep: Option<Vec<SweepAxis>>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn load_opt(path: Option<&Path>) -> Result<Self> {
        path.map(Self::load).transpose().map(Option::unwrap_or_default)
    }
}

/// Solver settings given on the command line; `None` means not given.
#[derive(Debug, Clone, Default)]
pub struct OptionFlags {
    pub threads: Option<usize>,
    pub time_limit_s: Option<f64>,
    pub objective: Option<Objective>,
    pub tie_break: Option<TieBreak>,
    pub fleet_usage: Option<FleetUsage>,
    pub enable_volume: bool,
    pub enable_time_windows: bool,
}

/// Layers flags over the config file over `base`.
pub fn resolve_options(base: SolveOptions, file: &ConfigFile, flags: &OptionFlags) -> SolveOptions {
    let mut o = base;
    if let Some(t) = flags.threads.or(file.threads) {
        o.threads = t;
    }
    if let Some(t) = flags.time_limit_s.or(file.time_limit_s) {
        o.time_limit_s = t;
    }
    if let Some(x) = flags.objective.or(file.objective) {
        o.objective = x;
    }
    if let Some(x) = flags.tie_break.or(file.tie_break) {
        o.tie_break = x;
    }
    if let Some(x) = flags.fleet_usage.or(file.fleet_usage) {
        o.fleet_usage = x;
    }
    if let Some(x) = file.report_gap {
        o.report_gap = x;
    }
    o.enable_volume |= flags.enable_volume;
    o.enable_time_windows |= flags.enable_time_windows;
    o
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_file_beat_defaults() {
        let file = ConfigFile { threads: Some(3), time_limit_s: Some(60.0), ..Default::default() };
        let flags = OptionFlags { threads: Some(1), ..Default::default() };
        let o = resolve_options(SolveOptions::default(), &file, &flags);
        assert_eq!(o.threads, 1);
        assert_eq!(o.time_limit_s, 60.0);
        assert_eq!(o.objective, Objective::MinEnergy);
    }

    #[test]
    fn parses_snake_case_enums() {
        let c: ConfigFile = serde_json::from_str(r#"{"objective":"min_distance","fleet_usage":"at_most"}"#).unwrap();
        assert_eq!(c.objective, Some(Objective::MinDistance));
        assert_eq!(c.fleet_usage, Some(FleetUsage::AtMost));
        assert!(serde_json::from_str::<ConfigFile>(r#"{"thread":2}"#).is_err());
    }
}
