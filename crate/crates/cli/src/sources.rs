//! Where instances and fleets come from, and the experiment description
//! that ties them to solver options.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use gdrp_core::model::{appendix_d_instance, bundled_solomon, parse_solomon, rescale_solomon, Fleet, Instance};
use gdrp_core::solver::SolveOptions;
use serde::{Deserialize, Serialize};

/// Side of the square the Solomon nodes are mapped onto, km.
pub const SOLOMON_AREA_KM: f64 = 5.0;
/// Package mass range the Solomon demands are mapped onto, kg.
pub const SOLOMON_MASS_RANGE: (f64, f64) = (0.5, 2.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum InstanceSource {
    /// Depot plus the first `n` reference customers.
    Builtin { n: usize },
    File { path: PathBuf },
    /// A bundled benchmark name (`C101`, `R101`, `RC101`) or a file path,
    /// reduced to one ten-customer block.
    Solomon { source: String, subset: usize },
}

impl InstanceSource {
    pub fn load(&self) -> Result<Instance> {
        match self {
            InstanceSource::Builtin { n } => Ok(appendix_d_instance(*n)?),
            InstanceSource::File { path } => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                Instance::from_json(&text).with_context(|| format!("parsing {}", path.display()))
            }
            InstanceSource::Solomon { source, subset } => {
                let text = match bundled_solomon(source) {
                    Some(t) => t.to_string(),
                    None => std::fs::read_to_string(source).with_context(|| format!("reading {source}"))?,
                };
                let data = parse_solomon(&text).with_context(|| format!("parsing {source}"))?;
                Ok(rescale_solomon(&data, SOLOMON_AREA_KM, SOLOMON_MASS_RANGE, *subset)?)
            }
        }
    }

    /// Short label used in tables, e.g. `C101-3`.
    pub fn label(&self) -> String {
        match self {
            InstanceSource::Builtin { n } => format!("appendix-d:{n}"),
            InstanceSource::File { path } => path.display().to_string(),
            InstanceSource::Solomon { source, subset } => {
                let stem = Path::new(source).file_stem().and_then(|s| s.to_str()).unwrap_or(source);
                format!("{}-{subset}", stem.to_ascii_uppercase())
            }
        }
    }
}

impl FromStr for InstanceSource {
    type Err = anyhow::Error;

    /// `appendix-d:N`, `solomon:NAME_OR_PATH:SUBSET` or a JSON file path.
    fn from_str(s: &str) -> Result<Self> {
        if let Some(n) = s.strip_prefix("appendix-d:") {
            return Ok(InstanceSource::Builtin { n: n.parse().with_context(|| format!("bad customer count in {s:?}"))? });
        }
        if let Some(rest) = s.strip_prefix("solomon:") {
            let (source, subset) = rest.rsplit_once(':').with_context(|| format!("expected solomon:NAME:SUBSET, got {s:?}"))?;
            return Ok(InstanceSource::Solomon {
                source: source.to_string(),
                subset: subset.parse().with_context(|| format!("bad subset in {s:?}"))?,
            });
        }
        Ok(InstanceSource::File { path: PathBuf::from(s) })
    }
}

impl fmt::Display for InstanceSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceSource::Builtin { n } => write!(f, "appendix-d:{n}"),
            InstanceSource::File { path } => write!(f, "{}", path.display()),
            InstanceSource::Solomon { source, subset } => write!(f, "solomon:{source}:{subset}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FleetSource {
    /// Three small and two large drones.
    Table3,
    /// Five large drones.
    LargeOnly,
    /// Three small drones.
    SmallOnly,
    File(PathBuf),
}

impl FleetSource {
    pub fn load(&self) -> Result<Fleet> {
        Ok(match self {
            FleetSource::Table3 => Fleet::table3(),
            FleetSource::LargeOnly => Fleet::large_only(),
            FleetSource::SmallOnly => Fleet::small_only(),
            FleetSource::File(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                Fleet::from_json(&text).with_context(|| format!("parsing {}", path.display()))?
            }
        })
    }
}

impl FromStr for FleetSource {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "table3" => FleetSource::Table3,
            "large-only" => FleetSource::LargeOnly,
            "small-only" => FleetSource::SmallOnly,
            path => FleetSource::File(PathBuf::from(path)),
        })
    }
}

/// One fleet parameter varied over a list of values. `parameter` is
/// `type.<id>.<field>` with field one of `el`, `ef`, `m0`, `W`, `E`, `count`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub parameter: String,
    pub values: Vec<f64>,
}

impl SweepAxis {
    pub fn new(parameter: &str, values: &[f64]) -> Self {
        Self { parameter: parameter.to_string(), values: values.to_vec() }
    }

    fn target(&self) -> Result<(usize, &str)> {
        let parts: Vec<&str> = self.parameter.split('.').collect();
        match parts.as_slice() {
            ["type", id, field] => Ok((id.parse().with_context(|| format!("bad type id in {:?}", self.parameter))?, field)),
            _ => bail!("sweep parameter {:?} must look like type.<id>.<field>", self.parameter),
        }
    }

    pub fn apply(&self, fleet: &Fleet, value: f64) -> Result<Fleet> {
        let (id, field) = self.target()?;
        if fleet.get(id).is_none() {
            bail!("fleet has no drone type {id}");
        }
        let mut bad_field = false;
        let out = fleet.with_type(id, |t| match field {
            "el" => t.takeoff_coeff = value,
            "ef" => t.flight_coeff = value,
            "m0" => t.self_mass = value,
            "W" => t.max_total_mass = value,
            "E" => t.energy_capacity = value,
            "count" => t.count = value as usize,
            _ => bad_field = true,
        })?;
        if bad_field {
            bail!("unknown fleet field {field:?}");
        }
        Ok(out)
    }
}

/// A named run: instance, fleet, solver options and an optional grid of
/// fleet parameters to sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub instance: InstanceSource,
    pub fleet: FleetSource,
    pub options: SolveOptions,
    pub sweep: Option<Vec<SweepAxis>>,
}

impl ExperimentSpec {
    pub fn new(name: &str, instance: InstanceSource, fleet: FleetSource, options: SolveOptions) -> Self {
        Self { name: name.to_string(), instance, fleet, options, sweep: None }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(axes) = &self.sweep {
            if axes.is_empty() {
                bail!("experiment {}: sweep has no axes", self.name);
            }
            for a in axes {
                if a.values.is_empty() {
                    bail!("experiment {}: sweep over {} has no values", self.name, a.parameter);
                }
                a.target()?;
            }
        }
        Ok(())
    }

    /// Every point of the sweep grid as `(values, fleet)`, in row-major
    /// order of the axes. Without a sweep, the single base fleet.
    pub fn grid(&self) -> Result<Vec<(Vec<f64>, Fleet)>> {
        self.validate()?;
        let base = self.fleet.load()?;
        let mut points = vec![(Vec::new(), base)];
        for axis in self.sweep.iter().flatten() {
            let mut next = Vec::new();
            for (vals, fleet) in &points {
                for &v in &axis.values {
                    let mut vals = vals.clone();
                    vals.push(v);
                    next.push((vals, axis.apply(fleet, v)?));
                }
            }
            points = next;
        }
        Ok(points)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sources() {
        assert_eq!("appendix-d:10".parse::<InstanceSource>().unwrap(), InstanceSource::Builtin { n: 10 });
        assert_eq!(
            "solomon:C101:3".parse::<InstanceSource>().unwrap(),
            InstanceSource::Solomon { source: "C101".into(), subset: 3 }
        );
        assert!("appendix-d:x".parse::<InstanceSource>().is_err());
        assert_eq!("large-only".parse::<FleetSource>().unwrap(), FleetSource::LargeOnly);
        assert_eq!(InstanceSource::Solomon { source: "rc101".into(), subset: 10 }.label(), "RC101-10");
    }

    #[test]
    fn solomon_blocks_have_ten_customers() {
        let inst = InstanceSource::Solomon { source: "R101".into(), subset: 4 }.load().unwrap();
        assert_eq!(inst.len(), 10);
    }

    #[test]
    fn sweep_grid_is_row_major() {
        let mut spec = ExperimentSpec::new("g", InstanceSource::Builtin { n: 3 }, FleetSource::Table3, SolveOptions::default());
        spec.sweep = Some(vec![SweepAxis::new("type.2.el", &[0.5, 1.0]), SweepAxis::new("type.2.ef", &[4.0, 5.0, 6.0])]);
        let grid = spec.grid().unwrap();
        assert_eq!(grid.len(), 6);
        assert_eq!(grid[1].0, vec![0.5, 5.0]);
        let large = grid[1].1.get(2).unwrap();
        assert_eq!((large.takeoff_coeff, large.flight_coeff), (0.5, 5.0));
    }

    #[test]
    fn empty_sweep_values_are_rejected() {
        let mut spec = ExperimentSpec::new("g", InstanceSource::Builtin { n: 3 }, FleetSource::Table3, SolveOptions::default());
        spec.sweep = Some(vec![SweepAxis::new("type.2.el", &[])]);
        assert!(spec.validate().is_err());
        spec.sweep = Some(vec![SweepAxis::new("fleet.el", &[1.0])]);
        assert!(spec.validate().is_err());
    }
}
