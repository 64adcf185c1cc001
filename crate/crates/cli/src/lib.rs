//! The `gdrp` command line: solve instances, rerun the published
//! experiments, compare objectives, export the MILP and emit tour geometry.

pub mod compare;
pub mod config;
pub mod experiments;
pub mod generate;
pub mod geometry;
pub mod sources;

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gdrp_core::milp::{build_model, export_lp, MilpOptions};
use gdrp_core::model::{Fleet, Instance};
use gdrp_core::solver::{solve, FleetUsage, Objective, SolutionFile, SolveError, SolveOptions, SolveResult, TieBreak};

use config::{resolve_options, ConfigFile, OptionFlags, THREADS_ENV};
use sources::{FleetSource, InstanceSource};

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    Failure = 1,
    TimeLimit = 2,
    Infeasible = 3,
    Mismatch = 4,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Parser)]
#[command(name = "gdrp", version, about = "Energy-minimal routing for heterogeneous drone fleets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one instance and print the tours.
    Solve(SolveArgs),
    /// Rerun a published example or experiment and check its numbers.
    Reproduce(ReproduceArgs),
    /// Energy of shortest routing against energy-minimal routing.
    Compare(CompareArgs),
    /// Write the mixed-integer model in LP format.
    ExportMilp(ExportArgs),
    /// Tour polylines and node masses as JSON, for plotting.
    Geometry(GeometryArgs),
    /// Random instance with uniform positions and masses.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    Energy,
    Distance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TieBreakArg {
    MinEnergy,
    Lexicographic,
}

impl From<TieBreakArg> for TieBreak {
    fn from(t: TieBreakArg) -> Self {
        match t {
            TieBreakArg::MinEnergy => TieBreak::MinEnergy,
            TieBreakArg::Lexicographic => TieBreak::Lexicographic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DispatchArg {
    /// Every unit flies exactly one tour.
    All,
    /// Units may stay at the depot.
    AtMost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OnOff {
    On,
    Off,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Instance JSON, `appendix-d:N` or `solomon:NAME:SUBSET`.
    #[arg(value_name = "INSTANCE", required_unless_present = "builtin")]
    pub instance: Option<String>,
    /// Built-in instance, e.g. `appendix-d:10`.
    #[arg(long, conflicts_with = "instance")]
    pub builtin: Option<String>,
    /// Fleet JSON, `table3`, `large-only` or `small-only`.
    #[arg(long, default_value = "table3", conflicts_with = "table3")]
    pub fleet: String,
    /// Three small and two large drones (the default).
    #[arg(long)]
    pub table3: bool,
}

impl InputArgs {
    pub fn instance_source(&self) -> Result<InstanceSource> {
        self.builtin.as_deref().or(self.instance.as_deref()).context("no instance given")?.parse()
    }

    pub fn fleet_source(&self) -> Result<FleetSource> {
        if self.table3 {
            Ok(FleetSource::Table3)
        } else {
            self.fleet.parse()
        }
    }

    pub fn load(&self) -> Result<(Instance, Fleet)> {
        Ok((self.instance_source()?.load()?, self.fleet_source()?.load()?))
    }
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    #[arg(long, value_enum)]
    pub objective: Option<ObjectiveArg>,
    /// How equally short routings are ranked under `--objective distance`.
    #[arg(long, value_enum)]
    pub tie_break: Option<TieBreakArg>,
    /// Seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, env = THREADS_ENV)]
    pub threads: Option<usize>,
    #[arg(long, value_enum)]
    pub dispatch: Option<DispatchArg>,
    /// Enforce drone volume limits.
    #[arg(long)]
    pub volume: bool,
    /// Enforce customer time windows.
    #[arg(long)]
    pub time_windows: bool,
    /// Optional JSON config; flags take precedence over it.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl SolverArgs {
    pub fn flags(&self) -> OptionFlags {
        OptionFlags {
            threads: self.threads,
            time_limit_s: self.time_limit,
            objective: self.objective.map(|o| match o {
                ObjectiveArg::Energy => Objective::MinEnergy,
                ObjectiveArg::Distance => Objective::MinDistance,
            }),
            tie_break: self.tie_break.map(Into::into),
            fleet_usage: self.dispatch.map(|d| match d {
                DispatchArg::All => FleetUsage::All,
                DispatchArg::AtMost => FleetUsage::AtMost,
            }),
            enable_volume: self.volume,
            enable_time_windows: self.time_windows,
        }
    }

    pub fn resolve(&self, base: SolveOptions) -> Result<(SolveOptions, ConfigFile)> {
        let file = ConfigFile::load_opt(self.config.as_deref())?;
        Ok((resolve_options(base, &file, &self.flags()), file))
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Write the solution JSON here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// example1, example2, example3, baseline, large-only, table4:<N>,
    /// weights:<light|heavy|dispersed|all>, area:<small|large|rect|all>,
    /// params-sweep.
    pub target: String,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Compare a single instance instead of the thirty benchmark blocks.
    #[arg(long)]
    pub instance: Option<String>,
    #[arg(long, default_value = "table3")]
    pub fleet: String,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// CSV output; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value = "on")]
    pub symmetry: OnOff,
    #[arg(long)]
    pub time_windows: bool,
    #[arg(long)]
    pub volume: bool,
    #[arg(long, value_enum, default_value = "all")]
    pub dispatch: DispatchArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GeometryArgs {
    /// Solution JSON as written by `solve --out`.
    #[arg(long)]
    pub solution: PathBuf,
    /// Instance JSON, `appendix-d:N` or `solomon:NAME:SUBSET`.
    #[arg(long)]
    pub instance: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 10)]
    pub customers: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Area width in km, centred on the depot.
    #[arg(long, default_value_t = 10.0)]
    pub width: f64,
    #[arg(long, default_value_t = 10.0)]
    pub height: f64,
    #[arg(long, default_value_t = 0.5)]
    pub mass_min: f64,
    #[arg(long, default_value_t = 2.0)]
    pub mass_max: f64,
    #[arg(long)]
    pub out: PathBuf,
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Runs one command, writing human-readable output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<Exit> {
    match cli.command {
        Command::Solve(a) => cmd_solve(a, out),
        Command::Reproduce(a) => cmd_reproduce(a, out),
        Command::Compare(a) => cmd_compare(a, out),
        Command::ExportMilp(a) => cmd_export_milp(a, out),
        Command::Geometry(a) => cmd_geometry(a, out),
        Command::Gen(a) => cmd_gen(a, out),
    }
}

pub fn solution_summary(r: &SolveResult, fleet: &Fleet) -> String {
    let mut s = String::new();
    let Some(best) = &r.best else {
        return "no solution\n".into();
    };
    let status = if r.proven_optimal { "optimal".to_string() } else { format!("time limit, gap {:.4}", r.relative_gap) };
    let _ = writeln!(s, "status: {status}");
    let _ = writeln!(s, "total energy: {:.4} Wh", best.total_energy);
    let _ = writeln!(s, "total distance: {:.4} km", best.total_distance);
    for t in &best.tours {
        let size = match fleet.position_of(t.drone_type) {
            Some(p) if fleet.len() == 2 => ["small", "large"][p],
            _ => "type",
        };
        let path: Vec<String> = std::iter::once(0).chain(t.visits.iter().copied()).chain(std::iter::once(0)).map(|v| v.to_string()).collect();
        let _ = writeln!(
            s,
            "  {size} {} unit {}: {}  energy {:.4}  distance {:.4}",
            t.drone_type,
            t.unit,
            path.join(" -> "),
            t.energy,
            t.distance
        );
    }
    s
}

fn cmd_solve(a: SolveArgs, out: &mut dyn Write) -> Result<Exit> {
    let (instance, fleet) = a.input.load()?;
    let (options, _) = a.solver.resolve(SolveOptions::default())?;
    let result = match solve(&instance, &fleet, &options) {
        Ok(r) => r,
        Err(SolveError::Infeasible) => {
            writeln!(out, "infeasible")?;
            return Ok(Exit::Infeasible);
        }
        Err(SolveError::TimeLimit) => {
            writeln!(out, "time limit reached without a feasible solution")?;
            return Ok(Exit::TimeLimit);
        }
        Err(e) => return Err(e.into()),
    };
    log::info!("{} nodes in {:.3} s", result.nodes_explored, result.wall_time_s);
    let best = result.best.clone().unwrap_or_else(gdrp_core::solver::Solution::empty);
    if let Some(path) = &a.out {
        let file = SolutionFile { solution: best, proven_optimal: result.proven_optimal, gap: result.relative_gap };
        write_file(path, &(serde_json::to_string_pretty(&file)? + "\n"))?;
    }
    out.write_all(solution_summary(&result, &fleet).as_bytes())?;
    Ok(if result.proven_optimal { Exit::Ok } else { Exit::TimeLimit })
}

fn cmd_reproduce(a: ReproduceArgs, out: &mut dyn Write) -> Result<Exit> {
    let (options, file) = a.solver.resolve(SolveOptions::default())?;
    let report = experiments::reproduce(&a.target, &options, &file)?;
    out.write_all(report.render().as_bytes())?;
    if report.passed() {
        Ok(Exit::Ok)
    } else {
        writeln!(out, "mismatch:")?;
        out.write_all(report.diff().as_bytes())?;
        Ok(Exit::Mismatch)
    }
}

fn cmd_compare(a: CompareArgs, out: &mut dyn Write) -> Result<Exit> {
    let base = SolveOptions { tie_break: TieBreak::Lexicographic, ..SolveOptions::default() };
    let (options, _) = a.solver.resolve(base)?;
    let fleet: FleetSource = a.fleet.parse()?;
    let fleet = fleet.load()?;
    let sources = match &a.instance {
        Some(s) => vec![s.parse()?],
        None => compare::solomon_sources(),
    };
    let rows = compare::compare_sources(&sources, &fleet, &options, options.tie_break);
    match &a.out {
        Some(path) => {
            let f = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            compare::write_csv(&rows, f)?;
        }
        None => compare::write_csv(&rows, &mut *out)?,
    }
    out.write_all(compare::render_summary(&compare::summarize(&rows)).as_bytes())?;
    Ok(Exit::Ok)
}

fn cmd_export_milp(a: ExportArgs, out: &mut dyn Write) -> Result<Exit> {
    let (instance, fleet) = a.input.load()?;
    let options = MilpOptions {
        symmetry_breaking: a.symmetry == OnOff::On,
        time_windows: a.time_windows,
        volume: a.volume,
        fleet_usage: match a.dispatch {
            DispatchArg::All => FleetUsage::All,
            DispatchArg::AtMost => FleetUsage::AtMost,
        },
    };
    let model = build_model(&instance, &fleet, &options)?;
    write_file(&a.out, &export_lp(&model))?;
    writeln!(out, "variables: {}", model.variables.len())?;
    for (family, n) in model.variables.keys().fold(std::collections::BTreeMap::new(), |mut m, v| {
        *m.entry(v.family.letter()).or_insert(0usize) += 1;
        m
    }) {
        writeln!(out, "  {family}: {n}")?;
    }
    writeln!(out, "constraints: {}", model.constraints.len())?;
    let mut counts: Vec<_> = model.counts().into_iter().collect();
    counts.sort_by_key(|(tag, _)| tag_order(tag));
    for (tag, n) in counts {
        writeln!(out, "  ({tag}): {n}")?;
    }
    if model.symmetry_downgraded {
        writeln!(out, "note: ordering rows omitted for this many customers")?;
    }
    Ok(Exit::Ok)
}

/// Numbered rows first, then lettered families in numeric order.
fn tag_order(tag: &str) -> (u8, String, u32) {
    let split = tag.find(|c: char| c.is_ascii_digit()).unwrap_or(tag.len());
    let (prefix, digits) = tag.split_at(split);
    let rank = if prefix.is_empty() { 0 } else { 1 };
    (rank, prefix.to_string(), digits.parse().unwrap_or(0))
}

fn cmd_geometry(a: GeometryArgs, out: &mut dyn Write) -> Result<Exit> {
    let text = std::fs::read_to_string(&a.solution).with_context(|| format!("reading {}", a.solution.display()))?;
    let file: SolutionFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", a.solution.display()))?;
    let instance = a.instance.parse::<InstanceSource>()?.load()?;
    let g = geometry::build_geometry(&file.solution, &instance)?;
    write_file(&a.out, &(serde_json::to_string_pretty(&g)? + "\n"))?;
    writeln!(out, "{} polylines", g.polylines.len())?;
    Ok(Exit::Ok)
}

fn cmd_gen(a: GenArgs, out: &mut dyn Write) -> Result<Exit> {
    let p = generate::GenParams {
        customers: a.customers,
        seed: a.seed,
        width: a.width,
        height: a.height,
        mass_min: a.mass_min,
        mass_max: a.mass_max,
    };
    let inst = generate::generate(&p)?;
    write_file(&a.out, &(inst.to_json() + "\n"))?;
    writeln!(out, "{} customers written to {}", inst.len(), a.out.display())?;
    Ok(Exit::Ok)
}
