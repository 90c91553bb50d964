//! `datxy`: parameter scans, spectra, quench traces, ergodicity reports,
//! phase maps and oracle checks, written as CSV.
//!
//! Exit status: 0 on success, 2 on a configuration error, 3 when some point
//! did not converge (the point is still written, flagged `nonconvergent`).

mod config;
mod grid;
mod output;
mod quantity;
mod run;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use datxy::order::{PhaseThresholds, StaggeredProbe};
use datxy::Quadrature;

use config::{RawConfig, Settings};
use grid::{Axis, AxisName, AxisSpec, GridCounts, ScanGrid};
use output::{write_table, Table};
use quantity::{Context, Quantity};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0} point(s) did not converge")]
    Numeric(usize),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "datxy", version, about = "XY chain with DM coupling in uniform and alternating transverse fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// One quantity over a one- or two-axis grid (default λ1 × λ2 on [0, 2]², LN).
    Scan,
    /// Band energies over the reduced zone.
    Spectrum,
    /// Correlators and LN after switching both fields off.
    Quench,
    /// Late-time LN against the best equilibrium LN of the field-free chain.
    Ergodicity,
    /// Phase labels with their evidence (default λ1 × λ2 on [0, 2]²).
    PhaseMap,
    /// Thermodynamic-limit correlators against rings of 8, 10 and 12 sites.
    OracleCheck,
}

/// Every value flag overrides the same key of `--config`.
#[derive(Debug, Args)]
struct Flags {
    /// Flat `key = value` file; keys are the long flag names.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    gamma: Option<String>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    d: Option<String>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    lambda1: Option<String>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    lambda2: Option<String>,
    /// Inverse temperature; `inf` for the ground state.
    #[arg(long = "betaJ", global = true)]
    beta_j: Option<String>,
    /// Samples per axis: `N` or `NxM`.
    #[arg(long, global = true)]
    grid: Option<String>,
    /// Output file; standard output if absent.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Absolute quadrature tolerance.
    #[arg(long, global = true)]
    tol: Option<String>,
    /// Solve each finite-chain point from the fixed start vector.
    #[arg(long, global = true)]
    seedless: bool,
    /// First axis, `name:min:max` with name in lambda1, lambda2, d, betaJ, t.
    #[arg(long, global = true, allow_hyphen_values = true)]
    x: Option<String>,
    /// Second axis, same syntax as `--x`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    y: Option<String>,
    /// LN, dLN_dl1, dLN_dl2, Mx, S, Cchi, gap, mz, correlators or phase_label.
    #[arg(long, global = true)]
    quantity: Option<String>,
    /// Open-chain length for the staggered magnetisation.
    #[arg(long, global = true)]
    sites: Option<String>,
    /// Staggered x field of the finite chain.
    #[arg(long, global = true)]
    hx: Option<String>,
    /// Last time of a quench trace, units of 1/J.
    #[arg(long = "t-max", global = true)]
    t_max: Option<String>,
}

impl Flags {
    fn merge_into(&self, raw: &mut RawConfig) {
        let pairs = [
            ("gamma", &self.gamma),
            ("d", &self.d),
            ("lambda1", &self.lambda1),
            ("lambda2", &self.lambda2),
            ("betaJ", &self.beta_j),
            ("grid", &self.grid),
            ("out", &self.out),
            ("tol", &self.tol),
            ("x", &self.x),
            ("y", &self.y),
            ("quantity", &self.quantity),
            ("sites", &self.sites),
            ("hx", &self.hx),
            ("t_max", &self.t_max),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                raw.set(key, v.as_str());
            }
        }
        if self.seedless {
            raw.set("seedless", "true");
        }
    }
}

/// Thermal sweeps default to 41 points, everything else to 100.
fn axis_count(spec: &AxisSpec, counts: Option<usize>) -> usize {
    counts.unwrap_or(if spec.name == AxisName::BetaJ { 41 } else { 100 })
}

fn scan_grid(s: &Settings, x: Option<AxisSpec>, y: Option<AxisSpec>, default: Option<GridCounts>) -> ScanGrid {
    let counts = s.grid.or(default);
    ScanGrid {
        x: x.map(|a| Axis::new(a, axis_count(&a, counts.map(|c| c.x)))),
        y: y.map(|a| Axis::new(a, axis_count(&a, counts.map(|c| c.y)))),
    }
}

fn json_f64(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(x.to_string())
    }
}

/// One-line description of the run; identical settings give identical text.
fn header(command: &str, s: &Settings, q: &Quadrature, extra: Map<String, Value>) -> Value {
    let mut h = Map::new();
    h.insert("command".into(), json!(command));
    h.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    h.insert("gamma".into(), json_f64(s.gamma));
    h.insert("d".into(), json_f64(s.d));
    h.insert("lambda1".into(), json_f64(s.lambda1));
    h.insert("lambda2".into(), json_f64(s.lambda2));
    h.insert("betaJ".into(), json_f64(s.beta_j));
    h.insert("tol".into(), json_f64(q.abs_tol));
    h.insert("rel_tol".into(), json_f64(q.rel_tol));
    h.insert("max_depth".into(), json!(q.max_depth));
    h.extend(extra);
    Value::Object(h)
}

fn grid_fields(grid: &ScanGrid, quantity: Quantity) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("quantity".into(), json!(quantity.as_str()));
    for (key, axis) in [("x", &grid.x), ("y", &grid.y)] {
        if let Some(a) = axis {
            let (lo, hi) = (a.values[0], a.values[a.values.len() - 1]);
            m.insert(key.into(), json!({"name": a.name.as_str(), "min": json_f64(lo), "max": json_f64(hi), "count": a.values.len()}));
        }
    }
    m
}

fn probe_fields(ctx: &Context, seedless: bool) -> Map<String, Value> {
    let th = ctx.thresholds;
    let mut m = Map::new();
    m.insert("sites".into(), json!(ctx.probe.sites));
    m.insert("hx".into(), json_f64(ctx.probe.hx));
    m.insert("seedless".into(), json!(seedless));
    m.insert(
        "thresholds".into(),
        json!({"magnetization": th.magnetization, "chiral": th.chiral, "paramagnet": th.paramagnet, "gap": th.gap}),
    );
    m
}

fn parse_spec(text: &str) -> Result<AxisSpec, CliError> {
    text.parse().map_err(CliError::Config)
}

fn execute(command: &Command, s: &Settings) -> Result<(Value, Table), CliError> {
    let quadrature = Quadrature::default().with_abs_tol(s.tol);
    let probe = |default_sites| StaggeredProbe { sites: s.sites.unwrap_or(default_sites), hx: s.hx };
    let ctx = |sites| Context { quadrature, probe: probe(sites), thresholds: PhaseThresholds::default() };
    match command {
        Command::Spectrum => {
            let samples = s.grid.map_or(201, |g| g.x);
            let mut extra = Map::new();
            extra.insert("samples".into(), json!(samples));
            Ok((header("spectrum", s, &quadrature, extra), run::spectrum(s, samples)?))
        }
        Command::Quench => {
            let samples = s.grid.map_or(datxy::quench::DEFAULT_SAMPLES, |g| g.x);
            let t = AxisSpec { name: AxisName::T, min: 0.0, max: s.t_max };
            let grid = ScanGrid { x: Some(Axis::new(t, samples)), y: None };
            let table = run::run_grid(s, &grid, Quantity::Trace, &ctx(12))?;
            Ok((header("quench", s, &quadrature, grid_fields(&grid, Quantity::Trace)), table))
        }
        Command::Scan | Command::PhaseMap => {
            let (name, quantity, default_sites) = match command {
                Command::Scan => ("scan", s.quantity.unwrap_or(Quantity::Ln), 12),
                _ => ("phase-map", Quantity::PhaseLabel, 10),
            };
            let x = s.x.unwrap_or(parse_spec("lambda1:0:2")?);
            let y = match s.y {
                Some(y) => Some(y),
                None if s.x.is_none() => Some(parse_spec("lambda2:0:2")?),
                None => None,
            };
            let grid = scan_grid(s, Some(x), y, None);
            let ctx = ctx(default_sites);
            let table = run::run_grid(s, &grid, quantity, &ctx)?;
            let mut extra = grid_fields(&grid, quantity);
            if quantity.warm_starts() {
                extra.extend(probe_fields(&ctx, s.seedless));
            }
            Ok((header(name, s, &quadrature, extra), table))
        }
        Command::Ergodicity | Command::OracleCheck => {
            let (name, quantity) = match command {
                Command::Ergodicity => ("ergodicity", Quantity::Ergodicity),
                _ => ("oracle-check", Quantity::OracleCheck),
            };
            // a single point unless axes are given
            let small = Some(GridCounts { x: 5, y: 5 });
            let grid = scan_grid(s, s.x, s.y, small);
            let table = run::run_grid(s, &grid, quantity, &ctx(12))?;
            Ok((header(name, s, &quadrature, grid_fields(&grid, quantity)), table))
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(text) = std::env::var("DATXY_THREADS") else { return Ok(()) };
    let threads: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::Config(format!("DATXY_THREADS = `{text}`: expected a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let mut raw = match &cli.flags.config {
        Some(path) => RawConfig::load(path)?,
        None => RawConfig::default(),
    };
    cli.flags.merge_into(&mut raw);
    let settings = raw.resolve()?;
    configure_threads()?;
    let (header, table) = execute(&cli.command, &settings)?;
    match &settings.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::Config(format!("cannot create {}: {e}", path.display())))?;
            write_table(&mut BufWriter::new(file), &header, &table)?;
        }
        None => write_table(&mut std::io::stdout().lock(), &header, &table)?,
    }
    if table.failures > 0 {
        return Err(CliError::Numeric(table.failures));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = writeln!(std::io::stderr(), "datxy: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
