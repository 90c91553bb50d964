//! Evaluates a grid in parallel and assembles the rows in row-major order.

use rayon::prelude::*;

use datxy::blocks::bdg_bands;
use datxy::params::regime;
use datxy::quench::{evolve, QuenchSpec};
use datxy::{Beta, Params};

use crate::grid::{AxisName, GridPoint, ScanGrid};
use crate::output::{num, Table};
use crate::quantity::{evaluate, from_correlators, Context, Quantity};
use crate::config::Settings;
use crate::CliError;

/// Per-point cells, or `None` when the numerics did not converge.
type Cells = Option<Vec<String>>;

fn config_error(e: datxy::Error) -> CliError {
    CliError::Config(e.to_string())
}

/// The model at a grid point: settings overridden by the swept coordinates.
pub fn point_params(s: &Settings, coords: &[(AxisName, f64)]) -> Result<Params, CliError> {
    let (mut d, mut l1, mut l2, mut beta) = (s.d, s.lambda1, s.lambda2, s.beta_j);
    for &(name, v) in coords {
        match name {
            AxisName::Lambda1 => l1 = v,
            AxisName::Lambda2 => l2 = v,
            AxisName::D => d = v,
            AxisName::BetaJ => beta = v,
            AxisName::T => {}
        }
    }
    let beta = Beta::from_value(beta).map_err(config_error)?;
    Ok(Params::new(s.gamma, d, l1, l2).map_err(config_error)?.with_beta(beta))
}

/// Splits a point's error into "emit with a flag" and "abort the run".
fn settle(point: &GridPoint, outcome: datxy::Result<Vec<String>>) -> Result<Cells, CliError> {
    match outcome {
        Ok(cells) => Ok(Some(cells)),
        Err(e) if e.is_numeric() => Ok(None),
        Err(e) => {
            let at: Vec<String> = point.coords.iter().map(|(n, v)| format!("{}={v}", n.as_str())).collect();
            Err(CliError::Config(format!("at {}: {e}", at.join(" "))))
        }
    }
}

fn check(s: &Settings, grid: &ScanGrid, quantity: Quantity) -> Result<(), CliError> {
    let names: Vec<AxisName> = grid.axes().map(|a| a.name).collect();
    if names.len() == 2 && names[0] == names[1] {
        return Err(CliError::Config(format!("x and y both sweep {}", names[0].as_str())));
    }
    if quantity.zero_temperature_only() && (s.beta_j.is_finite() || names.contains(&AxisName::BetaJ)) {
        return Err(CliError::Config(format!("{quantity} is a ground-state quantity; betaJ must be inf")));
    }
    if names.contains(&AxisName::T) && !quantity.follows_quench() {
        return Err(CliError::Config(format!("{quantity} cannot be followed in time")));
    }
    Ok(())
}

/// Evaluates `quantity` on every grid point.
pub fn run_grid(s: &Settings, grid: &ScanGrid, quantity: Quantity, ctx: &Context) -> Result<Table, CliError> {
    check(s, grid, quantity)?;
    let points = grid.points();
    let params = points.iter().map(|pt| point_params(s, &pt.coords)).collect::<Result<Vec<_>, _>>()?;
    let cols = grid.cols();
    let cells: Vec<Cells> = if grid.axes().any(|a| a.name == AxisName::T) {
        quench_cells(grid, &points, &params, quantity, ctx)?
    } else if quantity.warm_starts() && !s.seedless {
        let rows: Vec<Vec<Cells>> = (0..grid.rows())
            .into_par_iter()
            .map(|r| {
                let mut start = None;
                (r * cols..(r + 1) * cols)
                    .map(|k| settle(&points[k], evaluate(quantity, &params[k], ctx, &mut start)))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<_, _>>()?;
        rows.into_iter().flatten().collect()
    } else {
        points
            .par_iter()
            .zip(&params)
            .map(|(pt, p)| settle(pt, evaluate(quantity, p, ctx, &mut None)))
            .collect::<Result<_, _>>()?
    };
    let width = quantity.columns().len();
    let mut failures = 0;
    let rows = points
        .iter()
        .zip(&params)
        .zip(cells)
        .map(|((pt, p), c)| {
            let status = if c.is_some() { "ok" } else { "nonconvergent" };
            failures += usize::from(c.is_none());
            let values = c.unwrap_or_else(|| vec!["NaN".into(); width]);
            let route = if p.is_uniform() { "uniform" } else { "blocks" };
            pt.coords
                .iter()
                .map(|&(_, v)| num(v))
                .chain(values)
                .chain([regime(p).as_str().into(), route.into(), status.into()])
                .collect()
        })
        .collect();
    let columns = grid
        .axes()
        .map(|a| a.name.as_str().to_owned())
        .chain(quantity.columns())
        .chain(["regime", "route", "status"].map(String::from))
        .collect();
    Ok(Table { columns, rows, failures })
}

/// One post-quench trace per value of the other axis, read off at every `t`.
fn quench_cells(
    grid: &ScanGrid,
    points: &[GridPoint],
    params: &[Params],
    quantity: Quantity,
    ctx: &Context,
) -> Result<Vec<Cells>, CliError> {
    let t_on_x = grid.x.as_ref().is_some_and(|a| a.name == AxisName::T);
    let (t, traces) = if t_on_x { (grid.x.as_ref(), grid.rows()) } else { (grid.y.as_ref(), grid.cols()) };
    let t = &t.expect("grid has a t axis").values;
    let cols = grid.cols();
    // index of the first point that shares the k-th trace
    let first = |k: usize| if t_on_x { k * cols } else { k };
    let per_trace: Vec<Vec<Cells>> = (0..traces)
        .into_par_iter()
        .map(|k| {
            let spec = QuenchSpec::with_grid(params[first(k)], t.clone(), (t[0], t[t.len() - 1])).map_err(config_error)?;
            match evolve(&spec, &ctx.quadrature) {
                Ok(trace) => trace
                    .values
                    .iter()
                    .map(|cs| settle(&points[first(k)], from_correlators(quantity, cs)))
                    .collect(),
                Err(e) => settle(&points[first(k)], Err(e)).map(|c| vec![c; t.len()]),
            }
        })
        .collect::<Result<_, _>>()?;
    Ok(points
        .iter()
        .map(|pt| if t_on_x { per_trace[pt.row][pt.col].clone() } else { per_trace[pt.col][pt.row].clone() })
        .collect())
}

/// Band energies over the reduced zone `φ ∈ [-π/2, π/2]`.
pub fn spectrum(s: &Settings, samples: usize) -> Result<Table, CliError> {
    let p = point_params(s, &[])?;
    let half = std::f64::consts::FRAC_PI_2;
    let rows = (0..samples)
        .map(|i| {
            let phi = if i + 1 == samples { half } else { -half + 2.0 * half * i as f64 / (samples - 1) as f64 };
            std::iter::once(phi).chain(bdg_bands(&p, phi)).map(num).collect()
        })
        .collect();
    let columns = ["phi", "omega_1", "omega_2", "omega_3", "omega_4"].map(String::from).to_vec();
    Ok(Table { columns, rows, failures: 0 })
}
