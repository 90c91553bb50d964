//! Scan axes and the row-major point order of a grid.

use std::fmt;
use std::str::FromStr;

use datxy::rdm::log_grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisName {
    Lambda1,
    Lambda2,
    D,
    BetaJ,
    T,
}

impl AxisName {
    pub fn as_str(self) -> &'static str {
        match self {
            AxisName::Lambda1 => "lambda1",
            AxisName::Lambda2 => "lambda2",
            AxisName::D => "d",
            AxisName::BetaJ => "betaJ",
            AxisName::T => "t",
        }
    }
}

impl FromStr for AxisName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "lambda1" => Ok(AxisName::Lambda1),
            "lambda2" => Ok(AxisName::Lambda2),
            "d" => Ok(AxisName::D),
            "betaJ" => Ok(AxisName::BetaJ),
            "t" => Ok(AxisName::T),
            _ => Err(format!("unknown axis `{s}` (lambda1, lambda2, d, betaJ, t)")),
        }
    }
}

/// `name:min:max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    pub name: AxisName,
    pub min: f64,
    pub max: f64,
}

impl FromStr for AxisSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [name, min, max] = parts[..] else {
            return Err(format!("axis `{s}` is not of the form name:min:max"));
        };
        let bound = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("axis bound `{v}`: {e}"));
        let spec = AxisSpec { name: name.trim().parse()?, min: bound(min)?, max: bound(max)? };
        if !(spec.min.is_finite() && spec.max.is_finite() && spec.min < spec.max) {
            return Err(format!("axis `{s}` needs finite bounds with min < max"));
        }
        if spec.name == AxisName::BetaJ && spec.min <= 0.0 {
            return Err(format!("axis `{s}`: betaJ is log-spaced and needs min > 0"));
        }
        Ok(spec)
    }
}

impl fmt::Display for AxisSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.name.as_str(), self.min, self.max)
    }
}

/// `N` (both axes) or `NxM` (x count by y count); every count is at least 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridCounts {
    pub x: usize,
    pub y: usize,
}

impl FromStr for GridCounts {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let count = |v: &str| -> Result<usize, String> {
            let n: usize = v.trim().parse().map_err(|e| format!("grid count `{v}`: {e}"))?;
            if n < 2 {
                return Err(format!("grid count {n} must be at least 2"));
            }
            Ok(n)
        };
        match s.split_once('x') {
            Some((x, y)) => Ok(GridCounts { x: count(x)?, y: count(y)? }),
            None => count(s).map(|n| GridCounts { x: n, y: n }),
        }
    }
}

impl fmt::Display for GridCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.x, self.y)
    }
}

/// Sample values of one axis: linear, except `betaJ` which is log-spaced.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: AxisName,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn new(spec: AxisSpec, count: usize) -> Self {
        let values = if spec.name == AxisName::BetaJ {
            log_grid(spec.min, spec.max, count)
        } else {
            let step = (spec.max - spec.min) / (count - 1) as f64;
            // the last sample is exactly `max`
            (0..count).map(|i| if i + 1 == count { spec.max } else { spec.min + step * i as f64 }).collect()
        };
        Self { name: spec.name, values }
    }
}

/// Up to two swept axes; `x` varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanGrid {
    pub x: Option<Axis>,
    pub y: Option<Axis>,
}

/// One grid point: its row and column and the swept coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub row: usize,
    pub col: usize,
    pub coords: Vec<(AxisName, f64)>,
}

impl ScanGrid {
    pub fn axes(&self) -> impl Iterator<Item = &Axis> {
        self.x.iter().chain(self.y.iter())
    }

    pub fn rows(&self) -> usize {
        self.y.as_ref().map_or(1, |a| a.values.len())
    }

    pub fn cols(&self) -> usize {
        self.x.as_ref().map_or(1, |a| a.values.len())
    }

    /// Points of one row in column order.
    pub fn row(&self, row: usize) -> Vec<GridPoint> {
        (0..self.cols())
            .map(|col| {
                let mut coords = Vec::with_capacity(2);
                if let Some(x) = &self.x {
                    coords.push((x.name, x.values[col]));
                }
                if let Some(y) = &self.y {
                    coords.push((y.name, y.values[row]));
                }
                GridPoint { row, col, coords }
            })
            .collect()
    }

    /// All points, row-major.
    pub fn points(&self) -> Vec<GridPoint> {
        (0..self.rows()).flat_map(|r| self.row(r)).collect()
    }
}
