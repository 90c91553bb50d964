//! Flat `key = value` run configuration; command-line flags override the file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::grid::{AxisSpec, GridCounts};
use crate::quantity::Quantity;
use crate::CliError;

/// Every key a config file or flag may set.
pub const KEYS: [&str; 15] = [
    "gamma", "d", "lambda1", "lambda2", "betaJ", "tol", "grid", "out", "seedless", "x", "y", "quantity", "sites", "hx",
    "t_max",
];

/// Raw textual settings, later keys replacing earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig(BTreeMap<String, String>);

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", n + 1)))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(CliError::Config(format!("line {}: unknown key `{key}`", n + 1)));
            }
            if map.insert(key.to_owned(), value.trim().to_owned()).is_some() {
                return Err(CliError::Config(format!("line {}: duplicate key `{key}`", n + 1)));
            }
        }
        Ok(Self(map))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        debug_assert!(KEYS.contains(&key), "unknown key {key}");
        self.0.insert(key.to_owned(), value.into());
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.0
            .get(key)
            .map(|v| v.parse().map_err(|e| CliError::Config(format!("`{key}` = `{v}`: {e}"))))
            .transpose()
    }

    /// Typed settings; absent keys fall back to the defaults below.
    pub fn resolve(&self) -> Result<Settings, CliError> {
        let d = Settings::default();
        let seedless = match self.0.get("seedless").map(String::as_str) {
            None => d.seedless,
            Some("true" | "1" | "yes") => true,
            Some("false" | "0" | "no") => false,
            Some(other) => return Err(CliError::Config(format!("`seedless` = `{other}`: expected true or false"))),
        };
        let s = Settings {
            gamma: self.get("gamma")?.unwrap_or(d.gamma),
            d: self.get("d")?.unwrap_or(d.d),
            lambda1: self.get("lambda1")?.unwrap_or(d.lambda1),
            lambda2: self.get("lambda2")?.unwrap_or(d.lambda2),
            beta_j: self.get("betaJ")?.unwrap_or(d.beta_j),
            tol: self.get("tol")?.unwrap_or(d.tol),
            grid: self.get("grid")?,
            out: self.get("out")?,
            seedless,
            x: self.get("x")?,
            y: self.get("y")?,
            quantity: self.get("quantity")?,
            sites: self.get("sites")?,
            hx: self.get("hx")?.unwrap_or(d.hx),
            t_max: self.get("t_max")?.unwrap_or(d.t_max),
        };
        if !(s.tol > 0.0 && s.tol.is_finite()) {
            return Err(CliError::Config(format!("`tol` = {}: must be positive", s.tol)));
        }
        if !(s.t_max > 0.0 && s.t_max.is_finite()) {
            return Err(CliError::Config(format!("`t_max` = {}: must be positive", s.t_max)));
        }
        Ok(s)
    }
}

/// Resolved settings; command-specific defaults (grid size, probe size,
/// axes) stay `None` until the command fills them in.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub gamma: f64,
    pub d: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    /// `inf` selects the ground state.
    pub beta_j: f64,
    /// Absolute quadrature tolerance.
    pub tol: f64,
    pub grid: Option<GridCounts>,
    pub out: Option<PathBuf>,
    /// Solve every finite-chain point from the fixed start vector instead of
    /// warm-starting from its left neighbour.
    pub seedless: bool,
    pub x: Option<AxisSpec>,
    pub y: Option<AxisSpec>,
    pub quantity: Option<Quantity>,
    pub sites: Option<usize>,
    pub hx: f64,
    pub t_max: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            gamma: 0.8,
            d: 0.0,
            lambda1: 0.5,
            lambda2: 0.5,
            beta_j: f64::INFINITY,
            tol: 1e-10,
            grid: None,
            out: None,
            seedless: false,
            x: None,
            y: None,
            quantity: None,
            sites: None,
            hx: 1e-3,
            t_max: datxy::quench::DEFAULT_HORIZON,
        }
    }
}
