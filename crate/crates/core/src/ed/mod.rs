//! Exact diagonalisation of the spin chain for up to 12 sites.
//!
//! Works in the `σz` product basis: bit `j` of a basis index is site `j`, and
//! a set bit means spin up (`σz = +1`). Everything here is `f64`.

use nalgebra::Complex;

use crate::{Error, ModelParams, Result};

mod lanczos;
mod sectors;

pub use lanczos::{lanczos_ground, LanczosGround};
pub use sectors::{ed_quench, QuenchOracle, Sector, SectorSpectrum, GROUND_TOL};

pub type C64 = Complex<f64>;

/// Largest chain the oracle accepts.
pub const MAX_SITES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Periodic,
    Open,
}

/// Single-site operator in a Pauli string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    /// `(flips, amplitude)` of `σ|bit>`.
    #[inline]
    fn act(self, up: bool) -> (bool, C64) {
        match (self, up) {
            (Pauli::X, _) => (true, C64::new(1.0, 0.0)),
            (Pauli::Y, true) => (true, C64::new(0.0, 1.0)),
            (Pauli::Y, false) => (true, C64::new(0.0, -1.0)),
            (Pauli::Z, true) => (false, C64::new(1.0, 0.0)),
            (Pauli::Z, false) => (false, C64::new(-1.0, 0.0)),
        }
    }
}

/// A finite chain with fixed couplings and an optional staggered `x` field.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinChainED {
    sites: usize,
    boundary: Boundary,
    params: ModelParams<f64>,
    staggered_x: f64,
}

impl SpinChainED {
    pub fn new(sites: usize, boundary: Boundary, params: ModelParams<f64>) -> Result<Self> {
        if sites > MAX_SITES {
            return Err(Error::ResourceLimit { sites, max: MAX_SITES });
        }
        if sites < 4 || sites % 2 == 1 {
            return Err(Error::InvalidParam {
                name: "N",
                value: sites as f64,
                reason: "must be even and at least 4",
            });
        }
        Ok(Self { sites, boundary, params, staggered_x: 0.0 })
    }

    /// Adds `hx J Σ_j (-1)^j σx_j`.
    pub fn with_staggered_x(mut self, hx: f64) -> Result<Self> {
        if !(hx >= 0.0 && hx.is_finite()) {
            return Err(Error::InvalidParam { name: "hx", value: hx, reason: "must be finite and non-negative" });
        }
        self.staggered_x = hx;
        Ok(self)
    }

    pub fn sites(&self) -> usize {
        self.sites
    }
    pub fn boundary(&self) -> Boundary {
        self.boundary
    }
    pub fn params(&self) -> &ModelParams<f64> {
        &self.params
    }
    pub fn staggered_x(&self) -> f64 {
        self.staggered_x
    }
    pub fn dim(&self) -> usize {
        1 << self.sites
    }

    /// Same chain with both transverse fields switched off.
    pub fn field_free(&self) -> Self {
        Self { params: self.params.field_free(), ..self.clone() }
    }

    pub(crate) fn bonds(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.sites;
        let last = match self.boundary {
            Boundary::Periodic => n,
            Boundary::Open => n - 1,
        };
        (0..last).map(move |j| (j, (j + 1) % n))
    }

    /// `h_j / 2` in units where the printed Hamiltonian has `J = 1`.
    fn half_field(&self, site: usize) -> f64 {
        let p = &self.params;
        let sign = if site % 2 == 0 { 1.0 } else { -1.0 };
        0.5 * p.coupling() * (p.uniform_field() + sign * p.alternating_field())
    }

    /// Diagonal energy of a basis state.
    pub(crate) fn diagonal(&self, s: usize) -> f64 {
        (0..self.sites).map(|j| if s >> j & 1 == 1 { self.half_field(j) } else { -self.half_field(j) }).sum()
    }

    /// Calls `emit(target, amplitude)` for each off-diagonal element `<target|H|s>`.
    pub(crate) fn off_diagonal(&self, s: usize, mut emit: impl FnMut(usize, C64)) {
        let p = &self.params;
        let (j_, g, d) = (p.coupling(), p.anisotropy(), p.dm());
        for (a, b) in self.bonds() {
            let (ua, ub) = (s >> a & 1 == 1, s >> b & 1 == 1);
            // (1+γ)/4 σxσx + (1-γ)/4 σyσy + d/4 (σxσy - σyσx) flips both spins
            let amp = match (ua, ub) {
                (true, true) | (false, false) => C64::new(0.5 * g, 0.0),
                (true, false) => C64::new(0.5, -0.5 * d),
                (false, true) => C64::new(0.5, 0.5 * d),
            };
            emit(s ^ (1 << a) ^ (1 << b), amp * j_);
        }
        if self.staggered_x != 0.0 {
            for site in 0..self.sites {
                let sign = if site % 2 == 0 { 1.0 } else { -1.0 };
                emit(s ^ (1 << site), C64::new(sign * self.staggered_x * j_, 0.0));
            }
        }
    }

    /// `out = H v` in the full space.
    pub fn apply(&self, v: &[C64], out: &mut [C64]) {
        debug_assert_eq!(v.len(), self.dim());
        for (s, o) in out.iter_mut().enumerate() {
            *o = v[s] * self.diagonal(s);
        }
        for (s, &amp_s) in v.iter().enumerate() {
            if amp_s == C64::new(0.0, 0.0) {
                continue;
            }
            self.off_diagonal(s, |t, a| out[t] += a * amp_s);
        }
    }

    /// Dense full-space Hamiltonian; meant for small chains and tests.
    pub fn dense(&self) -> nalgebra::DMatrix<C64> {
        let n = self.dim();
        let mut h = nalgebra::DMatrix::zeros(n, n);
        for s in 0..n {
            h[(s, s)] += C64::new(self.diagonal(s), 0.0);
            self.off_diagonal(s, |t, a| h[(t, s)] += a);
        }
        h
    }

    /// Diagonalises a periodic chain without `x` field by momentum and parity.
    pub fn spectrum(&self) -> Result<SectorSpectrum> {
        SectorSpectrum::new(self)
    }

    /// Correlators averaged over the Gibbs state, or over the ground space
    /// when `β = ∞`.
    pub fn thermal_correlators(&self, beta: crate::Beta<f64>) -> Result<crate::CorrelatorSet<f64>> {
        Ok(self.spectrum()?.correlators(beta))
    }
}

/// `σ_{i1} σ_{i2} ... |v>`.
pub fn apply_string(v: &[C64], ops: &[(usize, Pauli)]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); v.len()];
    for (s, &a) in v.iter().enumerate() {
        if a == C64::new(0.0, 0.0) {
            continue;
        }
        let (mut t, mut amp) = (s, a);
        // rightmost operator acts first
        for &(site, op) in ops.iter().rev() {
            let (flip, f) = op.act(t >> site & 1 == 1);
            amp *= f;
            if flip {
                t ^= 1 << site;
            }
        }
        out[t] += amp;
    }
    out
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `<v|σ...σ|v>`; real for Hermitian strings on distinct sites.
pub fn expect_string(v: &[C64], ops: &[(usize, Pauli)]) -> f64 {
    inner(v, &apply_string(v, ops)).re
}

/// The seven bond quantities on sites `(e, o)`.
pub fn bond_correlators(v: &[C64], e: usize, o: usize) -> [f64; 7] {
    use Pauli::*;
    [
        expect_string(v, &[(e, X), (o, X)]),
        expect_string(v, &[(e, Y), (o, Y)]),
        expect_string(v, &[(e, X), (o, Y)]),
        expect_string(v, &[(e, Y), (o, X)]),
        expect_string(v, &[(e, Z), (o, Z)]),
        expect_string(v, &[(e, Z)]),
        expect_string(v, &[(o, Z)]),
    ]
}

pub(crate) fn correlators_from(a: [f64; 7]) -> crate::CorrelatorSet<f64> {
    crate::CorrelatorSet { xx: a[0], yy: a[1], xy: a[2], yx: a[3], zz: a[4], mz_even: a[5], mz_odd: a[6] }
}

/// `|(1/N) Σ_j (-1)^j <σx_j>|` in the ground state of the open chain with a
/// staggered `x` field `hx`.
pub fn staggered_mx(p: &ModelParams<f64>, sites: usize, hx: f64) -> Result<f64> {
    staggered_mx_from(p, sites, hx, None).map(|(m, _)| m)
}

/// [`staggered_mx`] with an optional Lanczos start vector; also returns the
/// ground state for warm-starting a neighbouring point.
pub fn staggered_mx_from(p: &ModelParams<f64>, sites: usize, hx: f64, start: Option<&[C64]>) -> Result<(f64, Vec<C64>)> {
    if !(hx > 0.0) {
        return Err(Error::InvalidParam { name: "hx", value: hx, reason: "must be positive" });
    }
    let ed = SpinChainED::new(sites, Boundary::Open, *p)?.with_staggered_x(hx)?;
    let g = lanczos_ground(|v, out| ed.apply(v, out), ed.dim(), start, lanczos::TOLERANCE)?;
    Ok((staggered_x_of(&g.vector, sites), g.vector))
}

pub(crate) fn staggered_x_of(v: &[C64], sites: usize) -> f64 {
    let total: f64 = (0..sites)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * expect_string(v, &[(j, Pauli::X)])
        })
        .sum();
    (total / sites as f64).abs()
}

/// Staggered magnetisation at each `hx` of a ladder and the linear
/// extrapolation to `hx → 0` through the two smallest fields.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldLadder {
    pub fields: Vec<f64>,
    pub values: Vec<f64>,
    pub extrapolated: f64,
}

pub const HX_LADDER: [f64; 3] = [1e-2, 1e-3, 1e-4];

pub fn staggered_mx_ladder(p: &ModelParams<f64>, sites: usize, fields: &[f64]) -> Result<FieldLadder> {
    assert!(fields.len() >= 2);
    let mut values = Vec::with_capacity(fields.len());
    let mut start: Option<Vec<C64>> = None;
    for &hx in fields {
        let (m, v) = staggered_mx_from(p, sites, hx, start.as_deref())?;
        values.push(m);
        start = Some(v);
    }
    let n = fields.len();
    let (h1, h2, m1, m2) = (fields[n - 2], fields[n - 1], values[n - 2], values[n - 1]);
    let extrapolated = (m2 + (m2 - m1) * (0.0 - h2) / (h2 - h1)).max(0.0);
    Ok(FieldLadder { fields: fields.to_vec(), values, extrapolated })
}

#[cfg(test)]
mod tests;
