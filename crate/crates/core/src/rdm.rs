//! Nearest-neighbour two-site state, logarithmic negativity and the scans
//! built on it.
//!
//! Basis order is `|s_e s_o>` with index `2 s_e + s_o` and `s = 0` meaning
//! `σz = +1`.

use nalgebra::{Complex, Matrix2, Matrix4};

use crate::correlators::equilibrium_correlators;
use crate::{lit, Beta, CorrelatorSet, Error, ModelParams, QuadratureSpec, Real, Result};

type C<T> = Complex<T>;

/// Smallest eigenvalue tolerated in an assembled state.
pub const PSD_SLACK: f64 = 1e-8;
/// Partial-transpose eigenvalues above `-NPT_FLOOR` count as non-negative.
pub const NPT_FLOOR: f64 = 1e-12;
/// Default threshold below which a state counts as a product state.
pub const FACTORIZATION_EPS: f64 = 1e-6;

/// Single-qubit Paulis `[I, σx, σy, σz]`.
pub fn paulis<T: Real>() -> [Matrix2<C<T>>; 4] {
    let (o, l, i) = (C::new(T::zero(), T::zero()), C::new(T::one(), T::zero()), C::new(T::zero(), T::one()));
    [
        Matrix2::new(l, o, o, l),
        Matrix2::new(o, l, l, o),
        Matrix2::new(o, -i, i, o),
        Matrix2::new(l, o, o, -l),
    ]
}

pub fn kron<T: Real>(a: &Matrix2<C<T>>, b: &Matrix2<C<T>>) -> Matrix4<C<T>> {
    Matrix4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

/// A density matrix of one (even, odd) bond.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSiteState<T: Real> {
    rho: Matrix4<C<T>>,
}

impl<T: Real> TwoSiteState<T> {
    /// Wraps a matrix after checking unit trace, Hermiticity and positivity
    /// up to [`PSD_SLACK`].
    pub fn from_matrix(rho: Matrix4<C<T>>) -> Result<Self> {
        let slack: T = lit(PSD_SLACK);
        let herm = (rho - rho.adjoint()).iter().fold(T::zero(), |m, z| m.max(z.re.abs().max(z.im.abs())));
        let trace = rho.trace();
        if herm > slack || (trace.re - T::one()).abs() > slack || trace.im.abs() > slack {
            return Err(Error::Domain(format!(
                "not a unit-trace Hermitian matrix (trace {:?}, asymmetry {:e})",
                trace.re.to_f64(),
                herm.to_f64().unwrap_or(f64::NAN)
            )));
        }
        let min = rho.symmetric_eigenvalues().iter().fold(T::max_value().unwrap(), |m, x| m.min(*x));
        if min < -slack {
            return Err(Error::NotAState { min_eigenvalue: min.to_f64().unwrap_or(f64::NAN) });
        }
        Ok(Self { rho })
    }

    pub fn matrix(&self) -> &Matrix4<C<T>> {
        &self.rho
    }

    /// `Tr[ρ σa ⊗ σb]` for `a, b ∈ {I, x, y, z}`.
    pub fn pauli_coefficients(&self) -> [[T; 4]; 4] {
        let s = paulis::<T>();
        let mut out = [[T::zero(); 4]; 4];
        for (a, row) in out.iter_mut().enumerate() {
            for (b, slot) in row.iter_mut().enumerate() {
                *slot = (self.rho * kron(&s[a], &s[b])).trace().re;
            }
        }
        out
    }

    pub fn eigenvalues(&self) -> [T; 4] {
        let ev = self.rho.symmetric_eigenvalues();
        let mut out = [ev[0], ev[1], ev[2], ev[3]];
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out
    }
}

/// Which party carries the transpose.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Party {
    Even,
    Odd,
}

pub fn partial_transpose<T: Real>(rho: &Matrix4<C<T>>, party: Party) -> Matrix4<C<T>> {
    Matrix4::from_fn(|r, c| {
        let (a, b, a2, b2) = (r / 2, r % 2, c / 2, c % 2);
        match party {
            Party::Even => rho[(2 * a2 + b, 2 * a + b2)],
            Party::Odd => rho[(2 * a + b2, 2 * a2 + b)],
        }
    })
}

/// Builds `ρ = 1/4 [I + m_e σz⊗I + m_o I⊗σz + Σ_α C^αα σα⊗σα + C^xy σx⊗σy + C^yx σy⊗σx]`.
pub fn assemble_rdm<T: Real>(cs: &CorrelatorSet<T>) -> Result<TwoSiteState<T>> {
    let s = paulis::<T>();
    let terms = [
        (0, 0, T::one()),
        (3, 0, cs.mz_even),
        (0, 3, cs.mz_odd),
        (1, 1, cs.xx),
        (2, 2, cs.yy),
        (3, 3, cs.zz),
        (1, 2, cs.xy),
        (2, 1, cs.yx),
    ];
    let quarter: T = lit(0.25);
    let rho = terms.iter().fold(Matrix4::zeros(), |acc, &(a, b, w)| {
        acc + kron(&s[a], &s[b]) * C::new(w * quarter, T::zero())
    });
    TwoSiteState::from_matrix(rho)
}

/// `‖ρ^T‖₁`; equals `2N + 1` for negativity `N`.
fn transposed_trace_norm<T: Real>(state: &TwoSiteState<T>, party: Party) -> T {
    let ev = partial_transpose(&state.rho, party).symmetric_eigenvalues();
    if ev.iter().all(|x| *x >= -lit::<T>(NPT_FLOOR)) {
        T::one()
    } else {
        ev.iter().fold(T::zero(), |s, x| s + x.abs())
    }
}

pub fn negativity<T: Real>(state: &TwoSiteState<T>) -> T {
    (transposed_trace_norm(state, Party::Even) - T::one()) * lit(0.5)
}

/// `log₂(2N + 1)`; exactly zero for PPT states.
pub fn log_negativity<T: Real>(state: &TwoSiteState<T>) -> T {
    log_negativity_wrt(state, Party::Even)
}

pub fn log_negativity_wrt<T: Real>(state: &TwoSiteState<T>, party: Party) -> T {
    transposed_trace_norm(state, party).log2().max(T::zero())
}

/// Logarithmic negativity of the equilibrium bond state at `p`.
pub fn equilibrium_ln<T: Real>(p: &ModelParams<T>, q: &QuadratureSpec<T>) -> Result<T> {
    let cs = equilibrium_correlators(p, q)?;
    Ok(log_negativity(&assemble_rdm(&cs)?))
}

/// Field component varied by a derivative or scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldAxis {
    Uniform,
    Alternating,
}

fn shifted<T: Real>(p: &ModelParams<T>, which: FieldAxis, by: T) -> Result<ModelParams<T>> {
    let (u, a) = (p.uniform_field(), p.alternating_field());
    match which {
        FieldAxis::Uniform => p.with_fields(u + by, a),
        FieldAxis::Alternating => p.with_fields(u, a + by),
    }
}

/// Central difference `[L(x+h) - L(x-h)] / 2h` of the zero-temperature
/// logarithmic negativity.
pub fn ent_derivative<T: Real>(p: &ModelParams<T>, which: FieldAxis, h: T, q: &QuadratureSpec<T>) -> Result<T> {
    if h <= T::zero() {
        return Err(Error::InvalidParam {
            name: "h",
            value: h.to_f64().unwrap_or(f64::NAN),
            reason: "step must be positive",
        });
    }
    let p = p.with_beta(Beta::Infinite);
    let up = equilibrium_ln(&shifted(&p, which, h)?, q)?;
    let down = equilibrium_ln(&shifted(&p, which, -h)?, q)?;
    Ok((up - down) / (h + h))
}

/// Steps used by [`derivative_ladder`].
pub const STEP_LADDER: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// Central differences over a shrinking step ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeLadder<T> {
    pub steps: Vec<T>,
    pub values: Vec<T>,
    /// Richardson combination of the two smallest steps.
    pub richardson: T,
}

impl<T: Real> DerivativeLadder<T> {
    /// `|value|` still growing at every refinement.
    pub fn diverging(&self) -> bool {
        self.values.windows(2).all(|w| w[1].abs() > w[0].abs())
    }

    /// `|value|` at the finest step over that at the coarsest.
    pub fn growth(&self) -> T {
        self.finest().abs() / self.values[0].abs()
    }

    pub fn finest(&self) -> T {
        *self.values.last().expect("non-empty ladder")
    }
}

pub fn derivative_ladder<T: Real>(
    p: &ModelParams<T>,
    which: FieldAxis,
    steps: &[f64],
    q: &QuadratureSpec<T>,
) -> Result<DerivativeLadder<T>> {
    assert!(steps.len() >= 2, "ladder needs two steps");
    let steps: Vec<T> = steps.iter().map(|&h| lit(h)).collect();
    let values = steps.iter().map(|&h| ent_derivative(p, which, h, q)).collect::<Result<Vec<T>>>()?;
    let n = steps.len();
    let ratio = steps[n - 2] / steps[n - 1];
    let r2 = ratio * ratio;
    let richardson = (r2 * values[n - 1] - values[n - 2]) / (r2 - T::one());
    Ok(DerivativeLadder { steps, values, richardson })
}

/// One grid point with vanishing entanglement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductPoint<T> {
    pub i: usize,
    pub j: usize,
    pub uniform_field: T,
    pub alternating_field: T,
    pub log_negativity: T,
}

/// Zero-temperature points of the `λ1 × λ2` grid with `LN < eps`.
///
/// Row-major over `uniform` (outer) and `alternating` (inner).
pub fn factorization_scan<T: Real>(
    base: &ModelParams<T>,
    uniform: &[T],
    alternating: &[T],
    eps: T,
    q: &QuadratureSpec<T>,
) -> Result<Vec<ProductPoint<T>>> {
    let base = base.with_beta(Beta::Infinite);
    let mut out = Vec::new();
    for (i, &l1) in uniform.iter().enumerate() {
        for (j, &l2) in alternating.iter().enumerate() {
            let ln = equilibrium_ln(&base.with_fields(l1, l2)?, q)?;
            if ln < eps {
                out.push(ProductPoint { i, j, uniform_field: l1, alternating_field: l2, log_negativity: ln });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Monotonic,
    NonMonotonic,
}

/// Changes smaller than this are ignored when looking for turning points.
pub const MONOTONICITY_NOISE: f64 = 1e-9;

/// Turning-point test on a sampled series.
pub fn classify_series<T: Real>(values: &[T]) -> Monotonicity {
    let noise: T = lit(MONOTONICITY_NOISE);
    let mut sign = 0i8;
    for w in values.windows(2) {
        let step = w[1] - w[0];
        if step.abs() <= noise {
            continue;
        }
        let s = if step > T::zero() { 1 } else { -1 };
        if sign != 0 && s != sign {
            return Monotonicity::NonMonotonic;
        }
        sign = s;
    }
    Monotonicity::Monotonic
}

/// Equilibrium `LN(βJ)` on an ascending grid.
pub fn ln_vs_beta<T: Real>(p: &ModelParams<T>, beta_grid: &[T], q: &QuadratureSpec<T>) -> Result<Vec<T>> {
    if beta_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("beta grid must be strictly ascending".into()));
    }
    beta_grid.iter().map(|&b| equilibrium_ln(&p.with_beta(Beta::Finite(b)), q)).collect()
}

/// Whether `LN` turns over as a function of `βJ` on the grid.
pub fn thermal_monotonicity<T: Real>(p: &ModelParams<T>, beta_grid: &[T], q: &QuadratureSpec<T>) -> Result<Monotonicity> {
    if beta_grid.len() < 20 {
        return Err(Error::Domain("thermal sweep needs at least 20 temperatures".into()));
    }
    Ok(classify_series(&ln_vs_beta(p, beta_grid, q)?))
}

/// `n` points log-spaced over `[lo, hi]`.
pub fn log_grid<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    assert!(n >= 2 && lo > T::zero() && hi > lo);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|k| (a + (b - a) * lit(k as f64 / (n - 1) as f64)).exp()).collect()
}
