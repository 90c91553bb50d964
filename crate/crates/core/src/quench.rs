//! Sudden switch-off of both transverse fields at `t = 0`.
//!
//! The post-quench chain keeps `γ` and `d`; times are `t̃ = Jt/ħ`. Each
//! momentum evolves on its own, so a trace is a sum over modes of a few
//! oscillating terms.

use nalgebra::{Complex as C, DMatrix};
use rayon::prelude::*;

use crate::blocks::{ground_switch_points, Gauged, Spectrum, SWITCH_SAMPLES};
use crate::quad::{breakpoints, composite_rule, integrate_vec, QuadratureSpec};
use crate::rdm::{assemble_rdm, equilibrium_ln, log_grid, log_negativity};
use crate::uniform::{quasi_energy, root_pair};
use crate::{lit, Beta, CorrelatorSet, Error, ModelParams, Real, Result};

/// Samples of the default grid on `[0, 100π]`.
pub const DEFAULT_SAMPLES: usize = 2001;
pub const DEFAULT_HORIZON: f64 = 100.0 * std::f64::consts::PI;
/// Late-time averaging window.
pub const DEFAULT_WINDOW: (f64, f64) = (80.0 * std::f64::consts::PI, 100.0 * std::f64::consts::PI);
/// `lhs ≥ rhs - ERGODICITY_SLACK` counts as ergodic.
pub const ERGODICITY_SLACK: f64 = 1e-9;

/// `DEFAULT_SAMPLES` uniform times on `[0, DEFAULT_HORIZON]`.
pub fn default_t_grid<T: Real>() -> Vec<T> {
    grid_points(0, DEFAULT_SAMPLES)
}

fn grid_points<T: Real>(from: usize, to: usize) -> Vec<T> {
    let step = DEFAULT_HORIZON / (DEFAULT_SAMPLES - 1) as f64;
    (from..to).map(|i| lit(i as f64 * step)).collect()
}

/// Pre-quench parameters, sampling times and averaging window.
#[derive(Debug, Clone, PartialEq)]
pub struct QuenchSpec<T> {
    initial: ModelParams<T>,
    t_grid: Vec<T>,
    window: (T, T),
}

impl<T: Real> QuenchSpec<T> {
    /// Default grid and window.
    pub fn new(initial: ModelParams<T>) -> Self {
        Self { initial, t_grid: default_t_grid(), window: (lit(DEFAULT_WINDOW.0), lit(DEFAULT_WINDOW.1)) }
    }

    /// Only the default-grid samples inside the default window; enough for
    /// late-time averages.
    pub fn window_only(initial: ModelParams<T>) -> Self {
        let first = (DEFAULT_SAMPLES - 1) * 4 / 5;
        Self { t_grid: grid_points(first, DEFAULT_SAMPLES), ..Self::new(initial) }
    }

    pub fn with_grid(initial: ModelParams<T>, t_grid: Vec<T>, window: (T, T)) -> Result<Self> {
        let bad = |value: T, reason| Error::InvalidParam {
            name: "t_grid",
            value: value.to_f64().unwrap_or(f64::NAN),
            reason,
        };
        let (Some(&first), Some(&last)) = (t_grid.first(), t_grid.last()) else {
            return Err(bad(T::zero(), "must not be empty"));
        };
        if let Some(&t) = t_grid.iter().find(|t| !t.is_finite()) {
            return Err(bad(t, "must be finite"));
        }
        if let Some(w) = t_grid.windows(2).find(|w| w[1] <= w[0]) {
            return Err(bad(w[1], "must be strictly ascending"));
        }
        if !(window.0 < window.1 && window.0 >= first && window.1 <= last) {
            return Err(Error::EmptyWindow { start: to_f(window.0), end: to_f(window.1) });
        }
        Ok(Self { initial, t_grid, window })
    }

    pub fn initial(&self) -> &ModelParams<T> {
        &self.initial
    }
    pub fn t_grid(&self) -> &[T] {
        &self.t_grid
    }
    pub fn window(&self) -> (T, T) {
        self.window
    }

    /// The chain that drives the evolution: same couplings, no fields.
    pub fn post_quench(&self) -> ModelParams<T> {
        self.initial.field_free()
    }
}

/// `e^{iθ}`.
#[inline]
fn cis<T: Real>(theta: T) -> C<T> {
    let (s, c) = theta.sin_cos();
    C::new(c, s)
}

fn to_f<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Correlators sampled on a time grid (`t` in units of `ħ/J`).
#[derive(Debug, Clone, PartialEq)]
pub struct TimeTrace<T> {
    pub t: Vec<T>,
    pub values: Vec<CorrelatorSet<T>>,
}

impl<T: Real> TimeTrace<T> {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Nearest-neighbour log-negativity at every sample.
    pub fn log_negativity(&self) -> Result<Vec<T>> {
        self.values.iter().map(|cs| assemble_rdm(cs).map(|s| log_negativity(&s))).collect()
    }
}

/// Trapezoidal mean of `values` over the samples with `t` in `window`.
pub fn trapezoid_mean<T: Real>(t: &[T], values: &[T], window: (T, T)) -> Result<T> {
    let (a, b) = window;
    let slack = T::default_epsilon() * lit(16.0) * a.abs().max(b.abs()).max(T::one());
    let inside: Vec<usize> = (0..t.len()).filter(|&i| t[i] >= a - slack && t[i] <= b + slack).collect();
    let covers = t.first().is_some_and(|&t0| t0 <= a + slack) && t.last().is_some_and(|&tn| tn >= b - slack);
    if inside.len() < 2 || !covers {
        return Err(Error::EmptyWindow { start: to_f(a), end: to_f(b) });
    }
    let mut area = T::zero();
    for w in inside.windows(2) {
        let (i, j) = (w[0], w[1]);
        area += (t[j] - t[i]) * (values[i] + values[j]) * lit(0.5);
    }
    Ok(area / (t[inside[inside.len() - 1]] - t[inside[0]]))
}

/// Late-time mean of the log-negativity.
pub fn time_averaged_ln<T: Real>(trace: &TimeTrace<T>, window: (T, T)) -> Result<T> {
    let (a, b) = window;
    let slack = T::default_epsilon() * lit(16.0) * a.abs().max(b.abs()).max(T::one());
    // entries outside the window never reach the mean
    let ln: Vec<T> = trace
        .t
        .iter()
        .zip(&trace.values)
        .map(|(&t, cs)| {
            if t >= a - slack && t <= b + slack {
                assemble_rdm(cs).map(|s| log_negativity(&s))
            } else {
                Ok(T::zero())
            }
        })
        .collect::<Result<_>>()?;
    trapezoid_mean(&trace.t, &ln, window)
}

/// Per-mode integrands of the uniform quench.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernels<T> {
    /// `K_{-1}`, integrand of `C^xx`.
    pub k_minus: T,
    /// `K_{+1}`, integrand of `C^yy`.
    pub k_plus: T,
    pub s: T,
    pub m: T,
}

/// Kernels of the uniform chain at time `t` and momentum `phi`, each
/// already carrying its `1/π`.
pub fn kernels<T: Real>(p: &ModelParams<T>, t: T, phi: T) -> Result<Kernels<T>> {
    p.require_uniform("kernels")?;
    Ok(kernels_at(p.anisotropy(), p.uniform_field(), t, phi))
}

fn kernels_at<T: Real>(g: T, h: T, t: T, phi: T) -> Kernels<T> {
    let lam = quasi_energy(g, h, phi);
    // Λ(0) ≥ min(γ, 1) > 0; Λ(λ1) vanishes only at φ ∈ {0, π} for |λ1| = 1,
    // where every kernel tends to zero.
    if lam <= T::default_epsilon() * T::default_epsilon() {
        return Kernels { k_minus: T::zero(), k_plus: T::zero(), s: T::zero(), m: T::zero() };
    }
    let lam0 = quasi_energy(g, T::zero(), phi);
    let (s, c) = phi.sin_cos();
    let (sin2, cos2) = (lit::<T>(2.0) * lam0 * t).sin_cos();
    let inv_pi = T::frac_1_pi();
    let gs2 = g * g * s * s;
    let pair = gs2 + (c + h) * c;
    let den = lam * lam0 * lam0;
    let shared = -inv_pi * c / den * (pair * c + h * gs2 * cos2);
    let chiral = g * inv_pi * s / den * (pair - h * c * cos2);
    Kernels {
        // sin(Rφ) = R sin φ
        k_minus: shared - chiral * s,
        k_plus: shared + chiral * s,
        s: g * h * inv_pi * s * s * sin2 / (lam * lam0),
        m: -inv_pi / den * (cos2 * h * gs2 + c * pair),
    }
}

/// Quench from the zero-temperature uniform chain via the kernels.
///
/// On the strong-DM arc `(φ1, φ2)` the initial state is singly occupied and
/// stationary, so it only contributes the static chiral offsets.
pub fn evolve_uniform<T: Real>(spec: &QuenchSpec<T>, q: &QuadratureSpec<T>) -> Result<TimeTrace<T>> {
    let p = spec.initial();
    p.require_uniform("evolve_uniform")?;
    if !p.beta().is_infinite() {
        return Err(Error::Domain("evolve_uniform starts from the ground state (betaJ = inf)".into()));
    }
    let (g, h) = (p.anisotropy(), p.uniform_field());
    let roots = root_pair(p);
    let pts = breakpoints(T::zero(), T::pi(), roots.iter().flat_map(|r| [r.phi1, r.phi2]));
    let offset = roots.map_or(T::zero(), |r| (r.phi2.cos() - r.phi1.cos()) * T::frac_1_pi());
    let values = spec
        .t_grid()
        .par_iter()
        .map(|&t| {
            let est = integrate_vec(
                |phi, out: &mut [T]| {
                    if roots.is_some_and(|r| phi > r.phi1 && phi < r.phi2) {
                        out.fill(T::zero());
                        return;
                    }
                    let k = kernels_at(g, h, t, phi);
                    out.copy_from_slice(&[k.k_minus, k.k_plus, k.s, k.m]);
                },
                4,
                &pts,
                q,
            )?;
            let v = est.value;
            Ok(CorrelatorSet::from_transverse(v[0], v[1], v[2] + offset, v[2] - offset, v[3], v[3]))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TimeTrace { t: spec.t_grid().to_vec(), values })
}

/// One momentum after the quench: observable `o` reads
/// `base[o] + Σ_k Re(coef[k][o] e^{-i omega[k] t})`.
struct ModeEvolution<T: Real> {
    base: [T; 6],
    omega: Vec<T>,
    coef: Vec<[C<T>; 6]>,
}

/// Pre-quench block state and post-quench spectrum at one momentum.
struct ModeQuench<T: Real> {
    ops: [[DMatrix<C<T>>; 3]; 6],
    rho: [DMatrix<T>; 3],
    after: Spectrum<T>,
}

impl<T: Real> ModeQuench<T> {
    fn new(pre: &ModelParams<T>, phi: T) -> Self {
        let g = Gauged::new(pre, phi);
        let before = Spectrum::new(&g.h);
        let (w, _, _) = before.weights(pre.beta());
        let rho = before.densities(&w);
        let after = Spectrum::new(&Gauged::hamiltonian_only(&pre.field_free(), phi));
        Self { ops: g.ops, rho, after }
    }

    /// `U ρ(0) U†` per block with `U = e^{-iH't}`; the null block is stationary.
    #[cfg(test)]
    fn state_at(&self, t: T) -> [DMatrix<C<T>>; 3] {
        [0, 1, 2].map(|k| {
            let v = self.after.vectors[k].map(|x| C::new(x, T::zero()));
            let phases = self.after.values[k].map(|e| cis(-e * t));
            let u = &v * DMatrix::from_diagonal(&phases) * v.adjoint();
            let rho = self.rho[k].map(|x| C::new(x, T::zero()));
            &u * rho * u.adjoint()
        })
    }

    fn evolution(&self) -> ModeEvolution<T> {
        let cutoff = T::default_epsilon() * lit(1e-2);
        let mut out = ModeEvolution { base: [T::zero(); 6], omega: Vec::new(), coef: Vec::new() };
        for k in 0..3 {
            if self.rho[k].iter().all(|x| x.abs() <= cutoff) {
                continue;
            }
            let v = &self.after.vectors[k];
            let e = &self.after.values[k];
            let r = v.transpose() * &self.rho[k] * v;
            let vc = v.map(|x| C::new(x, T::zero()));
            let ops: Vec<DMatrix<C<T>>> = (0..6).map(|o| vc.transpose() * &self.ops[o][k] * &vc).collect();
            let n = e.len();
            for m in 0..n {
                for (o, op) in ops.iter().enumerate() {
                    out.base[o] += r[(m, m)] * op[(m, m)].re;
                }
                for l in m + 1..n {
                    if r[(m, l)].abs() <= cutoff {
                        continue;
                    }
                    // the (l, m) term is the conjugate of the (m, l) term
                    out.omega.push(e[m] - e[l]);
                    out.coef.push([0, 1, 2, 3, 4, 5].map(|o| ops[o][(l, m)] * (r[(m, l)] * lit(2.0))));
                }
            }
        }
        out
    }
}

/// `(t0, dt)` when the grid is uniform to rounding.
fn uniform_step<T: Real>(t: &[T]) -> Option<(T, T)> {
    if t.len() < 3 {
        return None;
    }
    let n = t.len() - 1;
    let dt = (t[n] - t[0]) / lit(n as f64);
    let tol = T::default_epsilon() * lit(64.0) * t[0].abs().max(t[n].abs()).max(T::one());
    t.iter()
        .enumerate()
        .all(|(i, &x)| (x - (t[0] + dt * lit(i as f64))).abs() <= tol)
        .then_some((t[0], dt))
}

/// Largest `|dε/dφ|` of any post-quench level, from a sampled spectrum.
fn max_level_slope<T: Real>(post: &ModelParams<T>) -> T {
    const SAMPLES: usize = 256;
    let step = T::frac_pi_2() / lit(SAMPLES as f64);
    let levels = |i: usize| Spectrum::new(&Gauged::hamiltonian_only(post, step * lit(i as f64))).values;
    let mut prev = levels(0);
    let mut slope = T::zero();
    for i in 1..=SAMPLES {
        let cur = levels(i);
        for k in 0..3 {
            for (a, b) in prev[k].iter().zip(cur[k].iter()) {
                slope = slope.max((*b - *a).abs() / step);
            }
        }
        prev = cur;
    }
    slope
}

/// Fixed nodes for `∫_0^{π/2}` resolving phases up to `t_max`: every panel
/// advances the fastest pair phase by at most π.
fn quench_nodes<T: Real>(spec: &QuenchSpec<T>) -> Vec<(T, T)> {
    let t_max = spec.t_grid().iter().fold(T::zero(), |m, t| m.max(t.abs()));
    let p = spec.initial();
    let slope = max_level_slope(&spec.post_quench());
    // pair frequencies change at most twice as fast as a single level
    let panels = (slope * t_max).ceil().to_usize().unwrap_or(0) + 8;
    let interior = if p.beta().is_infinite() { ground_switch_points(p, SWITCH_SAMPLES) } else { Vec::new() };
    composite_rule(&breakpoints(T::zero(), T::frac_pi_2(), interior), panels)
}

/// Node chunks summed independently and then in order, so results do not
/// depend on the thread count.
const CHUNKS: usize = 64;

/// Quench of the general chain by evolving every momentum block.
///
/// Works at any initial temperature; the null block is stationary and
/// carries no bond observable.
pub fn evolve_alt<T: Real>(spec: &QuenchSpec<T>) -> TimeTrace<T> {
    let nodes = quench_nodes(spec);
    let t = spec.t_grid();
    let step = uniform_step(t);
    let chunk = nodes.len().div_ceil(CHUNKS).max(1);
    let partials: Vec<Vec<[T; 6]>> = nodes
        .par_chunks(chunk)
        .map(|part| {
            let mut acc = vec![[T::zero(); 6]; t.len()];
            let mut base = [T::zero(); 6];
            for &(phi, w) in part {
                let ev = ModeQuench::new(spec.initial(), phi).evolution();
                for o in 0..6 {
                    base[o] += w * ev.base[o];
                }
                for (&omega, coef) in ev.omega.iter().zip(&ev.coef) {
                    let coef = coef.map(|c| c * w);
                    accumulate(&mut acc, t, step, omega, &coef);
                }
            }
            acc.iter_mut().for_each(|row| (0..6).for_each(|o| row[o] += base[o]));
            acc
        })
        .collect();
    let values = (0..t.len())
        .map(|i| {
            let mut v = [T::zero(); 6];
            for part in &partials {
                (0..6).for_each(|o| v[o] += part[i][o]);
            }
            let v = v.map(|x| x * T::frac_1_pi());
            CorrelatorSet::from_transverse(v[0], v[1], v[2], v[3], v[4], v[5])
        })
        .collect();
    TimeTrace { t: t.to_vec(), values }
}

/// Adds `Re(coef e^{-iωt})` at every sample; a uniform grid uses a phase
/// recurrence renormalised every few hundred steps.
fn accumulate<T: Real>(acc: &mut [[T; 6]], t: &[T], step: Option<(T, T)>, omega: T, coef: &[C<T>; 6]) {
    const RENORM: usize = 256;
    let add = |row: &mut [T; 6], z: C<T>| {
        for o in 0..6 {
            row[o] += coef[o].re * z.re - coef[o].im * z.im;
        }
    };
    match step {
        Some((t0, dt)) => {
            let start = cis(-omega * t0);
            let turn = cis(-omega * dt);
            let mut z = start;
            for (i, row) in acc.iter_mut().enumerate() {
                add(row, z);
                z *= turn;
                if (i + 1) % RENORM == 0 {
                    z = cis(-omega * (t0 + dt * lit((i + 1) as f64)));
                }
            }
        }
        None => {
            for (row, &ti) in acc.iter_mut().zip(t) {
                add(row, cis(-omega * ti));
            }
        }
    }
}

/// Closed forms when they apply (`λ2 = 0`, ground state), blocks otherwise.
pub fn evolve<T: Real>(spec: &QuenchSpec<T>, q: &QuadratureSpec<T>) -> Result<TimeTrace<T>> {
    let p = spec.initial();
    if p.is_uniform() && p.beta().is_infinite() {
        evolve_uniform(spec, q)
    } else {
        Ok(evolve_alt(spec))
    }
}

/// `41` log-spaced inverse temperatures on `[0.1, 100]`.
pub fn default_tprime_grid<T: Real>() -> Vec<T> {
    log_grid(lit(0.1), lit(100.0), 41)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErgodicityVerdict<T> {
    /// Best equilibrium log-negativity of the field-free chain.
    pub lhs: T,
    /// Late-time average after the quench.
    pub rhs: T,
    /// Temperature attaining `lhs`.
    pub best_beta: Beta<T>,
    pub ergodic: bool,
}

/// Compares the late-time log-negativity after switching off the fields
/// with the best the field-free chain reaches in equilibrium.
///
/// Candidates are every `βJ` of `tprime_grid` plus the ground state, which
/// a finite grid cannot reach in gapless phases.
pub fn ergodicity_verdict<T: Real>(
    p: &ModelParams<T>,
    tprime_grid: &[T],
    q: &QuadratureSpec<T>,
) -> Result<ErgodicityVerdict<T>> {
    let mut candidates = tprime_grid.iter().map(|&b| Beta::from_value(b)).collect::<Result<Vec<_>>>()?;
    candidates.push(Beta::Infinite);
    let post = p.field_free();
    let equilibrium: Vec<T> = candidates
        .par_iter()
        .map(|&b| equilibrium_ln(&post.with_beta(b), q))
        .collect::<Result<_>>()?;
    let (mut lhs, mut best_beta) = (equilibrium[0], candidates[0]);
    for (&ln, &b) in equilibrium.iter().zip(&candidates) {
        if ln > lhs {
            lhs = ln;
            best_beta = b;
        }
    }
    let spec = QuenchSpec::window_only(*p);
    let rhs = time_averaged_ln(&evolve(&spec, q)?, spec.window())?;
    Ok(ErgodicityVerdict { lhs, rhs, best_beta, ergodic: lhs >= rhs - lit(ERGODICITY_SLACK) })
}

#[cfg(test)]
mod tests;
