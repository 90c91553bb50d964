//! Closed forms for the uniform-field chain (`λ2 = 0`).
//!
//! Momentum pairs `(p, -p)` decouple into a 4-dimensional space whose pair
//! sector has energies `cos φ ± Λ` and whose singly occupied states sit at
//! `cos φ ± d sin φ`. The DM coupling therefore only matters where a single
//! occupation beats the paired ground state, i.e. on the arc `(φ1, φ2)` of the
//! [`RootPair`].

use crate::params::{regime, Beta};
use crate::quad::{breakpoints, integrate_vec, QuadratureSpec};
use crate::{lit, CorrelatorSet, Error, ModelParams, Real, Result};

/// `Λ(φ) = sqrt((cos φ + h)² + γ² sin² φ)`.
#[inline]
pub fn quasi_energy<T: Real>(anisotropy: T, field: T, phi: T) -> T {
    let (s, c) = phi.sin_cos();
    ((c + field) * (c + field) + anisotropy * anisotropy * s * s).sqrt()
}

/// Single-particle dispersion at one momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionPoint<T> {
    pub phi: T,
    /// `Λ(φ) ≥ 0`.
    pub quasi_energy: T,
    /// `ω(φ) = J (d sin φ + Λ(φ))`.
    pub excitation: T,
}

/// `ω(φ) = J (d sin φ + Λ)` for the uniform model.
pub fn spectrum_uniform<T: Real>(p: &ModelParams<T>, phi: T) -> Result<DispersionPoint<T>> {
    p.require_uniform("spectrum_uniform")?;
    let lam = quasi_energy(p.anisotropy(), p.uniform_field(), phi);
    Ok(DispersionPoint {
        phi,
        quasi_energy: lam,
        excitation: p.coupling() * (p.dm() * phi.sin() + lam),
    })
}

/// The arc `[φ1, φ2] ⊂ [0, π]` on which `ω(-φ) ≤ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootPair<T> {
    pub phi1: T,
    pub phi2: T,
}

const DISCRIMINANT_EPS: f64 = 1e-12;

/// Roots of `d² sin²φ = Λ²(φ)` in `[0, π]`, when the strong-DM branch has
/// real solutions (`d > γ` and `λ1² ≤ 1 + d² - γ²`).
pub fn root_pair<T: Real>(p: &ModelParams<T>) -> Option<RootPair<T>> {
    let (g, d, h) = (p.anisotropy(), p.dm(), p.uniform_field());
    let a = T::one() + d * d - g * g;
    if !regime(p).strong() || h * h > a {
        return None;
    }
    // A c² + 2 h c + (h² - d² + γ²) = 0 in c = cos φ
    let quarter_disc = (d * d - g * g) * (a - h * h);
    let vertex = -h / a;
    let (c_hi, c_lo) = if quarter_disc.abs() <= lit(DISCRIMINANT_EPS) {
        return Some(bisect_roots(p, vertex));
    } else {
        let root = quarter_disc.sqrt();
        // stable form: avoid cancelling h against the root
        let q = -(h + h.signum() * root);
        if q == T::zero() {
            (root / a, -root / a)
        } else {
            let (r1, r2) = (q / a, (h * h - d * d + g * g) / q);
            (r1.max(r2), r1.min(r2))
        }
    };
    let clamp = |c: T| c.max(-T::one()).min(T::one());
    Some(RootPair {
        phi1: clamp(c_hi).acos(),
        phi2: clamp(c_lo).acos(),
    })
}

/// Near-double root: bisect `d² sin²φ - Λ²` on each side of its maximum.
fn bisect_roots<T: Real>(p: &ModelParams<T>, vertex: T) -> RootPair<T> {
    let (g, d, h) = (p.anisotropy(), p.dm(), p.uniform_field());
    let gap = |phi: T| {
        let lam = quasi_energy(g, h, phi);
        d * d * phi.sin() * phi.sin() - lam * lam
    };
    let peak = vertex.max(-T::one()).min(T::one()).acos();
    if gap(peak) <= T::zero() {
        return RootPair { phi1: peak, phi2: peak };
    }
    let solve = |mut neg: T, mut pos: T| {
        for _ in 0..200 {
            let mid = (neg + pos) * lit(0.5);
            if mid == neg || mid == pos {
                break;
            }
            if gap(mid) > T::zero() {
                pos = mid;
            } else {
                neg = mid;
            }
        }
        (neg + pos) * lit(0.5)
    };
    RootPair {
        phi1: solve(T::zero(), peak),
        phi2: solve(T::pi(), peak),
    }
}

/// φ at which `Λ` is smallest on `[0, π]`; a natural panel boundary.
pub(crate) fn quasi_energy_minimum<T: Real>(anisotropy: T, field: T) -> Option<T> {
    let denom = T::one() - anisotropy * anisotropy;
    if denom <= T::zero() {
        return None;
    }
    let c = -field / denom;
    (c > -T::one() && c < T::one()).then(|| c.acos())
}

fn panel_points<T: Real>(p: &ModelParams<T>, roots: Option<RootPair<T>>) -> Vec<T> {
    let mut interior: Vec<T> = quasi_energy_minimum(p.anisotropy(), p.uniform_field()).into_iter().collect();
    if let Some(r) = roots {
        interior.push(r.phi1);
        interior.push(r.phi2);
    }
    breakpoints(T::zero(), T::pi(), interior)
}

/// Zero-temperature correlators of the uniform model.
///
/// Off the arc `(φ1, φ2)` the ground state is the paired vacuum; on the arc
/// it is singly occupied, which contributes the `sin φ` and `cos φ` offsets
/// and the chiral pair `C^xy = -C^yx`.
pub fn zero_t_correlators_uniform<T: Real>(p: &ModelParams<T>, q: &QuadratureSpec<T>) -> Result<CorrelatorSet<T>> {
    p.require_uniform("zero_t_correlators_uniform")?;
    if !p.beta().is_infinite() {
        return Err(Error::Domain("zero_t_correlators_uniform requires betaJ = inf".into()));
    }
    let (g, h) = (p.anisotropy(), p.uniform_field());
    let roots = root_pair(p);
    let tiny = T::default_epsilon() * T::default_epsilon();
    let integrand = |phi: T, out: &mut [T]| {
        if let Some(r) = roots {
            if phi > r.phi1 && phi < r.phi2 {
                out.iter_mut().for_each(|v| *v = T::zero());
                return;
            }
        }
        let (s, c) = phi.sin_cos();
        let lam = quasi_energy(g, h, phi);
        if lam <= tiny {
            out[0] = c;
            out[1] = c;
            out[2] = T::zero();
            return;
        }
        let shared = (lam - c - h) * c;
        out[0] = (shared - g * s * s) / lam;
        out[1] = (shared + g * s * s) / lam;
        out[2] = -(h + c) / lam;
    };
    let est = integrate_vec(integrand, 3, &panel_points(p, roots), q)?;
    let inv_pi = T::frac_1_pi();
    let (mut xx, mut yy, mz) = (est.value[0] * inv_pi, est.value[1] * inv_pi, est.value[2] * inv_pi);
    let mut xy = T::zero();
    if let Some(r) = roots {
        let shift = (r.phi2.sin() - r.phi1.sin()) * inv_pi;
        xx += shift;
        yy += shift;
        xy = (r.phi2.cos() - r.phi1.cos()) * inv_pi;
    }
    Ok(CorrelatorSet::from_transverse(xx, yy, xy, -xy, mz, mz))
}

/// `cosh(x) e^{-m}` without overflow for `|x| ≤ m`.
#[inline]
fn cosh_scaled<T: Real>(x: T, m: T) -> T {
    ((x - m).exp() + (-x - m).exp()) * lit(0.5)
}

#[inline]
fn sinh_scaled<T: Real>(x: T, m: T) -> T {
    ((x - m).exp() - (-x - m).exp()) * lit(0.5)
}

/// Thermal correlators of the uniform model at finite `βJ`.
///
/// `C^yx = -C^xy` at every temperature; the singly occupied states carry
/// opposite chiral currents.
pub fn thermal_correlators_uniform<T: Real>(p: &ModelParams<T>, q: &QuadratureSpec<T>) -> Result<CorrelatorSet<T>> {
    p.require_uniform("thermal_correlators_uniform")?;
    let Beta::Finite(beta) = p.beta() else {
        return Err(Error::Domain("thermal_correlators_uniform requires finite betaJ".into()));
    };
    let (g, d, h) = (p.anisotropy(), p.dm(), p.uniform_field());
    let tiny = T::default_epsilon() * T::default_epsilon();
    let integrand = |phi: T, out: &mut [T]| {
        let (s, c) = phi.sin_cos();
        let lam = quasi_energy(g, h, phi);
        let bl = beta * lam;
        let bd = beta * d * s;
        let m = bl.max(bd.abs());
        let den = cosh_scaled(bl, m) + cosh_scaled(bd, m);
        // sinh(βΛ)/Λ, finite as Λ -> 0
        let sinh_over = if lam <= tiny { beta * (-m).exp() } else { sinh_scaled(bl, m) / lam };
        let ch_l = cosh_scaled(bl, m);
        let ch_d = cosh_scaled(bd, m);
        let pair = (c + h) * c;
        out[0] = (-(g * s * s + pair) * sinh_over + c * ch_l + c * ch_d) / den;
        out[1] = ((g * s * s - pair) * sinh_over + c * ch_l + c * ch_d) / den;
        out[2] = -s * sinh_scaled(bd, m) / den;
        out[3] = -(h + c) * sinh_over / den;
    };
    let pts = breakpoints(T::zero(), T::pi(), quasi_energy_minimum(g, h));
    let est = integrate_vec(integrand, 4, &pts, q)?;
    let v: Vec<T> = est.value.iter().map(|x| *x * T::frac_1_pi()).collect();
    Ok(CorrelatorSet::from_transverse(v[0], v[1], v[2], -v[2], v[3], v[3]))
}

/// Dispatches on temperature.
pub fn correlators_uniform<T: Real>(p: &ModelParams<T>, q: &QuadratureSpec<T>) -> Result<CorrelatorSet<T>> {
    match p.beta() {
        Beta::Infinite => zero_t_correlators_uniform(p, q),
        Beta::Finite(_) => thermal_correlators_uniform(p, q),
    }
}
