//! Globally adaptive Gauss–Kronrod (10/21-point) quadrature.
//!
//! The engine is vector-valued: one pass integrates every component of
//! `f: [a, b] -> R^dim`, refining the panel whose worst component error is
//! largest. Scalar integration is the `dim = 1` case. Results are
//! deterministic: panels are bisected in a fixed priority order and summed
//! left to right.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::{lit, Error, Real, Result};

/// Tolerances for [`integrate`] and friends.
///
/// The run stops once the summed error estimate is below
/// `max(abs_tol, rel_tol * |I|)` (max-norm over components).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    /// Maximum number of bisections of any initial panel.
    pub max_depth: u32,
}

impl<T: Real> Default for QuadratureSpec<T> {
    /// `abs_tol = 1e-10` in double precision, floored at `1e3 ε` otherwise.
    fn default() -> Self {
        let floor = T::default_epsilon() * lit(1e3);
        Self {
            abs_tol: floor.max(lit(1e-10)),
            rel_tol: (T::default_epsilon() * lit(1e4)).max(lit(1e-12)),
            max_depth: 50,
        }
    }
}

impl<T: Real> QuadratureSpec<T> {
    pub fn new(abs_tol: T, rel_tol: T, max_depth: u32) -> Result<Self> {
        if !(abs_tol > T::zero() && abs_tol.is_finite()) {
            return Err(Error::InvalidParam {
                name: "abs_tol",
                value: abs_tol.to_f64().unwrap_or(f64::NAN),
                reason: "must be positive",
            });
        }
        if !(rel_tol >= T::zero() && rel_tol.is_finite()) {
            return Err(Error::InvalidParam {
                name: "rel_tol",
                value: rel_tol.to_f64().unwrap_or(f64::NAN),
                reason: "must be non-negative",
            });
        }
        if max_depth == 0 {
            return Err(Error::InvalidParam {
                name: "max_depth",
                value: 0.0,
                reason: "must be at least 1",
            });
        }
        Ok(Self { abs_tol, rel_tol, max_depth })
    }

    /// Same spec with a different absolute tolerance.
    pub fn with_abs_tol(self, abs_tol: T) -> Self {
        Self { abs_tol, ..self }
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_208_690_237,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];
// Gauss weights for the odd-indexed Kronrod nodes.
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

/// Result of one adaptive run.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate<T> {
    pub value: Vec<T>,
    /// Summed max-norm error estimate over the final panels.
    pub error: T,
    pub evaluations: usize,
}

#[derive(Clone, Copy)]
struct Panel<T> {
    a: T,
    b: T,
    depth: u32,
    err: T,
    slot: usize,
}

struct Ranked<T> {
    err: T,
    a: T,
    idx: usize,
}

impl<T: PartialOrd> PartialEq for Ranked<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: PartialOrd> Eq for Ranked<T> {}
impl<T: PartialOrd> PartialOrd for Ranked<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: PartialOrd> Ord for Ranked<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .partial_cmp(&other.err)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.a.partial_cmp(&self.a).unwrap_or(Ordering::Equal))
            .then_with(|| other.idx.cmp(&self.idx))
    }
}

struct Rule<T> {
    xgk: [T; 11],
    wgk: [T; 11],
    wg: [T; 5],
}

impl<T: Real> Rule<T> {
    fn new() -> Self {
        Self {
            xgk: XGK.map(lit),
            wgk: WGK.map(lit),
            wg: WG.map(lit),
        }
    }

    /// Kronrod estimate of one panel into `out`; returns the max-norm error.
    ///
    /// `fx` holds 21 rows of `dim` samples: the centre, then the mirrored
    /// node pairs.
    fn apply<F>(&self, f: &mut F, a: T, b: T, dim: usize, fx: &mut [T], out: &mut [T]) -> T
    where
        F: FnMut(T, &mut [T]),
    {
        let half = (b - a) * lit(0.5);
        let centre = (a + b) * lit(0.5);
        f(centre, &mut fx[..dim]);
        for i in 0..10 {
            let dx = half * self.xgk[i];
            let (lo, hi) = fx[(2 * i + 1) * dim..(2 * i + 3) * dim].split_at_mut(dim);
            f(centre - dx, lo);
            f(centre + dx, hi);
        }
        let eps = T::default_epsilon();
        let tiny = T::min_value().unwrap_or_else(T::zero).abs();
        let habs = half.abs();
        let mut worst = T::zero();
        for c in 0..dim {
            let fc = fx[c];
            let mut kron = self.wgk[10] * fc;
            let mut gauss = T::zero();
            let mut resabs = self.wgk[10] * fc.abs();
            for i in 0..10 {
                let lo = fx[(2 * i + 1) * dim + c];
                let hi = fx[(2 * i + 2) * dim + c];
                kron += self.wgk[i] * (lo + hi);
                resabs += self.wgk[i] * (lo.abs() + hi.abs());
                if i % 2 == 1 {
                    gauss += self.wg[i / 2] * (lo + hi);
                }
            }
            let mean = kron * lit(0.5);
            let mut resasc = self.wgk[10] * (fc - mean).abs();
            for i in 0..10 {
                let lo = fx[(2 * i + 1) * dim + c];
                let hi = fx[(2 * i + 2) * dim + c];
                resasc += self.wgk[i] * ((lo - mean).abs() + (hi - mean).abs());
            }
            out[c] = kron * half;
            let resabs = resabs * habs;
            let resasc = resasc * habs;
            let mut err = ((kron - gauss) * half).abs();
            if resasc != T::zero() && err != T::zero() {
                let r: T = (err * lit(200.0) / resasc).powf(lit(1.5));
                err = resasc * r.min(T::one());
            }
            if resabs > tiny / (eps * lit(50.0)) {
                err = err.max(eps * lit(50.0) * resabs);
            }
            if !(err.is_finite() && out[c].is_finite()) {
                err = T::max_value().unwrap_or_else(T::one);
            }
            worst = worst.max(err);
        }
        worst
    }
}

/// Panels beyond which a run is abandoned regardless of depth.
const MAX_PANELS: usize = 1 << 17;

/// Integrates a vector-valued `f` over `[points[0], points[last]]`, with the
/// interior `points` as forced panel boundaries.
///
/// `f(x, out)` must fill all `dim` entries of `out`. Breakpoints must be
/// non-decreasing; zero-length panels are dropped.
pub fn integrate_vec<T, F>(mut f: F, dim: usize, points: &[T], spec: &QuadratureSpec<T>) -> Result<Estimate<T>>
where
    T: Real,
    F: FnMut(T, &mut [T]),
{
    assert!(points.len() >= 2, "need at least the two endpoints");
    assert!(dim >= 1);
    let rule = Rule::new();
    let mut fx = vec![T::zero(); 21 * dim];
    let mut store: Vec<T> = Vec::new();
    let mut panels: Vec<Panel<T>> = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0usize;

    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        assert!(a <= b, "breakpoints must be sorted");
        if b - a <= T::zero() {
            continue;
        }
        let slot = store.len();
        store.resize(slot + dim, T::zero());
        let err = rule.apply(&mut f, a, b, dim, &mut fx, &mut store[slot..slot + dim]);
        evaluations += 21;
        heap.push(Ranked { err, a, idx: panels.len() });
        panels.push(Panel { a, b, depth: 0, err, slot });
    }
    if panels.is_empty() {
        return Ok(Estimate { value: vec![T::zero(); dim], error: T::zero(), evaluations });
    }

    let mut left = vec![T::zero(); dim];
    let mut right = vec![T::zero(); dim];
    // running sums; the returned value is re-summed exactly at the end
    let mut run_err = panels.iter().fold(T::zero(), |s, p| s + p.err);
    let mut run_val = vec![T::zero(); dim];
    for p in &panels {
        for c in 0..dim {
            run_val[c] += store[p.slot + c];
        }
    }
    let mut stuck = false;
    loop {
        let magnitude = run_val.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let tol = spec.abs_tol.max(spec.rel_tol * magnitude);
        if run_err <= tol {
            break;
        }
        let Some(top) = heap.pop() else {
            stuck = true;
            break;
        };
        let idx = top.idx;
        let Panel { a, b, depth, slot, err } = panels[idx];
        if depth >= spec.max_depth || panels.len() >= MAX_PANELS {
            // left in place; its error keeps counting towards the total
            continue;
        }
        let mid = (a + b) * lit(0.5);
        if !(mid > a && mid < b) {
            continue;
        }
        let el = rule.apply(&mut f, a, mid, dim, &mut fx, &mut left);
        let er = rule.apply(&mut f, mid, b, dim, &mut fx, &mut right);
        evaluations += 42;
        run_err = run_err - err + el + er;
        for c in 0..dim {
            run_val[c] += left[c] + right[c] - store[slot + c];
        }
        store[slot..slot + dim].copy_from_slice(&left);
        panels[idx] = Panel { a, b: mid, depth: depth + 1, err: el, slot };
        heap.push(Ranked { err: el, a, idx });
        let rslot = store.len();
        store.extend_from_slice(&right);
        heap.push(Ranked { err: er, a: mid, idx: panels.len() });
        panels.push(Panel { a: mid, b, depth: depth + 1, err: er, slot: rslot });
    }

    let mut order: Vec<usize> = (0..panels.len()).collect();
    order.sort_by(|&i, &j| panels[i].a.partial_cmp(&panels[j].a).unwrap_or(Ordering::Equal));
    let mut value = vec![T::zero(); dim];
    let mut error = T::zero();
    for &i in &order {
        let p = &panels[i];
        for c in 0..dim {
            value[c] += store[p.slot + c];
        }
        error += p.err;
    }
    if stuck {
        let to_f = |x: T| x.to_f64().unwrap_or(f64::NAN);
        let magnitude = value.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        return Err(Error::NonConvergence {
            estimate: to_f(value[0]),
            error: to_f(error),
            tolerance: to_f(spec.abs_tol.max(spec.rel_tol * magnitude)),
        });
    }
    Ok(Estimate { value, error, evaluations })
}

/// Integrates a scalar `f` with forced breakpoints (endpoints included).
pub fn integrate_with_breaks<T, F>(mut f: F, points: &[T], spec: &QuadratureSpec<T>) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    integrate_vec(|x, out: &mut [T]| out[0] = f(x), 1, points, spec).map(|e| e.value[0])
}

/// `∫_a^b f` to the tolerance of `spec`.
pub fn integrate<T, F>(f: F, a: T, b: T, spec: &QuadratureSpec<T>) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    integrate_with_breaks(f, &[a, b], spec)
}

/// Composite fixed 21-point Kronrod rule over `[points[0], points[last]]`:
/// `panels` equal-width panels shared out by subinterval length, at least one
/// per subinterval. Returns `(node, weight)` pairs in ascending order.
pub(crate) fn composite_rule<T: Real>(points: &[T], panels: usize) -> Vec<(T, T)> {
    let rule = Rule::<T>::new();
    let span = points[points.len() - 1] - points[0];
    let mut out = Vec::new();
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let share = ((b - a) / span * lit(panels as f64)).ceil().to_usize().unwrap_or(1).max(1);
        let h = (b - a) / lit(share as f64);
        for k in 0..share {
            let lo = a + h * lit(k as f64);
            let half = h * lit(0.5);
            let centre = lo + half;
            for i in 0..10 {
                out.push((centre - half * rule.xgk[i], half * rule.wgk[i]));
            }
            out.push((centre, half * rule.wgk[10]));
            for i in (0..10).rev() {
                out.push((centre + half * rule.xgk[i], half * rule.wgk[i]));
            }
        }
    }
    out
}

/// Sorted, clamped breakpoint list `[a, interior..., b]`.
pub fn breakpoints<T: Real>(a: T, b: T, interior: impl IntoIterator<Item = T>) -> Vec<T> {
    let mut pts: Vec<T> = interior
        .into_iter()
        .filter(|x| x.is_finite() && *x > a && *x < b)
        .collect();
    pts.push(a);
    pts.push(b);
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
    pts.dedup();
    pts
}
