//! Momentum-block solution of the alternating-field chain.
//!
//! With two-site unit cells the fermion modes `a_{±p}` (odd sites) and
//! `b_{±p}` (even sites) span a 16-dimensional Fock space per momentum
//! `φ ∈ (0, π/2]`. It splits into blocks of size 2, 4, 4 and 6:
//!
//! * `Paired`: `a†_p b†_p|0>`, `a†_{-p} b†_{-p}|0>`; the Hamiltonian vanishes here,
//! * `Forward`: odd states carrying net momentum `+p`,
//! * `Backward`: odd states carrying net momentum `-p`,
//! * `Neutral`: even states with zero net momentum, including `|0>`.
//!
//! Observables are bond and sublattice operators averaged over the ring; their
//! thermodynamic-limit expectations are `(1/π) ∫_0^{π/2} <O_φ> dφ`.
//!
//! Every block is real symmetric after a diagonal phase change of basis
//! (`i` on the states reached through one anomalous term), so the solver
//! diagonalises real matrices and carries the operators into that gauge.

use nalgebra::{Complex, DMatrix, DVector, Matrix4, SymmetricEigen};

use crate::params::Beta;
use crate::quad::{breakpoints, integrate_vec, QuadratureSpec};
use crate::{lit, CorrelatorSet, Error, ModelParams, Real, Result};

/// The four invariant blocks, in basis order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    Paired,
    Forward,
    Backward,
    Neutral,
}

impl Block {
    pub const ALL: [Block; 4] = [Block::Paired, Block::Forward, Block::Backward, Block::Neutral];

    pub fn dim(self) -> usize {
        match self {
            Block::Paired => 2,
            Block::Forward | Block::Backward => 4,
            Block::Neutral => 6,
        }
    }
}

/// Per-momentum observables whose block forms are tabulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    Xx,
    Yy,
    Xy,
    Yx,
    MzEven,
    MzOdd,
}

impl Observable {
    pub const ALL: [Observable; 6] = [
        Observable::Xx,
        Observable::Yy,
        Observable::Xy,
        Observable::Yx,
        Observable::MzEven,
        Observable::MzOdd,
    ];
}

type C<T> = Complex<T>;

/// Hamiltonian and observable blocks at one momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumBlockSet<T: Real> {
    pub phi: T,
    /// Indexed like [`Block::ALL`], in units of `J`.
    pub hamiltonian: [DMatrix<C<T>>; 4],
    /// `operators[o][b]` for `o` in [`Observable::ALL`] and `b` in [`Block::ALL`].
    pub operators: [[DMatrix<C<T>>; 4]; 6],
}

fn cplx<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

fn from_rows<T: Real>(n: usize, rows: &[C<T>]) -> DMatrix<C<T>> {
    debug_assert_eq!(rows.len(), n * n);
    DMatrix::from_row_slice(n, n, rows)
}

/// Hamiltonian blocks `Forward`, `Backward`, `Neutral` (units of `J`).
fn hamiltonian_blocks<T: Real>(p: &ModelParams<T>, phi: T) -> [DMatrix<C<T>>; 3] {
    let (g, d, l1, l2) = (p.anisotropy(), p.dm(), p.uniform_field(), p.alternating_field());
    let (s, c) = phi.sin_cos();
    let z = C::<T>::new(T::zero(), T::zero());
    let r = |x: T| cplx(x, T::zero());
    let gi = cplx(T::zero(), g * s); // iγ sin φ
    let two = lit::<T>(2.0);
    let odd = |sign: T| {
        let hop = c + sign * d * s;
        let back = -c + sign * d * s;
        from_rows(
            4,
            &[
                r(-l1 - l2), r(hop), -gi, z,
                r(hop), r(-l1 + l2), z, -gi,
                gi, z, r(l1 - l2), r(back),
                z, gi, r(back), r(l1 + l2),
            ],
        )
    };
    let (cm, cp) = (c - d * s, c + d * s);
    let neutral = from_rows(
        6,
        &[
            r(-two * l1), gi, -gi, z, z, z,
            -gi, z, z, r(cm), r(cp), -gi,
            gi, z, z, r(-c - d * s), r(-c + d * s), gi,
            z, r(cm), r(-c - d * s), r(-two * l2), z, z,
            z, r(cp), r(-c + d * s), z, r(two * l2), z,
            z, gi, -gi, z, z, r(two * l1),
        ],
    );
    [odd(T::one()), odd(-T::one()), neutral]
}

/// Observable blocks `Forward`, `Backward`, `Neutral` at momentum `phi`.
fn operator_blocks<T: Real>(phi: T) -> [[DMatrix<C<T>>; 3]; 6] {
    let (s, c) = phi.sin_cos();
    let e = cplx(c, s); // e^{iφ}
    let f = cplx(c, -s); // e^{-iφ}
    let z = C::<T>::new(T::zero(), T::zero());
    let mi = cplx(T::zero(), -T::one());
    let pi = cplx(T::zero(), T::one());
    let scale = |k: C<T>, m: DMatrix<C<T>>| m * k;

    let xx = [
        from_rows(4, &[z, e, -e, z, f, z, z, f, -f, z, z, -f, z, e, -e, z]),
        from_rows(4, &[z, f, f, z, e, z, z, -e, e, z, z, -e, z, -f, -f, z]),
        from_rows(
            6,
            &[
                z, -f, -e, z, z, z, //
                -e, z, z, e, e, -e, //
                -f, z, z, -f, -f, -f, //
                z, f, -e, z, z, z, //
                z, f, -e, z, z, z, //
                z, -f, -e, z, z, z,
            ],
        ),
    ];
    let yy = [
        from_rows(4, &[z, e, e, z, f, z, z, -f, f, z, z, -f, z, -e, -e, z]),
        from_rows(4, &[z, f, -f, z, e, z, z, e, -e, z, z, -e, z, f, -f, z]),
        from_rows(
            6,
            &[
                z, f, e, z, z, z, //
                e, z, z, e, e, e, //
                f, z, z, -f, -f, f, //
                z, f, -e, z, z, z, //
                z, f, -e, z, z, z, //
                z, f, e, z, z, z,
            ],
        ),
    ];
    let xy = [
        scale(mi, from_rows(4, &[z, e, e, z, -f, z, z, -f, -f, z, z, -f, z, e, e, z])),
        scale(mi, from_rows(4, &[z, f, -f, z, -e, z, z, e, e, z, z, -e, z, -f, f, z])),
        scale(
            pi,
            from_rows(
                6,
                &[
                    z, -f, -e, z, z, z, //
                    e, z, z, e, -e, -e, //
                    f, z, z, -f, f, -f, //
                    z, -f, e, z, z, z, //
                    z, f, -e, z, z, z, //
                    z, f, e, z, z, z,
                ],
            ),
        ),
    ];
    let yx = [
        scale(mi, from_rows(4, &[z, -e, e, z, f, z, z, -f, -f, z, z, f, z, e, -e, z])),
        scale(mi, from_rows(4, &[z, -f, -f, z, e, z, z, e, e, z, z, e, z, -f, -f, z])),
        scale(
            pi,
            from_rows(
                6,
                &[
                    z, -f, -e, z, z, z, //
                    e, z, z, -e, e, -e, //
                    f, z, z, f, -f, -f, //
                    z, f, -e, z, z, z, //
                    z, -f, e, z, z, z, //
                    z, f, e, z, z, z,
                ],
            ),
        ),
    ];
    let diag = |v: &[f64]| DMatrix::from_diagonal(&DVector::from_iterator(v.len(), v.iter().map(|&x| cplx(lit(x), T::zero()))));
    let mz_even = [diag(&[-2., 0., 0., 2.]), diag(&[-2., 0., 0., 2.]), diag(&[-2., 0., 0., -2., 2., 2.])];
    let mz_odd = [diag(&[0., -2., 2., 0.]), diag(&[0., -2., 2., 0.]), diag(&[-2., 0., 0., 2., -2., 2.])];
    [xx, yy, xy, yx, mz_even, mz_odd]
}

/// All blocks at `phi ∈ (0, π/2]`.
pub fn build_blocks<T: Real>(p: &ModelParams<T>, phi: T) -> Result<MomentumBlockSet<T>> {
    if !(phi > T::zero() && phi <= T::frac_pi_2()) {
        return Err(Error::Domain(format!(
            "momentum {} outside (0, pi/2]",
            phi.to_f64().unwrap_or(f64::NAN)
        )));
    }
    let zero2 = || DMatrix::<C<T>>::zeros(2, 2);
    let [h2, h3, h4] = hamiltonian_blocks(p, phi);
    let ops = operator_blocks(phi);
    let operators = ops.map(|[a, b, c]| [zero2(), a, b, c]);
    Ok(MomentumBlockSet {
        phi,
        hamiltonian: [zero2(), h2, h3, h4],
        operators,
    })
}

/// Phases making `Forward`, `Backward`, `Neutral` real symmetric.
fn gauge<T: Real>(block: usize) -> Vec<C<T>> {
    let one = cplx(T::one(), T::zero());
    let i = cplx(T::zero(), T::one());
    match block {
        0 | 1 => vec![one, one, i, i],
        _ => vec![one, i, i, i, i, one],
    }
}

fn to_gauge<T: Real>(m: &DMatrix<C<T>>, u: &[C<T>]) -> DMatrix<C<T>> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| u[r].conj() * m[(r, c)] * u[c])
}

/// Blocks `Forward`, `Backward`, `Neutral` in the real gauge.
pub(crate) struct Gauged<T: Real> {
    pub h: [DMatrix<T>; 3],
    pub ops: [[DMatrix<C<T>>; 3]; 6],
}

impl<T: Real> Gauged<T> {
    pub fn new(p: &ModelParams<T>, phi: T) -> Self {
        let hs = hamiltonian_blocks(p, phi);
        let h = [0, 1, 2].map(|k| to_gauge(&hs[k], &gauge(k)).map(|x| x.re));
        let ops = operator_blocks(phi).map(|blocks| [0, 1, 2].map(|k| to_gauge(&blocks[k], &gauge(k))));
        Self { h, ops }
    }

    pub fn hamiltonian_only(p: &ModelParams<T>, phi: T) -> [DMatrix<T>; 3] {
        let hs = hamiltonian_blocks(p, phi);
        [0, 1, 2].map(|k| to_gauge(&hs[k], &gauge(k)).map(|x| x.re))
    }
}

/// Eigen-decomposition of the three non-trivial blocks (ascending levels).
pub(crate) struct Spectrum<T: Real> {
    pub values: [DVector<T>; 3],
    pub vectors: [DMatrix<T>; 3],
}

impl<T: Real> Spectrum<T> {
    pub fn new(h: &[DMatrix<T>; 3]) -> Self {
        let mut values: [DVector<T>; 3] = Default::default();
        let mut vectors: [DMatrix<T>; 3] = Default::default();
        for k in 0..3 {
            let eig = SymmetricEigen::new(h[k].clone());
            let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
            idx.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
            values[k] = DVector::from_iterator(idx.len(), idx.iter().map(|&i| eig.eigenvalues[i]));
            vectors[k] = DMatrix::from_fn(idx.len(), idx.len(), |r, c| eig.eigenvectors[(r, idx[c])]);
        }
        Self { values, vectors }
    }

    /// Lowest level over all blocks, including the null `Paired` block.
    pub fn ground_energy(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.min(v[0]))
    }

    /// Boltzmann (or ground-space) weights per level, plus the total weight
    /// assigned to the null block. Returns whether the ground level is degenerate.
    pub fn weights(&self, beta: Beta<T>) -> ([Vec<T>; 3], T, bool) {
        let e0 = self.ground_energy();
        let mut levels: Vec<T> = self.values.iter().flat_map(|v| v.iter().copied()).collect();
        levels.extend([T::zero(), T::zero()]);
        levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let degenerate = levels[1] - levels[0] < lit(DEGENERACY_TOL);
        let weigh = |e: T| match beta {
            Beta::Finite(b) => (-(b * (e - e0))).exp(),
            Beta::Infinite => {
                if e - e0 < lit(DEGENERACY_TOL) {
                    T::one()
                } else {
                    T::zero()
                }
            }
        };
        let mut w: [Vec<T>; 3] = Default::default();
        let mut z = T::zero();
        for k in 0..3 {
            w[k] = self.values[k].iter().map(|&e| weigh(e)).collect();
            z += w[k].iter().fold(T::zero(), |s, x| s + *x);
        }
        let null = weigh(T::zero()) * lit(2.0);
        z += null;
        for wk in w.iter_mut() {
            wk.iter_mut().for_each(|x| *x /= z);
        }
        (w, null / z, degenerate)
    }

    /// Block density matrices `Σ_n w_n v_n v_nᵀ`.
    pub fn densities(&self, weights: &[Vec<T>; 3]) -> [DMatrix<T>; 3] {
        [0, 1, 2].map(|k| {
            let v = &self.vectors[k];
            let n = v.nrows();
            let mut rho = DMatrix::zeros(n, n);
            for (col, &w) in weights[k].iter().enumerate() {
                if w != T::zero() {
                    let c = v.column(col);
                    rho += c * c.transpose() * w;
                }
            }
            rho
        })
    }
}

/// Levels closer than this count as one degenerate ground space.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// `Tr(O ρ)` for real symmetric `ρ` and Hermitian `O`.
pub(crate) fn trace_product<T: Real>(o: &DMatrix<C<T>>, rho: &DMatrix<T>) -> T {
    let mut acc = T::zero();
    for r in 0..rho.nrows() {
        for c in 0..rho.ncols() {
            acc += o[(r, c)].re * rho[(c, r)];
        }
    }
    acc
}

/// Per-momentum expectations `[xx, yy, xy, yx, mz_e, mz_o]`.
pub(crate) fn momentum_expectations<T: Real>(p: &ModelParams<T>, phi: T, out: &mut [T]) -> bool {
    let g = Gauged::new(p, phi);
    let spec = Spectrum::new(&g.h);
    let (w, _, degenerate) = spec.weights(p.beta());
    let rho = spec.densities(&w);
    for (o, slot) in out.iter_mut().enumerate().take(6) {
        *slot = (0..3).fold(T::zero(), |s, k| s + trace_product(&g.ops[o][k], &rho[k]));
    }
    degenerate
}

fn block_ground_energies<T: Real>(p: &ModelParams<T>, phi: T) -> [T; 4] {
    let h = Gauged::hamiltonian_only(p, phi);
    let lows = h.map(|m| m.symmetric_eigenvalues().iter().fold(T::max_value().unwrap(), |a, &b| a.min(b)));
    [T::zero(), lows[0], lows[1], lows[2]]
}

fn ground_block<T: Real>(e: &[T; 4]) -> usize {
    let mut best = 0;
    for k in 1..4 {
        if e[k] < e[best] - lit(DEGENERACY_TOL) {
            best = k;
        }
    }
    best
}

/// Momenta in `(0, π/2)` where the zero-temperature ground state changes block.
pub fn ground_switch_points<T: Real>(p: &ModelParams<T>, samples: usize) -> Vec<T> {
    let top = T::frac_pi_2();
    let at = |i: usize| top * lit::<T>(i as f64) / lit::<T>(samples as f64);
    let mut out = Vec::new();
    let mut prev_phi = at(0).max(lit(1e-9));
    let mut prev = ground_block(&block_ground_energies(p, prev_phi));
    for i in 1..=samples {
        let phi = at(i);
        let cur = ground_block(&block_ground_energies(p, phi));
        if cur != prev {
            let diff = |x: T| {
                let e = block_ground_energies(p, x);
                e[prev] - e[cur]
            };
            let (mut lo, mut hi) = (prev_phi, phi);
            for _ in 0..100 {
                let mid = (lo + hi) * lit(0.5);
                if mid <= lo || mid >= hi {
                    break;
                }
                if diff(mid) <= T::zero() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push((lo + hi) * lit(0.5));
        }
        prev = cur;
        prev_phi = phi;
    }
    out
}

/// Correlators plus the degenerate-ground-state diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockOutcome<T> {
    pub correlators: CorrelatorSet<T>,
    /// Some quadrature node had a ground level degenerate to `1e-12`.
    pub degenerate_ground: bool,
}

pub(crate) const SWITCH_SAMPLES: usize = 256;

/// Equilibrium correlators of the alternating-field chain from the blocks.
pub fn block_correlators<T: Real>(p: &ModelParams<T>, q: &QuadratureSpec<T>) -> Result<BlockOutcome<T>> {
    let interior = if p.beta().is_infinite() { ground_switch_points(p, SWITCH_SAMPLES) } else { Vec::new() };
    let pts = breakpoints(T::zero(), T::frac_pi_2(), interior);
    let mut degenerate = false;
    let est = integrate_vec(
        |phi, out: &mut [T]| {
            degenerate |= momentum_expectations(p, phi, out);
        },
        6,
        &pts,
        q,
    )?;
    let v: Vec<T> = est.value.iter().map(|x| *x * T::frac_1_pi()).collect();
    Ok(BlockOutcome {
        correlators: CorrelatorSet::from_transverse(v[0], v[1], v[2], v[3], v[4], v[5]),
        degenerate_ground: degenerate,
    })
}

/// [`block_correlators`] without diagnostics; works at any `βJ` including `+∞`.
pub fn thermal_correlators_alt<T: Real>(p: &ModelParams<T>, q: &QuadratureSpec<T>) -> Result<CorrelatorSet<T>> {
    block_correlators(p, q).map(|o| o.correlators)
}

/// Nambu matrix acting on `(a_p, b_p, a†_{-p}, b†_{-p})`, units of `J`.
pub fn bdg_matrix<T: Real>(p: &ModelParams<T>, phi: T) -> Matrix4<C<T>> {
    let (g, d, l1, l2) = (p.anisotropy(), p.dm(), p.uniform_field(), p.alternating_field());
    let (s, c) = phi.sin_cos();
    let r = |x: T| cplx(x * p.coupling(), T::zero());
    let gi = cplx(T::zero(), g * s * p.coupling());
    let z = r(T::zero());
    Matrix4::new(
        r(l1 - l2), r(c + d * s), z, -gi,
        r(c + d * s), r(l1 + l2), -gi, z,
        z, gi, r(-(l1 - l2)), r(-(c - d * s)),
        gi, z, r(-(c - d * s)), r(-(l1 + l2)),
    )
}

/// Sorted eigenvalues of [`bdg_matrix`].
///
/// The Nambu matrix is conjugate to a real symmetric one under
/// `diag(1, 1, i, i)`, which is what gets diagonalised.
pub fn bdg_bands<T: Real>(p: &ModelParams<T>, phi: T) -> [T; 4] {
    let (g, d, l1, l2) = (p.anisotropy(), p.dm(), p.uniform_field(), p.alternating_field());
    let (s, c) = phi.sin_cos();
    let (lm, lp, gs) = (l1 - l2, l1 + l2, g * s);
    let m = Matrix4::new(
        lm, c + d * s, T::zero(), gs,
        c + d * s, lp, gs, T::zero(),
        T::zero(), gs, -lm, -(c - d * s),
        gs, T::zero(), -(c - d * s), -lp,
    );
    let ev = m.symmetric_eigenvalues();
    let mut out = [ev[0], ev[1], ev[2], ev[3]].map(|x| x * p.coupling());
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

fn smallest_band<T: Real>(p: &ModelParams<T>, phi: T) -> T {
    bdg_bands(p, phi).iter().fold(T::max_value().unwrap(), |m, x| m.min(x.abs()))
}

/// Default momentum grid for [`min_gap`].
pub const GAP_GRID: usize = 2048;

/// `min_φ min_k |ω_k(φ)|` over `φ ∈ [-π/2, π/2]`, units of `J`.
///
/// Grid search over `n_phi + 1` points (always including `0` and `±π/2`)
/// followed by golden-section refinement around the best node.
pub fn min_gap<T: Real>(p: &ModelParams<T>, n_phi: usize) -> T {
    assert!(n_phi >= 64, "gap grid needs at least 64 intervals");
    let n = n_phi + n_phi % 2;
    let half = T::frac_pi_2();
    let step = (half + half) / lit(n as f64);
    let node = |i: usize| -half + step * lit(i as f64);
    let (mut best_i, mut best) = (0, T::max_value().unwrap());
    for i in 0..=n {
        let v = smallest_band(p, node(i));
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let lo = node(best_i.saturating_sub(1));
    let hi = node((best_i + 1).min(n));
    best.min(golden_min(|x| smallest_band(p, x), lo, hi, lit(1e-12)))
}

/// Golden-section minimum of a unimodal function on `[a, b]`.
pub(crate) fn golden_min<T: Real, F: Fn(T) -> T>(f: F, mut a: T, mut b: T, tol: T) -> T {
    let ratio: T = lit(0.618_033_988_749_894_9);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    let mut best = f1.min(f2);
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2);
        }
        best = best.min(f1).min(f2);
    }
    best
}

#[cfg(test)]
mod tests;
