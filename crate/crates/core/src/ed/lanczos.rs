//! Lanczos ground state with full reorthogonalisation.

use nalgebra::{DMatrix, SymmetricEigen};

use super::{inner, C64};
use crate::{Error, Result};

/// Residual `‖Hv - Ev‖` accepted as converged.
pub const TOLERANCE: f64 = 1e-10;
const MAX_KRYLOV: usize = 400;
const CHECK_EVERY: usize = 8;

#[derive(Debug, Clone)]
pub struct LanczosGround {
    pub energy: f64,
    pub vector: Vec<C64>,
    pub residual: f64,
    pub iterations: usize,
}

fn normalise(v: &mut [C64]) -> f64 {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= n);
    n
}

/// Deterministic start vector with support on every basis state.
fn default_start(dim: usize) -> Vec<C64> {
    (0..dim)
        .map(|i| {
            let x = i as f64;
            C64::new(1.0 + 0.5 * (0.7 * x + 0.3).sin(), 0.25 * (1.3 * x).cos())
        })
        .collect()
}

fn tridiagonal_ground(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let k = alpha.len();
    let t = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let (mut best, mut e) = (0, f64::INFINITY);
    for (i, &v) in eig.eigenvalues.iter().enumerate() {
        if v < e {
            e = v;
            best = i;
        }
    }
    (e, eig.eigenvectors.column(best).iter().copied().collect())
}

/// Lowest eigenpair of the Hermitian operator `apply`.
pub fn lanczos_ground<F>(mut apply: F, dim: usize, start: Option<&[C64]>, tol: f64) -> Result<LanczosGround>
where
    F: FnMut(&[C64], &mut [C64]),
{
    let mut v0 = start.map(<[C64]>::to_vec).unwrap_or_else(|| default_start(dim));
    if normalise(&mut v0) == 0.0 {
        v0 = default_start(dim);
        normalise(&mut v0);
    }
    let mut basis: Vec<Vec<C64>> = vec![v0];
    let (mut alpha, mut beta) = (Vec::new(), Vec::new());
    let mut w = vec![C64::new(0.0, 0.0); dim];
    let limit = MAX_KRYLOV.min(dim);
    let mut last = (f64::INFINITY, Vec::new(), f64::INFINITY);
    for k in 0..limit {
        apply(&basis[k], &mut w);
        let a = inner(&basis[k], &w).re;
        alpha.push(a);
        // two passes of Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for b in &basis {
                let c = inner(b, &w);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let done = k + 1 == limit || norm < 1e-14;
        if done || (k + 1) % CHECK_EVERY == 0 {
            let (e, y) = tridiagonal_ground(&alpha, &beta);
            let residual = if norm < 1e-14 { 0.0 } else { norm * y[k].abs() };
            last = (e, y, residual);
            if residual < tol || done {
                break;
            }
        }
        beta.push(norm);
        let next: Vec<C64> = w.iter().map(|z| z / norm).collect();
        basis.push(next);
    }
    let (energy, y, residual) = last;
    if residual >= tol {
        return Err(Error::EigenNonConvergence { iterations: alpha.len(), residual });
    }
    let mut vector = vec![C64::new(0.0, 0.0); dim];
    for (coef, b) in y.iter().zip(&basis) {
        vector.iter_mut().zip(b).for_each(|(x, z)| *x += z * *coef);
    }
    normalise(&mut vector);
    Ok(LanczosGround { energy, vector, residual, iterations: alpha.len() })
}
