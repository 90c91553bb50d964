//! Momentum × parity block diagonalisation of periodic chains.
//!
//! Translation by two sites `T` commutes with the Hamiltonian of a periodic
//! chain (the field alternates with period two), as does the parity
//! `Π_j σz_j` when there is no `x` field. A sector basis state is
//! `|r, k> = R^{-1/2} Σ_{m<R} e^{-ikm} T^m |r>` for an orbit representative
//! `r` of period `R` with `e^{ikR} = 1`.

use nalgebra::{DMatrix, SymmetricEigen};

use super::{bond_correlators, correlators_from, expect_string, Boundary, Pauli, SpinChainED, C64};
use crate::quench::TimeTrace;
use crate::{Beta, CorrelatorSet, Error, Result};

/// Energies closer than this to the ground energy form the ground space.
pub const GROUND_TOL: f64 = 1e-10;
/// Boltzmann weights below this fraction of the ground weight are dropped.
const WEIGHT_CUTOFF: f64 = 1e-15;

struct Orbits {
    sites: usize,
    translations: usize,
    rep: Vec<usize>,
    shift: Vec<usize>,
    period: Vec<usize>,
}

impl Orbits {
    fn new(sites: usize) -> Self {
        let dim = 1usize << sites;
        let mask = dim - 1;
        let translations = sites / 2;
        let t = |s: usize| ((s << 2) | (s >> (sites - 2))) & mask;
        let mut rep = vec![usize::MAX; dim];
        let mut shift = vec![0; dim];
        let mut period = vec![0; dim];
        for s in 0..dim {
            if rep[s] != usize::MAX {
                continue;
            }
            // s is the smallest member of its orbit
            let mut cur = s;
            let mut m = 0;
            loop {
                rep[cur] = s;
                shift[cur] = m;
                cur = t(cur);
                m += 1;
                if cur == s {
                    break;
                }
            }
            period[s] = m;
        }
        Self { sites, translations, rep, shift, period }
    }

    fn translate(&self, s: usize, times: usize) -> usize {
        let mask = (1usize << self.sites) - 1;
        (0..times).fold(s, |s, _| ((s << 2) | (s >> (self.sites - 2))) & mask)
    }
}

/// One symmetry sector with its eigen-decomposition.
#[derive(Debug, Clone)]
pub struct Sector {
    pub parity: u32,
    /// Momentum `k = 2π momentum / (N/2)`.
    pub momentum: usize,
    reps: Vec<usize>,
    pub eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<C64>,
}

impl Sector {
    pub fn dim(&self) -> usize {
        self.reps.len()
    }
}

/// Full spectrum of a periodic chain organised by sector.
pub struct SectorSpectrum {
    orbits: Orbits,
    pub sectors: Vec<Sector>,
}

impl std::fmt::Debug for SectorSpectrum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SectorSpectrum").field("sites", &self.orbits.sites).field("sectors", &self.sectors.len()).finish()
    }
}

fn phase(momentum: usize, translations: usize, m: usize) -> C64 {
    let k = std::f64::consts::TAU * momentum as f64 / translations as f64;
    C64::from_polar(1.0, k * m as f64)
}

impl SectorSpectrum {
    pub fn new(ed: &SpinChainED) -> Result<Self> {
        if ed.boundary() != Boundary::Periodic || ed.staggered_x() != 0.0 {
            return Err(Error::Domain("sector decomposition needs a periodic chain without x field".into()));
        }
        let orbits = Orbits::new(ed.sites());
        let sectors = sector_bases(&orbits)
            .into_iter()
            .map(|(parity, momentum, reps)| diagonalise(ed, &orbits, parity, momentum, reps))
            .collect();
        Ok(Self { orbits, sectors })
    }

    pub fn ground_energy(&self) -> f64 {
        self.sectors.iter().flat_map(|s| s.eigenvalues.iter().copied()).fold(f64::INFINITY, f64::min)
    }

    /// All energies, ascending.
    pub fn energies(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.sectors.iter().flat_map(|s| s.eigenvalues.iter().copied()).collect();
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        e
    }

    /// Full-space image of a sector vector.
    pub fn expand(&self, sector: &Sector, coeffs: &[C64]) -> Vec<C64> {
        let o = &self.orbits;
        let mut out = vec![C64::new(0.0, 0.0); 1 << o.sites];
        for (&r, &c) in sector.reps.iter().zip(coeffs) {
            let period = o.period[r];
            let norm = (period as f64).sqrt();
            let mut s = r;
            for m in 0..period {
                out[s] += c * phase(sector.momentum, o.translations, m).conj() / norm;
                s = o.translate(s, 1);
            }
        }
        out
    }

    pub fn eigenvector(&self, sector: usize, level: usize) -> Vec<C64> {
        let s = &self.sectors[sector];
        let col: Vec<C64> = s.eigenvectors.column(level).iter().copied().collect();
        self.expand(s, &col)
    }

    /// `(sector, level, weight)` with weights summing to one.
    pub fn weights(&self, beta: Beta<f64>) -> Vec<(usize, usize, f64)> {
        let e0 = self.ground_energy();
        let mut out = Vec::new();
        for (k, s) in self.sectors.iter().enumerate() {
            for (n, &e) in s.eigenvalues.iter().enumerate() {
                let w = match beta {
                    Beta::Infinite => {
                        if e - e0 < GROUND_TOL {
                            1.0
                        } else {
                            0.0
                        }
                    }
                    Beta::Finite(b) => (-b * (e - e0)).exp(),
                };
                if w > WEIGHT_CUTOFF {
                    out.push((k, n, w));
                }
            }
        }
        let z: f64 = out.iter().map(|x| x.2).sum();
        out.iter_mut().for_each(|x| x.2 /= z);
        out
    }

    /// Bond correlators on sites `(0, 1)`; sector eigenstates are invariant
    /// under translation by two sites, so every (even, odd) bond agrees.
    pub fn correlators(&self, beta: Beta<f64>) -> CorrelatorSet<f64> {
        let mut acc = [0.0; 7];
        for (k, n, w) in self.weights(beta) {
            let v = self.eigenvector(k, n);
            for (a, x) in acc.iter_mut().zip(bond_correlators(&v, 0, 1)) {
                *a += w * x;
            }
        }
        correlators_from(acc)
    }

    fn sector_of(&self, parity: u32, momentum: usize) -> Option<usize> {
        self.sectors.iter().position(|s| s.parity == parity && s.momentum == momentum)
    }
}

fn sector_bases(o: &Orbits) -> Vec<(u32, usize, Vec<usize>)> {
    let mut out = Vec::new();
    for parity in 0..2u32 {
        for momentum in 0..o.translations {
            let reps: Vec<usize> = (0..o.rep.len())
                .filter(|&s| o.rep[s] == s && s.count_ones() % 2 == parity && (momentum * o.period[s]) % o.translations == 0)
                .collect();
            if !reps.is_empty() {
                out.push((parity, momentum, reps));
            }
        }
    }
    out
}

fn diagonalise(ed: &SpinChainED, o: &Orbits, parity: u32, momentum: usize, reps: Vec<usize>) -> Sector {
    let n = reps.len();
    let mut index = std::collections::HashMap::with_capacity(n);
    for (i, &r) in reps.iter().enumerate() {
        index.insert(r, i);
    }
    let mut h = DMatrix::<C64>::zeros(n, n);
    for (col, &r) in reps.iter().enumerate() {
        h[(col, col)] += C64::new(ed.diagonal(r), 0.0);
        ed.off_diagonal(r, |t, amp| {
            let target = o.rep[t];
            if let Some(&row) = index.get(&target) {
                let scale = (o.period[r] as f64 / o.period[target] as f64).sqrt();
                h[(row, col)] += amp * phase(momentum, o.translations, o.shift[t]) * scale;
            }
        });
    }
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Sector { parity, momentum, reps, eigenvalues, eigenvectors }
}

/// Sudden switch-off of both fields starting from the ground space of a
/// periodic chain, evolved exactly in the eigenbasis of the field-free chain.
pub struct QuenchOracle {
    post: SpinChainED,
    spectrum: SectorSpectrum,
    /// `(sector, weight, post-quench eigen-coefficients)` per ground state.
    components: Vec<(usize, f64, Vec<C64>)>,
}

impl QuenchOracle {
    pub fn new(pre: &SpinChainED) -> Result<Self> {
        let before = pre.spectrum()?;
        let post = pre.field_free();
        let spectrum = post.spectrum()?;
        let mut components = Vec::new();
        for (k, n, w) in before.weights(Beta::Infinite) {
            let s = &before.sectors[k];
            let target = spectrum.sector_of(s.parity, s.momentum).expect("sector bases depend only on N");
            let v = &spectrum.sectors[target].eigenvectors;
            let g = s.eigenvectors.column(n);
            components.push((target, w, (v.adjoint() * g).iter().copied().collect()));
        }
        Ok(Self { post, spectrum, components })
    }

    /// Weighted pure states `e^{-iH't}|ψ_g>` over the initial ground space.
    pub fn states(&self, t: f64) -> Vec<(f64, Vec<C64>)> {
        self.components
            .iter()
            .map(|(k, w, c)| {
                let sector = &self.spectrum.sectors[*k];
                let evolved: Vec<C64> = c
                    .iter()
                    .zip(&sector.eigenvalues)
                    .map(|(&a, &e)| a * C64::from_polar(1.0, -e * t))
                    .collect();
                let coeffs = &sector.eigenvectors * nalgebra::DVector::from_vec(evolved);
                (*w, self.spectrum.expand(sector, coeffs.as_slice()))
            })
            .collect()
    }

    pub fn correlators(&self, t: f64) -> CorrelatorSet<f64> {
        let mut acc = [0.0; 7];
        for (w, v) in self.states(t) {
            for (a, x) in acc.iter_mut().zip(bond_correlators(&v, 0, 1)) {
                *a += w * x;
            }
        }
        correlators_from(acc)
    }

    /// `<H'>` per site.
    pub fn energy(&self, t: f64) -> f64 {
        let mut out = vec![C64::new(0.0, 0.0); self.post.dim()];
        self.states(t)
            .iter()
            .map(|(w, v)| {
                self.post.apply(v, &mut out);
                w * super::inner(v, &out).re
            })
            .sum::<f64>()
            / self.post.sites() as f64
    }

    /// Largest `|<O>|` over single-site `σx, σy` and the cross bond strings
    /// `σx σz, σz σx, σy σz, σz σy`, all zero by parity.
    pub fn max_parity_odd(&self, t: f64) -> f64 {
        use Pauli::*;
        let strings: [&[(usize, Pauli)]; 6] =
            [&[(0, X)], &[(0, Y)], &[(0, X), (1, Z)], &[(0, Z), (1, X)], &[(0, Y), (1, Z)], &[(0, Z), (1, Y)]];
        let mut worst: f64 = 0.0;
        for (w, v) in self.states(t) {
            for s in strings {
                worst = worst.max(w * expect_string(&v, s).abs());
            }
        }
        worst
    }

    pub fn trace(&self, t_grid: &[f64]) -> TimeTrace<f64> {
        TimeTrace { t: t_grid.to_vec(), values: t_grid.iter().map(|&t| self.correlators(t)).collect() }
    }
}

/// Exact quench trace of a periodic chain.
pub fn ed_quench(pre: &SpinChainED, t_grid: &[f64]) -> Result<TimeTrace<f64>> {
    Ok(QuenchOracle::new(pre)?.trace(t_grid))
}
