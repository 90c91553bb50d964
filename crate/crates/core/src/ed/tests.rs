use super::*;
use nalgebra::DMatrix;
use proptest::prelude::*;

use crate::Beta;

fn params(g: f64, d: f64, l1: f64, l2: f64) -> ModelParams<f64> {
    ModelParams::new(g, d, l1, l2).unwrap()
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Single-site matrices in the `(down, up)` order used by the bit encoding.
fn site_op(p: Pauli) -> DMatrix<C64> {
    let z = c(0.0, 0.0);
    match p {
        Pauli::X => DMatrix::from_row_slice(2, 2, &[z, c(1.0, 0.0), c(1.0, 0.0), z]),
        Pauli::Y => DMatrix::from_row_slice(2, 2, &[z, c(0.0, 1.0), c(0.0, -1.0), z]),
        Pauli::Z => DMatrix::from_row_slice(2, 2, &[c(-1.0, 0.0), z, z, c(1.0, 0.0)]),
    }
}

/// Operator on `n` sites by explicit Kronecker products (site `n-1` leftmost).
fn embed(n: usize, ops: &[(usize, Pauli)]) -> DMatrix<C64> {
    let mut m = DMatrix::from_element(1, 1, c(1.0, 0.0));
    for site in (0..n).rev() {
        let local = ops.iter().find(|(s, _)| *s == site).map(|(_, p)| site_op(*p)).unwrap_or_else(|| DMatrix::identity(2, 2));
        m = m.kronecker(&local);
    }
    m
}

fn kron_hamiltonian(n: usize, open: bool, p: &ModelParams<f64>, hx: f64) -> DMatrix<C64> {
    use Pauli::*;
    let (g, d, l1, l2) = (p.anisotropy(), p.dm(), p.uniform_field(), p.alternating_field());
    let dim = 1 << n;
    let mut h = DMatrix::zeros(dim, dim);
    let bonds = if open { n - 1 } else { n };
    for j in 0..bonds {
        let k = (j + 1) % n;
        h += embed(n, &[(j, X), (k, X)]) * c((1.0 + g) / 4.0, 0.0);
        h += embed(n, &[(j, Y), (k, Y)]) * c((1.0 - g) / 4.0, 0.0);
        h += (embed(n, &[(j, X), (k, Y)]) - embed(n, &[(j, Y), (k, X)])) * c(d / 4.0, 0.0);
    }
    for j in 0..n {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        h += embed(n, &[(j, Z)]) * c(0.5 * (l1 + sign * l2), 0.0);
        h += embed(n, &[(j, X)]) * c(sign * hx, 0.0);
    }
    h
}

fn max_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().fold(0.0, |m, z| m.max(z.norm()))
}

fn sorted_eigs(m: DMatrix<C64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

#[test]
fn hamiltonian_matches_kronecker_construction() {
    let p = params(0.7, 0.45, 0.3, -0.6);
    for (b, open) in [(Boundary::Periodic, false), (Boundary::Open, true)] {
        let ed = SpinChainED::new(6, b, p).unwrap().with_staggered_x(0.13).unwrap();
        assert!(max_diff(&ed.dense(), &kron_hamiltonian(6, open, &p, 0.13)) < 1e-14);
    }
}

#[test]
fn hermitian_and_parity_conserving() {
    let ed = SpinChainED::new(6, Boundary::Periodic, params(0.8, 1.1, 0.4, 0.2)).unwrap();
    let h = ed.dense();
    assert!(max_diff(&h, &h.adjoint()) < 1e-15);
    let parity = embed(6, &(0..6).map(|j| (j, Pauli::Z)).collect::<Vec<_>>());
    assert!(max_diff(&(&h * &parity), &(&parity * &h)) < 1e-14);
}

#[test]
fn apply_matches_dense() {
    let ed = SpinChainED::new(8, Boundary::Open, params(0.6, 0.9, 0.2, 0.5)).unwrap().with_staggered_x(0.01).unwrap();
    let v: Vec<C64> = (0..ed.dim()).map(|i| c((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos())).collect();
    let mut out = vec![c(0.0, 0.0); ed.dim()];
    ed.apply(&v, &mut out);
    let dense = ed.dense() * nalgebra::DVector::from_vec(v);
    for (a, b) in out.iter().zip(dense.iter()) {
        assert!((a - b).norm() < 1e-13);
    }
}

#[test]
fn rejects_oversized_and_odd_chains() {
    let p = params(0.8, 0.0, 0.0, 0.0);
    assert!(matches!(SpinChainED::new(14, Boundary::Periodic, p), Err(Error::ResourceLimit { sites: 14, max: 12 })));
    assert!(SpinChainED::new(7, Boundary::Periodic, p).is_err());
    assert!(SpinChainED::new(2, Boundary::Periodic, p).is_err());
    assert!(staggered_mx(&p, 14, 1e-3).is_err());
    assert!(SpinChainED::new(6, Boundary::Open, p).unwrap().spectrum().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn sectors_reproduce_full_spectrum(
        g in 0.1f64..1.0, d in 0.0f64..1.5, l1 in -1.5f64..1.5, l2 in -1.5f64..1.5, big in proptest::bool::ANY,
    ) {
        let n = if big { 8 } else { 6 };
        let ed = SpinChainED::new(n, Boundary::Periodic, params(g, d, l1, l2)).unwrap();
        let sectors = ed.spectrum().unwrap();
        let dims: usize = sectors.sectors.iter().map(Sector::dim).sum();
        prop_assert_eq!(dims, ed.dim());
        let full = sorted_eigs(ed.dense());
        for (a, b) in sectors.energies().iter().zip(full.iter()) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }
}

#[test]
fn sector_eigenvectors_are_eigenvectors() {
    let ed = SpinChainED::new(8, Boundary::Periodic, params(0.8, 0.7, 0.3, 0.4)).unwrap();
    let spec = ed.spectrum().unwrap();
    let mut out = vec![c(0.0, 0.0); ed.dim()];
    for (k, s) in spec.sectors.iter().enumerate().step_by(3) {
        for n in [0, s.dim() - 1] {
            let v = spec.eigenvector(k, n);
            assert!((inner(&v, &v).re - 1.0).abs() < 1e-12);
            ed.apply(&v, &mut out);
            let res: f64 = out.iter().zip(&v).map(|(a, b)| (a - b * s.eigenvalues[n]).norm_sqr()).sum::<f64>().sqrt();
            assert!(res < 1e-10);
            // translation by two sites leaves bond expectations unchanged
            let (b01, b23) = (bond_correlators(&v, 0, 1), bond_correlators(&v, 2, 3));
            for (x, y) in b01.iter().zip(b23) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn thermal_correlators_match_dense_gibbs_state() {
    let p = params(0.8, 0.5, 0.4, 0.3);
    let ed = SpinChainED::new(6, Boundary::Periodic, p).unwrap();
    let beta = 2.0;
    let h = ed.dense();
    let eig = h.clone().symmetric_eigen();
    let e0 = eig.eigenvalues.min();
    let w = eig.eigenvalues.map(|e| (-beta * (e - e0)).exp());
    let z = w.sum();
    let rho = &eig.eigenvectors * DMatrix::from_diagonal(&w.map(|x| c(x / z, 0.0))) * eig.eigenvectors.adjoint();
    use Pauli::*;
    let expect = |ops: &[(usize, Pauli)]| (&rho * embed(6, ops)).trace().re;
    let cs = ed.thermal_correlators(Beta::Finite(beta)).unwrap();
    let oracle = [
        expect(&[(0, X), (1, X)]),
        expect(&[(0, Y), (1, Y)]),
        expect(&[(0, X), (1, Y)]),
        expect(&[(0, Y), (1, X)]),
        expect(&[(0, Z), (1, Z)]),
        expect(&[(0, Z)]),
        expect(&[(1, Z)]),
    ];
    for (a, b) in cs.to_array().iter().zip(oracle) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }
}

#[test]
fn infinite_temperature_and_sublattice_symmetry() {
    let ed = SpinChainED::new(8, Boundary::Periodic, params(0.8, 0.5, 0.4, 0.3)).unwrap();
    for v in ed.thermal_correlators(Beta::Finite(0.0)).unwrap().to_array() {
        assert!(v.abs() < 1e-12);
    }
    let ed = SpinChainED::new(8, Boundary::Periodic, params(0.8, 0.5, 0.4, 0.0)).unwrap();
    let cs = ed.thermal_correlators(Beta::Infinite).unwrap();
    assert!((cs.mz_even - cs.mz_odd).abs() < 1e-12);
}

#[test]
fn lanczos_finds_dense_ground_state() {
    let p = params(0.8, 0.3, 0.5, 0.2);
    let ed = SpinChainED::new(8, Boundary::Open, p).unwrap().with_staggered_x(1e-3).unwrap();
    let g = lanczos_ground(|v, o| ed.apply(v, o), ed.dim(), None, lanczos::TOLERANCE).unwrap();
    let e0 = sorted_eigs(ed.dense())[0];
    assert!((g.energy - e0).abs() < 1e-10);
    let mut hv = vec![c(0.0, 0.0); ed.dim()];
    ed.apply(&g.vector, &mut hv);
    assert!((inner(&g.vector, &hv).re - e0).abs() < 1e-10);
}

#[test]
fn staggered_order_in_and_out_of_antiferromagnet() {
    let afm = staggered_mx(&params(0.8, 0.0, 0.3, 0.2), 12, 1e-3).unwrap();
    let pm = staggered_mx(&params(0.8, 0.0, 2.0, 0.0), 12, 1e-3).unwrap();
    let ch = staggered_mx(&params(0.8, 1.2, 0.3, 0.6), 12, 1e-3).unwrap();
    assert!(afm > 0.3, "{afm}");
    assert!(pm < 0.05, "{pm}");
    assert!(ch < 0.05, "{ch}");
}

#[test]
fn paramagnet_has_no_spontaneous_order() {
    // at fixed hx the paramagnet shows linear response hx·χ(N), and χ(N)
    // approaches its bulk value from below; the spontaneous part is zero
    let p = params(0.8, 0.0, 2.0, 0.0);
    let ladders: Vec<FieldLadder> = [8, 10, 12].iter().map(|&n| staggered_mx_ladder(&p, n, &HX_LADDER).unwrap()).collect();
    for l in &ladders {
        assert!(l.extrapolated < 1e-6, "{l:?}");
        assert!((l.values[1] / l.values[2] - 10.0).abs() < 0.01, "response not linear: {l:?}");
    }
    let fixed: Vec<f64> = ladders.iter().map(|l| l.values[1]).collect();
    assert!((fixed[2] - fixed[1]).abs() < (fixed[1] - fixed[0]).abs());
    let afm = params(0.8, 0.0, 0.3, 0.2);
    let m: Vec<f64> = [8, 10, 12].iter().map(|&n| staggered_mx(&afm, n, 1e-3).unwrap()).collect();
    assert!((m[0] - m[2]).abs() < 0.1 * m[2], "{m:?}");
}

#[test]
fn field_ladder_extrapolates() {
    let ladder = staggered_mx_ladder(&params(0.8, 0.0, 0.3, 0.2), 10, &HX_LADDER).unwrap();
    assert_eq!(ladder.values.len(), 3);
    assert!(ladder.extrapolated > 0.3);
}

#[test]
fn quench_oracle_invariants() {
    let pre = SpinChainED::new(8, Boundary::Periodic, params(0.8, 0.6, 0.7, 0.4)).unwrap();
    let oracle = QuenchOracle::new(&pre).unwrap();
    let start = oracle.correlators(0.0);
    let statics = pre.thermal_correlators(Beta::Infinite).unwrap();
    assert!(start.max_abs_diff(&statics) < 1e-12);
    let e0 = oracle.energy(0.0);
    for t in [0.5, 3.0, 10.0] {
        assert!((oracle.energy(t) - e0).abs() < 1e-10);
        for (_, v) in oracle.states(t) {
            assert!((inner(&v, &v).re - 1.0).abs() < 1e-12);
        }
        assert!(oracle.max_parity_odd(t) < 1e-12);
    }
    assert!(oracle.correlators(3.0).max_abs_diff(&start) > 1e-3);
}

#[test]
fn quench_from_zero_field_is_stationary() {
    let pre = SpinChainED::new(8, Boundary::Periodic, params(0.8, 0.6, 0.0, 0.0)).unwrap();
    let trace = ed_quench(&pre, &[0.0, 1.0, 5.0, 20.0]).unwrap();
    for v in &trace.values[1..] {
        assert!(v.max_abs_diff(&trace.values[0]) < 1e-12);
    }
}
