use super::*;
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

type M = DMatrix<Complex<f64>>;

fn params(g: f64, d: f64, l1: f64, l2: f64) -> ModelParams<f64> {
    ModelParams::new(g, d, l1, l2).unwrap()
}

/// Brute-force 16-dimensional Fock space for modes `(a_p, b_p, a_-p, b_-p)`.
mod fock {
    use super::*;

    pub fn annihilator(mode: usize) -> M {
        let mut a = M::zeros(16, 16);
        for s in 0..16usize {
            if s >> mode & 1 == 1 {
                let sign = if (s & ((1 << mode) - 1)).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                a[(s ^ (1 << mode), s)] = Complex::new(sign, 0.0);
            }
        }
        a
    }

    pub struct Modes {
        pub a: [M; 4],
        pub ad: [M; 4],
    }

    pub fn modes() -> Modes {
        let a = [0, 1, 2, 3].map(annihilator);
        let ad = a.clone().map(|m| m.adjoint());
        Modes { a, ad }
    }

    /// Momentum-space Hamiltonian assembled term by term.
    pub fn hamiltonian(p: &ModelParams<f64>, phi: f64) -> M {
        let m = modes();
        let (ap, bp, am, bm) = (&m.a[0], &m.a[1], &m.a[2], &m.a[3]);
        let (apd, bpd, amd, bmd) = (&m.ad[0], &m.ad[1], &m.ad[2], &m.ad[3]);
        let (g, d, l1, l2) = (p.anisotropy(), p.dm(), p.uniform_field(), p.alternating_field());
        let (s, c) = phi.sin_cos();
        let r = |x: f64| Complex::new(x, 0.0);
        let mut h = (apd * bp + bpd * ap) * r(c + d * s) + (amd * bm + bmd * am) * r(c - d * s);
        h += (apd * bmd + ap * bm - amd * bpd - am * bp) * Complex::new(0.0, -g * s);
        h += (bpd * bp + bmd * bm) * r(l1 + l2) + (apd * ap + amd * am) * r(l1 - l2);
        h -= M::identity(16, 16) * r(2.0 * l1);
        h
    }

    /// Bond operators from their real-space definitions.
    pub fn observables(phi: f64) -> [M; 6] {
        let m = modes();
        let (ap, bp, am, bm) = (&m.a[0], &m.a[1], &m.a[2], &m.a[3]);
        let (apd, bpd, amd, bmd) = (&m.ad[0], &m.ad[1], &m.ad[2], &m.ad[3]);
        // Σ_x [P b†_x a†_{x+1} + Q b†_x a_{x+1} + R a†_{x+1} b_x + S a_{x+1} b_x]
        let terms = |pp: f64, qq: f64, rr: f64, ss: f64| {
            let mut t = M::zeros(16, 16);
            for (k, a, b, ad, bd, amk, amkd) in [(phi, ap, bp, apd, bpd, am, amd), (-phi, am, bm, amd, bmd, ap, apd)] {
                let e_minus = Complex::new(0.0, -k).exp();
                let e_plus = Complex::new(0.0, k).exp();
                t += bd * amkd * (e_minus * pp) + bd * a * (e_minus * qq) + ad * b * (e_plus * rr) + amk * b * (e_plus * ss);
            }
            t
        };
        let mi = Complex::new(0.0, -1.0);
        let id = M::identity(16, 16);
        let two = Complex::new(2.0, 0.0);
        [
            terms(1., 1., 1., 1.),
            -terms(1., -1., -1., 1.),
            terms(1., -1., 1., -1.) * mi,
            terms(1., 1., -1., -1.) * mi,
            (bpd * bp + bmd * bm) * two - &id * two,
            (apd * ap + amd * am) * two - &id * two,
        ]
    }

    /// Columns are the 16 block basis states in block order.
    pub fn basis() -> M {
        let m = modes();
        let (apd, bpd, amd, bmd) = (&m.ad[0], &m.ad[1], &m.ad[2], &m.ad[3]);
        let mut vac = nalgebra::DVector::<Complex<f64>>::zeros(16);
        vac[0] = Complex::new(1.0, 0.0);
        let st = |ops: &[&M]| ops.iter().rev().fold(vac.clone(), |v, o| *o * v);
        let cols = vec![
            st(&[apd, bpd]),
            st(&[amd, bmd]),
            st(&[apd]),
            st(&[bpd]),
            st(&[apd, amd, bpd]),
            st(&[apd, bpd, bmd]),
            st(&[amd]),
            st(&[bmd]),
            st(&[apd, amd, bmd]),
            st(&[amd, bpd, bmd]),
            vac.clone(),
            st(&[apd, bmd]),
            st(&[amd, bpd]),
            st(&[apd, amd]),
            st(&[bpd, bmd]),
            st(&[apd, amd, bpd, bmd]),
        ];
        M::from_columns(&cols)
    }

    pub const OFFSETS: [usize; 4] = [0, 2, 6, 10];

    pub fn project(op: &M) -> (M, [M; 4]) {
        let u = basis();
        let full = u.adjoint() * op * &u;
        let blocks = [0, 1, 2, 3].map(|k| {
            let (o, n) = (OFFSETS[k], Block::ALL[k].dim());
            full.view((o, o), (n, n)).into_owned()
        });
        (full, blocks)
    }
}

fn max_diff(a: &M, b: &M) -> f64 {
    (a - b).iter().fold(0.0, |m, z| m.max(z.norm()))
}

fn hermitian_error(a: &M) -> f64 {
    max_diff(a, &a.adjoint())
}

#[test]
fn hamiltonian_blocks_match_fock_projection() {
    for (p, phi) in [(params(0.8, 0.5, 0.3, 0.2), 0.7), (params(0.6, 1.3, -0.4, 0.9), 1.3), (params(1.0, 0.0, 1.0, 0.0), 0.1)] {
        let set = build_blocks(&p, phi).unwrap();
        let (full, blocks) = fock::project(&fock::hamiltonian(&p, phi));
        let mut assembled = M::zeros(16, 16);
        for k in 0..4 {
            let (o, n) = (fock::OFFSETS[k], Block::ALL[k].dim());
            assembled.view_mut((o, o), (n, n)).copy_from(&set.hamiltonian[k]);
            assert!(max_diff(&blocks[k], &set.hamiltonian[k]) < 1e-13, "block {k}");
        }
        assert!(max_diff(&full, &assembled) < 1e-13, "off-block leakage");
    }
}

#[test]
fn operator_blocks_match_real_space_definitions() {
    for phi in [0.2, 0.7, 1.4, FRAC_PI_2] {
        let p = params(0.8, 0.5, 0.3, 0.2);
        let set = build_blocks(&p, phi).unwrap();
        let ops = fock::observables(phi);
        for (o, op) in ops.iter().enumerate() {
            let (_, blocks) = fock::project(op);
            for k in 0..4 {
                assert!(
                    max_diff(&blocks[k], &set.operators[o][k]) < 1e-13,
                    "{:?} block {:?} at phi={phi}\nfock {}\ntable {}",
                    Observable::ALL[o],
                    Block::ALL[k],
                    blocks[k],
                    set.operators[o][k]
                );
            }
        }
    }
}

#[test]
fn block_invariants() {
    let set = build_blocks(&params(0.8, 0.7, -0.2, 1.1), 0.9).unwrap();
    assert!(set.hamiltonian[0].iter().all(|z| z.norm() == 0.0));
    let mut trace = Complex::new(0.0, 0.0);
    for h in &set.hamiltonian {
        assert!(hermitian_error(h) < 1e-13);
        trace += h.trace();
    }
    assert!(trace.norm() < 1e-13);
    for ops in &set.operators {
        for b in ops {
            assert!(hermitian_error(b) < 1e-13);
        }
    }
    assert!(build_blocks(&params(0.8, 0.0, 0.0, 0.0), 0.0).is_err());
    assert!(build_blocks(&params(0.8, 0.0, 0.0, 0.0), 1.6).is_err());
}

#[test]
fn forward_block_at_quarter_turn() {
    let set = build_blocks(&params(0.8, 0.0, 0.0, 0.0), FRAC_PI_2).unwrap();
    let h = &set.hamiltonian[1];
    for i in 0..4 {
        assert!(h[(i, i)].norm() < 1e-15);
    }
    assert!(h[(0, 1)].norm() < 1e-15);
    assert!((h[(0, 2)] - Complex::new(0.0, -0.8)).norm() < 1e-15);
    let mut ev: Vec<f64> = h.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for (v, e) in ev.iter().zip([-0.8, -0.8, 0.8, 0.8]) {
        assert!((v - e).abs() < 1e-14);
    }
}

fn sorted_eigs(m: &M) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn block_spectrum_equals_fock_spectrum(
        g in 0.05f64..1.0, d in 0.0f64..2.0, l1 in -2.0f64..2.0, l2 in -2.0f64..2.0, phi in 0.01f64..FRAC_PI_2,
    ) {
        let p = params(g, d, l1, l2);
        let set = build_blocks(&p, phi).unwrap();
        let mut blocks: Vec<f64> = set.hamiltonian.iter().flat_map(sorted_eigs).collect();
        blocks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let fock = sorted_eigs(&fock::hamiltonian(&p, phi));
        for (a, b) in blocks.iter().zip(fock.iter()) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn nambu_particle_hole_symmetry(
        g in 0.05f64..1.0, d in 0.0f64..2.0, l1 in -2.0f64..2.0, l2 in -2.0f64..2.0, phi in 0.0f64..FRAC_PI_2,
    ) {
        let p = params(g, d, l1, l2);
        let plus = bdg_bands(&p, phi);
        let minus = bdg_bands(&p, -phi);
        for k in 0..4 {
            prop_assert!((plus[k] + minus[3 - k]).abs() < 1e-12);
        }
    }

    #[test]
    fn real_gauge_preserves_nambu_spectrum(
        g in 0.05f64..1.0, d in 0.0f64..2.0, l1 in -2.0f64..2.0, l2 in -2.0f64..2.0, phi in -FRAC_PI_2..FRAC_PI_2,
    ) {
        let p = params(g, d, l1, l2);
        let m = bdg_matrix(&p, phi);
        let dm = M::from_iterator(4, 4, m.iter().copied());
        let direct = sorted_eigs(&dm);
        let bands = bdg_bands(&p, phi);
        for k in 0..4 {
            prop_assert!((direct[k] - bands[k]).abs() < 1e-12);
        }
    }
}

#[test]
fn band_edges_have_closed_forms() {
    let p = params(0.8, 0.5, 0.7, 0.4);
    let b = bdg_bands(&p, 0.0);
    let r = (1.0f64 + 0.16).sqrt();
    let mut expect = [0.7 + r, 0.7 - r, -0.7 + r, -0.7 - r];
    expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for k in 0..4 {
        assert!((b[k] - expect[k]).abs() < 1e-12);
    }
    let b = bdg_bands(&p, FRAC_PI_2);
    let (u, v) = ((0.49f64 + 0.64).sqrt(), (0.16f64 + 0.25).sqrt());
    let mut expect = [u + v, u - v, -u + v, -u - v];
    expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for k in 0..4 {
        assert!((b[k] - expect[k]).abs() < 1e-12);
    }
}

#[test]
fn uniform_bands_reduce_to_dispersion() {
    use crate::uniform::quasi_energy;
    for (g, d, h, phi) in [(0.8, 0.0, 0.0, FRAC_PI_4), (0.8, 0.3, 0.4, 0.7), (0.5, 1.2, -0.3, 1.1)] {
        let p = params(g, d, h, 0.0);
        let b = bdg_bands(&p, phi);
        let s = phi.sin();
        let (l, lr) = (quasi_energy(g, h, phi), quasi_energy(g, h, PI - phi));
        let mut expect = [d * s + l, d * s - l, lr - d * s, -lr - d * s];
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for k in 0..4 {
            assert!((b[k] - expect[k]).abs() < 1e-12, "{b:?} vs {expect:?}");
        }
    }
}

#[test]
fn gap_on_critical_lines() {
    let l2: f64 = 0.5;
    assert!(min_gap(&params(0.8, 0.5, (1.0 + l2 * l2).sqrt(), l2), GAP_GRID) < 1e-6);
    assert!(min_gap(&params(0.8, 0.5, 0.0, 0.39f64.sqrt()), GAP_GRID) < 1e-6);
    assert!(min_gap(&params(0.8, 0.0, 1.0, 0.0), GAP_GRID) < 1e-6);
}

#[test]
fn gapless_chiral_region() {
    // between λ1 = λ2 and λ1² = 1 + λ2² + d² - γ²
    assert!(min_gap(&params(0.8, 1.0, 0.6, 0.3), GAP_GRID) < 1e-6);
    assert!(min_gap(&params(0.8, 1.2, 0.5, 0.2), GAP_GRID) < 1e-6);
    // mirrored point λ1 < λ2 is gapped
    assert!(min_gap(&params(0.8, 1.0, 0.3, 0.6), GAP_GRID) > 1e-3);
}

#[test]
fn deep_afm_is_gapped() {
    let p = params(0.8, 0.5, 0.2, 0.2);
    let g = min_gap(&p, GAP_GRID);
    // dense oracle
    let n = 200_000;
    let dense = (0..=n)
        .map(|i| -FRAC_PI_2 + PI * i as f64 / n as f64)
        .map(|phi| bdg_bands(&p, phi).iter().fold(f64::MAX, |m, x| m.min(x.abs())))
        .fold(f64::MAX, f64::min);
    assert!(g > 0.1);
    assert!((g - dense).abs() < 1e-8);
}

#[test]
fn gap_restricted_to_edges_matches_closed_forms() {
    let p = params(0.8, 0.3, 0.9, 0.6);
    let at = |phi: f64| bdg_bands(&p, phi).iter().fold(f64::MAX, |m, x| m.min(x.abs()));
    let r = (1.0f64 + 0.36).sqrt();
    assert!((at(0.0) - (0.9 - r).abs().min(0.9 + r)).abs() < 1e-10);
    let (u, v) = ((0.81f64 + 0.64).sqrt(), (0.36f64 + 0.09).sqrt());
    assert!((at(FRAC_PI_2) - (u - v).abs()).abs() < 1e-10);
}

fn q() -> QuadratureSpec<f64> {
    QuadratureSpec::default()
}

#[test]
fn uniform_limit_matches_closed_forms() {
    use crate::uniform::{thermal_correlators_uniform, zero_t_correlators_uniform};
    for d in [0.0, 0.5, 1.0] {
        let p = params(0.8, d, 0.4, 0.0).with_beta(Beta::Finite(2.0));
        let a = thermal_correlators_alt(&p, &q()).unwrap();
        let b = thermal_correlators_uniform(&p, &q()).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-7, "d={d}: {a:?} vs {b:?}");
        assert!((a.mz_even - a.mz_odd).abs() < 1e-10);
    }
    for (d, h) in [(0.5, 0.3), (1.0, 0.0), (1.0, 0.6), (1.3, -0.4)] {
        let p = params(0.8, d, h, 0.0);
        let a = thermal_correlators_alt(&p, &q()).unwrap();
        let b = zero_t_correlators_uniform(&p, &q()).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-8, "d={d}, h={h}: {a:?} vs {b:?}");
    }
}

#[test]
fn infinite_temperature_vanishes() {
    let p = params(0.8, 0.7, 0.4, 0.9).with_beta(Beta::Finite(0.0));
    let cs = thermal_correlators_alt(&p, &q()).unwrap();
    for v in cs.to_array() {
        assert!(v.abs() < 1e-12);
    }
}

#[test]
fn ground_switches_only_with_strong_dm() {
    assert!(ground_switch_points(&params(0.8, 0.5, 0.3, 0.2), 256).is_empty());
    assert!(!ground_switch_points(&params(0.8, 1.2, 0.5, 0.2), 256).is_empty());
}
