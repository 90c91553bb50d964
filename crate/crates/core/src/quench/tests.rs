use super::*;
use crate::blocks::thermal_correlators_alt;
use crate::uniform::zero_t_correlators_uniform;
use nalgebra::{Matrix2, SymmetricEigen};
use proptest::prelude::*;
use std::f64::consts::PI;

type C64 = C<f64>;

fn params(g: f64, d: f64, l1: f64, l2: f64) -> ModelParams<f64> {
    ModelParams::new(g, d, l1, l2).unwrap()
}

fn q() -> QuadratureSpec<f64> {
    QuadratureSpec::default()
}

fn spec(p: ModelParams<f64>, t: &[f64]) -> QuenchSpec<f64> {
    QuenchSpec::with_grid(p, t.to_vec(), (t[0], t[t.len() - 1])).unwrap()
}

/// Pair sector `{|0>, c†_φ c†_-φ|0>}` of one momentum pair, evolved in the
/// Heisenberg picture by brute force. Returns `[xx, yy, xy, mz]` integrands
/// without the `cos φ/π` constant the kernels carry in `xx` and `yy`.
fn pair_sector_oracle(g: f64, l1: f64, t: f64, phi: f64) -> [f64; 4] {
    let (s, c) = phi.sin_cos();
    let i = C64::i();
    let h = |l: f64| Matrix2::new(C64::from(-l), i * g * s, -i * g * s, C64::from(l + 2.0 * c));
    let before = SymmetricEigen::new(h(l1));
    let k = if before.eigenvalues[0] < before.eigenvalues[1] { 0 } else { 1 };
    let psi = before.eigenvectors.column(k).into_owned();
    let u = (h(0.0) * C64::new(0.0, -t)).exp();
    let psi_t = u * psi;
    let ex = |o: Matrix2<C64>| (psi_t.adjoint() * o * &psi_t)[(0, 0)].re / PI;
    let z = C64::from(0.0);
    [
        ex(Matrix2::new(z, i * s, -i * s, C64::from(2.0 * c))),
        ex(Matrix2::new(z, -i * s, i * s, C64::from(2.0 * c))),
        ex(Matrix2::new(z, C64::from(-s), C64::from(-s), z)),
        ex(Matrix2::new(C64::from(-1.0), z, z, C64::from(1.0))),
    ]
}

#[test]
fn kernels_match_pair_sector_evolution() {
    let k = kernels(&params(0.8, 0.0, 0.5, 0.0), 1.0, 1.0).unwrap();
    let o = pair_sector_oracle(0.8, 0.5, 1.0, 1.0);
    let shift = 1f64.cos() / PI;
    assert!((k.k_minus + shift - o[0]).abs() < 1e-12);
    assert!((k.k_plus + shift - o[1]).abs() < 1e-12);
    assert!((k.s - o[2]).abs() < 1e-12);
    assert!((k.m - o[3]).abs() < 1e-12);
    assert!((k.s - 0.083_271_313_519_734).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernels_match_oracle_everywhere(g in 0.05f64..1.0, l1 in -2.5f64..2.5, t in 0.0f64..20.0, phi in 0.01f64..3.13) {
        let k = kernels(&params(g, 0.0, l1, 0.0), t, phi).unwrap();
        let o = pair_sector_oracle(g, l1, t, phi);
        let shift = phi.cos() / PI;
        let got = [k.k_minus + shift, k.k_plus + shift, k.s, k.m];
        for (a, b) in got.iter().zip(o) {
            prop_assert!((a - b).abs() < 1e-10, "{got:?} vs {o:?}");
        }
    }

    #[test]
    fn no_field_no_chiral_kernel(g in 0.05f64..1.0, t in 0.0f64..50.0, phi in 0.0f64..PI) {
        prop_assert_eq!(kernels(&params(g, 0.3, 0.0, 0.0), t, phi).unwrap().s, 0.0);
    }

    #[test]
    fn static_limit_of_magnetisation_kernel(g in 0.05f64..1.0, l1 in -2.0f64..2.0, phi in 0.01f64..3.13) {
        let m = kernels(&params(g, 0.0, l1, 0.0), 0.0, phi).unwrap().m;
        let integrand = -(l1 + phi.cos()) / (PI * quasi_energy(g, l1, phi));
        prop_assert!((m - integrand).abs() < 1e-12);
    }
}

#[test]
fn kernels_vanish_at_the_critical_endpoint() {
    let k = kernels(&params(0.8, 0.0, 1.0, 0.0), 3.0, PI).unwrap();
    assert!([k.k_minus, k.k_plus, k.s, k.m].iter().all(|x| x.abs() < 1e-15));
    let near = kernels(&params(0.8, 0.0, 1.0, 0.0), 3.0, PI - 1e-7).unwrap();
    assert!(near.m.abs() < 1e-6 && near.k_minus.abs() < 1e-6);
    assert!(kernels(&params(0.8, 0.0, 1.0, 0.3), 3.0, 1.0).is_err());
}

#[test]
fn uniform_trace_starts_at_statics() {
    for (d, l1) in [(0.3, 0.5), (0.0, 1.3), (1.2, 0.5), (1.0, 0.0), (1.2, -0.4)] {
        let p = params(0.8, d, l1, 0.0);
        let trace = evolve_uniform(&spec(p, &[0.0, 1.0]), &q()).unwrap();
        let statics = zero_t_correlators_uniform(&p, &q()).unwrap();
        assert!(trace.values[0].max_abs_diff(&statics) < 1e-8, "d={d} l1={l1}");
    }
}

#[test]
fn field_free_start_is_stationary() {
    let t = [0.0, 0.7, 3.1, 40.0, 250.0];
    for d in [0.5, 1.2] {
        let trace = evolve_uniform(&spec(params(0.8, d, 0.0, 0.0), &t), &q()).unwrap();
        for v in &trace.values {
            assert!(v.max_abs_diff(&trace.values[0]) < 1e-9);
        }
        let alt = evolve_alt(&spec(params(0.8, d, 0.0, 0.0), &t));
        for v in &alt.values {
            assert!(v.max_abs_diff(&alt.values[0]) < 1e-12);
        }
    }
}

#[test]
fn block_and_closed_form_evolutions_agree() {
    let t = [0.0, 0.5, 2.0, 7.3, 31.0, 120.0, 300.0];
    for (d, l1) in [(0.3, 0.5), (0.0, 1.5), (1.2, 0.5), (1.0, -0.3)] {
        let s = spec(params(0.8, d, l1, 0.0), &t);
        let a = evolve_uniform(&s, &q()).unwrap();
        let b = evolve_alt(&s);
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!(x.max_abs_diff(y) < 1e-7, "d={d} l1={l1}: {x:?} vs {y:?}");
        }
    }
}

#[test]
fn block_evolution_agrees_on_uniform_grids() {
    let grid: Vec<f64> = (0..41).map(|i| 250.0 + 0.5 * i as f64).collect();
    let s = spec(params(0.8, 1.2, 0.5, 0.0), &grid);
    let a = evolve_uniform(&s, &q()).unwrap();
    let b = evolve_alt(&s);
    for (x, y) in a.values.iter().zip(&b.values) {
        assert!(x.max_abs_diff(y) < 1e-7);
    }
}

#[test]
fn block_trace_starts_at_statics() {
    for p in [
        params(0.8, 0.5, 0.4, 0.3),
        params(0.8, 1.2, 0.5, 0.5),
        params(0.6, 0.2, 1.5, 0.7).with_beta(Beta::Finite(2.0)),
    ] {
        let trace = evolve_alt(&spec(p, &[0.0, 5.0]));
        let statics = thermal_correlators_alt(&p, &q()).unwrap();
        assert!(trace.values[0].max_abs_diff(&statics) < 1e-8, "{p:?}");
    }
}

#[test]
fn block_evolution_is_unitary() {
    let p = params(0.8, 1.2, 0.5, 0.5).with_beta(Beta::Finite(1.5));
    for phi in [0.2, 0.9, 1.4] {
        let mode = ModeQuench::new(&p, phi);
        let start = mode.state_at(0.0);
        let eig0: Vec<Vec<f64>> = start.iter().map(|r| sorted(r.clone().symmetric_eigenvalues())).collect();
        for t in [0.3, 17.0, 311.0] {
            let later = mode.state_at(t);
            for k in 0..3 {
                assert!((later[k].trace() - start[k].trace()).norm() < 1e-12);
                let eig = sorted(later[k].clone().symmetric_eigenvalues());
                for (a, b) in eig.iter().zip(&eig0[k]) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }
}

fn sorted(v: nalgebra::DVector<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = v.iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

#[test]
fn weak_dm_is_invisible_in_dynamics() {
    let t = [0.0, 1.0, 10.0, 100.0];
    let a = evolve_alt(&spec(params(0.8, 0.1, 0.6, 0.0), &t));
    let b = evolve_alt(&spec(params(0.8, 0.7, 0.6, 0.0), &t));
    for (x, y) in a.values.iter().zip(&b.values) {
        assert!(x.max_abs_diff(y) < 1e-8);
    }
    let u = evolve_uniform(&spec(params(0.8, 0.1, 0.6, 0.0), &t), &q()).unwrap();
    let v = evolve_uniform(&spec(params(0.8, 0.7, 0.6, 0.0), &t), &q()).unwrap();
    assert_eq!(u, v);
}

#[test]
fn averaging_rules() {
    let t: Vec<f64> = (0..11).map(|i| i as f64).collect();
    let flat = vec![0.37; 11];
    assert!((trapezoid_mean(&t, &flat, (2.0, 8.0)).unwrap() - 0.37).abs() < 1e-15);
    let ramp: Vec<f64> = t.clone();
    assert!((trapezoid_mean(&t, &ramp, (0.0, 10.0)).unwrap() - 5.0).abs() < 1e-14);
    assert!(matches!(trapezoid_mean(&t, &flat, (2.2, 2.8)), Err(Error::EmptyWindow { .. })));
    assert!(matches!(trapezoid_mean(&t, &flat, (5.0, 12.0)), Err(Error::EmptyWindow { .. })));
    assert!(QuenchSpec::with_grid(params(0.8, 0.0, 0.0, 0.0), vec![0.0, 1.0], (0.5, 2.0)).is_err());
    assert!(QuenchSpec::with_grid(params(0.8, 0.0, 0.0, 0.0), vec![0.0, 2.0, 1.0], (0.0, 1.0)).is_err());
}

#[test]
fn default_grids() {
    let s = QuenchSpec::new(params(0.8, 0.0, 0.5, 0.0));
    assert_eq!(s.t_grid().len(), 2001);
    assert!((s.t_grid()[2000] - 100.0 * PI).abs() < 1e-12);
    let w = QuenchSpec::window_only(params(0.8, 0.0, 0.5, 0.0));
    assert_eq!(w.t_grid().len(), 401);
    assert_eq!(w.t_grid()[0], s.t_grid()[1600]);
    assert!((w.t_grid()[0] - 80.0 * PI).abs() < 1e-12);
    assert_eq!(default_tprime_grid::<f64>().len(), 41);
}

#[test]
fn unperturbed_average_is_the_equilibrium_value() {
    for d in [0.4, 1.2] {
        let p = params(0.8, d, 0.0, 0.0);
        let spec = QuenchSpec::window_only(p);
        let avg = time_averaged_ln(&evolve(&spec, &q()).unwrap(), spec.window()).unwrap();
        let eq = equilibrium_ln(&p, &q()).unwrap();
        assert!((avg - eq).abs() < 1e-9, "d={d}: {avg} vs {eq}");
        let verdict = ergodicity_verdict(&p, &default_tprime_grid(), &q()).unwrap();
        assert!(verdict.ergodic && verdict.lhs >= verdict.rhs - 1e-12, "{verdict:?}");
    }
}

#[test]
fn dm_sustains_late_time_entanglement() {
    let late = |d: f64| {
        let spec = QuenchSpec::window_only(params(0.8, d, 0.5, 0.5));
        time_averaged_ln(&evolve(&spec, &q()).unwrap(), spec.window()).unwrap()
    };
    let (strong, none) = (late(1.2), late(0.0));
    assert!(strong > 0.0);
    assert!(strong > none, "{strong} vs {none}");
    assert!(late(0.8) > 0.0);
}
