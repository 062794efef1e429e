use std::f64::consts::PI;

use gpregime::numerics::{decade_grid, fit_slope};
use gpregime::potentials::{make_square_well, InteractionPotential};
use gpregime::scattering::*;
use proptest::prelude::*;

fn well() -> InteractionPotential {
    make_square_well(2.0, 1.0, 256).unwrap()
}

fn a0_exact() -> f64 {
    1.0 - 1f64.tanh()
}

#[test]
fn scattering_length_oracle() {
    let s = solve_zero_energy(&well(), 20.0, 1024).unwrap();
    assert!(((s.a0 - a0_exact()) / a0_exact()).abs() < 1e-6);
    assert!(((8.0 * PI * s.a0 - s.integral_vf) / (8.0 * PI * s.a0)).abs() < 1e-6);
}

#[test]
fn refinement_cauchy() {
    let a = solve_zero_energy(&well(), 20.0, 1024).unwrap();
    let b = solve_zero_energy(&well(), 20.0, 2048).unwrap();
    assert!(((a.a0 - b.a0) / b.a0).abs() < 1e-6);
    let la = solve_neumann(&well(), 0.5, 200.0, 1024).unwrap();
    let lb = solve_neumann(&well(), 0.5, 200.0, 2048).unwrap();
    assert!(((la.lambda_ell - lb.lambda_ell) / lb.lambda_ell).abs() < 1e-6);
}

#[test]
fn lemma_items_over_sweep() {
    let z = solve_zero_energy(&well(), 20.0, 1024).unwrap();
    let reports: Vec<LemmaReport> = [25.0, 50.0, 100.0, 200.0, 400.0]
        .iter()
        .map(|&big_l| {
            verify_lemma_scattering(&solve_neumann(&well(), 0.5, 2.0 * big_l, 1024).unwrap(), &z)
        })
        .collect();
    let pts: Vec<(f64, f64)> = reports
        .iter()
        .map(|r| (r.radius, r.i_deviation.abs()))
        .collect();
    let fit = fit_slope(&pts, -1.0, 0.15).unwrap();
    assert!(fit.pass, "slope {}", fit.slope);
    let ii: Vec<f64> = reports.iter().map(|r| r.ii_scaled).collect();
    let ratio =
        ii.iter().cloned().fold(0.0, f64::max) / ii.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(ratio < 3.0, "{ii:?}");
    for r in &reports {
        assert!(r.iii_volume_scaled <= 5.0, "{r:?}");
        assert!(r.iii_w_decay.is_finite() && r.iii_dw_decay.is_finite());
    }
}

#[test]
fn w_hat_refinement_stable() {
    let s = solve_neumann(&well(), 0.5, 200.0, 1024).unwrap();
    let coarse = fourier_w(&s, &decade_grid(1e-3, 100.0, 20)).unwrap();
    let fine = fourier_w(&s, &decade_grid(1e-3, 100.0, 80)).unwrap();
    assert!((coarse.sup_p2 - fine.sup_p2).abs() <= 0.1 * fine.sup_p2);
    assert!((s.w_hat(0.0) - s.integral_w()).abs() <= 1e-8 * s.integral_w());
}

#[test]
fn zero_potential_is_vacuous() {
    let v = make_square_well(0.0, 1.0, 64).unwrap();
    let z = solve_zero_energy(&v, 20.0, 512).unwrap();
    let s = solve_neumann(&v, 0.5, 200.0, 512).unwrap();
    let rep = verify_lemma_scattering(&s, &z);
    assert!(rep.vacuous);
    assert!(fourier_w(&s, &decade_grid(0.01, 10.0, 5))
        .unwrap()
        .values
        .iter()
        .all(|&x| x == 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn lambda_decreases_with_radius(big_l in 5.0f64..300.0, factor in 1.05f64..3.0, v0 in 0.5f64..10.0) {
        let v = make_square_well(v0, 1.0, 128).unwrap();
        let a = solve_neumann(&v, 0.5, 2.0 * big_l, 512).unwrap();
        let b = solve_neumann(&v, 0.5, 2.0 * big_l * factor, 512).unwrap();
        prop_assert!(b.lambda_ell < a.lambda_ell);
        prop_assert!(a.f_ell.samples().iter().all(|&x| (0.0..=1.0).contains(&x)));
        prop_assert!(a.w_ell.samples().iter().all(|&x| (0.0..=1.0).contains(&x)));
    }
}
