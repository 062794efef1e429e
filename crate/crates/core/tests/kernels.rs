use std::f64::consts::PI;
use std::sync::OnceLock;

use gpregime::gp::{minimize_gp, GpGrid, GpState};
use gpregime::kernels::*;
use gpregime::potentials::{make_square_well, make_trap, InteractionPotential, TrapKind};
use gpregime::scattering::{solve_neumann, NeumannSolution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn well() -> InteractionPotential {
    make_square_well(2.0, 1.0, 2048).unwrap()
}

fn zero() -> InteractionPotential {
    make_square_well(0.0, 1.0, 2048).unwrap()
}

fn state() -> &'static GpState {
    static S: OnceLock<GpState> = OnceLock::new();
    S.get_or_init(|| {
        let trap = make_trap(TrapKind::Harmonic, 128, 10.0).unwrap();
        minimize_gp(&trap, 1.0 - 1f64.tanh(), GpGrid::default(), 1e-9).unwrap()
    })
}

fn reference() -> NeumannSolution {
    solve_neumann(&well(), 0.5, 200.0, 1024).unwrap()
}

fn cut() -> CutoffPair {
    CutoffPair::new(0.5, 4.0, 2.0).unwrap()
}

#[test]
fn zero_potential_gives_zero_kernels() {
    let sol = solve_neumann(&zero(), 0.5, 200.0, 1024).unwrap();
    let g = build_g(&sol);
    assert!(g.is_zero());
    assert_eq!(g.hat(3.0), 0.0);
    assert_eq!(g.value(0.001), 0.0);
    let eta = build_eta_h(&g, state(), cut());
    let r = eta_norms(&eta).unwrap();
    assert_eq!(
        (r.eta, r.grad, r.sup_row_over_phi, r.pointwise),
        (0.0, 0.0, 0.0, 0.0)
    );
    let nu = nu_norms(&build_nu_h(&g, state(), cut())).unwrap();
    assert_eq!((nu.nu, nu.sup_x, nu.sup_y_over_phi), (0.0, 0.0, 0.0));
    let hk = hyperbolic(&eta, 1e-14).unwrap();
    let h = hyperbolic_norms(&hk);
    assert_eq!(
        (h.p_bound, h.r_bound, h.p_phase, h.r_phase),
        (0.0, 0.0, 0.0, 0.0)
    );
    assert_eq!(cross_gradient_hs(&eta).unwrap().value, 0.0);
    let pb = eta_power_bound(&eta, 2, LatticeSpec::for_cutoff(16, eta.threshold()), 20, 1).unwrap();
    assert_eq!(pb.max_lhs, 0.0);
    assert!(pb.holds);
    let hn = build_hn(&sol, state());
    assert!(hn.values.iter().all(|&v| v == 0.0));
}

#[test]
fn g_transform_at_zero_is_the_volume() {
    let sol = reference();
    let g = build_g(&sol);
    let n = sol.n_param;
    let direct = -sol.w_hat_direct(0.0) / (n * n);
    assert!(
        (g.hat(0.0) / direct - 1.0).abs() < 1e-6,
        "{} {}",
        g.hat(0.0),
        direct
    );
    // G is supported in the ball of radius ℓ
    assert_eq!(g.value(0.5001), 0.0);
    assert!(g.value(0.4) < 0.0);
}

#[test]
fn g_decay_constant_is_refinement_stable() {
    let coarse = build_g(&solve_neumann(&well(), 0.5, 200.0, 512).unwrap()).sup_p2;
    let fine = build_g(&solve_neumann(&well(), 0.5, 200.0, 2048).unwrap()).sup_p2;
    assert!(fine.is_finite() && fine > 0.0);
    assert!((coarse / fine - 1.0).abs() < 0.1, "{coarse} {fine}");
}

#[test]
fn unit_cutoff_removes_low_momenta() {
    let g = build_g(&reference());
    let c = CutoffPair {
        ell: 0.5,
        alpha: 0.0,
        beta: 0.0,
    };
    let k = build_eta_h(&g, state(), c);
    assert_eq!(k.threshold(), 1.0);
    for p in [0.0, 0.3, 0.999] {
        assert_eq!(k.hat(p), 0.0);
    }
    assert_eq!(k.hat(1.0), g.hat(1.0));
}

#[test]
fn cutoff_partition() {
    let c = cut();
    let g = build_g(&reference());
    for i in 0..200 {
        let p = i as f64 * 0.17;
        assert_eq!(c.chi_h(p) + c.chi_hc(p), 1.0);
        assert_eq!(g.hat(p) * c.chi_h(p) * g.hat(p) * c.chi_hc(p), 0.0);
    }
}

#[test]
fn factorization_matches_direct_convolution() {
    let eta = build_eta_h(&build_g(&reference()), state(), cut());
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..5 {
        let x = random_point(&mut rng, 0.25 * i as f64);
        let y = random_point(&mut rng, 0.15);
        let (a, b) = (eta.value(x, y), eta.value_direct(x, y));
        assert!((a - b).abs() <= 0.01 * b.abs(), "{a} {b}");
    }
}

#[test]
fn plancherel_for_the_high_pass_factor() {
    let g = build_g(&reference());
    let c = CutoffPair {
        ell: 0.5,
        alpha: 1.0,
        beta: 0.5,
    };
    let k = build_nu_h(&g, state(), c);
    let (m, p) = (radial_l2_momentum(&k), radial_l2_position(&k));
    assert!((m / p - 1.0).abs() < 1e-4, "{m} {p}");
}

#[test]
fn nu_slice_is_a_shifted_phi_hat() {
    let k = build_nu_h(&build_g(&reference()), state(), cut());
    let r = nu_norms(&k).unwrap();
    assert!((r.phi_hat_norm - 1.0).abs() < 1e-6);
    for p in [20.0, 100.0, 1000.0] {
        let s = slice_norm(&k, p, r.phi_hat_norm);
        assert!((s / k.hat(p).abs() - 1.0).abs() < 1e-6);
    }
    assert_eq!(slice_norm(&k, 10.0, r.phi_hat_norm), 0.0);
    assert!((r.nu - r.sup_y_over_phi).abs() < 1e-6 * r.nu);
}

#[test]
fn lowpass_closed_form() {
    let g = build_gaussian_lowpass(0.5, 2.0).unwrap();
    let closed = PI.powf(1.5) * (2.0 * PI).powf(-0.75) * 0.5f64.powf(-3.0);
    assert!((g.l2_norm / closed - 1.0).abs() < 1e-10);
    assert!((g.l1_norm - 1.0).abs() < 1e-8);
    assert!(build_gaussian_lowpass(0.5, 0.0).is_err());
}

#[test]
fn power_bound_holds_on_the_lattice() {
    let eta = build_eta_h(&build_g(&reference()), state(), cut());
    let spec = LatticeSpec::for_cutoff(32, eta.threshold());
    for n in [2, 3] {
        let r = eta_power_bound(&eta, n, spec, 100, 3).unwrap();
        assert!(r.resolved);
        assert_eq!(r.samples, 100);
        assert!(r.holds && r.max_ratio <= 1.0, "{r:?}");
        assert!(r.max_lhs > 0.0);
    }
    let big = LatticeSpec {
        n_side: 64,
        half_width: 1.0,
    };
    assert!(matches!(
        eta_power_bound(&eta, 2, big, 10, 3),
        Err(gpregime::Error::ResourceLimit(_))
    ));
}

#[test]
fn lattice_fft_round_trip() {
    let f = Fft3::new(8);
    let data: Vec<num_complex::Complex64> = (0..512)
        .map(|i| num_complex::Complex64::new((i as f64 * 0.37).sin(), 0.0))
        .collect();
    let mut d = data.clone();
    f.run(&mut d, false);
    f.run(&mut d, true);
    for (a, b) in d.iter().zip(&data) {
        assert!((a / 512.0 - b).norm() < 1e-13);
    }
}

#[test]
fn hyperbolic_remainders_are_small_and_certified() {
    let eta = build_eta_h(&build_g(&reference()), state(), cut());
    let hk = hyperbolic(&eta, 1e-14).unwrap();
    assert!(hk.tail_bound < 1e-14);
    let h = hyperbolic_norms(&hk);
    assert!(h.p_phase <= h.p_bound && h.r_phase <= h.r_bound, "{h:?}");
    let lat =
        lattice_hyperbolic(&hk, LatticeSpec::for_cutoff(32, eta.threshold()), 100, 5).unwrap();
    assert!(lat.certified_holds);
    assert!(lat.p_ratio <= h.p_pointwise_bound, "{lat:?} {h:?}");
}

#[test]
fn cross_gradient_is_refinement_stable() {
    let eta = build_eta_h(&build_g(&reference()), state(), cut());
    let c = cross_gradient_hs(&eta).unwrap();
    assert!(c.value.is_finite() && c.value > 0.0);
    assert!(c.refinement_change < 0.2);
    assert!(c.value <= c.bound);
}

#[test]
fn hn_limit_and_young() {
    let mut last = f64::INFINITY;
    for nl in [50.0, 100.0, 200.0] {
        let sol = solve_neumann(&well(), 0.5, nl / 0.5, 1024).unwrap();
        let h = build_hn(&sol, state());
        assert!(h.young_holds, "{} {}", h.sup, h.young_bound);
        assert!(h.limit_distance < last);
        last = h.limit_distance;
        assert!((h.integral_vw - (sol_integral_v() - sol.integral_vf())).abs() < 1e-6);
    }
}

fn sol_integral_v() -> f64 {
    4.0 * PI / 3.0 * 2.0
}

#[test]
fn eta_pointwise_and_row_bounds_are_consistent() {
    let eta = build_eta_h(&build_g(&reference()), state(), cut());
    let r = eta_norms(&eta).unwrap();
    // ‖η‖² = ∫ρ(x)(g²∗ρ)(x) ≤ sup(g²∗ρ)·‖φ‖²
    assert!(r.eta <= r.sup_row_over_phi * (1.0 + 1e-9));
    assert!(r.grad_terms.iter().all(|t| *t >= 0.0));
    assert!(r.pointwise > 0.0 && r.pointwise.is_finite());
}
