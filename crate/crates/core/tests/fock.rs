use std::sync::Arc;

use gpregime::fock::*;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn space(m: usize, n: usize) -> Arc<FockSpace> {
    Arc::new(FockSpace::new(m, n).unwrap())
}

fn eta_with_norm(m: usize, seed: u64, norm: f64) -> DMatrix<f64> {
    CoefficientSet::random(m, seed, norm, 0.0).eta
}

#[test]
fn basis_enumeration() {
    for (m, n) in [(1, 1), (2, 3), (3, 4), (4, 6)] {
        let s = FockSpace::new(m, n).unwrap();
        assert_eq!(s.dim(), binomial(m + n, m));
        for i in 0..s.dim() {
            assert_eq!(s.index_of(s.state(i)), Some(i));
        }
    }
    assert!(matches!(
        FockSpace::new(6, 20),
        Err(gpregime::Error::ResourceLimit(_))
    ));
}

#[test]
fn vacuum_and_cap() {
    let s = space(2, 3);
    let l = build_ladder::<Complex64>(&s, 0).unwrap();
    assert_eq!(l.a.mul(&l.a_dag).get(0, 0), Complex64::new(1.0, 0.0));
    for c in s.sector(3) {
        for r in 0..s.dim() {
            assert_eq!(l.b_dag.get(r, c), Complex64::new(0.0, 0.0));
        }
    }
    assert!(build_ladder::<Complex64>(&s, 2).is_err());
}

#[test]
fn exact_identities_are_exact() {
    for (m, n) in [(1, 1), (2, 3), (3, 3), (2, 5)] {
        let s = space(m, n);
        assert!(s.dim() <= 200);
        let mut rep = verify_ccr::<Surd>(&s);
        rep.merge(&verify_b_commutators::<Surd>(&s));
        rep.merge(&verify_un::<Surd>(&s, 0).unwrap());
        for (k, v) in &rep.deviations {
            assert_eq!(*v, 0.0, "{k} at ({m},{n})");
        }
    }
}

#[test]
fn float_identities_within_tolerance() {
    for (m, n) in [(2, 3), (3, 4), (4, 4)] {
        let s = space(m, n);
        let mut rep = verify_ccr::<Complex64>(&s);
        rep.merge(&verify_b_commutators::<Complex64>(&s));
        rep.merge(&verify_un::<Complex64>(&s, 0).unwrap());
        rep.merge(&verify_contracted(&s, 11, 5));
        assert!(rep.max() <= 1e-12, "{rep:?}");
    }
}

#[test]
fn energy_identity() {
    for (m, n) in [(2, 3), (3, 3), (3, 4)] {
        let coeff = CoefficientSet::random(m, 5, 0.3, 0.3);
        let rep = verify_energy_identity(&coeff, &space(m, n), 20, 9).unwrap();
        assert!(rep.max_energy_deviation <= 1e-10, "{rep:?}");
        assert!(rep.operator_deviation <= 1e-10, "{rep:?}");
        assert!(rep.vacuum_deviation <= 1e-10, "{rep:?}");
    }
}

#[test]
fn free_case_is_exact() {
    let mut coeff = CoefficientSet::random(3, 2, 0.0, 0.0);
    coeff
        .v
        .iter_mut()
        .for_each(|z| *z = Complex64::new(0.0, 0.0));
    coeff.h = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(2.5, 0.0),
    ]));
    let rep = verify_energy_identity(&coeff, &space(3, 3), 5, 1).unwrap();
    assert!(rep.operator_deviation <= 1e-14);
}

#[test]
fn symmetry_violation_is_rejected() {
    let mut coeff = CoefficientSet::random(2, 3, 0.1, 0.1);
    coeff.v[1] += Complex64::new(1e-3, 0.0);
    assert!(matches!(
        build_ln(&coeff, &space(2, 2)),
        Err(gpregime::Error::InvalidCoefficients(_))
    ));
}

#[test]
fn parts_have_expected_degrees() {
    let coeff = CoefficientSet::random(3, 4, 0.0, 0.0);
    let s = space(3, 4);
    let parts = build_ln(&coeff, &s).unwrap();
    // L⁰ and L² conserve 𝒩 on the excitations when restricted by Γ(q)
    let q = gamma_q::<Complex64>(&s, 0);
    let l0 = q.mul(&parts[0]).mul(&q);
    assert_eq!(l0.number_offset(), Some(0));
    for p in &parts {
        assert!(p.hermiticity_defect() <= 1e-12);
    }
}

#[test]
fn gp_form_linear_term() {
    let (coeff, residual) = CoefficientSet::gp_solved(3, 8, 0.2).unwrap();
    assert!(residual <= 1e-12, "{residual}");
    coeff.validate().unwrap();
    let s = space(3, 4);
    let parts = build_ln(&coeff, &s).unwrap();
    let gp = gp_form_linear(&coeff, &s, 0.2, &parts[1]);
    assert!(deviation(&gp, &parts[1]) <= 1e-11);
}

#[test]
fn b_generator_properties() {
    let s = space(2, 4);
    let eta = eta_with_norm(2, 3, 0.2);
    let b = build_b(&eta, &s).unwrap();
    assert_eq!(b.add(&b.adjoint()).max_abs(), 0.0);
    let coeff = CoefficientSet::random(2, 3, 0.2, 0.0);
    let rep = conjugation_report(&b, &build_hn(&coeff, &s).unwrap()).unwrap();
    assert!(rep.unitarity_defect <= 1e-12, "{rep:?}");
    assert!(rep.spectrum_shift <= 1e-10, "{rep:?}");
    let zero = build_b(&DMatrix::zeros(2, 2), &s).unwrap();
    assert_eq!(
        exp_generator(&zero).unwrap(),
        DMatrix::identity(s.dim(), s.dim())
    );
}

#[test]
fn a_generator_properties() {
    let s = space(3, 4);
    let coeff = CoefficientSet::random(3, 6, 0.0, 0.3);
    let a = build_a(&coeff.nu, &coeff.g, &s).unwrap();
    assert_eq!(a.add(&a.adjoint()).max_abs(), 0.0);
    let e = exp_generator(&a).unwrap();
    assert!(unitarity_defect(&e) <= 1e-12);
    let zero = build_a(&DMatrix::zeros(3, 3), &coeff.g, &s).unwrap();
    assert_eq!(zero.nnz(), 0);
}

#[test]
fn growth_tables() {
    let caps = [2, 3, 4, 5, 6];
    let eta = eta_with_norm(3, 1, 0.3);
    let tb = verify_b_number_growth(&eta, &caps, &[-1, 1, 2], 10.0).unwrap();
    println!("{:?}", tb.sup_by_power);
    for e in &tb.entries {
        println!("B N={} n={} r={:.6}", e.n_cap, e.power, e.ratio);
    }
    assert!(tb.bounded);
    let z = verify_b_number_growth(&DMatrix::zeros(3, 3), &caps, &[-2, -1, 1, 2], 10.0).unwrap();
    assert!(z.entries.iter().all(|e| e.ratio == 1.0));
    let coeff = CoefficientSet::random(3, 2, 0.0, 0.3);
    let ta = verify_a_number_growth(
        &coeff.nu,
        &coeff.g,
        &caps,
        &[1, 2],
        &[-1.0, -0.5, 0.0, 0.5, 1.0],
        10.0,
    )
    .unwrap();
    for e in ta.entries.iter().filter(|e| e.t == 1.0) {
        println!("A N={} k={} r={:.6}", e.n_cap, e.power, e.ratio);
    }
    assert!(ta.bounded);
    assert!(ta
        .entries
        .iter()
        .filter(|e| e.t == 0.0)
        .all(|e| e.ratio == 1.0));
    assert!(verify_b_number_growth(&eta, &caps, &[3], 10.0).is_err());
}

#[test]
fn d_eta_scaling() {
    let caps = [2, 3, 4, 5, 6];
    let eta = eta_with_norm(3, 1, 0.2);
    let t = d_eta_sweep(&eta, &caps, 1, 10.0).unwrap();
    for e in &t.entries {
        println!(
            "d N={} r={:.3e} rN={:.4}",
            e.n_cap, e.ratio, e.ratio_times_n
        );
    }
    assert!(t.bounded);
    let z = d_eta_sweep(&DMatrix::zeros(3, 3), &caps, 1, 10.0).unwrap();
    assert!(z.entries.iter().all(|e| e.ratio == 0.0));
    let s = space(3, 4);
    let d = compute_d_eta(&top_singular_vector(&eta), &DMatrix::zeros(3, 3), &s).unwrap();
    assert!(d.iter().all(|z| *z == Complex64::new(0.0, 0.0)));
}

#[test]
fn bch_remainder_is_third_order() {
    let eta = eta_with_norm(3, 4, 1.0);
    let rep = bch_check(&eta, &space(3, 4), 0.1).unwrap();
    println!("{rep:?}");
    assert!((rep.order - 3.0).abs() < 0.3, "{rep:?}");
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn growth_monotone_in_generator_norm(seed in 0u64..1000, power in prop::sample::select(vec![-1i32, 1, 2])) {
        let s = space(2, 4);
        let eta = eta_with_norm(2, seed, 1.0);
        let mut last = 0.0;
        for k in 0..=6 {
            let scaled = &eta * (0.1 * k as f64);
            let r = growth_ratio(&exp_generator(&build_b(&scaled, &s).unwrap()).unwrap(), &s, power);
            prop_assert!(r >= last - 1e-12, "ratio {} < {} at step {}", r, last, k);
            last = r;
        }
    }

    #[test]
    fn a_growth_monotone_in_t(seed in 0u64..1000) {
        let s = space(3, 3);
        let coeff = CoefficientSet::random(3, seed, 0.0, 0.5);
        let a = build_a(&coeff.nu, &coeff.g, &s).unwrap();
        let mut last = 0.0;
        for k in 0..=5 {
            let e = exp_generator(&a.scale(&Complex64::new(0.2 * k as f64, 0.0))).unwrap();
            let r = growth_ratio(&e, &s, 1);
            prop_assert!(r >= last - 1e-12);
            last = r;
        }
    }

    #[test]
    fn random_tensors_validate(seed in 0u64..10_000, m in 1usize..4) {
        prop_assert!(CoefficientSet::random(m, seed, 0.2, 0.2).validate().is_ok());
    }
}
