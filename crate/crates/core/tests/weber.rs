use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use canardlab_core::twofold::{Branch, CaseClass};
use canardlab_core::weber::{
    hermite_he, variational_transversality, variational_transversality_with_f, weber_analysis,
    GrowthClass, Transversality, DEFAULT_WRONSKIAN_TOL,
};
use canardlab_core::{case_classify, phi_cubic, TwoFoldNormalForm};

fn family(xi: f64) -> TwoFoldNormalForm {
    TwoFoldNormalForm::with_eigen_ratio(1.0, -1.0, 2.5, xi).unwrap()
}

#[test]
fn hermite_solves_weber_equation() {
    for n in 2..=8u32 {
        for x in [-3.1, -0.7, 0.0, 0.4, 2.9] {
            let nf = f64::from(n);
            let v = hermite_he(n, x);
            let dv = nf * hermite_he(n - 1, x);
            let ddv = nf * (nf - 1.0) * hermite_he(n - 2, x);
            assert!((ddv - x * dv + nf * v).abs() < 1e-9 * (1.0 + v.abs()), "n = {n}");
        }
    }
}

#[test]
fn hermite_explicit_forms() {
    let x: f64 = 1.3;
    let x2 = x * x;
    assert!((hermite_he(4, x) - (x2 * x2 - 6.0 * x2 + 3.0)).abs() < 1e-12);
    assert!((hermite_he(5, x) - x * (x2 * x2 - 10.0 * x2 + 15.0)).abs() < 1e-12);
    let h6 = x2 * x2 * x2 - 15.0 * x2 * x2 + 45.0 * x2 - 15.0;
    assert!((hermite_he(6, x) - h6).abs() < 1e-12);
}

#[test]
fn integer_ratios_give_polynomials_with_n_zeros() {
    for n in 1..=6u32 {
        let s = weber_analysis(f64::from(n));
        assert!(s.polynomial);
        assert_eq!(s.zero_count, n);
        assert_eq!(s.growth_class, GrowthClass::AlgebraicBoth);
    }
}

#[test]
fn non_integer_ratios_grow_in_forward_time() {
    for xi in [1.3f64, 2.5, 3.5, 4.7, 6.2] {
        let s = weber_analysis(xi);
        assert!(!s.polynomial);
        assert_eq!(s.growth_class, GrowthClass::ExponentialFuture);
        assert_eq!(s.zero_count, xi.floor() as u32 + 1, "xi = {xi}");
    }
}

#[test]
fn tangency_exactly_at_integer_ratios() {
    let phi = phi_cubic();
    for n in 2..=7u32 {
        let t = variational_transversality(&family(f64::from(n)), &phi, Branch::Plus, DEFAULT_WRONSKIAN_TOL).unwrap();
        assert_eq!(t, Transversality::Tangent, "xi = {n}");
        assert!(weber_analysis(f64::from(n)).polynomial);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let xi: f64 = rng.gen_range(1.0..8.0);
        if (xi - xi.round()).abs() < 1e-3 || xi <= 1.0 {
            continue;
        }
        let t = variational_transversality(&family(xi), &phi, Branch::Plus, DEFAULT_WRONSKIAN_TOL).unwrap();
        assert_eq!(t, Transversality::Transversal, "xi = {xi}");
        assert!(!weber_analysis(xi).polynomial);
    }
}

#[test]
fn verdict_does_not_depend_on_f() {
    for xi in [3.0, 3.4, 5.0, 6.1] {
        let p = family(xi);
        let base = variational_transversality_with_f(&p, 1.0, Branch::Plus, DEFAULT_WRONSKIAN_TOL).unwrap();
        for f in [0.1, 0.7, 4.0, 25.0] {
            let t = variational_transversality_with_f(&p, f, Branch::Plus, DEFAULT_WRONSKIAN_TOL).unwrap();
            assert_eq!(t, base, "xi = {xi}, f = {f}");
        }
    }
}

#[test]
fn saddle_case_is_transversal() {
    let p = TwoFoldNormalForm::new(1.0, 1.0, 0.5, 0.2).unwrap();
    assert_eq!(case_classify(&p), CaseClass::S);
    let t = variational_transversality(&p, &phi_cubic(), Branch::Minus, DEFAULT_WRONSKIAN_TOL).unwrap();
    assert_eq!(t, Transversality::Transversal);
}

#[test]
fn rejects_lines_outside_stable_sliding() {
    let p = TwoFoldNormalForm::new(1.0, 1.0, 0.5, 0.2).unwrap();
    assert!(variational_transversality(&p, &phi_cubic(), Branch::Plus, DEFAULT_WRONSKIAN_TOL).is_err());
    assert!(variational_transversality_with_f(&family(3.5), 0.0, Branch::Plus, 1e-6).is_err());
}
