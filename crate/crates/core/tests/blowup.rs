use proptest::prelude::*;

use canardlab_core::blowup::{
    chart_k1_rhs, chart_k2_rhs, fold_blowdown, fold_kappa12, fold_kappa21, invariant_line_k2,
    kappa12, kappa21, reduced_equilibria, reduced_k1_rhs, reflect, ChartK1State, ChartK2State,
    FoldChartState, FoldK1State, FoldK2State,
};
use canardlab_core::integrate::{integrate, Options};
use canardlab_core::twofold::Branch;
use canardlab_core::{eigen_data, phi_cubic, wsystem_rhs, TwoFoldNormalForm};

fn family(xi: f64) -> TwoFoldNormalForm {
    TwoFoldNormalForm::with_eigen_ratio(1.0, -1.0, 2.5, xi).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #[test]
    fn kappa_round_trip(x2 in -50.0..-1e-3f64, w in 0.01..10.0f64, z2 in -20.0..20.0f64, r2 in 0.0..1.0f64) {
        let s = ChartK2State { x2, w, z2, r2 };
        let back = kappa21(&kappa12(&s).unwrap()).unwrap();
        prop_assert!(close(back.x2, x2, 1e-12));
        prop_assert!(close(back.z2, z2, 1e-12));
        prop_assert!(close(back.r2, r2, 1e-12));
        prop_assert_eq!(back.w, w);
    }

    #[test]
    fn charts_agree_on_blow_down(x2 in -50.0..-1e-3f64, w in 0.01..10.0f64, z2 in -20.0..20.0f64, r2 in 0.0..1.0f64) {
        let s = ChartK2State { x2, w, z2, r2 };
        let a = s.blow_down();
        let b = kappa12(&s).unwrap().blow_down();
        for i in 0..4 {
            prop_assert!(close(a[i], b[i], 1e-12));
        }
    }

    #[test]
    fn reflection_reverses_scaling_field(xi in 1.5..7.0f64, x2 in -5.0..5.0f64, lw in -3.0..3.0f64, z2 in -5.0..5.0f64) {
        let p = family(xi);
        let phi = phi_cubic();
        let s = ChartK2State { x2, w: lw.exp(), z2, r2: 0.0 };
        let f = chart_k2_rhs(&p, &phi, &s);
        let g = chart_k2_rhs(&p, &phi, &reflect(&s));
        prop_assert!(close(g.x2, f.x2, 1e-14));
        prop_assert!(close(g.w, -f.w, 1e-14));
        prop_assert!(close(g.z2, f.z2, 1e-14));
    }

    #[test]
    fn fold_kappa_round_trip(k in 2u32..5, x2 in -20.0..-1e-2f64, y2 in -5.0..5.0f64, z in -3.0..3.0f64, r2 in 0.0..0.5f64) {
        let s = FoldK2State { x2, y2, z, r2 };
        let k1 = fold_kappa12(k, &s).unwrap();
        let back = fold_kappa21(k, &k1).unwrap();
        prop_assert!(close(back.x2, x2, 1e-11));
        prop_assert!(close(back.y2, y2, 1e-11));
        prop_assert!(close(back.r2, r2, 1e-11));
        let a = fold_blowdown(k, &FoldChartState::K2(s));
        let b = fold_blowdown(k, &FoldChartState::K1(k1));
        for i in 0..4 {
            prop_assert!(close(a[i], b[i], 1e-10));
        }
    }
}

#[test]
fn transitions_reject_outside_overlap() {
    assert!(kappa12(&ChartK2State { x2: 0.0, w: 1.0, z2: 0.0, r2: 0.1 }).is_err());
    assert!(kappa21(&ChartK1State { r1: 0.1, w: 1.0, z1: 0.0, eps1: 0.0 }).is_err());
    assert!(fold_kappa12(2, &FoldK2State { x2: 1.0, y2: 0.0, z: 0.0, r2: 0.1 }).is_none());
    assert!(fold_kappa21(2, &FoldK1State { r1: 0.1, y1: 0.0, z: 0.0, eps1: -1.0 }).is_none());
}

/// Chain rule for `κ₁ ∘ κ₁₂`, evaluated by differentiating the transition.
#[test]
fn entry_chart_field_is_transported_scaling_field() {
    let p = family(3.5);
    let phi = phi_cubic();
    let s = ChartK2State { x2: -4.0, w: 1.7, z2: 2.5, r2: 0.0 };
    let f = chart_k2_rhs(&p, &phi, &s);
    let k1 = kappa12(&s).unwrap();
    let g = chart_k1_rhs(&p, &phi, &k1);
    let h = 1e-6;
    let moved = ChartK2State {
        x2: s.x2 + h * f.x2,
        w: s.w + h * f.w,
        z2: s.z2 + h * f.z2,
        r2: 0.0,
    };
    let back = ChartK2State {
        x2: s.x2 - h * f.x2,
        w: s.w - h * f.w,
        z2: s.z2 - h * f.z2,
        r2: 0.0,
    };
    let (a, b) = (kappa12(&moved).unwrap(), kappa12(&back).unwrap());
    // κ₁ time runs at 1/|x2| = √ε₁ of κ₂ time
    let scale = k1.eps1.sqrt();
    let d = |u: f64, v: f64| (u - v) / (2.0 * h) * scale;
    assert!(close(d(a.w, b.w), g.w, 1e-7));
    assert!(close(d(a.z1, b.z1), g.z1, 1e-7));
    assert!(close(d(a.eps1, b.eps1), g.eps1, 1e-7));
}

#[test]
fn invariant_lines_carry_the_sliding_eigenvalues() {
    for xi in [2.0, 3.5, 6.5] {
        let p = family(xi);
        let phi = phi_cubic();
        let e = eigen_data(&p).unwrap();
        for which in [Branch::Plus, Branch::Minus] {
            let chi = e.chi(which);
            for x2 in [-3.0, -0.5, 0.0, 2.0] {
                let s = invariant_line_k2(&p, &e, which, x2);
                let f = chart_k2_rhs(&p, &phi, &s);
                assert!(f.w.abs() < 1e-12);
                assert!(close(f.x2, -e.lambda(which) / p.abs_beta(), 1e-12));
                assert!(close(f.z2, -chi * f.x2, 1e-12));
            }
        }
    }
}

/// With `ε = r₂²` the layer system is the scaling-chart field sped up by `r₂`.
#[test]
fn layer_system_and_scaling_chart_trajectories_coincide() {
    let p = family(3.5);
    let phi = phi_cubic();
    let r2: f64 = 0.05;
    let eps = r2 * r2;
    let s0 = ChartK2State { x2: -3.0, w: 2.1, z2: -5.8, r2 };
    let opts = Options::with_tol(1e-12, 1e-12).no_record();
    let t_chart = 2.0;
    let chart = integrate(
        |_, y: &[f64; 3]| {
            let f = chart_k2_rhs(&p, &phi, &ChartK2State { x2: y[0], w: y[1], z2: y[2], r2 });
            [f.x2, f.w, f.z2]
        },
        [s0.x2, s0.w, s0.z2],
        (0.0, t_chart),
        &opts,
        &[],
    )
    .unwrap()
    .last()
    .1;
    let d0 = s0.blow_down();
    let layer = integrate(
        |_, y: &[f64; 3]| wsystem_rhs(&p, &phi, eps, *y),
        [d0[0], d0[1], d0[2]],
        (0.0, t_chart / r2),
        &opts,
        &[],
    )
    .unwrap()
    .last()
    .1;
    assert!(close(layer[0], r2 * chart[0], 1e-9));
    assert!(close(layer[1], chart[1], 1e-9));
    assert!(close(layer[2], r2 * chart[2], 1e-9));
}

#[test]
fn reduced_equilibria_match_jacobian() {
    for xi in [2.0, 3.5, 6.5] {
        let p = family(xi);
        let eqs = reduced_equilibria(&p).unwrap();
        assert_eq!(eqs.len(), 2);
        for eq in eqs {
            let x0 = eq.location;
            let f0 = reduced_k1_rhs(&p, x0);
            assert!(f0.iter().all(|v| v.abs() < 1e-12));
            let h = 1e-6;
            let mut jac = [[0.0; 3]; 3];
            for j in 0..3 {
                let (mut a, mut b) = (x0, x0);
                a[j] += h;
                b[j] -= h;
                let (fa, fb) = (reduced_k1_rhs(&p, a), reduced_k1_rhs(&p, b));
                for i in 0..3 {
                    jac[i][j] = (fa[i] - fb[i]) / (2.0 * h);
                }
            }
            assert!(close(jac[0][0], eq.mu1, 1e-8));
            assert!(close(jac[1][1], eq.mu2, 1e-8));
            assert!(close(jac[2][2], eq.mu3, 1e-8));
            for (i, j) in [(0, 1), (0, 2), (2, 0), (2, 1)] {
                assert!(jac[i][j].abs() < 1e-8);
            }
            let e = eigen_data(&p).unwrap();
            assert!(close(eq.mu1, e.lambda(eq.which), 1e-12));
        }
    }
}
