use canardlab_core::blowup::{chart_k2_rhs, ChartK2State};
use canardlab_core::canard::{CanardHunter, CanardKind, HuntOptions, SectionSource};
use canardlab_core::{phi_cubic, TwoFoldNormalForm};

fn hunter(xi: f64) -> CanardHunter {
    let p = TwoFoldNormalForm::with_eigen_ratio(1.0, -1.0, 2.5, xi).unwrap();
    CanardHunter::new(p, phi_cubic(), HuntOptions::default()).unwrap()
}

#[test]
fn seeds_start_on_the_slow_manifold() {
    let h = hunter(3.5);
    for z1 in [-8.0, -2.0, -1.3, -0.5, -0.1] {
        for source in [SectionSource::Attracting, SectionSource::Repelling] {
            let s = h.seed_state(z1, source);
            let f = chart_k2_rhs(&h.params, &h.phi, &ChartK2State { x2: s[0], w: s[1], z2: s[2], r2: 0.0 });
            assert!(f.w.abs() < 1e-12);
        }
    }
}

#[test]
fn repelling_curve_is_mirror_of_attracting() {
    let h = hunter(3.5);
    let grid = [-6.0, -2.5, -2.0 - 1e-4, -1.0, -0.5 + 1e-4, -0.3];
    for z1 in grid {
        let a = h.trace_seed(z1, SectionSource::Attracting).unwrap();
        let r = h.trace_seed(z1, SectionSource::Repelling).unwrap();
        assert!((a.x2 + r.x2).abs() < 1e-8, "z1 = {z1}");
        assert!((a.y - r.y).abs() < 1e-8, "z1 = {z1}");
    }
}

#[test]
fn rejects_parameters_without_canards() {
    let focus = TwoFoldNormalForm::new(1.0, -1.0, 0.0, 0.0).unwrap();
    assert!(CanardHunter::new(focus, phi_cubic(), HuntOptions::default()).is_err());
    let h = hunter(3.5);
    assert!(h.trace_seed(0.5, SectionSource::Attracting).is_err());
}

#[test]
fn single_strong_canard_below_first_bifurcation() {
    let h = hunter(2.0);
    let res = h.hunt(&h.default_grid(800));
    assert_eq!(res.report.transversal_count(), 1);
    let strong = res.report.strong().unwrap();
    assert!(strong.point.0.abs() < 1e-2 && (strong.point.1 - 0.2261).abs() < 1e-2);
    assert_eq!(strong.rotation_count, 0);
    let (wx, wy) = h.weak_point().unwrap();
    assert!(wx == 0.0 && (wy + 0.2261).abs() < 1e-3);
    for curve in [&res.attracting, &res.repelling] {
        let nearest = curve
            .points
            .iter()
            .map(|p| (p.x2 - wx).hypot(p.y - wy))
            .fold(f64::INFINITY, f64::min);
        assert!(nearest < 1e-2);
    }
}

#[test]
fn first_secondary_canard_after_three() {
    let h = hunter(3.5);
    let res = h.hunt(&h.default_grid(800));
    let kinds: Vec<_> = res
        .report
        .intersections
        .iter()
        .filter(|i| i.transversal && i.kind != CanardKind::Weak)
        .map(|i| i.kind)
        .collect();
    assert_eq!(kinds, vec![CanardKind::Strong, CanardKind::Secondary(1)]);
    for i in &res.report.intersections {
        assert!(i.point.0.abs() < 1e-6, "off the symmetry axis: {:?}", i.point);
        if i.kind != CanardKind::Weak {
            assert_eq!(i.transversal, i.crossing_angle > h.opts.angle_tol);
        }
        if let CanardKind::Secondary(n) = i.kind {
            assert_eq!(i.rotation_count, n);
        }
    }
}
