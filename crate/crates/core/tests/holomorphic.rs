use holo_openbook::geometry::page::{Boundary, PageKind};
use holo_openbook::geometry::{build_manifold, ManifoldModel, OpenBookSpec, PointTM};
use holo_openbook::holomorphic::*;
use holo_openbook::profiles::{build_profile, Profile, ProfileParams};
use proptest::prelude::*;

fn params() -> ProfileParams {
    ProfileParams { c: 0.1, kappa: -std::f64::consts::SQRT_2 / 100.0, delta: 0.05, delta_prime: 0.1, rho1: 0.25, rho2: 0.5 }
}

fn setup(page: PageKind) -> (ManifoldModel, Profile) {
    let spec = OpenBookSpec { page, twists: vec![], profile: params(), epsilon: 1e-2, tau_flat: 0.1 };
    (build_manifold(&spec).unwrap(), build_profile(params()).unwrap())
}

fn opts() -> HalfCylinderOptions {
    HalfCylinderOptions::new(2000.0, 1e-10)
}

#[test]
fn branches_agree_on_overlap() {
    let p = build_profile(params()).unwrap();
    let sol = solve_half_cylinder(&p, 0.0, 0.0, &opts()).unwrap();
    assert!(sol.branch_overlap_defect <= 1e-12, "{}", sol.branch_overlap_defect);
    assert!(sol.branch.contains(&Branch::Reduced) && sol.branch.contains(&Branch::Contact));
}

#[test]
fn asymptotics_match_kappa_and_c() {
    let prm = params();
    let p = build_profile(prm).unwrap();
    let sol = solve_half_cylinder(&p, 0.0, 0.0, &opts()).unwrap();
    assert!((sol.fit.exponent - prm.kappa).abs() <= 1e-3, "{:?}", sol.fit);
    assert!(((sol.fit.a_slope - prm.c) / prm.c).abs() <= 1e-3, "{:?}", sol.fit);
    assert!(sol.rho_end() < 1e-6);
}

#[test]
fn a_is_constant_on_the_collar() {
    let p = build_profile(params()).unwrap();
    let sol = solve_half_cylinder(&p, 2.5, 0.0, &opts()).unwrap();
    for (a, rho) in sol.a.iter().zip(&sol.rho) {
        if *rho >= 1.0 - params().delta {
            assert_eq!(*a, 2.5);
        }
    }
}

#[test]
fn shift_in_a0_leaves_rho_unchanged() {
    let p = build_profile(params()).unwrap();
    let base = solve_half_cylinder(&p, 0.0, 0.3, &opts()).unwrap();
    let moved = solve_half_cylinder(&p, 7.25, 0.3, &opts()).unwrap();
    assert_eq!(base.rho, moved.rho);
    for (a, b) in base.a.iter().zip(&moved.a) {
        assert!((b - a - 7.25).abs() <= 1e-12);
    }
}

#[test]
fn residual_converges_at_second_order() {
    let p = build_profile(params()).unwrap();
    let r = richardson_check(&p, 5.0, 1e-2, 16, 1e-12).unwrap();
    assert!((3.5..=4.5).contains(&r.ratio), "{r:?}");
}

#[test]
fn energy_matches_closed_form() {
    for page in [PageKind::Disk { radius: 1.0 }, PageKind::Annulus { inner: 1.0, outer: 2.0 }] {
        let (m, p) = setup(page);
        let curve = assemble_page_curve(&m, &p, 0.125, 0.0, &opts()).unwrap();
        assert_eq!(curve.junction_defect(), 0.0);
        assert!(curve.min_node_separation() > 0.0);
        let e = omega_energy(&m, &p, &curve).unwrap();
        let closed = half_cylinder_energy_closed_form(&p);
        for c in &e.cylinders {
            assert!((c - closed).abs() <= 1e-6, "{c} vs {closed}");
        }
        assert!((e.flat - e.flat_closed_form).abs() <= 1e-6);
        assert!(e.total > 0.0);
    }
}

#[test]
fn j0_is_an_almost_complex_structure() {
    let (m, p) = setup(PageKind::Annulus { inner: 1.0, outer: 2.0 });
    for b in [Boundary::Outer, Boundary::Inner] {
        for k in 1..40 {
            let rho = k as f64 / 40.0;
            let s = J0_at(&m, &p, &PointTM::solid(b, 0.1, rho, 0.7)).unwrap();
            assert!(s.square_defect < 1e-10 && s.reeb_defect < 1e-12);
        }
    }
}

#[test]
fn j0_cartesian_is_bounded_along_rays() {
    let (m, p) = setup(PageKind::Disk { radius: 1.0 });
    let checks = cartesian_smoothness(&m, &p, &[1e-2, 1e-3]).unwrap();
    for c in &checks {
        assert!(c.sup_entry < 20.0 && c.sup_second_difference < 1.0, "{c:?}");
    }
}

#[test]
fn foliation_covers_the_complement_of_the_binding() {
    for page in [PageKind::Disk { radius: 1.0 }, PageKind::Annulus { inner: 1.0, outer: 2.0 }] {
        let (m, p) = setup(page);
        let fo = FoliationOptions { n_pages: 16, n_random: 100_000, seed: 11, cylinder: opts() };
        let (leaves, rep) = foliation_sample(&m, &p, &fo).unwrap();
        assert_eq!(leaves.len(), 16);
        assert!(rep.pass, "{rep:?}");
        assert!(rep.max_reconstruction_error <= 1e-6);
    }
}

#[test]
fn csv_has_a_row_per_node() {
    let (m, p) = setup(PageKind::Disk { radius: 1.0 });
    let curve = assemble_page_curve(&m, &p, 0.0, 0.0, &opts()).unwrap();
    let csv = leaves_to_csv(std::slice::from_ref(&curve));
    assert_eq!(csv.lines().count(), 1 + curve.cylinders[0].solution.s.len());
    assert!(csv.starts_with("leaf,phi0,boundary,s,a,rho,branch"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverting_rho_recovers_s(s in 0.0f64..900.0) {
        let p = build_profile(params()).unwrap();
        let sol = solve_half_cylinder(&p, 0.0, 0.0, &opts()).unwrap();
        let (_, rho) = sol.eval(s).unwrap();
        let (back, hits) = sol.invert_rho(rho).unwrap();
        prop_assert_eq!(hits, 1);
        let (_, rho2) = sol.eval(back).unwrap();
        prop_assert!((rho2 - rho).abs() <= 1e-12 * rho.max(1e-6));
    }
}
