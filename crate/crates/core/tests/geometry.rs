use holo_openbook::geometry::{
    build_manifold, eta_on_page, verify_shs, Boundary, GridSpec, ManifoldModel, OpenBookSpec,
    PageKind, PageModel, PointTM, Twist,
};
use holo_openbook::profiles::{build_profile, Profile, ProfileParams};

fn params(c: f64) -> ProfileParams {
    ProfileParams {
        c,
        kappa: -std::f64::consts::SQRT_2 / 100.0,
        delta: 0.05,
        delta_prime: 0.1,
        rho1: 0.25,
        rho2: 0.5,
    }
}

fn setup(page: PageKind, twists: Vec<Twist>) -> (ManifoldModel, Profile) {
    let spec = OpenBookSpec { page, twists, profile: params(0.1), epsilon: 0.01, tau_flat: 0.1 };
    (build_manifold(&spec).unwrap(), build_profile(spec.profile).unwrap())
}

fn annulus_twist() -> (ManifoldModel, Profile) {
    setup(
        PageKind::Annulus { inner: 1.0, outer: 2.0 },
        vec![Twist { r0: 1.3, r1: 1.7, count: 1 }],
    )
}

#[test]
fn disk_confoliation_and_contact() {
    let (m, p) = setup(PageKind::Disk { radius: 1.0 }, vec![]);
    let r = verify_shs(&m, &p, 0.01, &GridSpec::default()).unwrap();
    println!("{}", serde_json::to_string_pretty(&r).unwrap());
    assert!(r.pass);
    assert!(r.contact_density_min > 0.0);
    assert!(r.confoliation_density_rel_err <= 1e-9);
    assert_eq!(r.confoliation_zero_set_sup, 0.0);
    // identity monodromy: omega_0 = d alpha = (1/eps) d lambda_eps on the mapping torus
    assert!(r.f_eps_mapping_torus_dev < 1e-12);
    assert!((r.binding_period - 0.1).abs() < 1e-12);
}

#[test]
fn annulus_with_twist_passes() {
    let (m, p) = annulus_twist();
    let r = verify_shs(&m, &p, 0.01, &GridSpec::default()).unwrap();
    assert!(r.pass, "{r:#?}");
    assert!(r.sup_pullback_defect <= 1e-9);
}

#[test]
fn eta_positive_on_interior_grid() {
    for kind in [PageKind::Disk { radius: 1.0 }, PageKind::Annulus { inner: 1.0, outer: 2.0 }] {
        let page = PageModel::new(kind, 0.05).unwrap();
        let (a, b) = page.r_range();
        let mut min = f64::INFINITY;
        for i in 0..200 {
            for _j in 0..200 {
                let r = a + (b - a) * (i as f64 + 0.5) / 200.0;
                min = min.min(page.d_eta_area(r));
            }
        }
        assert!(min > 0.0, "{kind:?} {min}");
        let eta = eta_on_page(&page);
        let (r, _) = page.from_collar(Boundary::Outer, 1.02, 0.0);
        assert!((eta(r, 0.0)[1] - 0.98).abs() < 1e-12);
    }
    let disk = PageModel::new(PageKind::Disk { radius: 1.0 }, 0.05).unwrap();
    assert!(disk.d_eta_area(0.0) > 0.0);
}

#[test]
fn dalpha_positive_on_pages_with_twist() {
    let (m, _) = annulus_twist();
    let (a, b) = m.page.r_range();
    for i in 0..=20 {
        let phi = i as f64 / 20.0;
        for j in 0..100 {
            let r = a + (b - a) * (j as f64 + 0.5) / 100.0;
            let (_, da) = holo_openbook::geometry::alpha_on_mapping_torus(&m.page, &m.monodromy, &m.tau, phi, r);
            assert!(da.0[2] > 0.0);
        }
    }
}

#[test]
fn identity_monodromy_alpha_is_eta() {
    let (m, _) = setup(PageKind::Disk { radius: 1.0 }, vec![]);
    for &phi in &[0.0, 0.05, 0.5, 0.99] {
        let (a, _) = holo_openbook::geometry::alpha_on_mapping_torus(&m.page, &m.monodromy, &m.tau, phi, 0.6);
        assert_eq!([a.0[1], a.0[2]], m.page.eta(0.6));
    }
    let (m, _) = annulus_twist();
    let (a, _) = holo_openbook::geometry::alpha_on_mapping_torus(&m.page, &m.monodromy, &m.tau, 0.05, 1.5);
    assert_eq!([a.0[1], a.0[2]], m.page.eta(1.5));
}

#[test]
fn small_binding_period_against_mapping_torus_orbits() {
    let mut prm = params(1e-3);
    prm.kappa = -std::f64::consts::PI / 10_000.0;
    let spec = OpenBookSpec {
        page: PageKind::Disk { radius: 1.0 },
        twists: vec![],
        profile: prm,
        epsilon: 1e-4,
        tau_flat: 0.1,
    };
    let m = build_manifold(&spec).unwrap();
    let p = build_profile(prm).unwrap();
    let r = verify_shs(&m, &p, 1e-4, &GridSpec::default()).unwrap();
    assert!((r.binding_period - 1e-3).abs() < 1e-12);
    assert!(r.min_mapping_torus_return_time >= 1.0 - 1e-6);
    assert!(r.period_ratio < 1e-2);
}

#[test]
fn overlap_points_agree() {
    let (m, _) = annulus_twist();
    for b in [Boundary::Outer, Boundary::Inner] {
        let pt = PointTM::solid(b, 0.3, 0.97, 0.2);
        let back = m.transition(&m.transition(&pt).unwrap()).unwrap();
        assert_eq!(back.chart, pt.chart);
        assert!((0..3).all(|i| (back.coords[i] - pt.coords[i]).abs() < 1e-14));
    }
}
