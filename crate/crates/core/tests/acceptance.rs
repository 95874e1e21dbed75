//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::time::Instant;

use holo_openbook::config::{bundled, bundled_names};
use holo_openbook::geometry::page::PageKind;
use holo_openbook::geometry::{build_manifold, verify_shs, GridSpec, OpenBookSpec};
use holo_openbook::holomorphic::{foliation_sample, richardson_check, solve_half_cylinder, FoliationOptions, HalfCylinderOptions};
use holo_openbook::indices::{cover_index, cover_index_closed_form, fredholm_index, normal_chern, CurveTopology};
use holo_openbook::pipeline::Context;
use holo_openbook::profiles::{build_profile, ProfileParams};

// Pinned tolerances.
const PROFILE_GRID: usize = 10_000;
const PROFILE_RUNTIME_S: f64 = 1.0;
const SHS_GRID: usize = 50;
const FD_STEP: f64 = 1e-3;
const IOTA_TOL: f64 = 1e-9;
const D_OMEGA_TOL: f64 = 1e-6;
const CONTACT_EPS: f64 = 1e-2;
const DENSITY_REL_TOL: f64 = 1e-9;
const BRANCH_TOL: f64 = 1e-12;
const CR_H: f64 = 1e-2;
const RICHARDSON: (f64, f64) = (3.5, 4.5);
const EXPONENT_TOL: f64 = 1e-3;
const A_SLOPE_REL_TOL: f64 = 1e-3;
const N_PAGES: usize = 16;
const N_RANDOM: usize = 100_000;
const COVERAGE_TOL: f64 = 1e-6;
const SMALL_C: f64 = 1e-3;
const RETURN_TIME_TOL: f64 = 1e-6;
const PERIOD_RATIO_MAX: f64 = 1e-2;

fn contexts() -> Vec<Context> {
    bundled_names()
        .into_iter()
        .map(|n| Context::new(&bundled(n).unwrap()).unwrap())
        .collect()
}

fn name(ctx: &Context) -> &str {
    &ctx.config.name
}

fn profile_validity(ctxs: &[Context]) -> (bool, String) {
    let mut ok = true;
    let mut notes = Vec::new();
    for ctx in ctxs {
        let t = Instant::now();
        let p = &ctx.profile;
        let delta = p.params().delta;
        let (lo, hi) = (1e-3, 1.0 - delta - 1e-3);
        let mut min_d = f64::INFINITY;
        let mut max_fp = f64::NEG_INFINITY;
        for i in 0..PROFILE_GRID {
            let s = p.eval(lo + (hi - lo) * i as f64 / (PROFILE_GRID - 1) as f64).unwrap();
            min_d = min_d.min(s.d);
            max_fp = max_fp.max(s.fp);
        }
        let secs = t.elapsed().as_secs_f64();
        ok &= min_d > 0.0 && max_fp < 0.0 && secs < PROFILE_RUNTIME_S;
        notes.push(format!("{}: min D {min_d:.3e}, max f' {max_fp:.3e}, {secs:.3}s", name(ctx)));
    }
    (ok, notes.join("; "))
}

fn shs_axioms_and_contact(ctxs: &[Context]) -> Vec<(bool, String)> {
    let grid = GridSpec { n: SHS_GRID, fd_step: FD_STEP };
    let reports: Vec<_> = ctxs
        .iter()
        .map(|c| (name(c).to_string(), verify_shs(&c.manifold, &c.profile, CONTACT_EPS, &grid).unwrap()))
        .collect();
    let mut out = Vec::new();
    // 2
    let mut ok = true;
    let mut notes = Vec::new();
    for (n, r) in &reports {
        ok &= r.sup_iota_x0 < IOTA_TOL && r.min_omega_xi0 > 0.0 && r.sup_d_omega < D_OMEGA_TOL;
        notes.push(format!("{n}: sup|i_X w| {:.1e}, min w|xi {:.3e}, sup|dw| {:.1e}", r.sup_iota_x0, r.min_omega_xi0, r.sup_d_omega));
    }
    out.push((ok, notes.join("; ")));
    // 3
    let mut ok = true;
    let mut notes = Vec::new();
    for (n, r) in &reports {
        ok &= r.contact_density_min > 0.0
            && r.confoliation_density_rel_err <= DENSITY_REL_TOL
            && r.confoliation_zero_set_sup == 0.0;
        notes.push(format!(
            "{n}: min density {:.3e}, rel err vs D {:.1e}, mapping torus density {:.1e}",
            r.contact_density_min, r.confoliation_density_rel_err, r.confoliation_zero_set_sup
        ));
    }
    out.push((ok, notes.join("; ")));
    // 4
    let mut ok = true;
    let mut notes = Vec::new();
    for (n, r) in &reports {
        ok &= r.reeb_bitwise_mismatches == 0 && r.reeb_dphi_mismatches == 0;
        notes.push(format!("{n}: {} bitwise, {} d/dphi mismatches", r.reeb_bitwise_mismatches, r.reeb_dphi_mismatches));
    }
    out.push((ok, notes.join("; ")));
    out
}

fn cylinder_options() -> HalfCylinderOptions {
    HalfCylinderOptions::new(2000.0, 1e-10)
}

fn branch_consistency(ctxs: &[Context]) -> (bool, String) {
    let mut ok = true;
    let mut notes = Vec::new();
    for ctx in ctxs {
        let sol = solve_half_cylinder(&ctx.profile, 0.0, 0.0, &cylinder_options()).unwrap();
        ok &= sol.branch_overlap_defect <= BRANCH_TOL;
        notes.push(format!("{}: {:.1e}", name(ctx), sol.branch_overlap_defect));
    }
    (ok, notes.join("; "))
}

fn cr_convergence(ctxs: &[Context]) -> (bool, String) {
    let mut ok = true;
    let mut notes = Vec::new();
    for ctx in ctxs {
        let r = richardson_check(&ctx.profile, 5.0, CR_H, 16, 1e-12).unwrap();
        ok &= (RICHARDSON.0..=RICHARDSON.1).contains(&r.ratio);
        notes.push(format!("{}: {:.3e} / {:.3e} = {:.3}", name(ctx), r.sup_h, r.sup_half, r.ratio));
    }
    (ok, notes.join("; "))
}

fn asymptotics(ctxs: &[Context]) -> (bool, String) {
    let mut ok = true;
    let mut notes = Vec::new();
    for ctx in ctxs {
        let prm = ctx.profile.params();
        let sol = solve_half_cylinder(&ctx.profile, 0.0, 0.0, &cylinder_options()).unwrap();
        let de = (sol.fit.exponent - prm.kappa).abs();
        let da = ((sol.fit.a_slope - prm.c) / prm.c).abs();
        ok &= de <= EXPONENT_TOL && da <= A_SLOPE_REL_TOL;
        notes.push(format!(
            "{}: |exp - kappa| {de:.1e}, |a slope - c|/c {da:.1e} (a(s)/s {:.5})",
            name(ctx),
            sol.fit.a_over_s
        ));
    }
    (ok, notes.join("; "))
}

fn indices(ctxs: &[Context]) -> (bool, String) {
    let mut ok = true;
    let mut notes = Vec::new();
    for ctx in ctxs {
        let kmax = (1.0 / ctx.profile.params().kappa.abs()).floor() as u32;
        let mut all_one = true;
        for k in 1..=kmax {
            let c = if k <= 100 { cover_index(&ctx.profile, k) } else { cover_index_closed_form(&ctx.profile, k) };
            all_one &= c.map(|c| c.mu == 1).unwrap_or(false);
        }
        ok &= all_one;
        notes.push(format!("{}: mu = 1 for k <= {kmax}: {all_one}", name(ctx)));
    }
    let genus_ok = (0..=3u32).all(|g| fredholm_index(&CurveTopology::new(g, &[1], 0)) == 2 - 2 * g as i64);
    let chern = normal_chern(2, 0, 0);
    ok &= genus_ok && chern == Ok(0);
    notes.push(format!("ind = 2 - 2g for g <= 3: {genus_ok}; normal_chern(2, 0, 0) = {chern:?}"));
    (ok, notes.join("; "))
}

fn foliation(ctxs: &[Context]) -> (bool, String) {
    let mut ok = true;
    let mut notes = Vec::new();
    for ctx in ctxs {
        let opts = FoliationOptions { n_pages: N_PAGES, n_random: N_RANDOM, seed: 1, cylinder: cylinder_options() };
        let (_, r) = foliation_sample(&ctx.manifold, &ctx.profile, &opts).unwrap();
        ok &= r.unmatched == 0
            && r.multiply_matched == 0
            && r.max_reconstruction_error <= COVERAGE_TOL
            && r.min_transversality > 0.0
            && r.min_leaf_distance > 0.0;
        notes.push(format!(
            "{}: {} points, {} unmatched, {} multiple, err {:.1e}, min det {:.3e}",
            name(ctx),
            r.n_random,
            r.unmatched,
            r.multiply_matched,
            r.max_reconstruction_error,
            r.min_transversality
        ));
    }
    (ok, notes.join("; "))
}

fn small_periods() -> (bool, String) {
    let prm = ProfileParams {
        c: SMALL_C,
        kappa: -std::f64::consts::PI / 10_000.0,
        delta: 0.05,
        delta_prime: 0.15,
        rho1: 0.25,
        rho2: 0.5,
    };
    let spec = OpenBookSpec { page: PageKind::Disk { radius: 1.0 }, twists: vec![], profile: prm, epsilon: 1e-4, tau_flat: 0.1 };
    let m = build_manifold(&spec).unwrap();
    let p = build_profile(prm).unwrap();
    let r = verify_shs(&m, &p, 1e-4, &GridSpec { n: 20, fd_step: FD_STEP }).unwrap();
    let ok = (r.binding_period - SMALL_C).abs() <= 1e-9
        && r.min_mapping_torus_return_time >= 1.0 - RETURN_TIME_TOL
        && r.period_ratio < PERIOD_RATIO_MAX;
    (
        ok,
        format!(
            "binding period {:.6e}, min return time {:.9}, ratio {:.3e}",
            r.binding_period, r.min_mapping_torus_return_time, r.period_ratio
        ),
    )
}

fn main() {
    let start = Instant::now();
    let ctxs = contexts();
    let mut results: Vec<(&str, (bool, String))> = Vec::new();
    results.push(("profile validity", profile_validity(&ctxs)));
    let shs = shs_axioms_and_contact(&ctxs);
    let labels = ["SHS axioms", "contact perturbation", "Reeb agreement"];
    for (l, r) in labels.into_iter().zip(shs) {
        results.push((l, r));
    }
    results.push(("ODE branch consistency", branch_consistency(&ctxs)));
    results.push(("CR residual convergence", cr_convergence(&ctxs)));
    results.push(("asymptotics", asymptotics(&ctxs)));
    results.push(("indices", indices(&ctxs)));
    results.push(("foliation", foliation(&ctxs)));
    results.push(("small periods", small_periods()));

    let mut failed = 0;
    for (i, (label, (ok, detail))) in results.iter().enumerate() {
        println!("criterion {:>2} {label}: {} ({detail})", i + 1, if *ok { "PASS" } else { "FAIL" });
        failed += usize::from(!ok);
    }
    println!("acceptance: {}/{} passed in {:.2}s", results.len() - failed, results.len(), start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
