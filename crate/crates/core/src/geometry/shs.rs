//! Grid audit of the stable Hamiltonian structure axioms and of the contact
//! perturbation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::forms::{d_function, d_two_form, Vector3};
use super::{
    lambda_with, profile_for, reeb_with, taming_with, Boundary, Chart, ManifoldModel, PointTM,
};
use crate::ode::{integrate, Options};
use crate::profiles::Profile;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Points per chart dimension.
    pub n: usize,
    /// Step of the centred differences used for exterior derivatives.
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
}

fn default_fd_step() -> f64 {
    1e-3
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { n: 50, fd_step: 1e-3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShsTolerances {
    pub iota: f64,
    pub d_omega: f64,
    pub lambda_of_reeb: f64,
    pub density_rel: f64,
    pub pullback: f64,
    pub f_eps: f64,
    pub return_time: f64,
}

impl Default for ShsTolerances {
    fn default() -> Self {
        Self {
            iota: 1e-9,
            d_omega: 1e-6,
            lambda_of_reeb: 1e-12,
            density_rel: 1e-9,
            pullback: 1e-9,
            f_eps: 1e-6,
            return_time: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShsReport {
    pub eps: f64,
    pub grid_n: usize,
    pub points: usize,
    pub tolerances: ShsTolerances,
    /// `min (lambda ^ omega_0) / vol`, i.e. `omega_0` on `xi`, for `xi_0` and `xi_eps`.
    pub min_omega_xi0: f64,
    pub min_omega_xi_eps: f64,
    pub sup_iota_x0: f64,
    pub sup_iota_x_eps: f64,
    pub sup_d_omega: f64,
    /// Regions where `omega_0` is closed in closed form.
    pub structural_closedness: Vec<(String, bool)>,
    pub sup_lambda_of_reeb_defect: f64,
    pub contact_density_min: f64,
    pub contact_density_max: f64,
    /// `eps = 0`: max relative deviation of the density from `D(rho)` where `rho < 1 - delta`.
    pub confoliation_density_rel_err: f64,
    /// `eps = 0`: max |density| on the mapping torus and on `rho >= 1 - delta`.
    pub confoliation_zero_set_sup: f64,
    pub confoliation_zero_set_points: usize,
    pub min_d_contact_region: f64,
    /// Points with `rho < 1 - delta` where `X_eps` and `X_0` differ in any bit.
    pub reeb_bitwise_mismatches: usize,
    /// Points with `rho` in `[1 - delta', 1 - delta)` where `X_0 != d/dphi` exactly.
    pub reeb_dphi_mismatches: usize,
    pub f_eps_form_residual: f64,
    pub f_eps_closedness: f64,
    pub f_eps_mapping_torus_dev: f64,
    pub sup_pullback_defect: f64,
    pub binding_period: f64,
    pub min_mapping_torus_return_time: f64,
    pub period_ratio: f64,
    pub pass: bool,
}

#[derive(Default, Clone, Copy)]
struct PointRecord {
    solid_rho: Option<f64>,
    omega_xi0: f64,
    omega_xi_eps: f64,
    iota0: f64,
    iota_eps: f64,
    d_omega: f64,
    lam_defect: f64,
    density0: f64,
    density_eps: f64,
    d: f64,
    reeb_equal: bool,
    reeb_is_dphi: bool,
    f_res: f64,
    f_closed: f64,
    f_value: f64,
}

fn grid_points(m: &ManifoldModel, n: usize) -> Vec<PointTM> {
    let mut pts = Vec::new();
    let ang = |i: usize| i as f64 / n as f64;
    let mid = |j: usize| (j as f64 + 0.5) / n as f64;
    for b in m.bindings() {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    pts.push(PointTM::solid(b, ang(i), mid(j), ang(k)));
                }
            }
        }
    }
    let (r0, r1) = m.page.r_range();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                pts.push(PointTM::mapping_torus(ang(i), r0 + (r1 - r0) * mid(j), ang(k)));
            }
        }
    }
    pts
}

fn audit_point(
    m: &ManifoldModel,
    p0: &Profile,
    pe: &Profile,
    eps: f64,
    h: f64,
    pt: &PointTM,
) -> PointRecord {
    let l0 = lambda_with(m, p0, pt, 0.0);
    let le = lambda_with(m, pe, pt, eps);
    let x0 = reeb_with(m, p0, pt, 0.0);
    let xe = reeb_with(m, pe, pt, eps);
    let w = taming_with(m, p0, pt);
    let at = |c: [f64; 3]| PointTM { chart: pt.chart, coords: c };

    let d_omega = d_two_form(|c| taming_with(m, p0, &at(c)), pt.coords, h).abs();
    let f_of = |c: [f64; 3]| {
        let q = at(c);
        let l = lambda_with(m, pe, &q, eps);
        l.lambda.wedge_two(&taming_with(m, p0, &q)) / l.contact_density
    };
    let f_value = f_of(pt.coords);
    let f_res = w.max_abs_diff(&le.dlambda.scale(f_value));
    let f_closed = d_function(f_of, pt.coords, h).wedge_two(&le.dlambda).abs();

    let solid_rho = match pt.chart {
        Chart::SolidTorus(_) => Some(pt.coords[1]),
        Chart::MappingTorus => None,
    };
    let reeb_equal = x0.0.iter().zip(xe.0).all(|(a, b)| a.to_bits() == b.to_bits());
    let reeb_is_dphi = x0 == Vector3([0.0, 0.0, 1.0]);
    let d = solid_rho.map(|r| p0.sample_unchecked(r).d).unwrap_or(0.0);
    PointRecord {
        solid_rho,
        omega_xi0: l0.lambda.wedge_two(&w),
        omega_xi_eps: le.lambda.wedge_two(&w),
        iota0: w.contract(&x0).max_abs(),
        iota_eps: w.contract(&xe).max_abs(),
        d_omega,
        lam_defect: (l0.lambda.apply(&x0) - 1.0).abs().max((le.lambda.apply(&xe) - 1.0).abs()),
        density0: l0.contact_density,
        density_eps: le.contact_density,
        d,
        reeb_equal,
        reeb_is_dphi,
        f_res,
        f_closed,
        f_value,
    }
}

/// Period of the binding orbit, by flowing along `X_0` at `rho = 0` until
/// `theta` has gone once around.
fn binding_period(m: &ManifoldModel, p0: &Profile, b: Boundary) -> Result<f64> {
    let rhs = |_t: f64, y: &[f64; 1]| {
        let x = reeb_with(m, p0, &PointTM::solid(b, y[0].rem_euclid(1.0), 0.0, 0.0), 0.0);
        Ok([x.0[0]])
    };
    first_crossing(rhs, 1e3)
}

// Time at which the scalar state first reaches 1, refined by bisection on
// the dense output.
fn first_crossing(rhs: impl FnMut(f64, &[f64; 1]) -> Result<[f64; 1]>, t_max: f64) -> Result<f64> {
    let traj = integrate(rhs, 0.0, [0.0], t_max, &Options::with_tol(1e-13), |_, y| y[0] >= 1.0, &[])?;
    let (t1, y1) = traj.last();
    if y1[0] < 1.0 {
        return Ok(f64::INFINITY);
    }
    let mut lo = traj.t[traj.len() - 2];
    let mut hi = t1;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if traj.interpolate(mid).unwrap()[0] >= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Ok(hi)
}

/// Minimum time for `X_0`-orbits started on the page `phi = 0` to return to
/// it: a lower bound for the period of any orbit through the mapping torus.
fn min_return_time(m: &ManifoldModel, p0: &Profile, n: usize) -> Result<f64> {
    let (r0, r1) = m.page.r_range();
    let mut best = f64::INFINITY;
    for j in 0..n {
        for k in 0..4 {
            let r = r0 + (r1 - r0) * (j as f64 + 0.5) / n as f64;
            let tc = k as f64 / 4.0;
            // state: (phi, r, theta_c) unwrapped
            let traj_time = {
                let rhs = |_t: f64, y: &[f64; 3]| {
                    let pt = PointTM::mapping_torus(y[0].clamp(0.0, 1.0), y[1], y[2].rem_euclid(1.0));
                    Ok(reeb_with(m, p0, &pt, 0.0).0)
                };
                let traj = integrate(rhs, 0.0, [0.0, r, tc], 10.0, &Options::with_tol(1e-12), |_, y| y[0] >= 1.0, &[])?;
                let t_end = traj.last().0;
                let mut lo = traj.t[traj.len().saturating_sub(2)];
                let mut hi = t_end;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if traj.interpolate(mid).unwrap()[0] >= 1.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                hi
            };
            best = best.min(traj_time);
        }
    }
    Ok(best)
}

pub fn verify_shs(m: &ManifoldModel, p: &Profile, eps: f64, grid: &GridSpec) -> Result<ShsReport> {
    verify_shs_with(m, p, eps, grid, &ShsTolerances::default())
}

pub fn verify_shs_with(
    m: &ManifoldModel,
    p: &Profile,
    eps: f64,
    grid: &GridSpec,
    tol: &ShsTolerances,
) -> Result<ShsReport> {
    if grid.n < 3 {
        return Err(crate::Error::Domain(format!("grid needs at least 3 points per axis, got {}", grid.n)));
    }
    let p0 = p.unperturbed();
    let pe = profile_for(p, eps)?;
    let n = grid.n;
    let tol = *tol;
    let prm = *p0.params();
    let pts = grid_points(m, n);
    let recs: Vec<PointRecord> =
        pts.par_iter().map(|pt| audit_point(m, &p0, &pe, eps, grid.fd_step, pt)).collect();

    let mut r = ShsReport {
        eps,
        grid_n: n,
        points: recs.len(),
        tolerances: tol,
        min_omega_xi0: f64::INFINITY,
        min_omega_xi_eps: f64::INFINITY,
        sup_iota_x0: 0.0,
        sup_iota_x_eps: 0.0,
        sup_d_omega: 0.0,
        structural_closedness: vec![
            ("rho < 1-delta': omega_0 = d(f dtheta + g dphi)".into(), true),
            ("1-delta' <= rho < 1-delta: d(h(rho) dtheta^drho) = 0".into(), true),
            ("mapping torus: omega_0 = d alpha".into(), true),
        ],
        sup_lambda_of_reeb_defect: 0.0,
        contact_density_min: f64::INFINITY,
        contact_density_max: f64::NEG_INFINITY,
        confoliation_density_rel_err: 0.0,
        confoliation_zero_set_sup: 0.0,
        confoliation_zero_set_points: 0,
        min_d_contact_region: f64::INFINITY,
        reeb_bitwise_mismatches: 0,
        reeb_dphi_mismatches: 0,
        f_eps_form_residual: 0.0,
        f_eps_closedness: 0.0,
        f_eps_mapping_torus_dev: 0.0,
        sup_pullback_defect: 0.0,
        binding_period: 0.0,
        min_mapping_torus_return_time: 0.0,
        period_ratio: 0.0,
        pass: false,
    };
    for rec in &recs {
        r.min_omega_xi0 = r.min_omega_xi0.min(rec.omega_xi0);
        r.min_omega_xi_eps = r.min_omega_xi_eps.min(rec.omega_xi_eps);
        r.sup_iota_x0 = r.sup_iota_x0.max(rec.iota0);
        r.sup_iota_x_eps = r.sup_iota_x_eps.max(rec.iota_eps);
        r.sup_d_omega = r.sup_d_omega.max(rec.d_omega);
        r.sup_lambda_of_reeb_defect = r.sup_lambda_of_reeb_defect.max(rec.lam_defect);
        r.contact_density_min = r.contact_density_min.min(rec.density_eps);
        r.contact_density_max = r.contact_density_max.max(rec.density_eps);
        match rec.solid_rho {
            Some(rho) if rho < 1.0 - prm.delta => {
                r.confoliation_density_rel_err =
                    r.confoliation_density_rel_err.max((rec.density0 - rec.d).abs() / rec.d.abs());
                r.min_d_contact_region = r.min_d_contact_region.min(rec.d);
                if !rec.reeb_equal {
                    r.reeb_bitwise_mismatches += 1;
                }
                if rho >= 1.0 - prm.delta_prime && !rec.reeb_is_dphi {
                    r.reeb_dphi_mismatches += 1;
                }
            }
            _ => {
                r.confoliation_zero_set_sup = r.confoliation_zero_set_sup.max(rec.density0.abs());
                r.confoliation_zero_set_points += 1;
            }
        }
        if eps > 0.0 {
            r.f_eps_form_residual = r.f_eps_form_residual.max(rec.f_res);
            r.f_eps_closedness = r.f_eps_closedness.max(rec.f_closed);
            if rec.solid_rho.is_none() {
                r.f_eps_mapping_torus_dev =
                    r.f_eps_mapping_torus_dev.max((rec.f_value - 1.0 / eps).abs() * eps);
            }
        }
    }
    let (r0, r1) = m.page.r_range();
    for j in 0..n {
        for k in 0..n {
            let rr = r0 + (r1 - r0) * (j as f64 + 0.5) / n as f64;
            r.sup_pullback_defect = r.sup_pullback_defect.max(m.alpha_pullback_defect(rr, k as f64 / n as f64));
        }
    }
    r.binding_period = m
        .bindings()
        .into_iter()
        .map(|b| binding_period(m, &p0, b))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    r.min_mapping_torus_return_time = min_return_time(m, &p0, 10)?;
    r.period_ratio = r.binding_period / r.min_mapping_torus_return_time;

    let contact_ok = if eps > 0.0 { r.contact_density_min > 0.0 } else { true };
    let f_ok = eps == 0.0
        || (r.f_eps_form_residual <= tol.f_eps
            && r.f_eps_closedness <= tol.f_eps
            && r.f_eps_mapping_torus_dev <= tol.f_eps);
    r.pass = r.min_omega_xi0 > 0.0
        && r.min_omega_xi_eps > 0.0
        && r.sup_iota_x0 <= tol.iota
        && r.sup_iota_x_eps <= tol.iota
        && r.sup_d_omega <= tol.d_omega
        && r.sup_lambda_of_reeb_defect <= tol.lambda_of_reeb
        && contact_ok
        && r.confoliation_density_rel_err <= tol.density_rel
        && r.confoliation_zero_set_sup == 0.0
        && r.min_d_contact_region > 0.0
        && r.reeb_bitwise_mismatches == 0
        && r.reeb_dphi_mismatches == 0
        && f_ok
        && r.sup_pullback_defect <= tol.pullback
        && r.min_mapping_torus_return_time >= 1.0 - tol.return_time;
    Ok(r)
}
