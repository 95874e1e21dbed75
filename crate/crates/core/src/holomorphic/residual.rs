//! Discrete Cauchy–Riemann residual of a sampled map into a solid-torus
//! chart, `u(s, t) = (a, theta, rho, phi)`.
//!
//! With `J0 d/da = X0` and `J0 d/drho = beta (-g d/dtheta + f d/dphi)` the
//! equation `u_s + J0 u_t = 0` reads, componentwise,
//!
//! ```text
//! a_s   = f theta_t + g phi_t          a_t   = -(f theta_s + g phi_s)
//! rho_s = (f' theta_t + g' phi_t)/(beta D)
//! rho_t = -(f' theta_s + g' phi_s)/(beta D)
//! ```
//!
//! For `rho >= 1 - delta'` the last two are replaced by the reduced form
//! `rho_s = -theta_t`, `rho_t = theta_s`, which is the same equation there.

use serde::{Deserialize, Serialize};

use crate::profiles::Profile;
use crate::{Error, Result};

/// Values on a uniform `n_s x n_t` grid, row-major in `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapSamples {
    pub n_s: usize,
    pub n_t: usize,
    pub h_s: f64,
    pub h_t: f64,
    pub s0: f64,
    pub values: Vec<[f64; 4]>,
}

impl MapSamples {
    pub fn at(&self, i: usize, j: usize) -> [f64; 4] {
        self.values[i * self.n_t + j]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualField {
    pub n_s: usize,
    pub n_t: usize,
    pub h: f64,
    /// Four residual components at the interior nodes, row-major.
    pub residuals: Vec<[f64; 4]>,
    /// Componentwise sup norm.
    pub sup: [f64; 4],
    pub sup_total: f64,
}

/// Difference of two angles in R/Z, mapped into `(-1/2, 1/2]`.
fn angle_diff(x: f64, y: f64) -> f64 {
    let d = x - y;
    d - (d + 0.5).ceil() + 1.0
}

/// Central differences in `s`; in `t` the grid is periodic, so every `t`
/// node is interior.
pub fn cr_residual(map: &MapSamples, p: &Profile) -> Result<ResidualField> {
    if map.n_s < 3 || map.n_t < 3 {
        return Err(Error::Domain(format!(
            "residual grid needs at least 3 points per axis, got {} x {}",
            map.n_s, map.n_t
        )));
    }
    if map.values.len() != map.n_s * map.n_t {
        return Err(Error::Domain("sample count does not match grid size".into()));
    }
    let prm = *p.params();
    let p0 = p.unperturbed();
    let mut residuals = Vec::with_capacity((map.n_s - 2) * map.n_t);
    let mut sup = [0.0f64; 4];
    for i in 1..map.n_s - 1 {
        for j in 0..map.n_t {
            let jp = (j + 1) % map.n_t;
            let jm = (j + map.n_t - 1) % map.n_t;
            let (sp, sm) = (map.at(i + 1, j), map.at(i - 1, j));
            let (tp, tm) = (map.at(i, jp), map.at(i, jm));
            let u = map.at(i, j);
            let ds = |k: usize| {
                let d = if k == 1 || k == 3 { angle_diff(sp[k], sm[k]) } else { sp[k] - sm[k] };
                d / (2.0 * map.h_s)
            };
            let dt = |k: usize| {
                let d = if k == 1 || k == 3 { angle_diff(tp[k], tm[k]) } else { tp[k] - tm[k] };
                d / (2.0 * map.h_t)
            };
            let rho = u[2];
            if !(0.0..=1.0).contains(&rho) {
                return Err(Error::Domain(format!("rho = {rho} outside the solid torus")));
            }
            let s = p0.sample_unchecked(rho);
            let (a_s, a_t) = (ds(0), dt(0));
            let (th_s, th_t) = (ds(1), dt(1));
            let (r_s, r_t) = (ds(2), dt(2));
            let (ph_s, ph_t) = (ds(3), dt(3));
            let r1 = a_s - (s.f * th_t + s.g * ph_t);
            let r2 = a_t + (s.f * th_s + s.g * ph_s);
            let (r3, r4) = if rho >= 1.0 - prm.delta_prime {
                (r_s + th_t, r_t - th_s)
            } else {
                let bd = s.beta * s.d;
                (r_s - (s.fp * th_t + s.gp * ph_t) / bd, r_t + (s.fp * th_s + s.gp * ph_s) / bd)
            };
            let r = [r1, r2, r3, r4];
            for k in 0..4 {
                sup[k] = sup[k].max(r[k].abs());
            }
            residuals.push(r);
        }
    }
    let sup_total = sup.iter().copied().fold(0.0, f64::max);
    Ok(ResidualField { n_s: map.n_s - 2, n_t: map.n_t, h: map.h_s, residuals, sup, sup_total })
}

/// Residual at step `h` and `h/2` on the window `[0, s_window]`, both taken
/// over the coarse nodes, and the ratio of the two sup norms (about 4 for a
/// second-order scheme).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Richardson {
    pub h: f64,
    pub s_window: f64,
    pub sup_h: f64,
    pub sup_half: f64,
    pub ratio: f64,
}

pub fn richardson_check(p: &Profile, s_window: f64, h: f64, n_t: usize, tol: f64) -> Result<Richardson> {
    use super::half_cylinder::sample_half_cylinder_map;
    let coarse = sample_half_cylinder_map(p, 0.0, 0.0, s_window, h, n_t, tol)?;
    let fine = sample_half_cylinder_map(p, 0.0, 0.0, s_window, h / 2.0, n_t, tol)?;
    let rc = cr_residual(&coarse, p)?;
    let rf = cr_residual(&fine, p)?;
    // Compare at the same points: coarse node i is fine node 2i, and the
    // residual row r belongs to grid node r + 1.
    let sup_half = rf
        .residuals
        .chunks(rf.n_t)
        .enumerate()
        .filter(|(r, _)| r % 2 == 1 && r / 2 < rc.n_s)
        .flat_map(|(_, row)| row.iter().flat_map(|v| v.iter().map(|x| x.abs())))
        .fold(0.0, f64::max);
    let sup_h = rc.sup_total;
    Ok(Richardson { h, s_window, sup_h, sup_half, ratio: sup_h / sup_half })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::build_profile;
    use crate::profiles::tests::example_params;

    #[test]
    fn angle_diff_wraps() {
        assert!((angle_diff(0.05, 0.95) - 0.1).abs() < 1e-15);
        assert!((angle_diff(0.95, 0.05) + 0.1).abs() < 1e-15);
    }

    #[test]
    fn small_grid_is_rejected() {
        let p = build_profile(example_params()).unwrap();
        let map = MapSamples { n_s: 2, n_t: 8, h_s: 0.1, h_t: 0.125, s0: 0.0, values: vec![[0.0; 4]; 16] };
        assert!(matches!(cr_residual(&map, &p), Err(Error::Domain(_))));
    }

    #[test]
    fn non_solution_has_large_residual() {
        let p = build_profile(example_params()).unwrap();
        // rho decreasing at the wrong rate in the reduced region
        let (n_s, n_t, h) = (5, 8, 0.01);
        let mut values = Vec::new();
        for i in 0..n_s {
            for j in 0..n_t {
                values.push([0.0, j as f64 / n_t as f64, 1.0 - 2.0 * h * i as f64, 0.0]);
            }
        }
        let map = MapSamples { n_s, n_t, h_s: h, h_t: 1.0 / n_t as f64, s0: 0.0, values };
        let r = cr_residual(&map, &p).unwrap();
        assert!((r.sup[2] - 1.0).abs() < 1e-9);
    }
}
