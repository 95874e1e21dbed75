//! The almost complex structure `J0` on `R x M` and its Cartesian form near
//! the binding.
//!
//! On a solid torus, in the frame `(d/da, X0, v1, v2)` with `v1 = d/drho` and
//! `v2 = -g d/dtheta + f d/dphi`, `J0` sends `d/da -> X0`, `X0 -> -d/da`,
//! `v1 -> beta v2`, `v2 -> -v1/beta`. On the mapping torus `xi0` is the page
//! and `J0 d/dr = nu(r) d/dtheta_c` with `nu = 1` on the collars; on a disk
//! page `nu` blends to `1/(2 pi r)` around the centre.

use serde::{Deserialize, Serialize};

use crate::geometry::page::{Boundary, PageKind};
use crate::geometry::{reeb_at, Chart, ManifoldModel, PointTM};
use crate::profiles::{Profile, Ramp};
use crate::Result;

pub type Mat4 = [[f64; 4]; 4];

pub fn mat_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut c = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

/// Gauss–Jordan with partial pivoting; `None` when singular.
pub fn mat_inv(a: &Mat4) -> Option<Mat4> {
    let mut m = *a;
    let mut inv = [[0.0; 4]; 4];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for col in 0..4 {
        let piv = (col..4).max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))?;
        if !(m[piv][col].abs() >= 1e-300) {
            return None;
        }
        m.swap(col, piv);
        inv.swap(col, piv);
        let d = m[col][col];
        for k in 0..4 {
            m[col][k] /= d;
            inv[col][k] /= d;
        }
        for r in 0..4 {
            if r != col {
                let f = m[r][col];
                for k in 0..4 {
                    m[r][k] -= f * m[col][k];
                    inv[r][k] -= f * inv[col][k];
                }
            }
        }
    }
    Some(inv)
}

pub fn max_abs_diff(a: &Mat4, b: &Mat4) -> f64 {
    let mut d = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            d = d.max((a[i][j] - b[i][j]).abs());
        }
    }
    d
}

pub fn identity() -> Mat4 {
    let mut m = [[0.0; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcsSample {
    pub point: PointTM,
    /// `J0` in coordinates `(a, x1, x2, x3)` of the chart, column `k` being
    /// the image of the `k`-th coordinate vector.
    pub matrix: Mat4,
    /// `|J0^2 + 1|`.
    pub square_defect: f64,
    /// `|J0 d/da - X0|`.
    pub reeb_defect: f64,
}

fn frame_to_coords(cols: [[f64; 4]; 4], frame_j: Mat4) -> Option<Mat4> {
    // cols[k] is the k-th frame vector in coordinates
    let mut p = [[0.0; 4]; 4];
    for k in 0..4 {
        for i in 0..4 {
            p[i][k] = cols[k][i];
        }
    }
    Some(mat_mul(&mat_mul(&p, &frame_j), &mat_inv(&p)?))
}

fn page_nu(m: &ManifoldModel, r: f64) -> f64 {
    match m.page.kind {
        PageKind::Annulus { .. } => 1.0,
        PageKind::Disk { radius } => {
            let end = radius - 2.0 * m.delta;
            let (b, _, _) = Ramp::new(end / 4.0, end / 2.0).eval(r);
            if b >= 1.0 {
                1.0
            } else {
                (1.0 - b) / (2.0 * std::f64::consts::PI * r) + b
            }
        }
    }
}

#[allow(non_snake_case)]
pub fn J0_at(m: &ManifoldModel, p: &Profile, pt: &PointTM) -> Result<AcsSample> {
    m.check(pt)?;
    let p0 = p.unperturbed();
    let x0 = reeb_at(m, &p0, pt, 0.0)?;
    let xv = [0.0, x0.0[0], x0.0[1], x0.0[2]];
    let matrix = match pt.chart {
        Chart::SolidTorus(_) => {
            let s = p0.sample_unchecked(pt.coords[1]);
            let beta = s.beta;
            let frame_j = [
                [0.0, -1.0, 0.0, 0.0],
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, -1.0 / beta],
                [0.0, 0.0, beta, 0.0],
            ];
            let cols = [[1.0, 0.0, 0.0, 0.0], xv, [0.0, 0.0, 1.0, 0.0], [0.0, -s.g, 0.0, s.f]];
            if pt.coords[1] == 0.0 {
                // (rho, phi) degenerate at the binding; only the (a, theta)
                // block is meaningful there
                let c = p0.params().c;
                [[0.0, -c, 0.0, 0.0], [1.0 / c, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 0.0]]
            } else {
                frame_to_coords(cols, frame_j).expect("solid torus frame is a basis away from the binding")
            }
        }
        Chart::MappingTorus => {
            let nu = page_nu(m, pt.coords[1]);
            let frame_j = [
                [0.0, -1.0, 0.0, 0.0],
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, -1.0 / nu],
                [0.0, 0.0, nu, 0.0],
            ];
            let cols = [[1.0, 0.0, 0.0, 0.0], xv, [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]];
            frame_to_coords(cols, frame_j).expect("mapping torus frame is a basis")
        }
    };
    let sq = mat_mul(&matrix, &matrix);
    let mut neg = identity();
    for row in neg.iter_mut() {
        for v in row.iter_mut() {
            *v = -*v;
        }
    }
    let square_defect = if matches!(pt.chart, Chart::SolidTorus(_)) && pt.coords[1] == 0.0 {
        (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| (sq[i][j] - neg[i][j]).abs()).fold(0.0, f64::max)
    } else {
        max_abs_diff(&sq, &neg)
    };
    let reeb_defect = (0..4).map(|i| (matrix[i][0] - xv[i]).abs()).fold(0.0, f64::max);
    Ok(AcsSample { point: *pt, matrix, square_defect, reeb_defect })
}

/// `J0` near a binding in coordinates `(a, theta, x, y)` with
/// `(x, y) = rho (cos 2 pi phi, sin 2 pi phi)`.
pub fn j0_cartesian(m: &ManifoldModel, p: &Profile, b: Boundary, theta: f64, x: f64, y: f64) -> Result<Mat4> {
    let rho = x.hypot(y);
    let phi = crate::geometry::page::wrap01(y.atan2(x) / (2.0 * std::f64::consts::PI));
    let s = J0_at(m, p, &PointTM::solid(b, theta, rho, phi))?;
    let tau = 2.0 * std::f64::consts::PI;
    let (c, sn) = (x / rho, y / rho);
    // d(a, theta, x, y)/d(a, theta, rho, phi)
    let t = [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, c, -tau * y],
        [0.0, 0.0, sn, tau * x],
    ];
    let ti = mat_inv(&t).expect("polar Jacobian invertible away from the binding");
    Ok(mat_mul(&mat_mul(&t, &s.matrix), &ti))
}

/// Bounds on the Cartesian `J0` along a ray towards the binding: the largest
/// entry and the largest second difference at each radius, plus the spread
/// between the `phi = 0` and `phi = 1/4` rays.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartesianCheck {
    pub rho: f64,
    pub sup_entry: f64,
    pub sup_second_difference: f64,
    pub angular_spread: f64,
}

pub fn cartesian_smoothness(m: &ManifoldModel, p: &Profile, rhos: &[f64]) -> Result<Vec<CartesianCheck>> {
    let b = m.bindings()[0];
    rhos.iter()
        .map(|&rho| {
            let h = rho / 2.0;
            let j = |x: f64, y: f64| j0_cartesian(m, p, b, 0.25, x, y);
            let (jm, j0, jp) = (j(rho - h, 0.0)?, j(rho, 0.0)?, j(rho + h, 0.0)?);
            let jq = j(0.0, rho)?;
            let mut sup_entry = 0.0f64;
            let mut sup_dd = 0.0f64;
            for i in 0..4 {
                for k in 0..4 {
                    sup_entry = sup_entry.max(j0[i][k].abs());
                    sup_dd = sup_dd.max(((jp[i][k] - 2.0 * j0[i][k] + jm[i][k]) / (h * h)).abs());
                }
            }
            Ok(CartesianCheck { rho, sup_entry, sup_second_difference: sup_dd, angular_spread: max_abs_diff(&j0, &jq) })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::page::PageKind;
    use crate::geometry::tests::example_spec;
    use crate::geometry::build_manifold;
    use crate::profiles::build_profile;

    fn setup(kind: PageKind) -> (ManifoldModel, Profile) {
        let spec = example_spec(kind, vec![]);
        (build_manifold(&spec).unwrap(), build_profile(spec.profile).unwrap())
    }

    #[test]
    fn inverse_roundtrip() {
        let a = [[2.0, 1.0, 0.0, 0.0], [0.0, 1.0, 3.0, 0.0], [1.0, 0.0, 1.0, 1.0], [0.0, 2.0, 0.0, 1.0]];
        let i = mat_inv(&a).unwrap();
        assert!(max_abs_diff(&mat_mul(&a, &i), &identity()) < 1e-14);
    }

    #[test]
    fn squares_to_minus_one_everywhere() {
        let (m, p) = setup(PageKind::Disk { radius: 1.0 });
        for b in m.bindings() {
            for &rho in &[0.0, 1e-4, 0.2, 0.5, 0.88, 0.97, 1.0] {
                let s = J0_at(&m, &p, &PointTM::solid(b, 0.3, rho, 0.6)).unwrap();
                assert!(s.square_defect < 1e-10, "rho {rho}: {}", s.square_defect);
                assert!(s.reeb_defect < 1e-12);
            }
        }
        for &r in &[0.01, 0.05, 0.3, 0.8] {
            let s = J0_at(&m, &p, &PointTM::mapping_torus(0.4, r, 0.1)).unwrap();
            assert!(s.square_defect < 1e-10);
        }
    }

    #[test]
    fn agrees_across_the_gluing() {
        let (m, p) = setup(PageKind::Annulus { inner: 1.0, outer: 2.0 });
        for b in m.bindings() {
            let pt = PointTM::solid(b, 0.3, 0.97, 0.2);
            let js = J0_at(&m, &p, &pt).unwrap().matrix;
            let q = m.transition(&pt).unwrap();
            let jm = J0_at(&m, &p, &q).unwrap().matrix;
            // collar map: (theta, rho, phi) -> (phi, r, theta_c) is linear
            let jac = ManifoldModel::collar_jacobian(b);
            let mut t = [[0.0; 4]; 4];
            t[0][0] = 1.0;
            for i in 0..3 {
                for k in 0..3 {
                    t[i + 1][k + 1] = jac[i][k];
                }
            }
            let pulled = mat_mul(&mat_mul(&t, &js), &mat_inv(&t).unwrap());
            assert!(max_abs_diff(&pulled, &jm) < 1e-12, "{b:?} {pulled:?} {jm:?}");
        }
    }
}
