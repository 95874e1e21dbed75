//! Page curves: the flat part of a page at level `a0` joined to one
//! half-cylinder per binding, and their `omega_0`-energy.

use serde::{Deserialize, Serialize};

use super::half_cylinder::{branch_for, rho_rate, solve_half_cylinder, HalfCylinderOptions, HalfCylinderSolution};
use crate::geometry::page::Boundary;
use crate::geometry::{taming_at, ManifoldModel, PointTM};
use crate::geometry::forms::Vector3;
use crate::profiles::Profile;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderPart {
    pub boundary: Boundary,
    pub solution: HalfCylinderSolution,
}

/// Where a half-cylinder meets the flat part (`rho = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Junction {
    pub boundary: Boundary,
    pub a_flat: f64,
    pub a_cylinder: f64,
    pub phi_flat: f64,
    pub phi_cylinder: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageCurve {
    pub phi0: f64,
    pub a0: f64,
    /// Page radii of the flat part (the page minus the `rho < 1` collars).
    pub flat_r_range: (f64, f64),
    pub cylinders: Vec<CylinderPart>,
    pub junctions: Vec<Junction>,
}

impl PageCurve {
    pub fn from_parts(
        m: &ManifoldModel,
        phi0: f64,
        a0: f64,
        cylinders: Vec<CylinderPart>,
    ) -> Result<Self> {
        for c in &cylinders {
            if c.solution.phi0 != phi0 {
                return Err(Error::Construction(format!(
                    "half-cylinder at {:?} has phi0 = {}, flat part has {phi0}",
                    c.boundary, c.solution.phi0
                )));
            }
        }
        let mut bs: Vec<Boundary> = cylinders.iter().map(|c| c.boundary).collect();
        bs.dedup();
        if bs != m.bindings() {
            return Err(Error::Construction("need exactly one half-cylinder per binding".into()));
        }
        let (lo, hi) = m.page.r_range();
        let d = m.delta;
        let flat_r_range = match m.bindings().len() {
            1 => (lo, hi - d),
            _ => (lo + d, hi - d),
        };
        let junctions = cylinders
            .iter()
            .map(|c| Junction {
                boundary: c.boundary,
                a_flat: a0,
                a_cylinder: c.solution.a[0],
                phi_flat: phi0,
                phi_cylinder: c.solution.phi0,
            })
            .collect();
        Ok(Self { phi0, a0, flat_r_range, cylinders, junctions })
    }

    /// Largest jump in `a` or `phi` across the junctions.
    pub fn junction_defect(&self) -> f64 {
        self.junctions
            .iter()
            .map(|j| (j.a_flat - j.a_cylinder).abs().max((j.phi_flat - j.phi_cylinder).abs()))
            .fold(0.0, f64::max)
    }

    /// Smallest gap between consecutive nodes of `rho(s)`; positive means
    /// each cylinder is embedded (the map is injective in `(s, t)`).
    pub fn min_node_separation(&self) -> f64 {
        self.cylinders
            .iter()
            .flat_map(|c| c.solution.rho.windows(2).map(|w| w[0] - w[1]))
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn assemble_page_curve(
    m: &ManifoldModel,
    p: &Profile,
    phi0: f64,
    a0: f64,
    opts: &HalfCylinderOptions,
) -> Result<PageCurve> {
    let sol = solve_half_cylinder(&p.unperturbed(), a0, phi0, opts)?;
    let cylinders = m
        .bindings()
        .into_iter()
        .map(|b| CylinderPart { boundary: b, solution: sol.clone() })
        .collect();
    PageCurve::from_parts(m, phi0, a0, cylinders)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub total: f64,
    pub flat: f64,
    pub flat_closed_form: f64,
    pub cylinders: Vec<f64>,
    /// Energy beyond the end of integration, `c - f(rho_end)`.
    pub tail: f64,
    /// Difference between full and half resolution quadrature.
    pub quadrature_error: f64,
}

/// `int u* omega_0` over `[0, s_end] x S^1`: composite Simpson on each
/// integration step (dense output inside the step), plus the closed-form
/// tail.
fn cylinder_energy(m: &ManifoldModel, p: &Profile, part: &CylinderPart, sub: usize) -> Result<(f64, f64, f64)> {
    let sol = &part.solution;
    let density = |s: f64| -> Result<f64> {
        let (_, rho) = sol.eval(s).unwrap();
        let w = taming_at(m, p, &PointTM::solid(part.boundary, 0.0, rho, sol.phi0))?;
        // rho' from the equation, not from the interpolant
        let us = Vector3([0.0, rho_rate(p, rho, branch_for(p, rho)), 0.0]);
        Ok(w.eval(&us, &Vector3([1.0, 0.0, 0.0])))
    };
    let simpson = |n: usize| -> Result<f64> {
        let mut total = 0.0;
        for w in sol.s.windows(2) {
            let h = (w[1] - w[0]) / n as f64;
            let mut acc = density(w[0])? + density(w[1])?;
            for k in 1..n {
                acc += density(w[0] + k as f64 * h)? * if k % 2 == 1 { 4.0 } else { 2.0 };
            }
            total += acc * h / 3.0;
        }
        Ok(total)
    };
    let fine = simpson(sub)?;
    let coarse = simpson(sub / 2)?;
    let tail = p.params().c - p.sample_unchecked(sol.rho_end()).f;
    Ok((fine + tail, (fine - coarse).abs(), tail))
}

pub fn omega_energy(m: &ManifoldModel, p: &Profile, curve: &PageCurve) -> Result<EnergyReport> {
    let p0 = p.unperturbed();
    let (lo, hi) = curve.flat_r_range;
    // flat part: int dalpha over the page region, by midpoint in r
    let n = 4000;
    let dr = (hi - lo) / n as f64;
    let flat: f64 = (0..n).map(|k| m.page.eta_profile(lo + (k as f64 + 0.5) * dr).1 * dr).sum();
    let flat_closed_form = m.page.eta_profile(hi).0 - m.page.eta_profile(lo).0;
    let mut cylinders = Vec::new();
    let mut err = (flat - flat_closed_form).abs();
    let mut tail = 0.0;
    for part in &curve.cylinders {
        let (e, q, t) = cylinder_energy(m, &p0, part, 16)?;
        cylinders.push(e);
        err = err.max(q);
        tail = f64::max(tail, t);
    }
    Ok(EnergyReport {
        total: flat + cylinders.iter().sum::<f64>(),
        flat,
        flat_closed_form,
        cylinders,
        tail,
        quadrature_error: err,
    })
}

/// Closed form of one half-cylinder's energy: `c - f(1 - delta')` from the
/// contact region, `int h` across the band, and `delta` from the collar.
pub fn half_cylinder_energy_closed_form(p: &Profile) -> f64 {
    let prm = *p.params();
    let p0 = p.unperturbed();
    let (lo, hi) = (1.0 - prm.delta_prime, 1.0 - prm.delta);
    let n = 20000;
    let h = (hi - lo) / n as f64;
    let mut band = p0.sample_unchecked(lo).h + p0.sample_unchecked(hi).h;
    for k in 1..n {
        band += p0.sample_unchecked(lo + k as f64 * h).h * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    band *= h / 3.0;
    (prm.c - p0.sample_unchecked(lo).f) + band + prm.delta
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_manifold;
    use crate::geometry::page::PageKind;
    use crate::geometry::tests::example_spec;
    use crate::profiles::build_profile;

    #[test]
    fn mismatched_phi_is_a_construction_error() {
        let spec = example_spec(PageKind::Disk { radius: 1.0 }, vec![]);
        let m = build_manifold(&spec).unwrap();
        let p = build_profile(spec.profile).unwrap();
        let sol = solve_half_cylinder(&p, 0.0, 0.25, &HalfCylinderOptions::new(40.0, 1e-9)).unwrap();
        let part = CylinderPart { boundary: Boundary::Outer, solution: sol };
        assert!(matches!(PageCurve::from_parts(&m, 0.5, 0.0, vec![part]), Err(Error::Construction(_))));
    }
}
