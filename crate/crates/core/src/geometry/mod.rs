//! The glued manifold `M = P_psi u (solid tori)` and the forms living on it.
//!
//! Two kinds of chart:
//!
//! * mapping torus, coordinates `(phi, r, theta_c)`, positive volume
//!   `dphi ^ dr ^ dtheta_c`;
//! * one solid torus per binding component, coordinates `(theta, rho, phi)`
//!   with `rho` in `[0, 1]`, positive volume `dtheta ^ drho ^ dphi`.
//!
//! All angles live in R/Z. The solid torus of boundary `b` is glued to the
//! collar of `b` by the identity in `(theta, rho, phi)` on `rho` in
//! `[1 - delta, 1]`.

pub mod forms;
pub mod page;
mod shs;

pub use forms::{OneForm, TwoForm, Vector3};
pub use page::{
    alpha_on_mapping_torus, eta_on_page, wrap01, Boundary, Monodromy, PageKind, PageModel,
    TauProfile, Twist,
};
pub use shs::{verify_shs, verify_shs_with, GridSpec, ShsReport, ShsTolerances};

use serde::{Deserialize, Serialize};

use crate::profiles::{perturb_profile, Profile, ProfileParams};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpenBookSpec {
    pub page: PageKind,
    #[serde(default)]
    pub twists: Vec<Twist>,
    pub profile: ProfileParams,
    pub epsilon: f64,
    /// Width of the flat ends of `tau` in `alpha`.
    #[serde(default = "default_tau_flat")]
    pub tau_flat: f64,
}

fn default_tau_flat() -> f64 {
    0.1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chart {
    MappingTorus,
    SolidTorus(Boundary),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointTM {
    pub chart: Chart,
    pub coords: [f64; 3],
}

impl PointTM {
    pub fn mapping_torus(phi: f64, r: f64, theta_c: f64) -> Self {
        Self { chart: Chart::MappingTorus, coords: [phi, r, theta_c] }
    }

    pub fn solid(b: Boundary, theta: f64, rho: f64, phi: f64) -> Self {
        Self { chart: Chart::SolidTorus(b), coords: [theta, rho, phi] }
    }

    /// Fibration coordinate `phi`.
    pub fn phi(&self) -> f64 {
        match self.chart {
            Chart::MappingTorus => self.coords[0],
            Chart::SolidTorus(_) => self.coords[2],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldModel {
    pub page: PageModel,
    pub monodromy: Monodromy,
    pub tau: TauProfile,
    pub delta: f64,
}

pub fn build_manifold(spec: &OpenBookSpec) -> Result<ManifoldModel> {
    spec.profile.validate()?;
    let page = PageModel::new(spec.page, spec.profile.delta)?;
    let monodromy = Monodromy { twists: spec.twists.clone() };
    monodromy.validate(&page)?;
    let tau = TauProfile::new(spec.tau_flat)?;
    Ok(ManifoldModel { page, monodromy, tau, delta: spec.profile.delta })
}

impl ManifoldModel {
    pub fn bindings(&self) -> Vec<Boundary> {
        self.page.boundaries()
    }

    pub fn binding_count(&self) -> usize {
        self.bindings().len()
    }

    pub fn contains(&self, pt: &PointTM) -> bool {
        let [a, b, c] = pt.coords;
        let ang = |x: f64| (0.0..1.0).contains(&x);
        match pt.chart {
            Chart::MappingTorus => ang(a) && self.page.contains(b) && ang(c),
            Chart::SolidTorus(bd) => {
                self.bindings().contains(&bd) && ang(a) && (0.0..=1.0).contains(&b) && ang(c)
            }
        }
    }

    pub fn check(&self, pt: &PointTM) -> Result<()> {
        if self.contains(pt) {
            Ok(())
        } else {
            Err(Error::Domain(format!("point {pt:?} lies in no chart")))
        }
    }

    /// Expresses an overlap point in the other chart.
    pub fn transition(&self, pt: &PointTM) -> Option<PointTM> {
        match pt.chart {
            Chart::SolidTorus(b) => {
                let [theta, rho, phi] = pt.coords;
                (rho >= 1.0 - self.delta && rho <= 1.0).then(|| {
                    let (r, tc) = self.page.from_collar(b, rho, theta);
                    PointTM::mapping_torus(phi, r, tc)
                })
            }
            Chart::MappingTorus => {
                let [phi, r, tc] = pt.coords;
                self.bindings().into_iter().find_map(|b| {
                    self.page
                        .to_collar(b, r, tc)
                        .filter(|&(rho, _)| rho <= 1.0)
                        .map(|(rho, theta)| PointTM::solid(b, theta, rho, phi))
                })
            }
        }
    }

    /// Jacobian `d(theta, rho, phi) / d(phi, r, theta_c)` on the collar of `b`.
    pub fn collar_jacobian(b: Boundary) -> [[f64; 3]; 3] {
        match b {
            Boundary::Outer => [[0.0, 0.0, 1.0], [0.0, -1.0, 0.0], [1.0, 0.0, 0.0]],
            Boundary::Inner => [[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0]],
        }
    }

    /// Pulls a solid-torus 1-form back to mapping-torus coordinates.
    pub fn solid_form_to_mapping_torus(b: Boundary, a: &OneForm) -> OneForm {
        let j = Self::collar_jacobian(b);
        let mut out = [0.0; 3];
        for (k, o) in out.iter_mut().enumerate() {
            *o = (0..3).map(|i| a.0[i] * j[i][k]).sum();
        }
        OneForm(out)
    }

    /// Pushes a mapping-torus vector into solid-torus coordinates.
    pub fn mapping_torus_vector_to_solid(b: Boundary, v: &Vector3) -> Vector3 {
        let j = Self::collar_jacobian(b);
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..3).map(|k| j[i][k] * v.0[k]).sum();
        }
        Vector3(out)
    }

    /// `|alpha(1, p) - psi^* alpha(0, psi(p))|` at page point `p`.
    pub fn alpha_pullback_defect(&self, r: f64, theta_c: f64) -> f64 {
        let (end, _) = alpha_on_mapping_torus(&self.page, &self.monodromy, &self.tau, 1.0, r);
        let (r2, _) = self.monodromy.apply(r, theta_c);
        let (start, _) = alpha_on_mapping_torus(&self.page, &self.monodromy, &self.tau, 0.0, r2);
        let jac = self.monodromy.jacobian(r);
        // page components (r, theta_c) live at indices 1, 2
        let pulled_r = start.0[1] * jac[0][0] + start.0[2] * jac[1][0];
        let pulled_t = start.0[1] * jac[0][1] + start.0[2] * jac[1][1];
        (end.0[1] - pulled_r).abs().max((end.0[2] - pulled_t).abs()).max((end.0[0] - start.0[0]).abs())
    }
}

/// `lambda`, `d lambda` and the contact density `lambda ^ d lambda` against
/// the chart's positive volume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaSample {
    pub lambda: OneForm,
    pub dlambda: TwoForm,
    pub contact_density: f64,
}

fn profile_for(p: &Profile, eps: f64) -> Result<Profile> {
    if eps < 0.0 {
        return Err(Error::Domain(format!("eps = {eps} must be >= 0")));
    }
    if eps == 0.0 {
        Ok(p.unperturbed())
    } else {
        perturb_profile(&p.unperturbed(), eps)
    }
}

/// `lambda_0` (`eps = 0`) or `lambda_eps` at a point.
pub fn lambda_at(m: &ManifoldModel, p: &Profile, pt: &PointTM, eps: f64) -> Result<LambdaSample> {
    m.check(pt)?;
    let prof = profile_for(p, eps)?;
    Ok(lambda_with(m, &prof, pt, eps))
}

fn lambda_with(m: &ManifoldModel, prof: &Profile, pt: &PointTM, eps: f64) -> LambdaSample {
    let (lambda, dlambda) = match pt.chart {
        Chart::SolidTorus(_) => {
            let s = prof.sample_unchecked(pt.coords[1]);
            (OneForm([s.f, 0.0, s.g]), TwoForm([-s.fp, 0.0, s.gp]))
        }
        Chart::MappingTorus => {
            let [phi, r, _] = pt.coords;
            let (a, da) = alpha_on_mapping_torus(&m.page, &m.monodromy, &m.tau, phi, r);
            (OneForm([1.0, eps * a.0[1], eps * a.0[2]]), da.scale(eps))
        }
    };
    LambdaSample { lambda, dlambda, contact_density: lambda.wedge_two(&dlambda) }
}

/// Reeb field of `lambda_0` (`eps = 0`, the `eps -> 0` limit on the mapping
/// torus) or of `lambda_eps`.
pub fn reeb_at(m: &ManifoldModel, p: &Profile, pt: &PointTM, eps: f64) -> Result<Vector3> {
    m.check(pt)?;
    let prof = profile_for(p, eps)?;
    Ok(reeb_with(m, &prof, pt, eps))
}

fn reeb_with(m: &ManifoldModel, prof: &Profile, pt: &PointTM, eps: f64) -> Vector3 {
    match pt.chart {
        Chart::SolidTorus(_) => {
            let rho = pt.coords[1];
            if rho == 0.0 {
                return Vector3([1.0 / prof.params().c, 0.0, 0.0]);
            }
            if eps == 0.0 && rho >= 1.0 - prof.params().delta {
                return Vector3([0.0, 0.0, 1.0]);
            }
            let s = prof.sample_unchecked(rho);
            Vector3([s.gp / s.d, 0.0, -s.fp / s.d])
        }
        Chart::MappingTorus => {
            let [phi, r, _] = pt.coords;
            let (a, da) = alpha_on_mapping_torus(&m.page, &m.monodromy, &m.tau, phi, r);
            let x0 = kernel_with_unit_dphi(&da);
            if eps == 0.0 {
                x0
            } else {
                let lam = OneForm([1.0, eps * a.0[1], eps * a.0[2]]);
                x0.scale(1.0 / lam.apply(&x0))
            }
        }
    }
}

/// The vector `X = dphi + A dr + B dtheta_c` spanning `ker w` on the
/// mapping torus, from the 2x2 system `(i_X w)_r = (i_X w)_theta = 0`.
fn kernel_with_unit_dphi(w: &TwoForm) -> Vector3 {
    // (i_X w)_r     = w_phi,r + B w_theta,r  = w01 - B w12
    // (i_X w)_theta = w_phi,th + A w_r,th    = w02 + A w12
    let m = [[0.0, -w.0[2]], [w.0[2], 0.0]];
    let rhs = [-w.0[0], -w.0[1]];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let a = (rhs[0] * m[1][1] - m[0][1] * rhs[1]) / det;
    let b = (m[0][0] * rhs[1] - rhs[0] * m[1][0]) / det;
    Vector3([1.0, a, b])
}

/// The taming form `omega_0`.
pub fn taming_at(m: &ManifoldModel, p: &Profile, pt: &PointTM) -> Result<TwoForm> {
    m.check(pt)?;
    Ok(taming_with(m, &p.unperturbed(), pt))
}

fn taming_with(m: &ManifoldModel, prof: &Profile, pt: &PointTM) -> TwoForm {
    match pt.chart {
        Chart::SolidTorus(_) => {
            let rho = pt.coords[1];
            let prm = prof.params();
            if rho < 1.0 - prm.delta_prime {
                let s = prof.sample_unchecked(rho);
                TwoForm([-s.fp, 0.0, s.gp])
            } else {
                // h(rho) dtheta ^ drho, with h = 1 from 1 - delta on
                TwoForm([prof.sample_unchecked(rho).h, 0.0, 0.0])
            }
        }
        Chart::MappingTorus => {
            let [phi, r, _] = pt.coords;
            alpha_on_mapping_torus(&m.page, &m.monodromy, &m.tau, phi, r).1
        }
    }
}

/// Everything at one point, for `eps = 0` and a given `eps > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormSample {
    pub point: PointTM,
    pub lambda0: LambdaSample,
    pub lambda_eps: LambdaSample,
    pub reeb0: Vector3,
    pub reeb_eps: Vector3,
    pub omega0: TwoForm,
}

pub fn form_sample(m: &ManifoldModel, p: &Profile, pt: &PointTM, eps: f64) -> Result<FormSample> {
    m.check(pt)?;
    let p0 = p.unperturbed();
    let pe = profile_for(p, eps)?;
    Ok(FormSample {
        point: *pt,
        lambda0: lambda_with(m, &p0, pt, 0.0),
        lambda_eps: lambda_with(m, &pe, pt, eps),
        reeb0: reeb_with(m, &p0, pt, 0.0),
        reeb_eps: reeb_with(m, &pe, pt, eps),
        omega0: taming_with(m, &p0, pt),
    })
}
