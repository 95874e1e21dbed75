//! Planar pages (disk, annulus), boundary collars, boundary-parallel Dehn
//! twists and the 1-forms `eta` and `alpha`.
//!
//! Page coordinates are polar `(r, theta_c)` with `theta_c` in R/Z. Each
//! boundary component carries collar coordinates `(rho, theta)` with
//! `rho = 1 - delta` on the boundary, increasing into the page, oriented so
//! that `dtheta ^ drho` agrees with `dr ^ dtheta_c`.

use serde::{Deserialize, Serialize};

use super::forms::{OneForm, TwoForm};
use crate::profiles::Ramp;
use crate::{Error, Result};

pub fn wrap01(x: f64) -> f64 {
    let y = x - x.floor();
    if y >= 1.0 {
        0.0
    } else {
        y
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PageKind {
    Disk { radius: f64 },
    Annulus { inner: f64, outer: f64 },
}

/// Which page boundary a collar belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Boundary {
    Outer,
    Inner,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PageModel {
    pub kind: PageKind,
    pub delta: f64,
    eta_ramp: Ramp,
    // Disk only: G = core_coeff * r^2 near the centre.
    core_coeff: f64,
}

impl PageModel {
    pub fn new(kind: PageKind, delta: f64) -> Result<Self> {
        let mut errs = Vec::new();
        let ramp = match kind {
            PageKind::Disk { radius } => {
                if !(radius > 4.0 * delta) {
                    errs.push("disk radius > 4 delta".to_string());
                }
                let end = radius - 2.0 * delta;
                Ramp::new(end / 2.0, end.max(end / 2.0 + 1e-9))
            }
            PageKind::Annulus { inner, outer } => {
                if !(inner > 0.0) {
                    errs.push("annulus inner radius > 0".to_string());
                }
                if !(outer - inner > 6.0 * delta) {
                    errs.push("annulus width > 6 delta (disjoint collars)".to_string());
                }
                if !(outer - inner < 2.0 + 2.0 * delta) {
                    errs.push("annulus width < 2 + 2 delta (monotone eta)".to_string());
                }
                Ramp::new(inner + 2.0 * delta, (outer - 2.0 * delta).max(inner + 2.0 * delta + 1e-9))
            }
        };
        let mut page = Self { kind, delta, eta_ramp: ramp, core_coeff: 0.5 };
        if let PageKind::Disk { .. } = kind {
            // The collar form must dominate the core form across the ramp.
            let lin = page.outer_collar_g(ramp.x0);
            if !(lin > 0.0) {
                errs.push("collar form 1 + delta - radius + r positive across the eta ramp".into());
            } else {
                page.core_coeff = 0.5f64.min(0.5 * lin / (ramp.x1 * ramp.x1));
            }
        }
        if errs.is_empty() {
            Ok(page)
        } else {
            Err(Error::Construction(format!("page model: {}", errs.join(", "))))
        }
    }

    pub fn boundaries(&self) -> Vec<Boundary> {
        match self.kind {
            PageKind::Disk { .. } => vec![Boundary::Outer],
            PageKind::Annulus { .. } => vec![Boundary::Outer, Boundary::Inner],
        }
    }

    pub fn r_range(&self) -> (f64, f64) {
        match self.kind {
            PageKind::Disk { radius } => (0.0, radius),
            PageKind::Annulus { inner, outer } => (inner, outer),
        }
    }

    pub fn contains(&self, r: f64) -> bool {
        let (a, b) = self.r_range();
        r >= a && r <= b
    }

    /// `(rho, theta)` of a page point inside the collar of `b`, if it is there.
    pub fn to_collar(&self, b: Boundary, r: f64, theta_c: f64) -> Option<(f64, f64)> {
        let (r0, r1) = self.r_range();
        let (rho, theta) = match b {
            Boundary::Outer => (1.0 - self.delta + (r1 - r), theta_c),
            Boundary::Inner => {
                if let PageKind::Disk { .. } = self.kind {
                    return None;
                }
                (1.0 - self.delta + (r - r0), wrap01(-theta_c))
            }
        };
        (rho >= 1.0 - self.delta && rho < 1.0 + self.delta).then_some((rho, wrap01(theta)))
    }

    pub fn from_collar(&self, b: Boundary, rho: f64, theta: f64) -> (f64, f64) {
        let (r0, r1) = self.r_range();
        match b {
            Boundary::Outer => (r1 - (rho - (1.0 - self.delta)), wrap01(theta)),
            Boundary::Inner => (r0 + (rho - (1.0 - self.delta)), wrap01(-theta)),
        }
    }

    fn outer_collar_g(&self, r: f64) -> f64 {
        let (_, r1) = self.r_range();
        1.0 + self.delta - r1 + r
    }

    fn inner_collar_g(&self, r: f64) -> f64 {
        let (r0, _) = self.r_range();
        -(1.0 + self.delta + r0 - r)
    }

    /// `eta = G(r) dtheta_c`; returns `(G, G', G'')`.
    pub fn eta_profile(&self, r: f64) -> (f64, f64, f64) {
        let (b, b1, b2) = self.eta_ramp.eval(r);
        let (lo, lo1, lo2) = match self.kind {
            PageKind::Disk { .. } => {
                let a = self.core_coeff;
                (a * r * r, 2.0 * a * r, 2.0 * a)
            }
            PageKind::Annulus { .. } => (self.inner_collar_g(r), 1.0, 0.0),
        };
        let (hi, hi1) = (self.outer_collar_g(r), 1.0);
        if b == 0.0 {
            return (lo, lo1, lo2);
        }
        if b == 1.0 {
            return (hi, hi1, 0.0);
        }
        (
            (1.0 - b) * lo + b * hi,
            (1.0 - b) * lo1 + b * hi1 + b1 * (hi - lo),
            (1.0 - b) * lo2 - 2.0 * b1 * lo1 + 2.0 * b1 * hi1 + b2 * (hi - lo),
        )
    }

    /// `eta` in page coordinates `(r, theta_c)`.
    pub fn eta(&self, r: f64) -> [f64; 2] {
        [0.0, self.eta_profile(r).0]
    }

    /// Density of `d eta` against `dr ^ dtheta_c`.
    pub fn d_eta_polar(&self, r: f64) -> f64 {
        self.eta_profile(r).1
    }

    /// Density of `d eta` against the Euclidean area `dx ^ dy`
    /// (`dx ^ dy = 2 pi r dr ^ dtheta_c`), with its limit at a disk centre.
    pub fn d_eta_area(&self, r: f64) -> f64 {
        if r == 0.0 {
            if let PageKind::Disk { .. } = self.kind {
                return 2.0 * self.core_coeff / (2.0 * std::f64::consts::PI);
            }
        }
        self.eta_profile(r).1 / (2.0 * std::f64::consts::PI * r)
    }
}

pub fn eta_on_page(page: &PageModel) -> impl Fn(f64, f64) -> [f64; 2] + '_ {
    move |r, _theta_c| page.eta(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Twist {
    pub r0: f64,
    pub r1: f64,
    pub count: i64,
}

/// Composition of boundary-parallel Dehn twists,
/// `(r, theta_c) -> (r, theta_c + sum_k count_k w_k(r))`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Monodromy {
    pub twists: Vec<Twist>,
}

impl Monodromy {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn is_identity(&self) -> bool {
        self.twists.iter().all(|t| t.count == 0)
    }

    pub fn validate(&self, page: &PageModel) -> Result<()> {
        let (a, b) = page.r_range();
        let lo = match page.kind {
            PageKind::Disk { .. } => a,
            PageKind::Annulus { .. } => a + 2.0 * page.delta,
        };
        let hi = b - 2.0 * page.delta;
        for t in &self.twists {
            if !(t.r0 >= lo && t.r1 <= hi && t.r1 > t.r0) {
                return Err(Error::Construction(format!(
                    "twist band [{}, {}] must lie in [{lo}, {hi}] away from the collars",
                    t.r0, t.r1
                )));
            }
        }
        Ok(())
    }

    /// Total angular shift `W(r)` with `W'` and `W''`.
    pub fn shift(&self, r: f64) -> (f64, f64, f64) {
        self.twists.iter().fold((0.0, 0.0, 0.0), |acc, t| {
            let (w, w1, w2) = Ramp::new(t.r0, t.r1).eval(r);
            let k = t.count as f64;
            (acc.0 + k * w, acc.1 + k * w1, acc.2 + k * w2)
        })
    }

    pub fn apply(&self, r: f64, theta_c: f64) -> (f64, f64) {
        (r, wrap01(theta_c + self.shift(r).0))
    }

    /// Jacobian `d psi` in `(r, theta_c)`.
    pub fn jacobian(&self, r: f64) -> [[f64; 2]; 2] {
        [[1.0, 0.0], [self.shift(r).1, 1.0]]
    }
}

/// Flat-ended interpolation parameter `tau(phi)` of `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauProfile {
    ramp: Ramp,
}

impl TauProfile {
    /// `tau` is 0 on `[0, flat]` and 1 on `[1 - flat, 1]`.
    pub fn new(flat: f64) -> Result<Self> {
        if !(flat > 0.0 && flat < 0.5) {
            return Err(Error::Construction(format!("tau flat width {flat} must lie in (0, 0.5)")));
        }
        Ok(Self { ramp: Ramp::new(flat, 1.0 - flat) })
    }

    pub fn eval(&self, phi: f64) -> (f64, f64) {
        let (t, t1, _) = self.ramp.eval(phi);
        (t, t1)
    }
}

/// `alpha = tau(phi) psi^* eta + (1 - tau(phi)) eta` in mapping-torus
/// coordinates `(phi, r, theta_c)`, and its exterior derivative.
pub fn alpha_on_mapping_torus(
    page: &PageModel,
    psi: &Monodromy,
    tau: &TauProfile,
    phi: f64,
    r: f64,
) -> (OneForm, TwoForm) {
    let (g, g1, _) = page.eta_profile(r);
    let (_, w1, _) = psi.shift(r);
    let (t, t1) = tau.eval(phi);
    let alpha = OneForm([0.0, t * g * w1, g]);
    // d(alpha) = tau' G W' dphi^dr + G' dr^dtheta_c
    let dalpha = TwoForm([t1 * g * w1, 0.0, g1]);
    (alpha, dalpha)
}
