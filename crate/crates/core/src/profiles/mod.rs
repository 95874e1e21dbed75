//! Radial profile functions `f, g, beta, h` of the binding neighbourhood.
//!
//! On the solid torus `S^1 x D` with coordinates `(theta, rho, phi)` the
//! confoliation form is `f(rho) dtheta + g(rho) dphi`. The family used here is
//!
//! * `[0, rho1]`: `f = c + kappa rho^2`, `g = rho^2`, so `D = 2 c rho` and
//!   `f'/g' = kappa`;
//! * `g` ramps flat from `rho^2` to `1` across `[rho1, 1 - delta']`;
//! * `f` stays `c + kappa rho^2` until `1 - delta'` and ramps flat to `0`
//!   (or to `eps (2 - rho)` for the contact perturbation) across
//!   `[1 - delta', 1 - delta]`;
//! * `beta = 1/(rho f)` near the axis, ramped to `1` across `[rho1, rho2]`;
//! * `h` ramps from `-f'` to `1` across `[1 - delta', 1 - delta]`.

mod blend;
pub mod io;
pub mod kappa;
mod verify;

pub use blend::{blend, unit_step, Ramp};
pub use kappa::{IrrationalBase, KappaEntry};
pub use verify::{verify_profile, ProfileCheck, ProfileReport};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileParams {
    /// Binding period `f(0)`.
    pub c: f64,
    pub kappa: f64,
    pub delta: f64,
    pub delta_prime: f64,
    pub rho1: f64,
    pub rho2: f64,
}

impl ProfileParams {
    /// Every violated constraint, by name.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        let all = [self.c, self.kappa, self.delta, self.delta_prime, self.rho1, self.rho2];
        if all.iter().any(|x| !x.is_finite()) {
            v.push("all parameters finite".to_string());
            return v;
        }
        if self.c <= 0.0 {
            v.push("c > 0".into());
        }
        if self.kappa >= 0.0 {
            v.push("kappa < 0".into());
        }
        if !(self.delta > 0.0 && self.delta < 0.2) {
            v.push("0 < delta < 0.2".into());
        }
        if self.delta_prime <= self.delta {
            v.push("delta_prime > delta".into());
        }
        if self.delta_prime >= 1.0 {
            v.push("delta_prime < 1".into());
        }
        if self.rho1 <= 0.0 {
            v.push("rho1 > 0".into());
        }
        if self.rho2 <= self.rho1 {
            v.push("rho2 > rho1".into());
        }
        if self.rho2 >= 1.0 - self.delta_prime {
            v.push("rho2 < 1 - delta_prime".into());
        }
        let inner = 1.0 - self.delta;
        if self.c + self.kappa * inner * inner <= 0.0 {
            v.push("c + kappa * (1 - delta)^2 > 0".into());
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Construction(format!("profile parameters violate: {}", v.join(", "))))
        }
    }

    pub fn kappa_entry(&self) -> Option<KappaEntry> {
        kappa::lookup(self.kappa)
    }

    /// Right end of the collar, `1 + delta` (excluded from the domain).
    pub fn rho_max(&self) -> f64 {
        1.0 + self.delta
    }
}

/// Values of the profile at one radius. `d` is recomputed from the others.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub rho: f64,
    pub f: f64,
    pub g: f64,
    pub fp: f64,
    pub gp: f64,
    pub fpp: f64,
    pub gpp: f64,
    pub d: f64,
    pub beta: f64,
    pub h: f64,
}

impl ProfileSample {
    fn new(rho: f64, f: (f64, f64, f64), g: (f64, f64, f64), beta: f64, h: f64) -> Self {
        Self {
            rho,
            f: f.0,
            g: g.0,
            fp: f.1,
            gp: g.1,
            fpp: f.2,
            gpp: g.2,
            d: f.0 * g.1 - f.1 * g.0,
            beta,
            h,
        }
    }
}

/// Anything that can be sampled like a profile; `verify_profile` accepts any
/// implementor so that modified profiles can be audited too.
pub trait RadialProfile: Sync {
    fn params(&self) -> &ProfileParams;
    /// Sample without range checking.
    fn sample(&self, rho: f64) -> ProfileSample;
}

#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    params: ProfileParams,
    eps: Option<f64>,
    g_ramp: Ramp,
    f_ramp: Ramp,
    beta_ramp: Ramp,
}

impl Profile {
    /// Builds the profile without checking the parameters. Useful for
    /// auditing deliberately broken profiles; use [`build_profile`] otherwise.
    pub fn assemble_unchecked(params: ProfileParams) -> Self {
        let outer = 1.0 - params.delta_prime;
        let inner = 1.0 - params.delta;
        Self {
            params,
            eps: None,
            g_ramp: Ramp::new(params.rho1, outer),
            f_ramp: Ramp::new(outer, inner),
            beta_ramp: Ramp::new(params.rho1, params.rho2),
        }
    }

    pub fn params(&self) -> &ProfileParams {
        &self.params
    }

    /// Contact perturbation size, if this is a perturbed profile.
    pub fn eps(&self) -> Option<f64> {
        self.eps
    }

    pub fn eval(&self, rho: f64) -> Result<ProfileSample> {
        if !(rho >= 0.0 && rho < self.params.rho_max()) {
            return Err(Error::Domain(format!(
                "rho = {rho} outside [0, {})",
                self.params.rho_max()
            )));
        }
        Ok(self.sample_unchecked(rho))
    }

    fn base_f(&self, rho: f64) -> (f64, f64, f64) {
        let p = &self.params;
        (p.c + p.kappa * rho * rho, 2.0 * p.kappa * rho, 2.0 * p.kappa)
    }

    fn g_parts(&self, rho: f64) -> (f64, f64, f64) {
        let p = &self.params;
        if rho <= p.rho1 {
            (rho * rho, 2.0 * rho, 2.0)
        } else if rho < 1.0 - p.delta_prime {
            let (b, b1, b2) = self.g_ramp.eval(rho);
            let r2 = rho * rho;
            (
                (1.0 - b) * r2 + b,
                (1.0 - b) * 2.0 * rho + b1 * (1.0 - r2),
                2.0 * (1.0 - b) - 4.0 * rho * b1 + b2 * (1.0 - r2),
            )
        } else {
            (1.0, 0.0, 0.0)
        }
    }

    // `target` is the collar value of f: 0 unperturbed, eps (2 - rho) perturbed.
    fn f_parts_with(&self, rho: f64, eps: f64) -> (f64, f64, f64) {
        let p = &self.params;
        if rho < 1.0 - p.delta_prime {
            self.base_f(rho)
        } else if rho < 1.0 - p.delta {
            let (q, q1, q2) = self.base_f(rho);
            let (e, e1) = (eps * (2.0 - rho), -eps);
            let (b, b1, b2) = self.f_ramp.eval(rho);
            (
                (1.0 - b) * q + b * e,
                (1.0 - b) * q1 + b * e1 + b1 * (e - q),
                (1.0 - b) * q2 - 2.0 * b1 * q1 + 2.0 * b1 * e1 + b2 * (e - q),
            )
        } else {
            (eps * (2.0 - rho), -eps, 0.0)
        }
    }

    fn beta_of(&self, rho: f64, f: f64) -> f64 {
        let p = &self.params;
        if rho <= p.rho1 {
            1.0 / (rho * f)
        } else if rho < p.rho2 {
            let (b, _, _) = self.beta_ramp.eval(rho);
            (1.0 - b) / (rho * f) + b
        } else {
            1.0
        }
    }

    // h belongs to the taming form, so it always uses the unperturbed f'.
    // Outside [1 - delta', 1 - delta] it is continued as -f' (inside) and 1 (outside).
    fn h_of(&self, rho: f64) -> f64 {
        let p = &self.params;
        if rho >= 1.0 - p.delta {
            1.0
        } else {
            let fp = self.f_parts_with(rho, 0.0).1;
            if rho < 1.0 - p.delta_prime {
                -fp
            } else {
                let (b, _, _) = self.f_ramp.eval(rho);
                (1.0 - b) * (-fp) + b
            }
        }
    }

    pub fn sample_unchecked(&self, rho: f64) -> ProfileSample {
        let f = self.f_parts_with(rho, self.eps.unwrap_or(0.0));
        let g = self.g_parts(rho);
        let beta = self.beta_of(rho, f.0);
        ProfileSample::new(rho, f, g, beta, self.h_of(rho))
    }

    /// The unperturbed profile underlying this one.
    pub fn unperturbed(&self) -> Profile {
        Profile { eps: None, ..self.clone() }
    }
}

impl RadialProfile for Profile {
    fn params(&self) -> &ProfileParams {
        &self.params
    }

    fn sample(&self, rho: f64) -> ProfileSample {
        self.sample_unchecked(rho)
    }
}

pub fn build_profile(params: ProfileParams) -> Result<Profile> {
    params.validate()?;
    Ok(Profile::assemble_unchecked(params))
}

pub fn eval_profile(p: &Profile, rho: f64) -> Result<ProfileSample> {
    p.eval(rho)
}

/// Largest admissible contact perturbation: `eps (1 + delta') < f(1 - delta)`
/// before the zero ramp, which keeps `f_eps` strictly decreasing on the ramp.
pub fn max_perturbation(params: &ProfileParams) -> f64 {
    let inner = 1.0 - params.delta;
    (params.c + params.kappa * inner * inner) / (1.0 + params.delta_prime)
}

/// Contact perturbation: `(f_eps, g_eps) = (eps (2 - rho), 1)` on the collar,
/// unchanged on `[0, 1 - delta']`.
pub fn perturb_profile(p: &Profile, eps: f64) -> Result<Profile> {
    let bound = max_perturbation(&p.params);
    if !(eps > 0.0 && eps < bound) {
        return Err(Error::Feasibility(format!(
            "eps = {eps} must lie in (0, {bound}) for a strictly decreasing f_eps"
        )));
    }
    Ok(Profile { eps: Some(eps), ..p.unperturbed() })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn example_params() -> ProfileParams {
        ProfileParams {
            c: 0.1,
            kappa: -std::f64::consts::SQRT_2 / 100.0,
            delta: 0.05,
            delta_prime: 0.1,
            rho1: 0.25,
            rho2: 0.5,
        }
    }

    #[test]
    fn boundary_values() {
        let p = build_profile(example_params()).unwrap();
        let s0 = p.eval(0.0).unwrap();
        assert_eq!((s0.f, s0.g), (0.1, 0.0));
        let s1 = p.eval(1.0).unwrap();
        assert_eq!((s1.f, s1.g), (0.0, 1.0));
        let s = p.eval(0.1).unwrap();
        assert!((s.d - 0.02).abs() < 1e-16);
        assert!((s.f - 0.099859).abs() < 1e-6);
        assert_eq!(s.g, 0.1 * 0.1);
    }

    #[test]
    fn collar_band_has_g_one() {
        let p = build_profile(example_params()).unwrap();
        let s = p.eval(0.92).unwrap();
        assert_eq!((s.g, s.gp), (1.0, 0.0));
        assert_eq!(s.d, -s.fp);
        assert!(s.d > 0.0);
        assert_eq!(p.eval(0.97).map(|s| (s.f, s.g)).unwrap(), (0.0, 1.0));
    }

    #[test]
    fn rejects_out_of_range() {
        let p = build_profile(example_params()).unwrap();
        assert!(matches!(p.eval(1.05), Err(Error::Domain(_))));
        assert!(matches!(p.eval(-1e-9), Err(Error::Domain(_))));
    }

    #[test]
    fn construction_names_violations() {
        let mut params = example_params();
        params.rho2 = 0.95;
        let err = build_profile(params).unwrap_err().to_string();
        assert!(err.contains("rho2 < 1 - delta_prime"), "{err}");
        params = example_params();
        params.delta_prime = 0.04;
        let err = build_profile(params).unwrap_err().to_string();
        assert!(err.contains("delta_prime > delta"), "{err}");
    }

    #[test]
    fn perturbation() {
        let p = build_profile(example_params()).unwrap();
        let pe = perturb_profile(&p, 0.01).unwrap();
        let s = pe.eval(1.0).unwrap();
        assert_eq!((s.f, s.g), (0.01 * (2.0 - 1.0), 1.0));
        assert_eq!(pe.eval(0.5).unwrap(), p.eval(0.5).unwrap());
        assert!(matches!(perturb_profile(&p, 0.5), Err(Error::Feasibility(_))));
        assert!(matches!(perturb_profile(&p, 0.0), Err(Error::Feasibility(_))));
    }
}
