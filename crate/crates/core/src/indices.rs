//! Conley–Zehnder indices of the binding orbit and its covers, and the
//! index arithmetic `ind(u) = chi + 2 c1(N_u) + sum mu` and
//! `2 c1(N_u) = ind(u) - 2 + 2g + #Gamma_0`.
//!
//! The trivialisation of `xi0` along the binding is the constant frame
//! `(d/dx, d/dy)` with `(x, y) = rho (cos 2pi phi, sin 2pi phi)`. Near
//! `rho = 0` the Reeb field is `(1/c) d/dtheta - (kappa/c) 2pi (x d/dy - y d/dx)`,
//! so one period `c` rotates the normal plane by `-kappa` turns.

use serde::{Deserialize, Serialize};

use crate::holomorphic::PageCurve;
use crate::ode::{integrate, Options};
use crate::profiles::{KappaEntry, Profile};
use crate::{Error, Result};

pub type Mat2 = [[f64; 2]; 2];

fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

pub fn rotation(turns: f64) -> Mat2 {
    let (s, c) = (2.0 * std::f64::consts::PI * turns).sin_cos();
    [[c, -s], [s, c]]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymplecticPath {
    pub t: Vec<f64>,
    pub psi: Vec<Mat2>,
}

impl SymplecticPath {
    pub fn new(t: Vec<f64>, psi: Vec<Mat2>) -> Result<Self> {
        if t.len() != psi.len() || t.len() < 2 {
            return Err(Error::Construction("path needs matching times and matrices, at least two".into()));
        }
        if psi[0] != [[1.0, 0.0], [0.0, 1.0]] {
            return Err(Error::Construction("path must start at the identity".into()));
        }
        for (j, m) in psi.iter().enumerate() {
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            if !((det - 1.0).abs() <= 1e-9) {
                return Err(Error::Construction(format!("det psi(t_{j}) = {det}")));
            }
        }
        Ok(Self { t, psi })
    }

    /// Rigid rotation by `turns` full turns in total, uniformly in time.
    pub fn rotation(turns: f64, period: f64, n: usize) -> Self {
        let mut t: Vec<f64> = (0..=n).map(|j| period * j as f64 / n as f64).collect();
        t[n] = period;
        let psi = (0..=n).map(|j| if j == 0 { [[1.0, 0.0], [0.0, 1.0]] } else { rotation(turns * j as f64 / n as f64) }).collect();
        Self { t, psi }
    }

    pub fn end(&self) -> Mat2 {
        *self.psi.last().unwrap()
    }

    pub fn max_abs_diff(&self, other: &SymplecticPath) -> f64 {
        self.psi
            .iter()
            .zip(&other.psi)
            .flat_map(|(a, b)| (0..4).map(move |k| (a[k / 2][k % 2] - b[k / 2][k % 2]).abs()))
            .fold(0.0, f64::max)
    }
}

/// Rotation speed of the transverse linearisation at the binding, in turns
/// per unit time, from the Reeb field of the profile.
fn binding_angular_speed(p: &Profile) -> f64 {
    // X^phi = -f'/D, which is constant on the region where f'/g' = kappa
    let s = p.unperturbed().sample_unchecked(1e-6);
    -s.fp / s.d
}

/// Closed form: rotation by `-kappa k` turns over time `k c`.
pub fn closed_form_return_path(p: &Profile, k: u32, n: usize) -> SymplecticPath {
    let prm = p.params();
    SymplecticPath::rotation(-prm.kappa * k as f64, prm.c * k as f64, n)
}

fn samples_for(k: u32) -> usize {
    (32 * k as usize).max(64)
}

/// Integrates the variational equation `Psi' = A Psi` of the Reeb flow along
/// the `k`-fold binding orbit, sampled at `32 k` (at least 64) equal steps.
pub fn linearized_return_path(p: &Profile, k: u32) -> Result<SymplecticPath> {
    if k == 0 {
        return Err(Error::Domain("cover multiplicity must be >= 1".into()));
    }
    let c = p.params().c;
    let w = 2.0 * std::f64::consts::PI * binding_angular_speed(p);
    // d/dt (x, y) = 2pi X^phi (-y, x)
    let a: Mat2 = [[0.0, -w], [w, 0.0]];
    let n = samples_for(k);
    let period = c * k as f64;
    let mut times: Vec<f64> = (0..=n).map(|j| period * j as f64 / n as f64).collect();
    times[n] = period;
    let rhs = |_t: f64, y: &[f64; 4]| -> Result<[f64; 4]> {
        let m = [[y[0], y[1]], [y[2], y[3]]];
        let d = mat2_mul(&a, &m);
        Ok([d[0][0], d[0][1], d[1][0], d[1][1]])
    };
    let mut opts = Options::with_tol(1e-13);
    opts.h_init = period / n as f64 / 4.0;
    let traj = integrate(rhs, 0.0, [1.0, 0.0, 0.0, 1.0], period, &opts, |_, _| false, &times[1..])?;
    let mut psi = Vec::with_capacity(n + 1);
    let mut j = 0;
    for (t, y) in traj.t.iter().zip(&traj.y) {
        if j <= n && *t == times[j] {
            psi.push([[y[0], y[1]], [y[2], y[3]]]);
            j += 1;
        }
    }
    if psi.len() != n + 1 {
        return Err(Error::Integration("sample times were not all hit".into()));
    }
    SymplecticPath::new(times, psi)
}

/// Rotation-number algorithm: the winding (in turns) of `Psi(t) v` over the
/// path, for unit vectors `v` on a fine circle, spans an interval `I`. If `I`
/// contains an integer `k` the index is `2k`, otherwise `2 floor(I) + 1`.
pub fn conley_zehnder(path: &SymplecticPath) -> Result<i64> {
    let end = path.end();
    let tr = end[0][0] + end[1][1];
    if (2.0 - tr).abs() <= 1e-9 {
        return Err(Error::Degenerate(format!("endpoint has eigenvalue 1 (trace {tr})")));
    }
    let dirs = 64;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for d in 0..dirs {
        let ang = std::f64::consts::PI * d as f64 / dirs as f64;
        let v = [ang.cos(), ang.sin()];
        let mut prev = ang;
        let mut wind = 0.0;
        for m in &path.psi[1..] {
            let w = [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]];
            let a = w[1].atan2(w[0]);
            let mut step = a - prev;
            step -= (step / std::f64::consts::TAU).round() * std::f64::consts::TAU;
            if step.abs() > 0.45 * std::f64::consts::TAU {
                return Err(Error::Domain("path sampled too coarsely to track winding".into()));
            }
            wind += step;
            prev = a;
        }
        let turns = wind / std::f64::consts::TAU;
        lo = lo.min(turns);
        hi = hi.max(turns);
    }
    let k = hi.floor();
    Ok(if k >= lo { 2 * k as i64 } else { 2 * lo.floor() as i64 + 1 })
}

/// Distance of `k kappa` to the nearest integer, minimised over
/// `k = 1..=k_max`, with the minimising `k`.
pub fn nondegeneracy_audit(entry: KappaEntry, k_max: u32) -> (f64, u32) {
    let kappa = entry.value();
    (1..=k_max)
        .map(|k| {
            let x = k as f64 * kappa;
            ((x - x.round()).abs(), k)
        })
        .fold((f64::INFINITY, 0), |a, b| if b.0 < a.0 { b } else { a })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Puncture {
    pub mu: i64,
    pub even: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveTopology {
    pub genus: u32,
    pub punctures: Vec<Puncture>,
    pub c1: i64,
}

impl CurveTopology {
    pub fn new(genus: u32, mus: &[i64], c1: i64) -> Self {
        let punctures = mus.iter().map(|&mu| Puncture { mu, even: mu.rem_euclid(2) == 0 }).collect();
        Self { genus, punctures, c1 }
    }

    /// Number of punctures with even index.
    pub fn gamma0(&self) -> i64 {
        self.punctures.iter().filter(|p| p.even).count() as i64
    }
}

pub fn fredholm_index(top: &CurveTopology) -> i64 {
    let chi = 2 - 2 * top.genus as i64 - top.punctures.len() as i64;
    chi + 2 * top.c1 + top.punctures.iter().map(|p| p.mu).sum::<i64>()
}

pub fn normal_chern(ind: i64, g: i64, gamma0: i64) -> Result<i64> {
    if gamma0 < 0 {
        return Err(Error::Domain(format!("gamma0 = {gamma0} must be >= 0")));
    }
    let rhs = ind - 2 + 2 * g + gamma0;
    if rhs.rem_euclid(2) != 0 {
        return Err(Error::Parity(format!("ind - 2 + 2g + #Gamma0 = {rhs} is odd")));
    }
    Ok(rhs / 2)
}

/// Topology of an assembled page curve: genus 0, one puncture per binding
/// with the index of the simply covered binding orbit. The normal bundle is
/// trivialised by `d/dphi`, which has `zeros` zeros along the curve.
pub fn page_curve_topology(curve: &PageCurve, p: &Profile, zeros: i64) -> Result<CurveTopology> {
    let mu = conley_zehnder(&linearized_return_path(p, 1)?)?;
    let mus = vec![mu; curve.cylinders.len()];
    Ok(CurveTopology::new(0, &mus, zeros))
}

/// Index table row for one cover of the binding orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverIndex {
    pub k: u32,
    pub turns: f64,
    pub mu: i64,
    /// Largest entry difference between the integrated and closed-form paths.
    pub path_error: f64,
}

pub fn cover_index(p: &Profile, k: u32) -> Result<CoverIndex> {
    let path = linearized_return_path(p, k)?;
    let closed = closed_form_return_path(p, k, samples_for(k));
    Ok(CoverIndex { k, turns: -p.params().kappa * k as f64, mu: conley_zehnder(&path)?, path_error: path.max_abs_diff(&closed) })
}

/// Index of the `k`-fold cover from the closed-form rotation alone, sampled
/// finely enough for the winding count.
pub fn cover_index_closed_form(p: &Profile, k: u32) -> Result<CoverIndex> {
    if k == 0 {
        return Err(Error::Domain("cover multiplicity must be >= 1".into()));
    }
    let turns = -p.params().kappa * k as f64;
    let n = 64 * (turns.abs().ceil() as usize + 1);
    let path = closed_form_return_path(p, k, n);
    Ok(CoverIndex { k, turns, mu: conley_zehnder(&path)?, path_error: 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fredholm_examples() {
        assert_eq!(fredholm_index(&CurveTopology::new(0, &[1], 0)), 2);
        assert_eq!(fredholm_index(&CurveTopology::new(0, &[1, 1, 1], 0)), 2);
        assert_eq!(fredholm_index(&CurveTopology::new(2, &[1], 0)), -2);
    }

    #[test]
    fn normal_chern_examples() {
        assert_eq!(normal_chern(2, 0, 0), Ok(0));
        assert_eq!(normal_chern(2, 1, 0), Ok(1));
        assert_eq!(normal_chern(1, 0, 1), Ok(0));
        assert!(matches!(normal_chern(1, 0, 0), Err(Error::Parity(_))));
    }

    #[test]
    fn rotation_examples() {
        let p = |th: f64| SymplecticPath::rotation(th, 1.0, 2000);
        assert_eq!(conley_zehnder(&p(2f64.sqrt() / 100.0)), Ok(1));
        assert_eq!(conley_zehnder(&p(1.004)), Ok(3));
        assert_eq!(conley_zehnder(&p(-0.3)), Ok(-1));
    }

    #[test]
    fn constant_path_is_degenerate() {
        let id = [[1.0, 0.0], [0.0, 1.0]];
        let path = SymplecticPath::new(vec![0.0, 1.0], vec![id, id]).unwrap();
        let e = conley_zehnder(&path).unwrap_err();
        assert!(e.to_string().starts_with("degenerate orbit"));
    }

    #[test]
    fn hyperbolic_path_is_even() {
        // Psi(t) = diag(e^t, e^-t): the winding interval contains 0
        let n = 100;
        let t: Vec<f64> = (0..=n).map(|j| j as f64 / n as f64).collect();
        let psi = t.iter().map(|&s| [[s.exp(), 0.0], [0.0, (-s).exp()]]).collect();
        assert_eq!(conley_zehnder(&SymplecticPath::new(t, psi).unwrap()), Ok(0));
    }
}
