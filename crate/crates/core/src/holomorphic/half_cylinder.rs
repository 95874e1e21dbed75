//! Rotationally symmetric half-cylinders `(s, t) -> (a(s), t, rho(s), phi0)`.
//!
//! `a' = f(rho)` and `rho' = f'/(beta D)` below `1 - delta`, `rho' = -1` from
//! `1 - delta'` up; the two agree on the overlap. Integration starts at
//! `rho(0) = 1` and runs until `rho` drops below `rho_stop` or `s = s_max`.

use serde::{Deserialize, Serialize};

use crate::ode::{integrate, Options, Trajectory};
use crate::profiles::Profile;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// `rho' = f'/(beta D)`, used for `rho < 1 - delta'`.
    Contact,
    /// `rho' = -1`, used for `rho >= 1 - delta'`.
    Reduced,
}

impl Branch {
    pub fn label(self) -> &'static str {
        match self {
            Branch::Contact => "contact",
            Branch::Reduced => "reduced",
        }
    }
}

/// Right-hand side of the `rho` equation on the given branch.
pub fn rho_rate(p: &Profile, rho: f64, branch: Branch) -> f64 {
    match branch {
        Branch::Reduced => -1.0,
        Branch::Contact => {
            let s = p.sample_unchecked(rho);
            s.fp / (s.beta * s.d)
        }
    }
}

pub fn branch_for(p: &Profile, rho: f64) -> Branch {
    if rho >= 1.0 - p.params().delta_prime {
        Branch::Reduced
    } else {
        Branch::Contact
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfCylinderOptions {
    pub s_max: f64,
    pub tol: f64,
    pub rho_stop: f64,
    /// When set, every multiple of this step up to `s_max` is an output node.
    pub output_step: Option<f64>,
}

impl HalfCylinderOptions {
    pub fn new(s_max: f64, tol: f64) -> Self {
        Self { s_max, tol, rho_stop: 1e-6, output_step: None }
    }
}

/// Least-squares fits on the tail window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFit {
    pub window: (f64, f64),
    /// Slope of `log rho` against `s`.
    pub exponent: f64,
    /// Slope of `a` against `s`.
    pub a_slope: f64,
    /// `(a(s) - a0) / s` at the end of the window.
    pub a_over_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfCylinderSolution {
    pub a0: f64,
    pub phi0: f64,
    pub s: Vec<f64>,
    pub a: Vec<f64>,
    pub rho: Vec<f64>,
    /// Derivatives at the nodes, for dense output.
    pub da: Vec<f64>,
    pub drho: Vec<f64>,
    pub branch: Vec<Branch>,
    pub local_error: Vec<f64>,
    pub step: Vec<f64>,
    pub fit: AsymptoticFit,
    /// Largest disagreement of the two branch formulas on the overlap,
    /// evaluated along the trajectory.
    pub branch_overlap_defect: f64,
}

fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    sxy / sxx
}

pub fn solve_half_cylinder(
    p: &Profile,
    a0: f64,
    phi0: f64,
    opts: &HalfCylinderOptions,
) -> Result<HalfCylinderSolution> {
    if !(opts.s_max > 0.0) || !(opts.tol > 0.0) {
        return Err(Error::Domain("s_max and tol must be positive".into()));
    }
    let prm = *p.params();
    // a is integrated as an offset from a0, so shifting a0 cannot change rho.
    let rhs = |_s: f64, y: &[f64; 2]| -> Result<[f64; 2]> {
        let rho = y[1];
        if !(0.0..=1.0).contains(&rho) {
            return Err(Error::Integration(format!("rho = {rho} left [0, 1]")));
        }
        let f = p.sample_unchecked(rho).f;
        Ok([f, rho_rate(p, rho, branch_for(p, rho))])
    };
    let mut breakpoints = vec![prm.delta, prm.delta_prime];
    if let Some(h) = opts.output_step {
        let n = (opts.s_max / h).floor() as usize;
        breakpoints.extend((1..=n).map(|i| i as f64 * h));
        breakpoints.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breakpoints.dedup();
    }
    let mut o = Options::with_tol(opts.tol);
    o.h_init = 1e-3;
    let traj: Trajectory<2> =
        integrate(rhs, 0.0, [0.0, 1.0], opts.s_max, &o, |_, y| y[1] < opts.rho_stop, &breakpoints)?;

    let n = traj.len();
    let mut sol = HalfCylinderSolution {
        a0,
        phi0,
        s: traj.t.clone(),
        a: traj.y.iter().map(|y| a0 + y[0]).collect(),
        rho: traj.y.iter().map(|y| y[1]).collect(),
        da: traj.dy.iter().map(|d| d[0]).collect(),
        drho: traj.dy.iter().map(|d| d[1]).collect(),
        branch: traj.y.iter().map(|y| branch_for(p, y[1])).collect(),
        local_error: traj.local_error.clone(),
        step: (0..n).map(|i| if i == 0 { 0.0 } else { traj.t[i] - traj.t[i - 1] }).collect(),
        fit: AsymptoticFit { window: (0.0, 0.0), exponent: f64::NAN, a_slope: f64::NAN, a_over_s: f64::NAN },
        branch_overlap_defect: 0.0,
    };
    for w in sol.rho.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::Integration(format!("rho not strictly decreasing: {} -> {}", w[0], w[1])));
        }
    }
    let (lo, hi) = (1.0 - prm.delta_prime, 1.0 - prm.delta);
    sol.branch_overlap_defect = sol
        .rho
        .iter()
        .filter(|&&r| r >= lo && r < hi)
        .map(|&r| (rho_rate(p, r, Branch::Contact) - rho_rate(p, r, Branch::Reduced)).abs())
        .fold(0.0, f64::max);
    sol.fit = tail_fit(&sol);
    Ok(sol)
}

/// Fits on the last fifth of the integrated range.
fn tail_fit(sol: &HalfCylinderSolution) -> AsymptoticFit {
    let s_end = *sol.s.last().unwrap();
    let start = 0.8 * s_end;
    let idx: Vec<usize> = (0..sol.s.len()).filter(|&i| sol.s[i] >= start).collect();
    if idx.len() < 3 {
        return AsymptoticFit { window: (start, s_end), exponent: f64::NAN, a_slope: f64::NAN, a_over_s: f64::NAN };
    }
    let xs: Vec<f64> = idx.iter().map(|&i| sol.s[i]).collect();
    let logs: Vec<f64> = idx.iter().map(|&i| sol.rho[i].ln()).collect();
    let as_: Vec<f64> = idx.iter().map(|&i| sol.a[i]).collect();
    AsymptoticFit {
        window: (start, s_end),
        exponent: least_squares_slope(&xs, &logs),
        a_slope: least_squares_slope(&xs, &as_),
        a_over_s: (sol.a.last().unwrap() - sol.a0) / s_end,
    }
}

impl HalfCylinderSolution {
    pub fn s_end(&self) -> f64 {
        *self.s.last().unwrap()
    }

    pub fn rho_end(&self) -> f64 {
        *self.rho.last().unwrap()
    }

    /// `(a, rho)` at `s`; cubic Hermite inside the integrated range and the
    /// exponential tail `rho_end exp(k (s - s_end))` beyond it.
    pub fn eval(&self, s: f64) -> Option<(f64, f64)> {
        if s < 0.0 {
            return None;
        }
        let s_end = self.s_end();
        if s > s_end {
            let k = self.fit.exponent;
            let rho = self.rho_end() * (k * (s - s_end)).exp();
            let a = self.a.last().unwrap() + self.fit.a_slope * (s - s_end);
            return Some((a, rho));
        }
        let i = match self.s.binary_search_by(|x| x.partial_cmp(&s).unwrap()) {
            Ok(i) => return Some((self.a[i], self.rho[i])),
            Err(i) => i - 1,
        };
        let h = self.s[i + 1] - self.s[i];
        let u = (s - self.s[i]) / h;
        let herm = |y0: f64, d0: f64, y1: f64, d1: f64| {
            (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u) * y0
                + u * (1.0 - u) * (1.0 - u) * h * d0
                + u * u * (3.0 - 2.0 * u) * y1
                + u * u * (u - 1.0) * h * d1
        };
        Some((
            herm(self.a[i], self.da[i], self.a[i + 1], self.da[i + 1]),
            herm(self.rho[i], self.drho[i], self.rho[i + 1], self.drho[i + 1]),
        ))
    }

    /// The unique `s` with `rho(s) = rho`, with the number of sign changes
    /// of `rho(s_i) - rho` found along the nodes (1 for a monotone solution).
    pub fn invert_rho(&self, rho: f64) -> Option<(f64, usize)> {
        if !(rho > 0.0 && rho <= 1.0) {
            return None;
        }
        let crossings = self
            .rho
            .windows(2)
            .filter(|w| (w[0] - rho) * (w[1] - rho) < 0.0 || w[1] == rho)
            .count()
            + usize::from(self.rho[0] == rho);
        if rho < self.rho_end() {
            let s = self.s_end() + (rho / self.rho_end()).ln() / self.fit.exponent;
            return Some((s, 1 + crossings));
        }
        let i = self.rho.partition_point(|&r| r > rho);
        if i == 0 {
            return Some((0.0, crossings));
        }
        let (mut lo, mut hi) = (self.s[i - 1], self.s[i.min(self.s.len() - 1)]);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid).unwrap().1 > rho {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 4.0 * f64::EPSILON * hi.max(1.0) {
                break;
            }
        }
        Some((0.5 * (lo + hi), crossings))
    }
}

/// Samples `u(s_i, t_j) = (a, theta, rho, phi)` on a uniform grid
/// `s_i = i h` (`i = 0..n_s`), `t_j = j / n_t`, integrating with every grid
/// node as an exact output point.
pub fn sample_half_cylinder_map(
    p: &Profile,
    a0: f64,
    phi0: f64,
    s_window: f64,
    h: f64,
    n_t: usize,
    tol: f64,
) -> Result<super::residual::MapSamples> {
    let opts = HalfCylinderOptions { s_max: s_window, tol, rho_stop: 0.0, output_step: Some(h) };
    let sol = solve_half_cylinder(p, a0, phi0, &opts)?;
    let n_s = (s_window / h).floor() as usize + 1;
    let mut values = Vec::with_capacity(n_s * n_t);
    for i in 0..n_s {
        let si = i as f64 * h;
        let k = sol
            .s
            .iter()
            .position(|&x| x == si)
            .ok_or_else(|| Error::Integration(format!("grid node s = {si} not hit")))?;
        for j in 0..n_t {
            values.push([sol.a[k], j as f64 / n_t as f64, sol.rho[k], phi0]);
        }
    }
    Ok(super::residual::MapSamples { n_s, n_t, h_s: h, h_t: 1.0 / n_t as f64, s0: 0.0, values })
}
