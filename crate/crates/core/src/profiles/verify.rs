use serde::{Deserialize, Serialize};

use super::{kappa, RadialProfile};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCheck {
    pub name: String,
    pub pass: bool,
    /// Signed margin: positive (or zero for exact identities) when satisfied.
    pub margin: f64,
    /// Radius at which the margin is attained.
    pub witness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileReport {
    pub grid_n: usize,
    pub checks: Vec<ProfileCheck>,
    pub min_d: f64,
    pub max_fp: f64,
    pub pass: bool,
}

impl ProfileReport {
    pub fn check(&self, name: &str) -> Option<&ProfileCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn linspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = (b - a) / (n - 1) as f64;
    (0..n).map(move |i| if i + 1 == n { b } else { a + step * i as f64 })
}

// (min value, argmin) of `v` over `xs`.
fn min_over(xs: &[f64], v: impl Fn(f64) -> f64) -> (f64, f64) {
    xs.iter().fold((f64::INFINITY, f64::NAN), |(m, w), &x| {
        let y = v(x);
        if y < m {
            (y, x)
        } else {
            (m, w)
        }
    })
}

fn ulps_close(a: f64, b: f64, ulps: f64) -> f64 {
    // Non-positive when within `ulps` relative units of b.
    (a - b).abs() - ulps * f64::EPSILON * b.abs()
}

/// Audits every profile condition on a grid of `grid_n` points plus the knots.
/// Failures are reported, never raised.
pub fn verify_profile<P: RadialProfile + ?Sized>(p: &P, grid_n: usize) -> ProfileReport {
    let grid_n = grid_n.max(100);
    let prm = *p.params();
    let inner = 1.0 - prm.delta;
    let outer = 1.0 - prm.delta_prime;
    let knots = [prm.rho1, prm.rho2, outer];
    let mut checks = Vec::new();
    let mut push = |name: &str, pass: bool, margin: f64, witness: f64| {
        checks.push(ProfileCheck { name: name.to_string(), pass, margin, witness });
    };

    let s0 = p.sample(0.0);
    let err0 = (s0.f - prm.c).abs().max(s0.g.abs());
    push("f(0) = c, g(0) = 0", err0 == 0.0, -err0, 0.0);

    let collar: Vec<f64> = linspace(inner, prm.rho_max(), grid_n + 1).take(grid_n).collect();
    let (m, w) = min_over(&collar, |r| {
        let s = p.sample(r);
        -(s.f.abs().max((s.g - 1.0).abs()))
    });
    let unperturbed_collar = m == 0.0;
    push("(f, g) = (0, 1) on [1-delta, 1+delta)", unperturbed_collar, m, w);

    let band: Vec<f64> = linspace(outer, prm.rho_max(), grid_n + 1).take(grid_n).collect();
    let (m, w) = min_over(&band, |r| -(p.sample(r).g - 1.0).abs());
    push("g = 1 on [1-delta', 1+delta)", m == 0.0, m, w);

    let err = s0.fp.abs().max(s0.gp.abs());
    push("f'(0) = g'(0) = 0", err == 0.0, -err, 0.0);
    push("g''(0) > 0", s0.gpp > 0.0, s0.gpp, 0.0);

    let mut interior: Vec<f64> = linspace(1e-3, inner - 1e-3, grid_n).collect();
    interior.extend(knots);
    let (min_d, wd) = min_over(&interior, |r| p.sample(r).d);
    push("D > 0 on (0, 1-delta)", min_d > 0.0, min_d, wd);
    let (neg_fp, wf) = min_over(&interior, |r| -p.sample(r).fp);
    push("f' < 0 on (0, 1-delta)", neg_fp > 0.0, neg_fp, wf);

    let near: Vec<f64> = linspace(1e-4, prm.rho1, grid_n).collect();
    let (m, w) = min_over(&near, |r| {
        let s = p.sample(r);
        -ulps_close(s.fp / s.gp, prm.kappa, 4.0)
    });
    push("f'/g' = kappa on (0, rho1]", m >= 0.0, m, w);
    let (m, w) = min_over(&near, |r| {
        let s = p.sample(r);
        -ulps_close(s.beta * s.rho * s.f, 1.0, 4.0)
    });
    push("beta rho f = 1 on (0, rho1]", m >= 0.0, m, w);

    let tail: Vec<f64> = linspace(prm.rho2, prm.rho_max(), grid_n + 1).take(grid_n).collect();
    let (m, w) = min_over(&tail, |r| -(p.sample(r).beta - 1.0).abs());
    push("beta = 1 on [rho2, 1+delta)", m == 0.0, m, w);
    let all: Vec<f64> = linspace(1e-4, prm.rho_max(), grid_n + 1).take(grid_n).collect();
    let (m, w) = min_over(&all, |r| p.sample(r).beta);
    push("beta > 0 on (0, 1+delta)", m > 0.0, m, w);

    let hband: Vec<f64> = linspace(outer, inner, grid_n).collect();
    let (m, w) = min_over(&hband, |r| p.sample(r).h);
    push("h > 0 on [1-delta', 1-delta]", m > 0.0, m, w);
    let so = p.sample(outer);
    let e = (so.h + so.fp).abs();
    push("h = -f' at 1-delta'", e == 0.0, -e, outer);
    let e = (p.sample(inner).h - 1.0).abs();
    push("h = 1 at 1-delta", e == 0.0, -e, inner);

    // Smoothness at the axis: f'(rho)/rho and g(rho)/rho^2 settle to finite
    // limits with successive differences shrinking at least linearly.
    let radii = [1e-2, 1e-3, 1e-4, 1e-5];
    let mut worst = f64::INFINITY;
    let mut worst_at = f64::NAN;
    for quotient in [
        &(|r: f64| p.sample(r).fp / r) as &dyn Fn(f64) -> f64,
        &|r: f64| p.sample(r).g / (r * r),
    ] {
        let vals: Vec<f64> = radii.iter().map(|&r| quotient(r)).collect();
        for i in 0..radii.len() - 1 {
            // Allowed drift: C * rho with C = 10 (1 + |limit|).
            let allowed = 10.0 * (1.0 + vals[i].abs()) * radii[i];
            let margin = allowed - (vals[i] - vals[i + 1]).abs();
            let margin = if vals[i].is_finite() { margin } else { f64::NEG_INFINITY };
            if margin < worst {
                worst = margin;
                worst_at = radii[i];
            }
        }
    }
    push("smooth at origin (f'/rho, g/rho^2)", worst > 0.0, worst, worst_at);

    // Stored derivative against centred differences, away from knots.
    // fourth-order stencil, so truncation stays below rounding at h = 1e-4
    let h = 1e-4;
    let mut worst_fd: f64 = 0.0;
    let mut worst_fd_at = f64::NAN;
    for r in linspace(0.01, inner - 0.01, grid_n.min(2000)) {
        let all_knots = [prm.rho1, prm.rho2, outer, inner];
        if all_knots.iter().any(|k| (r - k).abs() < 0.01) {
            continue;
        }
        let s = p.sample(r);
        let f = |x: f64| p.sample(x).f;
        let fd = (-f(r + 2.0 * h) + 8.0 * f(r + h) - 8.0 * f(r - h) + f(r - 2.0 * h)) / (12.0 * h);
        let rel = (fd - s.fp).abs() / s.fp.abs().max(1e-3);
        if rel > worst_fd {
            worst_fd = rel;
            worst_fd_at = r;
        }
    }
    push("f' matches finite differences", worst_fd <= 1e-6, 1e-6 - worst_fd, worst_fd_at);

    let in_cat = kappa::lookup(prm.kappa).is_some();
    push("kappa in irrational catalogue", in_cat, if in_cat { 0.0 } else { -1.0 }, prm.kappa);

    let pass = checks.iter().all(|c| c.pass);
    ProfileReport { grid_n, checks, min_d, max_fp: -neg_fp, pass }
}
