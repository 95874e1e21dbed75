//! Flat-ended C-infinity transition functions.

use crate::{Error, Result};

fn sigma(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

// First and second derivatives of exp(-1/t).
fn sigma_d(t: f64) -> (f64, f64) {
    if t <= 0.0 {
        return (0.0, 0.0);
    }
    let s = sigma(t);
    let t2 = t * t;
    (s / t2, s * (1.0 / (t2 * t2) - 2.0 / (t2 * t)))
}

/// Unit transition `S(t) = σ(t) / (σ(t) + σ(1 - t))` with its first two
/// derivatives. Exactly 0 for `t <= 0` and exactly 1 for `t >= 1`.
pub fn unit_step(t: f64) -> (f64, f64, f64) {
    if t <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    if t >= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    let u = sigma(t);
    let w = sigma(1.0 - t);
    let (du, ddu) = sigma_d(t);
    let (dw1, ddw1) = sigma_d(1.0 - t);
    // w(t) = σ(1 - t)
    let dw = -dw1;
    let ddw = ddw1;
    let n = u + w;
    let num = du * w - u * dw;
    let dnum = ddu * w - u * ddw;
    let dn = du + dw;
    let s = u / n;
    let s1 = num / (n * n);
    let s2 = (dnum * n - 2.0 * num * dn) / (n * n * n);
    (s, s1, s2)
}

/// Interpolates from `a` (flat near `t = 0`) to `b` (flat near `t = 1`).
pub fn blend(t: f64, a: f64, b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("blend parameter t = {t} outside [0, 1]")));
    }
    let (s, _, _) = unit_step(t);
    if s == 0.0 {
        Ok(a)
    } else if s == 1.0 {
        Ok(b)
    } else {
        Ok(a + (b - a) * s)
    }
}

/// Transition rescaled to the interval `[x0, x1]`: 0 left of it, 1 right of it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ramp {
    pub x0: f64,
    pub x1: f64,
}

impl Ramp {
    pub fn new(x0: f64, x1: f64) -> Self {
        debug_assert!(x1 > x0);
        Self { x0, x1 }
    }

    /// Value and first two derivatives in `x`.
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        let len = self.x1 - self.x0;
        let (s, s1, s2) = unit_step((x - self.x0) / len);
        (s, s1 / len, s2 / (len * len))
    }
}
