//! Adaptive Dormand-Prince 5(4) integrator for small fixed-size systems.

use crate::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// 5th-order weights (FSAL) and the 5th minus 4th order difference.
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Options {
    pub fn with_tol(tol: f64) -> Self {
        Self { rtol: tol, atol: tol, h_init: 1e-3, h_min: 1e-14, h_max: f64::INFINITY, max_steps: 2_000_000 }
    }
}

/// Accepted steps with the derivative at each node (for Hermite dense output)
/// and the local error estimate of the step that produced the node.
#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    pub t: Vec<f64>,
    pub y: Vec<[f64; N]>,
    pub dy: Vec<[f64; N]>,
    pub local_error: Vec<f64>,
}

impl<const N: usize> Trajectory<N> {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn last(&self) -> (f64, [f64; N]) {
        (*self.t.last().unwrap(), *self.y.last().unwrap())
    }

    /// Cubic Hermite interpolation; `None` outside the integrated range.
    pub fn interpolate(&self, t: f64) -> Option<[f64; N]> {
        let (t0, t1) = (self.t[0], *self.t.last()?);
        if !(t >= t0 && t <= t1) {
            return None;
        }
        let i = match self.t.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => return Some(self.y[i]),
            Err(i) => i - 1,
        };
        let h = self.t[i + 1] - self.t[i];
        let u = (t - self.t[i]) / h;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u),
            u * (1.0 - u) * (1.0 - u),
            u * u * (3.0 - 2.0 * u),
            u * u * (u - 1.0),
        );
        let mut out = [0.0; N];
        for k in 0..N {
            out[k] = h00 * self.y[i][k]
                + h10 * h * self.dy[i][k]
                + h01 * self.y[i + 1][k]
                + h11 * h * self.dy[i + 1][k];
        }
        Some(out)
    }
}

/// Integrates `y' = rhs(t, y)` from `t0` to `t_end`, stopping early once
/// `stop(t, y)` holds after an accepted step. Steps are shortened so that
/// every time in `breakpoints` (ascending) is hit exactly.
pub fn integrate<const N: usize>(
    mut rhs: impl FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &Options,
    mut stop: impl FnMut(f64, &[f64; N]) -> bool,
    breakpoints: &[f64],
) -> Result<Trajectory<N>> {
    if !(t_end > t0) {
        return Err(Error::Integration(format!("empty interval [{t0}, {t_end}]")));
    }
    let mut t = t0;
    let mut y = y0;
    let mut k0 = rhs(t, &y)?;
    let mut traj = Trajectory { t: vec![t], y: vec![y], dy: vec![k0], local_error: vec![0.0] };
    let mut h = opts.h_init.min(t_end - t0);
    let mut bp = breakpoints.iter().copied().filter(|&b| b > t0 && b <= t_end).peekable();
    let mut steps = 0usize;

    while t < t_end {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::Integration(format!("step budget exhausted at t = {t}")));
        }
        let mut target = t_end;
        if let Some(&b) = bp.peek() {
            target = b;
        }
        let mut h_try = h.min(opts.h_max);
        let mut land = false;
        if t + h_try >= target {
            h_try = target - t;
            land = true;
        }

        let mut ks = [[0.0; N]; 7];
        ks[0] = k0;
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in ks.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..N {
                        ys[i] += h_try * a * kj[i];
                    }
                }
            }
            ks[s] = rhs(t + C[s] * h_try, &ys)?;
        }
        let mut y_new = y;
        let mut err = 0.0f64;
        for i in 0..N {
            let mut inc = 0.0;
            let mut e = 0.0;
            for s in 0..7 {
                inc += B[s] * ks[s][i];
                e += E[s] * ks[s][i];
            }
            y_new[i] = y[i] + h_try * inc;
            let scale = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err = err.max((h_try * e).abs() / scale);
        }
        // FSAL: the seventh stage is the derivative at the new point.
        if err <= 1.0 {
            t = if land { target } else { t + h_try };
            if land && bp.peek().is_some() && target < t_end {
                bp.next();
            }
            y = y_new;
            k0 = ks[6];
            traj.t.push(t);
            traj.y.push(y);
            traj.dy.push(k0);
            traj.local_error.push(err * opts.atol.max(opts.rtol));
            if stop(t, &y) {
                break;
            }
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        let next = h_try * factor;
        h = if err <= 1.0 && land { h.max(next) } else { next };
        if h < opts.h_min {
            return Err(Error::Integration(format!(
                "step size underflow (h = {h:e}) at t = {t}, error ratio {err:e}"
            )));
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let traj = integrate(
            |_, y: &[f64; 1]| Ok([-y[0]]),
            0.0,
            [1.0],
            5.0,
            &Options::with_tol(1e-12),
            |_, _| false,
            &[],
        )
        .unwrap();
        let (t, y) = traj.last();
        assert_eq!(t, 5.0);
        assert!((y[0] - (-5.0f64).exp()).abs() < 1e-11);
        let mid = traj.interpolate(2.345).unwrap()[0];
        assert!((mid - (-2.345f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn hits_breakpoints_exactly() {
        let bps: Vec<f64> = (1..=20).map(|i| i as f64 * 0.25).collect();
        let traj = integrate(
            |_, y: &[f64; 2]| Ok([y[1], -y[0]]),
            0.0,
            [0.0, 1.0],
            5.0,
            &Options::with_tol(1e-12),
            |_, _| false,
            &bps,
        )
        .unwrap();
        for b in bps {
            let i = traj.t.iter().position(|&t| t == b).expect("breakpoint missing");
            assert!((traj.y[i][0] - b.sin()).abs() < 1e-10);
        }
    }

    #[test]
    fn early_stop_and_errors() {
        let traj = integrate(
            |_, _y: &[f64; 1]| Ok([1.0]),
            0.0,
            [0.0],
            10.0,
            &Options::with_tol(1e-10),
            |_, y| y[0] > 2.0,
            &[],
        )
        .unwrap();
        assert!(traj.last().0 < 10.0);
        let bad = integrate(
            |_, _y: &[f64; 1]| Err(Error::Integration("boom".into())),
            0.0,
            [0.0],
            1.0,
            &Options::with_tol(1e-10),
            |_, _| false,
            &[],
        );
        assert!(bad.is_err());
    }
}
