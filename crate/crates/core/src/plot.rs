//! Static SVG plots. Output depends only on the input data, so identical
//! inputs give identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use crate::holomorphic::PageCurve;
use crate::profiles::Profile;
use crate::{Error, Result};

const W: f64 = 300.0;
const H: f64 = 260.0;
const PAD: f64 = 40.0;

struct Panel {
    x0: f64,
    xr: (f64, f64),
    yr: (f64, f64),
}

impl Panel {
    fn px(&self, x: f64) -> f64 {
        self.x0 + PAD + (x - self.xr.0) / (self.xr.1 - self.xr.0) * (W - 2.0 * PAD)
    }

    fn py(&self, y: f64) -> f64 {
        H - PAD - (y - self.yr.0) / (self.yr.1 - self.yr.0) * (H - 2.0 * PAD)
    }

    fn frame(&self, out: &mut String, title: &str, xlabel: &str, ylabel: &str) {
        let (l, r) = (self.x0 + PAD, self.x0 + W - PAD);
        let (t, b) = (PAD, H - PAD);
        let _ = writeln!(out, r#"<rect x="{l:.2}" y="{t:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#, r - l, b - t);
        let _ = writeln!(out, r#"<text x="{:.2}" y="20" text-anchor="middle" font-size="13">{title}</text>"#, (l + r) / 2.0);
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="11">{xlabel}</text>"#, (l + r) / 2.0, H - 8.0);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="11" transform="rotate(-90 {:.2} {:.2})">{ylabel}</text>"#,
            self.x0 + 12.0,
            H / 2.0,
            self.x0 + 12.0,
            H / 2.0
        );
        for (v, x) in [(self.xr.0, l), (self.xr.1, r)] {
            let _ = writeln!(out, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle" font-size="9">{v:.3}</text>"#, b + 12.0);
        }
        for (v, y) in [(self.yr.0, b), (self.yr.1, t)] {
            let _ = writeln!(out, r#"<text x="{:.2}" y="{y:.2}" text-anchor="end" font-size="9">{v:.3}</text>"#, l - 3.0);
        }
    }

    fn polyline(&self, out: &mut String, pts: &[(f64, f64)], colour: &str) {
        let mut d = String::new();
        for (x, y) in pts {
            let _ = write!(d, "{:.2},{:.2} ", self.px(*x), self.py(y.clamp(self.yr.0, self.yr.1)));
        }
        let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.2"/>"#, d.trim_end());
    }
}

fn document(panels: usize, body: &str) -> String {
    let w = W * panels as f64;
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{H:.0}\" viewBox=\"0 0 {w:.0} {H:.0}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{body}</svg>\n"
    )
}

fn write(path: &Path, svg: &str) -> Result<()> {
    std::fs::write(path, svg).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Three panels: the `(f, g)` path, `D(rho)` and `log10 beta(rho)`. A
/// perturbed profile, when given, is overlaid in red.
pub fn profile_svg(p: &Profile, perturbed: Option<&Profile>) -> String {
    let n = 400;
    let top = 1.0;
    let curves: Vec<(&Profile, &str)> =
        std::iter::once((p, "black")).chain(perturbed.map(|q| (q, "red"))).collect();
    let c = p.params().c;
    let mut body = String::new();

    let fg = Panel { x0: 0.0, xr: (-0.01, c * 1.1), yr: (0.0, 1.05) };
    fg.frame(&mut body, "(f, g)", "f", "g");
    let d_max = (0..=n).map(|k| p.sample_unchecked(top * k as f64 / n as f64).d).fold(0.0, f64::max);
    let dp = Panel { x0: W, xr: (0.0, top), yr: (0.0, d_max * 1.1) };
    dp.frame(&mut body, "D = f g' - f' g", "rho", "D");
    let bp = Panel { x0: 2.0 * W, xr: (0.0, top), yr: (-0.5, 3.0) };
    bp.frame(&mut body, "beta", "rho", "log10 beta");
    for (q, colour) in curves {
        let s: Vec<_> = (0..=n).map(|k| q.sample_unchecked(top * k as f64 / n as f64)).collect();
        fg.polyline(&mut body, &s.iter().map(|x| (x.f, x.g)).collect::<Vec<_>>(), colour);
        dp.polyline(&mut body, &s.iter().map(|x| (x.rho, x.d)).collect::<Vec<_>>(), colour);
        bp.polyline(&mut body, &s[1..].iter().map(|x| (x.rho, x.beta.log10())).collect::<Vec<_>>(), colour);
    }
    document(3, &body)
}

pub fn plot_profile(p: &Profile, perturbed: Option<&Profile>, path: &Path) -> Result<()> {
    write(path, &profile_svg(p, perturbed))
}

/// Left: `a` against `rho` for each leaf, with the flat part drawn over
/// `rho in [1, 1.2]`. Right: the page fan `rho (cos 2pi phi0, sin 2pi phi0)`.
pub fn foliation_svg(leaves: &[PageCurve]) -> Result<String> {
    if leaves.len() < 2 {
        return Err(Error::Domain(format!("need at least 2 leaves, got {}", leaves.len())));
    }
    let mut body = String::new();
    let a_max = leaves
        .iter()
        .flat_map(|l| l.cylinders.iter().map(|c| *c.solution.a.last().unwrap()))
        .fold(f64::NEG_INFINITY, f64::max);
    let a_min = leaves.iter().map(|l| l.a0).fold(f64::INFINITY, f64::min);
    let left = Panel { x0: 0.0, xr: (0.0, 1.2), yr: (a_min, a_max.max(a_min + 1.0)) };
    left.frame(&mut body, "a along each leaf", "rho (flat part beyond 1)", "a");
    let fan = Panel { x0: W, xr: (-1.1, 1.1), yr: (-1.1, 1.1) };
    fan.frame(&mut body, "page fan", "x", "y");
    let circle: Vec<(f64, f64)> = (0..=128)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / 128.0;
            (t.cos(), t.sin())
        })
        .collect();
    fan.polyline(&mut body, &circle, "grey");
    for (j, l) in leaves.iter().enumerate() {
        let hue = 360.0 * j as f64 / leaves.len() as f64;
        let colour = format!("hsl({hue:.0},70%,40%)");
        let sol = &l.cylinders[0].solution;
        let mut pts: Vec<(f64, f64)> = vec![(1.2, l.a0), (1.0, l.a0)];
        pts.extend(sol.rho.iter().zip(&sol.a).map(|(r, a)| (*r, *a)));
        left.polyline(&mut body, &pts, &colour);
        let (s, c) = (std::f64::consts::TAU * l.phi0).sin_cos();
        fan.polyline(&mut body, &[(sol.rho_end() * c, sol.rho_end() * s), (c, s)], &colour);
    }
    Ok(document(2, &body))
}

pub fn plot_foliation(leaves: &[PageCurve], path: &Path) -> Result<()> {
    write(path, &foliation_svg(leaves)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::tests::example_params;
    use crate::profiles::{build_profile, perturb_profile};

    #[test]
    fn profile_plot_is_deterministic_and_labelled() {
        let p = build_profile(example_params()).unwrap();
        let q = perturb_profile(&p, 1e-2).unwrap();
        let a = profile_svg(&p, Some(&q));
        assert_eq!(a, profile_svg(&p, Some(&q)));
        assert!(a.contains(">rho<") && a.contains(">f<") && a.contains("red"));
    }

    #[test]
    fn unwritable_path_is_an_io_error() {
        let p = build_profile(example_params()).unwrap();
        let r = plot_profile(&p, None, Path::new("/nonexistent-dir/x.svg"));
        assert!(matches!(r, Err(Error::Io(_))));
    }
}
