//! The `S^1`-family of page curves `phi0 = j / n` and checks that it
//! foliates `R x (M minus binding)` transversally to the Reeb field.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::curve::{assemble_page_curve, PageCurve};
use super::half_cylinder::{HalfCylinderOptions, HalfCylinderSolution};
use crate::geometry::page::Boundary;
use crate::geometry::{reeb_at, Chart, ManifoldModel, PointTM};
use crate::profiles::Profile;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoliationOptions {
    pub n_pages: usize,
    pub n_random: usize,
    pub seed: u64,
    pub cylinder: HalfCylinderOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoliationReport {
    pub n_pages: usize,
    pub n_random: usize,
    /// Points matched to no leaf, and to more than one.
    pub unmatched: usize,
    pub multiply_matched: usize,
    /// Largest `|rho(s) - rho|` after inverting `rho` along the matched leaf.
    pub max_reconstruction_error: f64,
    /// Smallest distance between sampled points of distinct leaves, in the
    /// embedding `(cos 2pi theta, sin 2pi theta, x, y)` of each solid torus.
    pub min_leaf_distance: f64,
    /// Smallest `|det(u_s / |u_s|, u_t, X0)|` over leaf samples.
    pub min_transversality: f64,
    /// Zeros of the normal section `d/dphi` along the leaves; the relative
    /// first Chern number of the normal bundle is their signed count.
    pub normal_section_zeros: usize,
    pub pass: bool,
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Leaves share the radial solution; only `phi0` changes.
pub fn foliation_sample(
    m: &ManifoldModel,
    p: &Profile,
    opts: &FoliationOptions,
) -> Result<(Vec<PageCurve>, FoliationReport)> {
    let leaves: Vec<PageCurve> = (0..opts.n_pages)
        .into_par_iter()
        .map(|j| assemble_page_curve(m, p, j as f64 / opts.n_pages as f64, 0.0, &opts.cylinder))
        .collect::<Result<_>>()?;
    let sol = &leaves[0].cylinders[0].solution;

    let (unmatched, multiply_matched, max_err) = coverage(m, sol, opts)?;
    let min_leaf_distance = leaf_distance(&leaves);
    let (min_transversality, normal_section_zeros) = leaf_transversality(m, p, &leaves[0])?;
    let pass = unmatched == 0
        && multiply_matched == 0
        && max_err <= 1e-6
        && min_leaf_distance > 0.0
        && min_transversality > 0.0
        && normal_section_zeros == 0;
    let report = FoliationReport {
        n_pages: opts.n_pages,
        n_random: opts.n_random,
        unmatched,
        multiply_matched,
        max_reconstruction_error: max_err,
        min_leaf_distance,
        min_transversality,
        normal_section_zeros,
        pass,
    };
    Ok((leaves, report))
}

/// Draws points of `M minus B` uniformly per chart and inverts the
/// `(phi0, s, t)` parametrisation.
fn coverage(m: &ManifoldModel, sol: &HalfCylinderSolution, opts: &FoliationOptions) -> Result<(usize, usize, f64)> {
    let bindings = m.bindings();
    let (r0, r1) = m.page.r_range();
    let chunks = 64usize;
    let per = opts.n_random.div_ceil(chunks);
    let parts: Vec<(usize, usize, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(c as u64));
            let mut acc = (0usize, 0usize, 0.0f64);
            let n = per.min(opts.n_random.saturating_sub(c * per));
            for _ in 0..n {
                let which = rng.gen_range(0..=bindings.len());
                let pt = if which == bindings.len() {
                    PointTM::mapping_torus(rng.gen(), rng.gen_range(r0..=r1), rng.gen())
                } else {
                    let rho: f64 = 1.0 - rng.gen::<f64>();
                    PointTM::solid(bindings[which], rng.gen(), rho, rng.gen())
                };
                let pt = match pt.chart {
                    Chart::MappingTorus => match m.transition(&pt) {
                        Some(q) => q,
                        None => continue, // flat part of the leaf phi0 = phi
                    },
                    _ => pt,
                };
                let rho = pt.coords[1];
                match sol.invert_rho(rho) {
                    None => acc.0 += 1,
                    Some((s, hits)) => {
                        if hits == 0 {
                            acc.0 += 1;
                        } else if hits > 1 {
                            acc.1 += 1;
                        }
                        let back = sol.eval(s).map(|v| v.1).unwrap_or(f64::NAN);
                        acc.2 = acc.2.max((back - rho).abs());
                    }
                }
            }
            acc
        })
        .collect();
    Ok(parts.into_iter().fold((0, 0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1, a.2.max(b.2))))
}

fn leaf_distance(leaves: &[PageCurve]) -> f64 {
    // Leaf j is the half-plane at angle 2 pi phi_j in each (x, y) disk;
    // the nearest point of leaf k to (rho, phi_j) is on the ray at phi_k.
    let sol = &leaves[0].cylinders[0].solution;
    let rho_min = sol.rho_end();
    let mut best = f64::INFINITY;
    for (j, lj) in leaves.iter().enumerate() {
        for lk in leaves.iter().skip(j + 1) {
            let ang = 2.0 * std::f64::consts::PI * (lj.phi0 - lk.phi0);
            let d = if ang.cos() > 0.0 { rho_min * ang.sin().abs() } else { rho_min };
            best = best.min(d);
        }
    }
    best
}

/// Smallest `|det(u_s / |u_s|, u_t, X0)|` along a leaf and the number of
/// zeros of the normal section `d/dphi`.
pub fn leaf_transversality(m: &ManifoldModel, p: &Profile, leaf: &PageCurve) -> Result<(f64, usize)> {
    let mut min_det = f64::INFINITY;
    let mut zeros = 0usize;
    for part in &leaf.cylinders {
        for &rho in &part.solution.rho {
            let pt = PointTM::solid(part.boundary, 0.0, rho, leaf.phi0);
            let x = reeb_at(m, p, &pt, 0.0)?;
            let tangents = [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0]];
            min_det = min_det.min(det3([tangents[0], tangents[1], x.0]).abs());
            if det3([tangents[0], tangents[1], [0.0, 0.0, 1.0]]).abs() < 1e-12 {
                zeros += 1;
            }
        }
    }
    let (lo, hi) = leaf.flat_r_range;
    for k in 0..=200 {
        let r = lo + (hi - lo) * k as f64 / 200.0;
        let pt = PointTM::mapping_torus(leaf.phi0, r, 0.3);
        let x = reeb_at(m, p, &pt, 0.0)?;
        let tangents = [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        min_det = min_det.min(det3([tangents[0], tangents[1], x.0]).abs());
        if det3([tangents[0], tangents[1], [1.0, 0.0, 0.0]]).abs() < 1e-12 {
            zeros += 1;
        }
    }
    Ok((min_det, zeros))
}

/// One row per integration node of every leaf's half-cylinders.
pub fn leaves_to_csv(leaves: &[PageCurve]) -> String {
    let mut out = String::from("leaf,phi0,boundary,s,a,rho,branch\n");
    for (j, l) in leaves.iter().enumerate() {
        for c in &l.cylinders {
            let b = match c.boundary {
                Boundary::Outer => "outer",
                Boundary::Inner => "inner",
            };
            let sol = &c.solution;
            for i in 0..sol.s.len() {
                out.push_str(&format!(
                    "{j},{},{b},{:.12e},{:.12e},{:.12e},{}\n",
                    l.phi0,
                    sol.s[i],
                    sol.a[i],
                    sol.rho[i],
                    sol.branch[i].label()
                ));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det3_of_identity() {
        assert_eq!(det3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]), 1.0);
        assert_eq!(det3([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.2, 0.0, 0.7]]), 0.7);
    }
}
