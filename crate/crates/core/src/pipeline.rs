//! construct -> verify -> solve -> index -> foliate -> report.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::geometry::{build_manifold, verify_shs_with, ManifoldModel, PointTM, ShsReport};
use crate::holomorphic::{
    assemble_page_curve, cartesian_smoothness, foliation_sample, half_cylinder_energy_closed_form,
    leaf_transversality, leaves_to_csv, omega_energy, richardson_check, AsymptoticFit, CartesianCheck,
    EnergyReport, FoliationOptions, FoliationReport, HalfCylinderOptions, PageCurve, Richardson, J0_at,
};
use crate::indices::{
    cover_index, cover_index_closed_form, fredholm_index, nondegeneracy_audit, normal_chern,
    page_curve_topology, CoverIndex, CurveTopology,
};
use crate::plot::{foliation_svg, profile_svg};
use crate::profiles::{build_profile, perturb_profile, verify_profile, Profile, ProfileReport};
use crate::{Error, Result};

/// Model objects built once from a validated config.
pub struct Context {
    pub config: RunConfig,
    pub manifold: ManifoldModel,
    pub profile: Profile,
}

impl Context {
    pub fn new(config: &RunConfig) -> Result<Self> {
        config.validate()?;
        let spec = config.open_book()?;
        let manifold = build_manifold(&spec).map_err(|e| context("geometry", e))?;
        let profile = build_profile(spec.profile).map_err(|e| context("profiles", e))?;
        Ok(Self { config: config.clone(), manifold, profile })
    }

    fn cylinder_options(&self) -> HalfCylinderOptions {
        let s = &self.config.solver;
        HalfCylinderOptions { s_max: s.s_max, tol: s.tol, rho_stop: s.rho_stop, output_step: None }
    }
}

fn context(module: &str, e: Error) -> Error {
    match e {
        Error::Construction(m) => Error::Construction(format!("{module}: {m}")),
        Error::Domain(m) => Error::Domain(format!("{module}: {m}")),
        Error::Integration(m) => Error::Integration(format!("{module}: {m}")),
        other => other,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub profile: ProfileReport,
    pub shs: ShsReport,
    pub pass: bool,
}

pub fn verify_stage(ctx: &Context) -> Result<VerifySummary> {
    let profile = verify_profile(&ctx.profile, ctx.config.grid.profile_n);
    let shs = verify_shs_with(
        &ctx.manifold,
        &ctx.profile,
        ctx.config.epsilon,
        &ctx.config.shs_grid(),
        &ctx.config.tolerances.shs,
    )
    .map_err(|e| context("geometry", e))?;
    let pass = profile.pass && shs.pass;
    Ok(VerifySummary { profile, shs, pass })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcsSummary {
    pub max_square_defect: f64,
    pub max_reeb_defect: f64,
    /// Along the `phi = 0` ray. `angular_spread` compares the `phi = 0` and
    /// `phi = 1/4` rays at the same radius.
    pub cartesian: Vec<CartesianCheck>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub nodes: usize,
    pub s_end: f64,
    pub rho_end: f64,
    pub branch_overlap_defect: f64,
    pub fit: AsymptoticFit,
    pub exponent_error: f64,
    pub a_slope_rel_error: f64,
    pub residual: Richardson,
    pub energy: EnergyReport,
    pub energy_closed_form: f64,
    pub acs: AcsSummary,
    pub pass: bool,
}

pub fn solve_stage(ctx: &Context) -> Result<(PageCurve, SolveSummary)> {
    let cfg = &ctx.config;
    let tol = &cfg.tolerances;
    let prm = *ctx.profile.params();
    let curve = assemble_page_curve(&ctx.manifold, &ctx.profile, 0.0, 0.0, &ctx.cylinder_options())
        .map_err(|e| context("holomorphic", e))?;
    let sol = &curve.cylinders[0].solution;
    let residual = richardson_check(&ctx.profile, cfg.grid.cr_window, cfg.grid.cr_h, cfg.grid.cr_nt, cfg.solver.cr_tol)
        .map_err(|e| context("holomorphic", e))?;
    let energy = omega_energy(&ctx.manifold, &ctx.profile, &curve)?;
    let energy_closed_form = half_cylinder_energy_closed_form(&ctx.profile);
    let acs = acs_summary(ctx)?;
    let exponent_error = (sol.fit.exponent - prm.kappa).abs();
    let a_slope_rel_error = ((sol.fit.a_slope - prm.c) / prm.c).abs();
    let pass = sol.branch_overlap_defect <= tol.branch
        && exponent_error <= tol.exponent
        && a_slope_rel_error <= tol.a_slope_rel
        && (tol.richardson_lo..=tol.richardson_hi).contains(&residual.ratio)
        && energy.cylinders.iter().all(|e| (e - energy_closed_form).abs() <= tol.energy)
        && curve.junction_defect() == 0.0
        && curve.min_node_separation() > 0.0
        && acs.pass;
    let summary = SolveSummary {
        nodes: sol.s.len(),
        s_end: sol.s_end(),
        rho_end: sol.rho_end(),
        branch_overlap_defect: sol.branch_overlap_defect,
        fit: sol.fit,
        exponent_error,
        a_slope_rel_error,
        residual,
        energy,
        energy_closed_form,
        acs,
        pass,
    };
    Ok((curve, summary))
}

fn acs_summary(ctx: &Context) -> Result<AcsSummary> {
    let m = &ctx.manifold;
    let mut pts = Vec::new();
    for b in m.bindings() {
        for k in 0..=20 {
            pts.push(PointTM::solid(b, 0.3, k as f64 / 20.0, 0.7));
        }
    }
    let (lo, hi) = m.page.r_range();
    for k in 1..=20 {
        pts.push(PointTM::mapping_torus(0.4, lo + (hi - lo) * k as f64 / 21.0, 0.2));
    }
    let mut max_square_defect = 0.0f64;
    let mut max_reeb_defect = 0.0f64;
    for pt in &pts {
        let s = J0_at(m, &ctx.profile, pt)?;
        max_square_defect = max_square_defect.max(s.square_defect);
        max_reeb_defect = max_reeb_defect.max(s.reeb_defect);
    }
    let cartesian = cartesian_smoothness(m, &ctx.profile, &[1e-2, 1e-3])?;
    let pass = max_square_defect <= 1e-10
        && max_reeb_defect <= 1e-12
        && cartesian.iter().all(|c| c.sup_entry.is_finite() && c.sup_second_difference.is_finite());
    Ok(AcsSummary { max_square_defect, max_reeb_defect, cartesian, pass })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexSummary {
    pub covers: Vec<CoverIndex>,
    /// Largest `k` for which `-kappa k < 1`; covers up to here have index 1.
    pub one_turn_cover: u32,
    pub max_path_error: f64,
    /// `min_k dist(k kappa, Z)` for `k <= 10^4`, and the minimising `k`.
    pub nondegeneracy_margin: f64,
    pub nondegeneracy_k: u32,
    pub topology: CurveTopology,
    pub ind: i64,
    pub c1: i64,
    pub normal_chern: i64,
    pub pass: bool,
}

pub fn index_stage(ctx: &Context, curve: &PageCurve) -> Result<IndexSummary> {
    let cfg = &ctx.config;
    let prm = ctx.profile.params();
    let max_cover = cfg.max_cover()?;
    let covers: Vec<CoverIndex> = (1..=max_cover)
        .map(|k| {
            if k <= cfg.index.integrate_covers {
                cover_index(&ctx.profile, k)
            } else {
                cover_index_closed_form(&ctx.profile, k)
            }
        })
        .collect::<Result<_>>()
        .map_err(|e| context("indices", e))?;
    let one_turn_cover = (1.0 / prm.kappa.abs()).floor() as u32;
    let max_path_error = covers.iter().map(|c| c.path_error).fold(0.0, f64::max);
    let (nondegeneracy_margin, nondegeneracy_k) = match prm.kappa_entry() {
        Some(e) => nondegeneracy_audit(e, 10_000),
        None => {
            (1..=10_000u32)
                .map(|k| {
                    let x = k as f64 * prm.kappa;
                    ((x - x.round()).abs(), k)
                })
                .fold((f64::INFINITY, 0), |a, b| if b.0 < a.0 { b } else { a })
        }
    };
    let (_, zeros) = leaf_transversality(&ctx.manifold, &ctx.profile, curve)?;
    let topology = page_curve_topology(curve, &ctx.profile, zeros as i64)?;
    let ind = fredholm_index(&topology);
    let normal = normal_chern(ind, topology.genus as i64, topology.gamma0())?;
    let pass = covers.iter().filter(|c| c.k <= one_turn_cover).all(|c| c.mu == 1)
        && max_path_error <= cfg.tolerances.return_path
        && nondegeneracy_margin > 1e-6
        && ind == 2
        && normal == topology.c1
        && topology.c1 == 0;
    Ok(IndexSummary {
        covers,
        one_turn_cover,
        max_path_error,
        nondegeneracy_margin,
        nondegeneracy_k,
        c1: topology.c1,
        topology,
        ind,
        normal_chern: normal,
        pass,
    })
}

pub fn foliation_stage(ctx: &Context) -> Result<(Vec<PageCurve>, FoliationReport)> {
    let f = &ctx.config.foliation;
    let opts = FoliationOptions { n_pages: f.n_pages, n_random: f.n_random, seed: f.seed, cylinder: ctx.cylinder_options() };
    let (leaves, mut rep) =
        foliation_sample(&ctx.manifold, &ctx.profile, &opts).map_err(|e| context("holomorphic", e))?;
    rep.pass = rep.pass && rep.max_reconstruction_error <= ctx.config.tolerances.coverage;
    Ok((leaves, rep))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: u32,
    pub name: String,
    pub config: RunConfig,
    pub verify: VerifySummary,
    pub solve: SolveSummary,
    pub index: IndexSummary,
    pub foliation: FoliationReport,
    /// Seconds per stage. The only fields that differ between runs.
    pub timings: BTreeMap<String, f64>,
    /// SHA-256 of each artifact written, by file name.
    pub artifacts: BTreeMap<String, String>,
    pub pass: bool,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises") + "\n"
    }

    /// JSON with the timing fields emptied, for determinism checks.
    pub fn to_json_without_timings(&self) -> String {
        let mut r = self.clone();
        r.timings.clear();
        r.to_json()
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes `bytes` to `dir/name` and records its hash.
pub fn write_artifact(dir: &Path, name: &str, bytes: &[u8], hashes: &mut BTreeMap<String, String>) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, bytes).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    hashes.insert(name.to_string(), sha256_hex(bytes));
    Ok(path)
}

/// Profile and foliation plots as `(file name, svg)`.
pub fn plots(ctx: &Context, leaves: &[PageCurve]) -> Result<Vec<(String, String)>> {
    let perturbed = perturb_profile(&ctx.profile, ctx.config.epsilon)?;
    Ok(vec![
        ("profile.svg".into(), profile_svg(&ctx.profile, Some(&perturbed))),
        ("foliation.svg".into(), foliation_svg(leaves)?),
    ])
}

/// Full pipeline. With `out_dir` set (or the config's output directory when
/// `None`), writes `report.json`, `trajectories.csv` and the SVG plots
/// according to the output toggles.
pub fn run_pipeline(config: &RunConfig, out_dir: Option<&Path>) -> Result<RunReport> {
    let mut timings = BTreeMap::new();
    let mut clock = Instant::now();
    let mut lap = |name: &str, timings: &mut BTreeMap<String, f64>| {
        timings.insert(name.to_string(), clock.elapsed().as_secs_f64());
        clock = Instant::now();
    };
    let ctx = Context::new(config)?;
    lap("construct", &mut timings);
    let verify = verify_stage(&ctx)?;
    lap("verify", &mut timings);
    let (curve, solve) = solve_stage(&ctx)?;
    lap("solve", &mut timings);
    let index = index_stage(&ctx, &curve)?;
    lap("index", &mut timings);
    let (leaves, foliation) = foliation_stage(&ctx)?;
    lap("foliation", &mut timings);

    let dir = out_dir.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(&config.output.dir));
    let mut artifacts = BTreeMap::new();
    if config.output.csv {
        write_artifact(&dir, "trajectories.csv", leaves_to_csv(&leaves).as_bytes(), &mut artifacts)?;
    }
    if config.output.svg {
        for (name, svg) in plots(&ctx, &leaves)? {
            write_artifact(&dir, &name, svg.as_bytes(), &mut artifacts)?;
        }
    }
    lap("artifacts", &mut timings);
    let pass = verify.pass && solve.pass && index.pass && foliation.pass;
    let report = RunReport {
        schema: 1,
        name: config.name.clone(),
        config: config.clone(),
        verify,
        solve,
        index,
        foliation,
        timings,
        artifacts,
        pass,
    };
    if config.output.json {
        std::fs::create_dir_all(&dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        let path = dir.join("report.json");
        std::fs::write(&path, report.to_json()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(report)
}
