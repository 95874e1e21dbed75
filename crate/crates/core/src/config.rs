//! Run configuration: TOML in, validated `RunConfig` out.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::geometry::page::{PageKind, Twist};
use crate::geometry::{GridSpec, OpenBookSpec, ShsTolerances};
use crate::profiles::{KappaEntry, ProfileParams};
use crate::{Error, Result};

const BUNDLED: [(&str, &str); 2] = [
    ("tight-s3-disk", include_str!("../configs/tight-s3-disk.toml")),
    ("annulus-twist-k", include_str!("../configs/annulus-twist-k.toml")),
];

pub fn bundled_names() -> Vec<&'static str> {
    BUNDLED.iter().map(|(n, _)| *n).collect()
}

pub fn bundled(name: &str) -> Option<RunConfig> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, text)| parse_config(text).expect("bundled config parses"))
}

/// `kappa` given either by catalogue name (`"-sqrt2/100"`) or as a number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KappaValue {
    Name(String),
    Value(f64),
}

impl KappaValue {
    pub fn resolve(&self) -> Result<f64> {
        match self {
            KappaValue::Value(v) => Ok(*v),
            KappaValue::Name(n) => n
                .parse::<KappaEntry>()
                .map(|e| e.value())
                .map_err(|_| Error::Config(vec![format!("profile.kappa: unknown catalogue entry {n:?}")])),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub c: f64,
    pub kappa: KappaValue,
    pub delta: f64,
    pub delta_prime: f64,
    pub rho1: f64,
    pub rho2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    /// Points per chart axis for the structure audit.
    pub shs_n: usize,
    pub fd_step: f64,
    /// Coarse step of the Cauchy–Riemann residual (refined once by 1/2).
    pub cr_h: f64,
    pub cr_window: f64,
    pub cr_nt: usize,
    /// Grid for the profile sign checks.
    pub profile_n: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { shs_n: 50, fd_step: 1e-3, cr_h: 1e-2, cr_window: 5.0, cr_nt: 16, profile_n: 10_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub tol: f64,
    pub cr_tol: f64,
    pub s_max: f64,
    pub rho_stop: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tol: 1e-10, cr_tol: 1e-12, s_max: 2000.0, rho_stop: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FoliationConfig {
    pub n_pages: usize,
    pub n_random: usize,
    pub seed: u64,
}

impl Default for FoliationConfig {
    fn default() -> Self {
        Self { n_pages: 16, n_random: 100_000, seed: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IndexConfig {
    /// Covers whose return path is also integrated (the rest use the
    /// closed form).
    pub integrate_covers: u32,
    /// Largest cover in the index table; 0 means `floor(1/|kappa|)`.
    pub max_cover: u32,
}

impl Default for IndexConfig {
    fn default() -> Self {
        Self { integrate_covers: 100, max_cover: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub shs: ShsTolerances,
    pub branch: f64,
    pub exponent: f64,
    pub a_slope_rel: f64,
    pub richardson_lo: f64,
    pub richardson_hi: f64,
    pub coverage: f64,
    pub return_path: f64,
    pub energy: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            shs: ShsTolerances::default(),
            branch: 1e-12,
            exponent: 1e-3,
            a_slope_rel: 1e-3,
            richardson_lo: 3.5,
            richardson_hi: 4.5,
            coverage: 1e-6,
            return_path: 1e-8,
            energy: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: String,
    pub json: bool,
    pub csv: bool,
    pub svg: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: "runs/default".into(), json: true, csv: true, svg: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub name: String,
    pub epsilon: f64,
    #[serde(default = "default_tau_flat")]
    pub tau_flat: f64,
    pub page: PageKind,
    #[serde(default)]
    pub twists: Vec<Twist>,
    pub profile: ProfileConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub foliation: FoliationConfig,
    #[serde(default)]
    pub index: IndexConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_tau_flat() -> f64 {
    0.1
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// Reads a config file, or a bundled config when `path` names one.
pub fn load_config(path: &str) -> Result<RunConfig> {
    if let Some(c) = bundled(path) {
        return Ok(c);
    }
    let text = std::fs::read_to_string(Path::new(path))
        .map_err(|e| Error::Io(format!("{path}: {e}")))?;
    parse_config(&text)
}

impl RunConfig {
    pub fn profile_params(&self) -> Result<ProfileParams> {
        let p = &self.profile;
        Ok(ProfileParams {
            c: p.c,
            kappa: p.kappa.resolve()?,
            delta: p.delta,
            delta_prime: p.delta_prime,
            rho1: p.rho1,
            rho2: p.rho2,
        })
    }

    pub fn open_book(&self) -> Result<OpenBookSpec> {
        Ok(OpenBookSpec {
            page: self.page,
            twists: self.twists.clone(),
            profile: self.profile_params()?,
            epsilon: self.epsilon,
            tau_flat: self.tau_flat,
        })
    }

    pub fn shs_grid(&self) -> GridSpec {
        GridSpec { n: self.grid.shs_n, fd_step: self.grid.fd_step }
    }

    /// Every problem with the config, each naming the offending field.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        match self.profile_params() {
            Ok(p) => v.extend(p.violations().into_iter().map(|s| format!("profile: {s}"))),
            Err(Error::Config(e)) => v.extend(e),
            Err(e) => v.push(e.to_string()),
        }
        let positive = [
            ("epsilon", self.epsilon),
            ("tau_flat", self.tau_flat),
            ("grid.fd_step", self.grid.fd_step),
            ("grid.cr_h", self.grid.cr_h),
            ("grid.cr_window", self.grid.cr_window),
            ("solver.tol", self.solver.tol),
            ("solver.cr_tol", self.solver.cr_tol),
            ("solver.s_max", self.solver.s_max),
            ("solver.rho_stop", self.solver.rho_stop),
            ("tolerances.branch", self.tolerances.branch),
            ("tolerances.exponent", self.tolerances.exponent),
            ("tolerances.a_slope_rel", self.tolerances.a_slope_rel),
            ("tolerances.richardson_lo", self.tolerances.richardson_lo),
            ("tolerances.coverage", self.tolerances.coverage),
            ("tolerances.return_path", self.tolerances.return_path),
            ("tolerances.energy", self.tolerances.energy),
            ("tolerances.shs.iota", self.tolerances.shs.iota),
            ("tolerances.shs.d_omega", self.tolerances.shs.d_omega),
            ("tolerances.shs.lambda_of_reeb", self.tolerances.shs.lambda_of_reeb),
            ("tolerances.shs.density_rel", self.tolerances.shs.density_rel),
            ("tolerances.shs.pullback", self.tolerances.shs.pullback),
            ("tolerances.shs.f_eps", self.tolerances.shs.f_eps),
            ("tolerances.shs.return_time", self.tolerances.shs.return_time),
        ];
        for (name, x) in positive {
            if !(x > 0.0 && x.is_finite()) {
                v.push(format!("{name} > 0"));
            }
        }
        if !(self.tolerances.richardson_hi > self.tolerances.richardson_lo) {
            v.push("tolerances.richardson_hi > tolerances.richardson_lo".into());
        }
        if !(self.tau_flat < 0.5) {
            v.push("tau_flat < 0.5".into());
        }
        let ranges: [(&str, usize, usize, usize); 5] = [
            ("grid.shs_n", self.grid.shs_n, 3, 200),
            ("grid.cr_nt", self.grid.cr_nt, 3, 4096),
            ("grid.profile_n", self.grid.profile_n, 10, 10_000_000),
            ("foliation.n_pages", self.foliation.n_pages, 2, 4096),
            ("foliation.n_random", self.foliation.n_random, 1, 100_000_000),
        ];
        for (name, x, lo, hi) in ranges {
            if !(lo..=hi).contains(&x) {
                v.push(format!("{name} in [{lo}, {hi}]"));
            }
        }
        if self.grid.cr_window / self.grid.cr_h < 4.0 {
            v.push("grid.cr_window >= 4 grid.cr_h".into());
        }
        if self.index.integrate_covers > 1000 {
            v.push("index.integrate_covers <= 1000".into());
        }
        if let Ok(p) = self.profile_params() {
            if p.violations().is_empty() && !(self.epsilon < crate::profiles::max_perturbation(&p)) {
                v.push("epsilon < max_perturbation".into());
            }
        }
        if let Ok(spec) = self.open_book() {
            if let Err(e) = crate::geometry::build_manifold(&spec) {
                v.push(format!("page/twists: {e}"));
            }
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(v))
        }
    }

    /// Covers listed in the index table.
    pub fn max_cover(&self) -> Result<u32> {
        if self.index.max_cover > 0 {
            return Ok(self.index.max_cover);
        }
        Ok((1.0 / self.profile_params()?.kappa.abs()).floor().max(1.0) as u32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_configs_are_valid() {
        for name in bundled_names() {
            let c = bundled(name).unwrap();
            assert_eq!(c.name, name);
            assert_eq!(c.violations(), Vec::<String>::new(), "{name}");
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = include_str!("../configs/tight-s3-disk.toml");
        assert!(matches!(parse_config(&format!("colour = 1\n{text}")), Err(Error::Parse(_))));
        let bad = text.replace("radius = 1.0", "radius = 1.0\nwidth = 2.0");
        assert!(matches!(parse_config(&bad), Err(Error::Parse(_))));
        let bad = format!("{text}\n[grid]\nshs = 4\n");
        assert!(matches!(parse_config(&bad), Err(Error::Parse(_))));
    }

    #[test]
    fn delta_prime_below_delta_is_named() {
        let mut c = bundled("tight-s3-disk").unwrap();
        c.profile.delta_prime = 0.01;
        let v = c.violations();
        assert!(v.iter().any(|s| s.contains("delta_prime > delta")), "{v:?}");
        assert!(matches!(c.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn numeric_kappa_is_accepted() {
        let text = include_str!("../configs/tight-s3-disk.toml").replace("\"-sqrt2/100\"", "-0.01");
        let c = parse_config(&text).unwrap();
        assert_eq!(c.profile_params().unwrap().kappa, -0.01);
    }
}
