use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context as _;
use clap::{Args, Parser, Subcommand};
use holo_openbook::config::{bundled_names, load_config, RunConfig};
use holo_openbook::holomorphic::leaves_to_csv;
use holo_openbook::pipeline::{
    foliation_stage, index_stage, plots, run_pipeline, solve_stage, verify_stage, write_artifact, Context,
};

/// Worker threads for grid and leaf computations.
const WORKERS_ENV: &str = "HOLOBOOK_WORKERS";

#[derive(Parser)]
#[command(name = "holobook", version, about = "Open books, stable Hamiltonian structures and their holomorphic page curves")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Profile checks and the stable Hamiltonian structure audit.
    Verify(Common),
    /// Half-cylinders, page curve, residuals, asymptotics and energy.
    Solve(Common),
    /// Conley-Zehnder and Fredholm indices.
    Index(Common),
    /// The full pipeline, writing report.json, CSV and SVG.
    Run(Common),
    /// Profile and foliation plots only.
    Plot(Common),
}

#[derive(Args)]
struct Common {
    /// Config file, or a bundled config name.
    #[arg(short, long, default_value = "tight-s3-disk")]
    config: String,
    /// Output directory (defaults to the config's output.dir).
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Points per chart axis for the structure audit.
    #[arg(long)]
    grid: Option<usize>,
    /// Coarse step of the Cauchy-Riemann residual.
    #[arg(long)]
    cr_h: Option<f64>,
    #[arg(long)]
    n_pages: Option<usize>,
    #[arg(long)]
    n_random: Option<usize>,
    /// Integrator tolerance for the half-cylinders.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    s_max: Option<f64>,
    /// Override for the exponent and a-slope tolerances.
    #[arg(long)]
    asymptotic_tol: Option<f64>,
    /// Override for the coverage reconstruction tolerance.
    #[arg(long)]
    coverage_tol: Option<f64>,
}

impl Common {
    fn config(&self) -> anyhow::Result<RunConfig> {
        let mut c = load_config(&self.config)
            .with_context(|| format!("loading {} (bundled: {})", self.config, bundled_names().join(", ")))?;
        if let Some(v) = self.grid {
            c.grid.shs_n = v;
        }
        if let Some(v) = self.cr_h {
            c.grid.cr_h = v;
        }
        if let Some(v) = self.n_pages {
            c.foliation.n_pages = v;
        }
        if let Some(v) = self.n_random {
            c.foliation.n_random = v;
        }
        if let Some(v) = self.tol {
            c.solver.tol = v;
        }
        if let Some(v) = self.s_max {
            c.solver.s_max = v;
        }
        if let Some(v) = self.asymptotic_tol {
            c.tolerances.exponent = v;
            c.tolerances.a_slope_rel = v;
        }
        if let Some(v) = self.coverage_tol {
            c.tolerances.coverage = v;
        }
        c.validate()?;
        Ok(c)
    }

    fn out_dir(&self, c: &RunConfig) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from(&c.output.dir))
    }
}

fn write_json<T: serde::Serialize>(dir: &std::path::Path, name: &str, value: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    write_artifact(dir, name, text.as_bytes(), &mut BTreeMap::new())?;
    Ok(())
}

fn status(name: &str, pass: bool) -> bool {
    println!("{name}: {}", if pass { "pass" } else { "FAIL" });
    pass
}

fn execute(verb: Verb) -> anyhow::Result<bool> {
    match verb {
        Verb::Verify(a) => {
            let c = a.config()?;
            let ctx = Context::new(&c)?;
            let v = verify_stage(&ctx)?;
            write_json(&a.out_dir(&c), "verify.json", &v)?;
            status("profile", v.profile.pass);
            status("shs", v.shs.pass);
            Ok(v.pass)
        }
        Verb::Solve(a) => {
            let c = a.config()?;
            let ctx = Context::new(&c)?;
            let (curve, s) = solve_stage(&ctx)?;
            let dir = a.out_dir(&c);
            write_json(&dir, "solve.json", &s)?;
            write_artifact(&dir, "trajectories.csv", leaves_to_csv(std::slice::from_ref(&curve)).as_bytes(), &mut BTreeMap::new())?;
            println!(
                "exponent {:.6e} (kappa {:.6e}), a slope {:.6e}, richardson {:.3}",
                s.fit.exponent,
                ctx.profile.params().kappa,
                s.fit.a_slope,
                s.residual.ratio
            );
            Ok(status("solve", s.pass))
        }
        Verb::Index(a) => {
            let c = a.config()?;
            let ctx = Context::new(&c)?;
            let (curve, _) = solve_stage(&ctx)?;
            let i = index_stage(&ctx, &curve)?;
            write_json(&a.out_dir(&c), "index.json", &i)?;
            println!("mu_CZ(k = 1) = {}, ind = {}, c1 = {}", i.covers[0].mu, i.ind, i.c1);
            Ok(status("index", i.pass))
        }
        Verb::Run(a) => {
            let c = a.config()?;
            let dir = a.out_dir(&c);
            let r = run_pipeline(&c, Some(&dir))?;
            status("verify", r.verify.pass);
            status("solve", r.solve.pass);
            status("index", r.index.pass);
            status("foliation", r.foliation.pass);
            println!("report: {}", dir.join("report.json").display());
            Ok(status("overall", r.pass))
        }
        Verb::Plot(a) => {
            let c = a.config()?;
            let ctx = Context::new(&c)?;
            let (leaves, _) = foliation_stage(&ctx)?;
            let dir = a.out_dir(&c);
            for (name, svg) in plots(&ctx, &leaves)? {
                let p = write_artifact(&dir, &name, svg.as_bytes(), &mut BTreeMap::new())?;
                println!("{}", p.display());
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(w) = std::env::var(WORKERS_ENV) {
        match w.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: {WORKERS_ENV} must be a positive integer, got {w:?}");
                return ExitCode::from(2);
            }
        }
    }
    match execute(cli.verb) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
