//! Command-line harness: one subcommand per analysis, JSON configs, CSV/JSON
//! artifacts. Exit status 0 on success, 2 on a failed verification, 1 on
//! usage or configuration errors.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::balance_solver::{solve, SolverConfig};
use crate::error::{Error, Result};
use crate::flux_model::{log_grid, FluxModel, FluxSpec};
use crate::kinetic_geometry::{verify_transport_estimate, Geometry, GridSolution, KineticBox};
use crate::matrix_decomp::{decompose_general, decompose_improved, directional_gain, h_inverse_norm_certificate};
use crate::regularity_estimator::{bootstrap_iterate, empirical_holder, oscillation_profiles, Variant};
use crate::verify;

#[derive(Debug, Parser)]
#[command(name = "holderlab", version, about = "Hölder regularity diagnostics for scalar balance laws")]
pub struct Cli {
    /// Experiment configuration (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized sampling; overrides `seed` in the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Nonlinearity exponent fit and spanning checks for the flux.
    FluxReport,
    /// Decompose a vector into increments of f'.
    Decompose,
    /// Norm tables of the inverse node matrix and directional gains.
    HCertify,
    /// Run the finite-volume solver and store the solution.
    Solve,
    /// Check the transport estimate on stored solution slices.
    KineticVerify,
    /// Oscillation profiles and fitted exponents.
    Hprofile,
    /// Exponent bootstrap schedule.
    Bootstrap,
    /// Empirical Hölder seminorm of a stored slice.
    HolderCheck,
    /// Rerun every acceptance check.
    VerifyAll,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub flux: Option<FluxSpec>,
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub flux_report: Option<FluxReportSpec>,
    pub decompose: Option<DecomposeSpec>,
    pub h_certify: Option<CertifySpec>,
    pub solver: Option<SolverConfig>,
    /// Stored solution for the analysis subcommands, relative to the config file.
    pub solution: Option<PathBuf>,
    pub kinetic: Option<KineticSpec>,
    pub hprofile: Option<ProfileSpec>,
    pub bootstrap: Option<BootstrapSpec>,
    pub holder_check: Option<HolderSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaGrid {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

fn default_deltas() -> DeltaGrid {
    DeltaGrid { lo: 1e-4, hi: 1e-1, count: 13 }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluxReportSpec {
    pub n_directions: Option<usize>,
    #[serde(default = "default_deltas")]
    pub deltas: DeltaGrid,
    /// Points at which the spanning condition is checked.
    #[serde(default)]
    pub spanning_points: Vec<f64>,
    #[serde(default = "default_span_tol")]
    pub spanning_tol: f64,
}

fn default_span_tol() -> f64 {
    1e-10
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Improved,
    General,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecomposeSpec {
    pub v: f64,
    pub h: f64,
    pub a: Vec<f64>,
    #[serde(default)]
    pub method: Method,
    /// Nonlinearity exponent for the general method.
    pub alpha: Option<f64>,
}

fn dyadic(count: usize) -> Vec<f64> {
    (0..count).map(|k| 0.5f64.powi(k as i32)).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifySpec {
    pub d: usize,
    /// Defaults to `2^0, ..., 2^-12`.
    pub h_list: Option<Vec<f64>>,
    /// Directional gains of the configured flux at `v` for each `ell`.
    pub directional: Option<DirectionalSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectionalSpec {
    pub v: f64,
    pub ells: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KineticSpec {
    pub t_index: usize,
    pub horizon: f64,
    pub g_bound: f64,
    pub boxes: Vec<KineticBox>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub t_index: usize,
    pub centers: Vec<Vec<f64>>,
    pub radii: Vec<f64>,
    #[serde(default = "default_geometry")]
    pub geometry: Geometry,
}

fn default_geometry() -> Geometry {
    Geometry::Cube
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BootstrapSpec {
    pub d: usize,
    #[serde(default = "one")]
    pub alpha: f64,
    pub variant: Variant,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub g_norm: f64,
}

fn one() -> f64 {
    1.0
}

fn default_tol() -> f64 {
    1e-13
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HolderSpec {
    pub t_index: usize,
    pub gamma: f64,
    #[serde(default = "default_pairs")]
    pub pairs: usize,
}

fn default_pairs() -> usize {
    10_000
}

/// Failure kinds, mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

pub fn load_config(path: &Path) -> std::result::Result<ExperimentConfig, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let at = e.path().to_string();
        Failure::Usage(format!("config error at `{at}`: {}", e.into_inner()))
    })
}

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

struct Context {
    cfg: ExperimentConfig,
    base: PathBuf,
    out: PathBuf,
    seed: u64,
}

fn missing(section: &str) -> Failure {
    Failure::Usage(format!("config error at `{section}`: section required for this subcommand"))
}

impl Context {
    fn flux(&self) -> std::result::Result<FluxModel, Failure> {
        Ok(FluxModel::from_spec(self.cfg.flux.as_ref().ok_or_else(|| missing("flux"))?)?)
    }

    fn write(&self, name: &str, contents: &str) -> std::result::Result<PathBuf, Failure> {
        fs::create_dir_all(&self.out).map_err(|e| Failure::Usage(format!("cannot create {}: {e}", self.out.display())))?;
        let p = self.out.join(name);
        fs::write(&p, contents).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display())))?;
        Ok(p)
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> std::result::Result<PathBuf, Failure> {
        let s = serde_json::to_string_pretty(value).map_err(|e| Failure::Usage(e.to_string()))?;
        self.write(name, &(s + "\n"))
    }

    fn solution_path(&self) -> PathBuf {
        match &self.cfg.solution {
            Some(p) if p.is_absolute() => p.clone(),
            Some(p) => self.base.join(p),
            None => self.out.join("solution.bin"),
        }
    }

    fn solution(&self) -> std::result::Result<GridSolution, Failure> {
        let p = self.solution_path();
        if !p.exists() {
            return Err(Failure::Usage(format!("config error at `solution`: {} does not exist", p.display())));
        }
        Ok(GridSolution::read_binary(&p)?)
    }
}

#[derive(Serialize)]
struct FluxReportOut<'a> {
    flux: &'a FluxSpec,
    alpha: f64,
    constant: f64,
    inconclusive: bool,
    worst_direction: Option<Vec<f64>>,
    spanning: Vec<SpanOut>,
}

#[derive(Serialize)]
struct SpanOut {
    v: f64,
    spans: bool,
    min_singular_value: f64,
    augmented_spans: bool,
}

fn flux_report(ctx: &Context) -> std::result::Result<(), Failure> {
    let flux = ctx.flux()?;
    let spec = ctx.cfg.flux_report.clone().unwrap_or(FluxReportSpec {
        n_directions: None,
        deltas: default_deltas(),
        spanning_points: vec![],
        spanning_tol: default_span_tol(),
    });
    let d = flux.dim();
    let deltas = log_grid(spec.deltas.lo, spec.deltas.hi, spec.deltas.count);
    let rep = flux.fit_alpha(spec.n_directions.unwrap_or(64 * d), &deltas, ctx.seed)?;
    let points = if spec.spanning_points.is_empty() { vec![0.0, 0.25, 0.5, 0.75, 1.0] } else { spec.spanning_points };
    let spanning = points
        .iter()
        .map(|&v| {
            let s = flux.spanning_check(v, spec.spanning_tol)?;
            Ok(SpanOut { v, spans: s.spans, min_singular_value: s.min_singular_value, augmented_spans: s.augmented_spans })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut csv = String::from("direction,delta,measure,direction_alpha\n");
    for (k, row) in rep.measures.iter().enumerate() {
        let a = rep.direction_alpha[k].map_or(String::new(), fmt_f64);
        for (delta, m) in rep.deltas.iter().zip(row) {
            let _ = writeln!(csv, "{k},{},{},{a}", fmt_f64(*delta), fmt_f64(*m));
        }
    }
    ctx.write("flux_report.csv", &csv)?;
    let out = FluxReportOut {
        flux: flux.spec(),
        alpha: rep.alpha,
        constant: rep.constant,
        inconclusive: rep.inconclusive,
        worst_direction: rep.worst_direction.map(|k| rep.directions[k].clone()),
        spanning,
    };
    ctx.write_json("flux_report.json", &out)?;
    println!("alpha = {} (constant {}){}", out.alpha, out.constant, if out.inconclusive { ", inconclusive" } else { "" });
    Ok(())
}

fn decompose(ctx: &Context) -> std::result::Result<(), Failure> {
    let flux = ctx.flux()?;
    let spec = ctx.cfg.decompose.as_ref().ok_or_else(|| missing("decompose"))?;
    let dec = match spec.method {
        Method::Improved => decompose_improved(&flux, spec.v, spec.h, &spec.a)?,
        Method::General => {
            let alpha = spec.alpha.ok_or_else(|| missing("decompose.alpha"))?;
            decompose_general(&flux, spec.v, spec.h, &spec.a, alpha)?
        }
    };
    ctx.write_json("decompose.json", &dec)?;
    println!("lambda = {:?}", dec.coefficients);
    Ok(())
}

fn h_certify(ctx: &Context) -> std::result::Result<(), Failure> {
    let spec = ctx.cfg.h_certify.as_ref().ok_or_else(|| missing("h_certify"))?;
    let hs = spec.h_list.clone().unwrap_or_else(|| dyadic(13));
    let rows = h_inverse_norm_certificate(spec.d, &hs)?;
    let mut csv = String::from("h,norm,product\n");
    for r in &rows {
        let _ = writeln!(csv, "{},{},{}", fmt_f64(r.h), fmt_f64(r.norm), fmt_f64(r.product));
    }
    ctx.write("h_certify.csv", &csv)?;
    if let Some(dir) = &spec.directional {
        let flux = ctx.flux()?;
        let mut csv = String::from("ell,h,lambda_norm,product,residual\n");
        for &ell in &dir.ells {
            for r in directional_gain(&flux, dir.v, &hs, ell)? {
                let _ = writeln!(csv, "{ell},{},{},{},{}", fmt_f64(r.h), fmt_f64(r.lambda_norm), fmt_f64(r.product), fmt_f64(r.residual));
            }
        }
        ctx.write("h_directional.csv", &csv)?;
    }
    let (lo, hi) = rows.iter().fold((f64::INFINITY, 0.0f64), |(a, b), r| (a.min(r.product), b.max(r.product)));
    println!("product range [{lo}, {hi}], max/min {}", hi / lo);
    Ok(())
}

fn run_solve(ctx: &Context) -> std::result::Result<(), Failure> {
    let cfg = ctx.cfg.solver.as_ref().ok_or_else(|| missing("solver"))?;
    if ctx.cfg.flux.as_ref().is_some_and(|f| *f != cfg.flux) {
        log::warn!("solver.flux differs from the top-level flux; the solver uses solver.flux");
    }
    let sol = solve(cfg)?;
    fs::create_dir_all(&ctx.out).map_err(|e| Failure::Usage(e.to_string()))?;
    sol.write_binary(&ctx.out.join("solution.bin"))?;
    let manifest = sol.manifest();
    ctx.write_json("solution.json", &manifest)?;
    let mut csv = String::from("index,time,min,max,mean\n");
    for s in &manifest.slices {
        let _ = writeln!(csv, "{},{},{},{},{}", s.index, fmt_f64(s.time), fmt_f64(s.min), fmt_f64(s.max), fmt_f64(s.mean));
    }
    ctx.write("solution_manifest.csv", &csv)?;
    println!("{} slices of {} cells written to {}", sol.n_slices(), sol.n_cells(), ctx.out.join("solution.bin").display());
    Ok(())
}

fn kinetic_verify(ctx: &Context) -> std::result::Result<(), Failure> {
    let flux = ctx.flux()?;
    let spec = ctx.cfg.kinetic.as_ref().ok_or_else(|| missing("kinetic"))?;
    let sol = ctx.solution()?;
    let mut csv = String::from("box,lhs,rhs,tolerance,floor,pass\n");
    let mut failed = 0;
    for (k, b) in spec.boxes.iter().enumerate() {
        let horizon = b.time_shift.unwrap_or(spec.horizon);
        let c = verify_transport_estimate(&sol, &flux, b, spec.t_index, horizon, spec.g_bound)?;
        failed += usize::from(!c.pass);
        let _ = writeln!(csv, "{k},{},{},{},{},{}", fmt_f64(c.lhs), fmt_f64(c.rhs), fmt_f64(c.tolerance), fmt_f64(c.floor), c.pass);
    }
    ctx.write("kinetic_verify.csv", &csv)?;
    println!("{}/{} boxes pass", spec.boxes.len() - failed, spec.boxes.len());
    if failed > 0 {
        return Err(Failure::Verification(format!("{failed} boxes violate the transport estimate")));
    }
    Ok(())
}

fn hprofile(ctx: &Context) -> std::result::Result<(), Failure> {
    let spec = ctx.cfg.hprofile.as_ref().ok_or_else(|| missing("hprofile"))?;
    let sol = ctx.solution()?;
    let profiles = oscillation_profiles(&sol, spec.t_index, &spec.centers, &spec.radii, spec.geometry)?;
    let mut csv = String::from("center,r,h_r,used,gamma,constant\n");
    for (k, p) in profiles.iter().enumerate() {
        let g = p.gamma.map_or(String::new(), fmt_f64);
        let c = p.constant.map_or(String::new(), fmt_f64);
        for ((r, h), used) in p.radii.iter().zip(&p.values).zip(&p.used) {
            let _ = writeln!(csv, "{k},{},{},{used},{g},{c}", fmt_f64(*r), fmt_f64(*h));
        }
    }
    ctx.write("hprofile.csv", &csv)?;
    ctx.write_json("hprofile.json", &profiles)?;
    for (k, p) in profiles.iter().enumerate() {
        match p.gamma {
            Some(g) => println!("center {k}: gamma = {g}"),
            None => println!("center {k}: inconclusive"),
        }
    }
    Ok(())
}

fn bootstrap(ctx: &Context) -> std::result::Result<(), Failure> {
    let spec = ctx.cfg.bootstrap.as_ref().ok_or_else(|| missing("bootstrap"))?;
    let s = bootstrap_iterate(spec.d, spec.alpha, spec.tol, spec.variant, spec.g_norm)?;
    let mut csv = String::from("n,gamma_n,C_n\n");
    for (n, g, c) in s.rows() {
        let _ = writeln!(csv, "{n},{},{}", fmt_f64(g), fmt_f64(c));
    }
    ctx.write("bootstrap.csv", &csv)?;
    ctx.write_json("bootstrap.json", &s)?;
    println!("limit {} after {} steps (fixed point {})", s.limit, s.gammas.len() - 1, s.fixed_point);
    Ok(())
}

#[derive(Serialize)]
struct HolderOut {
    t_index: usize,
    gamma: f64,
    pairs: usize,
    seed: u64,
    seminorm: f64,
}

fn holder_check(ctx: &Context) -> std::result::Result<(), Failure> {
    let spec = ctx.cfg.holder_check.as_ref().ok_or_else(|| missing("holder_check"))?;
    let sol = ctx.solution()?;
    let seminorm = empirical_holder(&sol, spec.t_index, spec.gamma, spec.pairs, ctx.seed)?;
    ctx.write_json("holder_check.json", &HolderOut { t_index: spec.t_index, gamma: spec.gamma, pairs: spec.pairs, seed: ctx.seed, seminorm })?;
    println!("seminorm estimate {seminorm}");
    Ok(())
}

fn verify_all(ctx: &Context) -> std::result::Result<(), Failure> {
    let checks = verify::run_all(ctx.seed);
    let mut csv = String::from("check,pass,seconds,detail\n");
    for c in &checks {
        let _ = writeln!(csv, "{},{},{:.3},\"{}\"", c.name, c.pass, c.seconds, c.detail.replace('"', "'"));
        println!("{:<26} {}  {}", c.name, if c.pass { "pass" } else { "FAIL" }, c.detail);
    }
    ctx.write("verify_all.csv", &csv)?;
    let failed = checks.iter().filter(|c| !c.pass).count();
    if failed > 0 {
        return Err(Failure::Verification(format!("{failed} checks failed")));
    }
    Ok(())
}

pub fn run(cli: &Cli) -> std::result::Result<(), Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(format!("cannot configure threads: {e}")))?;
    }
    let (cfg, base) = match &cli.config {
        Some(p) => (load_config(p)?, p.parent().map(Path::to_path_buf).unwrap_or_default()),
        None if matches!(cli.command, Command::VerifyAll) => (ExperimentConfig::default(), PathBuf::new()),
        None => return Err(Failure::Usage("--config is required for this subcommand".into())),
    };
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.output_dir.as_ref().map(|d| if d.is_absolute() { d.clone() } else { base.join(d) }))
        .unwrap_or_else(|| PathBuf::from("holderlab-out"));
    let seed = cli.seed.or(cfg.seed).unwrap_or(0);
    let ctx = Context { cfg, base, out, seed };
    match cli.command {
        Command::FluxReport => flux_report(&ctx),
        Command::Decompose => decompose(&ctx),
        Command::HCertify => h_certify(&ctx),
        Command::Solve => run_solve(&ctx),
        Command::KineticVerify => kinetic_verify(&ctx),
        Command::Hprofile => hprofile(&ctx),
        Command::Bootstrap => bootstrap(&ctx),
        Command::HolderCheck => holder_check(&ctx),
        Command::VerifyAll => verify_all(&ctx),
    }
}

/// Parse arguments, run, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            1
        }
        Err(Failure::Verification(m)) => {
            eprintln!("verification failed: {m}");
            2
        }
    }
}
