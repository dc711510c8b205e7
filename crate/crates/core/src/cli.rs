//! The `freelab` command line.
//!
//! Exit codes: 0 success, 1 an inequality failed, 2 bad input (parse errors,
//! preconditions, violated hypotheses), 3 solver or sampler failure, 4 I/O.
//! `FREELAB_THREADS` caps the worker pool.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::equilibrium::{free_pressure, moment_map, solve_equilibrium, MomentMapConfig, SolverConfig};
use crate::error::{FreeError, Result};
use crate::inequalities::{verify, InequalityInputs, InequalityKind, InequalityReport};
use crate::parse::{parse_measure, parse_potential};
use crate::report::{self, EquilibriumJson, InequalityJson, Real, SeriesJson, ValuesJson, SCHEMA_VERSION};
use crate::rmt::{
    empirical_vs_equilibrium, micro_pressure_estimate, micro_pressure_series, sample_eigenvalues_with, SamplerConfig,
};
use crate::transport::w2;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Statistic {
    /// KS distance to the equilibrium measure.
    Ks,
    /// Mean discrete energy minus the equilibrium energy.
    Rate,
    /// Finite-N pressure by thermodynamic integration.
    Pressure,
}

#[derive(Debug, Parser)]
#[command(name = "freelab", version, about = "Free entropy, transport and equilibrium measures on the line")]
struct Cli {
    /// Grid size for measures and equilibria.
    #[arg(long, global = true, default_value_t = crate::measures::DEFAULT_NODES)]
    nodes: usize,
    /// Tolerance; the default depends on the command.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Report path; the report goes to stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Record wall-clock times in reports.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    pub kind: String,
    #[arg(long)]
    pub mu: Option<String>,
    #[arg(long)]
    pub nu: Option<String>,
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long)]
    pub g: Option<String>,
    #[arg(long)]
    pub h: Option<String>,
    #[arg(long)]
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum RmtCommand {
    /// Sample eigenvalues; CSV with columns `sweep,eig_1..eig_N`.
    Sample {
        #[arg(long)]
        potential: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        sweeps: usize,
        #[arg(long, default_value_t = 4)]
        chains: usize,
    },
    /// A statistic over several matrix sizes.
    Converge {
        #[arg(long)]
        potential: String,
        #[arg(long, value_delimiter = ',', default_values_t = vec![8, 16, 32, 64])]
        ns: Vec<usize>,
        #[arg(long, value_enum, default_value_t = Statistic::Ks)]
        statistic: Statistic,
        #[arg(long, default_value_t = 500)]
        sweeps: usize,
        /// Eigenvalue box for the pressure statistic.
        #[arg(long, default_value_t = 4.0)]
        radius: f64,
    },
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Solve for the equilibrium measure of a potential.
    Equilibrium {
        #[arg(long)]
        potential: String,
        /// Attempt potentials without a convexity certificate.
        #[arg(long)]
        allow_nonconvex: bool,
    },
    /// Evaluate one inequality.
    Verify(VerifyArgs),
    /// Evaluate every line of a CSV manifest `kind,mu,nu,f,g,h,theta,tol`.
    VerifySuite {
        #[arg(long)]
        manifest: PathBuf,
        /// Directory for one JSON report per manifest line.
        #[arg(long)]
        report_dir: Option<PathBuf>,
    },
    /// Quadratic Wasserstein distance.
    W2 {
        #[arg(long)]
        mu: String,
        #[arg(long)]
        nu: String,
    },
    /// Eigenvalue sampling for unitary-invariant ensembles.
    #[command(subcommand)]
    Rmt(RmtCommand),
    /// Convex potential whose equilibrium pushes forward to `mu`.
    MomentMap {
        #[arg(long)]
        mu: String,
    },
    /// Free pressure, or the finite-N pressure with `--n`.
    Pressure {
        #[arg(long)]
        potential: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 4.0)]
        radius: f64,
    },
}

/// A validated invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub nodes: usize,
    pub tolerance: Option<f64>,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub timing: bool,
}

impl RunConfig {
    pub fn from_args<I, T>(args: I) -> std::result::Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        let cli = Cli::try_parse_from(args)?;
        Ok(RunConfig {
            command: cli.command,
            nodes: cli.nodes,
            tolerance: cli.tol,
            seed: cli.seed,
            output_path: cli.out,
            format: cli.format,
            timing: cli.timing,
        })
    }

    fn validate(&self) -> Result<()> {
        if self.nodes < 256 {
            return Err(FreeError::Precondition(format!("--nodes must be at least 256, got {}", self.nodes)));
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0) || !t.is_finite() {
                return Err(FreeError::Precondition(format!("--tol must be positive, got {t}")));
            }
        }
        Ok(())
    }

    fn solver(&self) -> SolverConfig {
        SolverConfig { nodes: self.nodes, tolerance: self.tolerance.unwrap_or(SolverConfig::default().tolerance), ..SolverConfig::default() }
    }
}

pub fn exit_code(e: &FreeError) -> i32 {
    match e {
        FreeError::Io(_) => EXIT_IO,
        FreeError::SolverFailure(_) | FreeError::MultiCutUnsupported(_) | FreeError::Sampler(_) | FreeError::SingularEvaluation(_) => {
            EXIT_SOLVER
        }
        _ => EXIT_INPUT,
    }
}

/// Threads from `FREELAB_THREADS`, or rayon's default when unset or invalid.
pub fn worker_threads() -> usize {
    std::env::var("FREELAB_THREADS").ok().and_then(|v| v.parse().ok()).filter(|&n| n > 0).unwrap_or(0)
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match RunConfig::from_args(args) {
        Ok(cfg) => run(&cfg),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}

pub fn run(cfg: &RunConfig) -> i32 {
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(worker_threads()).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return EXIT_IO;
        }
    };
    match pool.install(|| cfg.validate().and_then(|_| dispatch(cfg))) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Writes the report to `--out`, or to stdout; the summary goes to stdout after a
/// file write and to stderr otherwise.
fn emit(cfg: &RunConfig, text: &str, summary: &str) -> Result<()> {
    match &cfg.output_path {
        Some(path) => {
            report::write_text(path, text)?;
            to_stdout(&format!("{summary}\n"))?;
        }
        None => {
            to_stdout(text)?;
            eprintln!("{summary}");
        }
    }
    Ok(())
}

/// A closed pipe (`freelab ... | head`) is not an error.
fn to_stdout(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn csv_unsupported(what: &str) -> FreeError {
    FreeError::Precondition(format!("{what} reports are JSON only"))
}

fn inputs_from(args: &VerifyArgs, nodes: usize) -> Result<InequalityInputs> {
    let mut inputs = InequalityInputs::new();
    inputs.solver.nodes = nodes;
    if let Some(s) = &args.mu {
        inputs = inputs.with_mu(s, parse_measure(s, nodes)?);
    }
    if let Some(s) = &args.nu {
        inputs = inputs.with_nu(s, parse_measure(s, nodes)?);
    }
    if let Some(s) = &args.f {
        inputs = inputs.with_f(parse_potential(s)?);
    }
    if let Some(s) = &args.g {
        inputs = inputs.with_g(parse_potential(s)?);
    }
    if let Some(s) = &args.h {
        inputs = inputs.with_h(parse_potential(s)?);
    }
    if let Some(t) = args.theta {
        inputs = inputs.with_theta(t);
    }
    Ok(inputs)
}

fn summary_line(r: &InequalityReport) -> String {
    format!(
        "{} {} lhs={} rhs={} deficit={}",
        r.kind,
        if r.pass { "PASS" } else { "FAIL" },
        report::format_real(r.lhs),
        report::format_real(r.rhs),
        report::format_real(r.deficit)
    )
}

fn dispatch(cfg: &RunConfig) -> Result<i32> {
    match &cfg.command {
        Command::Equilibrium { potential, allow_nonconvex } => {
            let u = parse_potential(potential)?;
            let eq = solve_equilibrium(&u, &SolverConfig { allow_nonconvex: *allow_nonconvex, ..cfg.solver() })?;
            let text = match cfg.format {
                Format::Json => report::to_json_string(&EquilibriumJson::new(&eq, cfg.seed))?,
                Format::Csv => report::density_csv(&eq)?,
            };
            let summary = format!(
                "equilibrium {} support=[{:.10}, {:.10}] pressure={:.12} el_residual={:.3e} method={}",
                eq.potential, eq.support_lo, eq.support_hi, eq.pressure, eq.el_residual, eq.method
            );
            emit(cfg, &text, &summary)?;
            Ok(EXIT_OK)
        }
        Command::Verify(args) => {
            let kind: InequalityKind = args.kind.parse()?;
            let inputs = inputs_from(args, cfg.nodes)?;
            let r = verify(kind, &inputs, cfg.tolerance.unwrap_or(1e-3))?;
            let text = match cfg.format {
                Format::Json => report::to_json_string(&InequalityJson::new(&r, cfg.seed, cfg.timing))?,
                Format::Csv => report::inequality_csv(std::slice::from_ref(&r))?,
            };
            emit(cfg, &text, &summary_line(&r))?;
            Ok(if r.pass { EXIT_OK } else { EXIT_FAILED })
        }
        Command::VerifySuite { manifest, report_dir } => run_suite(cfg, manifest, report_dir.as_deref()),
        Command::W2 { mu, nu } => {
            let (m, n) = (parse_measure(mu, cfg.nodes)?, parse_measure(nu, cfg.nodes)?);
            let t = w2(&m, &n);
            let values = ValuesJson {
                schema_version: SCHEMA_VERSION,
                kind: "w2".into(),
                inputs: BTreeMap::from([("mu".to_string(), mu.clone()), ("nu".to_string(), nu.clone())]),
                values: BTreeMap::from([("cost".to_string(), Real(t.cost)), ("cost_squared".to_string(), Real(t.squared()))]),
                resolution: t.resolution,
                seed: cfg.seed,
                table: vec![],
            };
            if cfg.format == Format::Csv {
                return Err(csv_unsupported("w2"));
            }
            let summary = format!("w2 cost={} cost^2={} coupling={}", report::format_real(t.cost), report::format_real(t.squared()), t.coupling.as_str());
            emit(cfg, &report::to_json_string(&values)?, &summary)?;
            Ok(EXIT_OK)
        }
        Command::Rmt(RmtCommand::Sample { potential, n, sweeps, chains }) => {
            let v = parse_potential(potential)?;
            let sc = SamplerConfig { chains: *chains, sweeps: *sweeps, ..SamplerConfig::default() };
            let s = sample_eigenvalues_with(&v, *n, &sc, cfg.seed)?;
            if cfg.format == Format::Json {
                return Err(FreeError::Precondition("eigenvalue samples are CSV only; pass --format csv".into()));
            }
            let summary = format!("rmt sample {} N={} sets={} acceptance={:.4}", s.potential, s.n, s.eigenvalue_sets.len(), s.acceptance_rate);
            emit(cfg, &report::sample_csv(&s)?, &summary)?;
            Ok(EXIT_OK)
        }
        Command::Rmt(RmtCommand::Converge { potential, ns, statistic, sweeps, radius }) => {
            let v = parse_potential(potential)?;
            if ns.is_empty() || ns.windows(2).any(|w| w[1] <= w[0]) {
                return Err(FreeError::Precondition("--ns must be strictly increasing".into()));
            }
            let eq = solve_equilibrium(&v, &cfg.solver())?;
            let series = match statistic {
                Statistic::Pressure => {
                    let r = eq.support_lo.abs().max(eq.support_hi.abs());
                    let mut s = micro_pressure_series(&v, *radius, ns, cfg.seed, r)?;
                    s.target = Some(eq.pressure);
                    s
                }
                Statistic::Ks | Statistic::Rate => {
                    let sc = SamplerConfig { chains: 8, sweeps: *sweeps, ..SamplerConfig::default() };
                    let samples = ns.iter().map(|&n| sample_eigenvalues_with(&v, n, &sc, cfg.seed)).collect::<Result<Vec<_>>>()?;
                    let cmp = empirical_vs_equilibrium(&samples, &eq, &v)?;
                    if *statistic == Statistic::Ks { cmp.ks } else { cmp.rate_surrogate }
                }
            };
            let text = match cfg.format {
                Format::Json => report::to_json_string(&SeriesJson::new(&series, cfg.seed))?,
                Format::Csv => report::series_csv(&series)?,
            };
            let stats: Vec<String> = series.statistic.iter().map(|v| format!("{v:.6}")).collect();
            emit(cfg, &text, &format!("rmt converge {} N={:?} statistic=[{}]", series.label, series.n_values, stats.join(", ")))?;
            Ok(EXIT_OK)
        }
        Command::MomentMap { mu } => {
            if cfg.format == Format::Csv {
                return Err(csv_unsupported("moment-map"));
            }
            let m = parse_measure(mu, cfg.nodes)?;
            let mcfg = MomentMapConfig { solver: SolverConfig { check_probes: false, ..cfg.solver() }, tolerance: cfg.tolerance.unwrap_or(MomentMapConfig::default().tolerance), ..MomentMapConfig::default() };
            let mm = moment_map(&m, &mcfg)?;
            let (lo, hi) = (mm.equilibrium.support_lo, mm.equilibrium.support_hi);
            let table = (0..=256)
                .map(|i| {
                    let x = lo + (hi - lo) * i as f64 / 256.0;
                    [Real(x), Real(mm.potential.value(x))]
                })
                .collect();
            let values = ValuesJson {
                schema_version: SCHEMA_VERSION,
                kind: "moment-map".into(),
                inputs: BTreeMap::from([("mu".to_string(), mu.clone())]),
                values: BTreeMap::from([
                    ("pushforward_defect".to_string(), Real(mm.pushforward_defect)),
                    ("iterations".to_string(), Real(mm.iterations as f64)),
                    ("pressure".to_string(), Real(mm.equilibrium.pressure)),
                    ("support_lo".to_string(), Real(lo)),
                    ("support_hi".to_string(), Real(hi)),
                ]),
                resolution: cfg.nodes,
                seed: cfg.seed,
                table,
            };
            let summary = format!("moment-map {mu} defect={:.3e} iterations={} support=[{lo:.10}, {hi:.10}]", mm.pushforward_defect, mm.iterations);
            emit(cfg, &report::to_json_string(&values)?, &summary)?;
            Ok(EXIT_OK)
        }
        Command::Pressure { potential, n, radius } => {
            if cfg.format == Format::Csv {
                return Err(csv_unsupported("pressure"));
            }
            let u = parse_potential(potential)?;
            let mut values = BTreeMap::new();
            let mut inputs = BTreeMap::from([("potential".to_string(), potential.clone())]);
            match n {
                None => {
                    values.insert("pressure".to_string(), Real(free_pressure(&u)?));
                }
                Some(n) => {
                    let eq = solve_equilibrium(&u, &SolverConfig { check_probes: false, ..cfg.solver() })?;
                    let r = eq.support_lo.abs().max(eq.support_hi.abs());
                    let p = micro_pressure_estimate(&u, *radius, *n, cfg.seed, r)?;
                    inputs.insert("n".into(), n.to_string());
                    inputs.insert("radius".into(), radius.to_string());
                    values.insert("pressure".to_string(), Real(p.value));
                    values.insert("std_error".to_string(), Real(p.std_error));
                    values.insert("low_confidence".to_string(), Real(if p.low_confidence { 1.0 } else { 0.0 }));
                    values.insert("free_pressure".to_string(), Real(eq.pressure));
                }
            }
            let summary = format!("pressure {potential} value={}", report::format_real(values["pressure"].0));
            let j = ValuesJson { schema_version: SCHEMA_VERSION, kind: "pressure".into(), inputs, values, resolution: cfg.nodes, seed: cfg.seed, table: vec![] };
            emit(cfg, &report::to_json_string(&j)?, &summary)?;
            Ok(EXIT_OK)
        }
    }
}

/// One manifest row.
#[derive(Debug, Clone, Default, serde::Deserialize)]
pub struct ManifestRow {
    pub kind: String,
    #[serde(default)]
    pub mu: String,
    #[serde(default)]
    pub nu: String,
    #[serde(default)]
    pub f: String,
    #[serde(default)]
    pub g: String,
    #[serde(default)]
    pub h: String,
    #[serde(default)]
    pub theta: String,
    #[serde(default)]
    pub tol: String,
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestRow>> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_path(path)?;
    let mut rows = Vec::new();
    for (i, rec) in reader.deserialize().enumerate() {
        rows.push(rec.map_err(|e| FreeError::Parse { msg: format!("manifest row {}: {e}", i + 2), pos: i + 2 })?);
    }
    Ok(rows)
}

fn opt(s: &str) -> Option<String> {
    (!s.is_empty()).then(|| s.to_string())
}

fn run_row(row: &ManifestRow, nodes: usize, default_tol: f64) -> Result<InequalityReport> {
    let kind: InequalityKind = row.kind.parse()?;
    let theta = match opt(&row.theta) {
        Some(t) => Some(t.parse::<f64>().map_err(|_| FreeError::Parse { msg: format!("bad theta `{t}`"), pos: 0 })?),
        None => None,
    };
    let tol = match opt(&row.tol) {
        Some(t) => t.parse::<f64>().map_err(|_| FreeError::Parse { msg: format!("bad tol `{t}`"), pos: 0 })?,
        None => default_tol,
    };
    let args = VerifyArgs { kind: row.kind.clone(), mu: opt(&row.mu), nu: opt(&row.nu), f: opt(&row.f), g: opt(&row.g), h: opt(&row.h), theta };
    verify(kind, &inputs_from(&args, nodes)?, tol)
}

fn run_suite(cfg: &RunConfig, manifest: &Path, report_dir: Option<&Path>) -> Result<i32> {
    let rows = read_manifest(manifest)?;
    if rows.is_empty() {
        return Err(FreeError::Precondition(format!("manifest {} has no rows", manifest.display())));
    }
    let tol = cfg.tolerance.unwrap_or(1e-3);
    let outcomes: Vec<Result<InequalityReport>> = rows.par_iter().map(|row| run_row(row, cfg.nodes, tol)).collect();
    if let Some(dir) = report_dir {
        std::fs::create_dir_all(dir).map_err(|e| FreeError::Io(format!("{}: {e}", dir.display())))?;
        for (i, out) in outcomes.iter().enumerate() {
            if let Ok(r) = out {
                let path = dir.join(format!("line_{:03}_{}.json", i + 1, r.kind.name().to_ascii_lowercase()));
                report::write_json(&path, &InequalityJson::new(r, cfg.seed, cfg.timing))?;
            }
        }
    }
    let mut reports = Vec::new();
    let mut first_error = None;
    for (i, out) in outcomes.into_iter().enumerate() {
        match out {
            Ok(r) => reports.push(r),
            Err(e) => {
                eprintln!("manifest row {}: {e}", i + 2);
                first_error.get_or_insert(e);
            }
        }
    }
    reports.sort_by_key(|r| (r.kind, descriptor(r)));
    let failed = reports.iter().filter(|r| !r.pass).count();
    let text = report::inequality_csv(&reports)?;
    let summary = format!("verify-suite rows={} passed={} failed={} errors={}", rows.len(), reports.len() - failed, failed, rows.len() - reports.len());
    emit(cfg, &text, &summary)?;
    if let Some(e) = first_error {
        return Ok(exit_code(&e));
    }
    Ok(if failed == 0 { EXIT_OK } else { EXIT_FAILED })
}

fn descriptor(r: &InequalityReport) -> String {
    r.inputs.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
}
