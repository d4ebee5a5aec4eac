//! Batch front-end behind the `minssd` binary.
//!
//! Each command reads an optional JSON config (`--config`), patches it with
//! command-line flags, deserializes it into a typed config and validates it
//! before any computation. Exit codes: 0 success, 1 runtime failure,
//! 2 invalid config, 3 failed check.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::ar1::{chain_rng, MinAr1, MinAr1Config, PathPoint};
use crate::decompose::{law_cofactor, lt_ssd_factor, minssd_check};
use crate::discrete::{discrete_minssd_check, discrete_nmin_check, DiscreteFromLt};
use crate::distributions::{LaplaceTransform, MarginalLaw};
use crate::error::Error;
use crate::grid::GridSpec;
use crate::randsize::{nmin_semistable_check, Pgf};
use crate::report::CheckReport;
use crate::stats::{ks_test, KsReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

pub const SEED_ENV: &str = "MINSSD_SEED";

const DEFAULT_GRID: usize = 400;
const DEFAULT_J_MAX: u64 = 1000;
const DEFAULT_TOL: f64 = 1e-12;
const DEFAULT_LEVEL: f64 = 0.01;
const CHAIN_BATCH: usize = 1024;

#[derive(Debug, Parser)]
#[command(
    name = "minssd",
    version,
    about = "Min-semi-selfdecomposable laws: sampling, min-AR(1) simulation and checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw an i.i.d. sample from a law and write it as CSV.
    Sample(Overrides),
    /// Simulate min-AR(1) chains and test the terminal values against the law.
    SimulateAr1(Overrides),
    /// Run one of the analytic checks and write its report.
    Check(Overrides),
    /// Tabulate S(x), S(bx) and the cofactor S(x)/S(bx) on a grid.
    Decompose(Overrides),
    /// Kolmogorov–Smirnov test of a sample file against a law.
    KsTest(Overrides),
}

/// Flags shared by every command. Each one overrides the config key of the
/// same name; keys a command does not know are rejected.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// JSON config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub n: Option<usize>,
    /// CSV data output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// JSON report output (standard output if absent).
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// CSV sample input.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Law kind: semi_pareto, semi_weibull, generalized_semi_pareto, phi_semi_weibull.
    #[arg(long)]
    pub law: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phase: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Sample the integer law with `P{X >= j} = S(j)`.
    #[arg(long)]
    pub discrete: bool,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub level: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub n_chains: Option<usize>,
    #[arg(long)]
    pub n_steps: Option<usize>,
    #[arg(long)]
    pub j_max: Option<u64>,
    /// Check name: minssd, nmin, discrete_minssd, discrete_nmin, lt_ssd.
    #[arg(long)]
    pub check: Option<String>,
    /// Turn a failed statistical verdict or invalid innovation into an error exit.
    #[arg(long)]
    pub strict: bool,
    /// Arbitrary override `dotted.key=value`; the value is parsed as JSON,
    /// falling back to a string.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

/// A failure carrying its exit code.
#[derive(Debug, Clone)]
pub struct CliError {
    pub kind: &'static str,
    pub code: i32,
    pub message: String,
    pub report: Option<Box<CheckReport>>,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError {
            kind: "config",
            code: EXIT_CONFIG,
            message: message.into(),
            report: None,
        }
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        CliError {
            kind: "runtime",
            code: EXIT_RUNTIME,
            message: message.into(),
            report: None,
        }
    }

    /// For a report already written to its destination.
    fn check_failed(report: &CheckReport) -> Self {
        CliError {
            kind: "check_failed",
            code: EXIT_CHECK_FAILED,
            message: format!(
                "check `{}` failed (sup residual {:e} at x = {})",
                report.check, report.sup_residual, report.worst_x
            ),
            report: None,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. }
            | Error::Domain { .. }
            | Error::Support(_)
            | Error::UnsupportedMixer(_) => CliError::config(e.to_string()),
            Error::CheckFailed(report) => CliError {
                report: Some(report.clone()),
                ..CliError::check_failed(&report)
            },
            Error::Solver(_) | Error::EmptySample => CliError::runtime(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::runtime(format!("i/o error: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::runtime(format!("csv error: {e}"))
    }
}

#[derive(Serialize)]
struct ErrorObject<'a> {
    error: ErrorBody<'a>,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    code: i32,
    message: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<&'a CheckReport>,
}

/// The JSON object written to standard error for a failed run.
pub fn error_json(e: &CliError) -> String {
    let obj = ErrorObject {
        error: ErrorBody {
            kind: e.kind,
            code: e.code,
            message: &e.message,
            report: e.report.as_deref(),
        },
    };
    serde_json::to_string_pretty(&obj).expect("error object serializes")
}

/// Parses `std::env::args`, runs the command and returns the exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return EXIT_OK;
            }
            let err = CliError::config(e.to_string().trim_end().to_string());
            eprintln!("{}", error_json(&err));
            return err.code;
        }
    };
    std::panic::set_hook(Box::new(|info| {
        let err = CliError {
            kind: "internal",
            code: EXIT_RUNTIME,
            message: info.to_string(),
            report: None,
        };
        eprintln!("{}", error_json(&err));
    }));
    match std::panic::catch_unwind(|| run(&cli.command)) {
        Ok(Ok(())) => EXIT_OK,
        Ok(Err(e)) => {
            eprintln!("{}", error_json(&e));
            e.code
        }
        Err(_) => EXIT_RUNTIME,
    }
}

pub fn run(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Sample(o) => cmd_sample(&build_config(o, true)?),
        Command::SimulateAr1(o) => cmd_simulate_ar1(&build_config(o, true)?),
        Command::Check(o) => cmd_check(&build_config(o, false)?),
        Command::Decompose(o) => cmd_decompose(&build_config(o, false)?),
        Command::KsTest(o) => cmd_ks_test(&build_config(o, false)?),
    }
}

/// Loads `--config`, applies the flags and, if `needs_seed`, falls back to
/// `MINSSD_SEED` for a missing seed.
fn build_config<T: DeserializeOwned>(o: &Overrides, needs_seed: bool) -> Result<T, CliError> {
    let mut value = match &o.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::config(format!("cannot read config {}: {e}", path.display()))
            })?;
            serde_json::from_str(&text).map_err(|e| {
                CliError::config(format!("config {} is not valid JSON: {e}", path.display()))
            })?
        }
        None => Value::Object(Map::new()),
    };
    if !value.is_object() {
        return Err(CliError::config("config must be a JSON object"));
    }
    apply_overrides(&mut value, o)?;
    if needs_seed && value.get("seed").is_none() {
        if let Ok(s) = std::env::var(SEED_ENV) {
            let seed: u64 = s.trim().parse().map_err(|_| {
                CliError::config(format!("{SEED_ENV}={s:?} is not an unsigned integer"))
            })?;
            set_path(&mut value, "seed", seed.into())?;
        }
    }
    serde_json::from_value(value).map_err(|e| CliError::config(format!("invalid config: {e}")))
}

fn apply_overrides(value: &mut Value, o: &Overrides) -> Result<(), CliError> {
    let path_str = |p: &Path| Value::String(p.to_string_lossy().into_owned());
    let mut pairs: Vec<(&str, Value)> = Vec::new();
    if let Some(v) = o.seed {
        pairs.push(("seed", v.into()));
    }
    if let Some(v) = o.n {
        pairs.push(("n", v.into()));
    }
    if let Some(v) = &o.output {
        pairs.push(("output", path_str(v)));
    }
    if let Some(v) = &o.report {
        pairs.push(("report", path_str(v)));
    }
    if let Some(v) = &o.input {
        pairs.push(("input", path_str(v)));
    }
    if let Some(v) = &o.law {
        pairs.push(("law.kind", v.clone().into()));
    }
    for (key, v) in [
        ("law.psi.alpha", o.alpha),
        ("law.psi.p", o.p),
        ("law.psi.eps", o.eps),
        ("law.psi.phase", o.phase),
        ("law.beta", o.beta),
        ("rho", o.rho),
        ("b", o.b),
        ("c", o.c),
        ("level", o.level),
        ("tol", o.tol),
    ] {
        if let Some(x) = v {
            pairs.push((key, finite_json(key, x)?));
        }
    }
    if let Some(v) = o.n_chains {
        pairs.push(("n_chains", v.into()));
    }
    if let Some(v) = o.n_steps {
        pairs.push(("n_steps", v.into()));
    }
    if let Some(v) = o.j_max {
        pairs.push(("j_max", v.into()));
    }
    if let Some(v) = &o.check {
        pairs.push(("check", v.clone().into()));
    }
    if o.discrete {
        pairs.push(("discrete", true.into()));
    }
    if o.strict {
        pairs.push(("strict", true.into()));
    }
    for (key, v) in pairs {
        set_path(value, key, v)?;
    }
    for item in &o.set {
        let (key, raw) = item
            .split_once('=')
            .ok_or_else(|| CliError::config(format!("--set expects KEY=VALUE, got {item:?}")))?;
        let v = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        set_path(value, key, v)?;
    }
    Ok(())
}

fn finite_json(key: &str, x: f64) -> Result<Value, CliError> {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .ok_or_else(|| CliError::config(format!("{key} must be finite, got {x}")))
}

/// Sets `a.b.c` in a JSON object, creating intermediate objects.
pub fn set_path(value: &mut Value, key: &str, v: Value) -> Result<(), CliError> {
    let mut cur = value;
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::config(format!("malformed key {key:?}")));
    }
    for part in &parts[..parts.len() - 1] {
        let obj = cur.as_object_mut().ok_or_else(|| {
            CliError::config(format!(
                "cannot set {key:?}: `{part}` is inside a non-object"
            ))
        })?;
        cur = obj
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Map::new()));
    }
    let obj = cur
        .as_object_mut()
        .ok_or_else(|| CliError::config(format!("cannot set {key:?}: parent is not an object")))?;
    obj.insert(parts[parts.len() - 1].to_string(), v);
    Ok(())
}

fn default_level() -> f64 {
    DEFAULT_LEVEL
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

fn default_j_max() -> u64 {
    DEFAULT_J_MAX
}

fn check_level(level: f64) -> Result<(), CliError> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(CliError::config(format!(
            "level must lie in (0, 1), got {level}"
        )))
    }
}

fn check_grid(g: Option<GridSpec>, law: &MarginalLaw) -> Result<GridSpec, CliError> {
    match g {
        Some(g) => Ok(GridSpec::log(g.lo, g.hi, g.n)?),
        None => Ok(law.default_grid(DEFAULT_GRID)),
    }
}

/// Pretty JSON to `path`, or to standard output.
fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::runtime(e.to_string()))?;
    match path {
        Some(p) => {
            let mut f = File::create(p)?;
            writeln!(f, "{text}")?;
        }
        None => {
            // A closed downstream pipe is not a failure of the run.
            match writeln!(io::stdout().lock(), "{text}") {
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => return Err(e.into()),
                _ => {}
            }
        }
    }
    Ok(())
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>, CliError> {
    let f = File::create(path)
        .map_err(|e| CliError::runtime(format!("cannot create {}: {e}", path.display())))?;
    Ok(csv::Writer::from_writer(BufWriter::new(f)))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleConfig {
    pub law: MarginalLaw,
    pub n: usize,
    pub seed: u64,
    pub output: PathBuf,
    #[serde(default)]
    pub discrete: bool,
}

#[derive(Debug, Serialize)]
pub struct SampleSummary {
    pub n: usize,
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

pub fn summarize(values: &[f64]) -> SampleSummary {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let median = if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    };
    SampleSummary {
        n,
        min: v[0],
        median,
        max: v[n - 1],
    }
}

pub fn cmd_sample(cfg: &SampleConfig) -> Result<(), CliError> {
    if cfg.n == 0 {
        return Err(CliError::config("n must be at least 1"));
    }
    let discrete = if cfg.discrete {
        Some(DiscreteFromLt::new(cfg.law)?)
    } else {
        None
    };
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let mut w = csv_writer(&cfg.output)?;
    w.write_record(["index", "value"])?;
    let mut values = Vec::with_capacity(cfg.n);
    for i in 0..cfg.n {
        match &discrete {
            Some(d) => {
                let j = d.sample(&mut rng)?;
                w.write_record([i.to_string(), j.to_string()])?;
                values.push(j as f64);
            }
            None => {
                let x = cfg.law.sample_one(&mut rng);
                w.write_record([i.to_string(), x.to_string()])?;
                values.push(x);
            }
        }
    }
    w.flush()?;
    write_json(&summarize(&values), None)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub law: MarginalLaw,
    /// Defaults to the certified `p^{-1/α}`.
    #[serde(default)]
    pub rho: Option<f64>,
    pub n_chains: usize,
    pub n_steps: usize,
    pub seed: u64,
    #[serde(default = "default_level")]
    pub level: f64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub report: Option<PathBuf>,
    #[serde(default)]
    pub strict: bool,
}

#[derive(Debug, Serialize)]
pub struct SimulationReport {
    pub config: MinAr1Config,
    pub certified: bool,
    pub q_inf: Option<f64>,
    pub innovation: CheckReport,
    pub stationarity: Option<KsReport>,
    pub infinite_fraction: Option<f64>,
}

pub fn cmd_simulate_ar1(cfg: &SimulateConfig) -> Result<(), CliError> {
    check_level(cfg.level)?;
    let ar = MinAr1Config {
        marginal: cfg.law,
        rho: cfg
            .rho
            .unwrap_or_else(|| crate::ar1::certified_rho(&cfg.law)),
        n_chains: cfg.n_chains,
        n_steps: cfg.n_steps,
        seed: cfg.seed,
    };
    ar.validate()?;
    let (model, innovation) = MinAr1::inspect(ar)?;
    let mut report = SimulationReport {
        config: ar,
        certified: ar.is_certified(),
        q_inf: innovation.q_inf,
        innovation,
        stationarity: None,
        infinite_fraction: None,
    };
    let Some(model) = model else {
        write_json(&report, cfg.report.as_deref())?;
        if cfg.strict {
            return Err(CliError {
                kind: "invalid_innovation",
                code: EXIT_RUNTIME,
                message: "innovation S(x)/S(x/rho) is not a valid survival function; the chain cannot be stationary".into(),
                report: None,
            });
        }
        return Ok(());
    };
    let (terminal, infinite) = simulate_to_csv(&model, cfg.output.as_deref())?;
    let d = cfg.law;
    let ks = ks_test(&terminal, |x| d.cdf(x), cfg.level)?;
    let draws = cfg.n_chains as u64 * cfg.n_steps as u64;
    report.infinite_fraction = (draws > 0).then(|| infinite as f64 / draws as f64);
    report.stationarity = Some(ks);
    write_json(&report, cfg.report.as_deref())?;
    if cfg.strict && !ks.passed {
        return Err(CliError {
            kind: "check_failed",
            code: EXIT_CHECK_FAILED,
            message: format!(
                "stationarity KS test rejected (p = {:e} at level {})",
                ks.p_value, ks.level
            ),
            report: None,
        });
    }
    Ok(())
}

/// Runs every chain in batches, streaming paths to `output` in chain order.
/// Returns terminal values and the number of infinite innovations.
fn simulate_to_csv(model: &MinAr1, output: Option<&Path>) -> Result<(Vec<f64>, u64), CliError> {
    let cfg = *model.config();
    let mut writer = match output {
        Some(p) => {
            let mut w = csv_writer(p)?;
            w.write_record(["chain_id", "step", "value", "innovation_was_infinite"])?;
            Some(w)
        }
        None => None,
    };
    let mut terminal = Vec::with_capacity(cfg.n_chains);
    let mut infinite = 0u64;
    let mut start = 0usize;
    while start < cfg.n_chains {
        let end = (start + CHAIN_BATCH).min(cfg.n_chains);
        let paths: Vec<Vec<PathPoint>> = (start..end)
            .into_par_iter()
            .map(|i| model.simulate_path(&mut chain_rng(cfg.seed, i as u64)))
            .collect::<crate::error::Result<_>>()?;
        for (offset, path) in paths.iter().enumerate() {
            let chain = start + offset;
            if let Some(w) = writer.as_mut() {
                for (step, pt) in path.iter().enumerate() {
                    w.write_record([
                        chain.to_string(),
                        step.to_string(),
                        pt.value.to_string(),
                        pt.innovation_was_infinite.to_string(),
                    ])?;
                }
            }
            infinite += path.iter().filter(|pt| pt.innovation_was_infinite).count() as u64;
            terminal.push(path.last().expect("paths hold the initial draw").value);
        }
        start = end;
    }
    if let Some(mut w) = writer {
        w.flush()?;
    }
    Ok((terminal, infinite))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Minssd,
    Nmin,
    DiscreteMinssd,
    DiscreteNmin,
    LtSsd,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    pub check: CheckKind,
    #[serde(default)]
    pub law: Option<MarginalLaw>,
    /// Decomposition constant; defaults to the law's scale `p^{1/α}`.
    #[serde(default)]
    pub b: Option<f64>,
    /// Semi-stability constant; defaults to the law's scale `p^{1/α}`.
    #[serde(default)]
    pub c: Option<f64>,
    #[serde(default)]
    pub pgf: Option<Pgf>,
    #[serde(default)]
    pub phi: Option<LaplaceTransform>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default = "default_j_max")]
    pub j_max: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub report: Option<PathBuf>,
}

impl CheckConfig {
    fn law(&self) -> Result<MarginalLaw, CliError> {
        self.law
            .ok_or_else(|| CliError::config(format!("check {:?} requires `law`", self.check)))
    }

    fn pgf(&self) -> Result<Pgf, CliError> {
        self.pgf
            .ok_or_else(|| CliError::config(format!("check {:?} requires `pgf`", self.check)))
    }
}

pub fn run_check(cfg: &CheckConfig) -> Result<CheckReport, CliError> {
    if !(cfg.tol > 0.0) {
        return Err(CliError::config(format!(
            "tol must be positive, got {}",
            cfg.tol
        )));
    }
    let report = match cfg.check {
        CheckKind::Minssd => {
            let d = cfg.law()?;
            let grid = check_grid(cfg.grid, &d)?;
            minssd_check(&d, cfg.b.unwrap_or(d.psi().scale()), &grid, cfg.tol)?
        }
        CheckKind::Nmin => {
            let d = cfg.law()?;
            let q = cfg.pgf()?;
            let grid = check_grid(cfg.grid, &d)?;
            nmin_semistable_check(&q, &d, cfg.c.unwrap_or(d.psi().scale()), &grid, cfg.tol)
        }
        CheckKind::DiscreteMinssd => {
            let d = DiscreteFromLt::new(cfg.law()?)?;
            let b = cfg.b.unwrap_or(d.law().psi().scale());
            discrete_minssd_check(&d, b, cfg.j_max, cfg.tol)?
        }
        CheckKind::DiscreteNmin => {
            let d = DiscreteFromLt::new(cfg.law()?)?;
            let q = cfg.pgf()?;
            let c = cfg.c.unwrap_or(d.law().psi().scale());
            discrete_nmin_check(&q, &d, c, cfg.j_max, cfg.tol)?
        }
        CheckKind::LtSsd => {
            let phi = cfg
                .phi
                .ok_or_else(|| CliError::config("check \"lt_ssd\" requires `phi`"))?;
            phi.validate()?;
            let c = match (cfg.c, phi) {
                (Some(c), _) => c,
                (None, LaplaceTransform::SemiStableGamma { inner_psi, .. }) => inner_psi.scale(),
                (None, _) => {
                    return Err(CliError::config(
                        "check \"lt_ssd\" requires `c` unless phi is semi_stable_gamma",
                    ))
                }
            };
            lt_ssd_factor(&phi, c)?.1
        }
    };
    Ok(report)
}

pub fn cmd_check(cfg: &CheckConfig) -> Result<(), CliError> {
    let report = run_check(cfg)?;
    write_json(&report, cfg.report.as_deref())?;
    if report.passed {
        Ok(())
    } else {
        Err(CliError::check_failed(&report))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecomposeConfig {
    pub law: MarginalLaw,
    #[serde(default)]
    pub b: Option<f64>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    pub output: PathBuf,
}

#[derive(Debug, Serialize)]
pub struct DecomposeSummary {
    pub rows: usize,
    pub b: f64,
    pub q_inf: f64,
    pub q_inf_exact: bool,
}

pub fn cmd_decompose(cfg: &DecomposeConfig) -> Result<(), CliError> {
    let d = cfg.law;
    let b = cfg.b.unwrap_or(d.psi().scale());
    let grid = check_grid(cfg.grid, &d)?;
    let cof = law_cofactor(&d, b)?;
    let mut w = csv_writer(&cfg.output)?;
    w.write_record(["x", "survival", "survival_bx", "cofactor"])?;
    let points = grid.points();
    for &x in &points {
        w.write_record([
            x.to_string(),
            d.survival(x).to_string(),
            d.survival(b * x).to_string(),
            cof.eval(x).to_string(),
        ])?;
    }
    w.flush()?;
    write_json(
        &DecomposeSummary {
            rows: points.len(),
            b,
            q_inf: cof.q_inf(),
            q_inf_exact: cof.q_inf_exact(),
        },
        None,
    )
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KsTestConfig {
    pub input: PathBuf,
    pub law: MarginalLaw,
    /// Column holding the sample.
    #[serde(default = "default_column")]
    pub column: String,
    #[serde(default = "default_level")]
    pub level: f64,
    #[serde(default)]
    pub report: Option<PathBuf>,
    #[serde(default)]
    pub strict: bool,
}

fn default_column() -> String {
    "value".into()
}

/// Reads one numeric column of a CSV file with a header row.
pub fn read_column(path: &Path, column: &str) -> Result<Vec<f64>, CliError> {
    let mut r = csv::Reader::from_path(path)
        .map_err(|e| CliError::runtime(format!("cannot read {}: {e}", path.display())))?;
    let idx = r
        .headers()?
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| CliError::config(format!("{} has no column {column:?}", path.display())))?;
    let mut out = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let field = rec.get(idx).unwrap_or("");
        let x: f64 = field.trim().parse().map_err(|_| {
            CliError::runtime(format!("row {}: {field:?} is not a number", line + 1))
        })?;
        out.push(x);
    }
    Ok(out)
}

pub fn cmd_ks_test(cfg: &KsTestConfig) -> Result<(), CliError> {
    check_level(cfg.level)?;
    let xs = read_column(&cfg.input, &cfg.column)?;
    let d = cfg.law;
    let r = ks_test(&xs, |x| d.cdf(x), cfg.level)?;
    write_json(&r, cfg.report.as_deref())?;
    if cfg.strict && !r.passed {
        return Err(CliError {
            kind: "check_failed",
            code: EXIT_CHECK_FAILED,
            message: format!(
                "KS test rejected (p = {:e} at level {})",
                r.p_value, r.level
            ),
            report: None,
        });
    }
    Ok(())
}
