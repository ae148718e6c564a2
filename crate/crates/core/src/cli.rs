//! Command-line driver: `simulate`, `verify` and `table`.
//!
//! Settings resolve as flag, then `key = value` config file entry, then
//! default. Exit codes: 0 when everything passes, 1 on a statistical
//! failure, 2 on a usage or configuration error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::filters::{
    first_kind_series, second_kind_series, write_density_csv, write_moment_csv, MeanderConstant, MeanderMode,
};
use crate::oracle::{all_pass, run_experiment, summary_line, Experiment, SuiteConfig, MIN_SAMPLES};
use crate::paths::{simulate_bm, simulate_skew_bm, TimeGrid};
use crate::rng::Seed;
use crate::solvers::{solve, ScenarioKind};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable holding the worker thread count.
pub const THREADS_VAR: &str = "AZEMA_THREADS";

#[derive(Parser, Debug)]
#[command(name = "azema", version, about = "Simulate and verify filters of Brownian motion observed through its signs")]
pub struct Cli {
    /// Config file of `key = value` lines; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write simulated paths as CSV, plus a manifest.
    Simulate(SimulateArgs),
    /// Run verification suites and write their JSON reports.
    Verify(VerifyArgs),
    /// Tabulate closed-form densities, filters and moments.
    Table(TableArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SimKind {
    FirstEuler,
    FirstExact,
    Second,
    Skew,
    Bm,
    Z,
}

impl SimKind {
    fn name(self) -> &'static str {
        match self {
            SimKind::FirstEuler => "first-euler",
            SimKind::FirstExact => "first-exact",
            SimKind::Second => "second",
            SimKind::Skew => "skew",
            SimKind::Bm => "bm",
            SimKind::Z => "z",
        }
    }
}

impl FromStr for SimKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        <SimKind as ValueEnum>::from_str(s, false).map_err(|_| Error::Config(format!("unknown kind `{s}`")))
    }
}

#[derive(Args, Debug, Default)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub kind: Option<SimKind>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub paths: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct VerifyArgs {
    #[arg(long)]
    pub experiment: Option<String>,
    #[arg(long)]
    pub paths: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// `oracle-derived` or `paper-verbatim`.
    #[arg(long)]
    pub meander: Option<String>,
    /// JSON report file; stdout if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableKind {
    Density,
    Filter,
    Moments,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    #[arg(value_enum)]
    pub table: TableKind,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub g: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub y: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Density abscissae as `lo:hi:count`.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    #[arg(long)]
    pub n_max: Option<u32>,
    /// Scenario kind for filter tables: first-euler, first-exact or second.
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub meander: Option<String>,
    /// CSV file; stdout if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parsed `key = value` config file. Keys use the flag spelling, with `-`
/// and `_` interchangeable.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", n + 1)))?;
            entries.insert(k.trim().replace('_', "-"), v.trim().to_string());
        }
        Ok(ConfigFile { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| Error::Config(format!("cannot parse `{key} = {v}`"))),
        }
    }

    /// Flag, then config entry, then default.
    pub fn resolve<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T> {
        Ok(match flag {
            Some(v) => v,
            None => self.get(key)?.unwrap_or(default),
        })
    }

    fn resolve_opt<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        Ok(match flag {
            Some(v) => Some(v),
            None => self.get(key)?,
        })
    }
}

/// Why a command did not succeed.
#[derive(Debug)]
pub enum Failure {
    /// Usage, configuration or I/O problem.
    Usage(Error),
    /// The command ran but some check failed.
    Statistical,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e)
    }
}

pub fn exit_code(outcome: &std::result::Result<(), Failure>) -> i32 {
    match outcome {
        Ok(()) => 0,
        Err(Failure::Statistical) => 1,
        Err(Failure::Usage(_)) => 2,
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize = v.parse().map_err(|_| Error::Config(format!("{THREADS_VAR} must be a positive integer, got `{v}`")))?;
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn meander(config: &ConfigFile, flag: Option<String>) -> Result<MeanderConstant> {
    let mode: MeanderMode = config.resolve(flag.map(|s| s.parse()).transpose()?, "meander", MeanderMode::OracleDerived)?;
    Ok(MeanderConstant::for_mode(mode))
}

pub fn simulate(args: SimulateArgs, config: &ConfigFile) -> Result<Value> {
    let kind = config.resolve(args.kind, "kind", SimKind::Bm)?;
    let alpha = config.resolve(args.alpha, "alpha", 0.0)?;
    let t_max = config.resolve(args.t_max, "t-max", 1.0)?;
    let dt = config.resolve(args.dt, "dt", 1e-3)?;
    let n = config.resolve(args.paths, "paths", 1)?;
    let root = config.resolve(args.seed, "seed", 0)?;
    let out: PathBuf = config.resolve(args.out, "out", PathBuf::from("paths"))?;
    if matches!(kind, SimKind::Second | SimKind::Skew) && alpha.abs() > 1.0 {
        return Err(Error::SkewOutOfRange(alpha));
    }
    let grid = TimeGrid::with_step(t_max, dt)?;
    fs::create_dir_all(&out)?;
    let mut files = Vec::with_capacity(n);
    for i in 0..n {
        let seed = Seed::new(root, i as u64);
        let mut buf = Vec::new();
        match kind {
            SimKind::Bm => simulate_bm(&grid, seed).write_csv(&mut buf)?,
            SimKind::Skew => simulate_skew_bm(&grid, seed, alpha)?.write_csv(&mut buf)?,
            other => {
                let k: ScenarioKind = other.name().parse()?;
                solve(k, &grid, seed, alpha)?.write_csv(&mut buf)?
            }
        }
        let name = format!("path_{i:06}.csv");
        write_atomic(&out.join(&name), &buf)?;
        files.push(name);
    }
    let manifest = json!({
        "version": VERSION,
        "kind": kind.name(),
        "alpha": alpha,
        "t_max": t_max,
        "dt": dt,
        "n_paths": n,
        "seed": root,
        "files": files,
    });
    write_atomic(&out.join("manifest.json"), serde_json::to_string_pretty(&manifest)?.as_bytes())?;
    Ok(manifest)
}

/// Runs the suites; returns the JSON document and whether all passed.
pub fn verify(args: VerifyArgs, config: &ConfigFile) -> Result<(Value, bool, String)> {
    let experiment: Experiment = config.resolve(args.experiment.map(|s| s.parse()).transpose()?, "experiment", Experiment::All)?;
    let cfg = SuiteConfig {
        root: config.resolve(args.seed, "seed", SuiteConfig::default().root)?,
        n_paths: config.resolve_opt(args.paths, "paths")?,
        dt: config.resolve_opt(args.dt, "dt")?,
        alpha: config.resolve_opt(args.alpha, "alpha")?,
        meander: meander(config, args.meander)?,
    };
    let out: Option<PathBuf> = config.resolve_opt(args.out, "out")?;
    let resolved = json!({
        "experiment": experiment.name(),
        "config": cfg,
        "version": VERSION,
    });
    let mut reports = run_experiment(experiment, &cfg)?;
    for r in &mut reports {
        if r.dt > 0.0 && r.n_paths < MIN_SAMPLES && !r.params.contains_key("warning") {
            r.params.insert("warning".into(), format!("insufficient N: {} < {MIN_SAMPLES}", r.n_paths).into());
        }
        r.params.insert("resolved".into(), resolved.clone());
        r.params.insert("version".into(), VERSION.into());
    }
    let ok = all_pass(&reports);
    let summary = summary_line(&reports);
    let doc = serde_json::to_value(&reports)?;
    if let Some(path) = out {
        write_atomic(&path, serde_json::to_string_pretty(&doc)?.as_bytes())?;
    }
    Ok((doc, ok, summary))
}

fn parse_range(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::Config(format!("grid spec `{spec}` is not `lo:hi:count`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let n: usize = parts[2].parse().map_err(|_| bad())?;
    if n < 2 || !(hi > lo) {
        return Err(bad());
    }
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

/// Renders the requested table; returns the CSV and its manifest.
pub fn table(args: TableArgs, config: &ConfigFile) -> Result<(Vec<u8>, Value)> {
    let t = config.resolve(args.t, "t", 1.0)?;
    let g = config.resolve(args.g, "g", 0.4)?;
    let y = config.resolve(args.y, "y", 0.7)?;
    let default_alpha = if args.table == TableKind::Filter { 0.5 } else { 1.3 };
    let alpha = config.resolve(args.alpha, "alpha", default_alpha)?;
    let mut buf = Vec::new();
    let mut manifest = json!({ "version": VERSION, "table": format!("{:?}", args.table).to_lowercase() });
    match args.table {
        TableKind::Density => {
            let spec: String = config.resolve(args.x, "x", format!("{}:{}:201", -4.0 * t.sqrt(), 4.0 * t.sqrt()))?;
            write_density_csv(&mut buf, &parse_range(&spec)?, t, y, g, alpha)?;
            manifest["params"] = json!({ "t": t, "g": g, "y": y, "alpha": alpha, "x": spec });
        }
        TableKind::Moments => {
            let n_max = config.resolve(args.n_max, "n-max", 4)?;
            write_moment_csv(&mut buf, n_max, t, g, y, alpha)?;
            manifest["params"] = json!({ "t": t, "g": g, "y": y, "alpha": alpha, "n_max": n_max });
        }
        TableKind::Filter => {
            let kind: ScenarioKind = config.resolve(args.kind.map(|s| s.parse()).transpose()?, "kind", ScenarioKind::SecondKind)?;
            let t_max = config.resolve(args.t_max, "t-max", 1.0)?;
            let dt = config.resolve(args.dt, "dt", 1e-3)?;
            let root = config.resolve(args.seed, "seed", 0)?;
            let c = meander(config, args.meander)?;
            let sc = solve(kind, &TimeGrid::with_step(t_max, dt)?, Seed::new(root, 0), alpha)?;
            let series = if kind == ScenarioKind::SecondKind { second_kind_series(&sc, &c)? } else { first_kind_series(&sc)? };
            series.write_csv(&mut buf)?;
            manifest["params"] = json!({
                "kind": kind.name(), "alpha": alpha, "t_max": t_max, "dt": dt, "n_paths": 1, "seed": root, "c_a": c.c_a(),
            });
        }
    }
    Ok((buf, manifest))
}

fn emit(bytes: &[u8], out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, bytes),
        None => Ok(io::stdout().write_all(bytes)?),
    }
}

pub fn run(cli: Cli) -> std::result::Result<(), Failure> {
    configure_threads()?;
    let config = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    match cli.command {
        Command::Simulate(args) => {
            let m = simulate(args, &config)?;
            eprintln!("wrote {} paths to manifest", m["n_paths"]);
            Ok(())
        }
        Command::Verify(args) => {
            let to_file = args.out.is_some() || config.entries.contains_key("out");
            let (doc, ok, summary) = verify(args, &config)?;
            if !to_file {
                emit(serde_json::to_string_pretty(&doc).map_err(Error::from)?.as_bytes(), None)?;
                println!();
            }
            if let Value::Array(rs) = &doc {
                for r in rs {
                    if let Ok(r) = serde_json::from_value::<crate::oracle::McReport>(r.clone()) {
                        eprintln!("{}", r.line());
                        if let Some(Value::String(w)) = r.params.get("warning") {
                            eprintln!("warning: {}: {w}", r.name);
                        }
                        let num = |k: &str| r.params.get(k).and_then(Value::as_f64);
                        for (label, c, z) in [("pi/2", "candidate_printed", "z_printed"), ("sqrt(pi/2)", "candidate_rayleigh", "z_rayleigh")] {
                            if let (Some(c), Some(z)) = (num(c), num(z)) {
                                eprintln!("    {label:<11} c_A = {c:.6}  z = {z:+.2}");
                            }
                        }
                    }
                }
            }
            println!("{summary}");
            if ok {
                Ok(())
            } else {
                Err(Failure::Statistical)
            }
        }
        Command::Table(args) => {
            let out: Option<PathBuf> = config.resolve_opt(args.out.clone(), "out")?;
            let (csv, manifest) = table(args, &config)?;
            emit(&csv, out.as_deref())?;
            if let Some(p) = out {
                let mut side = p.into_os_string();
                side.push(".manifest.json");
                write_atomic(Path::new(&side), serde_json::to_string_pretty(&manifest).map_err(Error::from)?.as_bytes())?;
            }
            Ok(())
        }
    }
}

/// Entry point for the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = run(cli);
    if let Err(Failure::Usage(e)) = &outcome {
        eprintln!("error: {e}");
    }
    exit_code(&outcome)
}
