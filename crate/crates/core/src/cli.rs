//! Batch front end: one JSON run configuration in, a directory of CSV and
//! JSON artifacts out, plus `manifest.json` with a sha256 per artifact.
//!
//! ```json
//! {"command": "spectrum", "sft_path": "full2.json", "out_dir": "out",
//!  "seed": 7, "params": {"potential": {"depth": 1, "table": {"0": 0, "1": 1}}}}
//! ```
//!
//! Relative paths are resolved against the directory holding the config.
//! Exit status: 0 success, 2 hypothesis violation, 3 invalid configuration,
//! 1 anything else.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;
use log::info;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::convex::{linspace, validate_cms, GridFunction};
use crate::error::{Error, Result};
use crate::io::{csv_table, fmt_f64, read_json, to_json};
use crate::oracle::{enumerate_orbits, periodic_pressure_errors, word_count_spectrum};
use crate::paths::{
    log_s_grid, path_csv, single_sided_path, single_sided_rotation, two_sided_path, two_sided_potential,
    verify_path_claims, ClaimOptions,
};
use crate::potential::{PeriodicOrbit, Potential, PotentialDocument};
use crate::realize::{chebyshev_points, realize_many, realize_pressure, RealizeOptions};
use crate::sft::{Sft, SftDocument};
use crate::spectra::{entropy_spectrum, rotation_set, usc_failure_demo, DEFAULT_T_MAX};
use crate::thermo::{pressure, pressure_curve};

#[derive(Debug, Parser)]
#[command(name = "multispec", about = "Entropy spectra and pressure functions on subshifts of finite type")]
pub struct Args {
    /// Run configuration (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub verbose: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Pressure,
    Spectrum,
    Path,
    Realize,
    DemoUsc,
    OracleCheck,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub sft_path: PathBuf,
    #[serde(default)]
    pub params: serde_json::Value,
    pub out_dir: PathBuf,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_seed() -> u64 {
    7
}

/// A potential given inline or as a path to a potential document.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PotentialSource {
    Path(PathBuf),
    Inline(PotentialDocument),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PressureParams {
    potential: PotentialSource,
    #[serde(default = "m10")]
    t_min: f64,
    #[serde(default = "p10")]
    t_max: f64,
    #[serde(default = "n81")]
    n: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectrumParams {
    potential: PotentialSource,
    #[serde(default = "n201")]
    n_alpha: usize,
    #[serde(default = "t_cap")]
    t_max: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "mode", rename_all = "kebab-case")]
enum PathParams {
    Single {
        orbit: String,
        depth: usize,
        #[serde(default = "s_hi")]
        s_max: f64,
        #[serde(default = "n60")]
        n: usize,
    },
    TwoSided {
        orbit_a: String,
        orbit_b: String,
        depth: usize,
        #[serde(default = "n81")]
        n: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum TargetKind {
    Pressure,
    Spectrum,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Target {
    kind: TargetKind,
    csv: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RealizeParams {
    target: Target,
    depth: usize,
    #[serde(default = "one", rename = "N")]
    n: usize,
    #[serde(default = "tol4")]
    tol: f64,
    #[serde(default)]
    t_eval: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct UscParams {
    #[serde(default = "t_list")]
    t_list: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OracleParams {
    potential: PotentialSource,
    #[serde(default = "ns")]
    ns: Vec<usize>,
    #[serde(default = "ts")]
    t: Vec<f64>,
    #[serde(default = "n20")]
    word_length: usize,
    #[serde(default = "bins")]
    bins: usize,
    #[serde(default = "period")]
    max_period: usize,
}

fn m10() -> f64 {
    -10.0
}
fn p10() -> f64 {
    10.0
}
fn n81() -> usize {
    81
}
fn n201() -> usize {
    201
}
fn n60() -> usize {
    60
}
fn n20() -> usize {
    20
}
fn one() -> usize {
    1
}
fn bins() -> usize {
    10
}
fn period() -> usize {
    12
}
fn t_cap() -> f64 {
    DEFAULT_T_MAX
}
fn s_hi() -> f64 {
    1e3
}
fn tol4() -> f64 {
    1e-4
}
fn t_list() -> Vec<f64> {
    vec![0.2, 0.1, 0.05, 0.01]
}
fn ns() -> Vec<usize> {
    vec![4, 8, 12]
}
fn ts() -> Vec<f64> {
    vec![-1.0, 0.5, 2.0]
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::HypothesisViolation { .. } | Error::MaxEntropyMismatch { .. } | Error::MaxMismatch { .. } => 2,
        Error::ConfigInvalid(_) => 3,
        _ => 1,
    }
}

/// Artifacts of one run, keyed by file name.
#[derive(Debug, Default)]
pub struct Artifacts {
    files: BTreeMap<String, String>,
}

impl Artifacts {
    fn add(&mut self, name: &str, content: String) {
        self.files.insert(name.to_string(), content);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.keys().map(String::as_str)
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.files.get(name).map(String::as_str)
    }

    fn manifest(&self) -> String {
        #[derive(Serialize)]
        struct Entry<'a> {
            file: &'a str,
            sha256: String,
            bytes: usize,
        }
        let entries: Vec<Entry<'_>> = self
            .files
            .iter()
            .map(|(name, body)| Entry {
                file: name,
                sha256: hex::encode(Sha256::digest(body.as_bytes())),
                bytes: body.len(),
            })
            .collect();
        to_json(&serde_json::json!({ "artifacts": entries }))
    }

    /// Writes every artifact and the manifest into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        let manifest = self.manifest();
        let all = self.files.iter().map(|(n, b)| (n.as_str(), b.as_str()));
        for (name, body) in all.chain([("manifest.json", manifest.as_str())]) {
            let p = dir.join(name);
            fs::write(&p, body).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
        }
        Ok(())
    }
}

struct Ctx {
    base: PathBuf,
    sft: Sft,
    seed: u64,
}

impl Ctx {
    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    fn potential(&self, src: &PotentialSource) -> Result<Potential> {
        let doc = match src {
            PotentialSource::Inline(d) => d.clone(),
            PotentialSource::Path(p) => read_input::<PotentialDocument>(&self.resolve(p))?,
        };
        Potential::from_document(&self.sft, &doc).map_err(|e| Error::ConfigInvalid(format!("potential: {e}")))
    }

    fn orbit(&self, s: &str) -> Result<PeriodicOrbit> {
        PeriodicOrbit::parse_on(&self.sft, s).map_err(|e| Error::ConfigInvalid(format!("orbit {s:?}: {e}")))
    }
}

fn read_input<T: DeserializeOwned>(path: &Path) -> Result<T> {
    read_json(path).map_err(|e| match e {
        Error::Io(m) => Error::ConfigInvalid(m),
        other => other,
    })
}

fn params<T: DeserializeOwned>(v: &serde_json::Value) -> Result<T> {
    T::deserialize(v).map_err(|e| Error::ConfigInvalid(format!("params: {e}")))
}

/// Parses a configuration file; errors carry the line and column.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    read_input(path)
}

/// Runs a configuration and returns its artifacts without touching disk.
pub fn execute(config: &RunConfig, base: &Path) -> Result<Artifacts> {
    let sft_path = if config.sft_path.is_absolute() {
        config.sft_path.clone()
    } else {
        base.join(&config.sft_path)
    };
    let doc: SftDocument = read_input(&sft_path)?;
    let sft = Sft::from_document(&doc).map_err(|e| Error::ConfigInvalid(format!("{}: {e}", sft_path.display())))?;
    let ctx = Ctx {
        base: base.to_path_buf(),
        sft,
        seed: config.seed,
    };
    let mut out = Artifacts::default();
    info!("running {:?}", config.command);
    match config.command {
        Command::Pressure => run_pressure(&ctx, params(&config.params)?, &mut out)?,
        Command::Spectrum => run_spectrum(&ctx, params(&config.params)?, &mut out)?,
        Command::Path => run_path(&ctx, params(&config.params)?, &mut out)?,
        Command::Realize => run_realize(&ctx, params(&config.params)?, &mut out)?,
        Command::DemoUsc => run_usc(&ctx, params(&config.params)?, &mut out)?,
        Command::OracleCheck => run_oracle(&ctx, params(&config.params)?, &mut out)?,
    }
    Ok(out)
}

/// Loads, executes and writes one run. `out_dir` is resolved like inputs.
pub fn run(config_path: &Path) -> Result<PathBuf> {
    let config = load_config(config_path)?;
    let base = config_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let artifacts = execute(&config, &base)?;
    let dir = if config.out_dir.is_absolute() {
        config.out_dir.clone()
    } else {
        base.join(&config.out_dir)
    };
    artifacts.write(&dir)?;
    info!("wrote {} artifacts to {}", artifacts.files.len(), dir.display());
    Ok(dir)
}

/// Entry point of the binary; returns the process exit status.
pub fn main_with(args: Args) -> i32 {
    let level = if args.verbose { "info" } else { "warn" };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    if let Some(n) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: --threads: {e}");
            return 3;
        }
    }
    match run(&args.config) {
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn run_pressure(ctx: &Ctx, p: PressureParams, out: &mut Artifacts) -> Result<()> {
    if p.n < 2 || !(p.t_min < p.t_max) {
        return Err(Error::ConfigInvalid("pressure grid needs n >= 2 and t_min < t_max".into()));
    }
    let phi = ctx.potential(&p.potential)?;
    let curve = pressure_curve(&ctx.sft, &phi, &linspace(p.t_min, p.t_max, p.n))?;
    out.add("pressure.csv", curve.to_csv());
    Ok(())
}

fn run_spectrum(ctx: &Ctx, p: SpectrumParams, out: &mut Artifacts) -> Result<()> {
    let phi = ctx.potential(&p.potential)?;
    let graph = entropy_spectrum(&ctx.sft, &phi, p.n_alpha, p.t_max)?;
    out.add("spectrum.csv", graph.to_csv());
    out.add("rotation.json", to_json(&rotation_set(&ctx.sft, &phi)?));
    Ok(())
}

fn run_path(ctx: &Ctx, p: PathParams, out: &mut Artifacts) -> Result<()> {
    let h_top = ctx.sft.topological_entropy()?;
    let (samples, rotation, strict) = match p {
        PathParams::Single { orbit, depth, s_max, n } => {
            let o = ctx.orbit(&orbit)?;
            let grid = log_s_grid(1e-3, s_max, n);
            let rot = single_sided_rotation(&ctx.sft, &o, depth)?;
            (single_sided_path(&ctx.sft, &o, depth, &grid)?, rot, false)
        }
        PathParams::TwoSided {
            orbit_a,
            orbit_b,
            depth,
            n,
        } => {
            let (a, b) = (ctx.orbit(&orbit_a)?, ctx.orbit(&orbit_b)?);
            let phi = two_sided_potential(&ctx.sft, &a, &b, depth)?;
            let rot = rotation_set(&ctx.sft, &phi)?;
            (two_sided_path(&ctx.sft, &a, &b, depth, &linspace(-1.0, 1.0, n))?, rot, false)
        }
    };
    let report = verify_path_claims(
        &samples,
        h_top,
        ClaimOptions {
            rotation: Some(&rotation),
            strict,
        },
    );
    out.add("path.csv", path_csv(&samples));
    out.add("claims.txt", report.to_text());
    Ok(())
}

fn run_realize(ctx: &Ctx, p: RealizeParams, out: &mut Artifacts) -> Result<()> {
    let text = fs::read_to_string(ctx.resolve(&p.target.csv))
        .map_err(|e| Error::ConfigInvalid(format!("{}: {e}", p.target.csv.display())))?;
    let grid = GridFunction::from_csv(&text).map_err(|e| Error::ConfigInvalid(format!("target csv: {e}")))?;
    let opts = RealizeOptions {
        t_eval: p.t_eval.unwrap_or_else(|| chebyshev_points(-20.0, 20.0, 41)),
        tol: p.tol,
        seed: ctx.seed,
        ..RealizeOptions::default()
    };
    match p.target.kind {
        TargetKind::Pressure => {
            let r = realize_pressure(&ctx.sft, &grid, p.depth, &opts)?;
            out.add("potential.json", to_json(&r.potential.to_document()));
            let rows = opts
                .t_eval
                .iter()
                .map(|&t| {
                    let target = grid.eval_cubic(t);
                    let got = pressure(&ctx.sft, &r.potential, t)?;
                    Ok(vec![t, target, got, got - target])
                })
                .collect::<Result<Vec<_>>>()?;
            out.add("errors.csv", csv_table(&["t", "target", "realized", "residual"], rows));
            out.add(
                "summary.json",
                to_json(&serde_json::json!({
                    "target_error": r.target_error,
                    "iterations": r.iterations,
                    "converged": r.converged,
                    "seed": r.seed,
                })),
            );
        }
        TargetKind::Spectrum => {
            let h_top = ctx.sft.topological_entropy()?;
            let h = validate_cms(&grid, h_top, p.tol)?;
            let many = realize_many(&ctx.sft, &h, p.depth, p.n, p.tol, &opts)?;
            let mut rows = Vec::new();
            for (i, r) in many.results.iter().enumerate() {
                let name = if many.results.len() == 1 {
                    "potential.json".to_string()
                } else {
                    format!("potential_{i}.json")
                };
                out.add(&name, to_json(&r.result.potential.to_document()));
                out.add(&format!("spectrum_{i}.csv"), r.realized.to_csv());
                rows.push(vec![
                    i as f64,
                    r.result.target_error,
                    r.pressure_error,
                    r.result.iterations as f64,
                    if r.result.converged { 1.0 } else { 0.0 },
                    r.rotation.alpha_min,
                    r.rotation.alpha_max,
                ]);
            }
            out.add(
                "errors.csv",
                csv_table(
                    &["index", "d_ms", "pressure_error", "iterations", "converged", "alpha_min", "alpha_max"],
                    rows,
                ),
            );
            let mut w = String::from("i,j,orbit1,orbit2,avg1,avg2,d_ms\n");
            for pair in &many.pairs {
                match &pair.witness {
                    Some(c) => w.push_str(&format!(
                        "{},{},{},{},{},{},{}\n",
                        pair.i,
                        pair.j,
                        c.orbit1,
                        c.orbit2,
                        fmt_f64(c.avg1),
                        fmt_f64(c.avg2),
                        fmt_f64(pair.d_ms)
                    )),
                    None => w.push_str(&format!("{},{},unresolved,unresolved,NaN,NaN,{}\n", pair.i, pair.j, fmt_f64(pair.d_ms))),
                }
            }
            out.add("witnesses.csv", w);
        }
    }
    Ok(())
}

fn run_usc(ctx: &Ctx, p: UscParams, out: &mut Artifacts) -> Result<()> {
    let report = usc_failure_demo(&ctx.sft, &p.t_list)?;
    out.add("report.json", report.to_json());
    if let Some(g) = &report.base_graph {
        out.add("spectrum_phi.csv", g.to_csv());
    }
    for (row, g) in report.rows.iter().zip(&report.graphs) {
        out.add(&format!("spectrum_t{}.csv", row.t), g.to_csv());
    }
    Ok(())
}

fn run_oracle(ctx: &Ctx, p: OracleParams, out: &mut Artifacts) -> Result<()> {
    let phi = ctx.potential(&p.potential)?;
    let mut rows = Vec::new();
    for &t in &p.t {
        let exact = pressure(&ctx.sft, &phi, t)?;
        let errs = periodic_pressure_errors(&ctx.sft, &phi, t, &p.ns)?;
        for (&n, e) in p.ns.iter().zip(errs) {
            rows.push(vec![t, n as f64, exact, e]);
        }
    }
    out.add("periodic_pressure.csv", csv_table(&["t", "n", "pressure", "error"], rows));
    let catalog = enumerate_orbits(&ctx.sft, p.max_period)?;
    out.add("catalog.csv", catalog.to_csv());
    let rot = rotation_set(&ctx.sft, &phi)?;
    let ((lo, _), (hi, _)) = catalog.extreme_averages(&phi)?;
    out.add(
        "rotation_check.json",
        to_json(&serde_json::json!({
            "karp": [rot.alpha_min, rot.alpha_max],
            "catalog": [lo, hi],
            "max_period": p.max_period,
        })),
    );
    let words = word_count_spectrum(&ctx.sft, &phi, p.word_length, p.bins)?;
    out.add("word_count.csv", words.to_csv());
    let graph = entropy_spectrum(&ctx.sft, &phi, 201, DEFAULT_T_MAX)?;
    let gap = words
        .points()
        .iter()
        .filter_map(|&(a, v)| graph.value_at(a).map(|g| (g - v).abs()))
        .fold(0.0, f64::max);
    out.add(
        "word_count_gap.csv",
        csv_table(&["word_length", "bins", "sup_gap"], [vec![p.word_length as f64, p.bins as f64, gap]]),
    );
    Ok(())
}

