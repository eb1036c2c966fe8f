//! The `lipexp` command line.
//!
//! Every subcommand resolves its configuration from built-in defaults, an
//! optional TOML file (one table per subcommand) and flags, in that order,
//! and embeds the resolved configuration in its report.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cone_rigidity::{circle_cross_check, fix_set_stability, mover_pairs, mover_report, stress_family, CircleCheck, RigidityReport};
use crate::hyperbolicity::{check_hyperbolic, robust_margin, verify_certificate, HyperbolicityCheck, Verdict};
use crate::linalg::{Mat2, Vec2};
use crate::map_metrics::metric_report;
use crate::maps::{
    interval_scaling, perturb_torus, shift_system, torus_rotation, walters_perturbation, IntervalDiffeo, Perturbation,
    ToralAutomorphism,
};
use crate::shadowing::{build_conjugacy, make_pseudo_orbit, shadow_linear};
use crate::smooth_compare::{dc1_metric, gamma_build, interval_dw_vs_c1, jacobian_lemma_check, separation_csv, separation_table, JacobianProbe};
use crate::spaces::{
    sample_pairs, sample_rng, torus_distance, ConeDisk, FlatTorus, MetricSpace, PairSample, ShiftSpace, ShiftWord, TorusPoint,
    UnitInterval,
};
use crate::{Error, MapSystem};

/// Schema tag carried by every report.
pub const SCHEMA: &str = "lipexp-report/1";

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "LIPEXP_THREADS";

#[derive(Debug, Parser)]
#[command(name = "lipexp", version, about = "Lipschitz metrics, hyperbolicity certificates and shadowing for expansive maps")]
pub struct Cli {
    /// TOML file with a table per subcommand; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Report format; defaults to csv for `counterexample` and json otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// d_C0, d_W and d_L between two catalog maps.
    Metrics(MetricsArgs),
    /// Certify hyperbolicity of f and check the robust expansion of g.
    Certify(CertifyArgs),
    /// Shadow random pseudo-orbits of a toral automorphism.
    Shadow(ShadowArgs),
    /// Build the conjugacy between a toral automorphism and a perturbation.
    Conjugacy(ConjugacyArgs),
    /// The disk rotation that is d_W-close but C1-far from the identity.
    Counterexample(CounterexampleArgs),
    /// Rigidity of cone points under apex-moving maps.
    Cone(ConeArgs),
    /// Derivative gap against d_W' and d_C1 for interval maps.
    Interval(IntervalArgs),
}

#[derive(Debug, Default, Args, Serialize)]
pub struct MetricsArgs {
    #[arg(long = "f")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[arg(long = "g")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Largest separation of sampled pairs.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_sep: Option<f64>,
    /// Shift window W.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alphabet: Option<u8>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsConfig {
    pub f: Option<String>,
    pub g: Option<String>,
    pub pairs: usize,
    pub points: usize,
    pub seed: u64,
    pub max_sep: Option<f64>,
    pub window: usize,
    pub alphabet: u8,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self { f: None, g: None, pairs: 10_000, points: 2_000, seed: 1, max_sep: None, window: 6, alphabet: 2 }
    }
}

#[derive(Debug, Default, Args, Serialize)]
pub struct CertifyArgs {
    #[arg(long = "f")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    /// Perturbation whose robust expansion is checked.
    #[arg(long = "g")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Expanding factor of the margin; defaults to the certified one.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_prime: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alphabet: Option<u8>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CertifyConfig {
    pub f: String,
    pub g: Option<String>,
    pub delta: f64,
    pub lambda: Option<f64>,
    pub lambda_prime: f64,
    /// Sampled pairs on continuous spaces; the shift is enumerated exhaustively.
    pub pairs: usize,
    pub points: usize,
    pub seed: u64,
    pub window: usize,
    pub alphabet: u8,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        Self {
            f: "shift".into(),
            g: None,
            delta: 0.5,
            lambda: None,
            lambda_prime: 1.5,
            pairs: 100_000,
            points: 2_000,
            seed: 1,
            window: 6,
            alphabet: 2,
        }
    }
}

#[derive(Debug, Default, Args, Serialize)]
pub struct ShadowArgs {
    #[arg(long = "f")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Orbit half-length N.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbits: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShadowConfig {
    pub f: String,
    pub delta: f64,
    pub window: usize,
    pub orbits: usize,
    pub seed: u64,
}

impl Default for ShadowConfig {
    fn default() -> Self {
        Self { f: "cat".into(), delta: 1e-3, window: 60, orbits: 100, seed: 1 }
    }
}

#[derive(Debug, Default, Args, Serialize)]
pub struct ConjugacyArgs {
    #[arg(long = "f")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[arg(long = "g")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    /// Grid points per side.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    /// Largest accepted equivariance residual.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConjugacyConfig {
    pub f: String,
    pub g: Option<String>,
    pub grid: usize,
    pub window: usize,
    pub tol: f64,
}

impl Default for ConjugacyConfig {
    fn default() -> Self {
        Self { f: "cat".into(), g: None, grid: 64, window: 40, tol: 1e-6 }
    }
}

#[derive(Debug, Default, Args, Serialize)]
pub struct CounterexampleArgs {
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jacobian_points: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CounterexampleConfig {
    pub eps: Vec<f64>,
    pub pairs: usize,
    pub jacobian_points: usize,
    pub seed: u64,
}

impl Default for CounterexampleConfig {
    fn default() -> Self {
        Self { eps: vec![0.5, 0.2, 0.1], pairs: 100_000, jacobian_points: 1_000, seed: 1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ConeFamily {
    /// The 50 apex movers of the stress family.
    Stress50,
    /// One apex mover aimed at `--target`.
    Single,
}

#[derive(Debug, Default, Args, Serialize)]
pub struct ConeArgs {
    /// Prongs; the cone has total angle nπ.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<ConeFamily>,
    /// Target point `r,theta` for the single family.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConeConfig {
    pub n: u32,
    pub family: ConeFamily,
    pub target: Vec<f64>,
    pub tol: f64,
    pub seed: u64,
}

impl Default for ConeConfig {
    fn default() -> Self {
        Self { n: 3, family: ConeFamily::Stress50, target: vec![0.1, 1.0], tol: 1e-2, seed: 1 }
    }
}

#[derive(Debug, Default, Args, Serialize)]
pub struct IntervalArgs {
    #[arg(long = "f")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[arg(long = "g")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntervalConfig {
    pub f: String,
    pub g: Option<String>,
    pub grid: usize,
    pub pairs: usize,
    pub seed: u64,
}

impl Default for IntervalConfig {
    fn default() -> Self {
        Self { f: "interval:id".into(), g: None, grid: 200, pairs: 10_000, seed: 1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// The hypothesis was not met, so nothing is claimed.
    Vacuous,
}

impl Status {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Self::Pass
        } else {
            Self::Fail
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Self::Pass | Self::Vacuous => 0,
            Self::Fail => 1,
        }
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::Runtime(e)
    }
}

type CmdResult = std::result::Result<(Status, String), Failure>;

#[derive(Serialize)]
struct Envelope<'a, C, R> {
    schema: &'static str,
    command: &'static str,
    config: &'a C,
    status: Status,
    result: R,
}

struct Ctx<'a> {
    command: &'static str,
    format: Format,
    output: Option<&'a PathBuf>,
    file: Option<&'a toml::Table>,
}

#[derive(Serialize)]
struct Resolved<'a, C> {
    #[serde(flatten)]
    config: &'a C,
    format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<&'a PathBuf>,
}

impl Ctx<'_> {
    fn resolve<C: Default + Serialize + DeserializeOwned>(&self, flags: &impl Serialize) -> std::result::Result<C, Failure> {
        let bad = |e: serde_json::Error| Failure::Usage(format!("invalid {} configuration: {e}", self.command));
        let mut merged = serde_json::to_value(C::default()).map_err(bad)?;
        let mut layers = Vec::new();
        if let Some(table) = self.file.and_then(|t| t.get(self.command)) {
            layers.push(serde_json::to_value(table).map_err(bad)?);
        }
        layers.push(serde_json::to_value(flags).map_err(bad)?);
        for layer in layers {
            match (&mut merged, layer) {
                (Value::Object(base), Value::Object(top)) => base.extend(top),
                _ => return Err(Failure::Usage(format!("[{}] must be a table", self.command))),
            }
        }
        serde_json::from_value(merged).map_err(bad)
    }

    fn json<C: Serialize, R: Serialize>(&self, config: &C, status: Status, result: R) -> CmdResult {
        let resolved = Resolved { config, format: self.format, output: self.output };
        let env = Envelope { schema: SCHEMA, command: self.command, config: &resolved, status, result };
        let mut body = serde_json::to_string_pretty(&env).map_err(|e| Failure::Usage(e.to_string()))?;
        body.push('\n');
        Ok((status, body))
    }

    /// CSV body preceded by `#` lines carrying the schema, command, config and status.
    fn csv<C: Serialize>(&self, config: &C, status: Status, rows: &str) -> CmdResult {
        let resolved = Resolved { config, format: self.format, output: self.output };
        let cfg = serde_json::to_string(&resolved).map_err(|e| Failure::Usage(e.to_string()))?;
        let status_name = serde_json::to_value(status).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
        let mut out = String::new();
        let _ = writeln!(out, "# schema: {SCHEMA}");
        let _ = writeln!(out, "# command: {}", self.command);
        let _ = writeln!(out, "# config: {cfg}");
        let _ = writeln!(out, "# status: {status_name}");
        out.push_str(rows);
        Ok((status, out))
    }

    fn emit<C: Serialize, R: Serialize>(&self, config: &C, status: Status, result: R, rows: Option<String>) -> CmdResult {
        match (self.format, rows) {
            (Format::Json, _) => self.json(config, status, result),
            (Format::Csv, Some(rows)) => self.csv(config, status, &rows),
            (Format::Csv, None) => Err(Failure::Usage(format!("{} has no csv output", self.command))),
        }
    }
}

/// A named map from the catalog, tagged by its space.
pub enum CatalogMap {
    Torus(MapSystem<TorusPoint>),
    Shift(MapSystem<ShiftWord>),
    Interval(MapSystem<f64>),
    /// `id`, which lives on whatever space the other map does.
    Identity,
}

fn numbers(spec: &str, counts: &[usize], name: &str) -> std::result::Result<Vec<f64>, String> {
    let vals = spec.split(',').map(|s| s.trim().parse::<f64>()).collect::<std::result::Result<Vec<_>, _>>();
    match vals {
        Ok(v) if counts.contains(&v.len()) => Ok(v),
        _ => Err(format!("map {name:?}: expected {counts:?} comma-separated numbers")),
    }
}

/// Parses `toral:a,b,c,d` or `cat`.
pub fn parse_automorphism(name: &str) -> std::result::Result<ToralAutomorphism, String> {
    if name == "cat" {
        return Ok(ToralAutomorphism::cat());
    }
    let Some(rest) = name.strip_prefix("toral:") else {
        return Err(format!("{name:?} is not a toral automorphism (use cat or toral:a,b,c,d)"));
    };
    let v = numbers(rest, &[4], name)?;
    if v.iter().any(|x| x.fract() != 0.0) {
        return Err(format!("map {name:?}: matrix entries must be integers"));
    }
    let m = [[v[0] as i64, v[1] as i64], [v[2] as i64, v[3] as i64]];
    ToralAutomorphism::new(m).map_err(|e| e.to_string())
}

/// Parses a catalog map name. `window` and `alphabet` size the shift.
pub fn parse_map(name: &str, window: usize, alphabet: u8) -> std::result::Result<CatalogMap, String> {
    let err = |e: Error| format!("map {name:?}: {e}");
    if name == "id" {
        return Ok(CatalogMap::Identity);
    }
    if name == "shift" {
        return Ok(CatalogMap::Shift(shift_system()));
    }
    if name == "cat" || name.starts_with("toral:") {
        return Ok(CatalogMap::Torus(parse_automorphism(name)?.system()));
    }
    let Some((kind, rest)) = name.split_once(':') else {
        return Err(format!("unknown map {name:?}"));
    };
    match kind {
        "cat-affine" => {
            let v = numbers(rest, &[2], name)?;
            let g = perturb_torus(&ToralAutomorphism::cat(), Perturbation::Affine { c: Vec2::new(v[0], v[1]) }).map_err(err)?;
            Ok(CatalogMap::Torus(g))
        }
        "cat-bump" => {
            let v = numbers(rest, &[4, 5], name)?;
            let kind = Perturbation::Bump {
                center: TorusPoint::new(v[0], v[1]),
                radius: v[2],
                amp: v[3],
                angle: v.get(4).copied().unwrap_or(0.0),
            };
            Ok(CatalogMap::Torus(perturb_torus(&ToralAutomorphism::cat(), kind).map_err(err)?))
        }
        "rot" => {
            let v = numbers(rest, &[2], name)?;
            Ok(CatalogMap::Torus(torus_rotation(Vec2::new(v[0], v[1]))))
        }
        "walters" => {
            let parts: Vec<&str> = rest.split(':').collect();
            let parsed: Option<(u64, usize, usize)> = match parts.as_slice() {
                [s, o, i] => s.parse().ok().zip(o.parse().ok()).zip(i.parse().ok()).map(|((s, o), i)| (s, o, i)),
                _ => None,
            };
            let (seed, outer, inner) = parsed.ok_or_else(|| format!("map {name:?}: expected walters:seed:outer:inner"))?;
            Ok(CatalogMap::Shift(walters_perturbation(window, alphabet, seed, outer, inner).map_err(err)?))
        }
        "interval" => Ok(CatalogMap::Interval(IntervalDiffeo::parse(rest).map_err(err)?.system())),
        "scale" => {
            let v = numbers(rest, &[1], name)?;
            Ok(CatalogMap::Interval(interval_scaling(v[0]).map_err(err)?))
        }
        _ => Err(format!("unknown map {name:?}")),
    }
}

/// The translation `c` of a `cat-affine:c1,c2` name.
fn affine_offset(name: &str) -> Option<Vec2> {
    let v = numbers(name.strip_prefix("cat-affine:")?, &[2], name).ok()?;
    Some(Vec2::new(v[0], v[1]))
}

enum MapPair {
    Torus(MapSystem<TorusPoint>, MapSystem<TorusPoint>),
    Shift(MapSystem<ShiftWord>, MapSystem<ShiftWord>),
    Interval(MapSystem<f64>, MapSystem<f64>),
}

fn space_name(m: &CatalogMap) -> &'static str {
    match m {
        CatalogMap::Torus(_) => "torus",
        CatalogMap::Shift(_) => "shift",
        CatalogMap::Interval(_) => "interval",
        CatalogMap::Identity => "any",
    }
}

fn pair_maps(f: CatalogMap, g: CatalogMap) -> std::result::Result<MapPair, Failure> {
    use CatalogMap as C;
    Ok(match (f, g) {
        (C::Torus(f), C::Torus(g)) => MapPair::Torus(f, g),
        (C::Shift(f), C::Shift(g)) => MapPair::Shift(f, g),
        (C::Interval(f), C::Interval(g)) => MapPair::Interval(f, g),
        (C::Torus(f), C::Identity) => MapPair::Torus(f, MapSystem::identity()),
        (C::Identity, C::Torus(g)) => MapPair::Torus(MapSystem::identity(), g),
        (C::Shift(f), C::Identity) => MapPair::Shift(f, MapSystem::identity()),
        (C::Identity, C::Shift(g)) => MapPair::Shift(MapSystem::identity(), g),
        (C::Interval(f), C::Identity) => MapPair::Interval(f, MapSystem::identity()),
        (C::Identity, C::Interval(g)) => MapPair::Interval(MapSystem::identity(), g),
        (C::Identity, C::Identity) => MapPair::Torus(MapSystem::identity(), MapSystem::identity()),
        (f, g) => return Err(Failure::Usage(format!("maps live on different spaces: {} and {}", space_name(&f), space_name(&g)))),
    })
}

fn required(value: &Option<String>, flag: &str, command: &str) -> std::result::Result<String, Failure> {
    value.clone().ok_or_else(|| Failure::Usage(format!("{command} requires --{flag}")))
}

fn usage(e: String) -> Failure {
    Failure::Usage(e)
}

/// Pairs of distinct shift words that still differ after one shift either way.
fn shift_pairs(space: &ShiftSpace, count: usize, seed: u64, max_sep: Option<f64>) -> crate::Result<PairSample<ShiftWord>> {
    let mut pairs = sample_pairs(space, count, seed, max_sep)?;
    let interior = space.window() - 1;
    pairs.retain(|x, y| matches!(x.disagreement_level(y), Some(l) if l <= interior));
    Ok(pairs)
}

fn cmd_metrics(ctx: &Ctx, args: &MetricsArgs) -> CmdResult {
    let cfg: MetricsConfig = ctx.resolve(args)?;
    let f = parse_map(&required(&cfg.f, "f", "metrics")?, cfg.window, cfg.alphabet).map_err(usage)?;
    let g = parse_map(&required(&cfg.g, "g", "metrics")?, cfg.window, cfg.alphabet).map_err(usage)?;
    match pair_maps(f, g)? {
        MapPair::Torus(f, g) => {
            let pairs = sample_pairs(&FlatTorus, cfg.pairs, cfg.seed, cfg.max_sep)?;
            let pts = FlatTorus.sample_points(cfg.points, cfg.seed);
            ctx.emit(&cfg, Status::Pass, metric_report(&FlatTorus, &f, &g, &pairs, &pts)?, None)
        }
        MapPair::Shift(f, g) => {
            let space = ShiftSpace::new(cfg.window, cfg.alphabet)?;
            let pairs = shift_pairs(&space, cfg.pairs, cfg.seed, cfg.max_sep)?;
            let pts = space.sample_points(cfg.points, cfg.seed);
            ctx.emit(&cfg, Status::Pass, metric_report(&space, &f, &g, &pairs, &pts)?, None)
        }
        MapPair::Interval(f, g) => {
            let pairs = sample_pairs(&UnitInterval, cfg.pairs, cfg.seed, cfg.max_sep)?;
            let pts = UnitInterval.sample_points(cfg.points, cfg.seed);
            ctx.emit(&cfg, Status::Pass, metric_report(&UnitInterval, &f, &g, &pairs, &pts)?, None)
        }
    }
}

#[derive(Serialize)]
struct CertifyResult<P> {
    check: HyperbolicityCheck<P>,
    #[serde(skip_serializing_if = "Option::is_none")]
    margin: Option<crate::hyperbolicity::RobustnessMargin>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verification: Option<crate::hyperbolicity::CertificateReport<P>>,
}

fn certify_on<S>(
    ctx: &Ctx,
    cfg: &CertifyConfig,
    space: &S,
    f: &MapSystem<S::Point>,
    g: Option<&MapSystem<S::Point>>,
    pairs: &PairSample<S::Point>,
    pts: &[S::Point],
) -> CmdResult
where
    S: MetricSpace,
    S::Point: Serialize + 'static,
{
    let check = check_hyperbolic(space, f, pairs, cfg.delta)?;
    let Some(cert) = check.certificate().cloned() else {
        return ctx.emit(cfg, Status::Fail, CertifyResult { check, margin: None, verification: None }, None);
    };
    let margin = robust_margin(cfg.lambda.unwrap_or(cert.lambda), cfg.lambda_prime).map_err(|e| Failure::Usage(e.to_string()))?;
    let Some(g) = g else {
        return ctx.emit(cfg, Status::Pass, CertifyResult { check, margin: Some(margin), verification: None }, None);
    };
    let report = verify_certificate(space, f, g, &margin, &cert, pairs, pts)?;
    let status = match report.verdict {
        Verdict::Verified => Status::Pass,
        Verdict::Violated => Status::Fail,
        Verdict::HypothesisNotMet => Status::Vacuous,
    };
    ctx.emit(cfg, status, CertifyResult { check, margin: Some(margin), verification: Some(report) }, None)
}

fn cmd_certify(ctx: &Ctx, args: &CertifyArgs) -> CmdResult {
    let cfg: CertifyConfig = ctx.resolve(args)?;
    if let Some(l) = cfg.lambda {
        if cfg.lambda_prime >= l {
            return Err(Failure::Usage(format!("lambda' = {} must be below lambda = {l}", cfg.lambda_prime)));
        }
    }
    if !(cfg.delta > 0.0) {
        return Err(Failure::Usage(format!("delta must be positive, got {}", cfg.delta)));
    }
    let f = parse_map(&cfg.f, cfg.window, cfg.alphabet).map_err(usage)?;
    let g = match &cfg.g {
        Some(name) => parse_map(name, cfg.window, cfg.alphabet).map_err(usage)?,
        None => CatalogMap::Identity,
    };
    let has_g = cfg.g.is_some();
    match pair_maps(f, g)? {
        MapPair::Shift(f, g) => {
            let space = ShiftSpace::new(cfg.window, cfg.alphabet)?;
            // every pair closer than delta, i.e. disagreement levels from the first 2^-l < delta
            let min_level = (0..=cfg.window).find(|&l| 0.5f64.powi(l as i32) < cfg.delta).unwrap_or(cfg.window);
            let pairs = space.exhaustive_pairs(min_level, cfg.window)?;
            let pts = space.all_words()?;
            certify_on(ctx, &cfg, &space, &f, has_g.then_some(&g), &pairs, &pts)
        }
        MapPair::Torus(f, g) => {
            let pairs = sample_pairs(&FlatTorus, cfg.pairs, cfg.seed, Some(cfg.delta))?;
            let pts = FlatTorus.sample_points(cfg.points, cfg.seed);
            certify_on(ctx, &cfg, &FlatTorus, &f, has_g.then_some(&g), &pairs, &pts)
        }
        MapPair::Interval(f, g) => {
            let pairs = sample_pairs(&UnitInterval, cfg.pairs, cfg.seed, Some(cfg.delta))?;
            let pts = UnitInterval.sample_points(cfg.points, cfg.seed);
            certify_on(ctx, &cfg, &UnitInterval, &f, has_g.then_some(&g), &pairs, &pts)
        }
    }
}

#[derive(Serialize)]
struct ShadowRow {
    orbit: usize,
    delta: f64,
    residual: f64,
    sup_correction: f64,
    bound: f64,
}

#[derive(Serialize)]
struct ShadowSummary {
    orbits: usize,
    max_residual: f64,
    max_sup_correction: f64,
    max_bound: f64,
    bound_violations: usize,
    rows: Vec<ShadowRow>,
}

/// Largest accepted `d(A y_n, y_{n+1})` for a computed shadow.
pub const SHADOW_RESIDUAL_TOL: f64 = 1e-10;

fn cmd_shadow(ctx: &Ctx, args: &ShadowArgs) -> CmdResult {
    let cfg: ShadowConfig = ctx.resolve(args)?;
    let a = parse_automorphism(&cfg.f).map_err(usage)?;
    if !(cfg.delta >= 0.0) || cfg.orbits == 0 {
        return Err(Failure::Usage("shadow needs delta >= 0 and at least one orbit".into()));
    }
    let f = a.system();
    let starts = FlatTorus.sample_points(cfg.orbits, cfg.seed);
    let mut rng = sample_rng(cfg.seed, 6);
    let mut rows = Vec::with_capacity(cfg.orbits);
    for (k, x0) in starts.iter().enumerate() {
        let po = make_pseudo_orbit(&f, x0, cfg.delta, cfg.window, rng.gen())?;
        let s = shadow_linear(&a, &po)?;
        rows.push(ShadowRow { orbit: k, delta: po.delta(), residual: s.residual, sup_correction: s.sup_correction, bound: s.bound });
    }
    let fold = |g: fn(&ShadowRow) -> f64| rows.iter().map(g).fold(0.0, f64::max);
    let summary = ShadowSummary {
        orbits: rows.len(),
        max_residual: fold(|r| r.residual),
        max_sup_correction: fold(|r| r.sup_correction),
        max_bound: fold(|r| r.bound),
        bound_violations: rows.iter().filter(|r| r.sup_correction > r.bound).count(),
        rows,
    };
    let status = Status::from_bool(summary.max_residual < SHADOW_RESIDUAL_TOL && summary.bound_violations == 0);
    let mut csv = String::from("orbit,delta,residual,sup_correction,bound\n");
    for r in &summary.rows {
        let _ = writeln!(csv, "{},{},{},{},{}", r.orbit, r.delta, r.residual, r.sup_correction, r.bound);
    }
    ctx.emit(&cfg, status, summary, Some(csv))
}

#[derive(Serialize)]
struct AffineCheck {
    c: [f64; 2],
    /// `(A − I)⁻¹ c`.
    expected_offset: [f64; 2],
    /// `max d(h(x), x + w)` over the grid.
    max_error: f64,
}

#[derive(Serialize)]
struct ConjugacySummary {
    #[serde(flatten)]
    field: crate::shadowing::ConjugacyField,
    #[serde(skip_serializing_if = "Option::is_none")]
    affine: Option<AffineCheck>,
}

fn cmd_conjugacy(ctx: &Ctx, args: &ConjugacyArgs) -> CmdResult {
    let cfg: ConjugacyConfig = ctx.resolve(args)?;
    let a = parse_automorphism(&cfg.f).map_err(usage)?;
    let g_name = required(&cfg.g, "g", "conjugacy")?;
    let g = match parse_map(&g_name, 0, 0).map_err(usage)? {
        CatalogMap::Torus(g) => g,
        CatalogMap::Identity => a.system(),
        other => return Err(Failure::Usage(format!("conjugacy needs a torus map, got one on the {}", space_name(&other)))),
    };
    let field = build_conjugacy(&a, &g, cfg.grid, cfg.window)?;
    let affine = affine_offset(&g_name).and_then(|c| {
        let w = (a.mat() - Mat2::identity()).try_inverse()? * c;
        let max_error = field.samples.iter().map(|s| torus_distance(&s.h, &s.x.translate(w))).fold(0.0, f64::max);
        Some(AffineCheck { c: [c.x, c.y], expected_offset: [w.x, w.y], max_error })
    });
    let ok = field.residual < cfg.tol && field.injectivity_margin > 0.0 && affine.as_ref().is_none_or(|c| c.max_error < cfg.tol);
    let csv = field.to_csv();
    ctx.emit(&cfg, Status::from_bool(ok), ConjugacySummary { field, affine }, Some(csv))
}

#[derive(Serialize)]
struct CounterexampleResult {
    rows: Vec<crate::smooth_compare::SeparationRow>,
    jacobian: Vec<crate::smooth_compare::JacobianLemmaReport>,
}

fn cmd_counterexample(ctx: &Ctx, args: &CounterexampleArgs) -> CmdResult {
    let cfg: CounterexampleConfig = ctx.resolve(args)?;
    if cfg.eps.is_empty() || cfg.eps.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
        return Err(Failure::Usage("every --eps value must lie in (0, 1)".into()));
    }
    let rows = separation_table(&cfg.eps, cfg.pairs, cfg.seed)?;
    let jacobian = cfg
        .eps
        .iter()
        .map(|&e| jacobian_lemma_check(&gamma_build(e)?, cfg.jacobian_points, cfg.seed))
        .collect::<crate::Result<Vec<_>>>()?;
    let ok = rows.iter().all(|r| r.measured <= r.dw_prime_bound && r.c1_gap == 2.0) && jacobian.iter().all(|j| j.holds);
    let csv = separation_csv(&rows);
    ctx.emit(&cfg, Status::from_bool(ok), CounterexampleResult { rows, jacobian }, Some(csv))
}

#[derive(Serialize)]
struct ConeResult {
    circles: Vec<CircleCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<crate::cone_rigidity::FixSetCertificate>,
    reports: Vec<RigidityReport>,
}

/// Samples per circle in the circle-length cross-check.
pub const CIRCLE_CHECK_SAMPLES: usize = 10_000;

fn cmd_cone(ctx: &Ctx, args: &ConeArgs) -> CmdResult {
    let cfg: ConeConfig = ctx.resolve(args)?;
    if cfg.n < 2 {
        return Err(Failure::Usage(format!("cone needs n >= 2, got {}", cfg.n)));
    }
    let circles = [0.1, 0.5, 1.0].iter().map(|&r| circle_cross_check(cfg.n, r, CIRCLE_CHECK_SAMPLES)).collect::<crate::Result<Vec<_>>>()?;
    let circles_ok = circles.iter().all(|c| c.relative_error < 1e-3);
    let (status, certificate, reports) = match cfg.family {
        ConeFamily::Stress50 => {
            let cert = fix_set_stability(cfg.tol, cfg.n, cfg.seed)?;
            let reports = if cert.vacuous { Vec::new() } else { stress_family(cfg.n, cfg.seed)? };
            let status = if cert.vacuous { Status::Vacuous } else { Status::from_bool(cert.separates && circles_ok) };
            (status, Some(cert), reports)
        }
        ConeFamily::Single => {
            let [r, theta] = cfg.target[..] else {
                return Err(Failure::Usage("--target takes r,theta".into()));
            };
            let disk = ConeDisk::new(cfg.n, 1.0)?;
            let pairs = mover_pairs(&disk, 2000, cfg.seed)?;
            let report = mover_report(&disk, &disk.point(r, theta), &pairs)?;
            let ok = report.product >= report.threshold - cfg.tol && circles_ok;
            (Status::from_bool(ok), None, vec![report])
        }
    };
    let mut csv = String::from("r,theta,r1,r2,lips_j,lips_j_inv,product,threshold\n");
    for rep in &reports {
        let _ = writeln!(csv, "{},{},{},{},{},{},{},{}", rep.x.r, rep.x.theta, rep.r1, rep.r2, rep.lips_j, rep.lips_j_inv, rep.product, rep.threshold);
    }
    ctx.emit(&cfg, status, ConeResult { circles, certificate, reports }, Some(csv))
}

#[derive(Serialize)]
struct IntervalResult {
    derivative: crate::smooth_compare::IntervalReport,
    dc1: crate::smooth_compare::Dc1Report,
}

fn interval_diffeo(name: &str) -> std::result::Result<IntervalDiffeo, Failure> {
    let inner = name.strip_prefix("interval:").unwrap_or(name);
    IntervalDiffeo::parse(inner).map_err(|e| Failure::Usage(format!("map {name:?}: {e}")))
}

fn cmd_interval(ctx: &Ctx, args: &IntervalArgs) -> CmdResult {
    let cfg: IntervalConfig = ctx.resolve(args)?;
    let f = interval_diffeo(&cfg.f)?;
    let g = interval_diffeo(&required(&cfg.g, "g", "interval")?)?;
    let derivative = interval_dw_vs_c1(&f, &g, cfg.grid)?;
    let grid: Vec<f64> = (0..=cfg.grid).map(|i| i as f64 / cfg.grid as f64).collect();
    let pairs = sample_pairs(&UnitInterval, cfg.pairs, cfg.seed, None)?;
    let (ff, gg) = (f, g);
    let jf = move |x: &f64| Mat2::new(ff.derivative(*x), 0.0, 0.0, 0.0);
    let jg = move |x: &f64| Mat2::new(gg.derivative(*x), 0.0, 0.0, 0.0);
    let probe = JacobianProbe { jf: &jf, jg: &jg, points: &grid };
    let dc1 = dc1_metric(&UnitInterval, &f.system(), &g.system(), &pairs, &grid, Some(probe))?;
    let ok = derivative.holds && dc1.jacobian_bound_holds.unwrap_or(true);
    ctx.emit(&cfg, Status::from_bool(ok), IntervalResult { derivative, dc1 }, None)
}

fn configure_threads() -> std::result::Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| Failure::Usage(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    // a pool may already exist when run inside a test harness
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn dispatch(cli: &Cli) -> CmdResult {
    configure_threads()?;
    let file = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            Some(text.parse::<toml::Table>().map_err(|e| Failure::Usage(format!("invalid config {}: {e}", path.display())))?)
        }
        None => None,
    };
    let command = match &cli.command {
        Command::Metrics(_) => "metrics",
        Command::Certify(_) => "certify",
        Command::Shadow(_) => "shadow",
        Command::Conjugacy(_) => "conjugacy",
        Command::Counterexample(_) => "counterexample",
        Command::Cone(_) => "cone",
        Command::Interval(_) => "interval",
    };
    if let Some(t) = &file {
        let known = ["metrics", "certify", "shadow", "conjugacy", "counterexample", "cone", "interval"];
        if let Some(k) = t.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(Failure::Usage(format!("unknown table [{k}] in config")));
        }
    }
    let default_format = if command == "counterexample" { Format::Csv } else { Format::Json };
    let ctx = Ctx { command, format: cli.format.unwrap_or(default_format), output: cli.output.as_ref(), file: file.as_ref() };
    match &cli.command {
        Command::Metrics(a) => cmd_metrics(&ctx, a),
        Command::Certify(a) => cmd_certify(&ctx, a),
        Command::Shadow(a) => cmd_shadow(&ctx, a),
        Command::Conjugacy(a) => cmd_conjugacy(&ctx, a),
        Command::Counterexample(a) => cmd_counterexample(&ctx, a),
        Command::Cone(a) => cmd_cone(&ctx, a),
        Command::Interval(a) => cmd_interval(&ctx, a),
    }
}

/// Parses `args`, runs the command and writes the report. Returns the exit
/// code: 0 pass, 1 fail or runtime error, 2 usage error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(&cli) {
        Ok((status, body)) => {
            let written = match &cli.output {
                Some(path) => std::fs::write(path, &body).map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => {
                    print!("{body}");
                    Ok(())
                }
            };
            match written {
                Ok(()) => status.exit_code(),
                Err(msg) => {
                    eprintln!("error: {msg}");
                    1
                }
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            2
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_names_round_trip() {
        for name in ["cat", "cat-affine:0.01,0", "cat-bump:0.5,0.5,0.1,0.002", "rot:0.1,0.2", "shift", "walters:3:3:4", "interval:poly:0.1", "scale:0.5"] {
            let m = parse_map(name, 6, 2).unwrap();
            let got = match &m {
                CatalogMap::Torus(f) => f.name().to_string(),
                CatalogMap::Shift(f) => f.name().to_string(),
                CatalogMap::Interval(f) => f.name().to_string(),
                CatalogMap::Identity => "id".into(),
            };
            assert_eq!(got, name);
        }
        assert!(parse_map("nope", 6, 2).is_err());
        assert!(parse_map("cat-affine:1", 6, 2).is_err());
        assert!(parse_automorphism("toral:1,1,1,1").is_err());
        assert_eq!(parse_automorphism("toral:2,1,1,1").unwrap().name(), "cat");
    }

    #[test]
    fn spaces_must_match() {
        let f = parse_map("cat", 6, 2).unwrap();
        let g = parse_map("shift", 6, 2).unwrap();
        assert!(matches!(pair_maps(f, g), Err(Failure::Usage(_))));
    }

    #[test]
    fn affine_names() {
        assert_eq!(affine_offset("cat-affine:0.01,0"), Some(Vec2::new(0.01, 0.0)));
        assert_eq!(affine_offset("cat"), None);
    }

    #[test]
    fn config_layers() {
        let file: toml::Table = "[shadow]\norbits = 5\ndelta = 0.01\n".parse().unwrap();
        let ctx = Ctx { command: "shadow", format: Format::Json, output: None, file: Some(&file) };
        let args = ShadowArgs { delta: Some(0.002), ..Default::default() };
        let cfg: ShadowConfig = ctx.resolve(&args).unwrap();
        assert_eq!((cfg.orbits, cfg.delta, cfg.window), (5, 0.002, 60));
        let bad: toml::Table = "[shadow]\norbitz = 5\n".parse().unwrap();
        let ctx = Ctx { file: Some(&bad), ..ctx };
        assert!(matches!(ctx.resolve::<ShadowConfig>(&ShadowArgs::default()), Err(Failure::Usage(_))));
    }
}
