//! The `toprec` command line: branch points, correlators, invariants,
//! re-expansions and verification suites for curve files.

pub mod cache;
pub mod verify;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use toprec_core::algebra::parse_rational;
use toprec_core::curve::{builtin_curve, builtin_source, find_branchpoints, load_curve, ChartPoint, CurveError, SpectralCurve};
use toprec_core::recursion::{EngineError, Engine};
use toprec_core::transforms::{expand_at_point, ReportRecord, Target, TransformError, WeightFunction};

use cache::{curve_hash, settings_of, Cache, ResultRecord};
use verify::Check;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Parser)]
#[command(name = "toprec", version, about = "Exact topological recursion on genus-0 spectral curves")]
pub struct Cli {
    /// Curve file, or the name of a shipped curve (airy, gaussian, lambert).
    #[arg(long, global = true)]
    pub curve: Option<String>,
    /// Frame order override.
    #[arg(long, global = true)]
    pub order: Option<i64>,
    /// Result cache directory.
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "table")]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the branch points of the curve.
    Branchpoints,
    /// Print the correlator ω_n^(g) as coefficients over dζ/(ζ - a)^m.
    Omega {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        n: u32,
    },
    /// Print the invariant F_g.
    Fg {
        #[arg(long)]
        g: u32,
    },
    /// Re-expand a target in powers of a weight.
    Expand {
        /// disc, omega01, omega:G:N (raw correlator) or W:G:N (generating function).
        #[arg(long)]
        target: String,
        /// Expansion point name from the curve file, or local:POINT.
        #[arg(long)]
        weight: String,
        /// Inclusive index window A..B.
        #[arg(long, allow_hyphen_values = true)]
        window: String,
    },
    /// Run the identity suite, plus oracle comparisons for shipped curves.
    Verify {
        /// Shipped suite name or curve file; defaults to --curve.
        suite: Option<String>,
    },
}

/// Failure with its process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_CURVE: i32 = 2;
pub const EXIT_SCOPE: i32 = 3;
pub const EXIT_UNDERFLOW: i32 = 4;
pub const EXIT_WEIGHT: i32 = 5;

fn curve_error(e: CurveError) -> CliError {
    CliError::new(EXIT_CURVE, e.to_string())
}

fn engine_error(e: EngineError) -> CliError {
    let code = match &e {
        EngineError::Unstable { .. } | EngineError::OutOfScope(_) => EXIT_SCOPE,
        EngineError::OrderUnderflow { .. } => EXIT_UNDERFLOW,
        EngineError::Curve(_) => EXIT_CURVE,
        EngineError::Algebra(_) => EXIT_SCOPE,
    };
    CliError::new(code, e.to_string())
}

fn transform_error(e: TransformError) -> CliError {
    match e {
        TransformError::BadWeight(_) => CliError::new(EXIT_WEIGHT, e.to_string()),
        TransformError::Engine(e) => engine_error(e),
        _ => CliError::new(EXIT_SCOPE, e.to_string()),
    }
}

fn io_error(e: std::io::Error) -> CliError {
    CliError::new(EXIT_SCOPE, format!("output: {e}"))
}

/// Curve text from a file path, or from a shipped curve of that name.
fn curve_source(spec: &str) -> Result<String, CliError> {
    if Path::new(spec).is_file() {
        return std::fs::read_to_string(spec).map_err(|e| CliError::new(EXIT_CURVE, format!("{spec}: {e}")));
    }
    builtin_source(spec)
        .map(str::to_string)
        .ok_or_else(|| CliError::new(EXIT_CURVE, format!("{spec}: no such file or shipped curve")))
}

struct Context {
    curve: SpectralCurve,
    order: Option<i64>,
    cache: Option<Cache>,
    format: Format,
}

impl Context {
    fn new(cli: &Cli, spec: &str) -> Result<Self, CliError> {
        let text = curve_source(spec)?;
        let curve = load_curve(&text).map_err(curve_error)?;
        let (order, cache_dir) = settings_of(&text);
        Ok(Self {
            curve,
            order: cli.order.or(order),
            cache: cli.cache.clone().or(cache_dir.map(PathBuf::from)).map(Cache::new),
            format: cli.format,
        })
    }

    fn engine(&self) -> Result<Engine, CliError> {
        Engine::new(self.curve.clone()).map(|e| e.with_order(self.order)).map_err(engine_error)
    }

    /// Payload for `descriptor`, from the cache when an intact record exists.
    fn cached(
        &self,
        descriptor: String,
        compute: impl FnOnce() -> Result<(Value, Option<i64>), CliError>,
    ) -> Result<Value, CliError> {
        let hash = curve_hash(&self.curve, self.order);
        if let Some(record) = self.cache.as_ref().and_then(|c| c.load(&hash, &descriptor)) {
            return Ok(record.payload);
        }
        let (payload, frame_order) = compute()?;
        if let Some(cache) = &self.cache {
            let record = ResultRecord::new(hash, descriptor, frame_order, payload.clone());
            if let Err(e) = cache.store(&record) {
                eprintln!("warning: cache write to {} failed: {e}", cache.dir().display());
            }
        }
        Ok(payload)
    }
}

/// Runs one command, writing its output to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    if let Command::Verify { suite } = &cli.command {
        return run_verify(cli, suite.as_deref().or(cli.curve.as_deref()), out);
    }
    let spec = cli
        .curve
        .as_deref()
        .ok_or_else(|| CliError::new(EXIT_CURVE, "no curve given; pass --curve FILE or a shipped curve name"))?;
    let ctx = Context::new(cli, spec)?;
    let text = match &cli.command {
        Command::Branchpoints => branchpoints(&ctx)?,
        Command::Omega { g, n } => omega(&ctx, *g, *n)?,
        Command::Fg { g } => fg(&ctx, *g)?,
        Command::Expand { target, weight, window } => expand(&ctx, target, weight, window)?,
        Command::Verify { .. } => unreachable!("handled above"),
    };
    out.write_all(text.as_bytes()).map_err(io_error)
}

fn pretty(v: &Value) -> String {
    format!("{}\n", serde_json::to_string_pretty(v).expect("json values serialize"))
}

fn branchpoints(ctx: &Context) -> Result<String, CliError> {
    let points = find_branchpoints(&ctx.curve).map_err(curve_error)?;
    Ok(match ctx.format {
        Format::Json => pretty(&json!(points
            .iter()
            .map(|a| json!({"a": a.to_string(), "simple": true, "regular": true}))
            .collect::<Vec<_>>())),
        Format::Table => points.iter().map(|a| format!("a = {a} (simple, regular)\n")).collect(),
    })
}

fn omega(ctx: &Context, g: u32, n: u32) -> Result<String, CliError> {
    let payload = ctx.cached(format!("omega {g} {n}"), || {
        let e = ctx.engine()?;
        let t = e.correlator(g, n).map_err(engine_error)?;
        let entries = serde_json::to_value(t.to_records()).expect("serializable");
        Ok((json!({"g": g, "n": n, "entries": entries}), e.order_used(g, n)))
    })?;
    Ok(match ctx.format {
        Format::Json => pretty(&payload),
        Format::Table => render_tensor(&payload),
    })
}

fn render_tensor(payload: &Value) -> String {
    let mut s = String::new();
    for entry in payload["entries"].as_array().into_iter().flatten() {
        let poles: Vec<String> = entry["poles"]
            .as_array()
            .into_iter()
            .flatten()
            .map(|p| format!("({},{})", p[0].as_str().unwrap_or_default(), p[1]))
            .collect();
        s.push_str(&format!("poles [{}] coeff {}\n", poles.join(","), entry["coeff"].as_str().unwrap_or_default()));
    }
    s
}

fn fg(ctx: &Context, g: u32) -> Result<String, CliError> {
    let payload = ctx.cached(format!("fg {g}"), || {
        let e = ctx.engine()?;
        let value = e.fg(g).map_err(engine_error)?;
        Ok((json!({"g": g, "value": value.to_string()}), e.order_used(g, 1)))
    })?;
    Ok(match ctx.format {
        Format::Json => pretty(&payload),
        Format::Table => format!("{}\n", payload["value"].as_str().unwrap_or_default()),
    })
}

enum TargetSpec {
    Disc,
    Omega01,
    Raw(u32, u32),
    Generating(u32, u32),
}

fn parse_target(text: &str) -> Result<TargetSpec, CliError> {
    let bad = || CliError::new(EXIT_SCOPE, format!("unknown target {text:?}; use disc, omega01, omega:G:N or W:G:N"));
    match text {
        "disc" => return Ok(TargetSpec::Disc),
        "omega01" => return Ok(TargetSpec::Omega01),
        _ => {}
    }
    let parts: Vec<&str> = text.split(':').collect();
    let [kind, g, n] = parts[..] else { return Err(bad()) };
    let g: u32 = g.parse().map_err(|_| bad())?;
    let n: u32 = n.parse().map_err(|_| bad())?;
    match kind {
        "omega" => Ok(TargetSpec::Raw(g, n)),
        "W" => Ok(TargetSpec::Generating(g, n)),
        _ => Err(bad()),
    }
}

fn parse_weight(curve: &SpectralCurve, text: &str) -> Result<WeightFunction, CliError> {
    if let Some(point) = text.strip_prefix("local:") {
        let point = if point == "infinity" {
            ChartPoint::Infinity
        } else {
            ChartPoint::Finite(
                parse_rational(point).map_err(|e| CliError::new(EXIT_WEIGHT, format!("bad weight point {point:?}: {e}")))?,
            )
        };
        return Ok(WeightFunction::local_coordinate(point));
    }
    curve.expansion_point(text).map(|p| p.weight.clone()).ok_or_else(|| {
        let names: Vec<&str> = curve.expansion_points.iter().map(|p| p.name.as_str()).collect();
        CliError::new(
            EXIT_WEIGHT,
            format!("no expansion point {text:?} (available: {}; or local:POINT)", names.join(", ")),
        )
    })
}

fn parse_window(text: &str) -> Result<(i64, i64), CliError> {
    let bad = || CliError::new(EXIT_SCOPE, format!("bad window {text:?}; expected A..B"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let (a, b): (i64, i64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn expand(ctx: &Context, target: &str, weight: &str, window: &str) -> Result<String, CliError> {
    let spec = parse_target(target)?;
    let w = parse_weight(&ctx.curve, weight)?;
    let range = parse_window(window)?;
    let payload = ctx.cached(format!("expand {target} {weight} {}..{}", range.0, range.1), || {
        let (report, order) = match spec {
            TargetSpec::Disc => (expand_at_point(&Target::Disc(&ctx.curve), &[w], range), None),
            TargetSpec::Omega01 => (expand_at_point(&Target::Omega01(&ctx.curve), &[w], range), None),
            TargetSpec::Raw(g, n) | TargetSpec::Generating(g, n) => {
                let e = ctx.engine()?;
                let t = e.correlator(g, n).map_err(engine_error)?;
                let target = match spec {
                    TargetSpec::Raw(..) => Target::Tensor(&t),
                    _ => Target::Generating(&t),
                };
                (expand_at_point(&target, &[w], range), e.order_used(g, n))
            }
        };
        let record = report.map_err(transform_error)?.to_record();
        Ok((serde_json::to_value(record).expect("serializable"), order))
    })?;
    Ok(match ctx.format {
        Format::Json => pretty(&payload),
        Format::Table => render_report(&payload)?,
    })
}

fn render_report(payload: &Value) -> Result<String, CliError> {
    let record: ReportRecord = serde_json::from_value(payload.clone())
        .map_err(|e| CliError::new(EXIT_SCOPE, format!("malformed report: {e}")))?;
    let mut s = String::new();
    for (k, v) in &record.notes {
        s.push_str(&format!("# {k} = {v}\n"));
    }
    for e in &record.entries {
        let index: Vec<String> = e.index.iter().map(i64::to_string).collect();
        if e.at.is_empty() {
            s.push_str(&format!("[{}] {}\n", index.join(","), e.value));
        } else {
            s.push_str(&format!("[{}] at [{}] {}\n", index.join(","), e.at.join(","), e.value));
        }
    }
    Ok(s)
}

fn run_verify(cli: &Cli, spec: Option<&str>, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = spec.ok_or_else(|| CliError::new(EXIT_CURVE, "verify needs a suite name or --curve"))?;
    let checks = if builtin_curve(spec).is_some() && !Path::new(spec).is_file() {
        verify::suite(spec, cli.order).expect("shipped curve")
    } else {
        let ctx = Context::new(cli, spec)?;
        find_branchpoints(&ctx.curve).map_err(curve_error)?;
        verify::identity_checks(&ctx.curve, ctx.order)
    };
    let text = render_checks(&checks, cli.format);
    out.write_all(text.as_bytes()).map_err(io_error)?;
    if verify::all_passed(&checks) {
        Ok(())
    } else {
        let first = checks.iter().find(|c| !c.passed).expect("a failure");
        Err(CliError::new(EXIT_VERIFY, format!("verification failed: {first}")))
    }
}

fn render_checks(checks: &[Check], format: Format) -> String {
    let passed = checks.iter().filter(|c| c.passed).count();
    match format {
        Format::Json => pretty(&json!({"passed": passed == checks.len(), "checks": checks})),
        Format::Table => {
            let mut s: String = checks.iter().map(|c| format!("{c}\n")).collect();
            s.push_str(&format!("{passed}/{} checks passed\n", checks.len()));
            s
        }
    }
}
