mod figures;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Map, Value};

use wulffkit::caustic::{self, SymOptions};
use wulffkit::convexity::{self, Verdict};
use wulffkit::perturbation::{self, Stabilized};
use wulffkit::stability::{self, StabilityConfig, Status};
use wulffkit::tangent::circle_angle;
use wulffkit::{Error, SampledFunction, SphereField, SphereFunction};

use figures::{Format, Row, Shape};

const VERSION: &str = concat!("wulffkit ", env!("CARGO_PKG_VERSION"));

#[derive(Parser)]
#[command(name = "wulffkit", version, about = "Convex integrands: convexity, stability, stabilization and caustics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether γ is a convex integrand (exit 0 yes, 2 no, 3 indeterminate).
    Validate {
        input: PathBuf,
        /// Directions sampled on the sphere.
        #[arg(long)]
        samples: Option<usize>,
        /// Hull tolerance (absolute; default 1e-7 × max radius).
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        out: ReportOut,
    },
    /// Critical-point census and stability verdict (exit 0 stable, 2 unstable, 3 indeterminate).
    Stability {
        input: PathBuf,
        #[command(flatten)]
        tols: StabilityTols,
        #[command(flatten)]
        out: ReportOut,
    },
    /// Translate the dual body by a random v until the result is stable.
    Stabilize {
        input: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        max_tries: usize,
        /// Grid size of the sampled output integrand.
        #[arg(long)]
        samples: Option<usize>,
        /// Where to write the perturbed integrand; embedded in the report otherwise.
        #[arg(long)]
        integrand_out: Option<PathBuf>,
        #[command(flatten)]
        tols: StabilityTols,
        #[command(flatten)]
        out: ReportOut,
    },
    /// Focal set of the dual boundary.
    Caustic {
        input: PathBuf,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        /// Figure path (.csv or .svg).
        #[arg(long)]
        out: PathBuf,
    },
    /// Symmetry set of the dual curve (S¹ only).
    Symset {
        input: PathBuf,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// `pairs` solves the bitangent-circle equations; `fronts` sweeps wave fronts.
        #[arg(long, value_enum, default_value_t = SymMethod::Pairs)]
        method: SymMethod,
        /// Offset range A:B[:STEP] for the front sweep (default 0 to 2·max 1/κ).
        #[arg(long)]
        t_range: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Inward wave fronts φ + t·n.
    Wavefront {
        input: PathBuf,
        #[arg(long, conflicts_with = "t_range", required_unless_present = "t_range")]
        t: Option<f64>,
        /// A:B:STEP
        #[arg(long)]
        t_range: Option<String>,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Merge reports produced by the other subcommands.
    Report {
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        out: ReportOut,
    },
}

#[derive(Args)]
struct ReportOut {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Copy)]
struct StabilityTols {
    /// Minimum critical-value gap, relative to max |value|.
    #[arg(long, default_value_t = 1e-8)]
    val_tol: f64,
    /// Minimum |Hessian eigenvalue|, relative to the largest Hessian entry.
    #[arg(long, default_value_t = 1e-8)]
    nd_tol: f64,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum SymMethod {
    Pairs,
    Fronts,
}

enum Failure {
    Usage(String),
    Input(String),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(4)
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Validate { input, samples, tol, out } => validate(&input, samples, tol, &out),
        Command::Stability { input, tols, out } => stability_cmd(&input, tols, &out),
        Command::Stabilize {
            input,
            epsilon,
            seed,
            max_tries,
            samples,
            integrand_out,
            tols,
            out,
        } => stabilize(&input, epsilon, seed, max_tries, samples, integrand_out.as_deref(), tols, &out),
        Command::Caustic { input, samples, out } => caustic_cmd(&input, samples, &out),
        Command::Symset {
            input,
            samples,
            tol,
            method,
            t_range,
            out,
        } => symset(&input, samples, tol, method, t_range.as_deref(), &out),
        Command::Wavefront {
            input,
            t,
            t_range,
            samples,
            out,
        } => wavefront(&input, t, t_range.as_deref(), samples, &out),
        Command::Report { inputs, out } => report(&inputs, &out),
    }
}

enum Loaded {
    Polynomial(Arc<dyn SphereField>),
    Sampled(SampledFunction),
}

/// A polynomial function file or a sampled-function file.
fn load_any(path: &Path) -> Result<Loaded, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let parsed = if doc.get("samples").is_some() {
        SampledFunction::from_json(&text).map(Loaded::Sampled)
    } else {
        SphereFunction::from_json(&text).map(|f| Loaded::Polynomial(perturbation::shared(f)))
    };
    parsed.map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// Commands that differentiate γ need its closed form.
fn load(path: &Path) -> Result<Arc<dyn SphereField>, Failure> {
    match load_any(path)? {
        Loaded::Polynomial(f) => Ok(f),
        Loaded::Sampled(_) => Err(Failure::Usage(format!(
            "{}: sampled functions carry no derivatives; only `validate` accepts them",
            path.display()
        ))),
    }
}

fn check_samples(m: usize) -> Result<(), Failure> {
    if m < 16 {
        return Err(Failure::Usage(format!("--samples must be at least 16 (got {m})")));
    }
    Ok(())
}

fn check_tol(name: &str, t: f64) -> Result<(), Failure> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Failure::Usage(format!("{name} must be positive (got {t})")));
    }
    Ok(())
}

fn emit(report: &Value, out: &ReportOut) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    match &out.out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn header(command: &str, input: &Path, config: Value) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("version".into(), json!(VERSION));
    m.insert("command".into(), json!(command));
    m.insert("input".into(), json!(input.display().to_string()));
    m.insert("config".into(), config);
    m
}

fn merge(mut base: Map<String, Value>, extra: impl Serialize) -> Result<Value, Failure> {
    if let Value::Object(fields) = serde_json::to_value(extra)? {
        base.extend(fields);
    }
    Ok(Value::Object(base))
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Yes => 0,
        Verdict::No => 2,
        Verdict::Indeterminate => 3,
    }
}

fn status_code(s: Status) -> u8 {
    match s {
        Status::Stable => 0,
        Status::Unstable => 2,
        Status::Indeterminate => 3,
    }
}

fn default_samples(dim: usize) -> usize {
    if dim == 1 {
        1440
    } else {
        4000
    }
}

fn validate(input: &Path, samples: Option<usize>, tol: Option<f64>, out: &ReportOut) -> Outcome {
    if let Some(t) = tol {
        check_tol("--tol", t)?;
    }
    let (report, m) = match load_any(input)? {
        Loaded::Polynomial(gamma) => {
            let m = samples.unwrap_or(default_samples(gamma.dimension()));
            check_samples(m)?;
            (convexity::is_convex_integrand(&gamma, m, tol), m)
        }
        Loaded::Sampled(f) => {
            if samples.is_some() {
                return Err(Failure::Usage("--samples does not apply to a sampled function".into()));
            }
            (convexity::is_convex_sampled(&f, tol), f.samples().len())
        }
    };
    let head = header("validate", input, json!({ "samples": m, "tol": tol }));
    match report {
        Ok(r) => {
            emit(&merge(head, &r)?, out)?;
            Ok(verdict_code(r.verdict))
        }
        Err(e @ (Error::NotPositive { .. } | Error::DegenerateHull(_))) => {
            let body = json!({ "verdict": Verdict::No, "diagnosis": e.to_string() });
            emit(&merge(head, body)?, out)?;
            Ok(2)
        }
        Err(e) => Err(Failure::Input(e.to_string())),
    }
}

fn stability_config(t: StabilityTols) -> Result<StabilityConfig, Failure> {
    check_tol("--val-tol", t.val_tol)?;
    check_tol("--nd-tol", t.nd_tol)?;
    let mut cfg = StabilityConfig {
        val_rel_tol: t.val_tol,
        ..StabilityConfig::default()
    };
    cfg.solver.nd_rel_tol = t.nd_tol;
    Ok(cfg)
}

fn stability_json(v: &stability::StabilityVerdict) -> Value {
    let morse = stability::morse_inequalities(&v.morse);
    json!({
        "status": v.status,
        "census": v.census,
        "witness": v.witness,
        "min_margin": v.min_margin,
        "min_value_gap": v.min_value_gap,
        "diagnosis": v.diagnosis,
        "morse": {
            "C": v.morse.counts,
            "betti": v.morse.betti,
            "inequalities": morse.inequalities,
            "euler": morse.euler,
            "euler_holds": morse.euler_holds,
        },
    })
}

fn stability_cmd(input: &Path, tols: StabilityTols, out: &ReportOut) -> Outcome {
    let gamma = load(input)?;
    let cfg = stability_config(tols)?;
    let v = stability::is_stable(&gamma, &cfg);
    let head = header("stability", input, json!({ "val_tol": tols.val_tol, "nd_tol": tols.nd_tol }));
    emit(&merge(head, stability_json(&v))?, out)?;
    Ok(status_code(v.status))
}

#[allow(clippy::too_many_arguments)]
fn stabilize(
    input: &Path,
    epsilon: f64,
    seed: u64,
    max_tries: usize,
    samples: Option<usize>,
    integrand_out: Option<&Path>,
    tols: StabilityTols,
    out: &ReportOut,
) -> Outcome {
    let gamma = load(input)?;
    let dim = gamma.dimension();
    let m = samples.unwrap_or(if dim == 1 {
        perturbation::TABLE_S1
    } else {
        perturbation::TABLE_S2
    });
    check_samples(m)?;
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Failure::Usage(format!("--epsilon must be non-negative (got {epsilon})")));
    }
    if max_tries == 0 {
        return Err(Failure::Usage("--max-tries must be at least 1".into()));
    }
    let cfg = stability_config(tols)?;
    let head = header(
        "stabilize",
        input,
        json!({
            "epsilon": epsilon, "seed": seed, "max_tries": max_tries, "samples": m,
            "val_tol": tols.val_tol, "nd_tol": tols.nd_tol,
        }),
    );
    let Stabilized { result, tries } = match perturbation::stabilize(gamma, epsilon, seed, max_tries, m, &cfg) {
        Ok(s) => s,
        Err(e @ (Error::TriesExhausted { .. } | Error::NotPositive { .. } | Error::OutOfInterior { .. })) => {
            let body = json!({ "verdict": Status::Unstable, "diagnosis": e.to_string() });
            emit(&merge(head, body)?, out)?;
            return Ok(2);
        }
        Err(e) => return Err(Failure::Input(e.to_string())),
    };
    let convex = convexity::is_convex_integrand(&result.gamma_v, default_samples(dim), None)
        .map(|r| r.verdict)
        .unwrap_or(Verdict::No);
    let mut body = json!({
        "v": wulffkit::sphere_fn::components(dim, &result.v),
        "tries": tries,
        "verdict": result.verdict.status,
        "sup_distance": result.sup_distance,
        "margin": result.margin,
        "convex": convex,
        "stability": stability_json(&result.verdict),
    });
    let integrand: Value = serde_json::from_str(&result.gamma_v.to_json().map_err(|e| Failure::Input(e.to_string()))?)?;
    match integrand_out {
        Some(p) => {
            let mut text = serde_json::to_string_pretty(&integrand)?;
            text.push('\n');
            fs::write(p, text)?;
            body["integrand_file"] = json!(p.display().to_string());
        }
        None => body["integrand"] = integrand,
    }
    emit(&merge(head, body)?, out)?;
    Ok(status_code(result.verdict.status))
}

fn figure_format(out: &Path) -> Result<Format, Failure> {
    Format::from_path(out).ok_or_else(|| Failure::Usage(format!("--out must end in .csv or .svg: {}", out.display())))
}

fn source(dim: usize, theta: &wulffkit::tangent::Vec3) -> String {
    if dim == 1 {
        json!(circle_angle(theta)).to_string()
    } else {
        format!("{} {} {}", json!(theta.x), json!(theta.y), json!(theta.z))
    }
}

fn write_figure(out: &Path, format: Format, dim: usize, rows: &[Row], shapes: &[Shape]) -> Result<(), Failure> {
    match format {
        Format::Csv => figures::write_csv(out, dim, rows)?,
        Format::Svg => fs::write(out, figures::svg(shapes))?,
    }
    Ok(())
}

fn require_planar(dim: usize, format: Format) -> Result<(), Failure> {
    if format == Format::Svg && dim != 1 {
        return Err(Failure::Usage("SVG output needs a function on S¹".into()));
    }
    Ok(())
}

fn dual_curve(gamma: &dyn SphereField, m: usize) -> Vec<figures::Point> {
    caustic::wave_front(gamma, 0.0, m).points
}

fn caustic_cmd(input: &Path, m: usize, out: &Path) -> Outcome {
    check_samples(m)?;
    let format = figure_format(out)?;
    let gamma = load(input)?;
    let dim = gamma.dimension();
    require_planar(dim, format)?;
    let c = caustic::caustic(&gamma, m);
    let mut rows: Vec<Row> = c
        .points
        .iter()
        .map(|p| {
            let mut flags = vec![if p.certified { "certified" } else { "uncertified" }];
            if c.rotationally_degenerate {
                flags.push("rotationally-degenerate");
            }
            if dim == 2 {
                flags.push(if p.sheet == 0 { "sheet-0" } else { "sheet-1" });
            }
            Row {
                point: p.point,
                source: source(dim, &p.theta),
                flags,
                t: None,
            }
        })
        .collect();
    rows.extend(c.cusps.iter().map(|q| Row {
        point: *q,
        source: String::new(),
        flags: vec!["cusp"],
        t: None,
    }));
    let mut shapes = vec![Shape::Closed {
        class: "dual",
        points: dual_curve(&gamma, m),
    }];
    if c.rotationally_degenerate {
        shapes.push(Shape::Markers {
            class: "caustic",
            points: c.points.iter().map(|p| p.point).collect(),
            size: 0.05,
        });
    } else {
        shapes.push(Shape::Closed {
            class: "caustic",
            points: c.points.iter().map(|p| p.point).collect(),
        });
        shapes.push(Shape::Markers {
            class: "cusps",
            points: c.cusps.clone(),
            size: 0.05,
        });
    }
    write_figure(out, format, dim, &rows, &shapes)?;
    let summary = merge(
        header("caustic", input, json!({ "samples": m })),
        json!({
            "out": out.display().to_string(),
            "points": c.points.len(),
            "certified": c.points.iter().filter(|p| p.certified).count(),
            "skipped": c.skipped.len(),
            "cusps": c.cusps.iter().map(|q| [q.x, q.y]).collect::<Vec<_>>(),
            "rotationally_degenerate": c.rotationally_degenerate,
        }),
    )?;
    emit(&summary, &ReportOut { out: None })?;
    Ok(0)
}

/// A:B or A:B:STEP.
fn parse_range(s: &str) -> Result<(f64, f64, Option<f64>), Failure> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Failure::Usage(format!("expected A:B[:STEP], got {s:?}"));
    if !(2..=3).contains(&parts.len()) {
        return Err(bad());
    }
    let nums: Vec<f64> = parts.iter().map(|p| p.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
    let step = nums.get(2).copied();
    if nums.iter().any(|x| !x.is_finite()) || nums[1] < nums[0] || step.is_some_and(|s| s <= 0.0) {
        return Err(bad());
    }
    Ok((nums[0], nums[1], step))
}

fn symset(input: &Path, m: usize, tol: f64, method: SymMethod, t_range: Option<&str>, out: &Path) -> Outcome {
    check_samples(m)?;
    check_tol("--tol", tol)?;
    let format = figure_format(out)?;
    let range = t_range.map(parse_range).transpose()?;
    let gamma = load(input)?;
    if gamma.dimension() != 1 {
        return Err(Failure::Usage("symmetry sets are only computed on S¹".into()));
    }
    let (rows, points, degenerate, config) = match method {
        SymMethod::Pairs => {
            let sym = caustic::symmetry_set_with(
                &gamma,
                &SymOptions {
                    samples: m,
                    tol,
                    ..SymOptions::default()
                },
            )
            .map_err(|e| Failure::Usage(e.to_string()))?;
            let rows = match sym.centre {
                Some(c) => vec![Row {
                    point: c,
                    source: String::new(),
                    flags: vec!["rotationally-degenerate"],
                    t: None,
                }],
                None => sym
                    .pairs
                    .iter()
                    .map(|p| Row {
                        point: p.center,
                        source: format!("{} {}", json!(circle_angle(&p.theta1)), json!(circle_angle(&p.theta2))),
                        flags: vec![match p.family {
                            caustic::Family::Same => "same",
                            caustic::Family::Opposite => "opposite",
                        }],
                        t: Some(p.radius),
                    })
                    .collect(),
            };
            (rows, sym.points(), sym.rotationally_degenerate, json!({ "samples": m, "tol": tol, "method": method }))
        }
        SymMethod::Fronts => {
            let (a, b, step) = match range {
                Some(r) => r,
                None => {
                    let (a, b) = caustic::default_t_range(&gamma, m);
                    (a, b, None)
                }
            };
            let sweep = caustic::sym_via_fronts(&gamma, (a, b), m, step).map_err(|e| Failure::Usage(e.to_string()))?;
            let rows = match sweep.centre {
                Some(c) => vec![Row {
                    point: c,
                    source: String::new(),
                    flags: vec!["rotationally-degenerate"],
                    t: None,
                }],
                None => sweep
                    .crossings
                    .iter()
                    .map(|c| Row {
                        point: c.point,
                        source: format!("{} {}", json!(circle_angle(&c.theta1)), json!(circle_angle(&c.theta2))),
                        flags: vec!["front-crossing"],
                        t: Some(c.t),
                    })
                    .collect(),
            };
            let config = json!({ "samples": m, "method": method, "t_range": [a, b], "step": step });
            (rows, sweep.points(), sweep.rotationally_degenerate, config)
        }
    };
    let shapes = vec![
        Shape::Closed {
            class: "dual",
            points: dual_curve(&gamma, m),
        },
        Shape::Markers {
            class: "symmetry-set",
            points: points.clone(),
            size: 0.02,
        },
    ];
    write_figure(out, format, 1, &rows, &shapes)?;
    let summary = merge(
        header("symset", input, config),
        json!({
            "out": out.display().to_string(),
            "points": points.len(),
            "rotationally_degenerate": degenerate,
        }),
    )?;
    emit(&summary, &ReportOut { out: None })?;
    Ok(0)
}

fn wavefront(input: &Path, t: Option<f64>, t_range: Option<&str>, m: usize, out: &Path) -> Outcome {
    check_samples(m)?;
    let format = figure_format(out)?;
    let ts: Vec<f64> = match (t, t_range) {
        (Some(t), _) => vec![t],
        (None, Some(r)) => {
            let (a, b, step) = parse_range(r)?;
            let step = step.ok_or_else(|| Failure::Usage("--t-range for wavefront needs A:B:STEP".into()))?;
            let n = ((b - a) / step + 1e-9).floor() as usize;
            if n > 100_000 {
                return Err(Failure::Usage("--t-range asks for more than 100000 fronts".into()));
            }
            (0..=n).map(|k| a + step * k as f64).collect()
        }
        (None, None) => return Err(Failure::Usage("one of --t or --t-range is required".into())),
    };
    let gamma = load(input)?;
    let dim = gamma.dimension();
    require_planar(dim, format)?;
    let fronts: Vec<_> = ts.iter().map(|&t| caustic::wave_front(&gamma, t, m)).collect();
    let mut rows = Vec::new();
    let mut shapes = Vec::new();
    for f in &fronts {
        for i in 0..f.points.len() {
            rows.push(Row {
                point: f.points[i],
                source: source(dim, &f.thetas[i]),
                flags: if f.singular[i] { vec!["singular"] } else { Vec::new() },
                t: Some(f.t),
            });
        }
        shapes.push(Shape::Closed {
            class: "front",
            points: f.points.clone(),
        });
    }
    write_figure(out, format, dim, &rows, &shapes)?;
    let summary = merge(
        header("wavefront", input, json!({ "samples": m, "t": ts })),
        json!({
            "out": out.display().to_string(),
            "fronts": fronts.len(),
            "singular": fronts.iter().map(|f| f.singular.iter().filter(|s| **s).count()).collect::<Vec<_>>(),
        }),
    )?;
    emit(&summary, &ReportOut { out: None })?;
    Ok(0)
}

fn report(inputs: &[PathBuf], out: &ReportOut) -> Outcome {
    if inputs.is_empty() {
        return Err(Failure::Input("empty bundle: no reports given".into()));
    }
    let mut merged = Map::new();
    merged.insert("version".into(), json!(VERSION));
    merged.insert("command".into(), json!("report"));
    let mut sources = Vec::new();
    let mut configs = Map::new();
    let (mut convex, mut stable, mut v, mut sup) = (None, None, None, None);
    let mut stabilized = false;
    for path in inputs {
        let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        let doc: Value = serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        let schema = |what: &str| Failure::Input(format!("{}: not a wulffkit report ({what})", path.display()));
        let version = doc.get("version").and_then(Value::as_str).ok_or_else(|| schema("no version"))?;
        if !version.starts_with("wulffkit ") {
            return Err(schema("foreign version string"));
        }
        let command = doc.get("command").and_then(Value::as_str).ok_or_else(|| schema("no command"))?;
        let field = |k: &str| doc.get(k).cloned().ok_or_else(|| schema(&format!("missing {k}")));
        match command {
            "validate" => convex = Some(field("verdict")?),
            "stability" => {
                if !stabilized {
                    stable = Some(json!(field("status")? == json!("stable")));
                }
            }
            "stabilize" => {
                let verdict = field("verdict")?;
                stable = Some(json!(verdict == json!("stable")));
                stabilized = true;
                if let Some(x) = doc.get("v") {
                    v = Some(x.clone());
                    sup = Some(field("sup_distance")?);
                }
                if convex.is_none() {
                    convex = doc.get("convex").cloned();
                }
            }
            "caustic" | "symset" | "wavefront" => {}
            other => return Err(schema(&format!("unknown command {other:?}"))),
        }
        sources.push(json!({ "path": path.display().to_string(), "command": command, "input": doc.get("input") }));
        if let Some(c) = doc.get("config") {
            configs.insert(command.to_string(), c.clone());
        }
    }
    merged.insert("inputs".into(), Value::Array(sources));
    merged.insert("config".into(), Value::Object(configs));
    for (k, val) in [("convex", convex), ("stable", stable), ("v", v), ("sup_distance", sup)] {
        if let Some(val) = val {
            merged.insert(k.into(), val);
        }
    }
    emit(&Value::Object(merged), out)?;
    Ok(0)
}
