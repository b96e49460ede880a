mod model;
mod svg;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use liouville_ep_core::analysis::{Experiment, Perturbation};
use liouville_ep_core::epscan::{classify, scan};
use liouville_ep_core::exprparse::parse_expr;
use liouville_ep_core::lindblad::{build_liouvillian, ModelSpec};
use liouville_ep_core::numlab::{
    amoeba_sample, encircle, fit_tentacles, log_grid, scaling_sweep, Branch,
};
use liouville_ep_core::polycore::{GaussRational, Vars};
use liouville_ep_core::tropgeo::{ep_orders, tentacle_directions, NewtonPolygon, Slope};
use liouville_ep_core::{Error as CoreError, ErrorKind};
use serde_json::{json, Value};
use thiserror::Error;

use svg::{Plot, Series};

const SCHEMA: u32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{0}: {1}")]
    At(String, CoreError),
    #[error("{0}")]
    Usage(String),
    #[error("cannot access {0}: {1}")]
    Io(String, std::io::Error),
    #[error("invalid model file {0}: {1}")]
    ModelFile(String, serde_json::Error),
}

impl CliError {
    pub fn at(location: String, err: CoreError) -> Self {
        CliError::At(location, err)
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) | CliError::At(_, e) => match e.kind() {
                ErrorKind::Input => 2,
                ErrorKind::Precondition => 3,
                ErrorKind::Numerical => 4,
            },
            _ => 2,
        }
    }
}

/// Newton polygon, amoeba and perturbation experiments on Lindblad
/// Liouvillians.
#[derive(Debug, Parser)]
#[command(name = "liouville-ep", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Built-in model (`spin_half`, `qubit`) or path to a JSON model file.
    #[arg(long)]
    model: String,
    /// Parameter binding `name=value` with an exact rational value.
    #[arg(long = "bind", value_name = "NAME=VALUE")]
    bind: Vec<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ShiftSign {
    /// The degenerate eigenvalue is `omega0`.
    Plus,
    /// The degenerate eigenvalue is `-omega0`.
    Minus,
}

#[derive(Debug, Args)]
struct PointArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Degenerate eigenvalue, exact.
    #[arg(long, allow_hyphen_values = true)]
    omega0: String,
    #[arg(long, value_enum, default_value = "plus")]
    shift_sign: ShiftSign,
    /// Perturbation: a parameter name (derivative of L) or `generic`.
    #[arg(long, default_value = "generic")]
    perturb: String,
    /// Seed of the generic perturbation.
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Debug, Args)]
struct OutArgs {
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also render an SVG plot to this path.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the Liouvillian superoperator.
    Build {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Newton polygon, root valuations and classification at a degenerate eigenvalue.
    Polygon {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Scan one parameter for degenerate eigenvalues with the others fixed.
    Scan {
        #[command(flatten)]
        model: ModelArgs,
        /// Parameter to solve for.
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the amoeba of the shifted characteristic polynomial.
    Amoeba {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value_t = 1e-6)]
        eps_min: f64,
        #[arg(long, default_value_t = 1e-1)]
        eps_max: f64,
        /// Number of log-spaced moduli.
        #[arg(long, default_value_t = 40)]
        eps_points: usize,
        #[arg(long, default_value_t = 64)]
        phases: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Fit the power law of an eigenvalue branch against epsilon.
    Scale {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value_t = 1e-6)]
        eps_min: f64,
        #[arg(long, default_value_t = 1e-2)]
        eps_max: f64,
        #[arg(long, default_value_t = 25)]
        eps_points: usize,
        /// `largest`, `smallest` or a cluster index.
        #[arg(long, default_value = "largest")]
        branch: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Follow the eigenvalues around a loop `L0 + r e^{it} L1`.
    Encircle {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value_t = 0.01)]
        radius: f64,
        #[arg(long, default_value_t = 400)]
        steps: usize,
        #[arg(long, default_value_t = 1)]
        loops: usize,
        #[command(flatten)]
        out: OutArgs,
    },
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(path.display().to_string(), e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io("stdout".into(), e)),
    }
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// CSV goes to `--out` (or stdout); the JSON summary goes to stdout when the
/// CSV has its own file and to stderr otherwise.
fn emit_table(out: &OutArgs, csv: &str, summary: &Value, plot: impl FnOnce() -> Plot) -> Result<(), CliError> {
    write_output(out.out.as_deref(), csv)?;
    if out.out.is_some() {
        write_output(None, &json_text(summary))?;
    } else {
        eprint!("{}", json_text(summary));
    }
    if let Some(path) = &out.svg {
        write_output(Some(path), &plot().render())?;
    }
    Ok(())
}

fn strings(m: &BTreeMap<String, GaussRational>) -> Value {
    Value::Object(m.iter().map(|(k, v)| (k.clone(), Value::String(v.to_string()))).collect())
}

struct Loaded {
    spec: ModelSpec,
    bindings: BTreeMap<String, GaussRational>,
    perturbation: Perturbation,
    exp: Experiment,
}

fn load_point(p: &PointArgs) -> Result<Loaded, CliError> {
    let spec = model::load(&p.model.model)?;
    let bindings = model::bindings(&p.model.bind)?;
    let omega0 = parse_expr(&p.omega0, &Vars::empty())
        .map_err(|e| CliError::at("--omega0".into(), e))?
        .as_constant()
        .expect("expression over no variables is constant");
    let omega0 = match p.shift_sign {
        ShiftSign::Plus => omega0,
        ShiftSign::Minus => -omega0,
    };
    let perturbation = match p.perturb.parse::<Perturbation>()? {
        Perturbation::Generic { .. } if p.perturb == "generic" => Perturbation::Generic { seed: p.seed },
        other => other,
    };
    let exp = Experiment::new(&spec, &bindings, omega0, &perturbation)?;
    Ok(Loaded {
        spec,
        bindings,
        perturbation,
        exp,
    })
}

fn header(l: &Loaded) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert("model".into(), json!(l.spec.name));
    m.insert("params".into(), strings(&l.bindings));
    m.insert("omega0".into(), json!(l.exp.omega0.to_string()));
    m.insert("perturbation".into(), json!(l.perturbation.to_string()));
    m
}

fn cmd_build(model: &ModelArgs, out: Option<&Path>) -> Result<(), CliError> {
    let spec = model::load(&model.model)?;
    let bindings = model::bindings(&model.bind)?;
    if let Some(unknown) = bindings.keys().find(|k| !spec.params.contains(k)) {
        return Err(CoreError::UnknownParameter(unknown.clone()).into());
    }
    let l = build_liouvillian(&spec)?;
    let bound = l.matrix.substitute_values(&bindings)?;
    let entries: Vec<Vec<String>> = bound.rows().map(|r| r.iter().map(|p| p.to_string()).collect()).collect();
    let v = json!({
        "schema": SCHEMA,
        "model": spec.name,
        "params": spec.params,
        "bindings": strings(&bindings),
        "dim": bound.nrows(),
        "trace_preserving": l.is_trace_preserving(),
        "entries": entries,
    });
    write_output(out, &json_text(&v))
}

fn polygon_plot(poly: &NewtonPolygon, title: &str) -> Plot {
    let pts: Vec<(f64, f64)> = poly.points.iter().map(|p| (p.i as f64, p.j as f64)).collect();
    let top = poly.points.iter().map(|p| p.j).max().unwrap_or(0) as f64 + 1.0;
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for s in &poly.segments {
        if s.slope == Slope::Vertical {
            hull.push((s.start.i as f64, top));
        }
        hull.push((s.start.i as f64, s.start.j as f64));
        hull.push((s.end.i as f64, s.end.j as f64));
    }
    Plot {
        title: title.into(),
        xlabel: "power of omega".into(),
        ylabel: "lowest power of epsilon".into(),
        series: vec![Series::points(pts), Series::line(hull)],
    }
}

fn cmd_polygon(p: &PointArgs, out: &OutArgs) -> Result<(), CliError> {
    let l = load_point(p)?;
    let f = l.exp.shifted_char_poly()?;
    let poly = NewtonPolygon::from_poly(&f)?;
    let tentacles: Vec<Value> = tentacle_directions(&poly)
        .iter()
        .map(|t| {
            json!({
                "valuation": t.valuation.to_string(),
                "multiplicity": t.multiplicity,
                "direction": [t.direction.0, t.direction.1],
                "slope": t.slope.as_ref().map_or(Value::String("vertical".into()), |s| Value::String(s.to_string())),
            })
        })
        .collect();
    let candidate = classify(&l.spec, &l.bindings, &l.exp.omega0, p.seed)?;
    let mut v = header(&l);
    v.insert("char_poly".into(), json!(f.to_string()));
    v.insert("polygon".into(), poly.to_json());
    v.insert("summary".into(), json!(poly.summary()));
    v.insert("valuations".into(), ep_orders(&poly).to_json());
    v.insert("tentacles".into(), Value::Array(tentacles));
    v.insert("classification".into(), candidate.to_json());
    write_output(out.out.as_deref(), &json_text(&Value::Object(v)))?;
    if let Some(path) = &out.svg {
        write_output(Some(path), &polygon_plot(&poly, &poly.summary()).render())?;
    }
    Ok(())
}

fn cmd_scan(model: &ModelArgs, target: &str, seed: u64, out: Option<&Path>) -> Result<(), CliError> {
    let spec = model::load(&model.model)?;
    let fixed = model::bindings(&model.bind)?;
    let report = scan(&spec, target, &fixed, seed)?;
    let mut v = serde_json::Map::new();
    v.insert("schema".into(), json!(SCHEMA));
    v.insert("model".into(), json!(spec.name));
    if let Value::Object(fields) = report.to_json() {
        v.extend(fields);
    }
    write_output(out, &json_text(&Value::Object(v)))
}

fn cmd_amoeba(p: &PointArgs, range: (f64, f64), n_moduli: usize, n_phases: usize, out: &OutArgs) -> Result<(), CliError> {
    let l = load_point(p)?;
    let f = l.exp.shifted_char_poly()?;
    let poly = NewtonPolygon::from_poly(&f)?;
    let cloud = amoeba_sample(&f, range, n_moduli, n_phases)?;
    let fits = fit_tentacles(&cloud, &tentacle_directions(&poly))?;
    let mut csv = String::from("logeps,logmag\n");
    for pt in &cloud.points {
        let _ = writeln!(csv, "{:e},{:e}", pt.log_eps, pt.log_mag);
    }
    let mut v = header(&l);
    v.insert("points".into(), json!(cloud.points.len()));
    v.insert("skipped".into(), json!(cloud.skipped));
    v.insert(
        "tentacles".into(),
        Value::Array(
            fits.iter()
                .map(|t| {
                    json!({
                        "valuation": t.expected.valuation.to_string(),
                        "expected_slope": t.expected.slope.as_ref().map_or("vertical".to_string(), |s| s.to_string()),
                        "fitted_slope": t.fitted_slope,
                        "deviation": t.deviation,
                        "support": t.support,
                    })
                })
                .collect(),
        ),
    );
    emit_table(out, &csv, &Value::Object(v), || Plot {
        title: format!("amoeba, polygon {}", poly.summary()),
        xlabel: "log|omega - omega0|".into(),
        ylabel: "log|epsilon|".into(),
        series: vec![Series::points(cloud.points.iter().map(|p| (p.log_mag, p.log_eps)).collect())],
    })
}

fn parse_branch(text: &str) -> Result<Branch, CliError> {
    match text {
        "largest" => Ok(Branch::Largest),
        "smallest" => Ok(Branch::Smallest),
        _ => text
            .parse()
            .map(Branch::Index)
            .map_err(|_| CliError::Usage(format!("branch must be largest, smallest or an index, got `{text}`"))),
    }
}

fn cmd_scale(p: &PointArgs, range: (f64, f64), points: usize, branch: &str, out: &OutArgs) -> Result<(), CliError> {
    let branch = parse_branch(branch)?;
    let l = load_point(p)?;
    if !(range.0 > 0.0 && range.1 > range.0) || points < 3 {
        return Err(CoreError::InvalidArgument("need 0 < eps-min < eps-max and at least 3 points".into()).into());
    }
    let (l0, l1) = l.exp.numeric()?;
    let r = scaling_sweep(&l0, &l1, l.exp.omega0.to_complex(), &log_grid(range.0, range.1, points), branch)?;
    let mut csv = String::from("epsilon,re,im,logeps,logmag\n");
    for s in &r.samples {
        let _ = writeln!(csv, "{:e},{:e},{:e},{:e},{:e}", s.epsilon, s.value.re, s.value.im, s.log_eps, s.log_mag);
    }
    let mut v = header(&l);
    v.insert("cluster_size".into(), json!(r.cluster_size));
    v.insert(
        "fit".into(),
        json!({"slope": r.fit.slope, "intercept": r.fit.intercept, "rsquared": r.fit.rsquared, "npoints": r.fit.npoints}),
    );
    emit_table(out, &csv, &Value::Object(v), || {
        let xs = (r.samples[0].log_eps, r.samples[r.samples.len() - 1].log_eps);
        Plot {
            title: format!("slope {:.4}", r.fit.slope),
            xlabel: "log epsilon".into(),
            ylabel: "log|omega - omega0|".into(),
            series: vec![
                Series::points(r.samples.iter().map(|s| (s.log_eps, s.log_mag)).collect()),
                Series::line(vec![
                    (xs.0, r.fit.intercept + r.fit.slope * xs.0),
                    (xs.1, r.fit.intercept + r.fit.slope * xs.1),
                ]),
            ],
        }
    })
}

fn cmd_encircle(p: &PointArgs, radius: f64, steps: usize, loops: usize, out: &OutArgs) -> Result<(), CliError> {
    let l = load_point(p)?;
    let (l0, l1) = l.exp.numeric()?;
    let r = encircle(&l0, &l1, radius, steps, loops)?;
    let mut csv = String::from("t,index,re,im\n");
    for tp in &r.traces {
        let _ = writeln!(csv, "{:e},{},{:e},{:e}", tp.t, tp.index, tp.value.re, tp.value.im);
    }
    let mut v = header(&l);
    v.insert("permutation".into(), json!(r.report.permutation));
    v.insert("cycles".into(), json!(r.report.cycles));
    v.insert("tracking_residual".into(), json!(r.report.tracking_residual));
    v.insert("min_gap".into(), json!(r.report.min_gap));
    emit_table(out, &csv, &Value::Object(v), || {
        let n = l0.n;
        Plot {
            title: format!("cycles {:?}", r.report.cycles),
            xlabel: "Re omega".into(),
            ylabel: "Im omega".into(),
            series: (0..n)
                .map(|k| {
                    Series::line(
                        r.traces
                            .iter()
                            .filter(|tp| tp.index == k)
                            .map(|tp| (tp.value.re, tp.value.im))
                            .collect(),
                    )
                })
                .collect(),
        }
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Build { model, out } => cmd_build(model, out.as_deref()),
        Command::Polygon { point, out } => cmd_polygon(point, out),
        Command::Scan { model, target, seed, out } => cmd_scan(model, target, *seed, out.as_deref()),
        Command::Amoeba {
            point,
            eps_min,
            eps_max,
            eps_points,
            phases,
            out,
        } => cmd_amoeba(point, (*eps_min, *eps_max), *eps_points, *phases, out),
        Command::Scale {
            point,
            eps_min,
            eps_max,
            eps_points,
            branch,
            out,
        } => cmd_scale(point, (*eps_min, *eps_max), *eps_points, branch, out),
        Command::Encircle {
            point,
            radius,
            steps,
            loops,
            out,
        } => cmd_encircle(point, *radius, *steps, *loops, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
