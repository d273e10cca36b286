//! `ougauss`: command-line front end for kernel evaluation, Poisson
//! transforms, admissibility checks, majorant certificates and seminorm
//! reports. Outputs are deterministic JSON/CSV artifacts; exit status is
//! 0 on success, 2 on validation errors, 3 on numerical-convergence
//! failures.

mod config;

use clap::{Args, Parser, Subcommand};
use config::{pick, pick_opt, FileConfig};
use ougauss_core::analyzer::{
    equivalence_report, seminorm_holder, seminorm_poisson_trace, PairSampler, SweepGrid,
};
use ougauss_core::majorants::{certify, BoundId, ExpStarConfig, SamplerMode, SamplerSpec};
use ougauss_core::transform::admissibility;
use ougauss_core::{
    poisson_integral, poisson_integral_dt, poisson_integral_dx, poisson_kernel,
    poisson_kernel_dt, poisson_kernel_dx, Error, KernelPoint, Point, QuadratureSpec, ScalarField,
};
use serde::Serialize;
use std::process::ExitCode;

const EXIT_VALIDATION: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "ougauss")]
#[command(about = "Ornstein-Uhlenbeck Poisson kernel numerics and Gaussian Lipschitz reports")]
struct Cli {
    /// JSON config file; flags override file values.
    #[arg(long, global = true)]
    config: Option<String>,

    /// Worker threads (default: machine parallelism). Mirrors OUGAUSS_THREADS.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output path (default: stdout).
    #[arg(long, global = true)]
    output: Option<String>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the Poisson kernel or a derivative at a point, or sweep t
    Kernel(KernelArgs),
    /// Evaluate P_t f or a derivative for a catalog field
    Transform(TransformArgs),
    /// Certify a kernel majorant inequality over a deterministic sample
    Certify(CertifyArgs),
    /// Estimate a Lipschitz seminorm (Poisson sweep or Hölder quotient)
    Seminorm(SeminormArgs),
    /// Run both seminorm estimators and report their ratio
    Equivalence(EquivalenceArgs),
    /// List the test-function catalog and admissibility verdicts
    Catalog(CatalogArgs),
}

#[derive(Debug, Default, Args)]
struct QuadArgs {
    /// Target relative error of quadratures.
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Absolute error floor of quadratures.
    #[arg(long)]
    abs_tol: Option<f64>,
    /// Adaptive subdivision budget per integral.
    #[arg(long)]
    max_subdivisions: Option<usize>,
    /// Lower clamp for the subordination window in v = ln s.
    #[arg(long)]
    s_cut_low: Option<f64>,
    /// Upper clamp for the subordination window in v = ln s.
    #[arg(long)]
    s_cut_high: Option<f64>,
}

#[derive(Debug, Default, Args)]
struct KernelArgs {
    /// Dimension (1, 2 or 3).
    #[arg(long)]
    n: Option<usize>,
    /// Semigroup time t > 0.
    #[arg(long)]
    t: Option<f64>,
    /// Comma-separated x coordinates.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    x: Option<Vec<f64>>,
    /// Comma-separated y coordinates.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    y: Option<Vec<f64>>,
    /// Which kernel to evaluate: value, dt, or dx.
    #[arg(long)]
    deriv: Option<String>,
    /// Axis (1-based) for --deriv dx.
    #[arg(long)]
    i: Option<usize>,
    /// Number of t values for a log-spaced CSV sweep.
    #[arg(long)]
    t_count: Option<usize>,
    /// Sweep range lower end.
    #[arg(long)]
    t_min: Option<f64>,
    /// Sweep range upper end.
    #[arg(long)]
    t_max: Option<f64>,
    /// Output format for single-point evaluation: json or csv.
    #[arg(long)]
    format: Option<String>,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Debug, Default, Args)]
struct TransformArgs {
    /// Catalog field, e.g. CONST:1, COORD:1, LOG_ALPHA:0.5.
    #[arg(long)]
    f: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    x: Option<Vec<f64>>,
    /// value, dt, or dx.
    #[arg(long)]
    deriv: Option<String>,
    /// Axis (1-based) for --deriv dx.
    #[arg(long)]
    i: Option<usize>,
    #[arg(long)]
    format: Option<String>,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Debug, Default, Args)]
struct CertifyArgs {
    /// PROP21, LEMMA31, LEMMA32A, LEMMA32B or LOCAL_UNIFORM.
    #[arg(long)]
    bound: Option<String>,
    /// Number of certification samples (the run evaluates twice as many
    /// for the stability probe).
    #[arg(long)]
    samples: Option<usize>,
    /// exp* decay constant.
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    /// Halton index offset (published sequence position).
    #[arg(long)]
    seed: Option<u64>,
    /// halton or grid.
    #[arg(long)]
    sampler: Option<String>,
    #[arg(long)]
    t_min: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    x_radius: Option<f64>,
    #[arg(long)]
    y_radius: Option<f64>,
    /// Radius R of the |x| < R restriction (LEMMA32A/B, LOCAL_UNIFORM).
    #[arg(long)]
    restrict_radius: Option<f64>,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Debug, Default, Args)]
struct SeminormArgs {
    /// poisson or holder.
    #[arg(long)]
    estimator: Option<String>,
    #[arg(long)]
    f: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    t_min: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    t_points: Option<usize>,
    #[arg(long)]
    x_radius: Option<f64>,
    #[arg(long)]
    x_points: Option<usize>,
    /// Disable golden-section refinement in t.
    #[arg(long)]
    refine: Option<bool>,
    /// Pair count for the Hölder estimator.
    #[arg(long)]
    pairs: Option<usize>,
    #[arg(long)]
    pair_radius: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the sweep trace CSV (t,x1[,x2,x3],objective) to this path.
    #[arg(long)]
    trace: Option<String>,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Debug, Default, Args)]
struct EquivalenceArgs {
    #[arg(long)]
    f: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    t_min: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    t_points: Option<usize>,
    #[arg(long)]
    x_radius: Option<f64>,
    #[arg(long)]
    x_points: Option<usize>,
    #[arg(long)]
    pairs: Option<usize>,
    #[arg(long)]
    pair_radius: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Debug, Default, Args)]
struct CatalogArgs {
    #[arg(long)]
    n: Option<usize>,
    /// Also run the nested-ball admissibility check per member.
    #[arg(long)]
    check: Option<bool>,
    /// Outer radius of the admissibility check.
    #[arg(long)]
    r_max: Option<f64>,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Debug, Serialize)]
struct ErrorObject<'a> {
    error: ErrorBody<'a>,
}

#[derive(Debug, Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: String,
}

fn fail(kind: &str, message: String, code: u8) -> ExitCode {
    let obj = ErrorObject {
        error: ErrorBody {
            kind,
            message,
        },
    };
    eprintln!("{}", serde_json::to_string(&obj).expect("error object serializes"));
    ExitCode::from(code)
}

fn fail_module(e: Error) -> ExitCode {
    match e {
        Error::InvalidParameter { .. }
        | Error::DimensionMismatch { .. }
        | Error::Inadmissible { .. }
        | Error::DegenerateSampler { .. } => fail("validation", e.to_string(), EXIT_VALIDATION),
        Error::ConvergenceFailure { .. }
        | Error::NearDiagonal { .. }
        | Error::TooManySkips { .. }
        | Error::MajorantViolation { .. }
        | Error::NonFinite { .. } => fail("numerical", e.to_string(), EXIT_NUMERICAL),
    }
}

fn emit(output: &Option<String>, content: &str) -> Result<(), String> {
    match output {
        None => {
            println!("{content}");
            Ok(())
        }
        Some(path) => std::fs::write(path, format!("{content}\n"))
            .map_err(|e| format!("cannot write {path}: {e}")),
    }
}

fn quad_spec(args: &QuadArgs, file: &FileConfig) -> Result<QuadratureSpec, Error> {
    let d = QuadratureSpec::default();
    QuadratureSpec::new(
        pick(&args.rel_tol, &file.rel_tol, d.rel_tol()),
        pick(&args.abs_tol, &file.abs_tol, d.abs_tol()),
        pick(&args.max_subdivisions, &file.max_subdivisions, d.max_subdivisions()),
        pick(&args.s_cut_low, &file.s_cut_low, d.s_cut_low()),
        pick(&args.s_cut_high, &file.s_cut_high, d.s_cut_high()),
    )
}

fn parse_point(coords: &Option<Vec<f64>>, file: &Option<Vec<f64>>, n: usize, what: &str) -> Result<Point, String> {
    let coords = pick_opt(coords, file).ok_or(format!("missing --{what}"))?;
    if coords.len() != n {
        return Err(format!("--{what} has {} coordinates, expected {n}", coords.len()));
    }
    Point::new(coords).map_err(|e| e.to_string())
}

/// 1-based CLI axis to 0-based index.
fn parse_axis(i: &Option<usize>, file: &Option<usize>, n: usize) -> Result<usize, String> {
    let i = pick(i, file, 1);
    if i < 1 || i > n {
        return Err(format!("--i must be in 1..={n}"));
    }
    Ok(i - 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Deriv {
    Value,
    Dt,
    Dx,
}

fn parse_deriv(s: &Option<String>, file: &Option<String>) -> Result<Deriv, String> {
    match pick(s, file, "value".to_string()).to_ascii_lowercase().as_str() {
        "value" => Ok(Deriv::Value),
        "dt" => Ok(Deriv::Dt),
        "dx" => Ok(Deriv::Dx),
        other => Err(format!("unknown --deriv {other}; expected value, dt or dx")),
    }
}

#[derive(Debug, Serialize)]
struct KernelReport {
    t: f64,
    x: Point,
    y: Point,
    deriv: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    i: Option<usize>,
    value: f64,
}

fn run_kernel(args: &KernelArgs, file: &FileConfig, output: &Option<String>) -> Result<ExitCode, ExitCode> {
    let q = quad_spec(&args.quad, file).map_err(fail_module)?;
    let n = pick(&args.n, &file.n, 1);
    let x = parse_point(&args.x, &file.x, n, "x")
        .map_err(|m| fail("validation", m, EXIT_VALIDATION))?;
    let y = parse_point(&args.y, &file.y, n, "y")
        .map_err(|m| fail("validation", m, EXIT_VALIDATION))?;
    let deriv = parse_deriv(&args.deriv, &file.deriv)
        .map_err(|m| fail("validation", m, EXIT_VALIDATION))?;
    let axis = if deriv == Deriv::Dx {
        Some(parse_axis(&args.i, &file.i, n).map_err(|m| fail("validation", m, EXIT_VALIDATION))?)
    } else {
        None
    };

    let eval_at = |t: f64| -> Result<f64, Error> {
        let kp = KernelPoint::new(t, x.clone(), y.clone())?;
        match deriv {
            Deriv::Value => poisson_kernel(&kp, &q),
            Deriv::Dt => poisson_kernel_dt(&kp, &q),
            Deriv::Dx => poisson_kernel_dx(axis.expect("axis resolved"), &kp, &q),
        }
    };

    let t_count = pick_opt(&args.t_count, &file.t_count);
    let content = match t_count {
        Some(count) if count > 1 => {
            // Log-spaced t sweep as CSV: t,x1..xn,y1..yn,value.
            let t_min = pick(&args.t_min, &file.t_min, 1e-2);
            let t_max = pick(&args.t_max, &file.t_max, 1e2);
            if !(t_min > 0.0 && t_min < t_max) {
                return Err(fail(
                    "validation",
                    "need 0 < t_min < t_max for a sweep".into(),
                    EXIT_VALIDATION,
                ));
            }
            let mut rows = Vec::with_capacity(count + 1);
            let mut header = String::from("t");
            for k in 1..=n {
                header.push_str(&format!(",x{k}"));
            }
            for k in 1..=n {
                header.push_str(&format!(",y{k}"));
            }
            header.push_str(",value");
            rows.push(header);
            for j in 0..count {
                let t = (t_min.ln() + (t_max.ln() - t_min.ln()) * j as f64 / (count - 1) as f64)
                    .exp();
                let v = eval_at(t).map_err(fail_module)?;
                let mut row = format!("{t}");
                for c in x.coords() {
                    row.push_str(&format!(",{c}"));
                }
                for c in y.coords() {
                    row.push_str(&format!(",{c}"));
                }
                row.push_str(&format!(",{v}"));
                rows.push(row);
            }
            rows.join("\n")
        }
        _ => {
            let t = pick(&args.t, &file.t, 1.0);
            let value = eval_at(t).map_err(fail_module)?;
            let format = pick(&args.format, &file.format, "json".to_string());
            match format.as_str() {
                "csv" => {
                    let mut header = String::from("t");
                    for k in 1..=n {
                        header.push_str(&format!(",x{k}"));
                    }
                    for k in 1..=n {
                        header.push_str(&format!(",y{k}"));
                    }
                    header.push_str(",value");
                    let mut row = format!("{t}");
                    for c in x.coords() {
                        row.push_str(&format!(",{c}"));
                    }
                    for c in y.coords() {
                        row.push_str(&format!(",{c}"));
                    }
                    row.push_str(&format!(",{value}"));
                    format!("{header}\n{row}")
                }
                "json" => {
                    let report = KernelReport {
                        t,
                        x: x.clone(),
                        y: y.clone(),
                        deriv: match deriv {
                            Deriv::Value => "value".into(),
                            Deriv::Dt => "dt".into(),
                            Deriv::Dx => "dx".into(),
                        },
                        i: axis.map(|a| a + 1),
                        value,
                    };
                    serde_json::to_string(&report).expect("report serializes")
                }
                other => {
                    return Err(fail(
                        "validation",
                        format!("unknown --format {other}"),
                        EXIT_VALIDATION,
                    ))
                }
            }
        }
    };
    emit(output, &content).map_err(|m| fail("validation", m, EXIT_VALIDATION))?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Debug, Serialize)]
struct TransformReport {
    f: String,
    t: f64,
    x: Point,
    deriv: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    i: Option<usize>,
    value: f64,
}

fn run_transform(
    args: &TransformArgs,
    file: &FileConfig,
    output: &Option<String>,
) -> Result<ExitCode, ExitCode> {
    let q = quad_spec(&args.quad, file).map_err(fail_module)?;
    let n = pick(&args.n, &file.n, 1);
    let spec = pick_opt(&args.f, &file.f)
        .ok_or_else(|| fail("validation", "missing --f".into(), EXIT_VALIDATION))?;
    let f = ScalarField::parse(&spec, n).map_err(fail_module)?;
    let t = pick(&args.t, &file.t, 1.0);
    let x = parse_point(&args.x, &file.x, n, "x")
        .map_err(|m| fail("validation", m, EXIT_VALIDATION))?;
    let deriv = parse_deriv(&args.deriv, &file.deriv)
        .map_err(|m| fail("validation", m, EXIT_VALIDATION))?;
    let (value, axis) = match deriv {
        Deriv::Value => (poisson_integral(&f, t, &x, &q).map_err(fail_module)?, None),
        Deriv::Dt => (poisson_integral_dt(&f, t, &x, &q).map_err(fail_module)?, None),
        Deriv::Dx => {
            let axis =
                parse_axis(&args.i, &file.i, n).map_err(|m| fail("validation", m, EXIT_VALIDATION))?;
            (
                poisson_integral_dx(&f, axis, t, &x, &q).map_err(fail_module)?,
                Some(axis),
            )
        }
    };
    let report = TransformReport {
        f: f.to_string(),
        t,
        x,
        deriv: match deriv {
            Deriv::Value => "value".into(),
            Deriv::Dt => "dt".into(),
            Deriv::Dx => "dx".into(),
        },
        i: axis.map(|a| a + 1),
        value,
    };
    let content = serde_json::to_string(&report).expect("report serializes");
    emit(output, &content).map_err(|m| fail("validation", m, EXIT_VALIDATION))?;
    Ok(ExitCode::SUCCESS)
}

fn run_certify(
    args: &CertifyArgs,
    file: &FileConfig,
    output: &Option<String>,
) -> Result<ExitCode, ExitCode> {
    let q = quad_spec(&args.quad, file).map_err(fail_module)?;
    let bound: BoundId = pick_opt(&args.bound, &file.bound)
        .ok_or_else(|| fail("validation", "missing --bound".into(), EXIT_VALIDATION))?
        .parse()
        .map_err(fail_module)?;
    let samples = pick(&args.samples, &file.samples, 1000);
    let cfg = ExpStarConfig::new(pick(&args.c, &file.c, ExpStarConfig::default().c()))
        .map_err(fail_module)?;
    let defaults = SamplerSpec::default();
    let mode = match pick(&args.sampler, &file.sampler, "halton".to_string()).as_str() {
        "halton" => SamplerMode::Halton {
            skip: pick(&args.seed, &file.seed, 0),
        },
        "grid" => SamplerMode::Grid,
        other => {
            return Err(fail(
                "validation",
                format!("unknown --sampler {other}; expected halton or grid"),
                EXIT_VALIDATION,
            ))
        }
    };
    let sampler = SamplerSpec {
        mode,
        dim: pick(&args.n, &file.n, 1),
        t_min: pick(&args.t_min, &file.t_min, defaults.t_min),
        t_max: pick(&args.t_max, &file.t_max, defaults.t_max),
        x_radius: pick(&args.x_radius, &file.x_radius, defaults.x_radius),
        y_radius: pick(&args.y_radius, &file.y_radius, defaults.y_radius),
        restrict_radius: pick(
            &args.restrict_radius,
            &file.restrict_radius,
            defaults.restrict_radius,
        ),
    };
    let cert = certify(bound, &sampler, samples, &cfg, &q).map_err(fail_module)?;
    emit(output, &cert.to_canonical_json()).map_err(|m| fail("validation", m, EXIT_VALIDATION))?;
    Ok(ExitCode::SUCCESS)
}

fn sweep_grid_from(
    t_min: f64,
    t_max: f64,
    t_points: usize,
    x_radius: f64,
    x_points: usize,
    refine: bool,
) -> SweepGrid {
    SweepGrid {
        t_min,
        t_max,
        t_points,
        x_box_radius: x_radius,
        x_points_per_axis: x_points,
        refine,
    }
}

fn run_seminorm(
    args: &SeminormArgs,
    file: &FileConfig,
    output: &Option<String>,
) -> Result<ExitCode, ExitCode> {
    let q = quad_spec(&args.quad, file).map_err(fail_module)?;
    let n = pick(&args.n, &file.n, 1);
    let spec = pick_opt(&args.f, &file.f)
        .ok_or_else(|| fail("validation", "missing --f".into(), EXIT_VALIDATION))?;
    let f = ScalarField::parse(&spec, n).map_err(fail_module)?;
    let alpha = pick(&args.alpha, &file.alpha, 0.5);
    let estimator = pick(&args.estimator, &file.estimator, "poisson".to_string());
    let content = match estimator.as_str() {
        "poisson" => {
            let grid = sweep_grid_from(
                pick(&args.t_min, &file.t_min, 1e-2),
                pick(&args.t_max, &file.t_max, 1e2),
                pick(&args.t_points, &file.t_points, 25),
                pick(&args.x_radius, &file.x_radius, 6.0),
                pick(&args.x_points, &file.x_points, 25),
                pick(&args.refine, &file.refine, true),
            );
            let (estimate, trace) =
                seminorm_poisson_trace(&f, alpha, &grid, &q).map_err(fail_module)?;
            if let Some(path) = pick_opt(&args.trace, &file.trace) {
                let mut rows = Vec::with_capacity(trace.len() + 1);
                let mut header = String::from("t");
                for k in 1..=n {
                    header.push_str(&format!(",x{k}"));
                }
                header.push_str(",objective");
                rows.push(header);
                for s in &trace {
                    let mut row = format!("{}", s.t);
                    for c in s.x.coords() {
                        row.push_str(&format!(",{c}"));
                    }
                    row.push_str(&format!(",{}", s.objective));
                    rows.push(row);
                }
                std::fs::write(&path, rows.join("\n") + "\n")
                    .map_err(|e| fail("validation", format!("cannot write {path}: {e}"), EXIT_VALIDATION))?;
            }
            serde_json::to_string(&estimate).expect("estimate serializes")
        }
        "holder" => {
            let sampler = PairSampler::new(
                pick(&args.pair_radius, &file.pair_radius, 6.0),
                pick(&args.seed, &file.seed, 0),
            )
            .map_err(fail_module)?;
            let pairs = pick(&args.pairs, &file.pairs, 1000);
            let estimate = seminorm_holder(&f, alpha, &sampler, pairs).map_err(fail_module)?;
            serde_json::to_string(&estimate).expect("estimate serializes")
        }
        other => {
            return Err(fail(
                "validation",
                format!("unknown --estimator {other}; expected poisson or holder"),
                EXIT_VALIDATION,
            ))
        }
    };
    emit(output, &content).map_err(|m| fail("validation", m, EXIT_VALIDATION))?;
    Ok(ExitCode::SUCCESS)
}

fn run_equivalence(
    args: &EquivalenceArgs,
    file: &FileConfig,
    output: &Option<String>,
) -> Result<ExitCode, ExitCode> {
    let q = quad_spec(&args.quad, file).map_err(fail_module)?;
    let n = pick(&args.n, &file.n, 1);
    let spec = pick_opt(&args.f, &file.f)
        .ok_or_else(|| fail("validation", "missing --f".into(), EXIT_VALIDATION))?;
    let f = ScalarField::parse(&spec, n).map_err(fail_module)?;
    let alpha = pick(&args.alpha, &file.alpha, 0.5);
    let grid = sweep_grid_from(
        pick(&args.t_min, &file.t_min, 1e-2),
        pick(&args.t_max, &file.t_max, 1e2),
        pick(&args.t_points, &file.t_points, 13),
        pick(&args.x_radius, &file.x_radius, 6.0),
        pick(&args.x_points, &file.x_points, 13),
        true,
    );
    let sampler = PairSampler::new(
        pick(&args.pair_radius, &file.pair_radius, 6.0),
        pick(&args.seed, &file.seed, 0),
    )
    .map_err(fail_module)?;
    let pairs = pick(&args.pairs, &file.pairs, 600);
    let report = equivalence_report(&f, alpha, &grid, &sampler, pairs, &q).map_err(fail_module)?;
    let content = serde_json::to_string(&report).expect("report serializes");
    emit(output, &content).map_err(|m| fail("validation", m, EXIT_VALIDATION))?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Debug, Serialize)]
struct CatalogEntry {
    field: String,
    admissible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<ougauss_core::AdmissibilityReport>,
}

fn run_catalog(
    args: &CatalogArgs,
    file: &FileConfig,
    output: &Option<String>,
) -> Result<ExitCode, ExitCode> {
    let q = quad_spec(&args.quad, file).map_err(fail_module)?;
    let n = pick(&args.n, &file.n, 1);
    let check = pick(&args.check, &file.check, false);
    let r_max = pick(&args.r_max, &file.r_max, 12.0);
    let members = [
        "CONST:1", "COORD:1", "HERMITE2:1", "LOG_ALPHA:0.5", "SINE:1", "EXP_GAUSS:0.5",
        "EXP_GAUSS:1", "ABS_ALPHA:0.5",
    ];
    let mut entries = Vec::with_capacity(members.len());
    for member in members {
        let f = ScalarField::parse(member, n).map_err(fail_module)?;
        let report = if check {
            Some(admissibility(&f, &q, r_max).map_err(fail_module)?)
        } else {
            None
        };
        entries.push(CatalogEntry {
            field: f.to_string(),
            admissible: f.admissible(),
            report,
        });
    }
    let content = serde_json::to_string(&entries).expect("catalog serializes");
    emit(output, &content).map_err(|m| fail("validation", m, EXIT_VALIDATION))?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let file = match &cli.config {
        Some(path) => match FileConfig::load(path) {
            Ok(cfg) => cfg,
            Err(msg) => return fail("validation", msg, EXIT_VALIDATION),
        },
        None => FileConfig::default(),
    };

    let threads = cli
        .threads
        .or_else(|| {
            std::env::var("OUGAUSS_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .or(file.threads);
    if let Some(count) = threads {
        if count == 0 {
            return fail("validation", "--threads must be positive".into(), EXIT_VALIDATION);
        }
        // Ignore the error when a pool already exists (tests).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(count)
            .build_global();
    }

    let output = cli.output.clone().or_else(|| file.output.clone());

    let command = match cli.command {
        Some(c) => c,
        None => match file.command.as_deref() {
            Some("kernel") => Command::Kernel(KernelArgs::default()),
            Some("transform") => Command::Transform(TransformArgs::default()),
            Some("certify") => Command::Certify(CertifyArgs::default()),
            Some("seminorm") => Command::Seminorm(SeminormArgs::default()),
            Some("equivalence") => Command::Equivalence(EquivalenceArgs::default()),
            Some("catalog") => Command::Catalog(CatalogArgs::default()),
            Some(other) => {
                return fail(
                    "validation",
                    format!("unknown command {other} in config"),
                    EXIT_VALIDATION,
                )
            }
            None => {
                return fail(
                    "validation",
                    "no command given on the command line or in the config".into(),
                    EXIT_VALIDATION,
                )
            }
        },
    };

    let result = match &command {
        Command::Kernel(args) => run_kernel(args, &file, &output),
        Command::Transform(args) => run_transform(args, &file, &output),
        Command::Certify(args) => run_certify(args, &file, &output),
        Command::Seminorm(args) => run_seminorm(args, &file, &output),
        Command::Equivalence(args) => run_equivalence(args, &file, &output),
        Command::Catalog(args) => run_catalog(args, &file, &output),
    };
    match result {
        Ok(code) => code,
        Err(code) => code,
    }
}
