//! Command-line front end for the loop-space optimization toolkit.
//!
//! Six subcommands: two canned descent experiments (`exp1`, `exp2`), the
//! explicit length-descent flow (`flow`), the shrinking-loops gradient
//! diagnostic (`seqdiag`), the finite-dimensional Christoffel growth scan
//! (`spray`), and critical-point classification of a stored curve
//! (`classify`).  Every command writes its artifacts atomically into an
//! output directory and is byte-for-byte deterministic for a fixed
//! configuration.
//!
//! Exit codes: 0 success; 2 validation error; 3 admissibility failure
//! where leaving the admissible set is not the expected outcome; 4 I/O
//! error.

mod svg;

use clap::{Args, Parser, Subcommand, ValueEnum};
use loopopt::io;
use loopopt::optimizer::{rgd, DescentTrace, StepRule};
use loopopt::{Error as LibError, LoopCurve, MetricKind, Objective};
use nalgebra::Vector2;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

// ---------------------------------------------------------------------------
// Errors and exit codes
// ---------------------------------------------------------------------------

enum CliError {
    /// Bad flags or malformed input files → exit 2.
    Validation(String),
    /// The run left the admissible set unexpectedly → exit 3.
    Admissibility(String),
    /// Filesystem trouble → exit 4.
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Admissibility(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Admissibility(m) | CliError::Io(m) => m,
        }
    }
}

/// Library errors that mean "the iteration degenerated" map to exit 3;
/// everything else is a configuration problem (exit 2).
fn lib_err(e: LibError) -> CliError {
    match e {
        LibError::NotImmersion
        | LibError::LeftAdmissibleSet
        | LibError::NoAdmissibleStep
        | LibError::NonFiniteValue
        | LibError::GramNotSpd
        | LibError::NotUniformSpeed(_)
        | LibError::ElasticIncompatible(_)
        | LibError::FdStencilNotImmersed(_) => CliError::Admissibility(e.to_string()),
        other => CliError::Validation(other.to_string()),
    }
}

fn io_err(what: &str) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{what}: {e}"))
}

type CliResult<T> = Result<T, CliError>;

// ---------------------------------------------------------------------------
// Argument surface
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "loopopt",
    version,
    about = "Optimization and diagnostics on discretized spaces of closed plane curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Constant-step descent toward the unit circle under the flat metric
    Exp1(Exp1Args),
    /// Regularized tracking of a target loop, with computed minimizer
    Exp2(Exp2Args),
    /// Explicit length-descent flow (curve shortening and its smoothed variants)
    Flow(FlowArgs),
    /// Shrinking-loops sequence whose gradients alternate without converging
    Seqdiag(SeqdiagArgs),
    /// Christoffel growth scan for the twisted sequence-space metric
    Spray(SprayArgs),
    /// Critical-point classification of a curve
    Classify(ClassifyArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Args)]
struct OutOpts {
    /// Output directory ($LOOPOPT_OUTPUT_DIR, then ".", when omitted)
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Comma-separated artifact kinds to emit
    #[arg(long, value_enum, value_delimiter = ',',
          default_values_t = [Format::Csv, Format::Json, Format::Svg])]
    format: Vec<Format>,
}

fn parse_metric(s: &str) -> Result<MetricKind, String> {
    MetricKind::parse(s).map_err(|e| e.to_string())
}

#[derive(Copy, Clone, ValueEnum)]
enum ObjectiveTag {
    Length,
    TrackId,
    TrackReg,
    Energy,
}

#[derive(Copy, Clone, ValueEnum)]
enum Shape {
    Circle,
    Ellipse,
}

#[derive(Args)]
struct Exp1Args {
    /// Grid size N
    #[arg(long, default_value_t = 256)]
    n_samples: usize,
    /// Number of descent steps
    #[arg(long, default_value_t = 20)]
    steps: usize,
    /// Constant step size
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    #[command(flatten)]
    out: OutOpts,
}

#[derive(Args)]
struct Exp2Args {
    /// Grid size N (taken from --target-file when present)
    #[arg(long)]
    n_samples: Option<usize>,
    #[arg(long, default_value_t = 20)]
    steps: usize,
    #[arg(long, default_value_t = 0.04)]
    alpha: f64,
    /// Tikhonov weight λ in ‖c − g‖² + λ‖c‖²
    #[arg(long, default_value_t = 0.7)]
    lambda: f64,
    /// Curve file (.json or .csv) for the target g; default g(θ) = (cos θ, 3/2 sin θ)
    #[arg(long)]
    target_file: Option<PathBuf>,
    #[command(flatten)]
    out: OutOpts,
}

#[derive(Args)]
struct FlowArgs {
    /// Initial curve
    #[arg(long, value_enum, default_value_t = Shape::Circle)]
    shape: Shape,
    #[arg(long, default_value_t = 16)]
    n_samples: usize,
    #[arg(long, default_value_t = 2000)]
    steps: usize,
    #[arg(long, default_value_t = 1e-3)]
    alpha: f64,
    /// Metric driving the gradient flow
    #[arg(long, value_parser = parse_metric, default_value = "inv-l2")]
    metric: MetricKind,
    #[command(flatten)]
    out: OutOpts,
}

#[derive(Args)]
struct SeqdiagArgs {
    /// Largest sequence index k
    #[arg(long, default_value_t = 50)]
    kmax: usize,
    #[arg(long, default_value_t = 64)]
    n_samples: usize,
    #[command(flatten)]
    out: OutOpts,
}

#[derive(Args)]
struct SprayArgs {
    /// Comma-separated truncation dimensions
    #[arg(long, value_delimiter = ',', default_values_t = [4usize, 8, 16, 32])]
    dims: Vec<usize>,
    #[command(flatten)]
    out: OutOpts,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Curve file (.json or .csv) to classify; defaults to the known
    /// minimizer for track-id / track-reg
    #[arg(long)]
    curve_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ObjectiveTag::TrackReg)]
    objective: ObjectiveTag,
    #[arg(long, value_parser = parse_metric, default_value = "flat-l2")]
    metric: MetricKind,
    #[arg(long, default_value_t = 0.7)]
    lambda: f64,
    /// Target curve for track-reg; default g(θ) = (cos θ, 3/2 sin θ)
    #[arg(long)]
    target_file: Option<PathBuf>,
    /// Grid size when no curve file fixes it
    #[arg(long, default_value_t = 256)]
    n_samples: usize,
    /// Random Hessian probe directions (the full Fourier basis is always added)
    #[arg(long, default_value_t = 16)]
    probes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutOpts,
}

// ---------------------------------------------------------------------------
// Output plumbing
// ---------------------------------------------------------------------------

struct Out {
    dir: PathBuf,
    formats: Vec<Format>,
}

impl Out {
    fn new(opts: &OutOpts) -> CliResult<Out> {
        let dir = opts
            .output_dir
            .clone()
            .or_else(|| std::env::var_os("LOOPOPT_OUTPUT_DIR").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));
        std::fs::create_dir_all(&dir)
            .map_err(io_err(&format!("creating {}", dir.display())))?;
        Ok(Out {
            dir,
            formats: opts.format.clone(),
        })
    }

    fn want(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    fn write(&self, name: &str, contents: &str) -> CliResult<()> {
        io::write_atomic(&self.dir.join(name), contents).map_err(io_err(name))
    }

    /// Emit `figure.svg` plus the colocated `figure.csv` holding exactly
    /// the plotted series.
    fn figure(&self, panels: &[svg::Panel]) -> CliResult<()> {
        if !self.want(Format::Svg) {
            return Ok(());
        }
        self.write("figure.svg", &svg::render(panels))?;
        self.write("figure.csv", &figure_csv(panels))
    }
}

fn figure_csv(panels: &[svg::Panel]) -> String {
    let mut s = String::from("panel,series,x,y\n");
    for (pi, p) in panels.iter().enumerate() {
        for series in &p.series {
            for &(x, y) in &series.points {
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    pi,
                    series.name,
                    io::fmt_f64(x),
                    io::fmt_f64(y)
                );
            }
        }
    }
    s
}

fn validate_alpha(alpha: f64) -> CliResult<()> {
    if !(alpha > 0.0) {
        return Err(CliError::Validation("step size must be positive".into()));
    }
    Ok(())
}

fn load_curve(path: &Path) -> CliResult<LoopCurve> {
    let text = std::fs::read_to_string(path).map_err(io_err(&path.display().to_string()))?;
    let parsed = if path.extension().is_some_and(|e| e == "csv") {
        io::curve_from_csv(&text)
    } else {
        io::curve_from_json(&text)
    };
    parsed.map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

/// Initial curve of both experiments: θ ↦ (cos³θ, cos θ + sin θ).
fn experiment_start(n: usize) -> CliResult<LoopCurve> {
    LoopCurve::from_fn(n, |t| Vector2::new(t.cos().powi(3), t.cos() + t.sin())).map_err(lib_err)
}

/// Default tracking target g(θ) = (cos θ, 3/2 sin θ).
fn default_target(n: usize) -> CliResult<LoopCurve> {
    LoopCurve::from_fn(n, |t| Vector2::new(t.cos(), 1.5 * t.sin())).map_err(lib_err)
}

fn snapshots_json(iterates: &[(usize, LoopCurve)]) -> String {
    let mut s = String::from("{\"snapshots\": [");
    for (i, (k, c)) in iterates.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        let _ = write!(s, "{{\"iter\": {}, \"curve\": {}}}", k, io::curve_to_json(c));
    }
    s.push_str("]}");
    s
}

/// Closed polyline of a curve for plotting (repeats the first point).
fn curve_series(name: &str, c: &LoopCurve) -> svg::Series {
    let mut points: Vec<(f64, f64)> = c.points().iter().map(|p| (p.x, p.y)).collect();
    points.push(points[0]);
    svg::Series {
        name: name.to_string(),
        points,
    }
}

/// Overlay of iterate snapshots at indices {0, 5, 10, 20} (clamped to the
/// run) plus any extra reference curves.
fn iterate_panel(trace: &DescentTrace, extras: &[(&str, &LoopCurve)]) -> svg::Panel {
    let last = trace.iterates.last().map(|(k, _)| *k).unwrap_or(0);
    let mut picks: Vec<usize> = [0usize, 5, 10, 20]
        .iter()
        .copied()
        .filter(|k| *k < last)
        .collect();
    picks.push(last);
    let mut series = Vec::new();
    for (k, c) in trace.iterates.iter() {
        if picks.contains(k) {
            series.push(curve_series(&format!("iter {k}"), c));
        }
    }
    for (name, c) in extras {
        series.push(curve_series(name, c));
    }
    svg::Panel {
        title: "iterates".into(),
        x_label: "x".into(),
        y_label: "y".into(),
        log_y: false,
        equal_aspect: true,
        series,
    }
}

/// Decay panel from a descent trace: one series per named column.
fn decay_panel(trace: &DescentTrace, f_shift: f64, f_name: &str) -> svg::Panel {
    let f_pts = trace
        .records
        .iter()
        .enumerate()
        .map(|(k, r)| (k as f64, r.f_value - f_shift))
        .collect();
    let g_pts = trace
        .records
        .iter()
        .enumerate()
        .map(|(k, r)| (k as f64, r.grad_norm))
        .collect();
    svg::Panel {
        title: "descent".into(),
        x_label: "iteration".into(),
        y_label: "value (log)".into(),
        log_y: true,
        equal_aspect: false,
        series: vec![
            svg::Series {
                name: f_name.to_string(),
                points: f_pts,
            },
            svg::Series {
                name: "grad norm".into(),
                points: g_pts,
            },
        ],
    }
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

fn run_exp1(args: &Exp1Args) -> CliResult<()> {
    validate_alpha(args.alpha)?;
    let out = Out::new(&args.out)?;
    let c0 = experiment_start(args.n_samples)?;
    let trace = rgd(
        &Objective::TrackIdentity,
        MetricKind::FlatL2,
        &c0,
        &StepRule::Constant { alpha: args.alpha },
        args.steps,
        None,
    )
    .map_err(lib_err)?;
    if out.want(Format::Csv) {
        out.write("trace.csv", &io::trace_to_csv(&trace))?;
    }
    if out.want(Format::Json) {
        out.write("iterates.json", &snapshots_json(&trace.iterates))?;
    }
    let target = LoopCurve::identity(args.n_samples).map_err(lib_err)?;
    out.figure(&[
        iterate_panel(&trace, &[("target", &target)]),
        decay_panel(&trace, 0.0, "f"),
    ])?;
    let first = trace.records.first().expect("nonempty trace");
    let final_rec = trace.records.last().expect("nonempty trace");
    println!(
        "exp1: N={} steps={} alpha={}  f {:.6e} -> {:.6e}  grad {:.6e} -> {:.6e}  [{}]",
        args.n_samples,
        trace.steps(),
        args.alpha,
        first.f_value,
        final_rec.f_value,
        first.grad_norm,
        final_rec.grad_norm,
        out.dir.display()
    );
    Ok(())
}

fn run_exp2(args: &Exp2Args) -> CliResult<()> {
    validate_alpha(args.alpha)?;
    let out = Out::new(&args.out)?;
    let target = match &args.target_file {
        Some(path) => {
            let t = load_curve(path)?;
            if let Some(n) = args.n_samples {
                if n != t.n() {
                    return Err(CliError::Validation(format!(
                        "--n-samples {} conflicts with target curve N={}",
                        n,
                        t.n()
                    )));
                }
            }
            t
        }
        None => default_target(args.n_samples.unwrap_or(256))?,
    };
    let n = target.n();
    let objective =
        Objective::track_regularized(target.clone(), args.lambda).map_err(lib_err)?;
    let c0 = experiment_start(n)?;
    let trace = rgd(
        &objective,
        MetricKind::FlatL2,
        &c0,
        &StepRule::Constant { alpha: args.alpha },
        args.steps,
        None,
    )
    .map_err(lib_err)?;
    let minimizer = target.scaled(1.0 / (1.0 + args.lambda)).map_err(lib_err)?;
    let f_min = objective
        .lower_bound()
        .expect("regularized tracking has a closed-form minimum");
    if out.want(Format::Csv) {
        out.write("trace.csv", &io::trace_to_csv(&trace))?;
    }
    if out.want(Format::Json) {
        out.write("iterates.json", &snapshots_json(&trace.iterates))?;
        let mut m = String::from("{");
        let _ = write!(
            m,
            "\"lambda\": {}, \"f_min\": {}, \"curve\": {}",
            io::fmt_f64(args.lambda),
            io::fmt_f64(f_min),
            io::curve_to_json(&minimizer)
        );
        m.push('}');
        out.write("minimizer.json", &m)?;
    }
    out.figure(&[
        iterate_panel(&trace, &[("target", &target), ("minimizer", &minimizer)]),
        decay_panel(&trace, f_min, "f - f*"),
    ])?;
    let dist = loopopt::metrics::norm(
        MetricKind::FlatL2,
        trace.final_curve(),
        &trace.final_curve().sub(&minimizer).map_err(lib_err)?,
    )
    .map_err(lib_err)?;
    let final_rec = trace.records.last().expect("nonempty trace");
    println!(
        "exp2: N={n} steps={} alpha={} lambda={}  f {:.6e} (f* {:.6e})  |c - c*| {:.6e}  [{}]",
        trace.steps(),
        args.alpha,
        args.lambda,
        final_rec.f_value,
        f_min,
        dist,
        out.dir.display()
    );
    Ok(())
}

struct FlowRow {
    iter: usize,
    length: f64,
    grad_norm: f64,
    min_speed: f64,
}

fn min_speed(c: &LoopCurve) -> f64 {
    c.speed().into_iter().fold(f64::INFINITY, f64::min)
}

/// Root-mean-square distance to the centroid: the radius for circles.
fn rms_radius(c: &LoopCurve) -> f64 {
    let n = c.n() as f64;
    let centroid = c.points().iter().sum::<Vector2<f64>>() / n;
    (c.points()
        .iter()
        .map(|p| (p - centroid).norm_squared())
        .sum::<f64>()
        / n)
        .sqrt()
}

/// Area by the shoelace integral ½∮(x y′ − y x′) dθ with the spectral
/// derivative.
fn shoelace_area(c: &LoopCurve) -> f64 {
    let d = c.derivative();
    let n = c.n();
    let mut acc = 0.0;
    for j in 0..n {
        let p = c.point(j);
        let v = d.get(j);
        acc += p.x * v.y - p.y * v.x;
    }
    0.5 * acc * std::f64::consts::TAU / n as f64
}

/// Per-step radius decrement of the exact circle solution, when the
/// metric admits one in closed form.
fn circle_decrement(metric: MetricKind, r: f64) -> Option<f64> {
    match metric {
        MetricKind::FlatL2 => Some(1.0),
        MetricKind::InvariantL2 => Some(1.0 / r),
        MetricKind::InvariantH1 => Some(r / (1.0 + r * r)),
        MetricKind::ElasticSrvt => None,
    }
}

/// Closed-form radius r(t) at t = kα, when available.
fn circle_closed_form(metric: MetricKind, r0: f64, t: f64) -> Option<f64> {
    match metric {
        MetricKind::FlatL2 => Some(r0 - t).filter(|r| *r > 0.0),
        MetricKind::InvariantL2 => {
            let s = r0 * r0 - 2.0 * t;
            (s > 0.0).then(|| s.sqrt())
        }
        _ => None,
    }
}

fn run_flow(args: &FlowArgs) -> CliResult<()> {
    validate_alpha(args.alpha)?;
    let out = Out::new(&args.out)?;
    let start = match args.shape {
        Shape::Circle => {
            LoopCurve::circle(Vector2::zeros(), 1.0, args.n_samples).map_err(lib_err)?
        }
        Shape::Ellipse => LoopCurve::ellipse(1.5, 0.75, args.n_samples).map_err(lib_err)?,
    };
    let objective = Objective::Length;
    let speed_floor = 1e-9 * start.linf_norm().max(1.0);
    let r0 = rms_radius(&start);
    let stride = (args.steps.max(1) + 999) / 1000;

    let mut rows: Vec<FlowRow> = Vec::new();
    let mut frames: Vec<(usize, LoopCurve)> = Vec::new();
    let mut radii: Vec<(usize, f64)> = Vec::new();
    let mut isoper: Vec<(usize, f64, f64, f64)> = Vec::new();
    let mut collapsed_at: Option<usize> = None;
    let mut c = start.clone();
    let mut f = objective.value(&c).map_err(lib_err)?;

    let record = |k: usize,
                      curve: &LoopCurve,
                      f: f64,
                      gn: f64,
                      rows: &mut Vec<FlowRow>,
                      frames: &mut Vec<(usize, LoopCurve)>,
                      radii: &mut Vec<(usize, f64)>,
                      isoper: &mut Vec<(usize, f64, f64, f64)>| {
        rows.push(FlowRow {
            iter: k,
            length: f,
            grad_norm: gn,
            min_speed: min_speed(curve),
        });
        if k % stride == 0 {
            frames.push((k, curve.clone()));
        }
        match args.shape {
            Shape::Circle => radii.push((k, rms_radius(curve))),
            Shape::Ellipse => {
                let area = shoelace_area(curve);
                let ratio = f * f / (4.0 * std::f64::consts::PI * area);
                isoper.push((k, f, area, ratio));
            }
        }
    };

    for k in 0..args.steps {
        let grad = match objective.gradient(args.metric, &c) {
            Ok(g) => g,
            Err(e) => match lib_err(e) {
                // Losing immersion is how the flow is expected to end.
                CliError::Admissibility(_) => {
                    collapsed_at = Some(k);
                    break;
                }
                other => return Err(other),
            },
        };
        let gn = loopopt::metrics::norm(args.metric, &c, &grad).map_err(lib_err)?;
        record(
            k, &c, f, gn, &mut rows, &mut frames, &mut radii, &mut isoper,
        );
        let candidate = c.axpy(-args.alpha, &grad).map_err(lib_err)?;
        let f_next = match objective.value(&candidate) {
            Ok(v) if v.is_finite() => v,
            _ => {
                collapsed_at = Some(k);
                break;
            }
        };
        if f_next > f || min_speed(&candidate) < speed_floor {
            collapsed_at = Some(k);
            break;
        }
        c = candidate;
        f = f_next;
    }
    if collapsed_at.is_none() {
        // Terminal record after the last completed step.
        let gn = objective
            .gradient(args.metric, &c)
            .and_then(|g| loopopt::metrics::norm(args.metric, &c, &g))
            .unwrap_or(f64::NAN);
        record(
            args.steps,
            &c,
            f,
            gn,
            &mut rows,
            &mut frames,
            &mut radii,
            &mut isoper,
        );
    }
    if frames.last().map(|(k, _)| *k) != Some(rows.last().map(|r| r.iter).unwrap_or(0)) {
        if let Some(last) = rows.last() {
            frames.push((last.iter, c.clone()));
        }
    }

    if out.want(Format::Csv) {
        let mut s = String::from("iter,length,grad_norm,min_speed\n");
        for r in &rows {
            let _ = writeln!(
                s,
                "{},{},{},{}",
                r.iter,
                io::fmt_f64(r.length),
                io::fmt_f64(r.grad_norm),
                io::fmt_f64(r.min_speed)
            );
        }
        out.write("trace.csv", &s)?;
        match args.shape {
            Shape::Circle => {
                let mut s = String::from("iter,radius,euler_oracle,closed_form\n");
                let mut euler = r0;
                for (k, r) in &radii {
                    let oracle = circle_decrement(args.metric, euler).map(|_| euler);
                    let closed = circle_closed_form(args.metric, r0, *k as f64 * args.alpha);
                    let _ = writeln!(
                        s,
                        "{},{},{},{}",
                        k,
                        io::fmt_f64(*r),
                        oracle.map(io::fmt_f64).unwrap_or_default(),
                        closed.map(io::fmt_f64).unwrap_or_default()
                    );
                    if let Some(dec) = circle_decrement(args.metric, euler) {
                        euler -= args.alpha * dec;
                    }
                }
                out.write("radius.csv", &s)?;
            }
            Shape::Ellipse => {
                let mut s = String::from("iter,length,area,ratio\n");
                for (k, l, a, q) in &isoper {
                    let _ = writeln!(
                        s,
                        "{},{},{},{}",
                        k,
                        io::fmt_f64(*l),
                        io::fmt_f64(*a),
                        io::fmt_f64(*q)
                    );
                }
                out.write("isoper.csv", &s)?;
            }
        }
    }
    if out.want(Format::Json) {
        out.write("frames.json", &snapshots_json(&frames))?;
    }

    // Figure: overlay of up to six frames, plus the tracked scalar.
    let mut overlay = Vec::new();
    let pick_stride = (frames.len().max(1) + 5) / 6;
    for (i, (k, frame)) in frames.iter().enumerate() {
        if i % pick_stride == 0 || i + 1 == frames.len() {
            overlay.push(curve_series(&format!("iter {k}"), frame));
        }
    }
    let scalar_panel = match args.shape {
        Shape::Circle => {
            let mut series = vec![svg::Series {
                name: "radius".into(),
                points: radii.iter().map(|(k, r)| (*k as f64, *r)).collect(),
            }];
            let closed: Vec<(f64, f64)> = radii
                .iter()
                .filter_map(|(k, _)| {
                    circle_closed_form(args.metric, r0, *k as f64 * args.alpha)
                        .map(|r| (*k as f64, r))
                })
                .collect();
            if !closed.is_empty() {
                series.push(svg::Series {
                    name: "closed form".into(),
                    points: closed,
                });
            }
            svg::Panel {
                title: "radius".into(),
                x_label: "iteration".into(),
                y_label: "radius".into(),
                log_y: false,
                equal_aspect: false,
                series,
            }
        }
        Shape::Ellipse => svg::Panel {
            title: "isoperimetric ratio".into(),
            x_label: "iteration".into(),
            y_label: "L^2 / 4 pi A".into(),
            log_y: false,
            equal_aspect: false,
            series: vec![svg::Series {
                name: "ratio".into(),
                points: isoper.iter().map(|(k, _, _, q)| (*k as f64, *q)).collect(),
            }],
        },
    };
    out.figure(&[
        svg::Panel {
            title: "flow".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            log_y: false,
            equal_aspect: true,
            series: overlay,
        },
        scalar_panel,
    ])?;

    match collapsed_at {
        Some(k) => println!(
            "flow: collapsed at iteration {k} (metric {}, alpha {})  [{}]",
            args.metric.name(),
            args.alpha,
            out.dir.display()
        ),
        None => println!(
            "flow: completed {} steps (metric {}, length {:.6e})  [{}]",
            args.steps,
            args.metric.name(),
            f,
            out.dir.display()
        ),
    }
    Ok(())
}

fn run_seqdiag(args: &SeqdiagArgs) -> CliResult<()> {
    let out = Out::new(&args.out)?;
    let rep = loopopt::diagnostics::oscillating_sequence(args.kmax, args.n_samples)
        .map_err(lib_err)?;
    if out.want(Format::Csv) {
        out.write("seq.csv", &io::sequence_to_csv(&rep))?;
    }
    if out.want(Format::Json) {
        let mut s = String::from("{\"ks\": [");
        for (i, k) in rep.ks.iter().enumerate() {
            if i > 0 {
                s.push_str(", ");
            }
            let _ = write!(s, "{k}");
        }
        s.push_str("], \"curve_norms\": [");
        for (i, v) in rep.curve_norms.iter().enumerate() {
            if i > 0 {
                s.push_str(", ");
            }
            s.push_str(&io::fmt_f64(*v));
        }
        s.push_str("], \"gradient_gaps\": [");
        for (i, v) in rep.gradient_gaps.iter().enumerate() {
            if i > 0 {
                s.push_str(", ");
            }
            s.push_str(&io::fmt_f64(*v));
        }
        s.push_str("]}");
        out.write("seq.json", &s)?;
    }
    out.figure(&[svg::Panel {
        title: "shrinking loops".into(),
        x_label: "k".into(),
        y_label: "value (log)".into(),
        log_y: true,
        equal_aspect: false,
        series: vec![
            svg::Series {
                name: "curve norm".into(),
                points: rep
                    .ks
                    .iter()
                    .zip(&rep.curve_norms)
                    .map(|(k, v)| (*k as f64, *v))
                    .collect(),
            },
            svg::Series {
                name: "gradient gap".into(),
                points: rep
                    .ks
                    .iter()
                    .zip(&rep.gradient_gaps)
                    .map(|(k, v)| (*k as f64, *v))
                    .collect(),
            },
        ],
    }])?;
    let expect = 2.0 * std::f64::consts::TAU.sqrt();
    let max_dev = rep
        .gradient_gaps
        .iter()
        .map(|g| (g - expect).abs())
        .fold(0.0, f64::max);
    println!(
        "seqdiag: k = 1..{}  curve norms -> {:.6e}, gradient gaps 2*sqrt(2*pi) within {:.3e}  [{}]",
        args.kmax,
        rep.curve_norms.last().copied().unwrap_or(f64::NAN),
        max_dev,
        out.dir.display()
    );
    Ok(())
}

fn run_spray(args: &SprayArgs) -> CliResult<()> {
    let out = Out::new(&args.out)?;
    let rep = loopopt::finitedim::christoffel_growth(&args.dims).map_err(lib_err)?;
    if out.want(Format::Csv) {
        out.write("spray.csv", &io::growth_to_csv(&rep))?;
    }
    if out.want(Format::Json) {
        out.write("spray.json", &io::growth_to_json(&rep))?;
    }
    out.figure(&[svg::Panel {
        title: "Christoffel growth".into(),
        x_label: "dimension".into(),
        y_label: "max |Gamma| (log)".into(),
        log_y: true,
        equal_aspect: false,
        series: vec![svg::Series {
            name: "max gamma".into(),
            points: rep
                .dims
                .iter()
                .zip(&rep.max_gamma)
                .map(|(d, g)| (*d as f64, *g))
                .collect(),
        }],
    }])?;
    let increasing = rep.max_gamma.windows(2).all(|w| w[1] > w[0]);
    let pairs: Vec<String> = rep
        .dims
        .iter()
        .zip(&rep.max_gamma)
        .map(|(d, g)| format!("{d} -> {g:.4e}"))
        .collect();
    println!(
        "spray: max |Gamma| {}  strictly increasing: {}  [{}]",
        pairs.join(", "),
        increasing,
        out.dir.display()
    );
    Ok(())
}

fn run_classify(args: &ClassifyArgs) -> CliResult<()> {
    let out = Out::new(&args.out)?;
    let target = match &args.target_file {
        Some(p) => Some(load_curve(p)?),
        None => None,
    };
    let curve = match &args.curve_file {
        Some(p) => load_curve(p)?,
        None => match args.objective {
            ObjectiveTag::TrackId => LoopCurve::identity(args.n_samples).map_err(lib_err)?,
            ObjectiveTag::TrackReg => {
                let g = match &target {
                    Some(t) => t.clone(),
                    None => default_target(args.n_samples)?,
                };
                g.scaled(1.0 / (1.0 + args.lambda)).map_err(lib_err)?
            }
            _ => {
                return Err(CliError::Validation(
                    "--curve-file is required for this objective".into(),
                ))
            }
        },
    };
    let objective = match args.objective {
        ObjectiveTag::Length => Objective::Length,
        ObjectiveTag::TrackId => Objective::TrackIdentity,
        ObjectiveTag::Energy => Objective::LoopEnergy,
        ObjectiveTag::TrackReg => {
            let g = match target {
                Some(t) => {
                    if t.n() != curve.n() {
                        return Err(CliError::Validation(format!(
                            "target curve N={} conflicts with curve N={}",
                            t.n(),
                            curve.n()
                        )));
                    }
                    t
                }
                None => default_target(curve.n())?,
            };
            Objective::track_regularized(g, args.lambda).map_err(lib_err)?
        }
    };
    let cls = loopopt::secondorder::classify_point(
        &objective,
        args.metric,
        &curve,
        None,
        args.probes,
        args.seed,
    )
    .map_err(lib_err)?;
    if out.want(Format::Json) {
        out.write("classify.json", &io::classification_to_json(&cls))?;
    }
    let mu = cls
        .mu_hat
        .map(|m| format!("{m:.8e}"))
        .unwrap_or_else(|| "n/a".into());
    println!(
        "classify: {} (objective {}, metric {})  grad_norm {:.3e}  mu_hat {}  probes {}  [{}]",
        cls.class.name(),
        objective.name(),
        args.metric.name(),
        cls.grad_norm,
        mu,
        cls.probes,
        out.dir.display()
    );
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match &cli.command {
        Cmd::Exp1(a) => run_exp1(a),
        Cmd::Exp2(a) => run_exp2(a),
        Cmd::Flow(a) => run_flow(a),
        Cmd::Seqdiag(a) => run_seqdiag(a),
        Cmd::Spray(a) => run_spray(a),
        Cmd::Classify(a) => run_classify(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
