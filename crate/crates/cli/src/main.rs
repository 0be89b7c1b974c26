//! Command-line driver for node generation, the static and Stokeslet
//! experiments, and time-dependent simulations.

use std::f64::consts::{PI, TAU};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rbfstokes::curve::GeometryOperators;
use rbfstokes::experiments::*;
use rbfstokes::forces::{prescribed_tangential, write_forces_csv, ForceOperators};
use rbfstokes::stokeslets::{evaluate_field, grid, singular_field, BlobModel, ForceSample};
use rbfstokes::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "rbfstokes", version, about = "Meshfree curve interpolation and regularized Stokeslet experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print one node per line.
    Nodes {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        n: usize,
        /// Interval as `a,b`.
        #[arg(long, allow_hyphen_values = true)]
        interval: String,
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Static interpolation error study on the perturbed test shape.
    InterpError(RunArgs),
    /// Shape-parameter sweep per node count.
    EpsSweep(RunArgs),
    /// Tangential-force Stokeslet comparison on a closed or open curve.
    StokesletTest {
        #[arg(long, value_enum)]
        case: Case,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Forward-Euler immersed-boundary simulation.
    Simulate {
        #[arg(long, value_enum)]
        case: Case,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Finite-difference tangent errors on the unit circle.
    FdBaseline(RunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    EquispacedPeriodic,
    Equispaced,
    Chebyshev,
    Kte,
}

impl From<KindArg> for NodeKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::EquispacedPeriodic => NodeKind::EquispacedPeriodic,
            KindArg::Equispaced => NodeKind::Equispaced,
            KindArg::Chebyshev => NodeKind::Chebyshev,
            KindArg::Kte => NodeKind::Kte,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Case {
    Closed,
    Open,
}

#[derive(Args)]
struct RunArgs {
    /// JSON file; its fields override the defaults of the chosen run.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for report.csv and report.json.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// CSV dump of a representative operator matrix.
    #[arg(long)]
    dump_operator: Option<PathBuf>,
    /// CSV dump `lambda,x,y,xp,yp,kappa,nx,ny` at sample sites.
    #[arg(long)]
    dump_geometry: Option<PathBuf>,
    /// CSV dump `x,y,p,u,v` on the `--grid` points.
    #[arg(long, requires = "grid")]
    dump_field: Option<PathBuf>,
    /// Evaluation grid `x0,x1,nx,y0,y1,ny`.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// CSV dump `lambda,Fx,Fy` of force densities at sample sites.
    #[arg(long)]
    dump_forces: Option<PathBuf>,
}

/// Overlays `patch` onto `base`, recursing into objects.
fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, p) => *slot = p,
    }
}

fn load_config<T: Serialize + for<'de> Deserialize<'de>>(path: Option<&Path>, default: T) -> Result<T> {
    let mut value = serde_json::to_value(default)?;
    if let Some(path) = path {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let patch: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        if let (Value::Object(known), Value::Object(given)) = (&value, &patch) {
            if let Some(key) = given.keys().find(|k| !known.contains_key(*k)) {
                bail!("unknown config key `{key}` in {}", path.display());
            }
        }
        merge(&mut value, patch);
    }
    Ok(serde_json::from_value(value)?)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn write_report(out: &Path, config: &impl Serialize, summary: Value, csv: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut w = create(&out.join("report.csv"))?;
    csv(&mut w)?;
    w.flush()?;
    let report = json!({ "config": config, "summary": summary });
    std::fs::write(out.join("report.json"), serde_json::to_string_pretty(&report)? + "\n")?;
    Ok(())
}

/// Decimal notation with 17 significant digits.
fn decimal17(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x:.16}");
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (16 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}

fn parse_list(text: &str, count: usize, what: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("{what} must be {count} comma-separated numbers"))?;
    if parts.len() != count {
        bail!("{what} must be {count} comma-separated numbers, got {}", parts.len());
    }
    Ok(parts)
}

fn parse_grid(text: &str) -> Result<Vec<Point>> {
    let g = parse_list(text, 6, "--grid")?;
    let count = |v: f64| -> Result<usize> {
        if v >= 1.0 && v.fract() == 0.0 {
            Ok(v as usize)
        } else {
            bail!("grid counts must be positive integers")
        }
    };
    Ok(grid(g[0], g[1], count(g[2])?, g[3], g[4], count(g[5])?)?)
}

/// Writes whichever state dumps were requested.
fn write_dumps(
    args: &RunArgs,
    ops: &GeometryOperators,
    curve: &ParametricCurve,
    densities: &[Point],
    field: impl Fn(&[Point]) -> rbfstokes::Result<FieldSample>,
) -> Result<()> {
    if let Some(path) = &args.dump_operator {
        let op = ops.operator(1).context("no first-derivative operator to dump")?;
        op.dump_csv(path)?;
    }
    if let Some(path) = &args.dump_geometry {
        ops.geometry(curve)?.dump_csv(path)?;
    }
    if let Some(path) = &args.dump_forces {
        let mut w = create(path)?;
        write_forces_csv(ops.target().values(), densities, &mut w)?;
        w.flush()?;
    }
    if let Some(path) = &args.dump_field {
        let points = parse_grid(args.grid.as_deref().context("--dump-field needs --grid")?)?;
        field(&points)?.dump_csv(path)?;
    }
    Ok(())
}

fn nodes(kind: KindArg, n: usize, interval: &str, alpha: Option<f64>) -> Result<()> {
    let ab = parse_list(interval, 2, "--interval")?;
    let set = NodeSet::generate(kind.into(), n, ab[0], ab[1], alpha)?;
    let stdout = std::io::stdout();
    let mut w = stdout.lock();
    for v in set.values() {
        writeln!(w, "{}", decimal17(*v))?;
    }
    Ok(())
}

fn interp_error(args: &RunArgs) -> Result<()> {
    let cfg: StaticStudyConfig = load_config(args.config.as_deref(), StaticStudyConfig::default())?;
    let report = static_error_study(&cfg)?;
    if let Some(path) = &args.dump_operator {
        let last = report.n_data.len().checked_sub(1).context("empty node-count list")?;
        let nodes = NodeSet::generate(cfg.method.node_kind(cfg.node_kind), report.n_data[last], 0.0, 1.0, cfg.alpha)?;
        let sample = NodeSet::equispaced(cfg.n_sample, 0.0, 1.0)?;
        LinearOperator::build(&cfg.method.scheme(report.epsilon[last])?, &nodes, &sample, 0)?.dump_csv(path)?;
    }
    let decades = |f: fn(&ErrorTriple) -> f64| match (report.errors.first(), report.errors.last()) {
        (Some(a), Some(b)) => (f(a) / f(b)).log10(),
        _ => f64::NAN,
    };
    let summary = json!({
        "node_kind": report.node_kind,
        "decades_value": decades(|e| e.value),
        "decades_normal": decades(|e| e.normal),
        "decades_second_derivative": decades(|e| e.second_derivative),
        "errors": report.errors,
    });
    write_report(&args.out, &cfg, summary, |w| Ok(report.write_csv(w)?))
}

fn eps_sweep(args: &RunArgs) -> Result<()> {
    let cfg: EpsSweepConfig = load_config(args.config.as_deref(), EpsSweepConfig::default())?;
    let results = run_eps_sweep(&cfg)?;
    let best: Vec<Value> = results
        .iter()
        .map(|r| json!({ "n_data": r.n_data, "best_epsilon": r.best_epsilon, "best_error": r.best_error }))
        .collect();
    write_report(&args.out, &cfg, json!({ "best": best }), |w| Ok(write_sweep_csv(&results, w)?))
}

fn fd_baseline(args: &RunArgs) -> Result<()> {
    let cfg: FdLadderConfig = load_config(args.config.as_deref(), FdLadderConfig::default())?;
    let rows: Vec<FdBaseline> = cfg.n_total.iter().map(|&n| fd_tangent_baseline(n)).collect::<rbfstokes::Result<_>>()?;
    let orders: Vec<f64> = rows
        .windows(2)
        .map(|w| (w[0].max_error / w[1].max_error).ln() / (w[1].n_total as f64 / w[0].n_total as f64).ln())
        .collect();
    let errors: Vec<Value> = rows.iter().map(|r| json!({ "n_total": r.n_total, "max_error": r.max_error })).collect();
    write_report(&args.out, &cfg, json!({ "errors": errors, "observed_orders": orders }), |w| {
        writeln!(w, "n_total,ib_points,max_error")?;
        for r in &rows {
            writeln!(w, "{},{},{:.17e}", r.n_total, r.lambda.len(), r.max_error)?;
        }
        Ok(())
    })
}

fn comparison_summary(c: &FieldComparison) -> Value {
    let [p, u, v] = c.max();
    let [tp, tu, tv] = c.total_variation();
    json!({ "max": { "p": p, "u": u, "v": v }, "total_variation": { "p": tp, "u": tu, "v": tv } })
}

fn stokeslet_test(case: Case, args: &RunArgs) -> Result<()> {
    match case {
        Case::Closed => {
            let cfg: ClosedTangentialConfig = load_config(args.config.as_deref(), ClosedTangentialConfig::default())?;
            let report = closed_tangential_test(&cfg)?;
            let nodes = NodeSet::equispaced_periodic(cfg.n_data, 0.0, TAU)?;
            let sample = NodeSet::equispaced_periodic(cfg.n_sample, 0.0, TAU)?;
            let circle = nodes.values().iter().map(|l| [l.cos(), l.sin()]).collect();
            let curve = ParametricCurve::new(Topology::Closed, nodes.clone(), circle, 0.0)?;
            let ops = GeometryOperators::new(&KernelSpec::sbf(cfg.epsilon).into(), &nodes, &sample, &[0, 1, 2])?;
            let geom = ops.geometry(&curve)?;
            let densities = prescribed_tangential(&geom);
            let blob = BlobModel::new(cfg.delta, cfg.mu)?;
            let forces = ForceSample::new(geom.positions.clone(), densities.clone(), TAU / cfg.n_sample as f64)?;
            write_dumps(args, &ops, &curve, &densities, |pts| evaluate_field(&forces, &blob, pts))?;
            let summary = json!({ "sbf": comparison_summary(&report.sbf), "fd": comparison_summary(&report.fd) });
            write_report(&args.out, &cfg, summary, |w| {
                writeln!(w, "{COMPARISON_CSV_HEADER}")?;
                report.sbf.write_csv("sbf", &mut *w)?;
                report.fd.write_csv("fd", &mut *w)?;
                Ok(())
            })
        }
        Case::Open => {
            let cfg: OpenTangentialConfig = load_config(args.config.as_deref(), OpenTangentialConfig::default())?;
            let interp = open_tangential_test(&cfg)?;
            let quadrature = open_quadrature_self_comparison(&cfg)?;
            let nodes = NodeSet::generate(cfg.node_kind, cfg.n_data, 0.0, TAU, cfg.alpha)?;
            let sample = NodeSet::equispaced(cfg.n_sample, 0.0, TAU)?;
            let ys: Vec<f64> = nodes.values().iter().map(|x| x.sin()).collect();
            let curve = ParametricCurve::open_graph(nodes.clone(), &ys, 0.0)?;
            let ops = GeometryOperators::new(&cfg.kernel.into(), &nodes, &sample, &[0, 1, 2])?;
            let geom = ops.geometry(&curve)?;
            let densities = prescribed_tangential(&geom);
            let forces = ForceSample::new(geom.positions.clone(), densities.clone(), TAU / cfg.n_sample as f64)?;
            write_dumps(args, &ops, &curve, &densities, |pts| singular_field(&forces, cfg.mu, pts))?;
            let summary = json!({
                "interpolant": comparison_summary(&interp),
                "quadrature_only": comparison_summary(&quadrature),
            });
            write_report(&args.out, &cfg, summary, |w| {
                writeln!(w, "{COMPARISON_CSV_HEADER}")?;
                interp.write_csv("interpolant", &mut *w)?;
                quadrature.write_csv("quadrature_only", &mut *w)?;
                Ok(())
            })
        }
    }
}

/// Initial shape of a simulation run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
enum Initial {
    /// `(1 + β cos(νλ)) (cos λ, sin λ)`
    PerturbedCircle { beta: f64, nu: i32 },
    /// `(λ, b sin(2πλ))`
    SineGraph { b: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SimulateConfig {
    simulation: SimConfig,
    initial: Initial,
}

fn simulate(case: Case, args: &RunArgs) -> Result<()> {
    let default = match case {
        Case::Closed => SimulateConfig {
            simulation: simulate::closed_relaxation_config(),
            initial: Initial::PerturbedCircle { beta: 0.3, nu: 3 },
        },
        Case::Open => SimulateConfig {
            simulation: simulate::open_filament_config(0.01, -TAU),
            initial: Initial::SineGraph { b: 0.01 },
        },
    };
    let cfg: SimulateConfig = load_config(args.config.as_deref(), default)?;
    let sim = Simulation::new(&cfg.simulation)?;
    let initial = match cfg.initial {
        Initial::PerturbedCircle { beta, nu } => simulate::initial_closed(beta, nu, sim.data_nodes())?,
        Initial::SineGraph { b } => simulate::initial_open(b, sim.data_nodes())?,
    };
    let traj = sim.run(&initial)?;
    if let Some(reason) = &traj.diverged {
        eprintln!("warning: {reason}");
    }

    let last = traj.states.len().checked_sub(1).context("the run recorded no frames")?;
    let sites = traj.states[last].clone();
    let state = match initial.topology() {
        Topology::Closed => ParametricCurve::new(Topology::Closed, sim.data_nodes().clone(), sites, traj.times[last])?,
        Topology::OpenGraph => {
            let ys: Vec<f64> = sites.iter().map(|p| p[1]).collect();
            ParametricCurve::open_graph(sim.data_nodes().clone(), &ys, traj.times[last])?
        }
    };
    let resolved = sim.config();
    let sample = resolved.sample_node_set()?;
    let scheme = Scheme::Kernel(resolved.kernel);
    let force_ops = ForceOperators::new(&scheme, sim.data_nodes(), &sample, &resolved.force)?;
    let eval = force_ops.evaluate(&state, state.time, &resolved.force)?;
    let geom_ops = GeometryOperators::new(&scheme, sim.data_nodes(), &sample, &[0, 1, 2])?;
    let dlambda = sample.spacing().context("sample nodes must be equispaced")?;
    let forces = ForceSample::new(eval.geometry.positions.clone(), eval.densities.clone(), dlambda)?;
    write_dumps(args, &geom_ops, &state, &eval.densities, |pts| evaluate_field(&forces, sim.blob(), pts))?;

    let initial_arclength = traj.diagnostics.first().map_or(f64::NAN, |d| d.arclength);
    let summary = json!({
        "delta": sim.blob().delta,
        "initial_arclength": initial_arclength,
        "target_arclength_3pi_2": 1.5 * PI,
        "trajectory": traj.summary(),
        "diverged_reason": traj.diverged,
        "frames": traj.times.iter().zip(&traj.diagnostics).map(|(t, d)| json!({ "t": t, "diagnostics": d })).collect::<Vec<_>>(),
    });
    write_report(&args.out, &cfg, summary, |w| Ok(traj.write_csv(w)?))
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Nodes { kind, n, interval, alpha } => nodes(kind, n, &interval, alpha),
        Command::InterpError(run) => interp_error(&run),
        Command::EpsSweep(run) => eps_sweep(&run),
        Command::StokesletTest { case, run } => stokeslet_test(case, &run),
        Command::Simulate { case, run } => simulate(case, &run),
        Command::FdBaseline(run) => fd_baseline(&run),
    }
}
