//! Static interpolation studies, shape-parameter sweeps, tangential-force
//! flow comparisons and the finite-difference tangent baseline.

use std::f64::consts::{PI, TAU};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::curve::{GeometryOperators, ParametricCurve, Point, Topology};
use crate::error::{invalid, Result};
use crate::forces::prescribed_tangential;
use crate::interpolation::{KernelSpec, Scheme};
use crate::nodes::{NodeKind, NodeSet};
use crate::stokeslets::{evaluate_field, singular_field, BlobModel, FieldSample, ForceSample};

/// Parameters of the perturbed sinusoid `Y_P = [1 + A exp(-|sin 2πλ|³/σ)] b sin(2πλ - ω)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TestShapeConfig {
    pub b: f64,
    pub a_pert: f64,
    pub sigma: f64,
    pub omega_phase: f64,
}

impl Default for TestShapeConfig {
    fn default() -> Self {
        Self {
            b: 0.05,
            a_pert: 0.04,
            sigma: 0.9,
            omega_phase: 0.0,
        }
    }
}

impl TestShapeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) {
            return Err(invalid(format!("sigma {} must be positive", self.sigma)));
        }
        Ok(())
    }

    /// `y`, `y_λ` and `y_λλ` in closed form.
    pub fn y_derivatives(&self, lambda: f64) -> [f64; 3] {
        let w = TAU;
        let (s, c) = (w * lambda).sin_cos();
        let g = s.abs().powi(3);
        let g1 = 3.0 * s * s.abs() * w * c;
        let g2 = 3.0 * w * w * s.abs() * (2.0 * c * c - s * s);
        let e = (-g / self.sigma).exp();
        let e1 = -g1 * e / self.sigma;
        let e2 = (g1 * g1 / (self.sigma * self.sigma) - g2 / self.sigma) * e;
        let p = 1.0 + self.a_pert * e;
        let (p1, p2) = (self.a_pert * e1, self.a_pert * e2);
        let phase = w * lambda - self.omega_phase;
        let yi = self.b * phase.sin();
        let yi1 = self.b * w * phase.cos();
        let yi2 = -w * w * yi;
        [p * yi, p1 * yi + p * yi1, p2 * yi + 2.0 * p1 * yi1 + p * yi2]
    }

    /// Richardson-extrapolated central difference of `y` (steps `h` and `h/2`).
    pub fn y_second_derivative_fd(&self, lambda: f64, h: f64) -> f64 {
        let y = |l: f64| self.y_derivatives(l)[0];
        let d = |h: f64| (y(lambda + h) - 2.0 * y(lambda) + y(lambda - h)) / (h * h);
        (4.0 * d(0.5 * h) - d(h)) / 3.0
    }
}

pub fn perturbed_shape(lambda: f64, config: &TestShapeConfig) -> Result<Point> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(invalid(format!("λ = {lambda} outside [0, 1]")));
    }
    Ok([lambda, config.y_derivatives(lambda)[0]])
}

/// `max_j ‖computed_j - reference_j‖₂`.
pub fn max_pointwise_l2(computed: &[Point], reference: &[Point]) -> f64 {
    computed
        .iter()
        .zip(reference)
        .map(|(c, r)| (c[0] - r[0]).hypot(c[1] - r[1]))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Sbf,
    Rbf,
    LagrangeChebyshev,
    FdBaseline,
}

impl Method {
    pub fn scheme(self, epsilon: f64) -> Result<Scheme> {
        match self {
            Method::Sbf => Ok(KernelSpec::sbf(epsilon).into()),
            Method::Rbf => Ok(KernelSpec::rbf(epsilon).into()),
            Method::LagrangeChebyshev => Ok(Scheme::LagrangeChebyshev),
            Method::FdBaseline => Err(invalid("the FD baseline has no interpolation scheme")),
        }
    }

    /// Lagrange interpolation is always built on Chebyshev nodes.
    pub fn node_kind(self, requested: NodeKind) -> NodeKind {
        match self {
            Method::LagrangeChebyshev => NodeKind::Chebyshev,
            _ => requested,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorTriple {
    pub value: f64,
    pub normal: f64,
    pub second_derivative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub method: Method,
    pub node_kind: NodeKind,
    pub n_data: Vec<usize>,
    pub epsilon: Vec<f64>,
    pub errors: Vec<ErrorTriple>,
}

impl ErrorReport {
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "method,node_kind,n_data,epsilon,value_error,normal_error,second_derivative_error")?;
        let method = serde_json::to_value(self.method)?;
        let kind = serde_json::to_value(self.node_kind)?;
        for ((n, e), err) in self.n_data.iter().zip(&self.epsilon).zip(&self.errors) {
            writeln!(
                w,
                "{},{},{n},{e},{:.17e},{:.17e},{:.17e}",
                method.as_str().unwrap_or_default(),
                kind.as_str().unwrap_or_default(),
                err.value,
                err.normal,
                err.second_derivative
            )?;
        }
        Ok(())
    }

    pub fn for_n(&self, n: usize) -> Option<&ErrorTriple> {
        self.n_data.iter().position(|&m| m == n).map(|i| &self.errors[i])
    }
}

/// One shape parameter for every `N_d`, or one per entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EpsilonChoice {
    Fixed(f64),
    PerN(Vec<f64>),
}

impl EpsilonChoice {
    fn expand(&self, count: usize) -> Result<Vec<f64>> {
        match self {
            EpsilonChoice::Fixed(e) => Ok(vec![*e; count]),
            EpsilonChoice::PerN(v) if v.len() == count => Ok(v.clone()),
            EpsilonChoice::PerN(v) => Err(invalid(format!("{} shape parameters for {count} node counts", v.len()))),
        }
    }
}

/// Errors of one interpolant of the test shape at `n_sample` midpoint sample sites on `[0, 1]`.
pub fn static_error(
    method: Method,
    node_kind: NodeKind,
    alpha: Option<f64>,
    n_data: usize,
    epsilon: f64,
    n_sample: usize,
    shape: &TestShapeConfig,
) -> Result<ErrorTriple> {
    shape.validate()?;
    let nodes = NodeSet::generate(method.node_kind(node_kind), n_data, 0.0, 1.0, alpha)?;
    let sample = NodeSet::equispaced(n_sample, 0.0, 1.0)?;
    let ys: Vec<f64> = nodes.values().iter().map(|&l| shape.y_derivatives(l)[0]).collect();
    let curve = ParametricCurve::open_graph(nodes.clone(), &ys, 0.0)?;
    let ops = GeometryOperators::new(&method.scheme(epsilon)?, &nodes, &sample, &[0, 1, 2])?;
    let geom = ops.geometry(&curve)?;
    let reference: Vec<[f64; 3]> = sample.values().iter().map(|&l| shape.y_derivatives(l)).collect();
    let ref_pos: Vec<Point> = sample.values().iter().zip(&reference).map(|(&l, r)| [l, r[0]]).collect();
    let ref_normal: Vec<Point> = reference
        .iter()
        .map(|r| {
            let norm = 1.0f64.hypot(r[1]);
            [r[1] / norm, -1.0 / norm]
        })
        .collect();
    let ref_second: Vec<Point> = reference.iter().map(|r| [0.0, r[2]]).collect();
    let second = geom
        .second_derivatives
        .as_ref()
        .ok_or_else(|| invalid("second derivatives were not built"))?;
    let out = ErrorTriple {
        value: max_pointwise_l2(&geom.positions, &ref_pos),
        normal: max_pointwise_l2(&geom.unit_normals, &ref_normal),
        second_derivative: max_pointwise_l2(second, &ref_second),
    };
    if ![out.value, out.normal, out.second_derivative].iter().all(|e| e.is_finite()) {
        return Err(crate::error::Error::SingularSystem(format!(
            "non-finite errors for N_d = {n_data}, ε = {epsilon}"
        )));
    }
    Ok(out)
}

fn default_n_list() -> Vec<usize> {
    (1..=10).map(|k| 8 * k).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StaticStudyConfig {
    pub method: Method,
    pub node_kind: NodeKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub n_data: Vec<usize>,
    pub epsilon: EpsilonChoice,
    pub n_sample: usize,
    pub shape: TestShapeConfig,
}

impl Default for StaticStudyConfig {
    fn default() -> Self {
        Self {
            method: Method::Sbf,
            node_kind: NodeKind::Kte,
            alpha: Some(0.85),
            n_data: default_n_list(),
            epsilon: EpsilonChoice::Fixed(7.0),
            n_sample: 400,
            shape: TestShapeConfig::default(),
        }
    }
}

pub fn static_error_study(config: &StaticStudyConfig) -> Result<ErrorReport> {
    let eps = config.epsilon.expand(config.n_data.len())?;
    let errors = config
        .n_data
        .iter()
        .zip(&eps)
        .map(|(&n, &e)| {
            static_error(config.method, config.node_kind, config.alpha, n, e, config.n_sample, &config.shape)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ErrorReport {
        method: config.method,
        node_kind: config.method.node_kind(config.node_kind),
        n_data: config.n_data.clone(),
        epsilon: eps,
        errors,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EpsSweepConfig {
    pub method: Method,
    pub node_kind: NodeKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub n_data: Vec<usize>,
    pub eps_min: f64,
    pub eps_max: f64,
    pub candidates: usize,
    pub n_sample: usize,
    pub shape: TestShapeConfig,
}

impl Default for EpsSweepConfig {
    fn default() -> Self {
        Self {
            method: Method::Sbf,
            node_kind: NodeKind::Kte,
            alpha: Some(0.85),
            n_data: default_n_list(),
            eps_min: 0.5,
            eps_max: 10.0,
            candidates: 100,
            n_sample: 400,
            shape: TestShapeConfig::default(),
        }
    }
}

impl EpsSweepConfig {
    /// Uniformly spaced candidates including both ends.
    pub fn candidate_values(&self) -> Vec<f64> {
        let n = self.candidates;
        if n == 1 {
            return vec![self.eps_min];
        }
        (0..n)
            .map(|i| self.eps_min + (self.eps_max - self.eps_min) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub n_data: usize,
    pub best_epsilon: f64,
    pub best_error: f64,
    pub epsilons: Vec<f64>,
    /// Value errors; infinite where the interpolant could not be built.
    pub errors: Vec<f64>,
}

/// Value error over the candidate shape parameters and its minimizer.
pub fn epsilon_sweep(
    method: Method,
    node_kind: NodeKind,
    alpha: Option<f64>,
    n_data: usize,
    candidates: &[f64],
    n_sample: usize,
    shape: &TestShapeConfig,
) -> Result<SweepResult> {
    if candidates.is_empty() {
        return Err(invalid("no shape parameter candidates"));
    }
    let errors: Vec<f64> = candidates
        .iter()
        .map(|&e| {
            static_error(method, node_kind, alpha, n_data, e, n_sample, shape)
                .map(|t| t.value)
                .unwrap_or(f64::INFINITY)
        })
        .collect();
    let (best, &best_error) = errors
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("candidates are non-empty");
    if !best_error.is_finite() {
        return Err(invalid(format!("no candidate ε produced a usable interpolant for N_d = {n_data}")));
    }
    Ok(SweepResult {
        n_data,
        best_epsilon: candidates[best],
        best_error,
        epsilons: candidates.to_vec(),
        errors,
    })
}

pub fn run_eps_sweep(config: &EpsSweepConfig) -> Result<Vec<SweepResult>> {
    let candidates = config.candidate_values();
    config
        .n_data
        .iter()
        .map(|&n| {
            epsilon_sweep(
                config.method,
                config.node_kind,
                config.alpha,
                n,
                &candidates,
                config.n_sample,
                &config.shape,
            )
        })
        .collect()
}

pub fn write_sweep_csv(results: &[SweepResult], mut w: impl Write) -> Result<()> {
    writeln!(w, "n_data,epsilon,value_error")?;
    for r in results {
        for (e, err) in r.epsilons.iter().zip(&r.errors) {
            writeln!(w, "{},{e},{err:.17e}", r.n_data)?;
        }
    }
    Ok(())
}

/// Equispaced markers on a horizontal line, both ends included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkerLine {
    pub x_start: f64,
    pub x_end: f64,
    pub y: f64,
    pub count: usize,
}

impl Default for MarkerLine {
    fn default() -> Self {
        Self {
            x_start: 0.4,
            x_end: 1.8,
            y: 0.2,
            count: 100,
        }
    }
}

impl MarkerLine {
    pub fn points(&self) -> Result<Vec<Point>> {
        if self.count < 2 {
            return Err(invalid("a marker line needs at least two markers"));
        }
        let h = (self.x_end - self.x_start) / (self.count - 1) as f64;
        Ok((0..self.count).map(|i| [self.x_start + i as f64 * h, self.y]).collect())
    }
}

/// Absolute differences of two fields at the same markers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldComparison {
    pub markers: Vec<Point>,
    pub pressure: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl FieldComparison {
    pub fn new(computed: &FieldSample, reference: &FieldSample) -> Self {
        Self {
            markers: computed.points.clone(),
            pressure: computed
                .pressure
                .iter()
                .zip(&reference.pressure)
                .map(|(a, b)| (a - b).abs())
                .collect(),
            u: computed.velocity.iter().zip(&reference.velocity).map(|(a, b)| (a[0] - b[0]).abs()).collect(),
            v: computed.velocity.iter().zip(&reference.velocity).map(|(a, b)| (a[1] - b[1]).abs()).collect(),
        }
    }

    pub fn max(&self) -> [f64; 3] {
        let m = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
        [m(&self.pressure), m(&self.u), m(&self.v)]
    }

    pub fn total_variation(&self) -> [f64; 3] {
        let tv = |v: &[f64]| v.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>();
        [tv(&self.pressure), tv(&self.u), tv(&self.v)]
    }

    pub fn write_csv(&self, label: &str, mut w: impl Write) -> Result<()> {
        for (i, m) in self.markers.iter().enumerate() {
            writeln!(
                w,
                "{label},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                m[0], m[1], self.pressure[i], self.u[i], self.v[i]
            )?;
        }
        Ok(())
    }
}

pub const COMPARISON_CSV_HEADER: &str = "pipeline,x,y,dp,du,dv";

/// How tangents on the unit circle are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TangentSource {
    Sbf,
    Analytic,
    FiniteDifference,
}

fn circle(lambda: f64) -> Point {
    [lambda.cos(), lambda.sin()]
}

/// Centered differences across the halfway points `λ ± η`.
pub fn fd_tangents(shape: impl Fn(f64) -> Point, lambda: &[f64], half_step: f64) -> Vec<Point> {
    lambda
        .iter()
        .map(|&l| {
            let (a, b) = (shape(l + half_step), shape(l - half_step));
            [(a[0] - b[0]) / (2.0 * half_step), (a[1] - b[1]) / (2.0 * half_step)]
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FdBaseline {
    pub n_total: usize,
    pub lambda: Vec<f64>,
    pub tangents: Vec<Point>,
    pub max_error: f64,
}

/// Unit-circle tangents at `n_total / 2` IB points from the `n_total / 2` halfway points.
pub fn fd_tangent_baseline(n_total: usize) -> Result<FdBaseline> {
    if n_total < 4 || n_total % 2 != 0 {
        return Err(invalid(format!("n_total = {n_total} must be even and at least 4")));
    }
    let ib = NodeSet::equispaced_periodic(n_total / 2, 0.0, TAU)?;
    let tangents = fd_tangents(circle, ib.values(), TAU / n_total as f64);
    let exact: Vec<Point> = ib.values().iter().map(|l| [-l.sin(), l.cos()]).collect();
    Ok(FdBaseline {
        n_total,
        lambda: ib.values().to_vec(),
        max_error: max_pointwise_l2(&tangents, &exact),
        tangents,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FdLadderConfig {
    pub n_total: Vec<usize>,
}

impl Default for FdLadderConfig {
    fn default() -> Self {
        Self {
            n_total: vec![100, 200, 400, 800, 1600],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClosedTangentialConfig {
    pub n_data: usize,
    pub n_sample: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub mu: f64,
    /// Total point count of the FD baseline (IB points plus halfway points).
    pub fd_total: usize,
    pub markers: MarkerLine,
}

impl Default for ClosedTangentialConfig {
    fn default() -> Self {
        Self {
            n_data: 25,
            n_sample: 400,
            epsilon: 1.1,
            delta: 4.0 * PI / 400.0,
            mu: 1.0,
            fd_total: 800,
            markers: MarkerLine::default(),
        }
    }
}

/// Regularized field of the tangential force `-2 sin(3λ) X_λ` on the unit circle.
pub fn closed_tangential_field(config: &ClosedTangentialConfig, source: TangentSource) -> Result<FieldSample> {
    let markers = config.markers.points()?;
    let blob = BlobModel::new(config.delta, config.mu)?;
    let (lambda, positions, tangents) = match source {
        TangentSource::Sbf => {
            let nodes = NodeSet::equispaced_periodic(config.n_data, 0.0, TAU)?;
            let sample = NodeSet::equispaced_periodic(config.n_sample, 0.0, TAU)?;
            let curve = ParametricCurve::new(
                Topology::Closed,
                nodes.clone(),
                nodes.values().iter().map(|&l| circle(l)).collect(),
                0.0,
            )?;
            let ops = GeometryOperators::new(&KernelSpec::sbf(config.epsilon).into(), &nodes, &sample, &[0, 1])?;
            let geom = ops.geometry(&curve)?;
            (geom.lambda, geom.positions, geom.first_derivatives)
        }
        TangentSource::Analytic => {
            let sample = NodeSet::equispaced_periodic(config.n_sample, 0.0, TAU)?;
            let l = sample.values().to_vec();
            let pos = l.iter().map(|&x| circle(x)).collect();
            let tan = l.iter().map(|x| [-x.sin(), x.cos()]).collect();
            (l, pos, tan)
        }
        TangentSource::FiniteDifference => {
            let fd = fd_tangent_baseline(config.fd_total)?;
            let pos = fd.lambda.iter().map(|&x| circle(x)).collect();
            (fd.lambda, pos, fd.tangents)
        }
    };
    let densities = tangential_density(&lambda, &tangents);
    let dlambda = TAU / lambda.len() as f64;
    evaluate_field(&ForceSample::new(positions, densities, dlambda)?, &blob, &markers)
}

fn tangential_density(lambda: &[f64], tangents: &[Point]) -> Vec<Point> {
    lambda
        .iter()
        .zip(tangents)
        .map(|(&l, t)| {
            let s = -2.0 * (3.0 * l).sin();
            [s * t[0], s * t[1]]
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedTangentialReport {
    pub sbf: FieldComparison,
    pub fd: FieldComparison,
}

/// SBF-tangent and FD-tangent pipelines, each compared with the analytic-tangent pipeline.
pub fn closed_tangential_test(config: &ClosedTangentialConfig) -> Result<ClosedTangentialReport> {
    let exact = closed_tangential_field(config, TangentSource::Analytic)?;
    let sbf = closed_tangential_field(config, TangentSource::Sbf)?;
    let fd = closed_tangential_field(config, TangentSource::FiniteDifference)?;
    Ok(ClosedTangentialReport {
        sbf: FieldComparison::new(&sbf, &exact),
        fd: FieldComparison::new(&fd, &exact),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OpenTangentialConfig {
    pub n_data: usize,
    pub n_sample: usize,
    pub n_reference: usize,
    pub kernel: KernelSpec,
    pub node_kind: NodeKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub mu: f64,
    pub markers: MarkerLine,
}

impl Default for OpenTangentialConfig {
    fn default() -> Self {
        Self {
            n_data: 50,
            n_sample: 200,
            n_reference: 800,
            kernel: KernelSpec::sbf(1.1),
            node_kind: NodeKind::Kte,
            alpha: Some(0.85),
            mu: 1.0,
            markers: MarkerLine::default(),
        }
    }
}

/// Singular field of `-2 sin(3λ) X_λ` on `X = (λ, sin λ)`, `0 < λ < 2π`, from `n` midpoint sites.
fn open_analytic_field(n: usize, mu: f64, markers: &[Point]) -> Result<FieldSample> {
    let sample = NodeSet::equispaced(n, 0.0, TAU)?;
    let l = sample.values();
    let positions = l.iter().map(|&x| [x, x.sin()]).collect();
    let tangents: Vec<Point> = l.iter().map(|x| [1.0, x.cos()]).collect();
    let densities = tangential_density(l, &tangents);
    singular_field(&ForceSample::new(positions, densities, TAU / n as f64)?, mu, markers)
}

/// Interpolant-driven singular field compared with the analytic dense reference.
pub fn open_tangential_test(config: &OpenTangentialConfig) -> Result<FieldComparison> {
    if config.n_reference < 4 * config.n_sample {
        return Err(invalid("the reference discretization must have at least 4 N_s sites"));
    }
    let markers = config.markers.points()?;
    let nodes = NodeSet::generate(config.node_kind, config.n_data, 0.0, TAU, config.alpha)?;
    let sample = NodeSet::equispaced(config.n_sample, 0.0, TAU)?;
    let ys: Vec<f64> = nodes.values().iter().map(|x| x.sin()).collect();
    let curve = ParametricCurve::open_graph(nodes.clone(), &ys, 0.0)?;
    let ops = GeometryOperators::new(&config.kernel.into(), &nodes, &sample, &[0, 1])?;
    let geom = ops.geometry(&curve)?;
    let densities = prescribed_tangential(&geom);
    let computed = singular_field(
        &ForceSample::new(geom.positions, densities, TAU / config.n_sample as f64)?,
        config.mu,
        &markers,
    )?;
    let reference = open_analytic_field(config.n_reference, config.mu, &markers)?;
    Ok(FieldComparison::new(&computed, &reference))
}

/// Analytic forces in both slots; what remains is quadrature refinement error.
pub fn open_quadrature_self_comparison(config: &OpenTangentialConfig) -> Result<FieldComparison> {
    let markers = config.markers.points()?;
    let coarse = open_analytic_field(config.n_sample, config.mu, &markers)?;
    let reference = open_analytic_field(config.n_reference, config.mu, &markers)?;
    Ok(FieldComparison::new(&coarse, &reference))
}
