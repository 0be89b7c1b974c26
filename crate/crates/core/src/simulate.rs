//! Forward-Euler RBF-Stokeslet time stepping.
//!
//! Each step samples the curve, evaluates force densities at the sample
//! sites, converts them to point forces `-F Δλ`, evaluates the regularized
//! velocity at the data sites and advects the data sites with it.

use std::f64::consts::{PI, TAU};
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::curve::{ParametricCurve, Point, Topology};
use crate::error::{invalid, Error, Result};
use crate::forces::{ForceModel, ForceOperators};
use crate::interpolation::{KernelSpec, Scheme};
use crate::nodes::{NodeKind, NodeSet};
use crate::stokeslets::{assemble_point_forces, evaluate_velocity, BlobModel};

/// Regularization length, either literal or `c / N_s` written as e.g. `"4pi/Ns"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeltaRule {
    Value(f64),
    Rule(String),
}

impl DeltaRule {
    pub fn resolve(&self, n_sample: usize) -> Result<f64> {
        let delta = match self {
            DeltaRule::Value(v) => *v,
            DeltaRule::Rule(text) => {
                let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
                let numerator = compact
                    .strip_suffix("/ns")
                    .ok_or_else(|| invalid(format!("delta rule {text:?} must end in /Ns")))?;
                let numerator = numerator.trim_end_matches('*');
                let (coef, pi) = match numerator.strip_suffix("pi") {
                    Some(rest) => (rest.trim_end_matches('*'), true),
                    None => (numerator, false),
                };
                let c = if coef.is_empty() {
                    1.0
                } else {
                    coef.parse::<f64>()
                        .map_err(|_| invalid(format!("cannot parse delta rule {text:?}")))?
                };
                c * if pi { PI } else { 1.0 } / n_sample as f64
            }
        };
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(invalid(format!("delta {delta} must be positive")));
        }
        Ok(delta)
    }
}

fn default_mu() -> f64 {
    1.0
}

fn default_cadence() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub topology: Topology,
    pub n_data: usize,
    pub n_sample: usize,
    pub data_nodes: NodeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Parameter interval; defaults to `[0, 2π)` for closed and `[0, 1]` for open curves.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<(f64, f64)>,
    pub kernel: KernelSpec,
    pub delta: DeltaRule,
    #[serde(default = "default_mu")]
    pub mu: f64,
    pub dt: f64,
    pub t_end: f64,
    pub force: ForceModel,
    /// Record every `output_every`-th step (the last step is always recorded).
    #[serde(default = "default_cadence")]
    pub output_every: usize,
}

impl SimConfig {
    pub fn interval(&self) -> (f64, f64) {
        self.interval.unwrap_or(match self.topology {
            Topology::Closed => (0.0, TAU),
            Topology::OpenGraph => (0.0, 1.0),
        })
    }

    pub fn data_node_set(&self) -> Result<NodeSet> {
        let (a, b) = self.interval();
        NodeSet::generate(self.data_nodes, self.n_data, a, b, self.alpha)
    }

    pub fn sample_node_set(&self) -> Result<NodeSet> {
        let (a, b) = self.interval();
        match self.topology {
            Topology::Closed => NodeSet::equispaced_periodic(self.n_sample, a, b),
            Topology::OpenGraph => NodeSet::equispaced(self.n_sample, a, b),
        }
    }

    /// Copy with `delta` replaced by its resolved value.
    pub fn resolved(&self) -> Result<Self> {
        let mut out = self.clone();
        out.delta = DeltaRule::Value(self.delta.resolve(self.n_sample)?);
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid(format!("time step {} must be positive", self.dt)));
        }
        if !(self.t_end >= 0.0) {
            return Err(invalid("t_end must be non-negative"));
        }
        if self.output_every == 0 {
            return Err(invalid("output_every must be at least 1"));
        }
        self.kernel.validate()?;
        self.force.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameDiagnostics {
    pub arclength: f64,
    pub max_force: f64,
    pub max_velocity: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub lambda: Vec<f64>,
    pub times: Vec<f64>,
    pub states: Vec<Vec<Point>>,
    pub diagnostics: Vec<FrameDiagnostics>,
    /// Set when the run stopped on a non-finite velocity.
    pub diverged: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrajectorySummary {
    pub frames: usize,
    pub final_arclength: f64,
    pub max_velocity: f64,
    pub diverged: bool,
}

impl Trajectory {
    pub fn summary(&self) -> TrajectorySummary {
        TrajectorySummary {
            frames: self.times.len(),
            final_arclength: self.diagnostics.last().map_or(f64::NAN, |d| d.arclength),
            max_velocity: self.diagnostics.iter().map(|d| d.max_velocity).fold(0.0, f64::max),
            diverged: self.diverged.is_some(),
        }
    }

    /// Frames as CSV rows `t,lambda,x,y`.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "t,lambda,x,y")?;
        for (t, state) in self.times.iter().zip(&self.states) {
            for (l, p) in self.lambda.iter().zip(state) {
                writeln!(w, "{t:.17e},{l:.17e},{:.17e},{:.17e}", p[0], p[1])?;
            }
        }
        Ok(())
    }

    pub fn dump(&self, csv_path: impl AsRef<Path>, summary_path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::io::BufWriter::new(std::fs::File::create(csv_path)?))?;
        std::fs::write(summary_path, serde_json::to_string_pretty(&self.summary())?)?;
        Ok(())
    }

    /// Index of the recorded frame closest to `t`.
    pub fn frame_near(&self, t: f64) -> Option<usize> {
        self.times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
            .map(|(i, _)| i)
    }
}

/// Data-site velocities and diagnostics for one state.
#[derive(Debug, Clone)]
pub struct StepEvaluation {
    pub velocity: Vec<Point>,
    pub diagnostics: FrameDiagnostics,
}

/// Precomputed operators and resolved parameters for one configuration.
#[derive(Debug, Clone)]
pub struct Simulation {
    config: SimConfig,
    blob: BlobModel,
    data_nodes: NodeSet,
    dlambda: f64,
    ops: ForceOperators,
}

impl Simulation {
    pub fn new(config: &SimConfig) -> Result<Self> {
        config.validate()?;
        let config = config.resolved()?;
        let delta = config.delta.resolve(config.n_sample)?;
        let blob = BlobModel::new(delta, config.mu)?;
        let data_nodes = config.data_node_set()?;
        let sample = config.sample_node_set()?;
        let dlambda = sample.spacing().ok_or_else(|| invalid("sample nodes must be equispaced"))?;
        let scheme = Scheme::Kernel(config.kernel);
        let ops = ForceOperators::new(&scheme, &data_nodes, &sample, &config.force)?;
        Ok(Self {
            config,
            blob,
            data_nodes,
            dlambda,
            ops,
        })
    }

    /// Configuration with `delta` stored as a literal value.
    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn blob(&self) -> &BlobModel {
        &self.blob
    }

    pub fn data_nodes(&self) -> &NodeSet {
        &self.data_nodes
    }

    pub fn check_state(&self, state: &ParametricCurve) -> Result<()> {
        if state.topology() != self.config.topology || state.nodes().values() != self.data_nodes.values() {
            return Err(invalid("state does not match the configured data nodes"));
        }
        Ok(())
    }

    pub fn evaluate(&self, state: &ParametricCurve) -> Result<StepEvaluation> {
        let eval = self.ops.evaluate(state, state.time, &self.config.force)?;
        let arclength = match eval.arclength {
            Some(l) => l,
            None => self.ops.sample().arclength(state)?,
        };
        let point_forces = assemble_point_forces(&eval.densities, self.dlambda)?;
        let velocity = evaluate_velocity(&eval.geometry.positions, &point_forces, &self.blob, state.sites());
        let max_force = eval.densities.iter().map(|f| f[0].hypot(f[1])).fold(0.0, f64::max);
        let max_velocity = velocity.iter().map(|u| u[0].hypot(u[1])).fold(0.0, f64::max);
        Ok(StepEvaluation {
            velocity,
            diagnostics: FrameDiagnostics {
                arclength,
                max_force,
                max_velocity,
            },
        })
    }

    fn advance(&self, state: &ParametricCurve, eval: &StepEvaluation, step_index: usize) -> Result<ParametricCurve> {
        if eval.velocity.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::SimulationDiverged {
                step: step_index,
                time: state.time,
            });
        }
        let dt = self.config.dt;
        let displacement: Vec<Point> = eval.velocity.iter().map(|u| [dt * u[0], dt * u[1]]).collect();
        let mut next = state.clone();
        next.displace(&displacement)?;
        Ok(next)
    }

    /// One forward-Euler step; time advances by `dt`.
    pub fn step(&self, state: &ParametricCurve) -> Result<ParametricCurve> {
        self.check_state(state)?;
        let eval = self.evaluate(state)?;
        let mut next = self.advance(state, &eval, 0)?;
        next.time = state.time + self.config.dt;
        Ok(next)
    }

    pub fn run(&self, initial: &ParametricCurve) -> Result<Trajectory> {
        self.check_state(initial)?;
        let steps = ((self.config.t_end - initial.time) / self.config.dt).round().max(0.0) as usize;
        let mut traj = Trajectory {
            lambda: self.data_nodes.values().to_vec(),
            times: Vec::new(),
            states: Vec::new(),
            diagnostics: Vec::new(),
            diverged: None,
        };
        let t0 = initial.time;
        let mut state = initial.clone();
        for n in 0..=steps {
            let eval = match self.evaluate(&state) {
                Ok(e) => e,
                Err(e) => {
                    traj.diverged = Some(e.to_string());
                    break;
                }
            };
            let finite = eval.velocity.iter().flatten().all(|v| v.is_finite());
            if finite && (n % self.config.output_every == 0 || n == steps) {
                traj.times.push(state.time);
                traj.states.push(state.sites().to_vec());
                traj.diagnostics.push(eval.diagnostics);
            }
            if n == steps {
                break;
            }
            match self.advance(&state, &eval, n) {
                Ok(mut next) => {
                    next.time = t0 + (n + 1) as f64 * self.config.dt;
                    state = next;
                }
                Err(e) => {
                    traj.diverged = Some(e.to_string());
                    break;
                }
            }
        }
        Ok(traj)
    }
}

pub fn step(state: &ParametricCurve, config: &SimConfig) -> Result<ParametricCurve> {
    Simulation::new(config)?.step(state)
}

pub fn run(initial: &ParametricCurve, config: &SimConfig) -> Result<Trajectory> {
    Simulation::new(config)?.run(initial)
}

/// `X(λ, 0) = (1 + β cos(νλ)) (cos λ, sin λ)` on equispaced periodic nodes.
pub fn initial_closed(beta: f64, nu: i32, nodes: &NodeSet) -> Result<ParametricCurve> {
    let sites = nodes
        .values()
        .iter()
        .map(|&l| {
            let r = 1.0 + beta * (nu as f64 * l).cos();
            [r * l.cos(), r * l.sin()]
        })
        .collect();
    ParametricCurve::new(Topology::Closed, nodes.clone(), sites, 0.0)
}

/// `X(λ, 0) = (λ, b sin(2πλ))` as an open graph.
pub fn initial_open(b: f64, nodes: &NodeSet) -> Result<ParametricCurve> {
    let ys: Vec<f64> = nodes.values().iter().map(|&l| b * (TAU * l).sin()).collect();
    ParametricCurve::open_graph(nodes.clone(), &ys, 0.0)
}

/// Closed relaxation setup: β = 0.3, ν = 3, N_d = 25, N_s = 50, Δt = 1e-3, δ = 4π/N_s, ε = 1.1.
pub fn closed_relaxation_config() -> SimConfig {
    SimConfig {
        topology: Topology::Closed,
        n_data: 25,
        n_sample: 50,
        data_nodes: NodeKind::EquispacedPeriodic,
        alpha: None,
        interval: None,
        kernel: KernelSpec::sbf(1.1),
        delta: DeltaRule::Rule("4pi/Ns".into()),
        mu: 1.0,
        dt: 1e-3,
        t_end: 10.0,
        force: ForceModel::CurvatureRestoring {
            strength: 0.1,
            target_arclength: 1.5 * PI,
        },
        output_every: 100,
    }
}

/// Open filament setup: N_d = 20 KTE (α = 0.85), N_s = 40, Δt = 5e-4, δ = 2/N_s,
/// S_T = 0.001, S_B = 0.1, ε = 1.5.
pub fn open_filament_config(b: f64, omega: f64) -> SimConfig {
    SimConfig {
        topology: Topology::OpenGraph,
        n_data: 20,
        n_sample: 40,
        data_nodes: NodeKind::Kte,
        alpha: Some(0.85),
        interval: None,
        kernel: KernelSpec::sbf(1.5),
        delta: DeltaRule::Rule("2/Ns".into()),
        mu: 1.0,
        dt: 5e-4,
        t_end: 4.0,
        force: ForceModel::TensionBending {
            tensile_stiffness: 0.001,
            bending_stiffness: 0.1,
            target: crate::forces::TargetWave { b, k: TAU, omega },
        },
        output_every: 100,
    }
}
