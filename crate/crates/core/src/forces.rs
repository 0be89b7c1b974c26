//! Line-force densities on the structure, evaluated at sample sites.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::curve::{GeometryBundle, GeometryOperators, ParametricCurve, Point, DEGENERATE_TANGENT_NORM};
use crate::error::{invalid, Error, Result};
use crate::interpolation::Scheme;
use crate::nodes::NodeSet;

/// Target wave `X^I(λ, t) = (λ, b sin(kλ - ωt))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetWave {
    pub b: f64,
    #[serde(default = "default_wavenumber")]
    pub k: f64,
    pub omega: f64,
}

fn default_wavenumber() -> f64 {
    2.0 * PI
}

impl TargetWave {
    /// `∂⁴X^I/∂λ⁴ = (0, b k⁴ sin(kλ - ωt))`.
    pub fn fourth_derivative(&self, lambda: f64, t: f64) -> Point {
        [0.0, self.b * self.k.powi(4) * (self.k * lambda - self.omega * t).sin()]
    }
}

fn default_strength() -> f64 {
    0.1
}

fn default_target_arclength() -> f64 {
    1.5 * PI
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum ForceModel {
    /// No forces; the structure stays put.
    None,
    /// `F = -2 sin(3λ) X_λ`
    PrescribedTangential,
    /// `F = -s κ n̂ (L - L₀)` with `n̂` the inward normal (see `curvature_restoring`).
    CurvatureRestoring {
        #[serde(default = "default_strength")]
        strength: f64,
        #[serde(default = "default_target_arclength")]
        target_arclength: f64,
    },
    TensionBending {
        tensile_stiffness: f64,
        bending_stiffness: f64,
        target: TargetWave,
    },
}

impl ForceModel {
    pub fn validate(&self) -> Result<()> {
        if let ForceModel::TensionBending {
            tensile_stiffness,
            bending_stiffness,
            ..
        } = self
        {
            if !(*tensile_stiffness >= 0.0 && *bending_stiffness >= 0.0) {
                return Err(invalid("stiffnesses must be non-negative"));
            }
        }
        Ok(())
    }

    /// Derivative orders the model reads at sample sites.
    fn sample_orders(&self) -> &'static [usize] {
        match self {
            ForceModel::None | ForceModel::PrescribedTangential => &[],
            ForceModel::CurvatureRestoring { .. } => &[2],
            ForceModel::TensionBending { .. } => &[4],
        }
    }
}

/// `F(λ_j) = -2 sin(3λ_j) X_λ(λ_j)`, tangential by construction.
pub fn prescribed_tangential(geom: &GeometryBundle) -> Vec<Point> {
    geom.lambda
        .iter()
        .zip(&geom.first_derivatives)
        .map(|(&l, d)| {
            let s = -2.0 * (3.0 * l).sin();
            [s * d[0], s * d[1]]
        })
        .collect()
}

/// `F = -s κ n̂ (L - L₀)`.
///
/// `κ n̂` is taken as the curvature vector `X_ss`, i.e. the signed curvature
/// times the inward normal `-n̂_out`. With `𝓕 = -F Δλ` this pulls the fluid
/// inward where `L > L₀`, which is the restoring direction.
pub fn curvature_restoring(geom: &GeometryBundle, arclength: f64, strength: f64, target_arclength: f64) -> Result<Vec<Point>> {
    let kappa = geom
        .curvature
        .as_ref()
        .ok_or_else(|| invalid("curvature restoring force needs second derivatives"))?;
    let c = -strength * (arclength - target_arclength);
    Ok(kappa
        .iter()
        .zip(&geom.unit_normals)
        .map(|(k, n)| [-c * k * n[0], -c * k * n[1]])
        .collect())
}

/// Operators needed to evaluate a force model on one curve discretization.
#[derive(Debug, Clone)]
pub struct ForceOperators {
    sample: GeometryOperators,
    /// Data → data first derivatives, for the intermediate tension vector.
    data: Option<GeometryOperators>,
}

/// Densities at sample sites with the geometry they were computed from.
#[derive(Debug, Clone)]
pub struct ForceEvaluation {
    pub geometry: GeometryBundle,
    pub densities: Vec<Point>,
    pub arclength: Option<f64>,
}

impl ForceOperators {
    pub fn new(scheme: &Scheme, data_nodes: &NodeSet, sample: &NodeSet, model: &ForceModel) -> Result<Self> {
        model.validate()?;
        let sample_ops = GeometryOperators::new(scheme, data_nodes, sample, model.sample_orders())?;
        let data = match model {
            ForceModel::TensionBending { .. } => Some(GeometryOperators::new(scheme, data_nodes, data_nodes, &[1])?),
            _ => None,
        };
        Ok(Self { sample: sample_ops, data })
    }

    pub fn sample(&self) -> &GeometryOperators {
        &self.sample
    }

    /// `F^T = ∂/∂λ (S_T (‖X_λ‖ - 1) X_λ/‖X_λ‖)`: the bracket is formed at data
    /// nodes, then differentiated onto the sample nodes.
    pub fn tension(&self, curve: &ParametricCurve, tensile_stiffness: f64) -> Result<Vec<Point>> {
        let data = self
            .data
            .as_ref()
            .ok_or_else(|| invalid("tension needs data-site derivative operators"))?;
        let d1 = data.coordinate_derivative(curve, 1)?;
        let mut qx = Vec::with_capacity(d1.len());
        let mut qy = Vec::with_capacity(d1.len());
        for (j, d) in d1.iter().enumerate() {
            let norm = d[0].hypot(d[1]);
            if !(norm >= DEGENERATE_TANGENT_NORM) {
                return Err(Error::DegenerateParametrization { index: j, norm });
            }
            let s = tensile_stiffness * (norm - 1.0) / norm;
            qx.push(s * d[0]);
            qy.push(s * d[1]);
        }
        let op = self.sample.operator(1).ok_or(Error::UnsupportedOrder(1))?;
        let (fx, fy) = (op.apply(&qx)?, op.apply(&qy)?);
        Ok(fx.into_iter().zip(fy).map(|(x, y)| [x, y]).collect())
    }

    /// `F^B = S_B (X_λλλλ - X^I_λλλλ)` with the target derivative in closed form.
    pub fn bending(&self, curve: &ParametricCurve, bending_stiffness: f64, target: &TargetWave, t: f64) -> Result<Vec<Point>> {
        let d4 = self.sample.coordinate_derivative(curve, 4)?;
        Ok(d4
            .iter()
            .zip(self.sample.target().values())
            .map(|(d, &l)| {
                let ti = target.fourth_derivative(l, t);
                [bending_stiffness * (d[0] - ti[0]), bending_stiffness * (d[1] - ti[1])]
            })
            .collect())
    }

    pub fn evaluate(&self, curve: &ParametricCurve, t: f64, model: &ForceModel) -> Result<ForceEvaluation> {
        let geometry = self.sample.geometry(curve)?;
        let n = geometry.lambda.len();
        let (densities, arclength) = match *model {
            ForceModel::None => (vec![[0.0, 0.0]; n], None),
            ForceModel::PrescribedTangential => (prescribed_tangential(&geometry), None),
            ForceModel::CurvatureRestoring {
                strength,
                target_arclength,
            } => {
                let len = self.sample.arclength(curve)?;
                (curvature_restoring(&geometry, len, strength, target_arclength)?, Some(len))
            }
            ForceModel::TensionBending {
                tensile_stiffness,
                bending_stiffness,
                ref target,
            } => {
                let ft = self.tension(curve, tensile_stiffness)?;
                let fb = self.bending(curve, bending_stiffness, target, t)?;
                let sum = ft.iter().zip(&fb).map(|(a, b)| [a[0] + b[0], a[1] + b[1]]).collect();
                (sum, None)
            }
        };
        Ok(ForceEvaluation {
            geometry,
            densities,
            arclength,
        })
    }
}

pub fn tension(curve: &ParametricCurve, scheme: &Scheme, sample: &NodeSet, tensile_stiffness: f64) -> Result<Vec<Point>> {
    let model = ForceModel::TensionBending {
        tensile_stiffness,
        bending_stiffness: 0.0,
        target: TargetWave { b: 0.0, k: 2.0 * PI, omega: 0.0 },
    };
    ForceOperators::new(scheme, curve.nodes(), sample, &model)?.tension(curve, tensile_stiffness)
}

pub fn bending(
    curve: &ParametricCurve,
    scheme: &Scheme,
    sample: &NodeSet,
    t: f64,
    bending_stiffness: f64,
    target: &TargetWave,
) -> Result<Vec<Point>> {
    let model = ForceModel::TensionBending {
        tensile_stiffness: 0.0,
        bending_stiffness,
        target: *target,
    };
    ForceOperators::new(scheme, curve.nodes(), sample, &model)?.bending(curve, bending_stiffness, target, t)
}

pub fn total_force(curve: &ParametricCurve, scheme: &Scheme, sample: &NodeSet, t: f64, model: &ForceModel) -> Result<Vec<Point>> {
    curve.check_scheme(scheme)?;
    Ok(ForceOperators::new(scheme, curve.nodes(), sample, model)?
        .evaluate(curve, t, model)?
        .densities)
}

/// CSV with header `lambda,Fx,Fy`.
pub fn write_forces_csv(lambda: &[f64], densities: &[Point], mut w: impl Write) -> Result<()> {
    writeln!(w, "lambda,Fx,Fy")?;
    for (l, f) in lambda.iter().zip(densities) {
        writeln!(w, "{l:.17e},{:.17e},{:.17e}", f[0], f[1])?;
    }
    Ok(())
}

pub fn dump_forces_csv(lambda: &[f64], densities: &[Point], path: impl AsRef<Path>) -> Result<()> {
    write_forces_csv(lambda, densities, std::io::BufWriter::new(std::fs::File::create(path)?))
}
