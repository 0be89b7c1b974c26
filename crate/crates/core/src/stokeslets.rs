//! Regularized (and singular) 2D Stokeslet pressure and velocity fields.
//!
//! The blob is `φ_δ(r) = 3δ³ / (2π (r² + δ²)^{5/2})`. With `R = sqrt(r² + δ²)`,
//! every coefficient below is written in terms of `R` without dividing by `r`,
//! so the fields are finite when an evaluation point sits on a force.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::curve::Point;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlobModel {
    pub delta: f64,
    pub mu: f64,
}

impl BlobModel {
    pub fn new(delta: f64, mu: f64) -> Result<Self> {
        let blob = Self { delta, mu };
        blob.validate()?;
        Ok(blob)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(invalid(format!("regularization delta {} must be positive", self.delta)));
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(invalid(format!("viscosity {} must be positive", self.mu)));
        }
        Ok(())
    }
}

pub fn blob(r: f64, delta: f64) -> f64 {
    3.0 * delta.powi(3) / (2.0 * PI * (r * r + delta * delta).powf(2.5))
}

/// `G_δ(r) = (ln(R + δ) - δ/R) / 2π`
pub fn g_delta(r: f64, delta: f64) -> f64 {
    let big_r = r.hypot(delta);
    ((big_r + delta).ln() - delta / big_r) / (2.0 * PI)
}

/// `G'_δ(r) / r`, finite at `r = 0`.
fn g_prime_over_r(big_r: f64, delta: f64) -> f64 {
    (1.0 / (big_r * (big_r + delta)) + delta / big_r.powi(3)) / (2.0 * PI)
}

pub fn g_delta_prime(r: f64, delta: f64) -> f64 {
    r * g_prime_over_r(r.hypot(delta), delta)
}

pub fn g_delta_second(r: f64, delta: f64) -> f64 {
    let big_r = r.hypot(delta);
    let g = 1.0 / (big_r * (big_r + delta)) + delta / big_r.powi(3);
    let dg = -(2.0 * big_r + delta) / (big_r * (big_r + delta)).powi(2) - 3.0 * delta / big_r.powi(4);
    (g + r * r / big_r * dg) / (2.0 * PI)
}

/// `B'_δ(r) / r`, finite at `r = 0`.
fn bprime_over_r(big_r: f64, delta: f64) -> f64 {
    (2.0 * (big_r + delta).ln() - 1.0 - 2.0 * delta / (big_r + delta)) / (8.0 * PI)
}

/// `(B''_δ - B'_δ/r) / r²`, finite at `r = 0`.
fn hessian_radial_coeff(big_r: f64, delta: f64) -> f64 {
    (big_r + 2.0 * delta) / (4.0 * PI * big_r * (big_r + delta).powi(2))
}

/// `B'_δ(r) = (2r ln(R + δ) - r - 2rδ/(R + δ)) / 8π`
pub fn bprime_delta(r: f64, delta: f64) -> f64 {
    let big_r = r.hypot(delta);
    (2.0 * r * (big_r + delta).ln() - r - 2.0 * r * delta / (big_r + delta)) / (8.0 * PI)
}

pub fn bsecond_delta(r: f64, delta: f64) -> f64 {
    let big_r = r.hypot(delta);
    bprime_over_r(big_r, delta) + r * r * hessian_radial_coeff(big_r, delta)
}

/// Point forces `𝓕_k = -F_k Δλ` from line-force densities.
pub fn assemble_point_forces(densities: &[Point], dlambda: f64) -> Result<Vec<Point>> {
    if !(dlambda > 0.0) {
        return Err(invalid(format!("quadrature weight {dlambda} must be positive")));
    }
    Ok(densities.iter().map(|f| [-f[0] * dlambda, -f[1] * dlambda]).collect())
}

/// Line-force densities at sample sites with their uniform quadrature weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForceSample {
    pub positions: Vec<Point>,
    pub densities: Vec<Point>,
    pub dlambda: f64,
}

impl ForceSample {
    pub fn new(positions: Vec<Point>, densities: Vec<Point>, dlambda: f64) -> Result<Self> {
        if positions.len() != densities.len() {
            return Err(invalid("positions and densities differ in length"));
        }
        if positions.iter().flatten().any(|v| !v.is_finite()) {
            return Err(invalid("force positions must be finite"));
        }
        if !(dlambda > 0.0) {
            return Err(invalid(format!("quadrature weight {dlambda} must be positive")));
        }
        Ok(Self {
            positions,
            densities,
            dlambda,
        })
    }

    pub fn point_forces(&self) -> Vec<Point> {
        self.densities
            .iter()
            .map(|f| [-f[0] * self.dlambda, -f[1] * self.dlambda])
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldSample {
    pub points: Vec<Point>,
    pub pressure: Vec<f64>,
    pub velocity: Vec<Point>,
}

impl FieldSample {
    /// CSV with header `x,y,p,u,v`.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "x,y,p,u,v")?;
        for ((x, p), u) in self.points.iter().zip(&self.pressure).zip(&self.velocity) {
            writeln!(w, "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}", x[0], x[1], p, u[0], u[1])?;
        }
        Ok(())
    }

    pub fn dump_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::io::BufWriter::new(std::fs::File::create(path)?))
    }
}

/// Pressure and velocity at one point; `delta = 0` gives the singular kernels.
fn field_at(x: Point, positions: &[Point], forces: &[Point], delta: f64, mu: f64) -> (f64, Point) {
    let c0 = 1.0 / (8.0 * PI);
    let mut p = 0.0;
    let mut u = [0.0, 0.0];
    for (xk, f) in positions.iter().zip(forces) {
        let d = [x[0] - xk[0], x[1] - xk[1]];
        let r = d[0].hypot(d[1]);
        let big_r = r.hypot(delta);
        let fd = f[0] * d[0] + f[1] * d[1];
        p += fd * g_prime_over_r(big_r, delta);
        let g = ((big_r + delta).ln() - delta / big_r) / (2.0 * PI);
        // 𝓕/8π + (𝓕·∇)∇B_δ - 𝓕 G_δ with ∇∇B_δ = (B'/r) I + [(B'' - B'/r)/r²] d dᵀ
        let iso = c0 + bprime_over_r(big_r, delta) - g;
        let aniso = hessian_radial_coeff(big_r, delta) * fd;
        u[0] += iso * f[0] + aniso * d[0];
        u[1] += iso * f[1] + aniso * d[1];
    }
    (p, [u[0] / mu, u[1] / mu])
}

/// Regularized pressure and velocity at `points` from the sample's point forces.
pub fn evaluate_field(forces: &ForceSample, blob: &BlobModel, points: &[Point]) -> Result<FieldSample> {
    blob.validate()?;
    let f = forces.point_forces();
    let (pressure, velocity) = points
        .iter()
        .map(|&x| field_at(x, &forces.positions, &f, blob.delta, blob.mu))
        .unzip();
    Ok(FieldSample {
        points: points.to_vec(),
        pressure,
        velocity,
    })
}

/// Regularized velocity only, for the time stepper.
pub fn evaluate_velocity(positions: &[Point], point_forces: &[Point], blob: &BlobModel, points: &[Point]) -> Vec<Point> {
    points
        .iter()
        .map(|&x| field_at(x, positions, point_forces, blob.delta, blob.mu).1)
        .collect()
}

/// The `δ → 0` limit: classical 2D Stokeslet, singular on the forces.
pub fn singular_field(forces: &ForceSample, mu: f64, points: &[Point]) -> Result<FieldSample> {
    if !(mu > 0.0) {
        return Err(invalid(format!("viscosity {mu} must be positive")));
    }
    for (i, x) in points.iter().enumerate() {
        if let Some(k) = forces.positions.iter().position(|xk| x[0] == xk[0] && x[1] == xk[1]) {
            return Err(Error::EvaluationAtSingularity { point: i, force: k });
        }
    }
    let f = forces.point_forces();
    let (pressure, velocity) = points
        .iter()
        .map(|&x| field_at(x, &forces.positions, &f, 0.0, mu))
        .unzip();
    Ok(FieldSample {
        points: points.to_vec(),
        pressure,
        velocity,
    })
}

/// Rectangular evaluation grid, row-major in y then x.
pub fn grid(x0: f64, x1: f64, nx: usize, y0: f64, y1: f64, ny: usize) -> Result<Vec<Point>> {
    if nx == 0 || ny == 0 {
        return Err(invalid("grid needs at least one point per axis"));
    }
    let step = |a: f64, b: f64, n: usize, i: usize| if n == 1 { a } else { a + (b - a) * i as f64 / (n - 1) as f64 };
    Ok((0..ny)
        .flat_map(|j| (0..nx).map(move |i| [step(x0, x1, nx, i), step(y0, y1, ny, j)]))
        .collect())
}
