//! Lagrangian curve state and its geometric quantities at data or sample sites.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::interpolation::{LinearOperator, Metric, Scheme};
use crate::nodes::{NodeKind, NodeSet};

/// Norm of `X_λ` below which the parametrization is considered collapsed.
pub const DEGENERATE_TANGENT_NORM: f64 = 1e-12;

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    /// Periodic in λ ∈ [0, 2π), both coordinates interpolated with SBFs.
    Closed,
    /// Graph `X(λ) = (λ, Y(λ))`; only `Y` is interpolated.
    OpenGraph,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParametricCurve {
    topology: Topology,
    nodes: NodeSet,
    sites: Vec<Point>,
    pub time: f64,
}

impl ParametricCurve {
    pub fn new(topology: Topology, nodes: NodeSet, sites: Vec<Point>, time: f64) -> Result<Self> {
        if sites.len() != nodes.len() {
            return Err(invalid(format!("{} data sites for {} nodes", sites.len(), nodes.len())));
        }
        if sites.iter().flatten().any(|v| !v.is_finite()) {
            return Err(invalid("data sites must be finite"));
        }
        match topology {
            Topology::Closed => {
                let (a, b) = nodes.interval();
                if nodes.kind() != NodeKind::EquispacedPeriodic || a != 0.0 || (b - TAU).abs() > 1e-12 {
                    return Err(invalid("closed curves need equispaced periodic nodes on [0, 2π)"));
                }
            }
            Topology::OpenGraph => {
                if sites.iter().zip(nodes.values()).any(|(p, &l)| p[0] != l) {
                    return Err(invalid("open graph data sites must have x = λ"));
                }
            }
        }
        Ok(Self {
            topology,
            nodes,
            sites,
            time,
        })
    }

    /// Open graph curve from y-values at the data nodes.
    pub fn open_graph(nodes: NodeSet, ys: &[f64], time: f64) -> Result<Self> {
        let sites = nodes.values().iter().zip(ys).map(|(&l, &y)| [l, y]).collect();
        Self::new(Topology::OpenGraph, nodes, sites, time)
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn sites(&self) -> &[Point] {
        &self.sites
    }

    pub fn xs(&self) -> Vec<f64> {
        self.sites.iter().map(|p| p[0]).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        self.sites.iter().map(|p| p[1]).collect()
    }

    /// Moves data sites by `displacement`; open graphs only take the y-component.
    pub fn displace(&mut self, displacement: &[Point]) -> Result<()> {
        if displacement.len() != self.sites.len() {
            return Err(invalid("displacement length mismatch"));
        }
        for (p, d) in self.sites.iter_mut().zip(displacement) {
            if self.topology == Topology::Closed {
                p[0] += d[0];
            }
            p[1] += d[1];
        }
        Ok(())
    }

    pub fn check_scheme(&self, scheme: &Scheme) -> Result<()> {
        if self.topology == Topology::Closed {
            match scheme {
                Scheme::Kernel(k) if k.metric == Metric::SbfChordal => {}
                _ => return Err(invalid("closed curves are interpolated with SBF kernels")),
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sites {
    DataSites,
    SampleSites,
}

/// Precomputed operators from a curve's data nodes to one target node set.
#[derive(Debug, Clone)]
pub struct GeometryOperators {
    scheme: Scheme,
    source: NodeSet,
    target: NodeSet,
    ops: BTreeMap<usize, LinearOperator>,
}

impl GeometryOperators {
    /// `orders ⊆ {0, 1, 2, 4}`; values and first derivatives are always built.
    pub fn new(scheme: &Scheme, data_nodes: &NodeSet, target: &NodeSet, orders: &[usize]) -> Result<Self> {
        let mut wanted = vec![0, 1];
        for &n in orders {
            if !matches!(n, 0 | 1 | 2 | 4) {
                return Err(Error::UnsupportedOrder(n));
            }
            if !wanted.contains(&n) {
                wanted.push(n);
            }
        }
        let mut ops = BTreeMap::new();
        for n in wanted {
            ops.insert(n, LinearOperator::build(scheme, data_nodes, target, n)?);
        }
        Ok(Self {
            scheme: *scheme,
            source: data_nodes.clone(),
            target: target.clone(),
            ops,
        })
    }

    pub fn scheme(&self) -> &Scheme {
        &self.scheme
    }

    pub fn target(&self) -> &NodeSet {
        &self.target
    }

    pub fn operator(&self, n: usize) -> Option<&LinearOperator> {
        self.ops.get(&n)
    }

    fn require(&self, n: usize) -> Result<&LinearOperator> {
        self.ops.get(&n).ok_or(Error::UnsupportedOrder(n))
    }

    fn check_source(&self, curve: &ParametricCurve) -> Result<()> {
        if curve.nodes.values() != self.source.values() {
            return Err(invalid("operators were built for different data nodes"));
        }
        Ok(())
    }

    /// `n`-th derivative of both coordinates at the targets (x analytic for graphs).
    pub fn coordinate_derivative(&self, curve: &ParametricCurve, n: usize) -> Result<Vec<Point>> {
        self.check_source(curve)?;
        let op = self.require(n)?;
        let ys = op.apply(&curve.ys())?;
        let xs = match curve.topology {
            Topology::Closed => op.apply(&curve.xs())?,
            Topology::OpenGraph => match n {
                0 => self.target.values().to_vec(),
                1 => vec![1.0; ys.len()],
                _ => vec![0.0; ys.len()],
            },
        };
        Ok(xs.into_iter().zip(ys).map(|(x, y)| [x, y]).collect())
    }

    pub fn positions(&self, curve: &ParametricCurve) -> Result<Vec<Point>> {
        self.coordinate_derivative(curve, 0)
    }

    pub fn geometry(&self, curve: &ParametricCurve) -> Result<GeometryBundle> {
        let positions = self.positions(curve)?;
        let first = self.coordinate_derivative(curve, 1)?;
        let second = match self.ops.contains_key(&2) {
            true => Some(self.coordinate_derivative(curve, 2)?),
            false => None,
        };
        let fourth = match self.ops.contains_key(&4) {
            true => Some(self.coordinate_derivative(curve, 4)?),
            false => None,
        };
        let mut tangents = Vec::with_capacity(first.len());
        let mut normals = Vec::with_capacity(first.len());
        for (j, d) in first.iter().enumerate() {
            let norm = d[0].hypot(d[1]);
            if !(norm >= DEGENERATE_TANGENT_NORM) {
                return Err(Error::DegenerateParametrization { index: j, norm });
            }
            tangents.push([d[0] / norm, d[1] / norm]);
            // tangent rotated by -π/2: outward on counter-clockwise curves
            normals.push([d[1] / norm, -d[0] / norm]);
        }
        let curvature = second.as_ref().map(|dd| {
            first
                .iter()
                .zip(dd)
                .map(|(d, s)| (d[0] * s[1] - d[1] * s[0]) / d[0].hypot(d[1]).powi(3))
                .collect()
        });
        let evaluated_at = if self.target.values() == curve.nodes.values() {
            Sites::DataSites
        } else {
            Sites::SampleSites
        };
        Ok(GeometryBundle {
            lambda: self.target.values().to_vec(),
            positions,
            first_derivatives: first,
            second_derivatives: second,
            fourth_derivatives: fourth,
            unit_tangents: tangents,
            unit_normals: normals,
            curvature,
            evaluated_at,
        })
    }

    /// Rectangle-rule arclength `Σ ‖X_λ‖ Δλ` over equispaced targets.
    pub fn arclength(&self, curve: &ParametricCurve) -> Result<f64> {
        let dl = self
            .target
            .spacing()
            .ok_or_else(|| invalid("arclength needs equispaced sample nodes"))?;
        let first = self.coordinate_derivative(curve, 1)?;
        let mut total = 0.0;
        for (j, d) in first.iter().enumerate() {
            let norm = d[0].hypot(d[1]);
            if !(norm >= DEGENERATE_TANGENT_NORM) {
                return Err(Error::DegenerateParametrization { index: j, norm });
            }
            total += norm;
        }
        Ok(total * dl)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GeometryBundle {
    pub lambda: Vec<f64>,
    pub positions: Vec<Point>,
    pub first_derivatives: Vec<Point>,
    pub second_derivatives: Option<Vec<Point>>,
    pub fourth_derivatives: Option<Vec<Point>>,
    pub unit_tangents: Vec<Point>,
    pub unit_normals: Vec<Point>,
    /// Signed curvature, positive on counter-clockwise circles.
    pub curvature: Option<Vec<f64>>,
    pub evaluated_at: Sites,
}

impl GeometryBundle {
    /// CSV with header `lambda,x,y,xp,yp,kappa,nx,ny`.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "lambda,x,y,xp,yp,kappa,nx,ny")?;
        for j in 0..self.lambda.len() {
            let kappa = self.curvature.as_ref().map_or(f64::NAN, |k| k[j]);
            let (p, d, n) = (self.positions[j], self.first_derivatives[j], self.unit_normals[j]);
            writeln!(
                w,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                self.lambda[j], p[0], p[1], d[0], d[1], kappa, n[0], n[1]
            )?;
        }
        Ok(())
    }

    pub fn dump_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::io::BufWriter::new(std::fs::File::create(path)?))
    }
}

pub fn geometry(curve: &ParametricCurve, scheme: &Scheme, target: &NodeSet, orders: &[usize]) -> Result<GeometryBundle> {
    curve.check_scheme(scheme)?;
    GeometryOperators::new(scheme, curve.nodes(), target, orders)?.geometry(curve)
}

pub fn arclength(curve: &ParametricCurve, scheme: &Scheme, sample: &NodeSet) -> Result<f64> {
    curve.check_scheme(scheme)?;
    GeometryOperators::new(scheme, curve.nodes(), sample, &[1])?.arclength(curve)
}

pub fn sample_positions(curve: &ParametricCurve, scheme: &Scheme, sample: &NodeSet) -> Result<Vec<Point>> {
    curve.check_scheme(scheme)?;
    GeometryOperators::new(scheme, curve.nodes(), sample, &[0])?.positions(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interpolation::KernelSpec;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn circle(n: usize, radius: f64) -> ParametricCurve {
        let nodes = NodeSet::equispaced_periodic(n, 0.0, TAU).unwrap();
        let sites = nodes.values().iter().map(|l| [radius * l.cos(), radius * l.sin()]).collect();
        ParametricCurve::new(Topology::Closed, nodes, sites, 0.0).unwrap()
    }

    fn sbf(eps: f64) -> Scheme {
        KernelSpec::sbf(eps).into()
    }

    fn max_curvature_error(n: usize, radius: f64) -> f64 {
        let c = circle(n, radius);
        let target = NodeSet::equispaced_periodic(97, 0.0, TAU).unwrap();
        let g = geometry(&c, &sbf(1.1), &target, &[2]).unwrap();
        g.curvature.unwrap().iter().map(|k| (k - 1.0 / radius).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn circle_curvature() {
        let e25 = max_curvature_error(25, 1.0);
        assert!(e25 < 1e-4, "{e25}");
        assert!(max_curvature_error(15, 1.0) > e25);
        assert!(max_curvature_error(25, 0.75) < 1e-3);
    }

    #[test]
    fn unit_vectors_are_orthonormal() {
        let nodes = NodeSet::equispaced_periodic(20, 0.0, TAU).unwrap();
        let sites = nodes
            .values()
            .iter()
            .map(|l| {
                let r = 1.0 + 0.3 * (3.0 * l).cos();
                [r * l.cos(), r * l.sin()]
            })
            .collect();
        let c = ParametricCurve::new(Topology::Closed, nodes, sites, 0.0).unwrap();
        let target = NodeSet::equispaced_periodic(64, 0.0, TAU).unwrap();
        let g = geometry(&c, &sbf(1.1), &target, &[]).unwrap();
        assert_eq!(g.evaluated_at, Sites::SampleSites);
        for (t, n) in g.unit_tangents.iter().zip(&g.unit_normals) {
            assert_abs_diff_eq!(t[0].hypot(t[1]), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(n[0].hypot(n[1]), 1.0, epsilon = 1e-12);
            assert!((t[0] * n[0] + t[1] * n[1]).abs() <= 1e-12);
        }
    }

    #[test]
    fn straight_open_graph() {
        let nodes = NodeSet::kte(12, 0.0, 1.0, 0.85).unwrap();
        let c = ParametricCurve::open_graph(nodes, &[0.0; 12], 0.0).unwrap();
        let target = NodeSet::equispaced(30, 0.0, 1.0).unwrap();
        let g = geometry(&c, &KernelSpec::rbf(3.0).into(), &target, &[2, 4]).unwrap();
        for j in 0..30 {
            assert_eq!(g.positions[j][0], target.values()[j]);
            assert_eq!(g.unit_tangents[j], [1.0, 0.0]);
            assert_eq!(g.unit_normals[j], [0.0, -1.0]);
            assert!(g.curvature.as_ref().unwrap()[j].abs() <= 1e-10);
            assert_eq!(g.fourth_derivatives.as_ref().unwrap()[j][0], 0.0);
        }
        assert_abs_diff_eq!(arclength(&c, &KernelSpec::rbf(3.0).into(), &target).unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn circle_arclength() {
        let sample = NodeSet::equispaced_periodic(50, 0.0, TAU).unwrap();
        assert_abs_diff_eq!(arclength(&circle(25, 1.0), &sbf(1.1), &sample).unwrap(), TAU, epsilon = 1e-6);
        assert_abs_diff_eq!(arclength(&circle(25, 0.75), &sbf(1.1), &sample).unwrap(), 1.5 * PI, epsilon = 1e-6);
    }

    #[test]
    fn sampled_positions() {
        let c = circle(25, 1.0);
        let same = sample_positions(&c, &sbf(1.1), c.nodes()).unwrap();
        for (p, q) in same.iter().zip(c.sites()) {
            assert!((p[0] - q[0]).abs() < 1e-10 && (p[1] - q[1]).abs() < 1e-10);
        }
        let target = NodeSet::equispaced_periodic(333, 0.0, TAU).unwrap();
        let pts = sample_positions(&c, &sbf(1.1), &target).unwrap();
        for (p, l) in pts.iter().zip(target.values()) {
            assert!((p[0] - l.cos()).hypot(p[1] - l.sin()) < 1e-5);
        }
    }

    #[test]
    fn rotation_equivariance() {
        let base = circle(18, 1.0);
        let nodes = base.nodes().clone();
        let shape: Vec<Point> = nodes
            .values()
            .iter()
            .map(|l| {
                let r = 1.0 + 0.2 * (2.0 * l).sin();
                [r * l.cos(), r * l.sin()]
            })
            .collect();
        let theta: f64 = 0.7;
        let (s, co) = theta.sin_cos();
        let rot = |p: Point| [co * p[0] - s * p[1], s * p[0] + co * p[1]];
        let c0 = ParametricCurve::new(Topology::Closed, nodes.clone(), shape.clone(), 0.0).unwrap();
        let c1 = ParametricCurve::new(Topology::Closed, nodes, shape.into_iter().map(rot).collect(), 0.0).unwrap();
        let target = NodeSet::equispaced_periodic(40, 0.0, TAU).unwrap();
        let g0 = geometry(&c0, &sbf(1.1), &target, &[2]).unwrap();
        let g1 = geometry(&c1, &sbf(1.1), &target, &[2]).unwrap();
        for j in 0..40 {
            for (a, b) in [
                (rot(g0.positions[j]), g1.positions[j]),
                (rot(g0.unit_tangents[j]), g1.unit_tangents[j]),
                (rot(g0.unit_normals[j]), g1.unit_normals[j]),
            ] {
                assert!((a[0] - b[0]).abs() < 1e-10 && (a[1] - b[1]).abs() < 1e-10);
            }
            let (k0, k1) = (g0.curvature.as_ref().unwrap()[j], g1.curvature.as_ref().unwrap()[j]);
            assert!((k0 - k1).abs() <= 1e-10 * k0.abs().max(1.0));
        }
        let l0 = arclength(&c0, &sbf(1.1), &target).unwrap();
        let l1 = arclength(&c1, &sbf(1.1), &target).unwrap();
        assert!((l0 - l1).abs() <= 1e-10 * l0);
    }

    #[test]
    fn arclength_refines() {
        let nodes = NodeSet::chebyshev(16, 0.0, 1.0).unwrap();
        let ys: Vec<f64> = nodes.values().iter().map(|l| 0.3 * (2.0 * PI * l).sin()).collect();
        let c = ParametricCurve::open_graph(nodes, &ys, 0.0).unwrap();
        let scheme: Scheme = KernelSpec::rbf(3.0).into();
        let lengths: Vec<f64> = [25, 50, 100, 200]
            .iter()
            .map(|&n| arclength(&c, &scheme, &NodeSet::equispaced(n, 0.0, 1.0).unwrap()).unwrap())
            .collect();
        let diffs: Vec<f64> = lengths.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        assert!(diffs.windows(2).all(|d| d[1] < d[0]), "{diffs:?}");
    }

    #[test]
    fn degenerate_and_invalid_inputs() {
        let nodes = NodeSet::equispaced_periodic(8, 0.0, TAU).unwrap();
        let c = ParametricCurve::new(Topology::Closed, nodes, vec![[0.5, 0.5]; 8], 0.0).unwrap();
        let target = NodeSet::equispaced_periodic(16, 0.0, TAU).unwrap();
        assert!(matches!(
            geometry(&c, &sbf(1.0), &target, &[]),
            Err(Error::DegenerateParametrization { .. })
        ));
        assert!(geometry(&c, &sbf(1.0), &target, &[3]).is_err());
        assert!(geometry(&c, &KernelSpec::rbf(1.0).into(), &target, &[]).is_err());
        let cheb = NodeSet::chebyshev(4, 0.0, 1.0).unwrap();
        assert!(ParametricCurve::new(Topology::OpenGraph, cheb.clone(), vec![[0.0, 0.0]; 4], 0.0).is_err());
        assert!(ParametricCurve::new(Topology::Closed, cheb, vec![[0.0, 0.0]; 4], 0.0).is_err());
    }

    #[test]
    fn geometry_csv_header() {
        let c = circle(10, 1.0);
        let g = geometry(&c, &sbf(1.1), c.nodes(), &[2]).unwrap();
        assert_eq!(g.evaluated_at, Sites::DataSites);
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("lambda,x,y,xp,yp,kappa,nx,ny\n"));
        assert_eq!(text.lines().count(), 11);
    }
}
