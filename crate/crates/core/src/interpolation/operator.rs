use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::barycentric::BarycentricInterpolant;
use super::kernel::{coincide, KernelSpec};
use crate::error::{invalid, Error, Result};
use crate::nodes::NodeSet;

/// Condition estimate above which an operator carries an ill-conditioning warning.
pub const CONDITION_WARNING_THRESHOLD: f64 = 1e14;

/// Interpolation scheme used to build evaluation and differentiation operators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum Scheme {
    Kernel(KernelSpec),
    LagrangeChebyshev,
}

impl From<KernelSpec> for Scheme {
    fn from(spec: KernelSpec) -> Self {
        Scheme::Kernel(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    RbfFamily,
    LagrangeChebyshevTwoStage,
}

/// Dense `N_out × N_d` matrix mapping data-site samples to values (n = 0) or
/// n-th λ-derivatives of the interpolant at the target nodes.
#[derive(Debug, Clone)]
pub struct LinearOperator {
    source: NodeSet,
    target: NodeSet,
    order: usize,
    matrix: DMatrix<f64>,
    construction: Construction,
    condition: Option<f64>,
}

/// Kernel interpolation matrix `A_jk = φ(r_jk)`.
pub fn build_interp_matrix(spec: &KernelSpec, nodes: &NodeSet) -> Result<DMatrix<f64>> {
    spec.validate()?;
    let x = nodes.values();
    for (i, &a) in x.iter().enumerate() {
        for (j, &b) in x.iter().enumerate().skip(i + 1) {
            if coincide(spec.metric, a, b) {
                return Err(Error::SingularSystem(format!(
                    "nodes {i} and {j} coincide under the {:?} metric",
                    spec.metric
                )));
            }
        }
    }
    let n = x.len();
    let mut a = DMatrix::zeros(n, n);
    for j in 0..n {
        a[(j, j)] = spec.eval(x[j], x[j]);
        for k in j + 1..n {
            let v = spec.eval(x[j], x[k]);
            a[(j, k)] = v;
            a[(k, j)] = v;
        }
    }
    Ok(a)
}

/// `B^n_jk = ∂ⁿφ(r(λ))/∂λⁿ` at target `j`, center `k`.
pub fn build_kernel_block(spec: &KernelSpec, source: &[f64], target: &[f64], n: usize) -> Result<DMatrix<f64>> {
    let mut b = DMatrix::zeros(target.len(), source.len());
    for (j, &t) in target.iter().enumerate() {
        for (k, &c) in source.iter().enumerate() {
            b[(j, k)] = spec.eval_derivative(n, t, c)?;
        }
    }
    Ok(b)
}

/// Ratio of extreme eigenvalue magnitudes of a symmetric matrix.
pub fn symmetric_condition(a: &DMatrix<f64>) -> f64 {
    let eig = a.clone().symmetric_eigenvalues();
    let (lo, hi) = eig
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v.abs()), hi.max(v.abs())));
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

impl LinearOperator {
    pub fn build(scheme: &Scheme, source: &NodeSet, target: &NodeSet, n: usize) -> Result<Self> {
        if n > 4 {
            return Err(Error::UnsupportedOrder(n));
        }
        match scheme {
            Scheme::Kernel(spec) => Self::build_kernel(spec, source, target, n),
            Scheme::LagrangeChebyshev => {
                let interp = BarycentricInterpolant::build(source)?;
                Ok(Self {
                    source: source.clone(),
                    target: target.clone(),
                    order: n,
                    matrix: interp.two_stage_matrix(n, target.values())?,
                    construction: Construction::LagrangeChebyshevTwoStage,
                    condition: None,
                })
            }
        }
    }

    /// `B^n A⁻¹`, obtained from an LU solve of `A X = (B^n)ᵀ` (A is symmetric).
    fn build_kernel(spec: &KernelSpec, source: &NodeSet, target: &NodeSet, n: usize) -> Result<Self> {
        let a = build_interp_matrix(spec, source)?;
        let b = build_kernel_block(spec, source.values(), target.values(), n)?;
        let condition = symmetric_condition(&a);
        let lu = a.lu();
        let xt = lu
            .solve(&b.transpose())
            .ok_or_else(|| Error::SingularSystem("LU factorization of the kernel matrix failed".into()))?;
        let matrix = xt.transpose();
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularSystem("operator has non-finite entries".into()));
        }
        Ok(Self {
            source: source.clone(),
            target: target.clone(),
            order: n,
            matrix,
            construction: Construction::RbfFamily,
            condition: Some(condition),
        })
    }

    pub fn apply(&self, data: &[f64]) -> Result<Vec<f64>> {
        if data.len() != self.matrix.ncols() {
            return Err(invalid(format!(
                "operator expects {} samples, got {}",
                self.matrix.ncols(),
                data.len()
            )));
        }
        let y = DVector::from_column_slice(data);
        Ok((&self.matrix * y).as_slice().to_vec())
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn source(&self) -> &NodeSet {
        &self.source
    }

    pub fn target(&self) -> &NodeSet {
        &self.target
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    /// Eigenvalue-ratio estimate of the kernel matrix (kernel schemes only).
    pub fn condition(&self) -> Option<f64> {
        self.condition
    }

    pub fn ill_conditioned(&self) -> bool {
        self.condition.is_some_and(|c| c > CONDITION_WARNING_THRESHOLD)
    }

    pub fn warning(&self) -> Option<String> {
        self.ill_conditioned().then(|| {
            format!(
                "kernel matrix condition estimate {:.3e} exceeds {:.0e}",
                self.condition.unwrap_or(f64::INFINITY),
                CONDITION_WARNING_THRESHOLD
            )
        })
    }

    /// Writes the matrix as CSV: a header of source parameter values, then one
    /// row per target node prefixed with its parameter value.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        write!(w, "target_lambda")?;
        for s in self.source.values() {
            write!(w, ",{s:.17e}")?;
        }
        writeln!(w)?;
        for (j, t) in self.target.values().iter().enumerate() {
            write!(w, "{t:.17e}")?;
            for k in 0..self.matrix.ncols() {
                write!(w, ",{:.17e}", self.matrix[(j, k)])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn dump_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_csv(f)
    }
}
