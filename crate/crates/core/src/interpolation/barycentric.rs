use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};
use crate::nodes::NodeSet;

/// Lagrange interpolant in barycentric form.
#[derive(Debug, Clone)]
pub struct BarycentricInterpolant {
    nodes: NodeSet,
    weights: Vec<f64>,
}

impl BarycentricInterpolant {
    /// Weights `w_k = 1 / Π_{j≠k} (λ_k - λ_j)`, rescaled by a common factor
    /// (the interval capacity) so large node counts do not overflow.
    pub fn build(nodes: &NodeSet) -> Result<Self> {
        let x = nodes.values();
        if x.is_empty() {
            return Err(invalid("barycentric interpolant needs at least one node"));
        }
        let span = x[x.len() - 1] - x[0];
        let scale = if span > 0.0 { 4.0 / span } else { 1.0 };
        let mut weights = Vec::with_capacity(x.len());
        for (k, &xk) in x.iter().enumerate() {
            let mut prod = 1.0;
            for (j, &xj) in x.iter().enumerate() {
                if j != k {
                    let d = xk - xj;
                    if d == 0.0 {
                        return Err(invalid(format!("duplicate nodes at indices {j} and {k}")));
                    }
                    prod *= d * scale;
                }
            }
            weights.push(1.0 / prod);
        }
        Ok(Self {
            nodes: nodes.clone(),
            weights,
        })
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Second (true) barycentric formula; a node hit returns the datum exactly.
    pub fn eval(&self, data: &[f64], lambda: f64) -> Result<f64> {
        self.check_len(data)?;
        let mut num = 0.0;
        let mut den = 0.0;
        for ((&xk, &wk), &yk) in self.nodes.values().iter().zip(&self.weights).zip(data) {
            let d = lambda - xk;
            if d == 0.0 {
                return Ok(yk);
            }
            let t = wk / d;
            num += t * yk;
            den += t;
        }
        Ok(num / den)
    }

    /// Rows of Lagrange basis values `ℓ_k(λ_j)` at `targets`.
    pub fn evaluation_matrix(&self, targets: &[f64]) -> DMatrix<f64> {
        let x = self.nodes.values();
        let mut m = DMatrix::zeros(targets.len(), x.len());
        for (j, &t) in targets.iter().enumerate() {
            if let Some(k) = x.iter().position(|&xk| xk == t) {
                m[(j, k)] = 1.0;
                continue;
            }
            let mut den = 0.0;
            for (k, (&xk, &wk)) in x.iter().zip(&self.weights).enumerate() {
                let v = wk / (t - xk);
                m[(j, k)] = v;
                den += v;
            }
            for k in 0..x.len() {
                m[(j, k)] /= den;
            }
        }
        m
    }

    /// First-derivative matrix at the nodes, with diagonal entries from the
    /// negative-sum trick so that constants are differentiated to zero.
    pub fn differentiation_matrix(&self) -> DMatrix<f64> {
        let x = self.nodes.values();
        let w = &self.weights;
        let n = x.len();
        let mut d = DMatrix::zeros(n, n);
        for i in 0..n {
            let mut diag = 0.0;
            for j in 0..n {
                if i != j {
                    let v = (w[j] / w[i]) / (x[i] - x[j]);
                    d[(i, j)] = v;
                    diag -= v;
                }
            }
            d[(i, i)] = diag;
        }
        d
    }

    /// `n`-th derivative matrix at the nodes (first-order matrix applied `n` times).
    pub fn nodal_derivative_matrix(&self, n: usize) -> Result<DMatrix<f64>> {
        if !(1..=4).contains(&n) {
            return Err(Error::UnsupportedOrder(n));
        }
        let d = self.differentiation_matrix();
        let mut out = d.clone();
        for _ in 1..n {
            out = &d * &out;
        }
        Ok(out)
    }

    /// Two-stage operator: differentiate at the nodes, then re-interpolate the
    /// derivative samples and evaluate at `targets`. `n = 0` is plain evaluation.
    pub fn two_stage_matrix(&self, n: usize, targets: &[f64]) -> Result<DMatrix<f64>> {
        let eval = self.evaluation_matrix(targets);
        if n == 0 {
            return Ok(eval);
        }
        Ok(eval * self.nodal_derivative_matrix(n)?)
    }

    pub fn derivative_two_stage(&self, data: &[f64], n: usize, target: &NodeSet) -> Result<Vec<f64>> {
        self.check_len(data)?;
        if !(1..=4).contains(&n) {
            return Err(Error::UnsupportedOrder(n));
        }
        let m = self.two_stage_matrix(n, target.values())?;
        let y = nalgebra::DVector::from_column_slice(data);
        Ok((m * y).as_slice().to_vec())
    }

    fn check_len(&self, data: &[f64]) -> Result<()> {
        if data.len() != self.nodes.len() {
            return Err(invalid(format!(
                "data length {} does not match {} nodes",
                data.len(),
                self.nodes.len()
            )));
        }
        Ok(())
    }
}
