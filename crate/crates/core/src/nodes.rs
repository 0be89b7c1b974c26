//! Parametric node families used for data sites and sample sites.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    /// `N` nodes on `[a, b)`, period point excluded.
    EquispacedPeriodic,
    /// Midpoint-style nodes carrying the uniform weight `(b - a) / N`.
    Equispaced,
    Chebyshev,
    /// Kosloff/Tal-Ezer mapped Chebyshev nodes.
    Kte,
}

/// An ordered set of parameter values on an interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeSet {
    kind: NodeKind,
    interval: (f64, f64),
    alpha: Option<f64>,
    values: Vec<f64>,
}

fn check_interval(n: usize, min_n: usize, a: f64, b: f64) -> Result<()> {
    if n < min_n {
        return Err(invalid(format!("node count {n} < {min_n}")));
    }
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(invalid(format!("interval [{a}, {b}] is empty or not finite")));
    }
    Ok(())
}

/// Chebyshev points `cos((2k-1)π/2N)` on `[-1, 1]`, ascending.
fn canonical_chebyshev(n: usize) -> Vec<f64> {
    // k = N..1 gives ascending order
    (1..=n)
        .rev()
        .map(|k| ((2 * k - 1) as f64 * PI / (2 * n) as f64).cos())
        .collect()
}

fn affine(x: f64, a: f64, b: f64) -> f64 {
    0.5 * (a + b) + 0.5 * (b - a) * x
}

impl NodeSet {
    pub fn equispaced_periodic(n: usize, a: f64, b: f64) -> Result<Self> {
        check_interval(n, 1, a, b)?;
        let h = (b - a) / n as f64;
        Ok(Self {
            kind: NodeKind::EquispacedPeriodic,
            interval: (a, b),
            alpha: None,
            values: (0..n).map(|k| a + k as f64 * h).collect(),
        })
    }

    pub fn equispaced(n: usize, a: f64, b: f64) -> Result<Self> {
        check_interval(n, 2, a, b)?;
        let h = (b - a) / n as f64;
        Ok(Self {
            kind: NodeKind::Equispaced,
            interval: (a, b),
            alpha: None,
            values: (0..n).map(|j| a + (j as f64 + 0.5) * h).collect(),
        })
    }

    pub fn chebyshev(n: usize, a: f64, b: f64) -> Result<Self> {
        check_interval(n, 1, a, b)?;
        Ok(Self {
            kind: NodeKind::Chebyshev,
            interval: (a, b),
            alpha: None,
            values: canonical_chebyshev(n)
                .into_iter()
                .map(|x| affine(x, a, b))
                .collect(),
        })
    }

    /// Mapped Chebyshev nodes. The map `x ↦ asin(αx)/asin(α)` is applied on
    /// the canonical interval `[-1, 1]` before the affine map to `[a, b]`, so
    /// that `α = 1` gives equispaced nodes and `α → 0` recovers Chebyshev.
    pub fn kte(n: usize, a: f64, b: f64, alpha: f64) -> Result<Self> {
        check_interval(n, 1, a, b)?;
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(invalid(format!("KTE alpha {alpha} outside (0, 1]")));
        }
        let scale = alpha.asin();
        Ok(Self {
            kind: NodeKind::Kte,
            interval: (a, b),
            alpha: Some(alpha),
            values: canonical_chebyshev(n)
                .into_iter()
                .map(|x| affine((alpha * x).asin() / scale, a, b))
                .collect(),
        })
    }

    /// Dispatch on `kind`; `alpha` is only read for [`NodeKind::Kte`].
    pub fn generate(kind: NodeKind, n: usize, a: f64, b: f64, alpha: Option<f64>) -> Result<Self> {
        match kind {
            NodeKind::EquispacedPeriodic => Self::equispaced_periodic(n, a, b),
            NodeKind::Equispaced => Self::equispaced(n, a, b),
            NodeKind::Chebyshev => Self::chebyshev(n, a, b),
            NodeKind::Kte => {
                let alpha = alpha.ok_or_else(|| invalid("KTE nodes need alpha"))?;
                Self::kte(n, a, b, alpha)
            }
        }
    }

    /// Arbitrary strictly increasing values on `[a, b]`.
    pub fn from_values(kind: NodeKind, a: f64, b: f64, values: Vec<f64>) -> Result<Self> {
        check_interval(values.len(), 1, a, b)?;
        if values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(invalid("node values must be strictly increasing"));
        }
        if values.iter().any(|&v| v < a || v > b) {
            return Err(invalid("node values outside the interval"));
        }
        Ok(Self {
            kind,
            interval: (a, b),
            alpha: None,
            values,
        })
    }

    pub fn kind(&self) -> NodeKind {
        self.kind
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Uniform quadrature weight for equispaced families, `(b - a) / N`.
    pub fn spacing(&self) -> Option<f64> {
        match self.kind {
            NodeKind::Equispaced | NodeKind::EquispacedPeriodic => {
                Some((self.interval.1 - self.interval.0) / self.len() as f64)
            }
            _ => None,
        }
    }
}
