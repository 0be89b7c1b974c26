use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    /// `φ(r) = sqrt(1 + (εr)²)`
    Multiquadric,
    /// `φ(r) = r`
    LinearSpline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Chord length between `(cos λ, sin λ)` and `(cos λ_k, sin λ_k)`.
    SbfChordal,
    /// `|λ - λ_k|`
    RbfAbsolute,
}

/// Radial kernel together with the parametric distance it is composed with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    /// Shape parameter; ignored by the linear spline.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    pub metric: Metric,
}

fn default_epsilon() -> f64 {
    1.0
}

impl KernelSpec {
    pub fn sbf(epsilon: f64) -> Self {
        Self {
            family: KernelFamily::Multiquadric,
            epsilon,
            metric: Metric::SbfChordal,
        }
    }

    pub fn rbf(epsilon: f64) -> Self {
        Self {
            family: KernelFamily::Multiquadric,
            epsilon,
            metric: Metric::RbfAbsolute,
        }
    }

    pub fn linear_spline() -> Self {
        Self {
            family: KernelFamily::LinearSpline,
            epsilon: 1.0,
            metric: Metric::RbfAbsolute,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.family == KernelFamily::Multiquadric && !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(invalid(format!("shape parameter {} must be positive", self.epsilon)));
        }
        Ok(())
    }

    pub fn distance(&self, lambda: f64, center: f64) -> f64 {
        distance(self.metric, lambda, center)
    }

    pub fn value(&self, r: f64) -> Result<f64> {
        kernel_value(self, r)
    }

    /// `φ(r(λ))` for the center `λ_k`.
    pub fn eval(&self, lambda: f64, center: f64) -> f64 {
        let theta = lambda - center;
        match self.family {
            KernelFamily::Multiquadric => mq_derivatives(self.epsilon, self.metric, theta)[0],
            KernelFamily::LinearSpline => distance(self.metric, lambda, center),
        }
    }

    /// `∂ⁿ/∂λⁿ φ(r(λ))` for `0 ≤ n ≤ 4`; `n = 0` is the kernel value.
    pub(crate) fn eval_derivative(&self, n: usize, lambda: f64, center: f64) -> Result<f64> {
        if n == 0 {
            return Ok(self.eval(lambda, center));
        }
        kernel_lambda_derivative(self, n, lambda, center)
    }
}

pub fn distance(metric: Metric, lambda: f64, center: f64) -> f64 {
    let theta = lambda - center;
    match metric {
        // 2|sin(θ/2)| is the same chord without the cancellation in 2 - 2cos θ
        Metric::SbfChordal => 2.0 * (0.5 * theta).sin().abs(),
        Metric::RbfAbsolute => theta.abs(),
    }
}

pub fn kernel_value(spec: &KernelSpec, r: f64) -> Result<f64> {
    if r < 0.0 || r.is_nan() {
        return Err(invalid(format!("negative distance {r}")));
    }
    Ok(match spec.family {
        KernelFamily::Multiquadric => (1.0 + (spec.epsilon * r).powi(2)).sqrt(),
        KernelFamily::LinearSpline => r,
    })
}

/// Exact `n`-th λ-derivative (`1 ≤ n ≤ 4`) of the kernel centered at `center`.
///
/// The multiquadric depends on `r²` only, and `r²` is smooth in `θ = λ - λ_k`
/// for both metrics (`2 - 2cos θ` or `θ²`), so the composition is expanded
/// with Faà di Bruno on `s(θ) = 1 + ε² r²(θ)` and `f(s) = √s`.
pub fn kernel_lambda_derivative(spec: &KernelSpec, n: usize, lambda: f64, center: f64) -> Result<f64> {
    if !(1..=4).contains(&n) {
        return Err(Error::UnsupportedOrder(n));
    }
    let theta = lambda - center;
    match spec.family {
        KernelFamily::Multiquadric => Ok(mq_derivatives(spec.epsilon, spec.metric, theta)[n]),
        KernelFamily::LinearSpline => {
            if n > 1 {
                return Err(Error::UnsupportedOrder(n));
            }
            Ok(match spec.metric {
                Metric::RbfAbsolute => sign(theta),
                Metric::SbfChordal => sign((0.5 * theta).sin()) * (0.5 * theta).cos(),
            })
        }
    }
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Value and first four θ-derivatives of `sqrt(s(θ))`.
fn mq_derivatives(epsilon: f64, metric: Metric, theta: f64) -> [f64; 5] {
    let e2 = epsilon * epsilon;
    let (s, s1, s2, s3, s4) = match metric {
        Metric::SbfChordal => {
            let (sn, cs) = theta.sin_cos();
            let h = (0.5 * theta).sin();
            // 2 - 2cos θ = 4 sin²(θ/2)
            (1.0 + 4.0 * e2 * h * h, 2.0 * e2 * sn, 2.0 * e2 * cs, -2.0 * e2 * sn, -2.0 * e2 * cs)
        }
        Metric::RbfAbsolute => (1.0 + e2 * theta * theta, 2.0 * e2 * theta, 2.0 * e2, 0.0, 0.0),
    };
    let root = s.sqrt();
    let inv = 1.0 / s;
    let f1 = 0.5 / root;
    let f2 = -0.5 * f1 * inv;
    let f3 = -1.5 * f2 * inv;
    let f4 = -2.5 * f3 * inv;
    [
        root,
        f1 * s1,
        f2 * s1 * s1 + f1 * s2,
        f3 * s1.powi(3) + 3.0 * f2 * s1 * s2 + f1 * s3,
        f4 * s1.powi(4) + 6.0 * f3 * s1 * s1 * s2 + f2 * (3.0 * s2 * s2 + 4.0 * s1 * s3) + f1 * s4,
    ]
}

/// True when two parameter values coincide under the metric (modulo 2π for SBF).
pub(crate) fn coincide(metric: Metric, a: f64, b: f64) -> bool {
    match metric {
        Metric::RbfAbsolute => a == b,
        Metric::SbfChordal => {
            let d = (a - b).rem_euclid(TAU);
            d < 1e-12 || TAU - d < 1e-12
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::PI;

    /// Central differences of `φ(r(λ))` built only from `distance` and `kernel_value`.
    fn fd_oracle(spec: &KernelSpec, n: usize, lambda: f64, center: f64, h: f64) -> f64 {
        let f = |x: f64| kernel_value(spec, distance(spec.metric, x, center)).unwrap();
        match n {
            1 => (f(lambda + h) - f(lambda - h)) / (2.0 * h),
            2 => (f(lambda + h) - 2.0 * f(lambda) + f(lambda - h)) / (h * h),
            3 => {
                (f(lambda + 2.0 * h) - 2.0 * f(lambda + h) + 2.0 * f(lambda - h) - f(lambda - 2.0 * h))
                    / (2.0 * h.powi(3))
            }
            4 => {
                (f(lambda + 2.0 * h) - 4.0 * f(lambda + h) + 6.0 * f(lambda) - 4.0 * f(lambda - h)
                    + f(lambda - 2.0 * h))
                    / h.powi(4)
            }
            _ => unreachable!(),
        }
    }

    fn fd_richardson(spec: &KernelSpec, n: usize, lambda: f64, center: f64, h: f64) -> f64 {
        (4.0 * fd_oracle(spec, n, lambda, center, 0.5 * h) - fd_oracle(spec, n, lambda, center, h)) / 3.0
    }

    #[test]
    fn distance_examples() {
        assert_abs_diff_eq!(distance(Metric::SbfChordal, PI, 0.0), 2.0, epsilon = 1e-15);
        assert_eq!(distance(Metric::SbfChordal, 0.4, 0.4), 0.0);
        assert_abs_diff_eq!(distance(Metric::RbfAbsolute, 0.3, 0.7), 0.4, epsilon = 1e-15);
        for t in [0.1, 1.0, 2.5, 4.0] {
            assert_abs_diff_eq!(
                distance(Metric::SbfChordal, t, 0.0),
                (2.0 - 2.0 * f64::cos(t)).sqrt(),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn kernel_value_examples() {
        let mq = KernelSpec::sbf(3.7);
        assert_eq!(kernel_value(&mq, 0.0).unwrap(), 1.0);
        assert_abs_diff_eq!(kernel_value(&KernelSpec::rbf(1.0), 3f64.sqrt()).unwrap(), 2.0, epsilon = 1e-15);
        assert_eq!(kernel_value(&KernelSpec::linear_spline(), 0.4).unwrap(), 0.4);
        assert!(kernel_value(&mq, -0.1).is_err());
    }

    #[test]
    fn odd_derivatives_vanish_at_center() {
        for spec in [KernelSpec::sbf(2.0), KernelSpec::rbf(2.0)] {
            assert_eq!(kernel_lambda_derivative(&spec, 1, 0.3, 0.3).unwrap(), 0.0);
            assert_eq!(kernel_lambda_derivative(&spec, 3, 0.3, 0.3).unwrap(), 0.0);
        }
    }

    #[test]
    fn second_derivative_matches_finite_differences() {
        let spec = KernelSpec::sbf(1.0);
        let exact = kernel_lambda_derivative(&spec, 2, PI / 2.0, 0.0).unwrap();
        let fd = fd_richardson(&spec, 2, PI / 2.0, 0.0, 1e-3);
        assert_relative_eq!(exact, fd, max_relative = 1e-6);
    }

    #[test]
    fn all_orders_match_finite_differences() {
        for spec in [KernelSpec::sbf(0.7), KernelSpec::sbf(4.0), KernelSpec::rbf(1.3), KernelSpec::rbf(6.0)] {
            let h = 2e-3 / spec.epsilon.max(1.0);
            for theta in [-2.3, -0.4, 0.05, 0.9, 2.0] {
                let exact = kernel_lambda_derivative(&spec, 1, theta, 0.0).unwrap();
                assert!((exact - fd_richardson(&spec, 1, theta, 0.0, h)).abs() < 1e-9 * exact.abs().max(1.0));
                // each order against a Richardson difference of the order below
                for n in 2..=4 {
                    let exact = kernel_lambda_derivative(&spec, n, theta, 0.0).unwrap();
                    let lower = |x: f64| kernel_lambda_derivative(&spec, n - 1, x, 0.0).unwrap();
                    let d = |h: f64| (lower(theta + h) - lower(theta - h)) / (2.0 * h);
                    let fd = (4.0 * d(0.5 * h) - d(h)) / 3.0;
                    assert!(
                        (exact - fd).abs() < 1e-7 * exact.abs().max(1.0),
                        "{spec:?} n={n} θ={theta}: {exact} vs {fd}"
                    );
                }
            }
        }
    }

    #[test]
    fn order_bounds() {
        let spec = KernelSpec::sbf(1.0);
        assert!(matches!(kernel_lambda_derivative(&spec, 0, 0.0, 1.0), Err(Error::UnsupportedOrder(0))));
        assert!(matches!(kernel_lambda_derivative(&spec, 5, 0.0, 1.0), Err(Error::UnsupportedOrder(5))));
        let ls = KernelSpec::linear_spline();
        assert_eq!(kernel_lambda_derivative(&ls, 1, 0.2, 0.5).unwrap(), -1.0);
        assert!(kernel_lambda_derivative(&ls, 2, 0.2, 0.5).is_err());
    }

    #[test]
    fn coincidence_modulo_period() {
        assert!(coincide(Metric::SbfChordal, 0.0, TAU));
        assert!(!coincide(Metric::RbfAbsolute, 0.0, TAU));
        assert!(!coincide(Metric::SbfChordal, 0.0, 0.1));
    }
}
