//! Kernel (SBF/RBF) and barycentric Lagrange interpolation, expressed as
//! coefficient-free evaluation and differentiation operators.

mod barycentric;
mod kernel;
mod operator;

pub use barycentric::BarycentricInterpolant;
pub use kernel::{distance, kernel_lambda_derivative, kernel_value, KernelFamily, KernelSpec, Metric};
pub use operator::{
    build_interp_matrix, build_kernel_block, symmetric_condition, Construction, LinearOperator, Scheme,
    CONDITION_WARNING_THRESHOLD,
};
