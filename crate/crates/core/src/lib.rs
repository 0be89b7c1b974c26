//! Meshfree parametric models of planar elastic curves (SBF, RBF and
//! Lagrange-Chebyshev interpolants) coupled to a 2D regularized Stokeslet
//! flow solver.
//!
//! The usual pipeline is: generate [`nodes`], build coefficient-free
//! operators in [`interpolation`], take geometry from a [`curve`], compute
//! force densities in [`forces`], sum [`stokeslets`], and advance in time
//! with [`simulate`]. [`experiments`] packages the static and flow studies.

pub mod curve;
pub mod error;
pub mod experiments;
pub mod forces;
pub mod interpolation;
pub mod nodes;
pub mod simulate;
pub mod stokeslets;

pub use curve::{GeometryBundle, GeometryOperators, ParametricCurve, Point, Topology};
pub use error::{Error, Result};
pub use forces::{ForceModel, TargetWave};
pub use interpolation::{KernelSpec, LinearOperator, Metric, Scheme};
pub use nodes::{NodeKind, NodeSet};
pub use simulate::{SimConfig, Simulation, Trajectory};
pub use stokeslets::{BlobModel, FieldSample, ForceSample};
