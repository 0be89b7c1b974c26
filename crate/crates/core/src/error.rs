use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular system: {0}")]
    SingularSystem(String),

    #[error("unsupported derivative order {0}")]
    UnsupportedOrder(usize),

    #[error("degenerate parametrization: |dX/dlambda| = {norm:e} at target node {index}")]
    DegenerateParametrization { index: usize, norm: f64 },

    #[error("evaluation point {point} coincides with force location {force}")]
    EvaluationAtSingularity { point: usize, force: usize },

    #[error("simulation diverged at step {step} (t = {time})")]
    SimulationDiverged { step: usize, time: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
