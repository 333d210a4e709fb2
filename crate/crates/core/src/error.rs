use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("Gaussian volume {0} is not attainable by a bounded ball")]
    UnattainableVolume(f64),

    #[error("integrand is not finite at r = {node} (value {value})")]
    Evaluation { node: f64, value: f64 },

    #[error("ODE integration failed at r = {radius}: {reason}")]
    Solver { radius: f64, reason: String },

    #[error("eigenvalue scan missed a mode (expected radial index {expected}, found {found}); retry with a bracket step below {step}")]
    Rescan { expected: usize, found: usize, step: f64 },

    #[error("degenerate function: {0}")]
    Degenerate(String),

    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("assembly error: triangle {triangle} is inverted or degenerate (signed area {area})")]
    Assembly { triangle: usize, area: f64 },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("point ({x}, {y}) lies outside the mesh")]
    Location { x: f64, y: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),
}
