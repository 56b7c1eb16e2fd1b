use thiserror::Error;

use crate::Vector;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite {what} at the evaluation point")]
    Evaluation { what: &'static str },

    #[error("derivative order {requested} requested but the oracle serves up to order {available}")]
    UnsupportedOrder { requested: usize, available: usize },

    #[error("wrong subsolver regime: {0}")]
    WrongRegime(String),

    #[error("capability not available: {0}")]
    Capability(String),

    #[error("inner solver did not converge after {iterations} iterations (residual {residual:.3e})")]
    InnerSolver {
        iterations: usize,
        residual: f64,
        best: Vector,
    },

    #[error("scalar solve failed: {0}")]
    ScalarSolve(String),

    #[error("no indicator bracket found after {expansions} expansions")]
    Bracketing { expansions: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("matrix is not positive semidefinite (smallest eigenvalue {0:.3e})")]
    Indefinite(f64),

    #[error("step size too large: objective grew to {value:.3e} from {initial:.3e}")]
    StepSize { value: f64, initial: f64 },

    #[error("integration blew up after t = {last_finite_t}")]
    IntegrationBlowup { last_finite_t: f64 },

    #[error("rate fit failed: {0}")]
    Fit(String),

    #[error("epoch {epoch}: {source}")]
    Epoch {
        epoch: usize,
        #[source]
        source: Box<Error>,
    },
}
