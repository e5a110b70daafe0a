use thiserror::Error;

use crate::dsl::{EvalError, ParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("metric is not positive-definite at {point:?}")]
    SingularMetric { point: Vec<f64> },

    #[error("finite-difference stencil around {point:?} leaves the domain (needs margin {margin})")]
    DomainViolation { point: Vec<f64>, margin: f64 },

    #[error("axiom `{axiom}` violated at {point:?}: residual {residual:e}")]
    AxiomViolation {
        axiom: &'static str,
        point: Vec<f64>,
        residual: f64,
    },

    #[error("vector is not in the contact distribution: |η(v)| = {residual:e}")]
    NotInD { residual: f64 },

    #[error("structure `{0}` is not contact metric")]
    NotContactMetric(String),

    #[error("check `{id}` does not apply to `{target}`")]
    NotApplicable { id: String, target: String },

    #[error("unknown check id `{0}`")]
    UnknownCheck(String),

    #[error("submersion compatibility dπ(JZ) = Ĵdπ(Z) fails at {point:?}: residual {residual:e}")]
    NotSubmersive { point: Vec<f64>, residual: f64 },

    #[error("warping function is not positive at {point:?} (value {value})")]
    NonPositiveWarp { point: Vec<f64>, value: f64 },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Eval(#[from] EvalError),

    #[error("config error: {0}")]
    Config(String),

    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),

    #[error("parameter `{name}` out of range: {reason}")]
    ParamOutOfRange { name: String, reason: String },

    #[error("perturbation epsilon {0} outside [0, 0.1)")]
    EpsilonOutOfRange(f64),

    #[error("invalid finite-difference configuration: {0}")]
    InvalidFd(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
