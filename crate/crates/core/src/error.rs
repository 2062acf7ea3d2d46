use crate::numerics::EvalError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("parse error at offset {offset} in `{input}`: {message}")]
    Parse { input: String, offset: usize, message: String },
    #[error("grid: {0}")]
    Grid(String),
    #[error("integration failed in step {step} (t = {time}): {source}")]
    Integration { step: usize, time: f64, source: EvalError },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    Dimension { expected: usize, found: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("endpoints do not match: {left:?} vs {right:?}")]
    EndpointMismatch { left: Vec<f64>, right: Vec<f64> },
    #[error("elements not composable (mismatch {mismatch:e})")]
    NotComposable { mismatch: f64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("unknown {kind} `{name}`; available: {available}")]
    Unknown { kind: &'static str, name: String, available: String },
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
