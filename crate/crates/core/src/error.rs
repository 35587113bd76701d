use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("field length {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("field contains a non-finite value at node ({i}, {j})")]
    NonFinite { i: usize, j: usize },

    #[error("field is not zero on the boundary ring")]
    NotDirichlet,

    #[error("grids are not nested: {0}")]
    NotNested(&'static str),

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: &'static str },

    #[error("CFL number {cfl} exceeds limit {limit} at step {step}; reduce dt")]
    Cfl { step: usize, cfl: f64, limit: f64 },

    #[error("solution became non-finite at step {step}")]
    Blowup { step: usize },

    #[error("time {t} outside replay range [{start}, {end}]")]
    OutOfRange { t: f64, start: f64, end: f64 },

    #[error("too few samples: need {needed}, have {have}")]
    TooFewSamples { needed: usize, have: usize },

    #[error("series are misaligned: {0}")]
    Misaligned(&'static str),

    #[error("closure spec: {0}")]
    ClosureSpec(&'static str),
}
