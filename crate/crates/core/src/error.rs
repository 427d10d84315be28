use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("unsupported case: {0}")]
    UnsupportedCase(String),
    #[error("matrix is not in the expected algebra (residual {residual:.3e}, tol {tol:.3e})")]
    NotInAlgebra { residual: f64, tol: f64 },
    #[error("ambiguous rank gap: gap ratio {gap:.3e} below {required:.1e}; singular values {values:?}")]
    AmbiguousRankGap {
        gap: f64,
        required: f64,
        values: Vec<f64>,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("step size underflow at r = {r}: {detail}")]
    StepUnderflow { r: f64, detail: String },
    #[error("CFL violation: {0}")]
    Cfl(String),
    #[error("I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
