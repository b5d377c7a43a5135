use thiserror::Error;

/// Errors raised by the numerical kernels and the optimization driver.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FracError {
    #[error("invalid Jacobi parameters ({gamma}, {beta}): both must exceed -1")]
    InvalidJacobiParams { gamma: f64, beta: f64 },

    #[error("gamma function pole at argument {0}")]
    GammaPole(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("eigenvalue iteration did not converge for {npts}-point rule")]
    EigenSolve { npts: usize },

    #[error("root finder for the singularity exponent failed after {iterations} iterations (theta={theta}, alpha={alpha})")]
    SigmaNotConverged {
        theta: f64,
        alpha: f64,
        iterations: usize,
    },

    #[error("ill-conditioned connection matrix: |entry| = {magnitude:e} at ({row}, {col})")]
    IllConditioned {
        row: usize,
        col: usize,
        magnitude: f64,
    },

    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("fixed-point iteration diverged after {iterations} iterations (residual {residual:e}, best {best:e})")]
    Diverged {
        iterations: usize,
        residual: f64,
        best: f64,
    },

    #[error("fixed-point iteration stalled at relative residual {residual:e} after {iterations} iterations")]
    InnerNotConverged { iterations: usize, residual: f64 },

    #[error("outer loop exceeded {max_iterations} iterations (last change {last_error:e})")]
    OuterNotConverged {
        max_iterations: usize,
        last_error: f64,
    },

    #[error("missing precomputed transform: {0}")]
    MissingTransform(String),

    #[error("cache error: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, FracError>;
