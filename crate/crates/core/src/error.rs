use thiserror::Error;

/// Errors produced by the core library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed input: wrong shapes, non-finite entries, out-of-range parameters.
    #[error("invalid input: {0}")]
    Validation(String),

    /// A requested construction or enumeration would exceed a configured limit.
    #[error("{what} needs {requested} but the configured cap is {cap}; {hint}")]
    Resource {
        what: &'static str,
        requested: u128,
        cap: u128,
        hint: &'static str,
    },

    /// A documented precondition of an operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The QR iteration (or another iterative method) hit its iteration cap.
    #[error(
        "{method} did not converge after {iterations} iterations \
         (n = {n}, norm = {norm:e}, unresolved block at row {row})"
    )]
    NoConvergence {
        method: &'static str,
        iterations: usize,
        n: usize,
        norm: f64,
        row: usize,
    },

    /// Spectral radius is zero, so there is no Perron root to speak of.
    #[error("degenerate Perron root: spectral radius is {rho:e} (nilpotent or zero matrix)")]
    DegeneratePerron { rho: f64 },

    /// The spectral radius is an eigenvalue but its eigenspace holds no nonnegative vector.
    #[error("no nonnegative eigenvector found for the spectral radius {rho}")]
    NoNonnegativeEigenvector { rho: f64 },

    /// Every entry of a vector fell below the zero threshold, so its sign
    /// pattern is undefined.
    #[error("all {len} entries are below the zero threshold; sign changes undefined")]
    ZeroVector { len: usize },

    /// Random generation failed to satisfy its own verification.
    #[error("generation failed: {0}")]
    Generation(String),

    /// Two routes to the same quantity disagree beyond tolerance.
    #[error("inconsistent result: {0}")]
    Inconsistent(String),

    /// File or format problems when reading matrices and kernels.
    #[error("input format: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
