//! Error types shared by the whole crate.

use thiserror::Error;

/// Errors produced by matrix operations, state validation, and optimization.
#[derive(Debug, Error)]
pub enum Error {
    /// A square matrix was required but a rectangular one was supplied.
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare {
        /// Number of rows of the offending matrix.
        rows: usize,
        /// Number of columns of the offending matrix.
        cols: usize,
    },

    /// Operand shapes or subsystem dimensions are inconsistent.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A matrix that must be Hermitian deviates from its adjoint by more than
    /// the stated tolerance (largest entrywise deviation).
    #[error("operator deviates from Hermitian by {deviation:.3e} (tolerance {tolerance:.3e})")]
    NotHermitian {
        /// Largest entrywise magnitude of `M - M†`.
        deviation: f64,
        /// Tolerance that was applied.
        tolerance: f64,
    },

    /// A density matrix has a trace too far from one to be renormalized.
    #[error("trace deviates from one by {deviation:.3e} (tolerance {tolerance:.3e})")]
    InvalidTrace {
        /// `|Tr(rho) - 1|` of the offending matrix.
        deviation: f64,
        /// Tolerance that was applied.
        tolerance: f64,
    },

    /// A density matrix has an eigenvalue more negative than the clipping
    /// window allows, so it is not positive semidefinite.
    #[error("eigenvalue {eigenvalue:.3e} is below -{tolerance:.3e}: matrix is not positive semidefinite")]
    NotPositive {
        /// The offending (most negative) eigenvalue.
        eigenvalue: f64,
        /// Magnitude of the allowed negativity window.
        tolerance: f64,
    },

    /// The iterative eigensolver did not converge.
    #[error("eigensolver failed to converge for a {dim}x{dim} matrix")]
    EigenFailure {
        /// Dimension of the matrix passed to the solver.
        dim: usize,
    },

    /// An argument is outside its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The separable precision bound vanishes (all Hamiltonian parts are
    /// proportional to the identity), so the gain is undefined.
    #[error("separable bound vanishes: gain is undefined when every local part is a multiple of the identity")]
    UndefinedGain,

    /// A quantity needed by an update is numerically degenerate, e.g. the
    /// commutator average in an error-propagation denominator vanishes.
    #[error("degenerate value in {0}")]
    Degenerate(String),

    /// A bisection bracket does not straddle the gain = 1 crossing.
    #[error(
        "invalid bracket: gain({p_low:.6}) = {g_low:.6} must exceed 1 and gain({p_high:.6}) = {g_high:.6} must not"
    )]
    InvalidBracket {
        /// Lower edge of the bracket.
        p_low: f64,
        /// Gain at the lower edge.
        g_low: f64,
        /// Upper edge of the bracket.
        p_high: f64,
        /// Gain at the upper edge.
        g_high: f64,
    },

    /// A state file could not be interpreted.
    #[error("state file rejected: {0}")]
    MalformedState(String),

    /// An underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// An underlying JSON failure.
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Convenient alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
