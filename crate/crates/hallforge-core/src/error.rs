//! Error types shared across the engine.
//!
//! Every fallible public entry point returns [`Result`].  Enumeration
//! routines refuse, rather than attempt, any computation whose size exceeds
//! the hard ceilings baked into the engine; those refusals carry the
//! offending quantity and the ceiling so callers can report them precisely.

use thiserror::Error;

/// Hard ceilings for exhaustive enumeration.
///
/// These bounds keep every enumeration exact and each run comfortably inside
/// memory and time budgets.  They are deliberately conservative: the engine
/// targets small prime fields and small dimension vectors, where exhaustive
/// verification is meaningful.
pub mod limits {
    /// Maximum number of points in a representation space (`p^#entries`).
    pub const MAX_SPACE_POINTS: u128 = 1 << 20;
    /// Maximum group order for which the full group is enumerated
    /// element-by-element (used for the independent stabilizer sweep).
    pub const MAX_GROUP_SWEEP: u128 = 10_000;
    /// Maximum group order for which the group may be materialized as an
    /// explicit element set.  (Orbit enumeration itself only ever applies
    /// generators, so it works with arbitrarily large groups.)
    pub const MAX_GROUP_ORDER: u128 = 1_000_000;
    /// Maximum number of matrices materialized by a dense matrix-set
    /// enumeration (`all_matrices`, `invertible_matrices`).
    pub const MAX_MATRIX_ENUM: u128 = 1 << 20;
    /// Maximum dimension of a function-space quotient.
    pub const MAX_QUOTIENT_DIM: usize = 512;
}

/// Engine-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// An exhaustive enumeration would exceed a hard ceiling.
    #[error("scale limit exceeded: {what} = {actual} > ceiling {ceiling}")]
    ScaleExceeded {
        /// What was being counted (points, group order, ...).
        what: String,
        /// The size the computation would have had.
        actual: u128,
        /// The ceiling it ran into.
        ceiling: u128,
    },

    /// Mixed scalars from different cyclotomic fields.
    #[error("cyclotomic field mismatch: conductor {left} vs {right}")]
    FieldMismatch { left: u64, right: u64 },

    /// Division by the zero scalar.
    #[error("division by zero scalar")]
    DivisionByZero,

    /// The modulus of a prime field must be prime.
    #[error("not a prime: {0}")]
    NotPrime(u64),

    /// Structurally invalid input (bad dimensions, malformed vectors, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Objects from incompatible contexts were combined.
    #[error("incompatible operands: {0}")]
    Incompatible(String),

    /// A persistent cache entry is corrupt or inconsistent.
    #[error("cache error: {0}")]
    Cache(String),

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Underlying JSON failure.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Engine-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Convenience constructor for scale-ceiling violations.
    pub fn scale(what: impl Into<String>, actual: u128, ceiling: u128) -> Self {
        Error::ScaleExceeded {
            what: what.into(),
            actual,
            ceiling,
        }
    }
}
