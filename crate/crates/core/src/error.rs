//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed source text. `offset` is the byte offset of the failure.
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    /// An identifier that is not `x`, `pi`, or a known function name.
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },

    /// A known function called with the wrong number or shape of arguments.
    #[error("arity mismatch for `{name}` at byte {offset}: {message}")]
    ArityMismatch {
        offset: usize,
        name: String,
        message: String,
    },

    /// A structurally invalid expression (bad bump geometry, non-partition
    /// piecewise arcs, and so on).
    #[error("invalid field: {0}")]
    InvalidField(String),

    /// Evaluation produced a non-finite value where a finite one is required.
    #[error("non-finite evaluation at x = {x}: {context}")]
    NonFinite { x: f64, context: String },

    /// A bad argument to a numeric operation.
    #[error("bad argument: {0}")]
    BadArgument(String),

    /// `classify` was pointed at a location that is not a zero.
    #[error("point {x} is not a zero within tolerance (|f| = {value:e})")]
    NotAZero { x: f64, value: f64 },

    /// An operation that requires a stable system was given an unstable one.
    #[error("system is not structurally stable: {0}")]
    UnstableInput(String),

    /// `destabilize` was given a system that is already stable.
    #[error("system is structurally stable; nothing to destabilize")]
    StableInput,

    /// A candidate map failed the homeomorphism screen.
    #[error("not a homeomorphism: {0}")]
    NotAHomeomorphism(String),

    /// No topological equivalence exists (or none could be constructed).
    #[error("no topological equivalence: {0}")]
    NoEquivalence(String),

    /// Zero sets with intervals or accumulation points are outside the
    /// equivalence checker's scope.
    #[error("unsupported zero-set class: {0}")]
    UnsupportedZeroSetClass(String),

    /// A synthesized perturbation failed its own re-verification. The
    /// offending field is carried verbatim for inspection.
    #[error("verification failed: {detail}")]
    VerificationFailed { detail: String, field_text: String },
}

impl Error {
    pub fn syntax(offset: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            offset,
            message: message.into(),
        }
    }
}
