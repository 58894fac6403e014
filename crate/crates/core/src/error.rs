//! Error types shared across the library.
//!
//! A single enum keeps error handling uniform: construction failures,
//! evaluation-time domain failures, and soundness violations all surface
//! through [`Error`], and the CLI maps the variants onto its exit codes.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Ragged input, wrong vector length, mismatched mean dimensions.
    #[error("dimension error in {what}: expected {expected}, found {found}")]
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    /// A density does not integrate to 1 against the atom weights.
    #[error("{what} is not normalized: sums to {sum} against the atom weights (tolerance 1e-10)")]
    Normalization { what: String, sum: f64 },

    /// Two family members coincide within the distinctness tolerance.
    #[error("members {first} and {second} coincide within 1e-12 on every atom")]
    Distinctness { first: usize, second: usize },

    /// Invalid mixture weights (negative, wrong length, or not summing to 1).
    #[error("invalid mixture weights: {detail}")]
    Weight { detail: String },

    /// A scalar parameter is outside its domain (e.g. lambda <= 0, sigma <= 0).
    #[error("invalid parameter: {detail}")]
    Parameter { detail: String },

    /// Two distributions live on different measure spaces.
    #[error("distributions live on different measure spaces")]
    SpaceMismatch,

    /// The resolved reference Q fails to dominate the family: some member has
    /// mass where q = 0. Callers may catch this and report a vacuous bound.
    #[error("reference {reference} does not dominate the family: member {member} has mass at atom '{atom}' where q = 0")]
    Domination {
        reference: String,
        member: usize,
        atom: String,
    },

    /// A materialization would exceed its size cap.
    #[error("operation would enumerate {required} states, exceeding the cap of {cap}")]
    SizeCap { required: u128, cap: u64 },

    /// A bound was requested for a family size it is not defined for.
    #[error("{method} requires {requirement} (family has N = {n})")]
    Arity {
        method: &'static str,
        requirement: &'static str,
        n: usize,
    },

    /// Tensorization is defined for KL and power divergences only.
    #[error("tensorization is defined for KL and power divergences, not {kind}")]
    Kind { kind: &'static str },

    /// A custom phi failed the numeric convexity/monotonicity grid check.
    #[error("custom phi rejected: {detail}")]
    PhiProperty { detail: String },

    /// The requested reference cannot be used for this computation
    /// (e.g. mixture references for Gaussian closed forms).
    #[error("unsupported reference: {detail}")]
    UnsupportedReference { detail: String },

    /// A computed bound fell below the exact value it must dominate.
    /// This is the library's core soundness promise failing loudly.
    #[error("soundness violation: {detail}")]
    Violation { detail: String },
}
