//! Error types shared by every module of the laboratory.
//!
//! Numerical checks must never panic on bad input or on a function argument
//! that sits on a pole: they report a typed error instead, and the suite
//! runner turns such errors into failed report rows.

use thiserror::Error;

/// Errors produced by the evaluation and verification routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Input outside the validated domain (wrong regime, bad sizes, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// An evaluation hit (or came numerically too close to) a pole.
    #[error("pole of {function} at {location}: |denominator| = {denominator_abs:.3e}")]
    Pole {
        /// Name of the function whose denominator vanished.
        function: &'static str,
        /// Human-readable description of the offending argument.
        location: String,
        /// Magnitude of the vanishing denominator.
        denominator_abs: f64,
    },

    /// A linear solve met a numerically singular matrix.
    #[error("degenerate system in {context}: pivot magnitude {pivot_abs:.3e}")]
    Degenerate {
        /// Which construction required the solve.
        context: &'static str,
        /// Magnitude of the best available pivot.
        pivot_abs: f64,
    },

    /// Configuration file or CLI parameter problem.
    #[error("config error: {0}")]
    Config(String),
}

/// Convenient alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Shorthand for a [`Error::Domain`] with a formatted message.
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
