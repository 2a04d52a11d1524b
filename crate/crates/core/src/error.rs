use thiserror::Error;

/// Errors raised while building or manipulating multi-degree spline objects.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain [{a}, {b}] is empty or not finite")]
    InvalidDomain { a: f64, b: f64 },

    #[error("break-point x_{index} = {value} is not strictly inside the domain or not increasing")]
    BreakpointOrder { index: usize, value: f64 },

    #[error("expected {expected} degrees (one per interval), got {got}")]
    DegreeCount { expected: usize, got: usize },

    #[error("expected {expected} continuities (one per break-point), got {got}")]
    ContinuityCount { expected: usize, got: usize },

    #[error("degree of interval {interval} must be at least 1")]
    DegreeTooLow { interval: usize },

    #[error("continuity C^{k} at break-point x_{index} exceeds the maximum C^{max}")]
    ContinuityOutOfRange { index: usize, k: usize, max: usize },

    #[error("connection matrix at break-point x_{index}: {reason}")]
    ConnectionMatrix { index: usize, reason: String },

    #[error("extended partition is not clamped: {0}")]
    Unclamped(String),

    #[error("break-point index range [{p}, {r}] is invalid for {intervals} intervals")]
    IndexRange { p: usize, r: usize, intervals: usize },

    #[error("index {index} is out of range 0..{len}")]
    OutOfRange { index: usize, len: usize },

    #[error("parameter {x} lies outside [{a}, {b}]")]
    OutsideDomain { x: f64, a: f64, b: f64 },

    #[error("parameter {x} lies outside the piece interval [{lo}, {hi}]")]
    OutsideInterval { x: f64, lo: f64, hi: f64 },

    #[error("derivative order {order} exceeds degree {degree}")]
    OrderTooHigh { order: usize, degree: usize },

    #[error("singular Hermite system for transition function {index} (condition estimate {condition:e})")]
    SingularSystem { index: usize, condition: f64 },

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error("space is not supported by the linear-phi recurrence: {0}")]
    Unsupported(String),

    #[error("knot insertion would lower continuity at x_{index} below C^0")]
    ContinuityUnderflow { index: usize },

    #[error("expected {expected} control points, got {got}")]
    ControlPointCount { expected: usize, got: usize },

    #[error("control points must have dimension 1, 2 or 3 (got {0})")]
    Dimension(usize),

    #[error("invalid document: {0}")]
    Document(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used by front ends to pick exit codes and statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// The input document or space is malformed.
    Validation,
    /// An operator was called with arguments the current object does not admit.
    Precondition,
    /// A numerical or internal failure.
    Internal,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidDomain { .. }
            | Error::BreakpointOrder { .. }
            | Error::DegreeCount { .. }
            | Error::ContinuityCount { .. }
            | Error::DegreeTooLow { .. }
            | Error::ContinuityOutOfRange { .. }
            | Error::ConnectionMatrix { .. }
            | Error::Unclamped(_)
            | Error::ControlPointCount { .. }
            | Error::Dimension(_)
            | Error::Document(_) => ErrorKind::Validation,
            Error::IndexRange { .. }
            | Error::OutOfRange { .. }
            | Error::OutsideDomain { .. }
            | Error::OutsideInterval { .. }
            | Error::OrderTooHigh { .. }
            | Error::Unsupported(_)
            | Error::ContinuityUnderflow { .. } => ErrorKind::Precondition,
            Error::SingularSystem { .. } | Error::Internal(_) => ErrorKind::Internal,
        }
    }
}
