use core::fmt;

use crate::sim::Mechanism;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A probability entry is outside `[0, 1]` or not finite.
    InvalidProbability { field: &'static str, value: f64 },
    /// A distribution does not sum to one.
    NotNormalized { field: &'static str, sum: f64 },
    /// A cell of `p(D, E, U, R = 0)` is not strictly positive.
    PositivityViolation { d: usize, e: usize, u: usize, mass: f64 },
    /// Table dimensions disagree with `u_card`.
    ShapeMismatch { field: &'static str, expected: usize, found: usize },
    /// A conditional was requested given an event with (numerically) zero mass.
    ZeroConditioningEvent { event: &'static str, mass: f64 },
    /// The contrast is an indeterminate form at the given arguments.
    UndefinedContrast { p1: f64, p0: f64 },
    /// Sensitivity parameters violate `0 <= alpha(e) <= beta(e) <= 1`.
    InvalidSensitivityParams { e: usize, alpha: f64, beta: f64 },
    /// A scalar argument is outside its domain.
    InvalidArgument(&'static str),
    /// The mechanism cannot be sampled with this number of confounder levels.
    UnsupportedCardinality { mechanism: Mechanism, u_card: usize },
    /// A guaranteed property failed during computation.
    InvariantViolation(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidProbability { field, value } => {
                write!(f, "`{field}` has entry {value}, expected a probability in [0, 1]")
            }
            Error::NotNormalized { field, sum } => {
                write!(f, "`{field}` sums to {sum}, expected 1")
            }
            Error::PositivityViolation { d, e, u, mass } => write!(
                f,
                "p(D={d}, E={e}, U={u}, R=0) = {mass:e} is not positive"
            ),
            Error::ShapeMismatch { field, expected, found } => {
                write!(f, "`{field}` has length {found}, expected {expected}")
            }
            Error::ZeroConditioningEvent { event, mass } => {
                write!(f, "conditioning event {event} has mass {mass:e}")
            }
            Error::UndefinedContrast { p1, p0 } => {
                write!(f, "contrast is indeterminate at p1 = {p1}, p0 = {p0}")
            }
            Error::InvalidSensitivityParams { e, alpha, beta } => write!(
                f,
                "sensitivity parameters for e={e} must satisfy 0 <= alpha <= beta <= 1, got alpha = {alpha}, beta = {beta}"
            ),
            Error::InvalidArgument(msg) => f.write_str(msg),
            Error::UnsupportedCardinality { mechanism, u_card } => {
                write!(f, "mechanism {mechanism} does not support u_card = {u_card}")
            }
            Error::InvariantViolation(msg) => write!(f, "invariant violated: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
