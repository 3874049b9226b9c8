//! Error type shared by all domain and solver operations.

use thiserror::Error;

/// Errors produced by domain construction, calculus, and SIR solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    /// A time scale was built from an empty segment list.
    #[error("time scale has no segments")]
    EmptyDomain,

    /// A segment endpoint was NaN, infinite, or out of order.
    #[error("invalid segment endpoint near {value}")]
    InvalidEndpoint { value: f64 },

    /// Two scattered entities are closer than the minimum resolvable gap.
    #[error("gap between {left} and {right} is below the minimum of 1e-9")]
    MinGapViolation { left: f64, right: f64 },

    /// A queried time does not belong to the time scale.
    #[error("t = {t} is not in the time scale")]
    NotInDomain { t: f64 },

    /// A span was queried with its endpoints out of order.
    #[error("span [{start}, {end}] is reversed")]
    ReversedSpan { start: f64, end: f64 },

    /// A step or substep was not a finite positive number.
    #[error("step must be finite and positive, got {h}")]
    InvalidStep { h: f64 },

    /// `1 + mu(t) * p(t)` fell within the regressivity floor of zero, so the
    /// exponential (or an implicit update) is not defined at `t`.
    #[error("rate is not regressive at t = {t}: 1 + mu*p = {value:e}")]
    NonRegressive { t: f64, value: f64 },

    /// A scalar circle operation hit a non-regressive denominator.
    #[error("operand is not regressive: 1 + mu*q = {value:e}")]
    NonRegressiveOperand { value: f64 },

    /// A running product or exponential left the representable range.
    #[error("overflow while accumulating {context}")]
    Overflow { context: &'static str },

    /// An operation that requires a specific domain shape was called on a
    /// time scale of a different shape.
    #[error("unsupported domain shape: {reason}")]
    WrongDomainShape { reason: String },

    /// An initial-state field violated its constraint.
    #[error("invalid initial state: {field} = {value}")]
    InvalidInitial { field: &'static str, value: f64 },

    /// A coefficient evaluated to a negative or non-finite value at a grid
    /// point of the working span.
    #[error("coefficient {name} is invalid at t = {t}: {value}")]
    InvalidCoefficient { name: String, t: f64, value: f64 },

    /// A tabulated coefficient does not cover the working span.
    #[error("table covers [{have_lo}, {have_hi}] but the span needs [{need_lo}, {need_hi}]")]
    TableRange {
        need_lo: f64,
        need_hi: f64,
        have_lo: f64,
        have_hi: f64,
    },

    /// A coefficient literal could not be parsed.
    #[error("bad coefficient literal `{literal}`: {reason}")]
    BadCoefficientLiteral { literal: String, reason: String },

    /// A time-scale literal could not be parsed.
    #[error("bad time-scale literal `{literal}`: {reason}")]
    BadTimeScaleLiteral { literal: String, reason: String },

    /// A classification or solver hypothesis failed at a witness point.
    #[error("hypothesis violated: {what} (witness t = {witness})")]
    Hypothesis { what: String, witness: f64 },

    /// The susceptible and infected populations both vanished, so the
    /// contact fraction x/(x+y) is undefined from here on.
    #[error("x + y underflowed to zero at t = {t}")]
    DegenerateState { t: f64 },

    /// A computed sample stopped being finite.
    #[error("solution sample is not finite at t = {t}")]
    NonFiniteSample { t: f64 },
}
