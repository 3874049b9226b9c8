//! Epidemic dynamics on time scales.
//!
//! A time scale is an arbitrary closed subset of the real line: a union of
//! closed intervals and isolated points. Dynamic equations on such a domain
//! unify ordinary differential equations (the domain is an interval) and
//! difference equations (the domain is a lattice), and cover hybrid domains
//! that switch between continuous and discrete stretches.
//!
//! This crate solves the classical susceptible/infected/removed (SIR)
//! epidemic model with time-varying contact and removal rates posed on an
//! arbitrary time scale. It provides:
//!
//! - [`TimeScale`]: canonical domain representation with jump operator,
//!   graininess, sampling grids, and delta integration ([`timescale`]);
//! - regressivity checks, the circle-plus/circle-minus rate algebra, and the
//!   generalized exponential function ([`calculus`]);
//! - named coefficient families for the contact and removal rates
//!   ([`coeff`]);
//! - exact product/quadrature solutions of the SIR system, a step-by-step
//!   recursion solver, equilibrium structure, long-term outcome
//!   classification, and monotonicity diagnostics ([`sir`]).
//!
//! All solvers operate on plain `f64` state and are deterministic: the same
//! scenario and step always produce bitwise-identical output.

pub mod calculus;
pub mod coeff;
pub mod error;
pub mod sir;
pub mod timescale;

mod quad;

pub use calculus::{
    circle_minus, circle_plus, exponential, exponential_at_sigma, regressivity_report,
    RegressivityReport, REGRESSIVITY_FLOOR,
};
pub use coeff::CoefficientFunction;
pub use error::CoreError;
pub use sir::{
    closed_form_constant_continuous, equilibria, Certificate, EquilibriumPlane,
    LimitClassification, LimitOutcome, Method, MonotonicityReport, SirScenario, SirState,
    SolutionSeries,
};
pub use timescale::{GridPoint, PointKind, Segment, TimeScale, DEFAULT_STEP, MIN_GAP, SNAP_TOL};
