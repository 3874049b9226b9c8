//! The SIR epidemic model on a time scale.
//!
//! State splits a fixed population into susceptible `x`, infected `y`, and
//! removed `z`. With a time-varying contact rate `b` and removal rate `c`,
//! the dynamic system on a time scale `T` is
//!
//! ```text
//! x^D = -b x y^s / (x + y)
//! y^D =  b x y^s / (x + y) - c y^s
//! z^D =  c y^s
//! ```
//!
//! where `^D` is the delta derivative and `^s` the value at the forward
//! jump. On an interval this is the classical proportionate-mixing SIR ODE;
//! on the integer lattice it is the matching difference system. The total
//! `x + y + z` is conserved.
//!
//! Two solution routes are provided and kept deliberately independent so
//! they can check each other: exact product/quadrature formulas built from
//! the generalized exponential ([`closed_form`](SirScenario::closed_form)
//! and friends) and a stepwise recursion that is exact across jumps and
//! uses a classical fourth-order step on continuous stretches
//! ([`step_recursion`](SirScenario::step_recursion), [`solve`](SirScenario::solve)).

mod closed_form;
mod limits;
mod recursion;

pub use limits::{
    equilibria, Certificate, EquilibriumPlane, LimitClassification, LimitOutcome,
    MonotonicityReport, PointRegime, MONOTONE_TOL,
};

pub use closed_form::closed_form_constant_continuous;

use crate::calculus::{self, REGRESSIVITY_FLOOR};
use crate::coeff::CoefficientFunction;
use crate::error::CoreError;
use crate::timescale::{GridPoint, PointKind, Segment, TimeScale};

/// Populations below this are clamped to zero: the infected compartment is
/// then declared extinct and the state is an equilibrium.
pub(crate) const POPULATION_FLOOR: f64 = 1e-300;

/// Conservation bound per unit of total population on spans that involve
/// continuous integration.
pub(crate) const CONSERVATION_TOL_DENSE: f64 = 1e-9;

/// Conservation bound per unit of total population on pure-lattice spans.
pub(crate) const CONSERVATION_TOL_SCATTERED: f64 = 1e-12;

/// Compartment sizes at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SirState {
    /// Susceptible.
    pub x: f64,
    /// Infected.
    pub y: f64,
    /// Removed.
    pub z: f64,
}

impl SirState {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        SirState { x, y, z }
    }

    /// Total population `x + y + z`.
    pub fn total(&self) -> f64 {
        self.x + self.y + self.z
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// Which solution route drives a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Exact product/quadrature formulas.
    ClosedForm,
    /// Exact jump updates plus fourth-order continuous steps.
    Recursion,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed",
            Method::Recursion => "recursion",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "closed" => Ok(Method::ClosedForm),
            "recursion" => Ok(Method::Recursion),
            other => Err(format!("unknown method `{other}` (use closed or recursion)")),
        }
    }
}

/// A fully specified initial-value problem: domain, rates, initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct SirScenario {
    ts: TimeScale,
    contact: CoefficientFunction,
    removal: CoefficientFunction,
    init: SirState,
    t0: f64,
}

impl SirScenario {
    /// Builds a scenario, checking that `t0` lies in the domain and the
    /// initial state has positive susceptible and infected shares and a
    /// nonnegative removed share.
    pub fn new(
        ts: TimeScale,
        contact: CoefficientFunction,
        removal: CoefficientFunction,
        init: SirState,
        t0: f64,
    ) -> Result<Self, CoreError> {
        let t0 = ts.snap(t0)?;
        if !(init.x.is_finite() && init.x > 0.0) {
            return Err(CoreError::InvalidInitial {
                field: "x0",
                value: init.x,
            });
        }
        if !(init.y.is_finite() && init.y > 0.0) {
            return Err(CoreError::InvalidInitial {
                field: "y0",
                value: init.y,
            });
        }
        if !(init.z.is_finite() && init.z >= 0.0) {
            return Err(CoreError::InvalidInitial {
                field: "z0",
                value: init.z,
            });
        }
        Ok(SirScenario {
            ts,
            contact,
            removal,
            init,
            t0,
        })
    }

    pub fn time_scale(&self) -> &TimeScale {
        &self.ts
    }

    pub fn contact_rate(&self) -> &CoefficientFunction {
        &self.contact
    }

    pub fn removal_rate(&self) -> &CoefficientFunction {
        &self.removal
    }

    pub fn initial_state(&self) -> SirState {
        self.init
    }

    pub fn initial_time(&self) -> f64 {
        self.t0
    }

    /// Initial infected-to-susceptible ratio `y0 / x0`.
    pub fn initial_ratio(&self) -> f64 {
        self.init.y / self.init.x
    }

    /// Conserved total population.
    pub fn total(&self) -> f64 {
        self.init.total()
    }

    /// Removal-minus-contact rate difference at `t`.
    pub(crate) fn rate_difference(&self, t: f64) -> f64 {
        self.removal.eval(t) - self.contact.eval(t)
    }

    /// Validates the rates and the regressivity of their difference over
    /// `[t0, end]` so the solvers cannot run into NaN rates or an undefined
    /// exponential halfway through.
    pub fn check_span(&self, end: f64, h: f64) -> Result<(), CoreError> {
        self.contact
            .validate_on("contact rate b", &self.ts, self.t0, end, h, true)?;
        self.removal
            .validate_on("removal rate c", &self.ts, self.t0, end, h, true)?;
        let report =
            calculus::regressivity_report(|t| self.rate_difference(t), &self.ts, self.t0, end, h)?;
        if !report.regressive {
            let t = report.witness_t.unwrap_or(self.t0);
            return Err(CoreError::NonRegressive {
                t,
                value: 1.0 + self.ts.mu(t)? * self.rate_difference(t),
            });
        }
        Ok(())
    }

    /// Effective decay rate of the susceptible share: the rate `g` with
    /// `x^D = -g x^s`, eliminating the infected share through the conserved
    /// ratio structure of the system.
    pub fn susceptible_decay_rate(&self, t: f64, h: f64) -> Result<f64, CoreError> {
        let gp = self.ts.grid_point(t)?;
        let diff = self.rate_difference(gp.t);
        let kappa = self.initial_ratio();
        let e_sigma =
            calculus::exponential_at_sigma(|s| self.rate_difference(s), &self.ts, gp.t, self.t0, h)?;
        let denom = kappa * (1.0 + gp.mu_t * diff) + e_sigma;
        if denom.abs() <= REGRESSIVITY_FLOOR {
            return Err(CoreError::Hypothesis {
                what: "susceptible decay-rate denominator vanished".to_string(),
                witness: gp.t,
            });
        }
        Ok(self.contact.eval(gp.t) * kappa / denom)
    }

    /// Solves over `[t0, t_end]` on the sampling grid at step `h`.
    pub fn solve(&self, t_end: f64, h: f64, method: Method) -> Result<SolutionSeries, CoreError> {
        self.check_span(t_end, h)?;
        let grid = self.ts.grid(self.t0, t_end, h)?;
        let samples = match method {
            Method::ClosedForm => closed_form::series(self, &grid)?,
            Method::Recursion => recursion::series(self, &grid)?,
        };
        let total = self.total();
        let pure_lattice = samples
            .iter()
            .all(|(gp, _)| gp.kind != PointKind::RightDense);
        let tol = total
            * if pure_lattice {
                CONSERVATION_TOL_SCATTERED
            } else {
                CONSERVATION_TOL_DENSE
            };
        let mut max_err = 0.0f64;
        for (gp, state) in &samples {
            if !state.is_finite() {
                return Err(CoreError::NonFiniteSample { t: gp.t });
            }
            let err = (state.total() - total).abs();
            max_err = max_err.max(err);
            if err > tol {
                return Err(CoreError::Hypothesis {
                    what: format!("conservation violated: |x+y+z - total| = {err:e}"),
                    witness: gp.t,
                });
            }
        }
        Ok(SolutionSeries {
            method,
            samples,
            max_conservation_error: max_err,
            total,
        })
    }

    /// Exact solution by the generalized-exponential formulas, valid on any
    /// time scale. Continuous stretches are integrated at step `h`.
    pub fn closed_form(&self, t: f64, h: f64) -> Result<SirState, CoreError> {
        let grid = self.ts.grid(self.t0, t, h)?;
        let samples = closed_form::series(self, &grid)?;
        Ok(samples.last().expect("grid is never empty").1)
    }

    /// Exact solution specialized to the unit integer lattice: plain
    /// running products, no quadrature.
    pub fn closed_form_discrete(&self, t: f64) -> Result<SirState, CoreError> {
        closed_form::discrete(self, t)
    }

    /// Exact solution specialized to a single continuous interval: nested
    /// quadrature of the three integral formulas at step `h`.
    pub fn closed_form_continuous(&self, t: f64, h: f64) -> Result<SirState, CoreError> {
        closed_form::continuous(self, t, h)
    }

    /// Advances one step of the recursion route from `state` at `gp`.
    ///
    /// Across a right-scattered point the implicit jump update is solved
    /// exactly and `substep` is ignored; the jump itself is the step. From a
    /// right-dense point one classical fourth-order step of size `substep`
    /// is taken, which must stay inside the same continuous stretch. At the
    /// maximum the state is returned unchanged.
    pub fn step_recursion(
        &self,
        state: SirState,
        gp: GridPoint,
        substep: f64,
    ) -> Result<SirState, CoreError> {
        match gp.kind {
            PointKind::RightScattered => recursion::scattered_step(self, state, gp),
            PointKind::Max => Ok(state),
            PointKind::RightDense => {
                if !(substep.is_finite() && substep > 0.0) {
                    return Err(CoreError::InvalidStep { h: substep });
                }
                let end = self.ts.snap(gp.t + substep)?;
                let same_stretch = self.ts.segments().iter().any(
                    |seg| matches!(seg, Segment::Interval { lo, hi } if *lo <= gp.t && end <= *hi),
                );
                if end <= gp.t || !same_stretch {
                    return Err(CoreError::WrongDomainShape {
                        reason: format!("[{}, {end}] is not a continuous stretch", gp.t),
                    });
                }
                recursion::rk4_step(self, state, gp.t, end - gp.t)
            }
        }
    }

    /// Long-term outcome over `[t0, horizon]`: certified analytically for
    /// constant rates, otherwise by finite-horizon numeric criteria.
    pub fn classify_limit(&self, horizon: f64, h: f64) -> Result<LimitClassification, CoreError> {
        limits::classify(self, horizon, h)
    }

    /// Which monotonicity regime the rates satisfy at each grid point of
    /// `[t0, t_end]`, and whether the computed infected share obeys the
    /// predicted sign.
    pub fn monotonicity_report(&self, t_end: f64, h: f64) -> Result<MonotonicityReport, CoreError> {
        limits::monotonicity(self, t_end, h)
    }
}

/// A solved trajectory on a sampling grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionSeries {
    method: Method,
    samples: Vec<(GridPoint, SirState)>,
    max_conservation_error: f64,
    total: f64,
}

impl SolutionSeries {
    pub fn method(&self) -> Method {
        self.method
    }

    pub fn samples(&self) -> &[(GridPoint, SirState)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Largest `|x + y + z - total|` across the samples.
    pub fn max_conservation_error(&self) -> f64 {
        self.max_conservation_error
    }

    /// Conserved total population of the underlying scenario.
    pub fn total(&self) -> f64 {
        self.total
    }

    /// Final grid point and state.
    pub fn last(&self) -> (GridPoint, SirState) {
        *self.samples.last().expect("series is never empty")
    }

    /// State at grid time `t`, if `t` is a grid point.
    pub fn state_at(&self, t: f64) -> Option<SirState> {
        self.samples
            .binary_search_by(|(gp, _)| gp.t.total_cmp(&t))
            .ok()
            .map(|i| self.samples[i].1)
    }

    /// Largest pointwise state deviation from `other`, as a fraction of the
    /// total population. `None` when the grids differ.
    pub fn max_deviation(&self, other: &SolutionSeries) -> Option<f64> {
        if self.samples.len() != other.samples.len() {
            return None;
        }
        let mut max = 0.0f64;
        for ((ga, sa), (gb, sb)) in self.samples.iter().zip(&other.samples) {
            if ga.t != gb.t {
                return None;
            }
            max = max
                .max((sa.x - sb.x).abs())
                .max((sa.y - sb.y).abs())
                .max((sa.z - sb.z).abs());
        }
        Some(max / self.total)
    }
}
