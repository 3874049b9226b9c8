//! Equilibria, long-term outcome classification, and monotonicity regimes.
//!
//! Every state with no infected share is an equilibrium, so the equilibrium
//! set is the plane `y = 0` inside the conservation plane `x + y + z = N`.
//! Classification decides which point of that plane (if any) the trajectory
//! approaches: constant rates admit a closed-form answer, while time-varying
//! rates are decided by finite-horizon integral criteria whose certificates
//! say exactly which numeric evidence was used.

use crate::calculus;
use crate::error::CoreError;
use crate::sir::{Method, SirScenario, SirState};

/// Tolerance on observed monotonicity of the infected share, per unit of
/// total population.
pub const MONOTONE_TOL: f64 = 1e-12;

/// A running integral above this counts as numerically divergent, provided
/// it is still growing (see [`TREND_FLOOR`]).
const DIVERGENCE_THRESHOLD: f64 = 50.0;

/// Minimum late-window growth per unit time for a divergence verdict.
const TREND_FLOOR: f64 = 1e-6;

/// Maximum late-window total variation for a boundedness verdict.
const VARIATION_BOUND: f64 = 1e-6;

/// The equilibrium set for a given total population: `y = 0` with
/// `x + z = total`, parametrized by the leftover susceptible share `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumPlane {
    total: f64,
}

/// Equilibria of the system with conserved total `total`.
pub fn equilibria(total: f64) -> EquilibriumPlane {
    EquilibriumPlane { total }
}

impl EquilibriumPlane {
    pub fn total(&self) -> f64 {
        self.total
    }

    /// The equilibrium with susceptible share `alpha`.
    pub fn state(&self, alpha: f64) -> SirState {
        SirState::new(alpha, 0.0, self.total - alpha)
    }

    /// Whether `state` lies within `tol` of the plane: no infected share,
    /// a susceptible share inside `[0, total]`, and the right total.
    pub fn contains(&self, state: &SirState, tol: f64) -> bool {
        state.y.abs() <= tol
            && state.x >= -tol
            && state.x <= self.total + tol
            && (state.total() - self.total).abs() <= tol
    }
}

/// Where the trajectory is headed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitOutcome {
    /// Susceptible and infected shares both vanish; everyone ends removed.
    AllRemoved,
    /// The infected share vanishes but a positive susceptible share is left.
    PartialSusceptible,
    /// No criterion applied at this horizon.
    Undetermined,
}

impl LimitOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            LimitOutcome::AllRemoved => "all-removed",
            LimitOutcome::PartialSusceptible => "partial-susceptible",
            LimitOutcome::Undetermined => "undetermined",
        }
    }
}

/// Which argument backs a classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certificate {
    /// Both rates are constant; the outcome follows from their order alone.
    ConstantRates,
    /// Numeric evidence: the running integral of `c - b` settled while the
    /// running integral of `b / (1 + mu (c - b))` keeps diverging.
    NumericBoundedDifference,
    /// Numeric evidence: removal exceeds contact at every sampled point and
    /// the running integral of `c - b` diverges.
    NumericDominatedTransmission,
}

impl Certificate {
    pub fn label(&self) -> &'static str {
        match self {
            Certificate::ConstantRates => "constant-rates",
            Certificate::NumericBoundedDifference => "numeric-bounded-difference",
            Certificate::NumericDominatedTransmission => "numeric-dominated-transmission",
        }
    }
}

/// Outcome of a long-term classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitClassification {
    pub outcome: LimitOutcome,
    /// Present exactly when the outcome is decided.
    pub certificate: Option<Certificate>,
    /// The claimed (or, for numeric partial outcomes, estimated) limit.
    pub limit_state: Option<SirState>,
    /// Susceptible share at the horizon by the exact solution formulas.
    pub alpha_estimate: Option<f64>,
    /// Proven lower bound on the limiting susceptible share, when one is
    /// available: `x0 exp(-kappa M)` with `M` bounding `b / (c - b)`.
    pub alpha_lower_bound: Option<f64>,
}

pub(crate) fn classify(
    sc: &SirScenario,
    horizon: f64,
    h: f64,
) -> Result<LimitClassification, CoreError> {
    sc.check_span(horizon, h)?;
    let report = calculus::regressivity_report(
        |t| sc.rate_difference(t),
        sc.time_scale(),
        sc.initial_time(),
        horizon,
        h,
    )?;
    if !report.positively_regressive {
        return Err(CoreError::Hypothesis {
            what: format!(
                "classification needs 1 + mu (c - b) > 0 on the span; minimum was {}",
                report.min_value
            ),
            witness: report.witness_t.unwrap_or(sc.initial_time()),
        });
    }
    match (
        sc.contact_rate().as_constant(),
        sc.removal_rate().as_constant(),
    ) {
        (Some(b), Some(c)) => classify_constant(sc, b, c, horizon, h),
        _ => classify_numeric(sc, horizon, h),
    }
}

/// Constant rates: the order of `b` and `c` decides the outcome outright.
fn classify_constant(
    sc: &SirScenario,
    contact: f64,
    removal: f64,
    horizon: f64,
    h: f64,
) -> Result<LimitClassification, CoreError> {
    let plane = equilibria(sc.total());
    if contact > 0.0 && contact >= removal {
        return Ok(LimitClassification {
            outcome: LimitOutcome::AllRemoved,
            certificate: Some(Certificate::ConstantRates),
            limit_state: Some(plane.state(0.0)),
            alpha_estimate: Some(sc.closed_form(horizon, h)?.x),
            alpha_lower_bound: None,
        });
    }
    if removal > contact {
        let ratio_bound = contact / (removal - contact);
        let lower = sc.initial_state().x * (-sc.initial_ratio() * ratio_bound).exp();
        let alpha = sc.closed_form(horizon, h)?.x;
        return Ok(LimitClassification {
            outcome: LimitOutcome::PartialSusceptible,
            certificate: Some(Certificate::ConstantRates),
            limit_state: Some(plane.state(alpha)),
            alpha_estimate: Some(alpha),
            alpha_lower_bound: Some(lower),
        });
    }
    // b = c = 0: the system is frozen with a positive infected share, so it
    // never approaches the equilibrium plane.
    Ok(LimitClassification {
        outcome: LimitOutcome::Undetermined,
        certificate: None,
        limit_state: Some(sc.initial_state()),
        alpha_estimate: Some(sc.initial_state().x),
        alpha_lower_bound: None,
    })
}

/// Time-varying rates: finite-horizon integral evidence.
fn classify_numeric(
    sc: &SirScenario,
    horizon: f64,
    h: f64,
) -> Result<LimitClassification, CoreError> {
    let ts = sc.time_scale();
    let t0 = sc.initial_time();
    let plane = equilibria(sc.total());

    let difference = ts.running_delta_integral(|t| sc.rate_difference(t), t0, horizon, h)?;
    let drive = ts.running_delta_integral(
        |t| {
            let mu = ts.mu(t).unwrap_or(0.0);
            sc.contact_rate().eval(t) / (1.0 + mu * sc.rate_difference(t))
        },
        t0,
        horizon,
        h,
    )?;

    // Late window: the last nine tenths of the span, so early transients
    // cannot sway either verdict.
    let window_start = t0.max(t0 + 0.1 * (horizon - t0));
    let alpha_estimate = sc.closed_form(horizon, h)?.x;

    let difference_settled = total_variation_after(&difference, window_start) < VARIATION_BOUND;
    if difference_settled && diverges(&drive, window_start) {
        return Ok(LimitClassification {
            outcome: LimitOutcome::AllRemoved,
            certificate: Some(Certificate::NumericBoundedDifference),
            limit_state: Some(plane.state(0.0)),
            alpha_estimate: Some(alpha_estimate),
            alpha_lower_bound: None,
        });
    }

    let removal_exceeds_contact = difference
        .iter()
        .all(|(gp, _)| sc.rate_difference(gp.t) > 0.0);
    if removal_exceeds_contact && diverges(&difference, window_start) {
        let ratio_bound = difference
            .iter()
            .map(|(gp, _)| sc.contact_rate().eval(gp.t) / sc.rate_difference(gp.t))
            .fold(0.0f64, f64::max);
        let lower = sc.initial_state().x * (-sc.initial_ratio() * ratio_bound).exp();
        return Ok(LimitClassification {
            outcome: LimitOutcome::PartialSusceptible,
            certificate: Some(Certificate::NumericDominatedTransmission),
            limit_state: Some(plane.state(alpha_estimate)),
            alpha_estimate: Some(alpha_estimate),
            alpha_lower_bound: Some(lower),
        });
    }

    Ok(LimitClassification {
        outcome: LimitOutcome::Undetermined,
        certificate: None,
        limit_state: None,
        alpha_estimate: Some(alpha_estimate),
        alpha_lower_bound: None,
    })
}

/// Sum of `|increments|` of a running integral from `from` on.
fn total_variation_after(running: &[(crate::timescale::GridPoint, f64)], from: f64) -> f64 {
    running
        .windows(2)
        .filter(|w| w[0].0.t >= from)
        .map(|w| (w[1].1 - w[0].1).abs())
        .sum()
}

/// Numeric divergence: large at the horizon and still growing late.
fn diverges(running: &[(crate::timescale::GridPoint, f64)], from: f64) -> bool {
    let (last_t, last_v) = match running.last() {
        Some((gp, v)) => (gp.t, *v),
        None => return false,
    };
    let window = running
        .iter()
        .find(|(gp, _)| gp.t >= from)
        .map(|(gp, v)| (gp.t, *v));
    let (from_t, from_v) = match window {
        Some(w) if w.0 < last_t => w,
        _ => return false,
    };
    last_v > DIVERGENCE_THRESHOLD && (last_v - from_v) / (last_t - from_t) > TREND_FLOOR
}

/// Rate regime at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointRegime {
    pub t: f64,
    /// `c(t) >= b(t)`.
    pub removal_dominates: bool,
    /// `x0 / (x0 + y0) b(t) <= c(t) <= b(t)`.
    pub in_mixed_band: bool,
}

/// Predicted and observed monotonicity of the infected share.
///
/// Removal dominating everywhere, or the rates sitting in the mixed band
/// everywhere, each force a nonincreasing infected share. The reverse
/// initial-point inequality forces growth across the first step instead.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    pub regimes: Vec<PointRegime>,
    pub removal_dominates_everywhere: bool,
    pub mixed_band_everywhere: bool,
    /// Either regime holds everywhere, so `y` must be nonincreasing.
    pub infected_nonincreasing_predicted: bool,
    /// `x0 / (x0 + y0) b(t0) >= c(t0)`, so `y` must not fall across the
    /// first step.
    pub initial_growth_predicted: bool,
    /// No increment of the computed series exceeds the tolerance.
    pub infected_nonincreasing_observed: bool,
    /// Largest increment `y(next) - y(t)` observed on the grid.
    pub max_infected_increase: f64,
    /// `y` change across the first grid step.
    pub initial_step_change: f64,
}

pub(crate) fn monotonicity(
    sc: &SirScenario,
    t_end: f64,
    h: f64,
) -> Result<MonotonicityReport, CoreError> {
    let series = sc.solve(t_end, h, Method::ClosedForm)?;
    let init = sc.initial_state();
    let share = init.x / (init.x + init.y);

    let regimes: Vec<PointRegime> = series
        .samples()
        .iter()
        .map(|(gp, _)| {
            let b = sc.contact_rate().eval(gp.t);
            let c = sc.removal_rate().eval(gp.t);
            PointRegime {
                t: gp.t,
                removal_dominates: c >= b,
                in_mixed_band: share * b <= c && c <= b,
            }
        })
        .collect();
    let removal_dominates_everywhere = regimes.iter().all(|r| r.removal_dominates);
    let mixed_band_everywhere = regimes.iter().all(|r| r.in_mixed_band);

    let t0 = sc.initial_time();
    let initial_growth_predicted =
        share * sc.contact_rate().eval(t0) >= sc.removal_rate().eval(t0);

    let max_infected_increase = series
        .samples()
        .windows(2)
        .map(|w| w[1].1.y - w[0].1.y)
        .fold(0.0f64, f64::max);
    let initial_step_change = if series.len() > 1 {
        series.samples()[1].1.y - series.samples()[0].1.y
    } else {
        0.0
    };

    Ok(MonotonicityReport {
        regimes,
        removal_dominates_everywhere,
        mixed_band_everywhere,
        infected_nonincreasing_predicted: removal_dominates_everywhere || mixed_band_everywhere,
        initial_growth_predicted,
        infected_nonincreasing_observed: max_infected_increase <= MONOTONE_TOL * sc.total(),
        max_infected_increase,
        initial_step_change,
    })
}
