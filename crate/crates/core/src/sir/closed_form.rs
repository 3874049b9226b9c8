//! Exact solution formulas for the SIR system.
//!
//! The susceptible share satisfies `x^D = -g x^s` where `g` is the
//! susceptible decay rate, so `x = e_{circle_minus(g)} x0`; the infected
//! share follows from the ratio structure `y x0 = x y0 e_{circle_minus(c-b)}`,
//! and the removed share from conservation. The general route below sweeps
//! the sampling grid once, accumulating the three exponentials together:
//! every scattered point multiplies exact factors and every dense grid cell
//! adds a three-sample Simpson increment, so one sweep costs O(grid) and
//! matches the per-point definition to rounding.

use crate::calculus::{ExpAccumulator, REGRESSIVITY_FLOOR};
use crate::error::CoreError;
use crate::quad;
use crate::sir::{SirScenario, SirState};
use crate::timescale::{GridPoint, PointKind, Segment};

/// Sweeps the grid, producing the closed-form state at every grid point.
pub(crate) fn series(
    sc: &SirScenario,
    grid: &[GridPoint],
) -> Result<Vec<(GridPoint, SirState)>, CoreError> {
    let kappa = sc.initial_ratio();
    let total = sc.total();
    let init = sc.initial_state();
    let mut out = Vec::with_capacity(grid.len());

    // e_{c-b}(t, t0); its value feeds the decay-rate denominator.
    let mut diff_exp = ExpAccumulator::new("exponential of the rate difference");
    // e of circle_minus(g) and of circle_minus(g circle_plus (c-b)).
    let mut x_exp = ExpAccumulator::new("closed-form susceptible factor");
    let mut y_exp = ExpAccumulator::new("closed-form infected factor");

    for (k, gp) in grid.iter().enumerate() {
        let x = init.x * x_exp.value()?;
        let y = init.y * y_exp.value()?;
        let state = SirState::new(x, y, total - x - y);
        if !state.is_finite() {
            return Err(CoreError::NonFiniteSample { t: gp.t });
        }
        out.push((*gp, state));
        if k + 1 == grid.len() {
            break;
        }

        match gp.kind {
            PointKind::RightScattered => {
                let mu = gp.mu_t;
                let t = gp.t;
                let diff = sc.rate_difference(t);
                let diff_factor = 1.0 + mu * diff;
                let e_now = diff_exp.value()?;
                diff_exp.scattered(t, diff_factor)?;
                let denom = kappa * diff_factor + e_now * diff_factor;
                if denom.abs() <= REGRESSIVITY_FLOOR {
                    return Err(CoreError::Hypothesis {
                        what: "susceptible decay-rate denominator vanished".to_string(),
                        witness: t,
                    });
                }
                let decay = sc.contact_rate().eval(t) * kappa / denom;
                let decay_factor = 1.0 + mu * decay;
                if decay_factor.abs() <= REGRESSIVITY_FLOOR {
                    return Err(CoreError::NonRegressive {
                        t,
                        value: decay_factor,
                    });
                }
                x_exp.scattered(t, 1.0 / decay_factor)?;
                y_exp.scattered(t, 1.0 / (diff_factor * decay_factor))?;
            }
            PointKind::RightDense => {
                let width = grid[k + 1].t - gp.t;
                let (t0c, tm, t1c) = (gp.t, gp.t + 0.5 * width, grid[k + 1].t);
                let d0 = sc.rate_difference(t0c);
                let dm = sc.rate_difference(tm);
                let d1 = sc.rate_difference(t1c);
                let int_mid = quad::cell_first_half(d0, dm, d1, width);
                let int_full = quad::cell(d0, dm, d1, width);
                let e_now = diff_exp.value()?;
                let decay_at = |t: f64, e_val: f64| -> Result<f64, CoreError> {
                    let denom = kappa + e_val;
                    if denom.abs() <= REGRESSIVITY_FLOOR {
                        return Err(CoreError::Hypothesis {
                            what: "susceptible decay-rate denominator vanished".to_string(),
                            witness: t,
                        });
                    }
                    Ok(sc.contact_rate().eval(t) * kappa / denom)
                };
                let g0 = decay_at(t0c, e_now)?;
                let gm = decay_at(tm, e_now * int_mid.exp())?;
                let g1 = decay_at(t1c, e_now * int_full.exp())?;
                let decay_int = quad::cell(g0, gm, g1, width);
                x_exp.dense(-decay_int);
                y_exp.dense(-decay_int - int_full);
                diff_exp.dense(int_full);
            }
            PointKind::Max => unreachable!("max point inside a grid"),
        }
    }
    Ok(out)
}

/// Exact solution on the unit integer lattice by running products.
pub(crate) fn discrete(sc: &SirScenario, t: f64) -> Result<SirState, CoreError> {
    let t0 = sc.initial_time();
    let t = sc.time_scale().snap(t)?;
    if t < t0 {
        return Err(CoreError::ReversedSpan { start: t0, end: t });
    }
    let grid = sc.time_scale().grid(t0, t, 1.0)?;
    for gp in &grid[..grid.len().saturating_sub(1)] {
        if gp.kind != PointKind::RightScattered || gp.mu_t != 1.0 || gp.t.fract() != 0.0 {
            return Err(CoreError::WrongDomainShape {
                reason: format!("point {} is not on a unit integer lattice", gp.t),
            });
        }
    }
    let kappa = sc.initial_ratio();
    let init = sc.initial_state();
    let total = sc.total();

    // P accumulates prod (1 + (c-b)(i)) inclusive of the current index;
    // the two inverse factors accumulate prod (1+g) and prod (1+(c-b))(1+g).
    let mut diff_prod = 1.0f64;
    let mut x_div = 1.0f64;
    let mut y_div = 1.0f64;
    for gp in &grid[..grid.len() - 1] {
        let i = gp.t;
        let diff_factor = 1.0 + sc.rate_difference(i);
        if diff_factor.abs() <= REGRESSIVITY_FLOOR {
            return Err(CoreError::NonRegressive {
                t: i,
                value: diff_factor,
            });
        }
        diff_prod *= diff_factor;
        let denom = diff_prod + kappa * diff_factor;
        if denom.abs() <= REGRESSIVITY_FLOOR {
            return Err(CoreError::Hypothesis {
                what: "susceptible decay-rate denominator vanished".to_string(),
                witness: i,
            });
        }
        let decay = sc.contact_rate().eval(i) * kappa / denom;
        let decay_factor = 1.0 + decay;
        if decay_factor.abs() <= REGRESSIVITY_FLOOR {
            return Err(CoreError::NonRegressive {
                t: i,
                value: decay_factor,
            });
        }
        x_div *= decay_factor;
        y_div *= diff_factor * decay_factor;
        if !(diff_prod.is_finite() && x_div.is_finite() && y_div.is_finite()) {
            return Err(CoreError::Overflow {
                context: "lattice solution products",
            });
        }
    }
    let state = SirState::new(
        init.x / x_div,
        init.y / y_div,
        total - (init.x + init.y / diff_prod) / x_div,
    );
    if !state.is_finite() {
        return Err(CoreError::NonFiniteSample { t });
    }
    Ok(state)
}

/// Exact solution on a continuous interval by nested quadrature.
///
/// The inner integral of `c - b` is accumulated cumulatively on a uniform
/// refinement of `[t0, t]` and the three outer integrals are taken by
/// composite Simpson over the same nodes, so the whole evaluation is
/// O(span / h) with O(h^4) accuracy.
pub(crate) fn continuous(sc: &SirScenario, t: f64, h: f64) -> Result<SirState, CoreError> {
    if !(h.is_finite() && h > 0.0) {
        return Err(CoreError::InvalidStep { h });
    }
    let t0 = sc.initial_time();
    let t = sc.time_scale().snap(t)?;
    if t < t0 {
        return Err(CoreError::ReversedSpan { start: t0, end: t });
    }
    let dense_span = sc.time_scale().segments().iter().any(|seg| {
        matches!(seg, Segment::Interval { lo, hi } if *lo <= t0 && t <= *hi)
    });
    if !dense_span {
        return Err(CoreError::WrongDomainShape {
            reason: format!("[{t0}, {t}] is not inside one continuous interval"),
        });
    }
    let init = sc.initial_state();
    let total = sc.total();
    if t == t0 {
        return Ok(init);
    }
    let kappa = sc.initial_ratio();

    let m = quad::even_intervals(t - t0, h);
    let step = (t - t0) / m as f64;
    let node = |j: usize| if j == m { t } else { t0 + j as f64 * step };

    let contact: Vec<f64> = (0..=m).map(|j| sc.contact_rate().eval(node(j))).collect();
    let removal: Vec<f64> = (0..=m).map(|j| sc.removal_rate().eval(node(j))).collect();
    let diff: Vec<f64> = (0..=m).map(|j| removal[j] - contact[j]).collect();

    // Cumulative integral of (c - b) at every node.
    let mut cum = vec![0.0f64; m + 1];
    for k in (0..m).step_by(2) {
        let width = node(k + 2) - node(k);
        cum[k + 1] = cum[k] + quad::cell_first_half(diff[k], diff[k + 1], diff[k + 2], width);
        cum[k + 2] = cum[k] + quad::cell(diff[k], diff[k + 1], diff[k + 2], width);
    }

    let simpson_over = |f: &dyn Fn(usize) -> f64| -> f64 {
        let mut odd = 0.0;
        let mut even = 0.0;
        for j in 1..m {
            if j % 2 == 1 {
                odd += f(j);
            } else {
                even += f(j);
            }
        }
        (step / 3.0) * (f(0) + 4.0 * odd + 2.0 * even + f(m))
    };

    let x_integral = simpson_over(&|j| contact[j] / (kappa + cum[j].exp()));
    let y_integral = simpson_over(&|j| contact[j] / (1.0 + kappa * (-cum[j]).exp()) - removal[j]);

    let x = init.x * (-kappa * x_integral).exp();
    let y = init.y * y_integral.exp();
    let z = total - (init.y * (-cum[m]).exp() + init.x) * (-kappa * x_integral).exp();
    let state = SirState::new(x, y, z);
    if !state.is_finite() {
        return Err(CoreError::NonFiniteSample { t });
    }
    Ok(state)
}

/// Analytic solution for constant rates on a continuous interval; no
/// quadrature at all.
///
/// For `contact != removal` the susceptible share is
/// `x0 ((1+kappa) / (1 + kappa e^{(b-c)(t-t0)}))^{b/(b-c)}`, the infected
/// share carries one extra factor `e^{(b-c)(t-t0)}`, and the removed share
/// follows from conservation. Equal rates reduce to a single decaying
/// exponential with exponent `-b kappa (t-t0) / (1+kappa)`.
pub fn closed_form_constant_continuous(
    contact: f64,
    removal: f64,
    init: SirState,
    t0: f64,
    t: f64,
) -> Result<SirState, CoreError> {
    if !(contact.is_finite() && contact >= 0.0) {
        return Err(CoreError::InvalidCoefficient {
            name: "contact rate b".to_string(),
            t: t0,
            value: contact,
        });
    }
    if !(removal.is_finite() && removal >= 0.0) {
        return Err(CoreError::InvalidCoefficient {
            name: "removal rate c".to_string(),
            t: t0,
            value: removal,
        });
    }
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
    if !t.is_finite() || !t0.is_finite() || t < t0 {
        return Err(CoreError::ReversedSpan { start: t0, end: t });
    }
    let kappa = init.y / init.x;
    let total = init.total();
    let elapsed = t - t0;
    let near_equal = (contact - removal).abs() <= 1e-14 * contact.abs().max(removal.abs()).max(1.0);
    let state = if near_equal {
        let factor = (-contact * kappa * elapsed / (1.0 + kappa)).exp();
        SirState::new(
            init.x * factor,
            init.y * factor,
            total - (init.x + init.y) * factor,
        )
    } else {
        let growth = ((contact - removal) * elapsed).exp();
        let exponent = contact / (contact - removal);
        let shape = ((1.0 + kappa) / (1.0 + kappa * growth)).powf(exponent);
        let x = init.x * shape;
        let y = init.y * shape * growth;
        SirState::new(x, y, total - x - y)
    };
    if state.is_finite() {
        Ok(state)
    } else {
        Err(CoreError::NonFiniteSample { t })
    }
}
