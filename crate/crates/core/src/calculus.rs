//! Regressivity, the circle rate algebra, and the generalized exponential.
//!
//! On a time scale, a rate `p` is regressive when `1 + mu(t) p(t)` never
//! vanishes; the exponential `e_p(t, t0)` then exists and multiplies a
//! factor `1 + mu p` across every right-scattered point and `exp` of the
//! ordinary integral of `p` across every continuous stretch. Positive
//! regressivity (`1 + mu p > 0`) keeps it positive.

use crate::error::CoreError;
use crate::quad;
use crate::timescale::{PointKind, Segment, TimeScale};

/// Anything with `|1 + mu p|` at or below this floor is treated as a
/// regressivity violation: the exponential factor (or an implicit solver
/// denominator) would be numerically meaningless.
pub const REGRESSIVITY_FLOOR: f64 = 1e-10;

/// Outcome of scanning `1 + mu(t) p(t)` over a span's grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressivityReport {
    /// `|1 + mu p|` stays above [`REGRESSIVITY_FLOOR`] everywhere.
    pub regressive: bool,
    /// `1 + mu p` stays above the floor everywhere (hence positive).
    pub positively_regressive: bool,
    /// Smallest `|1 + mu p|` seen.
    pub min_abs: f64,
    /// Smallest `1 + mu p` seen.
    pub min_value: f64,
    /// First grid point violating the strongest property that fails, if any.
    pub witness_t: Option<f64>,
}

/// Scans `1 + mu(t) p(t)` at every grid point of `[a, b]` at step `h`.
pub fn regressivity_report<F: FnMut(f64) -> f64>(
    mut p: F,
    ts: &TimeScale,
    a: f64,
    b: f64,
    h: f64,
) -> Result<RegressivityReport, CoreError> {
    let grid = ts.grid(a, b, h)?;
    let mut min_abs = f64::INFINITY;
    let mut min_value = f64::INFINITY;
    let mut abs_witness = None;
    let mut sign_witness = None;
    for gp in &grid {
        let v = 1.0 + gp.mu_t * p(gp.t);
        min_abs = min_abs.min(v.abs());
        min_value = min_value.min(v);
        if v.abs() <= REGRESSIVITY_FLOOR && abs_witness.is_none() {
            abs_witness = Some(gp.t);
        }
        if v <= REGRESSIVITY_FLOOR && sign_witness.is_none() {
            sign_witness = Some(gp.t);
        }
    }
    let regressive = min_abs > REGRESSIVITY_FLOOR;
    let positively_regressive = min_value > REGRESSIVITY_FLOOR;
    Ok(RegressivityReport {
        regressive,
        positively_regressive,
        min_abs,
        min_value,
        witness_t: if !regressive { abs_witness } else if !positively_regressive { sign_witness } else { None },
    })
}

/// Circle plus: `p + q + mu p q`, the rate whose exponential is the product
/// of the exponentials of `p` and `q`.
pub fn circle_plus(p: f64, q: f64, mu: f64) -> f64 {
    p + q + mu * p * q
}

/// Circle minus: `(p - q) / (1 + mu q)`, the inverse of [`circle_plus`]
/// against `q`. Fails when `q` is not regressive for this graininess.
pub fn circle_minus(p: f64, q: f64, mu: f64) -> Result<f64, CoreError> {
    let denom = 1.0 + mu * q;
    if denom.abs() <= REGRESSIVITY_FLOOR {
        return Err(CoreError::NonRegressiveOperand { value: denom });
    }
    Ok((p - q) / denom)
}

/// Running product of scattered factors combined with the exponential of a
/// dense integral, with overflow turned into a structured error.
pub(crate) struct ExpAccumulator {
    product: f64,
    integral: f64,
    context: &'static str,
}

impl ExpAccumulator {
    pub(crate) fn new(context: &'static str) -> Self {
        ExpAccumulator {
            product: 1.0,
            integral: 0.0,
            context,
        }
    }

    /// Multiplies a scattered factor `1 + mu p`, rejecting factors inside
    /// the regressivity floor.
    pub(crate) fn scattered(&mut self, t: f64, factor: f64) -> Result<(), CoreError> {
        if !factor.is_finite() || factor.abs() <= REGRESSIVITY_FLOOR {
            return Err(CoreError::NonRegressive { t, value: factor });
        }
        self.product *= factor;
        if !self.product.is_finite() {
            return Err(CoreError::Overflow {
                context: self.context,
            });
        }
        Ok(())
    }

    /// Adds a continuous-part integral contribution (kept in log space).
    pub(crate) fn dense(&mut self, integral_piece: f64) {
        self.integral += integral_piece;
    }

    /// `product * exp(integral)`, computed through logs when the plain
    /// route would overflow prematurely.
    pub(crate) fn value(&self) -> Result<f64, CoreError> {
        let v = if self.integral.abs() <= 700.0 {
            self.product * self.integral.exp()
        } else if self.product == 0.0 {
            0.0
        } else {
            let ln_mag = self.product.abs().ln() + self.integral;
            self.product.signum() * ln_mag.exp()
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(CoreError::Overflow {
                context: self.context,
            })
        }
    }
}

/// Generalized exponential `e_p(t, t0)` on `ts`, with continuous parts
/// integrated by composite Simpson at step `h`.
///
/// For `t < t0` this is the reciprocal of the exponential over `[t, t0]`.
/// Fails with a witness when `p` is not regressive at a scattered point of
/// the span, and with an overflow error when the value leaves `f64` range.
pub fn exponential<F: FnMut(f64) -> f64>(
    mut p: F,
    ts: &TimeScale,
    t: f64,
    t0: f64,
    h: f64,
) -> Result<f64, CoreError> {
    if !(h.is_finite() && h > 0.0) {
        return Err(CoreError::InvalidStep { h });
    }
    let t = ts.snap(t)?;
    let t0 = ts.snap(t0)?;
    if t == t0 {
        return Ok(1.0);
    }
    if t < t0 {
        let forward = exponential(p, ts, t0, t, h)?;
        if forward == 0.0 {
            return Err(CoreError::Overflow {
                context: "reciprocal of an underflowed exponential",
            });
        }
        return Ok(1.0 / forward);
    }
    let mut acc = ExpAccumulator::new("exponential e_p");
    accumulate_exponential(&mut p, ts, t0, t, h, &mut acc)?;
    acc.value()
}

/// `e_p(sigma(t), t0)`: the exponential advanced across `t`'s own jump.
pub fn exponential_at_sigma<F: FnMut(f64) -> f64>(
    mut p: F,
    ts: &TimeScale,
    t: f64,
    t0: f64,
    h: f64,
) -> Result<f64, CoreError> {
    let gp = ts.grid_point(t)?;
    let base = exponential(&mut p, ts, gp.t, t0, h)?;
    match gp.kind {
        PointKind::RightScattered => {
            let factor = 1.0 + gp.mu_t * p(gp.t);
            if !factor.is_finite() || factor.abs() <= REGRESSIVITY_FLOOR {
                return Err(CoreError::NonRegressive {
                    t: gp.t,
                    value: factor,
                });
            }
            let v = base * factor;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(CoreError::Overflow {
                    context: "exponential e_p at sigma",
                })
            }
        }
        _ => Ok(base),
    }
}

/// Folds the scattered factors and dense integrals of `[t0, t]` into `acc`.
fn accumulate_exponential<F: FnMut(f64) -> f64>(
    p: &mut F,
    ts: &TimeScale,
    t0: f64,
    t: f64,
    h: f64,
    acc: &mut ExpAccumulator,
) -> Result<(), CoreError> {
    for seg in ts.segments() {
        if let Segment::Interval { lo, hi } = seg {
            let lo = lo.max(t0);
            let hi = hi.min(t);
            if hi > lo {
                // Rates that branch on the graininess must contribute their
                // dense restriction here; their jump value at a scattered
                // upper endpoint belongs to the product loop below.
                let hi_eval = ts.dense_upper_eval(lo, hi);
                acc.dense(quad::composite_simpson(
                    |u| p(if u == hi { hi_eval } else { u }),
                    lo,
                    hi,
                    h,
                ));
            }
        }
    }
    for pair in ts.segments().windows(2) {
        let s = pair[0].end();
        if s >= t0 && s < t {
            let mu = pair[1].start() - s;
            acc.scattered(s, 1.0 + mu * p(s))?;
        }
    }
    Ok(())
}
