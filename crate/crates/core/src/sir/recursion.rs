//! Stepwise solution of the SIR system.
//!
//! At a right-scattered point the delta derivatives are plain difference
//! quotients and the system is linear in the post-jump state, so one jump is
//! solved exactly in closed form. On continuous stretches the system is the
//! classical SIR ODE and a fourth-order Runge-Kutta step is taken per grid
//! cell. Nothing here touches the generalized exponential, which keeps this
//! route independent of the product/quadrature formulas it is checked
//! against.

use crate::calculus::REGRESSIVITY_FLOOR;
use crate::error::CoreError;
use crate::sir::{SirScenario, SirState, POPULATION_FLOOR};
use crate::timescale::{GridPoint, PointKind};

/// Walks the grid, one exact jump or one fourth-order step per cell.
pub(crate) fn series(
    sc: &SirScenario,
    grid: &[GridPoint],
) -> Result<Vec<(GridPoint, SirState)>, CoreError> {
    let mut state = sc.initial_state();
    let mut out = Vec::with_capacity(grid.len());
    for (k, gp) in grid.iter().enumerate() {
        if !state.is_finite() {
            return Err(CoreError::NonFiniteSample { t: gp.t });
        }
        out.push((*gp, state));
        if k + 1 == grid.len() {
            break;
        }
        state = match gp.kind {
            PointKind::RightScattered => {
                debug_assert_eq!(grid[k + 1].t, gp.sigma_t);
                scattered_step(sc, state, *gp)?
            }
            PointKind::RightDense => rk4_step(sc, state, gp.t, grid[k + 1].t - gp.t)?,
            PointKind::Max => unreachable!("max point inside a grid"),
        };
    }
    Ok(out)
}

/// One exact jump across a right-scattered point.
///
/// With `phi = b x / (x + y)`, the post-jump infected share solves the
/// implicit difference equation directly: `y1 = y / (1 + mu (c - phi))`, and
/// the other compartments follow from their own difference quotients.
pub(crate) fn scattered_step(
    sc: &SirScenario,
    state: SirState,
    gp: GridPoint,
) -> Result<SirState, CoreError> {
    debug_assert_eq!(gp.kind, PointKind::RightScattered);
    let xy = state.x + state.y;
    if xy.abs() <= POPULATION_FLOOR {
        return Err(CoreError::DegenerateState { t: gp.t });
    }
    let phi = sc.contact_rate().eval(gp.t) * state.x / xy;
    let removal = sc.removal_rate().eval(gp.t);
    let denom = 1.0 + gp.mu_t * (removal - phi);
    if !denom.is_finite() || denom.abs() <= REGRESSIVITY_FLOOR {
        return Err(CoreError::NonRegressive {
            t: gp.t,
            value: denom,
        });
    }
    let y1 = state.y / denom;
    let next = SirState::new(
        state.x - gp.mu_t * phi * y1,
        y1,
        state.z + gp.mu_t * removal * y1,
    );
    if next.is_finite() {
        Ok(clamp_extinct(next))
    } else {
        Err(CoreError::NonFiniteSample { t: gp.sigma_t })
    }
}

/// One classical fourth-order step of size `dt` inside a continuous stretch
/// starting at `t`, on the ODE restriction of the system.
pub(crate) fn rk4_step(
    sc: &SirScenario,
    state: SirState,
    t: f64,
    dt: f64,
) -> Result<SirState, CoreError> {
    let field = |t: f64, s: SirState| -> Result<[f64; 3], CoreError> {
        let xy = s.x + s.y;
        if xy.abs() <= POPULATION_FLOOR {
            return Err(CoreError::DegenerateState { t });
        }
        let infection = sc.contact_rate().eval(t) * s.x * s.y / xy;
        let removal = sc.removal_rate().eval(t) * s.y;
        Ok([-infection, infection - removal, removal])
    };
    let advance = |s: SirState, k: [f64; 3], w: f64| {
        SirState::new(s.x + w * k[0], s.y + w * k[1], s.z + w * k[2])
    };
    let half = 0.5 * dt;
    let k1 = field(t, state)?;
    let k2 = field(t + half, advance(state, k1, half))?;
    let k3 = field(t + half, advance(state, k2, half))?;
    let k4 = field(t + dt, advance(state, k3, dt))?;
    let next = SirState::new(
        state.x + dt * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]) / 6.0,
        state.y + dt * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]) / 6.0,
        state.z + dt * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]) / 6.0,
    );
    if next.is_finite() {
        Ok(clamp_extinct(next))
    } else {
        Err(CoreError::NonFiniteSample { t: t + dt })
    }
}

/// An infected share that has decayed below the population floor is pinned
/// to zero, so a fully burnt-out epidemic sits exactly on its equilibrium.
fn clamp_extinct(mut state: SirState) -> SirState {
    if state.y.abs() < POPULATION_FLOOR {
        state.y = 0.0;
    }
    state
}
