//! Shared fixtures for the benchmark targets.

use episcale::{CoefficientFunction, SirScenario, SirState, TimeScale};

/// Twelve continuous days followed by twelve daily samples, constant rates.
/// Exercises both the quadrature and the jump-product paths.
pub fn hybrid_scenario() -> SirScenario {
    let ts: TimeScale = "[0,12], 13..24".parse().unwrap();
    SirScenario::new(
        ts,
        CoefficientFunction::Constant(0.4),
        CoefficientFunction::Constant(0.2),
        SirState::new(0.8, 0.2, 0.0),
        0.0,
    )
    .unwrap()
}

/// The hybrid scale alone, for calculus-level benchmarks.
pub fn hybrid_scale() -> TimeScale {
    "[0,12], 13..24".parse().unwrap()
}
