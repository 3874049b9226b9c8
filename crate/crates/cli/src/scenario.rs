//! The `.scn` scenario file format.
//!
//! A scenario is a plain `key = value` text file; `#` starts a comment.
//! Required keys: `timescale`, `b`, `c`, `x0`, `y0`, `z0`, `t0`, `t_end`.
//! Optional keys: `h` (grid step, default 1e-3), `horizon` (classification
//! horizon, default `t_end`), `method` (`closed`, `recursion`, or `both`,
//! default `both`).
//!
//! ```text
//! # hybrid quarantine window
//! timescale = [0,12], 13..24
//! b = const:0.4
//! c = const:0.2
//! x0 = 0.8
//! y0 = 0.2
//! z0 = 0.0
//! t0 = 0.0
//! t_end = 24.0
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use episcale::{CoefficientFunction, SirScenario, SirState, TimeScale, DEFAULT_STEP};

use crate::CliError;

/// Which solver routes a command should run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MethodChoice {
    Closed,
    Recursion,
    Both,
}

impl MethodChoice {
    pub fn methods(self) -> Vec<episcale::Method> {
        match self {
            MethodChoice::Closed => vec![episcale::Method::ClosedForm],
            MethodChoice::Recursion => vec![episcale::Method::Recursion],
            MethodChoice::Both => vec![episcale::Method::ClosedForm, episcale::Method::Recursion],
        }
    }
}

impl fmt::Display for MethodChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MethodChoice::Closed => "closed",
            MethodChoice::Recursion => "recursion",
            MethodChoice::Both => "both",
        })
    }
}

impl std::str::FromStr for MethodChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "closed" => Ok(MethodChoice::Closed),
            "recursion" => Ok(MethodChoice::Recursion),
            "both" => Ok(MethodChoice::Both),
            other => Err(format!(
                "unknown method `{other}` (use closed, recursion, or both)"
            )),
        }
    }
}

/// A parsed and resolved scenario file, ready to drive the solvers.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub scenario: SirScenario,
    pub t_end: f64,
    pub h: f64,
    pub horizon: f64,
    pub method: MethodChoice,
}

impl Scenario {
    /// Loads and resolves `path`; table coefficients resolve relative to the
    /// scenario file's directory.
    pub fn load(path: &Path) -> Result<Scenario, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            context: format!("reading {}", path.display()),
            source: e,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "scenario".to_string());
        parse(&text, base, name)
    }

    /// One-line summary of the problem this scenario poses.
    pub fn describe(&self) -> String {
        format!(
            "scenario {}: timescale {}, b {}, c {}, x0 {}, y0 {}, z0 {}, t0 {}, t_end {}, h {}, horizon {}, method {}",
            self.name,
            self.scenario.time_scale(),
            self.scenario.contact_rate(),
            self.scenario.removal_rate(),
            self.scenario.initial_state().x,
            self.scenario.initial_state().y,
            self.scenario.initial_state().z,
            self.scenario.initial_time(),
            self.t_end,
            self.h,
            self.horizon,
            self.method,
        )
    }
}

fn parse(text: &str, base: &Path, name: String) -> Result<Scenario, CliError> {
    let bad = |line: usize, msg: String| CliError::Scenario(format!("line {line}: {msg}"));

    let mut fields: BTreeMap<&str, (usize, String)> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| bad(line, format!("expected `key = value`, got `{content}`")))?;
        let key = key.trim();
        let value = value.trim();
        let known = [
            "timescale", "b", "c", "x0", "y0", "z0", "t0", "t_end", "h", "horizon", "method",
        ];
        let canonical = known
            .iter()
            .find(|k| **k == key)
            .ok_or_else(|| bad(line, format!("unknown key `{key}`")))?;
        if value.is_empty() {
            return Err(bad(line, format!("key `{key}` has no value")));
        }
        if fields.insert(canonical, (line, value.to_string())).is_some() {
            return Err(bad(line, format!("key `{key}` given twice")));
        }
    }

    let take = |key: &str| -> Result<(usize, String), CliError> {
        fields
            .get(key)
            .cloned()
            .ok_or_else(|| CliError::Scenario(format!("missing required key `{key}`")))
    };
    let number = |key: &str| -> Result<f64, CliError> {
        let (line, value) = take(key)?;
        value
            .parse::<f64>()
            .map_err(|_| bad(line, format!("`{key}` is not a number: `{value}`")))
    };
    let optional_number = |key: &str, default: f64| -> Result<f64, CliError> {
        match fields.get(key) {
            None => Ok(default),
            Some((line, value)) => value
                .parse::<f64>()
                .map_err(|_| bad(*line, format!("`{key}` is not a number: `{value}`"))),
        }
    };

    let (ts_line, ts_text) = take("timescale")?;
    let ts: TimeScale = ts_text
        .parse()
        .map_err(|e: episcale::CoreError| bad(ts_line, e.to_string()))?;

    let rate = |key: &str| -> Result<CoefficientFunction, CliError> {
        let (line, text) = take(key)?;
        CoefficientFunction::parse_with_base(&text, base).map_err(|e| bad(line, e.to_string()))
    };
    let contact = rate("b")?;
    let removal = rate("c")?;

    let init = SirState::new(number("x0")?, number("y0")?, number("z0")?);
    let t0 = number("t0")?;
    let t_end = number("t_end")?;
    let h = optional_number("h", DEFAULT_STEP)?;
    let horizon = optional_number("horizon", t_end)?;
    let method = match fields.get("method") {
        None => MethodChoice::Both,
        Some((line, value)) => value
            .parse::<MethodChoice>()
            .map_err(|e| bad(*line, e))?,
    };

    if !(h.is_finite() && h > 0.0) {
        return Err(CliError::Scenario(format!("step h must be positive, got {h}")));
    }
    let scenario = SirScenario::new(ts, contact, removal, init, t0)
        .map_err(|e| CliError::Scenario(e.to_string()))?;
    if scenario.time_scale().snap(t_end).is_err() {
        return Err(CliError::Scenario(format!(
            "t_end {t_end} is not in the timescale"
        )));
    }
    if scenario.time_scale().snap(horizon).is_err() {
        return Err(CliError::Scenario(format!(
            "horizon {horizon} is not in the timescale"
        )));
    }

    Ok(Scenario {
        name,
        scenario,
        t_end,
        h,
        horizon,
        method,
    })
}
