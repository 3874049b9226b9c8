//! Named coefficient families for time-varying rates.
//!
//! Scenario files refer to rates by literal, e.g. `const:0.4`,
//! `recip:a=1,shift=1`, or `table:rates.csv`. Parsing lives here so every
//! consumer resolves literals against the same registry; evaluation is
//! total over `f64` (a tabulated rate queried outside its knot range yields
//! NaN, which span validation turns into a structured error up front).

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::CoreError;
use crate::timescale::TimeScale;

/// A scalar rate as a function of time.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientFunction {
    /// `v`
    Constant(f64),
    /// `a / (t + shift)`
    Reciprocal { a: f64, shift: f64 },
    /// Standard log-normal density: `exp(-ln(t)^2 / 2) / (t sqrt(2 pi))`,
    /// zero for `t <= 0`.
    LogNormalPdf,
    /// Saturating growth `s * (1 - exp(-r t - d))`.
    VonBertalanffy { s: f64, r: f64, d: f64 },
    /// `base + amp * sin(m t)`.
    Sinusoid { base: f64, amp: f64, m: f64 },
    /// Piecewise-linear interpolation through `(t, value)` knots with
    /// strictly increasing `t`; NaN outside the knot range.
    Tabulated { knots: Vec<(f64, f64)> },
}

impl CoefficientFunction {
    /// Evaluates the rate at `t`.
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            CoefficientFunction::Constant(v) => *v,
            CoefficientFunction::Reciprocal { a, shift } => a / (t + shift),
            CoefficientFunction::LogNormalPdf => {
                if t <= 0.0 {
                    0.0
                } else {
                    let ln_t = t.ln();
                    (-0.5 * ln_t * ln_t).exp() / (t * (2.0 * std::f64::consts::PI).sqrt())
                }
            }
            CoefficientFunction::VonBertalanffy { s, r, d } => s * (1.0 - (-r * t - d).exp()),
            CoefficientFunction::Sinusoid { base, amp, m } => base + amp * (m * t).sin(),
            CoefficientFunction::Tabulated { knots } => {
                let n = knots.len();
                if t < knots[0].0 || t > knots[n - 1].0 {
                    return f64::NAN;
                }
                let i = knots.partition_point(|k| k.0 <= t);
                if i == n {
                    return knots[n - 1].1;
                }
                let (t0, v0) = knots[i - 1];
                let (t1, v1) = knots[i];
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }

    /// The constant value when the rate does not depend on time.
    pub fn as_constant(&self) -> Option<f64> {
        match self {
            CoefficientFunction::Constant(v) => Some(*v),
            _ => None,
        }
    }

    /// Checks that the rate is finite (and nonnegative when `require_nonnegative`)
    /// at every grid point of `[a, b]`, and that a tabulated rate covers the
    /// whole span, so later quadrature cannot step outside the knots.
    pub fn validate_on(
        &self,
        name: &str,
        ts: &TimeScale,
        a: f64,
        b: f64,
        h: f64,
        require_nonnegative: bool,
    ) -> Result<(), CoreError> {
        if let CoefficientFunction::Tabulated { knots } = self {
            let (have_lo, have_hi) = (knots[0].0, knots[knots.len() - 1].0);
            if a < have_lo || b > have_hi {
                return Err(CoreError::TableRange {
                    need_lo: a,
                    need_hi: b,
                    have_lo,
                    have_hi,
                });
            }
        }
        for gp in ts.grid(a, b, h)? {
            let v = self.eval(gp.t);
            if !v.is_finite() || (require_nonnegative && v < 0.0) {
                return Err(CoreError::InvalidCoefficient {
                    name: name.to_string(),
                    t: gp.t,
                    value: v,
                });
            }
        }
        Ok(())
    }

    /// Parses a coefficient literal, resolving `table:` paths against
    /// `base_dir`.
    pub fn parse_with_base(literal: &str, base_dir: &Path) -> Result<Self, CoreError> {
        let bad = |reason: String| CoreError::BadCoefficientLiteral {
            literal: literal.to_string(),
            reason,
        };
        let trimmed = literal.trim();
        let (kind, rest) = match trimmed.split_once(':') {
            Some((k, r)) => (k.trim(), r.trim()),
            None => (trimmed, ""),
        };
        match kind {
            "const" => {
                let v: f64 = rest
                    .parse()
                    .map_err(|_| bad(format!("`{rest}` is not a number")))?;
                Ok(CoefficientFunction::Constant(v))
            }
            "recip" => {
                let p = named_params(rest, &["a", "shift"]).map_err(&bad)?;
                Ok(CoefficientFunction::Reciprocal {
                    a: p[0],
                    shift: p[1],
                })
            }
            "lognormpdf" => {
                if rest.is_empty() {
                    Ok(CoefficientFunction::LogNormalPdf)
                } else {
                    Err(bad("lognormpdf takes no parameters".to_string()))
                }
            }
            "vonbert" => {
                let p = named_params(rest, &["s", "r", "d"]).map_err(&bad)?;
                Ok(CoefficientFunction::VonBertalanffy {
                    s: p[0],
                    r: p[1],
                    d: p[2],
                })
            }
            "sin" => {
                let p = named_params(rest, &["base", "amp", "m"]).map_err(&bad)?;
                Ok(CoefficientFunction::Sinusoid {
                    base: p[0],
                    amp: p[1],
                    m: p[2],
                })
            }
            "table" => {
                if rest.is_empty() {
                    return Err(bad("table needs a file path".to_string()));
                }
                let path = base_dir.join(rest);
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
                let knots = parse_table(&text).map_err(&bad)?;
                Ok(CoefficientFunction::Tabulated { knots })
            }
            other => Err(bad(format!("unknown coefficient kind `{other}`"))),
        }
    }
}

impl FromStr for CoefficientFunction {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self, CoreError> {
        Self::parse_with_base(s, Path::new("."))
    }
}

impl fmt::Display for CoefficientFunction {
    /// Literal form where one exists; tabulated rates print a summary since
    /// their knots came from a file.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientFunction::Constant(v) => write!(f, "const:{v}"),
            CoefficientFunction::Reciprocal { a, shift } => write!(f, "recip:a={a},shift={shift}"),
            CoefficientFunction::LogNormalPdf => write!(f, "lognormpdf"),
            CoefficientFunction::VonBertalanffy { s, r, d } => {
                write!(f, "vonbert:s={s},r={r},d={d}")
            }
            CoefficientFunction::Sinusoid { base, amp, m } => {
                write!(f, "sin:base={base},amp={amp},m={m}")
            }
            CoefficientFunction::Tabulated { knots } => write!(
                f,
                "table({} knots on [{}, {}])",
                knots.len(),
                knots[0].0,
                knots[knots.len() - 1].0
            ),
        }
    }
}

/// Parses `k1=v1,k2=v2,...` requiring exactly the given keys, in any order.
fn named_params(rest: &str, keys: &[&str]) -> Result<Vec<f64>, String> {
    let mut values: Vec<Option<f64>> = vec![None; keys.len()];
    if rest.is_empty() {
        return Err(format!("expected parameters {}", keys.join(", ")));
    }
    for part in rest.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| format!("`{part}` is not `name=value`"))?;
        let k = k.trim();
        let idx = keys
            .iter()
            .position(|key| *key == k)
            .ok_or_else(|| format!("unknown parameter `{k}`"))?;
        if values[idx].is_some() {
            return Err(format!("duplicate parameter `{k}`"));
        }
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| format!("`{}` is not a number", v.trim()))?;
        values[idx] = Some(v);
    }
    values
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| format!("missing parameter `{}`", keys[i])))
        .collect()
}

/// Parses a two-column `t,value` table. `#` lines and a `t,value` header
/// are skipped; knots must be strictly increasing in `t` and at least two.
fn parse_table(text: &str) -> Result<Vec<(f64, f64)>, String> {
    let mut knots = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (a, b) = line
            .split_once(',')
            .ok_or_else(|| format!("line {}: expected `t,value`", lineno + 1))?;
        let (a, b) = (a.trim(), b.trim());
        if knots.is_empty() && a.parse::<f64>().is_err() {
            continue; // header row
        }
        let t: f64 = a
            .parse()
            .map_err(|_| format!("line {}: bad t `{a}`", lineno + 1))?;
        let v: f64 = b
            .parse()
            .map_err(|_| format!("line {}: bad value `{b}`", lineno + 1))?;
        if let Some(&(prev, _)) = knots.last() {
            if t <= prev {
                return Err(format!("line {}: t must increase (got {t} after {prev})", lineno + 1));
            }
        }
        knots.push((t, v));
    }
    if knots.len() < 2 {
        return Err("table needs at least two knots".to_string());
    }
    Ok(knots)
}
