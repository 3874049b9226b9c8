//! Time scales: closed subsets of the real line built from intervals and
//! isolated points.
//!
//! A [`TimeScale`] is stored canonically as a sorted list of disjoint
//! segments. Queries snap to the domain within [`SNAP_TOL`] to absorb
//! floating-point drift, and construction rejects scattered structure finer
//! than [`MIN_GAP`] so the jump operator stays well conditioned.
//!
//! The delta integral implemented here weights every right-scattered point
//! by its graininess and integrates continuous stretches with composite
//! Simpson quadrature at a caller-chosen step.

use std::fmt;
use std::str::FromStr;

use crate::error::CoreError;
use crate::quad;

/// Absolute tolerance for membership snapping: a query within this distance
/// of the domain is treated as the nearest domain point.
pub const SNAP_TOL: f64 = 1e-12;

/// Minimum gap between distinct scattered entities (isolated points or an
/// interval endpoint and its successor). Finer structure is rejected at
/// construction; it would make graininess indistinguishable from rounding.
pub const MIN_GAP: f64 = 1e-9;

/// Default quadrature / sampling step, in time units.
pub const DEFAULT_STEP: f64 = 1e-3;

/// One building block of a time scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    /// Closed interval `[lo, hi]` with `lo < hi`.
    Interval { lo: f64, hi: f64 },
    /// Isolated point.
    Point(f64),
}

impl Segment {
    /// Leftmost point of the segment.
    pub fn start(&self) -> f64 {
        match *self {
            Segment::Interval { lo, .. } => lo,
            Segment::Point(t) => t,
        }
    }

    /// Rightmost point of the segment.
    pub fn end(&self) -> f64 {
        match *self {
            Segment::Interval { hi, .. } => hi,
            Segment::Point(t) => t,
        }
    }
}

/// How a point sits relative to its right neighbourhood.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointKind {
    /// The forward jump lands on the point itself and points exist beyond it.
    RightDense,
    /// The forward jump is strictly ahead: positive graininess.
    RightScattered,
    /// The maximum of the time scale.
    Max,
}

/// A sample of the time scale together with its jump data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub t: f64,
    pub sigma_t: f64,
    pub mu_t: f64,
    pub kind: PointKind,
}

/// Canonical time scale: sorted disjoint segments with gaps of at least
/// [`MIN_GAP`] between scattered neighbours.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeScale {
    segments: Vec<Segment>,
}

impl TimeScale {
    /// Builds a canonical time scale from raw segments.
    ///
    /// Overlapping and touching segments are merged, points on or inside
    /// intervals are absorbed, and intervals no longer than [`SNAP_TOL`]
    /// collapse to points. Construction fails on an empty list, non-finite
    /// or reversed endpoints, and on gaps below [`MIN_GAP`].
    pub fn new(segments: Vec<Segment>) -> Result<Self, CoreError> {
        if segments.is_empty() {
            return Err(CoreError::EmptyDomain);
        }
        let mut spans: Vec<(f64, f64)> = Vec::with_capacity(segments.len());
        for seg in &segments {
            let (lo, hi) = (seg.start(), seg.end());
            if !lo.is_finite() || !hi.is_finite() {
                return Err(CoreError::InvalidEndpoint {
                    value: if lo.is_finite() { hi } else { lo },
                });
            }
            if lo > hi {
                return Err(CoreError::InvalidEndpoint { value: lo });
            }
            spans.push((lo, hi));
        }
        spans.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(spans.len());
        for (lo, hi) in spans {
            match merged.last_mut() {
                Some((_, last_hi)) if lo - *last_hi <= SNAP_TOL => {
                    *last_hi = last_hi.max(hi);
                }
                Some(&mut (_, last_hi)) if lo - last_hi < MIN_GAP => {
                    return Err(CoreError::MinGapViolation {
                        left: last_hi,
                        right: lo,
                    });
                }
                _ => merged.push((lo, hi)),
            }
        }

        let canonical = merged
            .into_iter()
            .map(|(lo, hi)| {
                if hi - lo <= SNAP_TOL {
                    Segment::Point(lo)
                } else {
                    Segment::Interval { lo, hi }
                }
            })
            .collect();
        Ok(TimeScale { segments: canonical })
    }

    /// Single closed interval `[lo, hi]`.
    pub fn interval(lo: f64, hi: f64) -> Result<Self, CoreError> {
        Self::new(vec![Segment::Interval { lo, hi }])
    }

    /// Integer lattice `{lo, lo+1, ..., hi}`.
    pub fn integer_range(lo: i64, hi: i64) -> Result<Self, CoreError> {
        if lo > hi {
            return Err(CoreError::InvalidEndpoint { value: lo as f64 });
        }
        Self::new((lo..=hi).map(|k| Segment::Point(k as f64)).collect())
    }

    /// Canonical segments, sorted and disjoint.
    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Minimum of the time scale.
    pub fn min(&self) -> f64 {
        self.segments[0].start()
    }

    /// Maximum of the time scale.
    pub fn max(&self) -> f64 {
        self.segments[self.segments.len() - 1].end()
    }

    /// True when `t` lies in the domain, up to [`SNAP_TOL`].
    pub fn contains(&self, t: f64) -> bool {
        self.locate(t).is_some()
    }

    /// Nearest domain point within [`SNAP_TOL`] of `t`.
    pub fn snap(&self, t: f64) -> Result<f64, CoreError> {
        self.locate(t)
            .map(|(_, tt)| tt)
            .ok_or(CoreError::NotInDomain { t })
    }

    fn locate(&self, t: f64) -> Option<(usize, f64)> {
        if !t.is_finite() {
            return None;
        }
        let i = self.segments.partition_point(|s| s.start() <= t);
        if i > 0 {
            let s = &self.segments[i - 1];
            if t <= s.end() + SNAP_TOL {
                return Some((i - 1, t.clamp(s.start(), s.end())));
            }
        }
        if i < self.segments.len() {
            let s = &self.segments[i];
            if t >= s.start() - SNAP_TOL {
                return Some((i, s.start()));
            }
        }
        None
    }

    /// Forward jump operator: the least domain point strictly after `t`, or
    /// `t` itself at the maximum.
    pub fn sigma(&self, t: f64) -> Result<f64, CoreError> {
        self.grid_point(t).map(|gp| gp.sigma_t)
    }

    /// Graininess `sigma(t) - t`.
    pub fn mu(&self, t: f64) -> Result<f64, CoreError> {
        self.grid_point(t).map(|gp| gp.mu_t)
    }

    /// Jump data for a single domain point.
    pub fn grid_point(&self, t: f64) -> Result<GridPoint, CoreError> {
        let (i, tt) = self.locate(t).ok_or(CoreError::NotInDomain { t })?;
        let seg = &self.segments[i];
        let interior = matches!(seg, Segment::Interval { hi, .. } if tt < *hi);
        if interior {
            return Ok(GridPoint {
                t: tt,
                sigma_t: tt,
                mu_t: 0.0,
                kind: PointKind::RightDense,
            });
        }
        match self.segments.get(i + 1) {
            Some(next) => {
                let sigma_t = next.start();
                Ok(GridPoint {
                    t: tt,
                    sigma_t,
                    mu_t: sigma_t - tt,
                    kind: PointKind::RightScattered,
                })
            }
            None => Ok(GridPoint {
                t: tt,
                sigma_t: tt,
                mu_t: 0.0,
                kind: PointKind::Max,
            }),
        }
    }

    /// Sampling grid over `[t0, t1]`: every scattered point of the span plus
    /// uniform samples of each continuous stretch at spacing at most `h`.
    ///
    /// The grid starts at `t0`, ends at `t1`, is strictly increasing, and
    /// contains every interval endpoint of the span exactly once.
    pub fn grid(&self, t0: f64, t1: f64, h: f64) -> Result<Vec<GridPoint>, CoreError> {
        if !(h.is_finite() && h > 0.0) {
            return Err(CoreError::InvalidStep { h });
        }
        let a = self.snap(t0)?;
        let b = self.snap(t1)?;
        if a > b {
            return Err(CoreError::ReversedSpan { start: t0, end: t1 });
        }
        let mut out = Vec::new();
        for seg in &self.segments {
            let lo = seg.start().max(a);
            let hi = seg.end().min(b);
            if lo > hi {
                continue;
            }
            if hi == lo {
                out.push(self.grid_point(lo)?);
                continue;
            }
            let n = ((hi - lo) / h).ceil() as usize;
            let n = n.max(1);
            let step = (hi - lo) / n as f64;
            for k in 0..=n {
                let t = if k == n { hi } else { lo + k as f64 * step };
                out.push(self.grid_point(t)?);
            }
        }
        debug_assert!(out.windows(2).all(|w| w[0].t < w[1].t));
        Ok(out)
    }

    /// Evaluation point standing in for the upper end of a dense stretch
    /// `[lo, hi]` during quadrature.
    ///
    /// The dense part of a delta integral is a Lebesgue integral, so the
    /// single point `hi` carries no mass; but when `hi` is right-scattered,
    /// integrands built from the graininess take their jump value there and
    /// a quadrature node right on `hi` would leak that value into the dense
    /// sum. Pulling the evaluation one representable step inside makes such
    /// integrands take their dense branch, at a cost far below rounding.
    pub(crate) fn dense_upper_eval(&self, lo: f64, hi: f64) -> f64 {
        match self.grid_point(hi) {
            Ok(GridPoint {
                kind: PointKind::RightScattered,
                ..
            }) => hi.next_down().max(lo),
            _ => hi,
        }
    }

    /// Right-scattered points `s` of the span `a <= s < b`, with graininess.
    fn scattered_in(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.segments.windows(2).filter_map(move |w| {
            let s = w[0].end();
            if s >= a && s < b {
                Some((s, w[1].start() - s))
            } else {
                None
            }
        })
    }

    /// Delta integral of `f` over `[a, b]`: graininess-weighted sums at
    /// right-scattered points plus composite Simpson quadrature at step `h`
    /// on continuous stretches.
    pub fn delta_integral<F: FnMut(f64) -> f64>(
        &self,
        mut f: F,
        a: f64,
        b: f64,
        h: f64,
    ) -> Result<f64, CoreError> {
        if !(h.is_finite() && h > 0.0) {
            return Err(CoreError::InvalidStep { h });
        }
        let a = self.snap(a)?;
        let b = self.snap(b)?;
        if a > b {
            return Err(CoreError::ReversedSpan { start: a, end: b });
        }
        let mut total = 0.0;
        for seg in &self.segments {
            if let Segment::Interval { lo, hi } = seg {
                let lo = lo.max(a);
                let hi = hi.min(b);
                if hi > lo {
                    let hi_eval = self.dense_upper_eval(lo, hi);
                    total +=
                        quad::composite_simpson(|t| f(if t == hi { hi_eval } else { t }), lo, hi, h);
                }
            }
        }
        for (s, mu) in self.scattered_in(a, b) {
            total += f(s) * mu;
        }
        Ok(total)
    }

    /// Running delta integral along the grid of `[a, b]`: for each grid
    /// point `t`, the delta integral of `f` over `[a, t]`.
    ///
    /// Each dense grid cell is integrated with a three-sample Simpson rule,
    /// so values at interior samples carry the same O(h^4) accuracy as
    /// [`TimeScale::delta_integral`].
    pub fn running_delta_integral<F: FnMut(f64) -> f64>(
        &self,
        mut f: F,
        a: f64,
        b: f64,
        h: f64,
    ) -> Result<Vec<(GridPoint, f64)>, CoreError> {
        let grid = self.grid(a, b, h)?;
        let mut out = Vec::with_capacity(grid.len());
        let mut running = 0.0;
        for (k, gp) in grid.iter().enumerate() {
            out.push((*gp, running));
            if k + 1 == grid.len() {
                break;
            }
            let next = &grid[k + 1];
            match gp.kind {
                PointKind::RightScattered => {
                    debug_assert_eq!(gp.sigma_t, next.t);
                    running += f(gp.t) * gp.mu_t;
                }
                PointKind::RightDense => {
                    let width = next.t - gp.t;
                    let fm = f(gp.t + 0.5 * width);
                    // Same dense-restriction rule as `delta_integral`.
                    let end = if next.kind == PointKind::RightScattered {
                        next.t.next_down().max(gp.t)
                    } else {
                        next.t
                    };
                    running += quad::cell(f(gp.t), fm, f(end), width);
                }
                PointKind::Max => unreachable!("max point inside a grid"),
            }
        }
        Ok(out)
    }
}

impl FromStr for TimeScale {
    type Err = CoreError;

    /// Parses a time-scale literal: comma-separated segments, where
    /// `[lo,hi]` is a closed interval, `lo..hi` expands to the inclusive
    /// integer lattice, and a bare number is an isolated point.
    fn from_str(s: &str) -> Result<Self, CoreError> {
        let bad = |reason: &str| CoreError::BadTimeScaleLiteral {
            literal: s.to_string(),
            reason: reason.to_string(),
        };
        let mut tokens = Vec::new();
        let mut depth = 0usize;
        let mut current = String::new();
        for ch in s.chars() {
            match ch {
                '[' => {
                    depth += 1;
                    current.push(ch);
                }
                ']' => {
                    depth = depth.checked_sub(1).ok_or_else(|| bad("unmatched `]`"))?;
                    current.push(ch);
                }
                ',' if depth == 0 => {
                    tokens.push(std::mem::take(&mut current));
                }
                _ => current.push(ch),
            }
        }
        if depth != 0 {
            return Err(bad("unmatched `[`"));
        }
        tokens.push(current);

        let mut segments = Vec::new();
        for token in &tokens {
            let token = token.trim();
            if token.is_empty() {
                return Err(bad("empty segment"));
            }
            if let Some(inner) = token.strip_prefix('[') {
                let inner = inner.strip_suffix(']').ok_or_else(|| bad("missing `]`"))?;
                let (lo, hi) = inner.split_once(',').ok_or_else(|| {
                    bad("interval needs two comma-separated endpoints")
                })?;
                let lo: f64 = lo.trim().parse().map_err(|_| bad("bad interval endpoint"))?;
                let hi: f64 = hi.trim().parse().map_err(|_| bad("bad interval endpoint"))?;
                segments.push(Segment::Interval { lo, hi });
            } else if let Some((lo, hi)) = token.split_once("..") {
                let lo: i64 = lo.trim().parse().map_err(|_| bad("bad lattice bound"))?;
                let hi: i64 = hi.trim().parse().map_err(|_| bad("bad lattice bound"))?;
                if lo > hi {
                    return Err(bad("lattice bounds reversed"));
                }
                segments.extend((lo..=hi).map(|k| Segment::Point(k as f64)));
            } else {
                let t: f64 = token.parse().map_err(|_| bad("bad point"))?;
                segments.push(Segment::Point(t));
            }
        }
        TimeScale::new(segments)
    }
}

impl fmt::Display for TimeScale {
    /// Canonical literal form; integer points one apart are compressed back
    /// to `lo..hi` runs.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn is_lattice_point(seg: &Segment) -> Option<i64> {
            match seg {
                Segment::Point(t) if t.fract() == 0.0 && t.abs() < 2e15 => Some(*t as i64),
                _ => None,
            }
        }
        let mut first = true;
        let mut sep = |f: &mut fmt::Formatter<'_>| -> fmt::Result {
            if first {
                first = false;
                Ok(())
            } else {
                write!(f, ", ")
            }
        };
        let mut i = 0;
        while i < self.segments.len() {
            match self.segments[i] {
                Segment::Interval { lo, hi } => {
                    sep(f)?;
                    write!(f, "[{lo},{hi}]")?;
                    i += 1;
                }
                Segment::Point(t) => {
                    if let Some(start) = is_lattice_point(&self.segments[i]) {
                        let mut end = start;
                        let mut j = i + 1;
                        while j < self.segments.len() {
                            match is_lattice_point(&self.segments[j]) {
                                Some(v) if v == end + 1 => {
                                    end = v;
                                    j += 1;
                                }
                                _ => break,
                            }
                        }
                        sep(f)?;
                        if end > start {
                            write!(f, "{start}..{end}")?;
                        } else {
                            write!(f, "{start}")?;
                        }
                        i = j;
                    } else {
                        sep(f)?;
                        write!(f, "{t}")?;
                        i += 1;
                    }
                }
            }
        }
        Ok(())
    }
}
