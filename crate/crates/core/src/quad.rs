//! Composite Simpson quadrature on closed real intervals.
//!
//! All continuous-part integration in this crate funnels through these
//! helpers so that every caller partitions an interval the same way and two
//! quantities integrated over the same span see identical nodes.

/// Number of subintervals for a span of length `len` at target step `h`:
/// `ceil(len / h)` rounded up to an even count, at least 2.
pub(crate) fn even_intervals(len: f64, h: f64) -> usize {
    debug_assert!(len > 0.0 && h > 0.0);
    let n = (len / h).ceil() as usize;
    let n = n.max(2);
    if n % 2 == 0 {
        n
    } else {
        n + 1
    }
}

/// Composite Simpson rule over `[a, b]` with node spacing at most `h`.
///
/// Exact for polynomials of degree <= 3 on each pair; O(h^4) globally for
/// smooth integrands. Returns 0 when `a == b`.
pub(crate) fn composite_simpson<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, h: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    debug_assert!(b > a);
    let m = even_intervals(b - a, h);
    let step = (b - a) / m as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for k in 1..m {
        let t = a + k as f64 * step;
        if k % 2 == 1 {
            odd += f(t);
        } else {
            even += f(t);
        }
    }
    (step / 3.0) * (f(a) + 4.0 * odd + 2.0 * even + f(b))
}

/// Simpson value for one cell of width `width` from samples at the cell's
/// start, midpoint, and end.
pub(crate) fn cell(f0: f64, fmid: f64, f1: f64, width: f64) -> f64 {
    (width / 6.0) * (f0 + 4.0 * fmid + f1)
}

/// Integral over the first half of a cell of width `width`, from the same
/// three samples: the quadratic through them integrated over [0, width/2].
///
/// Together with `cell` this yields cumulative integrals at cell midpoints
/// without extra evaluations; the two halves sum to `cell` exactly.
pub(crate) fn cell_first_half(f0: f64, fmid: f64, f1: f64, width: f64) -> f64 {
    (width / 24.0) * (5.0 * f0 + 8.0 * fmid - f1)
}
