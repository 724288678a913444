//! Adaptive Simpson quadrature with global error control.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Segment splits allowed per attempt.
const MAX_SPLITS: usize = 200_000;
/// Initial panel counts tried, doubling after each failed attempt.
const MAX_PANELS: usize = 16;

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    // Richardson-corrected value and its error estimate
    value: f64,
    error: f64,
    // coarse Simpson values of both halves, reused when splitting
    fl: f64,
    fr: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn segment<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> Segment {
    let m = 0.5 * (a + b);
    let fl = f(0.5 * (a + m));
    let fr = f(0.5 * (m + b));
    let whole = simpson(a, b, fa, fm, fb);
    let halves = simpson(a, m, fa, fl, fm) + simpson(m, b, fm, fr, fb);
    let delta = halves - whole;
    Segment {
        a,
        b,
        fa,
        fm,
        fb,
        value: halves + delta / 15.0,
        error: if delta.is_finite() {
            delta.abs() / 15.0
        } else {
            f64::INFINITY
        },
        fl,
        fr,
    }
}

struct Attempt {
    value: f64,
    error: f64,
}

fn attempt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, panels: usize) -> Attempt {
    let width = (b - a) / panels as f64;
    let mut heap = BinaryHeap::with_capacity(2 * panels);
    let mut fa = f(a);
    for i in 0..panels {
        let lo = a + width * i as f64;
        let hi = if i + 1 == panels { b } else { lo + width };
        let fb = f(hi);
        heap.push(segment(f, lo, hi, fa, f(0.5 * (lo + hi)), fb));
        fa = fb;
    }
    let mut total: f64 = heap.iter().map(|s| s.error).sum();
    for step in 0..MAX_SPLITS {
        if step % 1024 == 1023 {
            total = heap.iter().map(|s| s.error).sum();
        }
        if total <= tol || !total.is_finite() {
            break;
        }
        let worst = heap.pop().expect("segments are never empty");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            // cannot split further in floating point; keep its estimate
            total -= worst.error;
            heap.push(Segment { error: 0.0, ..worst });
            continue;
        }
        let left = segment(f, worst.a, m, worst.fa, worst.fl, worst.fm);
        let right = segment(f, m, worst.b, worst.fm, worst.fr, worst.fb);
        total += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // sum in interval order so the result does not depend on heap layout
    let mut parts = heap.into_vec();
    parts.sort_by(|x, y| x.a.total_cmp(&y.a));
    Attempt {
        value: parts.iter().map(|s| s.value).sum(),
        error: parts.iter().map(|s| s.error).sum(),
    }
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Segments with the largest error estimate are split first. If the split
/// budget runs out, the interval is re-integrated from twice as many
/// starting panels.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut panels = 1;
    let mut last = f64::INFINITY;
    while panels <= MAX_PANELS {
        let out = attempt(&f, a, b, tol, panels);
        if !out.value.is_finite() {
            last = f64::INFINITY;
            break;
        }
        if out.error <= tol {
            return Ok(out.value);
        }
        last = out.error;
        panels *= 2;
    }
    Err(Error::Quadrature {
        estimate: last,
        tolerance: tol,
    })
}
