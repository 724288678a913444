//! One-dimensional bracketing searches shared by the bound computations.

/// Iteration ceiling for every bisection in the crate.
pub const MAX_BISECTION_STEPS: usize = 200;

/// Points used by the grid fallback when the concavity probe fails.
pub const FALLBACK_GRID: usize = 4096;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Bisection for the boundary of a predicate that holds at `lo` and fails at `hi`.
///
/// Returns the final `(lo, hi)` bracket, with `pred(lo)` true and `pred(hi)` false.
pub fn bisect_predicate<F>(mut lo: f64, mut hi: f64, tol: f64, mut pred: F) -> (f64, f64)
where
    F: FnMut(f64) -> bool,
{
    for _ in 0..MAX_BISECTION_STEPS {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Bisection for the root of an increasing function on `[lo, hi]`.
pub fn bisect_increasing<F>(lo: f64, hi: f64, target: f64, tol: f64, f: F) -> f64
where
    F: Fn(f64) -> f64,
{
    let (a, b) = bisect_predicate(lo, hi, tol, |x| f(x) < target);
    0.5 * (a + b)
}

/// Golden-section search for the maximum of a unimodal function.
///
/// Returns `(argmax, max)`.
pub fn golden_max<F>(mut lo: f64, mut hi: f64, tol: f64, f: F) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..MAX_BISECTION_STEPS {
        if hi - lo <= tol {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    // the endpoints are candidates too: the maximum may sit on the boundary
    let mut best = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    for x in [lo, hi] {
        let v = f(x);
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

/// Golden-section search for the minimum of a unimodal function.
pub fn golden_min<F>(lo: f64, hi: f64, tol: f64, f: F) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let (x, v) = golden_max(lo, hi, tol, |x| -f(x));
    (x, -v)
}

/// Dense-grid maximum over `[lo, hi]` with `points` samples.
pub fn grid_max<F>(lo: f64, hi: f64, points: usize, f: F) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let points = points.max(2);
    let step = (hi - lo) / (points - 1) as f64;
    (0..points)
        .map(|i| {
            let x = lo + step * i as f64;
            (x, f(x))
        })
        .fold(
            (lo, f64::NEG_INFINITY),
            |best, cur| if cur.1 > best.1 { cur } else { best },
        )
}

/// Three-point concavity probe at the quartiles of `[lo, hi]`.
fn looks_concave<F>(lo: f64, hi: f64, f: &F) -> bool
where
    F: Fn(f64) -> f64,
{
    let w = hi - lo;
    let (a, b, c) = (f(lo + 0.25 * w), f(lo + 0.5 * w), f(lo + 0.75 * w));
    if !(a.is_finite() && b.is_finite() && c.is_finite()) {
        return false;
    }
    2.0 * b + 1e-13 * (a.abs() + b.abs() + c.abs()) >= a + c
}

/// Maximises a function the caller expects to be concave.
///
/// Golden-section search is used when the three-point probe agrees;
/// otherwise a 4096-point grid is scanned and refined locally.
pub fn concave_max<F>(lo: f64, hi: f64, tol: f64, f: F) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    if hi <= lo {
        return (lo, f(lo));
    }
    if looks_concave(lo, hi, &f) {
        return golden_max(lo, hi, tol, &f);
    }
    let (x, _) = grid_max(lo, hi, FALLBACK_GRID, &f);
    let step = (hi - lo) / (FALLBACK_GRID - 1) as f64;
    golden_max((x - step).max(lo), (x + step).min(hi), tol, &f)
}
