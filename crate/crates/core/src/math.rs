//! Scalar information-theoretic functions. All logarithms are base 2 and
//! `0 log 0 = 0`.

use crate::error::{Error, Result};
use crate::search::bisect_increasing;

/// Slack allowed on feasibility and ordering constraints.
pub const FEASIBILITY_EPS: f64 = 1e-12;

/// Absolute tolerance of [`entropy_inverse`] in its argument space.
pub const INVERSE_TOL: f64 = 1e-15;

#[inline]
fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Binary entropy without domain checks; callers guarantee `x` in `[0, 1]`.
#[inline]
pub(crate) fn h(x: f64) -> f64 {
    debug_assert!((-FEASIBILITY_EPS..=1.0 + FEASIBILITY_EPS).contains(&x), "h({x})");
    let x = x.clamp(0.0, 1.0);
    -xlog2x(x) - xlog2x(1.0 - x)
}

fn check_unit(what: &'static str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            value: x,
            domain: "[0, 1]",
        })
    }
}

/// Binary entropy `h(x) = -x log x - (1-x) log (1-x)` in bits.
pub fn entropy(x: f64) -> Result<f64> {
    check_unit("x", x)?;
    Ok(h(x))
}

pub(crate) fn h_inv(y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    if y >= 1.0 {
        return 0.5;
    }
    bisect_increasing(0.0, 0.5, y, INVERSE_TOL, h)
}

/// The unique `x` in `[0, 1/2]` with `h(x) = h_target`, found by bisection.
pub fn entropy_inverse(h_target: f64) -> Result<f64> {
    check_unit("h_target", h_target)?;
    Ok(h_inv(h_target))
}

/// Gilbert-Varshamov relative distance: `h(delta) = 1 - rate`.
pub fn gv_distance(rate: f64) -> Result<f64> {
    check_unit("rate", rate)?;
    Ok(h_inv(1.0 - rate))
}

pub(crate) fn divergence_unchecked(a: f64, b: f64) -> f64 {
    let term = |x: f64, y: f64| if x <= 0.0 { 0.0 } else { x * (x / y).log2() };
    (term(a, b) + term(1.0 - a, 1.0 - b)).max(0.0)
}

/// Binary divergence `D(a || b)` in bits.
pub fn divergence(a: f64, b: f64) -> Result<f64> {
    check_unit("a", a)?;
    check_unit("b", b)?;
    if b == 0.0 || b == 1.0 {
        if a == b {
            return Ok(0.0);
        }
        return Err(Error::Domain {
            what: "b",
            value: b,
            domain: "(0, 1) when a != b",
        });
    }
    Ok(divergence_unchecked(a, b))
}

/// Normalized geometry of a point at distance `t` from `x_i` and `p` from
/// `x_k`, where the two centres are `omega` apart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometrySample {
    pub omega: f64,
    pub t: f64,
    pub p: f64,
    /// Fraction of coordinates inside the support of `x_i + x_k` where the point differs from `x_i`.
    pub u1: f64,
    /// Fraction of coordinates outside that support where the point differs from `x_i`.
    pub u2: f64,
    /// Half-width of the spherical slice around `p`.
    pub delta: f64,
}

impl GeometrySample {
    pub fn new(t: f64, p: f64, omega: f64, delta: f64) -> Self {
        Self {
            omega,
            t,
            p,
            u1: 0.5 * (t - p + omega),
            u2: 0.5 * (t + p - omega),
            delta,
        }
    }

    pub fn is_feasible(&self) -> bool {
        feasible(self.t, self.p, self.omega)
    }

    /// Interior points have every coordinate class partially occupied.
    pub fn is_interior(&self) -> bool {
        self.omega > 0.0
            && self.omega < 1.0
            && self.u1 > 0.0
            && self.u1 < self.omega
            && self.u2 > 0.0
            && self.u2 < 1.0 - self.omega
    }
}

/// Triangle feasibility of `(t, p, omega)` in the normalized Hamming cube.
pub fn feasible(t: f64, p: f64, omega: f64) -> bool {
    let e = FEASIBILITY_EPS;
    let in_unit = |x: f64| x >= -e && x <= 1.0 + e;
    in_unit(t)
        && in_unit(p)
        && in_unit(omega)
        && (t - p).abs() <= omega + e
        && omega <= t + p + e
        && omega <= 2.0 - t - p + e
}

/// Feasible range of `t` for fixed `p` and `omega`.
pub fn feasible_t_range(p: f64, omega: f64) -> (f64, f64) {
    ((p - omega).abs(), (p + omega).min(2.0 - omega - p).min(1.0))
}

pub(crate) fn g_unchecked(t: f64, p: f64, omega: f64) -> f64 {
    if omega <= FEASIBILITY_EPS {
        return h(0.5 * (t + p));
    }
    let inner = omega * h(((t + omega - p) / (2.0 * omega)).clamp(0.0, 1.0));
    if omega >= 1.0 - FEASIBILITY_EPS {
        return inner;
    }
    inner + (1.0 - omega) * h(((t + p - omega) / (2.0 * (1.0 - omega))).clamp(0.0, 1.0))
}

/// Exponent of `|S_t(x_i) ∩ S_p(x_k)|` for centres `omega` apart:
/// `omega h((t+omega-p)/(2 omega)) + (1-omega) h((t+p-omega)/(2(1-omega)))`.
///
/// At `omega = 0` the two spheres share a centre, so only `t = p` is feasible.
pub fn g(t: f64, p: f64, omega: f64) -> Result<f64> {
    if !feasible(t, p, omega) {
        return Err(Error::Infeasible { t, p, omega });
    }
    Ok(g_unchecked(t, p, omega))
}

/// Partial derivatives `(dg/domega, dg/dt)` at an interior point.
pub fn g_derivatives(t: f64, p: f64, omega: f64) -> Result<(f64, f64)> {
    if !feasible(t, p, omega) {
        return Err(Error::Infeasible { t, p, omega });
    }
    if !GeometrySample::new(t, p, omega, 0.0).is_interior() {
        return Err(Error::Boundary { t, p, omega });
    }
    let d_omega = -((1.0 - omega) / omega).log2()
        + 0.5 * (((1.0 - omega).powi(2) - (1.0 - t - p).powi(2)) / (omega * omega - (t - p).powi(2))).log2();
    let d_t = 0.5 * (((1.0 - t).powi(2) - (1.0 - omega - p).powi(2)) / (t * t - (omega - p).powi(2))).log2();
    Ok((d_omega, d_t))
}
