//! Lower bound `mu(R, alpha, omega)` on the distance-spectrum exponent of any
//! rate-`R` binary code, in its integral and its closed representation.

use std::f64::consts::{LN_2, LOG2_E};

use crate::error::{Error, Result};
use crate::math::{h, h_inv, FEASIBILITY_EPS};
use crate::quad::adaptive_simpson;

/// Absolute tolerance handed to the quadrature.
pub const QUAD_TOL: f64 = 1e-10;

/// `G(alpha, tau)`: end of the distance range on which `mu` is guaranteed.
pub fn cap_distance(alpha: f64, tau: f64) -> Result<f64> {
    if !(0.0..=0.5 + FEASIBILITY_EPS).contains(&alpha) || tau < 0.0 {
        return Err(Error::Domain {
            what: "alpha",
            value: alpha,
            domain: "0 <= tau <= alpha <= 1/2",
        });
    }
    if tau > alpha + FEASIBILITY_EPS {
        return Err(Error::Ordering { alpha, tau });
    }
    Ok(cap_unchecked(alpha, tau.min(alpha)))
}

fn cap_unchecked(alpha: f64, tau: f64) -> f64 {
    let num = alpha * (1.0 - alpha) - tau * (1.0 - tau);
    (2.0 * num / (1.0 + 2.0 * (tau * (1.0 - tau)).sqrt())).max(0.0)
}

/// Solves `h(alpha) - h(tau) = 1 - rate` for `tau` in `[0, alpha]`.
pub fn tau_from(rate: f64, alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::Domain {
            what: "rate",
            value: rate,
            domain: "[0, 1]",
        });
    }
    if !(0.0..=0.5).contains(&alpha) {
        return Err(Error::Domain {
            what: "alpha",
            value: alpha,
            domain: "[0, 1/2]",
        });
    }
    let target = h(alpha) - 1.0 + rate;
    if target < -FEASIBILITY_EPS {
        return Err(Error::Domain {
            what: "alpha",
            value: alpha,
            domain: "[delta_GV(rate), 1/2]",
        });
    }
    Ok(h_inv(target).min(alpha))
}

/// The scalars shared by both representations of `mu` at one `(R, alpha, omega)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint {
    pub rate: f64,
    pub alpha: f64,
    pub tau: f64,
    pub omega: f64,
    /// `1 - 2 alpha`
    pub a: f64,
    /// `1 - 2 tau`
    pub b: f64,
    /// `(b^2 - a^2) / 2`
    pub a1: f64,
    /// `G(alpha, tau)`
    pub cap: f64,
}

impl SpectrumPoint {
    pub fn new(rate: f64, alpha: f64, omega: f64) -> Result<Self> {
        let tau = tau_from(rate, alpha)?;
        let cap = cap_unchecked(alpha, tau);
        if !(omega >= 0.0 && omega <= cap * (1.0 + 1e-12) + 1e-15) {
            return Err(Error::Spectrum(format!(
                "omega = {omega} outside [0, G(alpha, tau) = {cap}] for rate {rate}, alpha {alpha}"
            )));
        }
        let omega = omega.min(cap);
        let a = 1.0 - 2.0 * alpha;
        let b = 1.0 - 2.0 * tau;
        Ok(Self {
            rate,
            alpha,
            tau,
            omega,
            a,
            b,
            a1: 0.5 * (b * b - a * a),
            cap,
        })
    }

    /// `(P, Q)` of the integrand at `y`.
    pub fn pq(&self, y: f64) -> (f64, f64) {
        let (al, ta) = (self.alpha, self.tau);
        let p = al * (1.0 - al) - ta * (1.0 - ta) - y * (1.0 - 2.0 * y);
        let q = (al - y) * (1.0 - al - y);
        (p, q)
    }

    /// `log2((P + sqrt(P^2 - 4 Q y^2)) / Q)`.
    pub fn integrand(&self, y: f64) -> f64 {
        let (p, q) = self.pq(y);
        let disc = (p * p - 4.0 * q * y * y).max(0.0);
        ((p + disc.sqrt()) / q).log2()
    }

    fn tail(&self) -> f64 {
        let w = self.omega;
        (1.0 - w) * h(((self.alpha - 0.5 * w) / (1.0 - w)).clamp(0.0, 1.0))
    }

    pub fn mu_integral(&self) -> Result<f64> {
        if self.omega == 0.0 {
            return Ok(0.0);
        }
        let integral = adaptive_simpson(|y| self.integrand(y), 0.0, 0.5 * self.omega, QUAD_TOL)?;
        Ok(h(self.alpha) - 2.0 * integral - self.tail())
    }

    /// The auxiliary root `v`.
    pub fn v(&self) -> Result<f64> {
        let w = self.omega;
        // b^2 w^2 - 2 a1 w + a1^2, rearranged so the tau = 0 case is a perfect square
        let disc = (self.a1 - w).powi(2) - 4.0 * self.tau * (1.0 - self.tau) * w * w;
        if disc < -1e-12 * self.a1.powi(2).max(f64::MIN_POSITIVE) {
            return Err(Error::Spectrum(format!(
                "negative discriminant {disc} at alpha {}, tau {}, omega {w}",
                self.alpha, self.tau
            )));
        }
        Ok((disc.max(0.0).sqrt() + self.a1) / w)
    }

    /// The correction term `T(A, B, omega)`.
    pub fn t_term(&self) -> Result<f64> {
        let v = self.v()?;
        let (a, b, w) = (self.a, self.b, self.omega);
        let a_part = if a == 0.0 { 0.0 } else { a * ((v + a) / (v - a)).log2() };
        if b == 1.0 {
            // the log(v - 1) terms cancel identically, which keeps omega = G finite
            return Ok(-(1.0 - w) * (v * v - a * a).log2() + (2.0 - w) * (v + 1.0).log2()
                - a_part
                - (1.0 - a * a) / ((v + 1.0) * LN_2));
        }
        Ok(
            w * (v - 1.0).log2() - (1.0 - w) * ((v * v - a * a) / (v * v - b * b)).log2()
                + b * ((v + b) / (v - b)).log2()
                - a_part
                - (v - 1.0) * (b * b - a * a) / ((v * v - b * b) * LN_2),
        )
    }

    pub fn mu_closed(&self) -> Result<f64> {
        let w = self.omega;
        if w == 0.0 {
            return Ok(0.0);
        }
        let t = self.t_term()?;
        Ok(self.tail() - h(self.alpha) + 2.0 * h(w) + w * ((2.0 * w).log2() - LOG2_E) - t)
    }
}

/// `mu(R, alpha, omega)` from its integral representation.
pub fn mu_integral(rate: f64, alpha: f64, omega: f64) -> Result<f64> {
    SpectrumPoint::new(rate, alpha, omega)?.mu_integral()
}

/// `mu(R, alpha, omega)` from its closed representation.
pub fn mu_closed(rate: f64, alpha: f64, omega: f64) -> Result<f64> {
    SpectrumPoint::new(rate, alpha, omega)?.mu_closed()
}
