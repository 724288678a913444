use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} is outside its domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("infeasible geometry (t = {t}, p = {p}, omega = {omega})")]
    Infeasible { t: f64, p: f64, omega: f64 },

    #[error("point (t = {t}, p = {p}, omega = {omega}) lies on the feasibility boundary")]
    Boundary { t: f64, p: f64, omega: f64 },

    #[error("tau = {tau} exceeds alpha = {alpha}")]
    Ordering { alpha: f64, tau: f64 },

    #[error("invalid channel pair (p0 = {p0}, p1 = {p1}): {reason}")]
    Channel { p0: f64, p1: f64, reason: &'static str },

    #[error("spectrum bound undefined: {0}")]
    Spectrum(String),

    #[error("quadrature did not converge (error estimate {estimate:e}, tolerance {tolerance:e})")]
    Quadrature { estimate: f64, tolerance: f64 },

    #[error("{what} * n = {scaled} is not an integer (n = {n})")]
    NonIntegral { what: &'static str, scaled: f64, n: usize },

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("threshold predicate is not monotone in p1 for p0 = {p0}")]
    NonMonotone { p0: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
