//! Lower and upper bounds on the critical rate `r_crit(p0, p1)`.
//!
//! * achievability: the random-coding tradeoff and the resulting lower bounds;
//! * two-hypothesis upper bound: a code is replaced by its closest pair of
//!   codewords, whose distance is limited by the MRRW bound;
//! * combinatorial upper bound on `tau_crit`, `r_crit = h(tau_crit)`;
//! * the conditional "additive" certificate built on the spectrum bound `mu`.

use std::fmt;

use crate::channel::ChannelPair;
use crate::error::{Error, Result};
use crate::math::{divergence_unchecked, feasible, feasible_t_range, g_unchecked, h, h_inv, FEASIBILITY_EPS};
use crate::search::{bisect_predicate, concave_max, golden_min};
use crate::spectrum::{cap_distance, tau_from, SpectrumPoint};

/// Search tolerance for maximizations over `t` and `omega`.
pub const SEARCH_TOL: f64 = 1e-12;

/// Bisection tolerance for the threshold `p1*(p0)`.
pub const THRESHOLD_TOL: f64 = 1e-9;

/// Number of `omega` samples scanned by [`check_additive`].
pub const ADDITIVE_GRID: usize = 512;

/// Rate bookkeeping: the dual rate `r` and the helper rate `R = 1 - r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub r: f64,
    pub big_r: f64,
    pub n: usize,
}

impl RatePoint {
    pub fn new(r: f64, n: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::Domain {
                what: "r",
                value: r,
                domain: "[0, 1]",
            });
        }
        Ok(Self { r, big_r: 1.0 - r, n })
    }

    pub fn from_helper_rate(big_r: f64, n: usize) -> Result<Self> {
        let mut p = Self::new(1.0 - big_r, n)?;
        p.big_r = big_r;
        Ok(p)
    }

    /// `log2 M = r n`, the size of the candidate input set.
    pub fn log2_code_size(&self) -> f64 {
        self.r * self.n as f64
    }

    /// `log2 N = R n`, the number of helper messages.
    pub fn log2_partition_count(&self) -> f64 {
        self.big_r * self.n as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    RCrit,
    TauCrit,
    HelperRCrit,
}

/// Which bound produced one side of a bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundSource {
    /// `1 - h(p0)`, valid when `p1 < p0`.
    Capacity,
    /// `max(0, 1 - h(p0) - D(p0||p1))`, valid when `p0 < p1`.
    CapacityMinusDivergence,
    /// Closest-pair argument with the MRRW distance bound.
    TwoHypothesis,
    /// `h(min(1 - p0 - p1, 1 - 2 p0))`.
    Combinatorial,
    /// `h((1 - p0) / 2)`.
    WeakCombinatorial,
}

impl BoundSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundSource::Capacity => "capacity",
            BoundSource::CapacityMinusDivergence => "capacity_minus_divergence",
            BoundSource::TwoHypothesis => "two_hypothesis",
            BoundSource::Combinatorial => "combinatorial",
            BoundSource::WeakCombinatorial => "weak_combinatorial",
        }
    }
}

impl fmt::Display for BoundSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundBracket {
    pub quantity: Quantity,
    pub lower: f64,
    pub upper: f64,
    pub lower_source: BoundSource,
    pub upper_source: BoundSource,
}

impl BoundBracket {
    pub fn is_consistent(&self) -> bool {
        self.lower <= self.upper + 1e-12
    }

    pub fn is_tight(&self) -> bool {
        (self.upper - self.lower).abs() <= 1e-12
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Achievable exponent pair `(log 1/alpha_n, log 1/beta_n) / n` at slack `tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffPoint {
    pub tau: f64,
    pub alpha_exponent: f64,
    pub beta_exponent: f64,
}

/// Random-coding tradeoff at dual rate `r` and slack `tau` between `p0` and `p1`.
///
/// The hypothesis with the larger crossover probability keeps its pure
/// divergence exponent; the other one is capped by the ball-coverage term
/// `1 - h(tau) - r`.
pub fn tradeoff_lower(channel: &ChannelPair, r: f64, tau: f64) -> Result<TradeoffPoint> {
    let (p0, p1) = (channel.p0(), channel.p1());
    let (lo, hi) = (p0.min(p1), p0.max(p1));
    if !(lo..=hi).contains(&tau) {
        return Err(Error::Domain {
            what: "tau",
            value: tau,
            domain: "[min(p0, p1), max(p0, p1)]",
        });
    }
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::Domain {
            what: "r",
            value: r,
            domain: "[0, 1]",
        });
    }
    let coverage = 1.0 - h(tau) - r;
    let d0 = divergence_unchecked(tau, p0);
    let d1 = divergence_unchecked(tau, p1);
    let (alpha_exponent, beta_exponent) = if p0 < p1 {
        (d0, d1.min(coverage).max(0.0))
    } else {
        (d0.min(coverage).max(0.0), d1)
    };
    Ok(TradeoffPoint {
        tau,
        alpha_exponent,
        beta_exponent,
    })
}

/// Lower bound on `r_crit` and the bound it comes from.
pub fn r_crit_lower_with_source(channel: &ChannelPair) -> (f64, BoundSource) {
    if channel.alternative_is_cleaner() {
        (channel.capacity0(), BoundSource::Capacity)
    } else {
        (
            (channel.capacity0() - channel.known_input_exponent()).max(0.0),
            BoundSource::CapacityMinusDivergence,
        )
    }
}

pub fn r_crit_lower(channel: &ChannelPair) -> f64 {
    r_crit_lower_with_source(channel).0
}

pub(crate) fn mrrw_distance_unchecked(r: f64) -> f64 {
    let x = h_inv(r);
    // 1/2 - sqrt(omega (1 - omega)) = x  <=>  omega = 1/2 - sqrt(x (1 - x))
    (0.5 - (x * (1.0 - x)).sqrt()).max(0.0)
}

/// Largest relative minimum distance a rate-`r` code can have under the
/// MRRW bound `r <= h(1/2 - sqrt(omega (1 - omega)))`.
pub fn omega_min_mrrw(r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain {
            what: "r",
            value: r,
            domain: "(0, 1)",
        });
    }
    Ok(mrrw_distance_unchecked(r))
}

fn check_geometry(t: f64, p: f64, omega: f64) -> Result<()> {
    if feasible(t, p, omega) {
        Ok(())
    } else {
        Err(Error::Infeasible { t, p, omega })
    }
}

fn two_hyp_unchecked(channel: &ChannelPair, omega: f64, t: f64) -> f64 {
    let p0 = channel.p0();
    g_unchecked(t, p0, omega) + (p0 - t) * channel.log_odds1() - h(p0)
}

/// `F(p0, p1, omega, t) = g(t, p0, omega) + (p0 - t) log((1-p1)/p1) - h(p0)`.
///
/// Positive values mean the pair of codewords `omega` apart already costs more
/// type-II exponent than a known input would.
#[allow(non_snake_case)]
pub fn F_two_hyp(channel: &ChannelPair, omega: f64, t: f64) -> Result<f64> {
    check_geometry(t, channel.p0(), omega)?;
    Ok(two_hyp_unchecked(channel, omega, t))
}

/// Maximizer over `t` of `F_two_hyp` at fixed `omega`.
///
/// Uses the stationary-point formula with `v0 = ((1-p1)/p1)^2`; for `p1 = 1/2`
/// (`v0 = 1`) the formula degenerates and the maximum is found numerically.
pub fn t1_opt(channel: &ChannelPair, omega: f64) -> Result<f64> {
    let p0 = channel.p0();
    if !(0.0..=1.0).contains(&omega) || omega > 2.0 - 2.0 * p0 + FEASIBILITY_EPS {
        return Err(Error::Infeasible {
            t: f64::NAN,
            p: p0,
            omega,
        });
    }
    let (lo, hi) = feasible_t_range(p0, omega);
    let v0 = (channel.q1() / channel.p1()).powi(2);
    if v0 - 1.0 < 1e-9 {
        let (t, _) = concave_max(lo, hi, SEARCH_TOL, |t| two_hyp_unchecked(channel, omega, t));
        return Ok(t);
    }
    let inner = 1.0 + (v0 - 1.0) * ((omega - p0).powi(2) * v0 - (1.0 - omega - p0).powi(2) + 1.0);
    let t = (inner.max(0.0).sqrt() - 1.0) / (v0 - 1.0);
    Ok(t.clamp(lo, hi))
}

/// `max_t F_two_hyp(channel, omega, t)` as `(t1_opt, value)`.
pub fn two_hyp_max(channel: &ChannelPair, omega: f64) -> Result<(f64, f64)> {
    let t = t1_opt(channel, omega)?;
    Ok((t, F_two_hyp(channel, omega, t)?))
}

/// Outcome of the sign-change search for `p1*(p0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdStatus {
    /// The predicate changes sign inside `(0, p0)`.
    Bracketed,
    /// The predicate fails for every `p1` probed; `p1*` is reported as 0.
    NeverPositive,
    /// The predicate holds up to `p0`; `p1*` is reported as `p0`.
    AlwaysPositive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    pub p0: f64,
    /// Largest `p1` found to satisfy the two-hypothesis condition.
    pub p1_star: f64,
    /// MRRW distance `omega_0(p0)` at the capacity rate `1 - h(p0)`.
    pub omega0: f64,
    /// `F(p0, p1*, omega_0, t1_opt)` at the returned `p1*`.
    pub predicate_value: f64,
    pub status: ThresholdStatus,
}

fn threshold_value(p0: f64, p1: f64, omega0: f64) -> f64 {
    // p1 in (0, p0) with p0 <= 1/2 always forms a valid pair
    let pair = ChannelPair::new(p0, p1).expect("p1 < p0 <= 1/2");
    two_hyp_max(&pair, omega0).map(|(_, v)| v).unwrap_or(f64::NEG_INFINITY)
}

/// Threshold `p1*(p0)` below which the two-hypothesis bound pins
/// `r_crit = 1 - h(p0)`.
///
/// The predicate `F(p0, p1, omega_0(p0), t1_opt) > 0` is checked for
/// monotonicity on eight probe points before bisecting.
pub fn p1_star(p0: f64) -> Result<Threshold> {
    p1_star_with_tolerance(p0, THRESHOLD_TOL)
}

/// [`p1_star`] with an explicit bisection tolerance.
pub fn p1_star_with_tolerance(p0: f64, tol: f64) -> Result<Threshold> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain {
            what: "tolerance",
            value: tol,
            domain: "(0, inf)",
        });
    }
    if !(p0 > 0.0 && p0 <= 0.5) {
        return Err(Error::Domain {
            what: "p0",
            value: p0,
            domain: "(0, 1/2]",
        });
    }
    let omega0 = mrrw_distance_unchecked(1.0 - h(p0));
    let pred = |p1: f64| threshold_value(p0, p1, omega0) > 0.0;

    let probes: Vec<bool> = (1..=8).map(|k| pred(p0 * k as f64 / 9.0)).collect();
    if probes.windows(2).any(|w| !w[0] && w[1]) {
        return Err(Error::NonMonotone { p0 });
    }

    let lo_end = p0 * 1e-9;
    let hi_end = p0 * (1.0 - 1e-12);
    let done = |p1_star: f64, status| Threshold {
        p0,
        p1_star,
        omega0,
        predicate_value: threshold_value(p0, p1_star.max(lo_end), omega0),
        status,
    };
    if !pred(lo_end) {
        return Ok(Threshold {
            p1_star: 0.0,
            ..done(lo_end, ThresholdStatus::NeverPositive)
        });
    }
    if pred(hi_end) {
        return Ok(done(hi_end, ThresholdStatus::AlwaysPositive));
    }
    let (lo, _) = bisect_predicate(lo_end, hi_end, tol, pred);
    Ok(done(lo, ThresholdStatus::Bracketed))
}

/// Largest `max_t F` over `omega` in `(0, omega_max]`, scanned on a grid.
///
/// For `p0 < p1` this is never positive: the two-hypothesis argument gives
/// nothing in that regime.
pub fn two_hyp_scan(channel: &ChannelPair, omega_max: f64, points: usize) -> Result<(f64, f64)> {
    let mut best = (0.0, f64::NEG_INFINITY);
    for j in 1..=points.max(1) {
        let omega = omega_max * j as f64 / points.max(1) as f64;
        let (_, v) = two_hyp_max(channel, omega)?;
        if v > best.1 {
            best = (omega, v);
        }
    }
    Ok(best)
}

/// Combinatorial upper bound on `tau_crit` (and `r_crit = h(tau_crit)`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombBound {
    /// `min(1 - p0 - p1, 1 - 2 p0)` before clamping.
    pub tau_raw: f64,
    /// `tau_raw` clamped to `[0, 1/2]`.
    pub tau_up: f64,
    /// `h(tau_up)`.
    pub r_upper: f64,
    /// `h((1 - p0) / 2)`.
    pub weak_upper: f64,
    /// `tau_raw >= 1/2`: the bound is `r_crit <= 1` and carries no information.
    pub vacuous: bool,
}

pub fn r_crit_upper_comb(channel: &ChannelPair) -> CombBound {
    let (p0, p1) = (channel.p0(), channel.p1());
    let tau_raw = (1.0 - p0 - p1).min(1.0 - 2.0 * p0);
    let tau_up = tau_raw.clamp(0.0, 0.5);
    CombBound {
        tau_raw,
        tau_up,
        r_upper: h(tau_up),
        weak_upper: h(0.5 * (1.0 - p0)),
        vacuous: tau_raw >= 0.5,
    }
}

/// `K = mu(r, p0, omega) + g(p0, t, omega) + (p0 - t) log((1-p1)/p1) - h(p0)`.
#[allow(non_snake_case)]
pub fn K_potential(channel: &ChannelPair, r: f64, omega: f64, t: f64) -> Result<f64> {
    let point = SpectrumPoint::new(r, channel.p0(), omega)?;
    check_geometry(t, channel.p0(), omega)?;
    Ok(point.mu_closed()? + two_hyp_unchecked(channel, omega, t))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdditiveStatus {
    Evaluated,
    /// `alpha = p0` lies below `delta_GV(r)`, so the spectrum bound is not
    /// available and nothing can be certified.
    SpectrumBoundUnavailable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdditiveCheck {
    pub certified: bool,
    pub status: AdditiveStatus,
    /// `min_omega max_t K`.
    pub min_max: f64,
    pub omega_star: f64,
    pub t_star: f64,
    /// `G(p0, tau(r, p0))`, the upper end of the scanned range.
    pub cap: f64,
}

fn max_over_t(channel: &ChannelPair, mu: f64, omega: f64) -> (f64, f64) {
    let (lo, hi) = feasible_t_range(channel.p0(), omega);
    let (t, v) = concave_max(lo, hi, SEARCH_TOL, |t| two_hyp_unchecked(channel, omega, t));
    (t, mu + v)
}

/// Checks `min_{omega in (0, G]} max_t K(p0, p1, r, omega, t) > 0` with
/// `alpha = p0`, which under the additive approximation shows `r > r_crit`.
///
/// The scan starts at `G / 512`; the local minimum on the grid is refined by
/// golden-section search.
pub fn check_additive(channel: &ChannelPair, r: f64) -> Result<AdditiveCheck> {
    if !channel.alternative_is_cleaner() {
        return Err(Error::Config(format!(
            "additive certificate needs p1 < p0, got {channel}"
        )));
    }
    let p0 = channel.p0();
    let tau = match tau_from(r, p0) {
        Ok(tau) => tau,
        Err(Error::Domain { what: "alpha", .. }) => {
            return Ok(AdditiveCheck {
                certified: false,
                status: AdditiveStatus::SpectrumBoundUnavailable,
                min_max: f64::NAN,
                omega_star: f64::NAN,
                t_star: f64::NAN,
                cap: f64::NAN,
            })
        }
        Err(e) => return Err(e),
    };
    let cap = cap_distance(p0, tau)?;
    let inner = |omega: f64| -> Result<(f64, f64)> {
        let mu = SpectrumPoint::new(r, p0, omega)?.mu_closed()?;
        Ok(max_over_t(channel, mu, omega))
    };

    let step = cap / ADDITIVE_GRID as f64;
    let mut best = (0usize, f64::INFINITY);
    for j in 1..=ADDITIVE_GRID {
        let (_, v) = inner(step * j as f64)?;
        if v < best.1 {
            best = (j, v);
        }
    }
    let lo = step * (best.0.max(2) - 1) as f64;
    let hi = (step * (best.0 + 1) as f64).min(cap);
    let (mut omega_star, mut min_max) =
        golden_min(lo, hi, SEARCH_TOL, |w| inner(w).map(|x| x.1).unwrap_or(f64::INFINITY));
    if best.1 < min_max {
        omega_star = step * best.0 as f64;
        min_max = best.1;
    }
    let (t_star, _) = inner(omega_star)?;
    Ok(AdditiveCheck {
        certified: min_max > 0.0,
        status: AdditiveStatus::Evaluated,
        min_max,
        omega_star,
        t_star,
        cap,
    })
}

/// Brackets for `r_crit`, `tau_crit` and the helper-side `R_crit = 1 - r_crit`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalRateBracket {
    pub r_crit: BoundBracket,
    pub tau_crit: BoundBracket,
    pub helper_r_crit: BoundBracket,
    /// The two-hypothesis condition holds at `omega_0(p0)`.
    pub two_hyp_certified: bool,
    pub comb: CombBound,
}

pub fn bracket_r_crit(channel: &ChannelPair) -> CriticalRateBracket {
    let (lower, lower_source) = r_crit_lower_with_source(channel);
    let comb = r_crit_upper_comb(channel);

    let two_hyp_certified = channel.alternative_is_cleaner() && {
        let omega0 = mrrw_distance_unchecked(channel.capacity0());
        two_hyp_max(channel, omega0).map(|(_, v)| v > 0.0).unwrap_or(false)
    };

    let mut candidates = Vec::with_capacity(3);
    if two_hyp_certified {
        candidates.push((channel.capacity0(), BoundSource::TwoHypothesis));
    }
    candidates.push((comb.r_upper, BoundSource::Combinatorial));
    candidates.push((comb.weak_upper, BoundSource::WeakCombinatorial));
    let (upper, upper_source) =
        candidates
            .into_iter()
            .fold((f64::INFINITY, BoundSource::WeakCombinatorial), |best, c| {
                if c.0 < best.0 {
                    c
                } else {
                    best
                }
            });
    let (lower, upper) = (lower.clamp(0.0, 1.0), upper.clamp(0.0, 1.0));

    let r_crit = BoundBracket {
        quantity: Quantity::RCrit,
        lower,
        upper,
        lower_source,
        upper_source,
    };
    CriticalRateBracket {
        r_crit,
        tau_crit: BoundBracket {
            quantity: Quantity::TauCrit,
            lower: h_inv(lower),
            upper: h_inv(upper),
            ..r_crit
        },
        helper_r_crit: BoundBracket {
            quantity: Quantity::HelperRCrit,
            lower: 1.0 - upper,
            upper: 1.0 - lower,
            lower_source: upper_source,
            upper_source: lower_source,
        },
        two_hyp_certified,
        comb,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::divergence;

    fn pair(p0: f64, p1: f64) -> ChannelPair {
        ChannelPair::new(p0, p1).unwrap()
    }

    #[test]
    fn rate_point_relation() {
        let rp = RatePoint::new(0.3, 100).unwrap();
        assert_eq!(rp.big_r, 1.0 - 0.3);
        assert!((rp.log2_code_size() - 30.0).abs() < 1e-12);
        assert!((rp.log2_partition_count() - 70.0).abs() < 1e-12);
        assert!(RatePoint::new(1.5, 10).is_err());
    }

    #[test]
    fn tradeoff_examples() {
        let c = pair(0.1, 0.3);
        let t = tradeoff_lower(&c, 0.2, 0.1).unwrap();
        assert_eq!(t.alpha_exponent, 0.0);
        let expect = divergence(0.1, 0.3).unwrap().min(1.0 - h(0.1) - 0.2);
        assert!((t.beta_exponent - expect).abs() < 1e-15);

        let c = pair(0.25, 0.1);
        let t = tradeoff_lower(&c, 0.0, 0.25).unwrap();
        assert!((t.beta_exponent - divergence(0.25, 0.1).unwrap()).abs() < 1e-15);
        // 0.25 log2(2.5) + 0.75 log2(0.75 / 0.9)
        assert!((t.beta_exponent - 0.133_206_219_346_495).abs() < 1e-12);
        assert_eq!(t.alpha_exponent, 0.0);
        assert!(tradeoff_lower(&c, 0.0, 0.3).is_err());
    }

    #[test]
    fn tradeoff_clamps_negative_coverage() {
        let c = pair(0.1, 0.3);
        let t = tradeoff_lower(&c, 0.99, 0.2).unwrap();
        assert_eq!(t.beta_exponent, 0.0);
    }

    #[test]
    fn lower_bound_examples() {
        assert!((r_crit_lower(&pair(0.25, 0.1)) - 0.188_722).abs() < 1e-6);
        assert!((r_crit_lower(&pair(0.1, 0.25)) - 0.42647).abs() < 1e-4);
        assert!(r_crit_lower(&pair(0.05, 0.5)).abs() < 1e-15);
    }

    #[test]
    fn mrrw_examples() {
        assert!(omega_min_mrrw(1.0 - 1e-12).unwrap() < 1e-5);
        assert!((omega_min_mrrw(1e-12).unwrap() - 0.5).abs() < 1e-5);
        assert!((omega_min_mrrw(1.0 - h(0.25)).unwrap() - 0.3330).abs() < 5e-4);
        assert!(omega_min_mrrw(0.0).is_err());
        assert!(omega_min_mrrw(1.0).is_err());
        // the defining relation holds
        let w = omega_min_mrrw(0.4).unwrap();
        assert!((h(0.5 - (w * (1.0 - w)).sqrt()) - 0.4).abs() < 1e-12);
        // decreasing in r
        let ws: Vec<f64> = (1..20).map(|k| omega_min_mrrw(k as f64 / 20.0).unwrap()).collect();
        assert!(ws.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn t1_opt_at_zero_distance() {
        let c = pair(0.25, 0.1);
        assert!((t1_opt(&c, 0.0).unwrap() - 0.25).abs() < 1e-15);
        let c = pair(0.25, 0.2499);
        assert!((t1_opt(&c, 0.0).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn t1_opt_half_uses_numeric_search() {
        let c = pair(0.2, 0.5);
        let t = t1_opt(&c, 0.3).unwrap();
        // with p1 = 1/2 the objective is g itself, maximized where dg/dt = 0
        let (_, dt) = crate::math::g_derivatives(t, 0.2, 0.3).unwrap();
        assert!(dt.abs() < 1e-4);
    }

    #[test]
    fn two_hyp_vanishes_at_zero_distance() {
        for &(p0, p1) in &[(0.25, 0.1), (0.1, 0.3), (0.45, 0.2), (0.5, 0.01)] {
            let c = pair(p0, p1);
            let (_, v) = two_hyp_max(&c, 0.0).unwrap();
            assert!(v.abs() < 1e-9, "{c}: {v}");
        }
    }

    #[test]
    fn threshold_point_is_near_zero() {
        // the table entry p1*(0.2) = 0.056 sits on the sign change
        let c = pair(0.2, 0.056);
        let omega0 = omega_min_mrrw(1.0 - h(0.2)).unwrap();
        let (_, v) = two_hyp_max(&c, omega0).unwrap();
        assert!(v.abs() < 5e-3, "{v}");
    }

    #[test]
    fn p1_star_examples() {
        let cases = [(0.2, 0.056, 0.002), (0.3, 0.17, 0.005), (0.45, 0.4, 0.005)];
        for (p0, expect, tol) in cases {
            let t = p1_star(p0).unwrap();
            assert_eq!(t.status, ThresholdStatus::Bracketed);
            assert!((t.p1_star - expect).abs() <= tol, "p0 = {p0}: {}", t.p1_star);
            assert!(t.predicate_value > 0.0);
        }
        assert!(p1_star(0.0).is_err());
        assert!(p1_star(0.6).is_err());
    }

    #[test]
    fn no_two_hyp_gain_when_p0_below_p1() {
        for &(p0, p1) in &[(0.1, 0.25), (0.2, 0.3), (0.05, 0.5), (0.3, 0.31)] {
            let c = pair(p0, p1);
            let (_, best) = two_hyp_scan(&c, 1.0 - 2.0 * p0.min(0.49), 200).unwrap();
            assert!(best <= 1e-12, "{c}: {best}");
        }
    }

    #[test]
    fn comb_examples() {
        let b = r_crit_upper_comb(&pair(0.5, 0.2));
        assert_eq!(b.tau_up, 0.0);
        assert_eq!(b.r_upper, 0.0);

        let b = r_crit_upper_comb(&pair(0.25, 0.1));
        assert!(b.vacuous);
        assert_eq!(b.tau_up, 0.5);
        assert_eq!(b.r_upper, 1.0);

        let b = r_crit_upper_comb(&pair(0.4, 0.3));
        assert!((b.tau_raw - 0.2).abs() < 1e-15);
        assert!((b.r_upper - 0.721_928).abs() < 1e-6);
        assert!(!b.vacuous);
        assert!((b.weak_upper - h(0.3)).abs() < 1e-15);
    }

    #[test]
    fn k_potential_examples() {
        for k in 2..=9 {
            let p0 = 0.05 * k as f64;
            let c = pair(p0, p0 / 3.0);
            let r0 = 1.0 - h(p0);
            let w0 = 2.0 * p0 * (1.0 - p0);
            let v = K_potential(&c, r0, w0, p0).unwrap();
            assert!(v.abs() < 1e-9, "p0 = {p0}: {v}");
            let small = K_potential(&c, r0 + 0.01, 1e-9, p0).unwrap();
            assert!(small.abs() < 1e-6);
        }
        // below delta_GV(r) the spectrum bound is undefined
        let c = pair(0.25, 0.1);
        assert!(K_potential(&c, 0.1, 0.1, 0.25).is_err());
    }

    #[test]
    fn k_slope_in_t() {
        let (p0, p1) = (0.3, 0.1);
        let c = pair(p0, p1);
        let r0 = 1.0 - h(p0);
        let w0 = 2.0 * p0 * (1.0 - p0);
        let step = 1e-6;
        let fd =
            (K_potential(&c, r0, w0, p0 + step).unwrap() - K_potential(&c, r0, w0, p0 - step).unwrap()) / (2.0 * step);
        let expect = ((1.0 - p0) / p0).log2() - ((1.0 - p1) / p1).log2();
        assert!((fd - expect).abs() < 1e-5);
        assert!(expect < 0.0);
    }

    #[test]
    fn additive_examples() {
        let c = pair(0.25, 0.1);
        let r0 = 1.0 - h(0.25);
        let above = check_additive(&c, r0 + 0.01).unwrap();
        assert!(above.certified, "{above:?}");
        let below = check_additive(&c, r0 - 0.05).unwrap();
        assert!(!below.certified);
        assert_eq!(below.status, AdditiveStatus::SpectrumBoundUnavailable);
        assert!(check_additive(&pair(0.1, 0.25), 0.5).is_err());
    }

    #[test]
    fn bracket_examples() {
        let b = bracket_r_crit(&pair(0.2, 0.03));
        assert!(b.two_hyp_certified);
        assert!((b.r_crit.lower - 0.278_072).abs() < 1e-6);
        assert_eq!(b.r_crit.lower, b.r_crit.upper);
        assert_eq!(b.r_crit.upper_source, BoundSource::TwoHypothesis);

        let b = bracket_r_crit(&pair(0.5, 0.1));
        assert_eq!(b.r_crit.upper, 0.0);
        assert_eq!(b.r_crit.lower, 0.0);

        let b = bracket_r_crit(&pair(0.1, 0.25));
        assert!((b.r_crit.lower - 0.42647).abs() < 1e-4);
        // the combinatorial bound is vacuous; h((1 - p0) / 2) still caps the bracket
        assert!(b.comb.vacuous);
        assert!((b.r_crit.upper - 0.992_774_453_987_808).abs() < 1e-12);
        assert_eq!(b.r_crit.upper_source, BoundSource::WeakCombinatorial);
        assert!(!b.two_hyp_certified);

        assert_eq!(b.helper_r_crit.lower, 1.0 - b.r_crit.upper);
        assert_eq!(b.helper_r_crit.upper, 1.0 - b.r_crit.lower);
    }
}
