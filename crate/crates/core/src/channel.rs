use std::fmt;

use crate::error::{Error, Result};
use crate::math::{divergence_unchecked, h};

/// The pair of crossover probabilities tested against each other:
/// `p0` under H0 and `p1` under H1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelPair {
    p0: f64,
    q0: f64,
    p1: f64,
    q1: f64,
}

impl ChannelPair {
    pub fn new(p0: f64, p1: f64) -> Result<Self> {
        let valid = |p: f64| p > 0.0 && p <= 0.5;
        if !valid(p0) || !valid(p1) {
            return Err(Error::Channel {
                p0,
                p1,
                reason: "crossover probabilities must lie in (0, 1/2]",
            });
        }
        if p0 == p1 {
            return Err(Error::Channel {
                p0,
                p1,
                reason: "equal crossover probabilities cannot be distinguished",
            });
        }
        Ok(Self {
            p0,
            q0: 1.0 - p0,
            p1,
            q1: 1.0 - p1,
        })
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn q0(&self) -> f64 {
        self.q0
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn q1(&self) -> f64 {
        self.q1
    }

    /// True when H1 is the less noisy channel (`p1 < p0`).
    pub fn alternative_is_cleaner(&self) -> bool {
        self.p1 < self.p0
    }

    /// `log2((1 - p1) / p1)`, the per-flip likelihood slope under H1.
    pub fn log_odds1(&self) -> f64 {
        (self.q1 / self.p1).log2()
    }

    /// `D(p0 || p1)`: the best type-II exponent with a known input.
    pub fn known_input_exponent(&self) -> f64 {
        divergence_unchecked(self.p0, self.p1)
    }

    /// `1 - h(p0)`, the capacity of BSC(p0).
    pub fn capacity0(&self) -> f64 {
        1.0 - h(self.p0)
    }
}

impl fmt::Display for ChannelPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(p0 = {}, p1 = {})", self.p0, self.p1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complements_are_exact() {
        let c = ChannelPair::new(0.3, 0.07).unwrap();
        assert_eq!(c.q0(), 1.0 - 0.3);
        assert_eq!(c.q1(), 1.0 - 0.07);
        assert!(c.alternative_is_cleaner());
    }

    #[test]
    fn rejects_bad_pairs() {
        assert!(ChannelPair::new(0.2, 0.2).is_err());
        assert!(ChannelPair::new(0.0, 0.2).is_err());
        assert!(ChannelPair::new(0.2, 0.6).is_err());
        assert!(ChannelPair::new(f64::NAN, 0.1).is_err());
        assert!(ChannelPair::new(0.5, 0.1).is_ok());
    }
}
