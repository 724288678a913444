//! Bounds on the critical rate `r_crit(p0, p1)` for testing `p = p0` against
//! `p = p1` on a binary symmetric channel when only `2^{rn}` candidate inputs
//! are known to the statistician, together with an exact small-`n` oracle and
//! a seeded Monte Carlo simulator.

pub mod bounds;
pub mod channel;
pub mod error;
pub mod math;
pub mod oracle;
pub mod quad;
pub mod search;
pub mod sim;
pub mod spectrum;

pub use channel::ChannelPair;
pub use error::{Error, Result};
