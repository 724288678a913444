//! Seeded Monte Carlo estimation of the error probabilities of a random code
//! under the minimum-distance threshold test.
//!
//! Each trial picks a codeword uniformly, draws a uniformly random ordering of
//! the `n` positions and walks the noise weight `w = 0..n`, flipping one more
//! position per step. Two estimators come out of the same walk:
//!
//! * direct: the decision at a binomially drawn weight `W`, i.e. one ordinary
//!   channel use;
//! * weight-conditioned: `sum_w P(W = w) accept(w)`, the conditional
//!   expectation of the direct estimator given the ordering. It is unbiased
//!   and reaches probabilities far below `1 / trials`; with a single codeword
//!   it is exact.
//!
//! Every trial owns a ChaCha stream derived from `(seed, trial, hypothesis)`
//! and results are merged in trial order, so reports do not depend on the
//! number of threads.

use std::collections::HashSet;
use std::f64::consts::LN_2;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds::tradeoff_lower;
use crate::channel::ChannelPair;
use crate::error::{Error, Result};
use crate::oracle::{BinaryCode, DecisionRegion};

/// Largest code the simulator will store.
pub const MAX_CODE_SIZE: usize = 1 << 20;

/// Largest block length accepted.
pub const MAX_SIM_N: usize = 1 << 16;

/// Codes up to this size also get per-codeword diagnostics.
pub const DIAGNOSTIC_CODE_SIZE: usize = 1 << 12;

const CODE_STREAM: u64 = u64::MAX;

/// Label attached to every report: the decision rule is a reconstruction.
pub const DECISION_RULE: &str = "minimum-distance threshold (reconstructed)";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialConfig {
    pub n: usize,
    pub r: f64,
    pub channel: ChannelPair,
    pub tau: f64,
    pub trials: usize,
    pub seed: u64,
}

impl TrialConfig {
    /// `M = round(2^{rn})`.
    pub fn code_size(&self) -> Result<usize> {
        let log_m = self.r * self.n as f64;
        if !(0.0..=20.0).contains(&log_m) {
            return Err(Error::SizeLimit(format!(
                "2^(r n) = 2^{log_m} codewords exceeds the limit of {MAX_CODE_SIZE}"
            )));
        }
        let m = log_m.exp2().round() as usize;
        if self.n < 64 && m as u128 > 1u128 << self.n {
            return Err(Error::SizeLimit(format!(
                "{m} distinct words do not exist at n = {}",
                self.n
            )));
        }
        Ok(m.max(1))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > MAX_SIM_N {
            return Err(Error::SizeLimit(format!(
                "block length {} outside 1..={MAX_SIM_N}",
                self.n
            )));
        }
        if self.trials == 0 {
            return Err(Error::Config("at least one trial is needed".into()));
        }
        if !(0.0..=1.0).contains(&self.r) {
            return Err(Error::Domain {
                what: "r",
                value: self.r,
                domain: "[0, 1]",
            });
        }
        let (p0, p1) = (self.channel.p0(), self.channel.p1());
        if !(p0.min(p1)..=p0.max(p1)).contains(&self.tau) {
            return Err(Error::Domain {
                what: "tau",
                value: self.tau,
                domain: "[min(p0, p1), max(p0, p1)]",
            });
        }
        self.code_size().map(|_| ())
    }
}

/// Random codewords of arbitrary length, packed into 64-bit blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    n: usize,
    blocks: usize,
    words: Vec<u64>,
}

impl Codebook {
    /// `m` distinct uniformly random words.
    pub fn random<R: RngCore>(n: usize, m: usize, rng: &mut R) -> Result<Self> {
        if n == 0 || m == 0 || (n < 64 && m as u128 > 1u128 << n) {
            return Err(Error::SizeLimit(format!(
                "cannot draw {m} distinct words of length {n}"
            )));
        }
        let blocks = n.div_ceil(64);
        let tail = n % 64;
        let mut seen = HashSet::with_capacity(m);
        let mut words = Vec::with_capacity(m * blocks);
        while seen.len() < m {
            let mut w: Vec<u64> = (0..blocks).map(|_| rng.next_u64()).collect();
            if tail != 0 {
                w[blocks - 1] &= (1u64 << tail) - 1;
            }
            if seen.insert(w.clone()) {
                words.extend(w);
            }
        }
        Ok(Self { n, blocks, words })
    }

    pub fn from_binary_code(code: &BinaryCode) -> Self {
        Self {
            n: code.n(),
            blocks: 1,
            words: code.words().iter().map(|&w| u64::from(w)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.words.len() / self.blocks
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word(&self, k: usize) -> &[u64] {
        &self.words[k * self.blocks..(k + 1) * self.blocks]
    }

    fn bit(&self, k: usize, j: usize) -> bool {
        self.word(k)[j / 64] >> (j % 64) & 1 == 1
    }

    fn distance(&self, a: usize, b: usize) -> usize {
        self.word(a)
            .iter()
            .zip(self.word(b))
            .map(|(x, y)| (x ^ y).count_ones() as usize)
            .sum()
    }
}

/// An estimated probability kept in log space so tiny values survive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityEstimate {
    /// `log2` of the estimate; `-inf` when it is zero.
    pub log2_value: f64,
    /// Standard error of the estimate, in `log2` units (delta method).
    pub log2_std_error: f64,
    /// The estimate itself (underflows to 0 below about `2^-1074`).
    pub value: f64,
    pub std_error: f64,
}

impl ProbabilityEstimate {
    /// `-log2(value) / n`, or `None` when the estimate is zero.
    pub fn exponent(&self, n: usize) -> Option<f64> {
        self.log2_value.is_finite().then(|| -self.log2_value / n as f64)
    }

    fn from_log_samples(samples: impl Iterator<Item = f64> + Clone) -> Self {
        let count = samples.clone().count() as f64;
        let scale = samples.clone().fold(f64::NEG_INFINITY, f64::max);
        if !scale.is_finite() {
            return Self {
                log2_value: f64::NEG_INFINITY,
                log2_std_error: f64::INFINITY,
                value: 0.0,
                std_error: 0.0,
            };
        }
        let mean = samples.clone().map(|l| (l - scale).exp2()).sum::<f64>() / count;
        let var = if count > 1.0 {
            samples.map(|l| ((l - scale).exp2() - mean).powi(2)).sum::<f64>() / (count - 1.0)
        } else {
            0.0
        };
        let se = (var / count).sqrt();
        let log2_value = scale + mean.log2();
        Self {
            log2_value,
            log2_std_error: se / (mean * LN_2),
            value: log2_value.exp2(),
            std_error: se * scale.exp2(),
        }
    }

    fn from_hits(hits: u64, trials: usize) -> Self {
        let t = trials as f64;
        let p = hits as f64 / t;
        let se = (p * (1.0 - p) / t).sqrt();
        Self {
            log2_value: p.log2(),
            log2_std_error: if hits == 0 { f64::INFINITY } else { se / (p * LN_2) },
            value: p,
            std_error: se,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub config: TrialConfig,
    pub code_size: usize,
    pub decision_rule: &'static str,
    /// Ordinary channel-use estimates, standard errors from binomial counts.
    pub alpha_direct: ProbabilityEstimate,
    pub beta_direct: ProbabilityEstimate,
    pub alpha_hits: u64,
    pub beta_hits: u64,
    /// Weight-conditioned estimates.
    pub alpha: ProbabilityEstimate,
    pub beta: ProbabilityEstimate,
    pub alpha_exponent_hat: Option<f64>,
    pub beta_exponent_hat: Option<f64>,
    /// Largest per-codeword `log2` estimate among codewords that were sent,
    /// a stand-in for the worst case over the code.
    pub alpha_max_sampled_log2: Option<f64>,
    pub beta_max_sampled_log2: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
enum Rule {
    /// Accept H0 when some codeword is within the radius.
    Within(usize),
    /// Accept H0 when every codeword is at least the radius away.
    Beyond(usize),
}

impl Rule {
    fn new(channel: &ChannelPair, n: usize, tau: f64) -> Self {
        match DecisionRegion::threshold(channel, n, tau) {
            DecisionRegion::BallUnion { radius } => Rule::Within(radius),
            DecisionRegion::BallExterior { radius } => Rule::Beyond(radius),
            _ => unreachable!("threshold regions are balls"),
        }
    }

    /// Whether `d` counts towards the tracked set: within the radius for
    /// [`Rule::Within`], strictly inside for [`Rule::Beyond`].
    fn tracked(&self, d: usize) -> bool {
        match *self {
            Rule::Within(r) => d <= r,
            Rule::Beyond(r) => d < r,
        }
    }

    fn accepts(&self, tracked: usize) -> bool {
        match self {
            Rule::Within(_) => tracked > 0,
            Rule::Beyond(_) => tracked == 0,
        }
    }
}

/// `log2 P(W = w)` and the CDF of `Binomial(n, p)`.
struct WeightLaw {
    log2_pmf: Vec<f64>,
    cdf: Vec<f64>,
}

impl WeightLaw {
    fn new(n: usize, p: f64) -> Self {
        let mut log2_pmf = Vec::with_capacity(n + 1);
        let mut log_binom = 0.0;
        for w in 0..=n {
            if w > 0 {
                log_binom += ((n - w + 1) as f64 / w as f64).log2();
            }
            log2_pmf.push(log_binom + w as f64 * p.log2() + (n - w) as f64 * (1.0 - p).log2());
        }
        let mut acc = 0.0;
        let cdf = log2_pmf
            .iter()
            .map(|l| {
                acc += l.exp2();
                acc
            })
            .collect();
        Self { log2_pmf, cdf }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen::<f64>() * self.cdf[self.cdf.len() - 1];
        self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1)
    }
}

#[derive(Debug, Clone, Copy)]
struct HalfTrial {
    sent: u32,
    error: bool,
    log2_error: f64,
}

struct Scratch {
    order: Vec<usize>,
    dist: Vec<usize>,
    terms: Vec<f64>,
}

struct Engine<'a> {
    code: &'a Codebook,
    rule: Rule,
    base: Vec<usize>,
    laws: [WeightLaw; 2],
    seed: u64,
}

impl Engine<'_> {
    fn pairwise_row(code: &Codebook, i: usize) -> Vec<usize> {
        (0..code.len()).map(|k| code.distance(i, k)).collect()
    }

    /// One channel use under hypothesis `hyp` (0 or 1). An error is a
    /// rejection under H0 and an acceptance under H1.
    fn run(&self, trial: u64, hyp: usize, scratch: &mut Scratch) -> HalfTrial {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(2 * trial + hyp as u64);
        let m = self.code.len();
        let n = self.code.n();
        let sent = rng.gen_range(0..m);
        let drawn = self.laws[hyp].sample(&mut rng);
        scratch.order.clear();
        scratch.order.extend(0..n);
        scratch.order.shuffle(&mut rng);

        scratch.dist.clear();
        if m == 1 {
            scratch.dist.push(0);
        } else if self.base.len() == m * m {
            scratch.dist.extend_from_slice(&self.base[sent * m..(sent + 1) * m]);
        } else {
            scratch.dist.extend(Engine::pairwise_row(self.code, sent));
        }
        let mut tracked = scratch.dist.iter().filter(|&&d| self.rule.tracked(d)).count();

        let law = &self.laws[hyp];
        let error_at = |tracked: usize| self.rule.accepts(tracked) == (hyp == 1);
        let mut error = false;
        let mut scale = f64::NEG_INFINITY;
        let terms = &mut scratch.terms;
        terms.clear();
        for w in 0..=n {
            let e = error_at(tracked);
            if w == drawn {
                error = e;
            }
            if e {
                terms.push(law.log2_pmf[w]);
                scale = scale.max(law.log2_pmf[w]);
            }
            if w == n {
                break;
            }
            let pos = scratch.order[w];
            let bit = self.code.bit(sent, pos);
            for (k, d) in scratch.dist.iter_mut().enumerate() {
                let before = self.rule.tracked(*d);
                if self.code.bit(k, pos) == bit {
                    *d += 1;
                } else {
                    *d -= 1;
                }
                match (before, self.rule.tracked(*d)) {
                    (false, true) => tracked += 1,
                    (true, false) => tracked -= 1,
                    _ => {}
                }
            }
        }
        let log2_error = if terms.is_empty() {
            f64::NEG_INFINITY
        } else {
            scale + terms.iter().map(|l| (l - scale).exp2()).sum::<f64>().log2()
        };
        HalfTrial {
            sent: sent as u32,
            error,
            log2_error,
        }
    }
}

fn max_sampled(halves: &[HalfTrial], m: usize) -> Option<f64> {
    if m > DIAGNOSTIC_CODE_SIZE {
        return None;
    }
    let mut per_word: Vec<Vec<f64>> = vec![Vec::new(); m];
    for h in halves {
        per_word[h.sent as usize].push(h.log2_error);
    }
    per_word
        .into_iter()
        .filter(|v| !v.is_empty())
        .map(|v| ProbabilityEstimate::from_log_samples(v.into_iter()).log2_value)
        .fold(None, |best: Option<f64>, x| Some(best.map_or(x, |b| b.max(x))))
}

/// Runs the experiment on a given code.
pub fn simulate_with_code(config: &TrialConfig, code: &Codebook) -> Result<EstimateReport> {
    config.validate()?;
    if code.n() != config.n {
        return Err(Error::Config(format!(
            "code length {} differs from n = {}",
            code.n(),
            config.n
        )));
    }
    let m = code.len();
    let base = if m > 1 && m <= DIAGNOSTIC_CODE_SIZE {
        (0..m).flat_map(|i| Engine::pairwise_row(code, i)).collect()
    } else {
        Vec::new()
    };
    let engine = Engine {
        code,
        rule: Rule::new(&config.channel, config.n, config.tau),
        base,
        laws: [
            WeightLaw::new(config.n, config.channel.p0()),
            WeightLaw::new(config.n, config.channel.p1()),
        ],
        seed: config.seed,
    };
    let halves: Vec<(HalfTrial, HalfTrial)> = (0..config.trials as u64)
        .into_par_iter()
        .map_init(
            || Scratch {
                order: Vec::with_capacity(config.n),
                dist: Vec::with_capacity(m),
                terms: Vec::with_capacity(config.n + 1),
            },
            |scratch, t| (engine.run(t, 0, scratch), engine.run(t, 1, scratch)),
        )
        .collect();
    let (h0, h1): (Vec<HalfTrial>, Vec<HalfTrial>) = halves.into_iter().unzip();

    let alpha_hits = h0.iter().filter(|h| h.error).count() as u64;
    let beta_hits = h1.iter().filter(|h| h.error).count() as u64;
    let alpha = ProbabilityEstimate::from_log_samples(h0.iter().map(|h| h.log2_error));
    let beta = ProbabilityEstimate::from_log_samples(h1.iter().map(|h| h.log2_error));
    Ok(EstimateReport {
        config: *config,
        code_size: m,
        decision_rule: DECISION_RULE,
        alpha_direct: ProbabilityEstimate::from_hits(alpha_hits, config.trials),
        beta_direct: ProbabilityEstimate::from_hits(beta_hits, config.trials),
        alpha_hits,
        beta_hits,
        alpha_exponent_hat: alpha.exponent(config.n),
        beta_exponent_hat: beta.exponent(config.n),
        alpha,
        beta,
        alpha_max_sampled_log2: max_sampled(&h0, m),
        beta_max_sampled_log2: max_sampled(&h1, m),
    })
}

/// Draws a uniform random code of `round(2^{rn})` distinct words from the
/// configured seed and runs the experiment on it.
pub fn simulate_dual(config: &TrialConfig) -> Result<EstimateReport> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(CODE_STREAM);
    let code = Codebook::random(config.n, config.code_size()?, &mut rng)?;
    simulate_with_code(config, &code)
}

/// Estimated exponents against the random-coding prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub tau: f64,
    pub n: usize,
    pub predicted_alpha_exponent: f64,
    pub predicted_beta_exponent: f64,
    pub alpha_exponent_hat: Option<f64>,
    pub beta_exponent_hat: Option<f64>,
    /// Standard errors of the exponent estimates.
    pub alpha_exponent_se: f64,
    pub beta_exponent_se: f64,
}

pub fn exponent_sweep(
    channel: &ChannelPair,
    r: f64,
    tau_grid: &[f64],
    n_grid: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(tau_grid.len() * n_grid.len());
    for &tau in tau_grid {
        let predicted = tradeoff_lower(channel, r, tau)?;
        for &n in n_grid {
            let report = simulate_dual(&TrialConfig {
                n,
                r,
                channel: *channel,
                tau,
                trials,
                seed,
            })?;
            rows.push(SweepRow {
                tau,
                n,
                predicted_alpha_exponent: predicted.alpha_exponent,
                predicted_beta_exponent: predicted.beta_exponent,
                alpha_exponent_hat: report.alpha_exponent_hat,
                beta_exponent_hat: report.beta_exponent_hat,
                alpha_exponent_se: report.alpha.log2_std_error / n as f64,
                beta_exponent_se: report.beta.log2_std_error / n as f64,
            });
        }
    }
    Ok(rows)
}
