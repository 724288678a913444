//! Exact combinatorics over the Hamming cube for small block lengths: codes,
//! distance spectra, sphere intersections, covering counts and exact error
//! probabilities of threshold decision regions.
//!
//! Enumeration over the output cube is split into fixed chunks processed in
//! parallel; integer results are order independent and floating-point sums
//! are reduced in chunk order, so outputs never depend on the thread count.

use std::collections::HashSet;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::ChannelPair;
use crate::error::{Error, Result};
use crate::math::{divergence_unchecked, h};

/// Largest block length for operations that enumerate `{0,1}^n`.
pub const MAX_ENUM_N: usize = 24;

/// Largest block length for log-space counting.
pub const MAX_LOG_N: usize = 4096;

const CHUNK_BITS: usize = 12;

fn dist(a: u32, b: u32) -> usize {
    (a ^ b).count_ones() as usize
}

/// Converts a normalized parameter to its integer count `x n`, refusing to round.
pub fn scaled(what: &'static str, x: f64, n: usize) -> Result<usize> {
    let s = x * n as f64;
    let r = s.round();
    if !s.is_finite() || s < -1e-9 || (s - r).abs() > 1e-9 * s.abs().max(1.0) || r > n as f64 {
        return Err(Error::NonIntegral { what, scaled: s, n });
    }
    Ok(r as usize)
}

fn check_enum(n: usize) -> Result<()> {
    if n == 0 || n > MAX_ENUM_N {
        return Err(Error::SizeLimit(format!(
            "block length {n} outside 1..={MAX_ENUM_N} for cube enumeration"
        )));
    }
    Ok(())
}

/// Output chunks `[start, end)` covering the cube.
fn chunks(n: usize) -> Vec<(u32, u32)> {
    let total = 1u64 << n;
    let size = 1u64 << CHUNK_BITS.min(n);
    (0..total / size)
        .map(|c| ((c * size) as u32, ((c + 1) * size) as u32))
        .collect()
}

/// A code: distinct `n`-bit words with their pairwise distances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryCode {
    n: usize,
    words: Vec<u32>,
    distances: Vec<u8>,
}

impl BinaryCode {
    pub fn new(n: usize, words: Vec<u32>) -> Result<Self> {
        check_enum(n)?;
        if words.is_empty() {
            return Err(Error::Config("a code needs at least one word".into()));
        }
        let mask = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        if let Some(w) = words.iter().find(|&&w| w & !mask != 0) {
            return Err(Error::Config(format!("word {w:#b} does not fit in {n} bits")));
        }
        let mut seen = HashSet::with_capacity(words.len());
        if let Some(w) = words.iter().find(|&&w| !seen.insert(w)) {
            return Err(Error::Config(format!("word {w:#b} appears twice")));
        }
        let m = words.len();
        let mut distances = vec![0u8; m * m];
        for i in 0..m {
            for k in 0..m {
                distances[i * m + k] = dist(words[i], words[k]) as u8;
            }
        }
        Ok(Self { n, words, distances })
    }

    /// `m` distinct words drawn uniformly without replacement.
    pub fn random(n: usize, m: usize, seed: u64) -> Result<Self> {
        check_enum(n)?;
        if m == 0 || m > 1usize << n {
            return Err(Error::SizeLimit(format!(
                "cannot draw {m} distinct words of length {n}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let words = sample(&mut rng, 1usize << n, m).into_iter().map(|w| w as u32).collect();
        Self::new(n, words)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> &[u32] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn distance(&self, i: usize, k: usize) -> usize {
        self.distances[i * self.len() + k] as usize
    }

    /// `log2(M) / n`.
    pub fn rate(&self) -> f64 {
        (self.len() as f64).log2() / self.n as f64
    }

    pub fn min_distance(&self) -> Option<usize> {
        let m = self.len();
        (0..m)
            .flat_map(|i| (i + 1..m).map(move |k| (i, k)))
            .map(|(i, k)| self.distance(i, k))
            .min()
    }

    fn distances_to(&self, y: u32, out: &mut Vec<usize>) {
        out.clear();
        out.extend(self.words.iter().map(|&x| dist(x, y)));
    }
}

/// Distance distribution stored as ordered-pair counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumExact {
    pub n: usize,
    pub m: usize,
    /// `|{(x, y) in C^2 : d(x, y) = i}|`, self pairs included.
    pub pair_counts: Vec<u64>,
}

impl SpectrumExact {
    /// `B_i`, the average number of codewords at distance `i` from a codeword.
    pub fn b(&self, i: usize) -> f64 {
        self.pair_counts[i] as f64 / self.m as f64
    }

    pub fn b_values(&self) -> Vec<f64> {
        (0..=self.n).map(|i| self.b(i)).collect()
    }

    /// `log2(B_i) / n` where `B_i > 0`.
    pub fn b_exponents(&self) -> Vec<Option<f64>> {
        (0..=self.n)
            .map(|i| (self.pair_counts[i] > 0).then(|| self.b(i).log2() / self.n as f64))
            .collect()
    }

    /// `B_0 = 1`, `sum B_i = M` and even mirror counts for `i >= 1`.
    pub fn check_invariants(&self) -> bool {
        let m = self.m as u64;
        self.pair_counts[0] == m
            && self.pair_counts.iter().sum::<u64>() == m * m
            && self.pair_counts[1..].iter().all(|c| c % 2 == 0)
    }
}

pub fn spectrum(code: &BinaryCode) -> SpectrumExact {
    let m = code.len();
    let mut pair_counts = vec![0u64; code.n + 1];
    for i in 0..m {
        for k in 0..m {
            pair_counts[code.distance(i, k)] += 1;
        }
    }
    SpectrumExact {
        n: code.n,
        m,
        pair_counts,
    }
}

/// `C(n, k)`, or `None` on `u128` overflow.
pub fn binomial(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc (n - i) / (i + 1) is integral; cancel the common factor first so
        // the product only overflows when the result does
        let den = i as u128 + 1;
        let g = gcd(acc, den);
        acc = (acc / g).checked_mul((n - i) as u128 / (den / g))?;
    }
    Some(acc)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `log2 C(n, k)`, `-inf` when `k > n`.
pub fn log2_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64 / (i + 1) as f64).log2()).sum()
}

/// Split of a point of `S_t(x_i) ∩ S_p(x_k)` into flips inside and outside
/// the `d` positions where the centres differ.
fn split(n: usize, d: usize, tn: usize, pn: usize) -> Option<(usize, usize)> {
    let inside2 = (tn + d).checked_sub(pn)?;
    let outside2 = (tn + pn).checked_sub(d)?;
    if inside2 % 2 == 1 || outside2 % 2 == 1 {
        return None;
    }
    let (a, b) = (inside2 / 2, outside2 / 2);
    (d <= n && a <= d && b <= n - d).then_some((a, b))
}

/// `|S_t(x_i) ∩ S_p(x_k)|` for centres `d` apart, as `C(d, a) C(n - d, b)`.
pub fn sphere_intersection_count_scaled(n: usize, d: usize, tn: usize, pn: usize) -> Result<u128> {
    if d > n || tn > n || pn > n {
        return Err(Error::Config(format!(
            "radii ({tn}, {pn}) or distance {d} exceed n = {n}"
        )));
    }
    let Some((a, b)) = split(n, d, tn, pn) else {
        return Ok(0);
    };
    let overflow = || Error::SizeLimit(format!("intersection count overflows u128 at n = {n}"));
    binomial(d, a)
        .zip(binomial(n - d, b))
        .and_then(|(x, y)| x.checked_mul(y))
        .ok_or_else(overflow)
}

pub fn sphere_intersection_count(n: usize, x_i: u32, x_k: u32, tn: usize, pn: usize) -> Result<u128> {
    sphere_intersection_count_scaled(n, dist(x_i, x_k), tn, pn)
}

/// Normalized form; `t n`, `p n` and `omega n` must be integers.
pub fn sphere_intersection_count_normalized(n: usize, t: f64, p: f64, omega: f64) -> Result<u128> {
    sphere_intersection_count_scaled(n, scaled("omega", omega, n)?, scaled("t", t, n)?, scaled("p", p, n)?)
}

/// `log2` of the intersection count, `-inf` when it is empty.
pub fn log2_sphere_intersection(n: usize, d: usize, tn: usize, pn: usize) -> Result<f64> {
    if n > MAX_LOG_N || d > n || tn > n || pn > n {
        return Err(Error::SizeLimit(format!("log-space count at n = {n}, d = {d}")));
    }
    Ok(match split(n, d, tn, pn) {
        Some((a, b)) => log2_binomial(d, a) + log2_binomial(n - d, b),
        None => f64::NEG_INFINITY,
    })
}

/// The same count by walking the whole cube.
pub fn sphere_intersection_enumerate(n: usize, x_i: u32, x_k: u32, tn: usize, pn: usize) -> Result<u64> {
    check_enum(n)?;
    Ok(chunks(n)
        .into_par_iter()
        .map(|(lo, hi)| (lo..hi).filter(|&y| dist(x_i, y) == tn && dist(x_k, y) == pn).count() as u64)
        .sum())
}

/// Joint histogram of `(d(x_i, y), d(x_k, y))` over the cube for centres
/// `0` and the word with the low `d` bits set, indexed `[t * (n + 1) + p]`.
pub fn intersection_histogram(n: usize, d: usize) -> Result<Vec<u64>> {
    check_enum(n)?;
    if d > n {
        return Err(Error::Config(format!("distance {d} exceeds n = {n}")));
    }
    let x_k = if d == 32 { u32::MAX } else { (1u32 << d) - 1 };
    let side = n + 1;
    Ok(chunks(n)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut hist = vec![0u64; side * side];
            for y in lo..hi {
                hist[dist(0, y) * side + dist(x_k, y)] += 1;
            }
            hist
        })
        .reduce(|| vec![0u64; side * side], add_vecs))
}

fn add_vecs(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

/// Which codewords may supply the second centre of a covering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Neighbours {
    /// `x_k != x_i`, the strict reading.
    Others,
    /// Every codeword, `x_i` included.
    All,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnionSizes {
    pub per_word: Vec<u64>,
    pub total: u64,
}

fn union_sizes<F>(code: &BinaryCode, covered: F) -> UnionSizes
where
    F: Fn(usize, &[usize]) -> bool + Sync,
{
    let m = code.len();
    let per_word = chunks(code.n)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut counts = vec![0u64; m];
            let mut d = Vec::with_capacity(m);
            for y in lo..hi {
                code.distances_to(y, &mut d);
                for (i, c) in counts.iter_mut().enumerate() {
                    if covered(i, &d) {
                        *c += 1;
                    }
                }
            }
            counts
        })
        .reduce(|| vec![0u64; m], add_vecs);
    UnionSizes {
        total: per_word.iter().sum(),
        per_word,
    }
}

/// `|D_{x_i}(t, p)|`: points at distance `tn` from `x_i` and `pn` from some
/// other (or, with [`Neighbours::All`], any) codeword.
pub fn covered_union_size(code: &BinaryCode, tn: usize, pn: usize, mode: Neighbours) -> Result<UnionSizes> {
    check_enum(code.n)?;
    Ok(union_sizes(code, |i, d| {
        d[i] == tn
            && d.iter()
                .enumerate()
                .any(|(k, &dk)| dk == pn && (mode == Neighbours::All || k != i))
    }))
}

/// `|D_{x_i}(t, p, omega)|`: the second centre must sit at distance `omega n` from `x_i`.
pub fn covered_union_size_at(code: &BinaryCode, tn: usize, pn: usize, omega_n: usize) -> Result<UnionSizes> {
    check_enum(code.n)?;
    Ok(union_sizes(code, |i, d| {
        d[i] == tn
            && d.iter()
                .enumerate()
                .any(|(k, &dk)| dk == pn && code.distance(i, k) == omega_n)
    }))
}

/// `sum_i |D_{x_i}(t, p)|` for every `tn` in `0..=n` at once.
pub fn covered_union_profile(code: &BinaryCode, pn: usize, mode: Neighbours) -> Result<Vec<u64>> {
    check_enum(code.n)?;
    let side = code.n + 1;
    let m = code.len();
    Ok(chunks(code.n)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut totals = vec![0u64; side];
            let mut d = Vec::with_capacity(m);
            for y in lo..hi {
                code.distances_to(y, &mut d);
                let m_p = d.iter().filter(|&&dk| dk == pn).count();
                for &di in &d {
                    let others = m_p - usize::from(di == pn);
                    let hit = match mode {
                        Neighbours::All => m_p >= 1,
                        Neighbours::Others => others >= 1,
                    };
                    if hit {
                        totals[di] += 1;
                    }
                }
            }
            totals
        })
        .reduce(|| vec![0u64; side], add_vecs))
}

/// Covering counts at one output point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoveringCounts {
    /// Ordered pairs `(x_i, x_j)` with `d(x_i, y) = pn`, `d(x_j, y) = tn` and,
    /// when a distance was given, `d(x_i, x_j) = omega n`.
    pub k: u64,
    pub m_t: u64,
    pub m_p: u64,
}

pub fn covering_counts(code: &BinaryCode, y: u32, omega_n: Option<usize>, pn: usize, tn: usize) -> CoveringCounts {
    let m = code.len();
    let mut d = Vec::with_capacity(m);
    code.distances_to(y, &mut d);
    let mut k = 0;
    for i in 0..m {
        for j in 0..m {
            if d[i] == pn && d[j] == tn && omega_n.is_none_or(|w| code.distance(i, j) == w) {
                k += 1;
            }
        }
    }
    CoveringCounts {
        k,
        m_t: d.iter().filter(|&&x| x == tn).count() as u64,
        m_p: d.iter().filter(|&&x| x == pn).count() as u64,
    }
}

/// Every covering-type sum of one code, indexed by `(t, p)` or `(t, p, omega)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeTables {
    pub n: usize,
    pub m: usize,
    /// `sum_i |D_{x_i}(t, p, omega)|` at `[(t * side + p) * side + omega]`.
    pub union_at: Vec<u64>,
    /// `sum_y K(y, omega, t, p)`, same layout.
    pub k_at: Vec<u64>,
    /// `sum_i |D_{x_i}(t, p)|`, inclusive and strict, at `[t * side + p]`.
    pub union_all: Vec<u64>,
    pub union_others: Vec<u64>,
    /// `sum_{y : m_p(y) >= 1} m_t(y)`.
    pub mt_covered: Vec<u64>,
    /// `sum_{y : m_p(y) >= 1} K(y, t, p) / m_p(y)` with `K` from the pair loop.
    pub k_over_mp: Vec<u64>,
    /// Points where the pair count differs from `m_t m_p`.
    pub kmy_violations: u64,
    /// `max_y m_p(y)` at `[p]`.
    pub max_mp: Vec<u64>,
}

impl CodeTables {
    pub fn side(&self) -> usize {
        self.n + 1
    }

    pub fn at(&self, t: usize, p: usize, omega: usize) -> usize {
        (t * self.side() + p) * self.side() + omega
    }

    fn empty(n: usize, m: usize) -> Self {
        let side = n + 1;
        Self {
            n,
            m,
            union_at: vec![0; side * side * side],
            k_at: vec![0; side * side * side],
            union_all: vec![0; side * side],
            union_others: vec![0; side * side],
            mt_covered: vec![0; side * side],
            k_over_mp: vec![0; side * side],
            kmy_violations: 0,
            max_mp: vec![0; side],
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in [
            (&mut self.union_at, other.union_at),
            (&mut self.k_at, other.k_at),
            (&mut self.union_all, other.union_all),
            (&mut self.union_others, other.union_others),
            (&mut self.mt_covered, other.mt_covered),
            (&mut self.k_over_mp, other.k_over_mp),
        ] {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        self.kmy_violations += other.kmy_violations;
        for (x, y) in self.max_mp.iter_mut().zip(other.max_mp) {
            *x = (*x).max(y);
        }
        self
    }

    pub fn build(code: &BinaryCode) -> Result<Self> {
        check_enum(code.n)?;
        let (n, m) = (code.n, code.len());
        let side = n + 1;
        Ok(chunks(n)
            .into_par_iter()
            .map(|(lo, hi)| {
                let mut tab = Self::empty(n, m);
                let mut d = Vec::with_capacity(m);
                let mut hist = vec![0u64; side];
                let mut pairs = vec![0u64; side * side];
                // stamp[(p, omega)] == current marks the key as already covered for this (y, i)
                let mut stamp = vec![u64::MAX; side * side];
                let mut current = 0u64;
                for y in lo..hi {
                    code.distances_to(y, &mut d);
                    hist.iter_mut().for_each(|x| *x = 0);
                    pairs.iter_mut().for_each(|x| *x = 0);
                    for &dk in &d {
                        hist[dk] += 1;
                    }
                    for i in 0..m {
                        let t = d[i];
                        current += 1;
                        for j in 0..m {
                            pairs[t * side + d[j]] += 1;
                            if j == i {
                                continue;
                            }
                            let (p, w) = (d[j], code.distance(i, j));
                            tab.k_at[(t * side + p) * side + w] += 1;
                            if stamp[p * side + w] != current {
                                stamp[p * side + w] = current;
                                tab.union_at[(t * side + p) * side + w] += 1;
                            }
                        }
                        for (p, &count) in hist.iter().enumerate() {
                            if count >= 1 {
                                tab.union_all[t * side + p] += 1;
                            }
                            if count > u64::from(t == p) {
                                tab.union_others[t * side + p] += 1;
                            }
                        }
                    }
                    for p in 0..side {
                        tab.max_mp[p] = tab.max_mp[p].max(hist[p]);
                        if hist[p] == 0 {
                            continue;
                        }
                        for t in 0..side {
                            let k = pairs[t * side + p];
                            if k != hist[t] * hist[p] {
                                tab.kmy_violations += 1;
                            }
                            tab.mt_covered[t * side + p] += hist[t];
                            tab.k_over_mp[t * side + p] += k / hist[p];
                        }
                    }
                }
                tab
            })
            .reduce(|| Self::empty(n, m), Self::merge))
    }
}

/// Outcome of the exact identity checks on one code.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdentityOutcome {
    pub checks: u64,
    pub failures: Vec<String>,
}

impl IdentityOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.failures.len() < 20 {
            self.failures.push(what());
        }
    }

    pub fn absorb(&mut self, other: IdentityOutcome) {
        self.checks += other.checks;
        self.failures.extend(other.failures);
    }
}

/// Checks the covering identities and inequalities on `code`:
///
/// * `sum_i |D_{x_i}(t,p,omega)| <= sum_y K(y,omega,t,p)` for `omega > 0`,
///   and the reverse up to the factor `max_y m_p(y)`;
/// * `sum_i |D_{x_i}(t,p)| = sum_{m_p >= 1} K(y,t,p)/m_p = sum_{m_p >= 1} m_t`
///   (inclusive union; the strict one agrees for `t != p`);
/// * `K(y, t, p) = m_t(y) m_p(y)` at every point;
/// * the spectrum invariants.
pub fn check_identities(code: &BinaryCode) -> Result<IdentityOutcome> {
    let tab = CodeTables::build(code)?;
    let side = tab.side();
    let mut out = IdentityOutcome::default();
    for t in 0..side {
        for p in 0..side {
            for w in 1..side {
                let (lhs, rhs) = (tab.union_at[tab.at(t, p, w)], tab.k_at[tab.at(t, p, w)]);
                out.check(lhs <= rhs, || {
                    format!("union {lhs} > K sum {rhs} at (t,p,w) = ({t},{p},{w})")
                });
                let bound = lhs * tab.max_mp[p].max(1);
                out.check(rhs <= bound, || format!("K sum {rhs} > {bound} at ({t},{p},{w})"));
            }
            let i = t * side + p;
            let (all, mt, kq) = (tab.union_all[i], tab.mt_covered[i], tab.k_over_mp[i]);
            out.check(all == mt && all == kq, || {
                format!("inclusive union {all}, m_t sum {mt}, K/m_p sum {kq} at (t,p) = ({t},{p})")
            });
            if t != p {
                let strict = tab.union_others[i];
                out.check(strict == all, || format!("strict union {strict} != {all} at ({t},{p})"));
            }
        }
    }
    out.check(tab.kmy_violations == 0, || {
        format!("{} points with K != m_t m_p", tab.kmy_violations)
    });
    let spec = spectrum(code);
    out.check(spec.check_invariants(), || {
        format!("spectrum invariants fail: {:?}", spec.pair_counts)
    });
    Ok(out)
}

/// Checks the binomial-product intersection count against cube enumeration
/// for every `(d, t, p)` at block length `n`.
pub fn check_intersection_counts(n: usize) -> Result<IdentityOutcome> {
    let side = n + 1;
    let mut out = IdentityOutcome::default();
    for d in 0..=n {
        let hist = intersection_histogram(n, d)?;
        for t in 0..=n {
            for p in 0..=n {
                let formula = sphere_intersection_count_scaled(n, d, t, p)?;
                let counted = hist[t * side + p] as u128;
                out.check(formula == counted, || {
                    format!("n = {n}, d = {d}, t = {t}, p = {p}: formula {formula}, enumeration {counted}")
                });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentitySuiteConfig {
    pub seed: u64,
    pub codes: usize,
    pub min_n: usize,
    pub max_n: usize,
    pub max_words: usize,
}

impl Default for IdentitySuiteConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            codes: 100,
            min_n: 4,
            max_n: 14,
            max_words: 24,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdentitySuiteReport {
    pub count_equivalence: IdentityOutcome,
    pub covering: IdentityOutcome,
    pub codes_checked: usize,
}

impl IdentitySuiteReport {
    pub fn passed(&self) -> bool {
        self.count_equivalence.passed() && self.covering.passed()
    }
}

/// Intersection counts for every `n` in range, then the covering identities
/// on seeded random codes with `n` and `M` cycling through their ranges.
pub fn run_identity_suite(cfg: &IdentitySuiteConfig) -> Result<IdentitySuiteReport> {
    if cfg.min_n < 2 || cfg.min_n > cfg.max_n || cfg.max_n > MAX_ENUM_N || cfg.max_words < 2 {
        return Err(Error::Config(format!("invalid identity suite configuration {cfg:?}")));
    }
    let mut report = IdentitySuiteReport::default();
    for n in cfg.min_n..=cfg.max_n {
        report.count_equivalence.absorb(check_intersection_counts(n)?);
    }
    let span = cfg.max_n - cfg.min_n + 1;
    for c in 0..cfg.codes {
        let n = cfg.min_n + c % span;
        let m = (2 + (c / span) % (cfg.max_words - 1)).min(1 << n);
        let code = BinaryCode::random(n, m, cfg.seed.wrapping_add(c as u64))?;
        report.covering.absorb(check_identities(&code)?);
        report.codes_checked += 1;
    }
    Ok(report)
}

/// The set of outputs on which the statistician decides for H0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecisionRegion {
    Whole,
    /// Some codeword at distance in `[lo, hi]`.
    SliceUnion {
        lo: usize,
        hi: usize,
    },
    /// Some codeword within distance `radius`.
    BallUnion {
        radius: usize,
    },
    /// Every codeword at distance at least `radius`.
    BallExterior {
        radius: usize,
    },
    /// Membership listed for all `2^n` outputs.
    Explicit {
        n: usize,
        accept: Vec<bool>,
    },
}

impl DecisionRegion {
    /// Union of the slices `|d(x_k, u) - p0 n| <= delta n`.
    pub fn slice(n: usize, p0: f64, delta: f64) -> Result<Self> {
        if delta.is_nan() || delta < 0.0 || !(0.0..=1.0).contains(&p0) {
            return Err(Error::Config(format!("invalid slice p0 = {p0}, delta = {delta}")));
        }
        let nf = n as f64;
        let lo = ((p0 - delta) * nf - 1e-9).ceil().max(0.0) as usize;
        let hi = (((p0 + delta) * nf + 1e-9).floor().max(-1.0)).min(nf);
        if hi < lo as f64 {
            return Err(Error::Config(format!(
                "slice around {p0} of half-width {delta} holds no integer distance"
            )));
        }
        Ok(Self::SliceUnion { lo, hi: hi as usize })
    }

    /// Minimum-distance threshold test at slack `tau`: for `p0 < p1` accept H0
    /// when some codeword lies within `floor(tau n)`; for `p1 < p0` accept when
    /// every codeword lies at least `ceil(tau n)` away.
    pub fn threshold(channel: &ChannelPair, n: usize, tau: f64) -> Self {
        let scaled = tau * n as f64;
        if channel.alternative_is_cleaner() {
            Self::BallExterior {
                radius: (scaled - 1e-9).ceil().max(0.0) as usize,
            }
        } else {
            Self::BallUnion {
                radius: (scaled + 1e-9).floor().max(0.0) as usize,
            }
        }
    }

    /// Decision given the distances from `y` to every codeword.
    pub fn accepts(&self, y: u32, d: &[usize]) -> bool {
        match self {
            DecisionRegion::Whole => true,
            DecisionRegion::SliceUnion { lo, hi } => d.iter().any(|x| (*lo..=*hi).contains(x)),
            DecisionRegion::BallUnion { radius } => d.iter().any(|&x| x <= *radius),
            DecisionRegion::BallExterior { radius } => d.iter().all(|&x| x >= *radius),
            DecisionRegion::Explicit { accept, .. } => accept[y as usize],
        }
    }

    /// Lists membership for every output of `code`'s cube.
    pub fn materialize(&self, code: &BinaryCode) -> Result<Self> {
        check_enum(code.n)?;
        let mut d = Vec::with_capacity(code.len());
        let accept = (0..1u32 << code.n)
            .map(|y| {
                code.distances_to(y, &mut d);
                self.accepts(y, &d)
            })
            .collect();
        Ok(Self::Explicit { n: code.n, accept })
    }
}

/// Exact error probabilities of a code under a decision region.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorProbabilities {
    /// `P(reject H0 | x_i, p0)` per codeword.
    pub alpha: Vec<f64>,
    /// `P(accept H0 | x_i, p1)` per codeword.
    pub beta: Vec<f64>,
    pub alpha_max: f64,
    pub beta_max: f64,
    pub alpha_avg: f64,
    pub beta_avg: f64,
}

pub fn exact_error_probabilities(
    code: &BinaryCode,
    region: &DecisionRegion,
    channel: &ChannelPair,
) -> Result<ErrorProbabilities> {
    check_enum(code.n)?;
    if let DecisionRegion::Explicit { n, accept } = region {
        if *n != code.n || accept.len() != 1usize << code.n {
            return Err(Error::Config("explicit region does not match the code's cube".into()));
        }
    }
    let (n, m) = (code.n, code.len());
    let table = |p: f64| -> Vec<f64> {
        (0..=n)
            .map(|d| p.powi(d as i32) * (1.0 - p).powi((n - d) as i32))
            .collect()
    };
    let (w0, w1) = (table(channel.p0()), table(channel.p1()));
    let parts: Vec<(Vec<f64>, Vec<f64>)> = chunks(n)
        .into_par_iter()
        .map(|(lo, hi)| {
            let (mut a, mut b) = (vec![0.0; m], vec![0.0; m]);
            let mut d = Vec::with_capacity(m);
            for y in lo..hi {
                code.distances_to(y, &mut d);
                if region.accepts(y, &d) {
                    for (bi, &di) in b.iter_mut().zip(&d) {
                        *bi += w1[di];
                    }
                } else {
                    for (ai, &di) in a.iter_mut().zip(&d) {
                        *ai += w0[di];
                    }
                }
            }
            (a, b)
        })
        .collect();
    let (mut alpha, mut beta) = (vec![0.0; m], vec![0.0; m]);
    for (a, b) in parts {
        alpha.iter_mut().zip(a).for_each(|(x, y)| *x += y);
        beta.iter_mut().zip(b).for_each(|(x, y)| *x += y);
    }
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    let avg = |v: &[f64]| v.iter().sum::<f64>() / m as f64;
    Ok(ErrorProbabilities {
        alpha_max: max(&alpha),
        beta_max: max(&beta),
        alpha_avg: avg(&alpha),
        beta_avg: avg(&beta),
        alpha,
        beta,
    })
}

/// A value of the covering functional and the integer radius it was taken at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentPoint {
    pub tn: usize,
    pub value: f64,
}

fn exponent_from_total(total: f64, n: usize, m: usize, channel: &ChannelPair, tn: usize) -> f64 {
    let nf = n as f64;
    let t = tn as f64 / nf;
    let p0 = channel.p0();
    total.log2() / nf + (p0 - t) * channel.log_odds1() - (m as f64).log2() / nf - h(p0)
}

/// `(1/n) log2 sum_i |D_{x_i}(t, p0)| + (p0 - t) log2((1-p1)/p1) - r - h(p0)`.
pub fn covering_exponent(code: &BinaryCode, channel: &ChannelPair, tn: usize, mode: Neighbours) -> Result<f64> {
    let pn = scaled("p0", channel.p0(), code.n)?;
    let total = covered_union_size(code, tn, pn, mode)?.total;
    Ok(exponent_from_total(total as f64, code.n, code.len(), channel, tn))
}

fn best_over_t(values: impl Iterator<Item = (usize, f64)>) -> ExponentPoint {
    values.fold(
        ExponentPoint {
            tn: 0,
            value: f64::NEG_INFINITY,
        },
        |best, (tn, value)| {
            if value > best.value {
                ExponentPoint { tn, value }
            } else {
                best
            }
        },
    )
}

/// Maximum of [`covering_exponent`] over `tn = 1..=n`.
pub fn covering_exponent_max(code: &BinaryCode, channel: &ChannelPair, mode: Neighbours) -> Result<ExponentPoint> {
    let pn = scaled("p0", channel.p0(), code.n)?;
    let profile = covered_union_profile(code, pn, mode)?;
    Ok(best_over_t((1..=code.n).map(|tn| {
        (
            tn,
            exponent_from_total(profile[tn] as f64, code.n, code.len(), channel, tn),
        )
    })))
}

/// Predicted `log2(beta_n) / n`: the maximum over `t` of
/// `(1/n) log2[(1/M) sum_i |D_{x_i}(t, p0)|] + t log2 p1 + (1-t) log2(1-p1)`.
///
/// Equals [`covering_exponent_max`] minus `D(p0 || p1)`.
pub fn covering_beta_exponent(code: &BinaryCode, channel: &ChannelPair, mode: Neighbours) -> Result<ExponentPoint> {
    let pn = scaled("p0", channel.p0(), code.n)?;
    let profile = covered_union_profile(code, pn, mode)?;
    let nf = code.n as f64;
    let (p1, q1) = (channel.p1(), channel.q1());
    Ok(best_over_t((1..=code.n).map(|tn| {
        let t = tn as f64 / nf;
        let avg = profile[tn] as f64 / code.len() as f64;
        (tn, avg.log2() / nf + t * p1.log2() + (1.0 - t) * q1.log2())
    })))
}

/// [`covering_exponent_max`] for the two-word code at distance `d`, inclusive union,
/// from closed-form counts; works far beyond enumeration range.
pub fn two_word_covering_exponent_max(n: usize, d: usize, channel: &ChannelPair) -> Result<ExponentPoint> {
    if d == 0 || d > n {
        return Err(Error::Config(format!(
            "two distinct words need 0 < d <= n, got d = {d}, n = {n}"
        )));
    }
    let pn = scaled("p0", channel.p0(), n)?;
    let mut values = Vec::with_capacity(n);
    for tn in 1..=n {
        // with the own centre allowed, t = p0 covers the whole sphere S_p0(x_i)
        let log_size = if tn == pn {
            log2_binomial(n, pn)
        } else {
            log2_sphere_intersection(n, d, tn, pn)?
        };
        // two words contribute equally: log2(2 |D|) - log2(M) = log2 |D|
        let t = tn as f64 / n as f64;
        let value = log_size / n as f64 + (channel.p0() - t) * channel.log_odds1() - h(channel.p0());
        values.push((tn, value));
    }
    Ok(best_over_t(values.into_iter()))
}

/// Both argument orders of the divergence, reported side by side because the
/// sign convention of the starting value is ambiguous in the literature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceOrders {
    pub d01: f64,
    pub d10: f64,
}

pub fn divergence_orders(channel: &ChannelPair) -> DivergenceOrders {
    DivergenceOrders {
        d01: divergence_unchecked(channel.p0(), channel.p1()),
        d10: divergence_unchecked(channel.p1(), channel.p0()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(n: usize, words: &[u32]) -> BinaryCode {
        BinaryCode::new(n, words.to_vec()).unwrap()
    }

    #[test]
    fn code_validation() {
        assert!(BinaryCode::new(4, vec![0, 0]).is_err());
        assert!(BinaryCode::new(4, vec![16]).is_err());
        assert!(BinaryCode::new(25, vec![0]).is_err());
        assert!(BinaryCode::new(4, vec![]).is_err());
        let c = code(4, &[0b0000, 0b1100, 0b1111]);
        assert_eq!(c.distance(0, 1), 2);
        assert_eq!(c.distance(1, 2), 2);
        assert_eq!(c.distance(2, 0), 4);
        assert_eq!(c.min_distance(), Some(2));
        for i in 0..3 {
            assert_eq!(c.distance(i, i), 0);
            for k in 0..3 {
                assert_eq!(c.distance(i, k), c.distance(k, i));
            }
        }
    }

    #[test]
    fn random_codes_are_seeded() {
        let a = BinaryCode::random(10, 20, 7).unwrap();
        let b = BinaryCode::random(10, 20, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, BinaryCode::random(10, 20, 8).unwrap());
        assert!(BinaryCode::random(3, 9, 0).is_err());
        assert_eq!(BinaryCode::random(3, 8, 0).unwrap().len(), 8);
    }

    #[test]
    fn intersection_examples() {
        assert_eq!(sphere_intersection_count(4, 0b0000, 0b1100, 1, 1).unwrap(), 2);
        assert_eq!(sphere_intersection_enumerate(4, 0b0000, 0b1100, 1, 1).unwrap(), 2);
        assert_eq!(sphere_intersection_count(4, 0b0000, 0b1100, 0, 0).unwrap(), 0);
        assert_eq!(sphere_intersection_count(4, 0b0101, 0b0101, 1, 1).unwrap(), 4);
        assert_eq!(sphere_intersection_count_normalized(4, 0.25, 0.25, 0.0).unwrap(), 4);
        assert!(matches!(
            sphere_intersection_count_normalized(5, 0.25, 0.2, 0.2),
            Err(Error::NonIntegral { what: "t", .. })
        ));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(10, 3), Some(120));
        assert_eq!(binomial(3, 5), Some(0));
        assert_eq!(
            binomial(128, 64),
            Some(23_951_146_041_928_082_866_135_587_776_380_551_750)
        );
        assert!((log2_binomial(10, 3) - 120f64.log2()).abs() < 1e-12);
        assert_eq!(log2_binomial(3, 4), f64::NEG_INFINITY);
    }

    #[test]
    fn scaled_parameters() {
        assert_eq!(scaled("t", 0.25, 12).unwrap(), 3);
        assert_eq!(scaled("t", 0.1, 30).unwrap(), 3);
        assert!(scaled("t", 0.1, 12).is_err());
        assert!(scaled("t", 1.5, 4).is_err());
    }

    #[test]
    fn union_examples() {
        let c = code(4, &[0b0000, 0b1111]);
        let u = covered_union_size(&c, 1, 1, Neighbours::Others).unwrap();
        assert_eq!(u.total, 0);
        let c = code(4, &[0b0000, 0b1100]);
        let u = covered_union_size(&c, 1, 1, Neighbours::Others).unwrap();
        assert_eq!(u.per_word[0], 2);
        let u = covered_union_size_at(&c, 1, 1, 2).unwrap();
        assert_eq!(u.per_word[0], 2);
        assert_eq!(covered_union_size_at(&c, 1, 1, 3).unwrap().total, 0);
        // the own sphere counts only in the inclusive reading
        let u = covered_union_size(&c, 1, 1, Neighbours::All).unwrap();
        assert_eq!(u.per_word[0], 4);
    }

    #[test]
    fn spectrum_examples() {
        let s = spectrum(&code(4, &[0b0000, 0b1111]));
        assert_eq!(s.b_values(), vec![1.0, 0.0, 0.0, 0.0, 1.0]);
        let s = spectrum(&code(3, &[0b000, 0b011, 0b101, 0b110]));
        assert_eq!(s.pair_counts, vec![4, 0, 12, 0]);
        assert_eq!(s.b(2), 3.0);
        assert!(s.check_invariants());
        assert_eq!(s.b_exponents()[1], None);
        let s = spectrum(&BinaryCode::random(12, 32, 3).unwrap());
        assert!((s.b_values().iter().sum::<f64>() - 32.0).abs() < 1e-12);
        assert!(s.check_invariants());
    }

    #[test]
    fn covering_examples() {
        let c = code(4, &[0b0000, 0b1100]);
        // y = 1000 is at distance 1 from both words, which are 2 apart
        let k = covering_counts(&c, 0b1000, Some(2), 1, 1);
        assert_eq!(k.k, 2);
        let k = covering_counts(&c, 0b0001, Some(2), 1, 3);
        assert_eq!(k.k, 1);
        let free = covering_counts(&c, 0b1000, None, 1, 1);
        assert_eq!(free.k, free.m_t * free.m_p);
    }

    #[test]
    fn identities_hold_on_small_codes() {
        for seed in 0..5 {
            let c = BinaryCode::random(8, 6, seed).unwrap();
            let out = check_identities(&c).unwrap();
            assert!(out.passed(), "{:?}", out.failures);
        }
        assert!(check_intersection_counts(7).unwrap().passed());
    }

    #[test]
    fn whole_cube_region() {
        let c = BinaryCode::random(8, 3, 1).unwrap();
        let ch = ChannelPair::new(0.25, 0.1).unwrap();
        let e = exact_error_probabilities(&c, &DecisionRegion::Whole, &ch).unwrap();
        assert_eq!(e.alpha_max, 0.0);
        assert!((e.beta_max - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_word_slice_is_binomial_tail() {
        let (n, p0, delta) = (12, 0.25, 0.1);
        let c = code(n, &[0b1010_0110_0001]);
        let ch = ChannelPair::new(p0, 0.1).unwrap();
        let region = DecisionRegion::slice(n, p0, delta).unwrap();
        assert_eq!(region, DecisionRegion::SliceUnion { lo: 2, hi: 4 });
        let e = exact_error_probabilities(&c, &region, &ch).unwrap();
        let tail: f64 = (0..=n)
            .filter(|&d| (d as f64 - p0 * n as f64).abs() > delta * n as f64)
            .map(|d| binomial(n, d).unwrap() as f64 * p0.powi(d as i32) * (1.0 - p0).powi((n - d) as i32))
            .sum();
        assert!((e.alpha_max - tail).abs() < 1e-14);
    }

    #[test]
    fn threshold_regions_follow_direction() {
        let down = ChannelPair::new(0.25, 0.1).unwrap();
        let up = ChannelPair::new(0.1, 0.25).unwrap();
        assert_eq!(
            DecisionRegion::threshold(&down, 12, 0.25),
            DecisionRegion::BallExterior { radius: 3 }
        );
        assert_eq!(
            DecisionRegion::threshold(&up, 12, 0.2),
            DecisionRegion::BallUnion { radius: 2 }
        );
    }

    #[test]
    fn materialized_region_agrees() {
        let c = BinaryCode::random(9, 4, 5).unwrap();
        let ch = ChannelPair::new(0.3, 0.1).unwrap();
        let region = DecisionRegion::threshold(&ch, 9, 0.3);
        let a = exact_error_probabilities(&c, &region, &ch).unwrap();
        let b = exact_error_probabilities(&c, &region.materialize(&c).unwrap(), &ch).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_word_exponent() {
        let ch = ChannelPair::new(0.25, 0.1).unwrap();
        let c = code(16, &[0]);
        let best = covering_exponent_max(&c, &ch, Neighbours::All).unwrap();
        assert_eq!(best.tn, 4);
        let beta = covering_beta_exponent(&c, &ch, Neighbours::All).unwrap();
        assert!((beta.value - (best.value - ch.known_input_exponent())).abs() < 1e-12);
        let slack = 2.0 * 17f64.log2() / 16.0;
        assert!((beta.value + ch.known_input_exponent()).abs() <= slack);
        let orders = divergence_orders(&ch);
        assert!(orders.d01 != orders.d10);
    }

    #[test]
    fn two_word_closed_form_matches_enumeration() {
        let ch = ChannelPair::new(0.25, 0.1).unwrap();
        for d in 1..=12 {
            let c = code(12, &[0, (1u32 << d) - 1]);
            let enumerated = covering_exponent_max(&c, &ch, Neighbours::All).unwrap();
            let closed = two_word_covering_exponent_max(12, d, &ch).unwrap();
            assert_eq!(enumerated.tn, closed.tn, "d = {d}");
            assert!((enumerated.value - closed.value).abs() < 1e-12, "d = {d}");
        }
    }
}
