//! Exhaustive and sampled extremal searches, one verifier per bound.
//!
//! Candidate families are small bitsets: a set family on `[n]` (`n <= 6`)
//! is a `u64` over the `2^n` subset masks, and a sequence family on
//! `[m]^n` is a `u64` over base-`m` indices. Searches reduce with
//! [`Best`], which keeps the maximum value and the lexicographically least
//! witnesses, so results do not depend on how work is split across threads.

mod report;
mod seqs;
mod sets;
pub mod suites;
mod upsets;

use std::cmp::Ordering;

use rand_xoshiro::rand_core::SeedableRng;
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;

pub use report::{Mode, Quantity, Regime, TheoremId, VerificationReport};
pub use seqs::{seq_extremum, verify_af, verify_tm2, verify_tm4, SeqExtremum};
pub use sets::{
    tm1_extremum, tm3_extremum, verify_daykin, verify_katona_single, verify_le3_reduction, verify_tm1,
    verify_tm3, verify_uniform_cross, SetExtremum,
};
pub use upsets::{count_upsets, enumerate_upsets, upset_masks, UpsetIter, MAX_UPSET_N};

use crate::error::{Error, Result};

/// Deterministic PRNG for sampled searches and property suites.
pub fn seeded_rng(seed: u64) -> SplitMix64 {
    SplitMix64::seed_from_u64(seed)
}

/// Search tuning shared by every verifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    pub workers: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { workers: 1 }
    }
}

impl SearchConfig {
    pub fn with_workers(workers: usize) -> Self {
        SearchConfig {
            workers: workers.max(1),
        }
    }
}

/// Sampling parameters for searches too large to run exhaustively.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sampling {
    pub trials: u64,
    pub seed: u64,
}

/// How a verifier explores its candidate space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    Exhaustive,
    Sampled(Sampling),
}

/// A bitset family compared by its ascending member list, which is the
/// order of its canonical serialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LexFamily(pub u64);

impl Ord for LexFamily {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (self.0, other.0);
        if a == b {
            return Ordering::Equal;
        }
        let p = (a ^ b).trailing_zeros();
        let a_holds = a >> p & 1 == 1;
        let other = if a_holds { b } else { a };
        // the lists agree below p; the one lacking p either stops there (a
        // prefix, hence smaller) or continues with something above p
        let holder_smaller = other >> p != 0;
        if holder_smaller == a_holds {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}

impl PartialOrd for LexFamily {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Ascending member positions of a bitset family.
pub(crate) fn bit_positions(bits: u64) -> impl Iterator<Item = u32> {
    (0..64u32).filter(move |i| bits >> i & 1 == 1)
}

/// Number of tied witnesses retained per search.
pub const MAX_RETAINED_TIES: usize = 256;

/// Running maximum with every tied witness counted and the least ones kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Best<V, W = LexFamily> {
    pub value: Option<V>,
    pub ties: Vec<W>,
    pub tie_count: u64,
}

impl<V: Ord + Clone, W: Ord> Default for Best<V, W> {
    fn default() -> Self {
        Best {
            value: None,
            ties: Vec::new(),
            tie_count: 0,
        }
    }
}

impl<V: Ord + Clone, W: Ord> Best<V, W> {
    pub fn offer(&mut self, value: V, witness: W) {
        match self.value.as_ref().map(|v| value.cmp(v)) {
            Some(Ordering::Less) => {}
            Some(Ordering::Equal) => {
                self.tie_count += 1;
                self.push_tie(witness);
            }
            _ => {
                self.value = Some(value);
                self.ties = vec![witness];
                self.tie_count = 1;
            }
        }
    }

    fn push_tie(&mut self, w: W) {
        if self.ties.len() < MAX_RETAINED_TIES || w < *self.ties.last().expect("nonempty") {
            let pos = self.ties.binary_search(&w).unwrap_or_else(|e| e);
            self.ties.insert(pos, w);
            self.ties.truncate(MAX_RETAINED_TIES);
        }
    }

    pub fn merge(mut self, other: Self) -> Self {
        match (&self.value, &other.value) {
            (_, None) => self,
            (None, _) => other,
            (Some(a), Some(b)) => match a.cmp(b) {
                Ordering::Greater => self,
                Ordering::Less => other,
                Ordering::Equal => {
                    self.tie_count += other.tie_count;
                    for w in other.ties {
                        self.push_tie(w);
                    }
                    self
                }
            },
        }
    }

    /// Least tied witness.
    pub fn witness(&self) -> Option<&W> {
        self.ties.first()
    }
}

impl<V> Best<V> {
    pub(crate) fn tie_bits(&self) -> impl Iterator<Item = u64> + '_ {
        self.ties.iter().map(|w| w.0)
    }
}

/// `{s : f ⊆ compat[s]}`: the points compatible with every member of `f`.
pub(crate) fn dual_bits(f: u64, compat: &[u64]) -> u64 {
    compat
        .iter()
        .enumerate()
        .filter(|(_, &c)| f & !c == 0)
        .fold(0, |acc, (s, _)| acc | 1 << s)
}

/// Maximizes `score` over candidates `0..count` (as fed through `candidate`)
/// on `workers` threads.
pub(crate) fn best_over<V, C, S>(count: u64, workers: usize, candidate: C, score: S) -> Result<Best<V>>
where
    V: Ord + Clone + Send,
    C: Fn(u64) -> u64 + Sync,
    S: Fn(u64) -> Option<V> + Sync,
{
    let fold = |mut best: Best<V>, i: u64| {
        let c = candidate(i);
        if let Some(v) = score(c) {
            best.offer(v, LexFamily(c));
        }
        best
    };
    if workers <= 1 {
        return Ok((0..count).fold(Best::default(), fold));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::scale(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(|| {
        (0..count)
            .into_par_iter()
            .fold(Best::default, fold)
            .reduce(Best::default, Best::merge)
    }))
}
