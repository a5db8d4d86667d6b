//! Set-family verifiers. Pair searches run `F1` over up-sets with
//! `F2 = t_dual(F1)`: closing a cross t-intersecting pair upward keeps it
//! cross t-intersecting without lowering any measure, and the dual is the
//! largest partner, so this covers the maximum.

use num_bigint::BigInt;
use rand::seq::index::sample;
use rand::Rng;
use serde_json::Value;

use super::report::{Quantity, Regime, TheoremId, VerificationReport};
use super::seqs::seq_extremum;
use super::{best_over, bit_positions, dual_bits, seeded_rng, upset_masks, Best, SearchConfig, SearchMode};
use crate::arith::{binomial, compare, Rational};
use crate::error::{Error, Result};
use crate::io::{seq_family_to_value, set_family_to_value};
use crate::seqfam::Requirement;
use crate::setfam::{full_mask, katona_count, katona_family, SetFamily};

const UPSET_SPACE: &str = "up-sets F1 on [n] with F2 = t_dual(F1, t)";

/// Largest `n` for exhaustive set-pair searches.
const MAX_PAIR_N: usize = 5;

/// Largest layer handled exhaustively by the uniform searches.
const MAX_EXHAUSTIVE_LAYER: u64 = 16;

/// Largest layer handled by the sampled uniform search.
const MAX_SAMPLED_LAYER: u64 = 1 << 12;

/// A maximizing set-family pair and every pair tied with it.
#[derive(Debug, Clone, PartialEq)]
pub struct SetExtremum {
    pub value: Rational,
    /// Least tied pairs, ordered by their first family.
    pub witnesses: Vec<(SetFamily, SetFamily)>,
    pub tie_count: u64,
}

/// `compat[s]` = subsets `f` of `[n]` with `|s ∩ f| >= t`.
fn cube_compat(n: usize, t: usize) -> Vec<u64> {
    let size = 1u32 << n;
    (0..size)
        .map(|s| {
            (0..size)
                .filter(|&f| (s & f).count_ones() as usize >= t)
                .fold(0u64, |acc, f| acc | 1 << f)
        })
        .collect()
}

/// `p`-biased measure scaled by `d^n` for `p = a/d`: integer weight
/// `a^k (d-a)^(n-k)` per `k`-set.
struct ScaledMeasure {
    layers: Vec<u64>,
    weights: Vec<BigInt>,
    den: BigInt,
}

impl ScaledMeasure {
    fn new(n: usize, p: &Rational) -> Self {
        let a = p.numer().clone();
        let d = p.denom().clone();
        let b = &d - &a;
        let layers = (0..=n)
            .map(|k| {
                (0..1u32 << n)
                    .filter(|s| s.count_ones() as usize == k)
                    .fold(0u64, |acc, s| acc | 1 << s)
            })
            .collect();
        let weights = (0..=n)
            .map(|k| num_traits::pow(a.clone(), k) * num_traits::pow(b.clone(), n - k))
            .collect();
        ScaledMeasure {
            layers,
            weights,
            den: num_traits::pow(d, n),
        }
    }

    fn numerator(&self, bits: u64) -> BigInt {
        self.layers
            .iter()
            .zip(&self.weights)
            .map(|(&layer, w)| w * (bits & layer).count_ones())
            .sum()
    }
}

fn check_pair_scale(n: usize, t: usize) -> Result<()> {
    if t == 0 || t > n {
        return Err(Error::hypothesis(format!("need n >= t >= 1, got n = {n}, t = {t}")));
    }
    if n > MAX_PAIR_N {
        return Err(Error::scale(format!("exhaustive set searches need n <= {MAX_PAIR_N}, got {n}")));
    }
    Ok(())
}

fn check_open_unit(p: &Rational) -> Result<()> {
    if p.is_open_unit() {
        Ok(())
    } else {
        Err(Error::ProbabilityOutOfRange(p.to_string()))
    }
}

fn family(n: usize, bits: u64) -> SetFamily {
    SetFamily::from_masks(n, bit_positions(bits)).expect("bitset family lives on [n]")
}

fn pair_value(f1: &SetFamily, f2: &SetFamily) -> Value {
    Value::Array(vec![set_family_to_value(f1), set_family_to_value(f2)])
}

/// Runs `score(F1, t_dual(F1))` over the given up-sets.
fn upset_pair_search<V, S>(upsets: &[u64], compat: &[u64], cfg: &SearchConfig, score: S) -> Result<Best<V>>
where
    V: Ord + Clone + Send,
    S: Fn(u64, u64) -> Option<V> + Sync,
{
    best_over(
        upsets.len() as u64,
        cfg.workers,
        |i| upsets[i as usize],
        |f1| score(f1, dual_bits(f1, compat)),
    )
}

fn pair_extremum(n: usize, compat: &[u64], best: &Best<BigInt>, den: &BigInt) -> SetExtremum {
    let value = best.value.clone().unwrap_or_default();
    SetExtremum {
        value: Rational::new(value, den.clone()).expect("nonzero denominator"),
        witnesses: best
            .tie_bits()
            .map(|f1| (family(n, f1), family(n, dual_bits(f1, compat))))
            .collect(),
        tie_count: best.tie_count,
    }
}

fn tm1_search(
    n: usize,
    t: usize,
    p1: &Rational,
    p2: &Rational,
    upsets: &[u64],
    cfg: &SearchConfig,
) -> Result<SetExtremum> {
    let compat = cube_compat(n, t);
    let (m1, m2) = (ScaledMeasure::new(n, p1), ScaledMeasure::new(n, p2));
    let best = upset_pair_search(upsets, &compat, cfg, |f1, f2| Some(m1.numerator(f1) * m2.numerator(f2)))?;
    Ok(pair_extremum(n, &compat, &best, &(&m1.den * &m2.den)))
}

/// `max mu_p1(F1) mu_p2(F2)` over cross `t`-intersecting pairs on `[n]`.
pub fn tm1_extremum(n: usize, t: usize, p1: &Rational, p2: &Rational, cfg: &SearchConfig) -> Result<SetExtremum> {
    check_pair_scale(n, t)?;
    check_open_unit(p1)?;
    check_open_unit(p2)?;
    tm1_search(n, t, p1, p2, &upset_masks(n)?, cfg)
}

fn tm3_search(n: usize, t: usize, p: &Rational, upsets: &[u64], cfg: &SearchConfig) -> Result<SetExtremum> {
    let compat = cube_compat(n, t);
    let mu = ScaledMeasure::new(n, p);
    let best = upset_pair_search(upsets, &compat, cfg, |f1, f2| {
        Some(mu.numerator(f1).min(mu.numerator(f2)))
    })?;
    Ok(pair_extremum(n, &compat, &best, &mu.den))
}

/// `max min(mu_p(F1), mu_p(F2))` over cross `t`-intersecting pairs on `[n]`.
pub fn tm3_extremum(n: usize, t: usize, p: &Rational, cfg: &SearchConfig) -> Result<SetExtremum> {
    check_pair_scale(n, t)?;
    check_open_unit(p)?;
    tm3_search(n, t, p, &upset_masks(n)?, cfg)
}

fn pair_report(id: TheoremId, params: &[(&str, String)], ext: SetExtremum, bound: Rational) -> VerificationReport {
    let witnesses = ext.witnesses.iter().map(|(a, b)| pair_value(a, b)).collect();
    VerificationReport::new(id, params, ext.value.into(), bound.into())
        .with_witnesses(witnesses, ext.tie_count)
        .searching(UPSET_SPACE)
}

/// Products with `t = 2`, unequal biases, and a bias at or above `50/169`
/// are beyond the proven range.
fn tm1_regime(t: usize, p1: &Rational, p2: &Rational) -> Regime {
    let proven_cap = Rational::new(50, 169).expect("nonzero denominator");
    let top = if compare(p1, p2).is_ge() { p1 } else { p2 };
    if t == 2 && p1 != p2 && compare(top, &proven_cap).is_ge() {
        Regime::Conjectural
    } else {
        Regime::Proven
    }
}

pub fn verify_tm1(n: usize, t: usize, p1: &Rational, p2: &Rational, cfg: &SearchConfig) -> Result<VerificationReport> {
    check_pair_scale(n, t)?;
    let cap = Rational::new(1, t as u64 + 1)?;
    for p in [p1, p2] {
        check_open_unit(p)?;
        if compare(p, &cap).is_ge() {
            return Err(Error::hypothesis(format!("p = {p} must be below 1/(t+1) = {cap}")));
        }
    }
    let ext = tm1_search(n, t, p1, p2, &upset_masks(n)?, cfg)?;
    let bound = (p1 * p2).pow(t as u32);
    let params = [("n", n.to_string()), ("t", t.to_string()), ("p1", p1.to_string()), ("p2", p2.to_string())];
    Ok(pair_report(TheoremId::TM1, &params, ext, bound).in_regime(tm1_regime(t, p1, p2)))
}

pub fn verify_tm3(n: usize, t: usize, p: &Rational, cfg: &SearchConfig) -> Result<VerificationReport> {
    check_pair_scale(n, t)?;
    check_open_unit(p)?;
    let half = Rational::new(1, 2)?;
    if compare(p, &half).is_lt() {
        return Err(Error::hypothesis(format!("p = {p} must be at least 1/2")));
    }
    let ext = tm3_search(n, t, p, &upset_masks(n)?, cfg)?;
    let bound = katona_family(n, t)?.measure(p)?;
    let params = [("n", n.to_string()), ("t", t.to_string()), ("p", p.to_string())];
    Ok(pair_report(TheoremId::TM3, &params, ext, bound))
}

/// Largest `t`-intersecting up-set on `[n]`, against `|K(n,t)|`.
pub fn verify_katona_single(n: usize, t: usize, cfg: &SearchConfig) -> Result<VerificationReport> {
    check_pair_scale(n, t)?;
    let compat = cube_compat(n, t);
    let upsets = upset_masks(n)?;
    let best = upset_pair_search(&upsets, &compat, cfg, |f, dual| {
        (f & !dual == 0).then(|| f.count_ones())
    })?;
    let witnesses = best.tie_bits().map(|f| set_family_to_value(&family(n, f))).collect();
    let params = [("n", n.to_string()), ("t", t.to_string())];
    let value = best.value.unwrap_or(0) as u128;
    Ok(
        VerificationReport::new(TheoremId::KATONA, &params, value.into(), (katona_count(n, t) as u128).into())
            .with_witnesses(witnesses, best.tie_count)
            .searching("t-intersecting up-sets F on [n] (F ⊆ t_dual(F, t))"),
    )
}

/// `k`-sets of `[n]` as ascending masks.
fn layer_masks(n: usize, k: usize) -> Vec<u32> {
    (0..=full_mask(n)).filter(|s| s.count_ones() as usize == k).collect()
}

fn layer_size(n: usize, k: usize) -> u64 {
    binomial(n as u32, k as u32)
}

fn layer_family(n: usize, masks: &[u32], bits: u64) -> SetFamily {
    SetFamily::from_masks(n, bit_positions(bits).map(|i| masks[i as usize])).expect("layer members live on [n]")
}

/// `compat[j]` = members `i` of `rows` with `|rows[i] ∩ cols[j]| >= t`, as a bitset.
fn layer_compat(rows: &[u32], cols: &[u32], t: usize) -> Vec<u64> {
    cols.iter()
        .map(|&c| {
            rows.iter()
                .enumerate()
                .filter(|(_, &r)| (r & c).count_ones() as usize >= t)
                .fold(0u64, |acc, (i, _)| acc | 1 << i)
        })
        .collect()
}

fn count_dual(a: u64, compat: &[u64]) -> u64 {
    compat.iter().filter(|&&c| a & !c == 0).count() as u64
}

fn check_mask_n(n: usize) -> Result<()> {
    if n > crate::setfam::MAX_N {
        return Err(Error::GroundSetSize {
            n,
            max: crate::setfam::MAX_N,
        });
    }
    Ok(())
}

/// `max |A| |B|` over cross `t`-intersecting `A` of `k`-sets and `B` of
/// `l`-sets, against `C(n-t, k-t) C(n-t, l-t)`.
pub fn verify_uniform_cross(
    n: usize,
    k: usize,
    l: usize,
    t: usize,
    mode: SearchMode,
    cfg: &SearchConfig,
) -> Result<VerificationReport> {
    if !(k >= l && l >= t && t >= 3) {
        return Err(Error::hypothesis(format!("need k >= l >= t >= 3, got k = {k}, l = {l}, t = {t}")));
    }
    if n < (t + 1) * (k - t + 1) {
        return Err(Error::hypothesis(format!(
            "need n >= (t+1)(k-t+1) = {}, got n = {n}",
            (t + 1) * (k - t + 1)
        )));
    }
    check_mask_n(n)?;
    let bound = layer_size(n - t, k - t) as u128 * layer_size(n - t, l - t) as u128;
    let params = [("n", n.to_string()), ("k", k.to_string()), ("l", l.to_string()), ("t", t.to_string())];
    match mode {
        SearchMode::Exhaustive => {
            if layer_size(n, k) > MAX_EXHAUSTIVE_LAYER {
                return Err(Error::scale(format!(
                    "exhaustive mode needs C(n,k) <= {MAX_EXHAUSTIVE_LAYER}, got C({n},{k}) = {}",
                    layer_size(n, k)
                )));
            }
            let rows = layer_masks(n, k);
            let cols = layer_masks(n, l);
            let compat = layer_compat(&rows, &cols, t);
            let best = best_over(1 << rows.len(), cfg.workers, |i| i, |a| {
                Some(a.count_ones() as u128 * count_dual(a, &compat) as u128)
            })?;
            let witnesses = best
                .tie_bits()
                .map(|a| {
                    let b = cols
                        .iter()
                        .zip(&compat)
                        .filter(|(_, &c)| a & !c == 0)
                        .map(|(&m, _)| m);
                    let b = SetFamily::from_masks(n, b).expect("layer members live on [n]");
                    pair_value(&layer_family(n, &rows, a), &b)
                })
                .collect();
            Ok(
                VerificationReport::new(TheoremId::LE1, &params, best.value.unwrap_or(0).into(), bound.into())
                    .with_witnesses(witnesses, best.tie_count)
                    .searching("all families A of k-sets with B = t_dual(A, t) restricted to l-sets"),
            )
        }
        SearchMode::Sampled(s) => {
            for j in [k, l] {
                if layer_size(n, j) > MAX_SAMPLED_LAYER {
                    return Err(Error::scale(format!(
                        "sampled mode needs C(n,{j}) <= {MAX_SAMPLED_LAYER}, got {}",
                        layer_size(n, j)
                    )));
                }
            }
            let rows = layer_masks(n, k);
            let cols = layer_masks(n, l);
            let duals = |from: &[u32], to: &[u32]| -> Vec<u32> {
                to.iter()
                    .copied()
                    .filter(|&y| from.iter().all(|&x| (x & y).count_ones() as usize >= t))
                    .collect()
            };
            let mut best: Best<u128, Vec<u32>> = Best::default();
            let mut offer = |seed: Vec<u32>| {
                let b = duals(&seed, &cols);
                let a = duals(&b, &rows);
                best.offer(a.len() as u128 * b.len() as u128, a);
            };
            // the star of k-sets through [t]
            let core = full_mask(t);
            offer(rows.iter().copied().filter(|&r| r & core == core).collect());
            let mut rng = seeded_rng(s.seed);
            for _ in 0..s.trials {
                let size = rng.gen_range(1..=3usize.min(rows.len()));
                let mut seed: Vec<u32> = sample(&mut rng, rows.len(), size).into_iter().map(|i| rows[i]).collect();
                seed.sort_unstable();
                offer(seed);
            }
            let witnesses = best
                .ties
                .iter()
                .map(|a| {
                    let fa = SetFamily::from_masks(n, a.iter().copied()).expect("layer members live on [n]");
                    let fb = SetFamily::from_masks(n, duals(a, &cols)).expect("layer members live on [n]");
                    pair_value(&fa, &fb)
                })
                .collect();
            Ok(
                VerificationReport::new(TheoremId::LE1, &params, best.value.unwrap_or(0).into(), bound.into())
                    .with_witnesses(witnesses, best.tie_count)
                    .sampled(s.trials, s.seed)
                    .searching("seeded random k-set seeds closed under double duality, plus the star through [t]"),
            )
        }
    }
}

/// Over families `A` of `a`-sets with `|A| >= C(n-1, a-1)`, the largest
/// intersecting partner among `b`-sets, against `C(n-1, b-1)`.
pub fn verify_daykin(n: usize, a: usize, b: usize, cfg: &SearchConfig) -> Result<VerificationReport> {
    if a == 0 || b == 0 || n < a + b {
        return Err(Error::hypothesis(format!("need a, b >= 1 and n >= a + b, got n = {n}, a = {a}, b = {b}")));
    }
    check_mask_n(n)?;
    if layer_size(n, a) > MAX_EXHAUSTIVE_LAYER {
        return Err(Error::scale(format!(
            "exhaustive mode needs C(n,a) <= {MAX_EXHAUSTIVE_LAYER}, got C({n},{a}) = {}",
            layer_size(n, a)
        )));
    }
    let rows = layer_masks(n, a);
    let cols = layer_masks(n, b);
    let compat = layer_compat(&rows, &cols, 1);
    let threshold = layer_size(n - 1, a - 1) as u32;
    let best = best_over(1 << rows.len(), cfg.workers, |i| i, |fa| {
        (fa.count_ones() >= threshold).then(|| count_dual(fa, &compat) as u128)
    })?;
    let witnesses = best
        .tie_bits()
        .map(|fa| {
            let fb = cols.iter().zip(&compat).filter(|(_, &c)| fa & !c == 0).map(|(&m, _)| m);
            let fb = SetFamily::from_masks(n, fb).expect("layer members live on [n]");
            pair_value(&layer_family(n, &rows, fa), &fb)
        })
        .collect();
    let params = [("n", n.to_string()), ("a", a.to_string()), ("b", b.to_string())];
    let bound = layer_size(n - 1, b - 1) as u128;
    Ok(
        VerificationReport::new(TheoremId::LE8, &params, best.value.unwrap_or(0).into(), bound.into())
            .with_witnesses(witnesses, best.tie_count)
            .searching("families A of a-sets with |A| >= C(n-1,a-1), B = t_dual(A, 1) restricted to b-sets"),
    )
}

/// Compares the sequence extremum on `[m]^n` with `m^(2n)` times the
/// `mu_(1/m)` product extremum of set pairs on `[n]`.
pub fn verify_le3_reduction(m: usize, n: usize, t: usize, cfg: &SearchConfig) -> Result<VerificationReport> {
    check_pair_scale(n, t)?;
    if m < t + 1 {
        return Err(Error::hypothesis(format!("need m >= t + 1, got m = {m}, t = {t}")));
    }
    let seqs = seq_extremum(m, n, &Requirement::Total(t), SearchMode::Exhaustive, cfg)?;
    let p = Rational::new(1, m as u64)?;
    let sets = tm1_search(n, t, &p, &p, &upset_masks(n)?, cfg)?;
    let scale = Rational::from_integer(m as u64).pow(2 * n as u32);
    let rhs = &scale * &sets.value;
    let mut witness = serde_json::Map::new();
    if let Some((h1, h2)) = seqs.witnesses.first() {
        witness.insert(
            "sequences".into(),
            Value::Array(vec![seq_family_to_value(h1), seq_family_to_value(h2)]),
        );
    }
    if let Some((f1, f2)) = sets.witnesses.first() {
        witness.insert("sets".into(), pair_value(f1, f2));
    }
    let params = [("m", m.to_string()), ("n", n.to_string()), ("t", t.to_string())];
    Ok(
        VerificationReport::new(TheoremId::LE3, &params, Quantity::Integer(seqs.value), rhs.into())
            .with_witnesses(vec![Value::Object(witness)], seqs.tie_count)
            .searching("all sequence families H1 with H2 = dual(H1); up-sets F1 with F2 = t_dual(F1, t)"),
    )
}
