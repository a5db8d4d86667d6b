//! Seeded property suites for the shift lemmas, the correlation
//! inequality, and up-set enumeration, plus the desk grid that runs every
//! verifier and suite in one pass.

use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::Rng;
use rand_xoshiro::SplitMix64;
use serde_json::{json, Value};

use super::report::{Quantity, TheoremId, VerificationReport};
use super::seqs::verify_af;
use super::{
    count_upsets, seeded_rng, upset_masks, verify_daykin, verify_katona_single, verify_le3_reduction,
    verify_tm1, verify_tm2, verify_tm3, verify_tm4, verify_uniform_cross, SearchConfig, SearchMode,
};
use crate::arith::Rational;
use crate::error::Result;
use crate::io::{seq_family_to_value, set_family_to_value};
use crate::seqfam::{correlation_check, SeqFamily, SeqSpace, SymbolSet, ThresholdVector};
use crate::setfam::{full_mask, SetFamily};
use crate::shift::{
    check_layer_sandwich, level_shifts, shift_ab, stabilize_pair, stabilize_pair_through, ShiftSpec,
};

/// Trial counts and outcome counters of one property suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteTally {
    pub id: TheoremId,
    pub trials: u64,
    pub seed: u64,
    pub violations: u64,
    /// Named event counts, e.g. how often a shift changed the family.
    pub counters: BTreeMap<String, u64>,
    /// The first failing trial, if any.
    pub first_violation: Option<Value>,
}

impl SuiteTally {
    fn new(id: TheoremId, trials: u64, seed: u64) -> Self {
        SuiteTally {
            id,
            trials,
            seed,
            violations: 0,
            counters: BTreeMap::new(),
            first_violation: None,
        }
    }

    fn bump(&mut self, name: &str) {
        *self.counters.entry(name.to_string()).or_default() += 1;
    }

    pub fn count(&self, name: &str) -> u64 {
        self.counters.get(name).copied().unwrap_or(0)
    }

    fn violation(&mut self, detail: impl FnOnce() -> Value) {
        self.violations += 1;
        if self.first_violation.is_none() {
            self.first_violation = Some(detail());
        }
    }

    /// A report whose extremum is the violation count and whose bound is 0.
    pub fn to_report(&self) -> VerificationReport {
        let params: Vec<(&str, String)> = self.counters.iter().map(|(k, v)| (k.as_str(), v.to_string())).collect();
        let witnesses = self.first_violation.iter().cloned().collect();
        VerificationReport::new(self.id, &params, Quantity::Integer(self.violations as u128), Quantity::Integer(0))
            .with_witnesses(witnesses, self.violations)
            .sampled(self.trials, self.seed)
            .searching("seeded random trials; extremum counts violated trials")
    }
}

/// A family on `[n]` with each set present independently with probability
/// `1/2`.
fn random_family(rng: &mut SplitMix64, n: usize) -> SetFamily {
    SetFamily::from_masks(n, (0..=full_mask(n)).filter(|_| rng.gen_bool(0.5))).expect("masks lie in [n]")
}

/// Disjoint `A`, `B` in `[n]` with `|B| > |A|`, `n >= 1`.
fn random_shift(rng: &mut SplitMix64, n: usize) -> ShiftSpec {
    let b_size = rng.gen_range(1..=n);
    let a_size = rng.gen_range(0..b_size.min(n - b_size + 1));
    let picked = sample(rng, n, a_size + b_size).into_vec();
    let mask = |ix: &[usize]| ix.iter().fold(0u32, |acc, &i| acc | 1 << i);
    ShiftSpec::new(mask(&picked[..a_size]), mask(&picked[a_size..])).expect("disjoint by construction")
}

/// Measure monotonicity of `(A,B)`-shifts with `|B| > |A|`: never lower,
/// strictly higher exactly when `p > 1/2` and the family changed.
pub fn le4_suite(trials: u64, seed: u64) -> Result<SuiteTally> {
    let mut rng = seeded_rng(seed);
    let biases = [Rational::new(1, 2)?, Rational::new(2, 3)?, Rational::new(3, 4)?];
    let mut tally = SuiteTally::new(TheoremId::LE4, trials, seed);
    for _ in 0..trials {
        let n = rng.gen_range(1..=8);
        let family = random_family(&mut rng, n);
        let spec = random_shift(&mut rng, n);
        let p = &biases[rng.gen_range(0..biases.len())];
        let shifted = shift_ab(&family, &spec)?;
        let before = family.measure(p)?;
        let after = shifted.measure(p)?;
        let changed = shifted != family;
        let half = p == &biases[0];
        let expect_strict = changed && !half;
        let strict = after > before;
        if changed {
            tally.bump("changed");
        }
        if strict {
            tally.bump("strict");
        }
        if after < before || strict != expect_strict {
            tally.violation(|| {
                json!({
                    "family": set_family_to_value(&family),
                    "A": crate::setfam::elements_of(spec.a()),
                    "B": crate::setfam::elements_of(spec.b()),
                    "p": p.to_string(),
                })
            });
        }
    }
    Ok(tally)
}

/// A random nonempty cross `t`-intersecting pair on `[n]`, or `None` when
/// the sampled first family has an empty partner.
fn random_cross_pair(rng: &mut SplitMix64, n: usize, t: usize) -> Option<(SetFamily, SetFamily)> {
    let wide: Vec<u32> = (0..=full_mask(n)).filter(|s| s.count_ones() as usize >= t).collect();
    let size = rng.gen_range(1..=3usize.min(wide.len()));
    let seed = SetFamily::from_masks(n, sample(rng, wide.len(), size).into_iter().map(|i| wide[i])).ok()?;
    let partner = seed.t_dual(t);
    let f2: Vec<u32> = partner.iter().filter(|_| rng.gen_bool(0.5)).collect();
    let f2 = if f2.is_empty() {
        vec![*partner.members().first()?]
    } else {
        f2
    };
    let f2 = SetFamily::from_masks(n, f2).ok()?;
    let f1: Vec<u32> = f2.t_dual(t).iter().filter(|_| rng.gen_bool(0.5)).chain(seed.iter()).collect();
    Some((SetFamily::from_masks(n, f1).ok()?, f2))
}

/// Joint stabilization of random cross `t`-intersecting pairs (`n <= 6`,
/// `t <= 3`): cross intersection survives single shifts on pairs stable
/// below the shift level and the full schedule; stable outputs have member
/// size sums at least `n + t - 1` and the layer sandwich shape; traces
/// strictly raise a potential bounded by `2n 2^n`.
pub fn le5_suite(trials: u64, seed: u64) -> Result<SuiteTally> {
    let mut rng = seeded_rng(seed);
    let mut tally = SuiteTally::new(TheoremId::LE5, trials, seed);
    let mut done = 0;
    while done < trials {
        let n = rng.gen_range(1..=6);
        let t = rng.gen_range(1..=3usize.min(n));
        let Some((f1, f2)) = random_cross_pair(&mut rng, n, t) else {
            continue;
        };
        done += 1;
        let pair = || json!([set_family_to_value(&f1), set_family_to_value(&f2), {"t": t}]);

        // one shift at level k on a pair stable below k
        let k = rng.gen_range(0..=3usize.min((n - 1) / 2));
        let (g1, g2) = if k == 0 {
            (f1.clone(), f2.clone())
        } else {
            let (g1, g2, _) = stabilize_pair_through(&f1, &f2, t, k - 1)?;
            (g1, g2)
        };
        let specs = level_shifts(n, k);
        let spec = &specs[rng.gen_range(0..specs.len())];
        if !shift_ab(&g1, spec)?.is_cross_t_intersecting(&shift_ab(&g2, spec)?, t)? {
            tally.violation(pair);
            continue;
        }

        let (s1, s2, trace) = stabilize_pair(&f1, &f2, t)?;
        if !trace.steps.is_empty() {
            tally.bump("shifted");
        }
        let cap = 2 * n as u64 * (1u64 << n);
        let ok = s1.is_cross_t_intersecting(&s2, t)?
            && s1.iter().all(|a| s2.iter().all(|b| (a.count_ones() + b.count_ones()) as usize + 1 >= n + t))
            && check_layer_sandwich(&s1)?
            && check_layer_sandwich(&s2)?
            && trace.potential_strictly_increases()
            && trace.final_potential <= cap;
        if !ok {
            tally.violation(pair);
        }
    }
    Ok(tally)
}

/// `|H1 ∩ H2| m^n <= |H1| |H2|` for random `P`-complete `H1` and
/// `Q`-complete `H2` with disjoint nonempty `P`, `Q` (`m, n <= 3`).
pub fn ad1_suite(trials: u64, seed: u64) -> Result<SuiteTally> {
    let mut rng = seeded_rng(seed);
    let mut tally = SuiteTally::new(TheoremId::AD1, trials, seed);
    for _ in 0..trials {
        let m = rng.gen_range(2..=3);
        let n = rng.gen_range(1..=3);
        let space = SeqSpace::new(m, n)?;
        // a random nonempty proper P, then a nonempty Q outside it
        let p_mask = rng.gen_range(1..(1u32 << m) - 1);
        let rest = !p_mask & ((1 << m) - 1);
        let q_mask = loop {
            let q = rng.gen_range(1..=rest);
            if q & !rest == 0 {
                break q;
            }
        };
        let symbols = |mask: u32| (1..=m).filter(|&s| mask >> (s - 1) & 1 == 1).collect::<Vec<_>>();
        let p = SymbolSet::new(m, &symbols(p_mask))?;
        let q = SymbolSet::new(m, &symbols(q_mask))?;
        let density = rng.gen_range(0.05..0.6);
        let pick = |rng: &mut SplitMix64| {
            SeqFamily::from_indices(space.clone(), (0..space.size()).filter(|_| rng.gen_bool(density)))
        };
        let h1 = pick(&mut rng)?.p_complete_closure(&p)?;
        let h2 = pick(&mut rng)?.p_complete_closure(&q)?;
        if !h1.is_empty() && !h2.is_empty() && h1.len() < space.size() && h2.len() < space.size() {
            tally.bump("nontrivial");
        }
        if !correlation_check(&h1, &h2, &p, &q)? {
            tally.violation(|| {
                json!({
                    "H1": seq_family_to_value(&h1),
                    "H2": seq_family_to_value(&h2),
                    "P": p.symbols(),
                    "Q": q.symbols(),
                })
            });
        }
    }
    Ok(tally)
}

/// Up-set counts for `n = 1..=5`: the recursive counts against full scans
/// of all `2^(2^n)` families for `n <= 4`, and at `n = 5` against the same
/// construction read through a relabeled ground set.
pub fn upset_suite() -> Result<SuiteTally> {
    const EXPECTED: [u64; 5] = [3, 6, 20, 168, 7581];
    let mut tally = SuiteTally::new(TheoremId::UPSETS, 5, 0);
    for n in 1..=5usize {
        let count = count_upsets(n)?;
        tally.counters.insert(format!("n{n}"), count);
        let cross_checked = if n <= 4 {
            full_scan_count(n) == count
        } else {
            relabeled_matches(n)?
        };
        if count != EXPECTED[n - 1] || !cross_checked {
            tally.violation(|| json!({"n": n, "count": count}));
        }
    }
    Ok(tally)
}

fn full_scan_count(n: usize) -> u64 {
    let cube = 1u32 << n;
    (0..1u64 << cube)
        .filter(|&fam| {
            (0..cube)
                .filter(|s| fam >> s & 1 == 1)
                .all(|s| (0..n).all(|i| fam >> (s | 1 << i) & 1 == 1))
        })
        .count() as u64
}

/// Relabels every up-set through the cyclic shift `i -> i+1 mod n` and
/// checks the relabeled list is the same set of up-sets.
fn relabeled_matches(n: usize) -> Result<bool> {
    let forward = upset_masks(n)?;
    let rotate = |s: u32| ((s << 1) | (s >> (n - 1))) & full_mask(n);
    let mut moved: Vec<u64> = forward
        .iter()
        .map(|&u| super::bit_positions(u).fold(0u64, |acc, s| acc | 1 << rotate(s)))
        .collect();
    let mut sorted = forward;
    sorted.sort_unstable();
    moved.sort_unstable();
    moved.dedup();
    Ok(moved == sorted)
}

/// Seeds of the randomized parts of the desk grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeskSeeds {
    pub le4: u64,
    pub le5: u64,
    pub ad1: u64,
}

impl Default for DeskSeeds {
    fn default() -> Self {
        DeskSeeds {
            le4: 0x5eed_0004,
            le5: 0x5eed_0005,
            ad1: 0x5eed_00ad,
        }
    }
}

impl DeskSeeds {
    /// Derives all three seeds from one.
    pub fn from_seed(seed: u64) -> Self {
        let mut rng = seeded_rng(seed);
        DeskSeeds {
            le4: rng.gen(),
            le5: rng.gen(),
            ad1: rng.gen(),
        }
    }
}

fn r(a: u64, b: u64) -> Rational {
    Rational::new(a, b).expect("nonzero denominator")
}

/// The tm1 grid biases for threshold `t`: `1/8, 1/6, 1/5, 1/(t+2)`.
pub fn tm1_biases(t: usize) -> Vec<Rational> {
    let mut ps = vec![r(1, 8), r(1, 6), r(1, 5), r(1, t as u64 + 2)];
    ps.dedup();
    ps
}

/// `(m, n, t)` with `m^n <= 16`, `n <= 5`, `n >= t >= 1`, `m >= t + 1`.
pub fn le3_grid() -> Vec<(usize, usize, usize)> {
    let mut grid = Vec::new();
    for m in 2..=16usize {
        for n in 1..=5usize {
            if m.pow(n as u32) > 16 {
                break;
            }
            for t in 1..=n.min(m - 1) {
                grid.push((m, n, t));
            }
        }
    }
    grid
}

/// Every verifier and property suite at desk scale, in a fixed order.
pub fn desk_suite(cfg: &SearchConfig, seeds: DeskSeeds) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    for t in [1usize, 3] {
        for n in t..=5 {
            let ps = tm1_biases(t);
            for p1 in &ps {
                for p2 in &ps {
                    out.push(verify_tm1(n, t, p1, p2, cfg)?);
                }
            }
        }
    }
    for n in 1..=5 {
        for t in 1..=n {
            for p in [r(1, 2), r(2, 3), r(3, 4)] {
                out.push(verify_tm3(n, t, &p, cfg)?);
            }
        }
    }
    for (m, n, t) in [(3, 2, 1), (4, 2, 1), (4, 2, 2)] {
        out.push(verify_tm2(m, n, t, SearchMode::Exhaustive, cfg)?);
    }
    for (m, n, t) in [(3usize, 2usize, vec![1, 1, 0]), (2, 3, vec![1, 1]), (2, 4, vec![1, 1])] {
        out.push(verify_tm4(m, n, &ThresholdVector::new(t), SearchMode::Exhaustive, cfg)?);
    }
    for (m, n, t) in [(3, 2, 1), (4, 2, 2)] {
        out.push(verify_af(m, n, t, cfg)?);
    }
    for n in 1..=5 {
        for t in 1..=n {
            out.push(verify_katona_single(n, t, cfg)?);
        }
    }
    for (m, n, t) in le3_grid() {
        out.push(verify_le3_reduction(m, n, t, cfg)?);
    }
    out.push(le4_suite(10_000, seeds.le4)?.to_report());
    out.push(le5_suite(1_000, seeds.le5)?.to_report());
    out.push(ad1_suite(10_000, seeds.ad1)?.to_report());
    for (n, a, b) in [(4, 2, 2), (5, 2, 3)] {
        out.push(verify_daykin(n, a, b, cfg)?);
    }
    for n in [4, 5] {
        out.push(verify_uniform_cross(n, 3, 3, 3, SearchMode::Exhaustive, cfg)?);
    }
    out.push(upset_suite()?.to_report());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_shifts_are_valid() {
        let mut rng = seeded_rng(1);
        for _ in 0..500 {
            let n = rng.gen_range(1..=8);
            let s = random_shift(&mut rng, n);
            assert!(s.b().count_ones() > s.a().count_ones());
            assert_eq!(s.a() & s.b(), 0);
            assert!(s.a() | s.b() <= full_mask(n));
        }
    }

    #[test]
    fn random_pairs_are_cross_intersecting() {
        let mut rng = seeded_rng(2);
        let mut made = 0;
        for _ in 0..300 {
            let n = rng.gen_range(1..=6);
            let t = rng.gen_range(1..=3usize.min(n));
            if let Some((a, b)) = random_cross_pair(&mut rng, n, t) {
                assert!(!a.is_empty() && !b.is_empty());
                assert!(a.is_cross_t_intersecting(&b, t).unwrap());
                made += 1;
            }
        }
        assert!(made > 250);
    }

    #[test]
    fn small_suites_pass_and_exercise_both_sides() {
        let le4 = le4_suite(500, 9).unwrap();
        assert_eq!(le4.violations, 0);
        assert!(le4.count("strict") > 0 && le4.count("changed") > le4.count("strict"));
        let le5 = le5_suite(100, 9).unwrap();
        assert_eq!(le5.violations, 0);
        assert!(le5.count("shifted") > 0);
        let ad1 = ad1_suite(500, 9).unwrap();
        assert_eq!(ad1.violations, 0);
        assert!(ad1.count("nontrivial") > 0);
    }

    #[test]
    fn suites_are_reproducible() {
        assert_eq!(le4_suite(200, 5).unwrap(), le4_suite(200, 5).unwrap());
        assert_eq!(ad1_suite(200, 5).unwrap().to_report(), ad1_suite(200, 5).unwrap().to_report());
    }

    #[test]
    fn grids() {
        assert_eq!(tm1_biases(1).len(), 4);
        assert_eq!(tm1_biases(3), vec![r(1, 8), r(1, 6), r(1, 5)]);
        let grid = le3_grid();
        assert!(grid.contains(&(3, 2, 1)) && grid.contains(&(2, 4, 1)) && grid.contains(&(16, 1, 1)));
        assert!(!grid.contains(&(2, 2, 2)) && !grid.contains(&(5, 2, 1)));
    }
}
