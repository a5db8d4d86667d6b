//! Sequence-family verifiers over `[m]^n` with at most 27 points, so a
//! family is a `u64` over base-`m` indices.

use rand::seq::index::sample;
use rand::Rng;
use serde_json::Value;

use super::report::{Regime, TheoremId, VerificationReport};
use super::{best_over, bit_positions, dual_bits, seeded_rng, SearchConfig, SearchMode};
use crate::error::{Error, Result};
use crate::io::seq_family_to_value;
use crate::seqfam::{Requirement, SeqFamily, SeqSpace, ThresholdVector};

/// Largest `m^n` searched exhaustively.
pub const MAX_EXHAUSTIVE_POINTS: usize = 16;

/// Largest `m^n` searched by sampling.
pub const MAX_SAMPLED_POINTS: usize = 27;

/// A maximizing pair `(H1, dual(H1))` and every pair tied with it.
#[derive(Debug, Clone, PartialEq)]
pub struct SeqExtremum {
    pub value: u128,
    pub witnesses: Vec<(SeqFamily, SeqFamily)>,
    pub tie_count: u64,
}

fn seq_compat(space: &SeqSpace, req: &Requirement) -> Vec<u64> {
    (0..space.size())
        .map(|y| {
            (0..space.size())
                .filter(|&x| space.meets(x, y, req))
                .fold(0u64, |acc, x| acc | 1 << x)
        })
        .collect()
}

fn family(space: &SeqSpace, bits: u64) -> SeqFamily {
    SeqFamily::from_indices(space.clone(), bit_positions(bits).map(|i| i as usize)).expect("index lies in the space")
}

fn check_points(space: &SeqSpace, mode: &SearchMode) -> Result<()> {
    let (cap, what) = match mode {
        SearchMode::Exhaustive => (MAX_EXHAUSTIVE_POINTS, "exhaustive"),
        SearchMode::Sampled(_) => (MAX_SAMPLED_POINTS, "sampled"),
    };
    if space.size() > cap {
        return Err(Error::scale(format!(
            "{what} mode needs m^n <= {cap}, got {}^{} = {}",
            space.m(),
            space.n(),
            space.size()
        )));
    }
    Ok(())
}

/// The cylinder pinning the first coordinates: `t` ones for a total
/// requirement, or `t_1` ones, then `t_2` twos, and so on.
fn pinned_cylinder(space: &SeqSpace, req: &Requirement) -> u64 {
    let pins: Vec<usize> = match req {
        Requirement::Total(t) => vec![1; *t],
        Requirement::PerSymbol(tv) => tv
            .as_slice()
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| std::iter::repeat(i + 1).take(c))
            .collect(),
    };
    (0..space.size())
        .filter(|&x| pins.iter().enumerate().all(|(i, &v)| space.digit(x, i) == v))
        .fold(0u64, |acc, x| acc | 1 << x)
}

/// `max |H1| |H2|` over cross-intersecting pairs in `[m]^n` under `req`.
pub fn seq_extremum(
    m: usize,
    n: usize,
    req: &Requirement,
    mode: SearchMode,
    cfg: &SearchConfig,
) -> Result<SeqExtremum> {
    let space = SeqSpace::new(m, n)?;
    space.check_requirement(req)?;
    check_points(&space, &mode)?;
    let compat = seq_compat(&space, req);
    let score = |h1: u64| Some(h1.count_ones() as u128 * dual_bits(h1, &compat).count_ones() as u128);
    let best = match mode {
        SearchMode::Exhaustive => best_over(1 << space.size(), cfg.workers, |i| i, score)?,
        SearchMode::Sampled(s) => {
            let mut candidates = vec![pinned_cylinder(&space, req)];
            let mut rng = seeded_rng(s.seed);
            for _ in 0..s.trials {
                let size = rng.gen_range(1..=3usize.min(space.size()));
                let seed = sample(&mut rng, space.size(), size)
                    .into_iter()
                    .fold(0u64, |acc, x| acc | 1 << x);
                candidates.push(dual_bits(dual_bits(seed, &compat), &compat));
            }
            best_over(candidates.len() as u64, cfg.workers, |i| candidates[i as usize], score)?
        }
    };
    Ok(SeqExtremum {
        value: best.value.unwrap_or(0),
        witnesses: best
            .tie_bits()
            .map(|h1| (family(&space, h1), family(&space, dual_bits(h1, &compat))))
            .collect(),
        tie_count: best.tie_count,
    })
}

fn pair_value(h1: &SeqFamily, h2: &SeqFamily) -> Value {
    Value::Array(vec![seq_family_to_value(h1), seq_family_to_value(h2)])
}

/// `m = t + 1` is proven for `t <= 2` and `t >= 14` and open in between.
fn boundary_regime(m: usize, thresholds: &[usize]) -> Regime {
    if thresholds.iter().any(|&t| m == t + 1 && (3..=13).contains(&t)) {
        Regime::Conjectural
    } else {
        Regime::Proven
    }
}

fn seq_report(
    id: TheoremId,
    params: &[(&str, String)],
    ext: SeqExtremum,
    bound: u128,
    mode: SearchMode,
) -> VerificationReport {
    let witnesses = ext.witnesses.iter().map(|(a, b)| pair_value(a, b)).collect();
    let rep = VerificationReport::new(id, params, ext.value.into(), bound.into()).with_witnesses(witnesses, ext.tie_count);
    match mode {
        SearchMode::Exhaustive => rep.searching("all families H1 ⊆ [m]^n with H2 = dual(H1)"),
        SearchMode::Sampled(s) => rep.sampled(s.trials, s.seed).searching(
            "seeded random 1-3 point seeds closed under double duality, plus the pinned cylinder",
        ),
    }
}

fn pow(m: usize, e: usize) -> u128 {
    (m as u128).pow(e as u32)
}

/// Cross `t`-intersecting sequences: `|H1| |H2| <= (m^(n-t))^2`.
pub fn verify_tm2(m: usize, n: usize, t: usize, mode: SearchMode, cfg: &SearchConfig) -> Result<VerificationReport> {
    if t == 0 || t > n {
        return Err(Error::hypothesis(format!("need n >= t >= 1, got n = {n}, t = {t}")));
    }
    if m < t + 1 {
        return Err(Error::hypothesis(format!("need m >= t + 1, got m = {m}, t = {t}")));
    }
    let ext = seq_extremum(m, n, &Requirement::Total(t), mode, cfg)?;
    let params = [("m", m.to_string()), ("n", n.to_string()), ("t", t.to_string())];
    let bound = pow(pow(m, n - t) as usize, 2);
    Ok(seq_report(TheoremId::TM2, &params, ext, bound, mode).in_regime(boundary_regime(m, &[t])))
}

/// Cross `(t_1, ..., t_m)`-intersecting sequences:
/// `|H1| |H2| <= (m^(n - sum t_i))^2`. On `[2]^n` with `t = (1,1)` this
/// is the cross intersecting-union bound `2^(2n-4)`.
pub fn verify_tm4(
    m: usize,
    n: usize,
    t: &ThresholdVector,
    mode: SearchMode,
    cfg: &SearchConfig,
) -> Result<VerificationReport> {
    if m < 2 {
        return Err(Error::hypothesis(format!("need m >= 2, got {m}")));
    }
    if t.as_slice().len() != m {
        return Err(Error::hypothesis(format!("threshold vector {t} needs m = {m} entries")));
    }
    if t.total() > n {
        return Err(Error::hypothesis(format!("need n >= sum t_i = {}, got n = {n}", t.total())));
    }
    if let Some(&ti) = t.as_slice().iter().find(|&&ti| m < ti + 1) {
        return Err(Error::hypothesis(format!("need m >= t_i + 1 for each i, got m = {m}, t_i = {ti}")));
    }
    let ext = seq_extremum(m, n, &Requirement::PerSymbol(t.clone()), mode, cfg)?;
    let id = if m == 2 && t.as_slice() == [1, 1] {
        TheoremId::IU
    } else {
        TheoremId::TM4
    };
    let params = [("m", m.to_string()), ("n", n.to_string()), ("t", t.to_string())];
    let bound = pow(pow(m, n - t.total()) as usize, 2);
    Ok(seq_report(id, &params, ext, bound, mode).in_regime(boundary_regime(m, t.as_slice())))
}

/// Largest `t`-intersecting family in `[m]^n`, against `m^(n-t)`.
pub fn verify_af(m: usize, n: usize, t: usize, cfg: &SearchConfig) -> Result<VerificationReport> {
    if t == 0 || t > n {
        return Err(Error::hypothesis(format!("need n >= t >= 1, got n = {n}, t = {t}")));
    }
    if m < t + 1 {
        return Err(Error::hypothesis(format!("need m >= t + 1, got m = {m}, t = {t}")));
    }
    let space = SeqSpace::new(m, n)?;
    check_points(&space, &SearchMode::Exhaustive)?;
    let compat = seq_compat(&space, &Requirement::Total(t));
    let best = best_over(1 << space.size(), cfg.workers, |i| i, |h| {
        bit_positions(h).all(|y| h & !compat[y as usize] == 0).then(|| h.count_ones() as u128)
    })?;
    let witnesses = best.tie_bits().map(|h| seq_family_to_value(&family(&space, h))).collect();
    let params = [("m", m.to_string()), ("n", n.to_string()), ("t", t.to_string())];
    Ok(
        VerificationReport::new(TheoremId::AF, &params, best.value.unwrap_or(0).into(), pow(m, n - t).into())
            .with_witnesses(witnesses, best.tie_count)
            .searching("all t-intersecting families H ⊆ [m]^n"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::report::Quantity;
    use crate::search::Sampling;
    use crate::seqfam::meet;

    fn serial() -> SearchConfig {
        SearchConfig::default()
    }

    /// Oracle straight from the definition: every family, every pair of
    /// members, meets built coordinate by coordinate.
    fn oracle_product(m: usize, n: usize, t: usize) -> u128 {
        let space = SeqSpace::new(m, n).unwrap();
        let points: Vec<Vec<usize>> = (0..space.size()).map(|i| space.vector_of(i)).collect();
        let ok = |x: &[usize], y: &[usize]| meet(x, y, m).unwrap().iter().filter(|&&v| v != 0).count() >= t;
        let mut best = 0u128;
        for bits in 0u64..1 << points.len() {
            let h1: Vec<&Vec<usize>> = points.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, p)| p).collect();
            let h2 = points.iter().filter(|y| h1.iter().all(|x| ok(x, y))).count();
            best = best.max(h1.len() as u128 * h2 as u128);
        }
        best
    }

    #[test]
    fn tm2_matches_oracle() {
        for (m, n, t) in [(3, 2, 1), (2, 2, 1), (2, 3, 1), (4, 2, 1)] {
            let ext = seq_extremum(m, n, &Requirement::Total(t), SearchMode::Exhaustive, &serial()).unwrap();
            assert_eq!(ext.value, oracle_product(m, n, t), "m={m} n={n} t={t}");
        }
    }

    #[test]
    fn tm2_examples() {
        let rep = verify_tm2(3, 2, 1, SearchMode::Exhaustive, &serial()).unwrap();
        assert_eq!(rep.computed_extremum, Quantity::Integer(9));
        assert!(rep.pass);
        let cyl = SeqFamily::new(3, 2, &[[1, 1], [1, 2], [1, 3]]).unwrap();
        assert!(rep.witnesses.contains(&pair_value(&cyl, &cyl)));
        let rep = verify_tm2(4, 2, 2, SearchMode::Exhaustive, &serial()).unwrap();
        assert_eq!(rep.computed_extremum, Quantity::Integer(1));
        assert!(matches!(verify_tm2(5, 2, 1, SearchMode::Exhaustive, &serial()), Err(Error::Scale(_))));
        assert!(matches!(verify_tm2(2, 2, 2, SearchMode::Exhaustive, &serial()), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn boundary_flags() {
        assert_eq!(boundary_regime(3, &[2]), Regime::Proven);
        assert_eq!(boundary_regime(4, &[3]), Regime::Conjectural);
        assert_eq!(boundary_regime(15, &[14]), Regime::Proven);
        assert_eq!(boundary_regime(5, &[3]), Regime::Proven);
    }

    #[test]
    fn tm4_examples() {
        let tv = |v: &[usize]| ThresholdVector::new(v.to_vec());
        let rep = verify_tm4(3, 2, &tv(&[1, 1, 0]), SearchMode::Exhaustive, &serial()).unwrap();
        assert_eq!(rep.computed_extremum, Quantity::Integer(1));
        let rep = verify_tm4(2, 3, &tv(&[1, 1]), SearchMode::Exhaustive, &serial()).unwrap();
        assert_eq!(rep.theorem_id, TheoremId::IU);
        assert_eq!(rep.computed_extremum, Quantity::Integer(4));
        let rep = verify_tm4(3, 2, &tv(&[0, 0, 0]), SearchMode::Exhaustive, &serial()).unwrap();
        assert_eq!(rep.computed_extremum, Quantity::Integer(81));
        assert!(verify_tm4(2, 3, &tv(&[2, 0]), SearchMode::Exhaustive, &serial()).is_err());
        assert!(verify_tm4(2, 3, &tv(&[1]), SearchMode::Exhaustive, &serial()).is_err());
    }

    #[test]
    fn af_examples() {
        let size = |m, n, t| verify_af(m, n, t, &serial()).unwrap().computed_extremum;
        assert_eq!(size(3, 2, 1), Quantity::Integer(3));
        assert_eq!(size(2, 1, 1), Quantity::Integer(1));
        assert_eq!(size(4, 2, 2), Quantity::Integer(1));
    }

    #[test]
    fn sampled_mode_is_reproducible() {
        let mode = SearchMode::Sampled(Sampling { trials: 200, seed: 42 });
        let a = verify_tm2(3, 3, 1, mode, &serial()).unwrap();
        let b = verify_tm2(3, 3, 1, mode, &SearchConfig::with_workers(3)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.computed_extremum, Quantity::Integer(81));
        assert_eq!(a.seed, Some(42));
        assert!(verify_tm2(2, 5, 1, mode, &serial()).is_err());
    }

    #[test]
    fn cylinder_value() {
        let space = SeqSpace::new(3, 3).unwrap();
        let cyl = pinned_cylinder(&space, &Requirement::PerSymbol(ThresholdVector::new(vec![1, 1, 0])));
        assert_eq!(cyl.count_ones(), 3);
        let f = family(&space, cyl);
        assert!(f.vectors().iter().all(|x| x[0] == 1 && x[1] == 2));
    }
}
