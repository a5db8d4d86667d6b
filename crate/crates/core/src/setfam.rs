//! Families of subsets of `[n]`, the p-biased measure, intersection
//! predicates, and the classical extremal constructions.
//!
//! A subset of `[n]` is a `u32` bitmask with element `i` (1-based) stored in
//! bit `i - 1`. Families keep their members as a sorted, deduplicated vector
//! of masks, which is also the canonical order used for serialization and
//! witness tie-breaking.

use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

use crate::arith::Rational;
use crate::error::{Error, Result};

/// Largest supported ground set.
pub const MAX_N: usize = 24;

/// Families on ground sets up to this size get a dense membership index.
const DENSE_MAX_N: usize = 20;

/// Mask with bits `0..n` set.
pub fn full_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Converts 1-based elements to a mask, validating against `n`.
pub fn mask_of(n: usize, elements: &[usize]) -> Result<u32> {
    let mut mask = 0u32;
    for &e in elements {
        if e == 0 || e > n {
            return Err(Error::ElementOutOfRange { element: e, n });
        }
        mask |= 1 << (e - 1);
    }
    Ok(mask)
}

/// Ascending 1-based elements of a mask.
pub fn elements_of(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect()
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_N {
        Err(Error::GroundSetSize { n, max: MAX_N })
    } else {
        Ok(())
    }
}

/// Minimum required intersection size.
pub type Threshold = usize;

/// A family of subsets of `[n]`.
#[derive(Clone)]
pub struct SetFamily {
    n: usize,
    members: Vec<u32>,
    dense: OnceLock<Box<[u64]>>,
}

impl SetFamily {
    /// Builds a family from masks; duplicates collapse (set semantics).
    pub fn from_masks(n: usize, masks: impl IntoIterator<Item = u32>) -> Result<Self> {
        check_n(n)?;
        let full = full_mask(n);
        let mut members: Vec<u32> = masks.into_iter().collect();
        if let Some(&bad) = members.iter().find(|&&m| m & !full != 0) {
            let element = 32 - (bad & !full).leading_zeros() as usize;
            return Err(Error::ElementOutOfRange { element, n });
        }
        members.sort_unstable();
        members.dedup();
        Ok(Self::from_sorted(n, members))
    }

    /// Builds a family from 1-based element lists, rejecting duplicate sets.
    pub fn from_sets<S: AsRef<[usize]>>(n: usize, sets: &[S]) -> Result<Self> {
        check_n(n)?;
        let mut members = Vec::with_capacity(sets.len());
        for s in sets {
            members.push(mask_of(n, s.as_ref())?);
        }
        members.sort_unstable();
        if let Some(w) = members.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateMember(format!("{:?}", elements_of(w[0]))));
        }
        Ok(Self::from_sorted(n, members))
    }

    pub(crate) fn from_sorted(n: usize, members: Vec<u32>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        SetFamily {
            n,
            members,
            dense: OnceLock::new(),
        }
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::from_masks(n, [])
    }

    /// All `2^n` subsets of `[n]`.
    pub fn power_set(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Self::from_sorted(n, (0..=full_mask(n)).collect()))
    }

    /// All `k`-subsets of `[n]`.
    pub fn layer(n: usize, k: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Self::from_sorted(
            n,
            (0..=full_mask(n))
                .filter(|m| m.count_ones() as usize == k)
                .collect(),
        ))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.members.iter().copied()
    }

    fn dense_index(&self) -> Option<&[u64]> {
        if self.n > DENSE_MAX_N {
            return None;
        }
        Some(self.dense.get_or_init(|| {
            let mut bits = vec![0u64; ((1usize << self.n) + 63) / 64];
            for &m in &self.members {
                bits[m as usize / 64] |= 1 << (m % 64);
            }
            bits.into_boxed_slice()
        }))
    }

    pub fn contains(&self, mask: u32) -> bool {
        match self.dense_index() {
            Some(bits) => {
                (mask as usize) < (1usize << self.n) && bits[mask as usize / 64] >> (mask % 64) & 1 == 1
            }
            None => self.members.binary_search(&mask).is_ok(),
        }
    }

    /// `F ⊆ G` as families.
    pub fn is_subfamily_of(&self, other: &SetFamily) -> bool {
        self.n == other.n && self.iter().all(|m| other.contains(m))
    }

    /// Number of members in each layer `0..=n`.
    pub fn layer_profile(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.n + 1];
        for &m in &self.members {
            counts[m.count_ones() as usize] += 1;
        }
        counts
    }

    /// Members of exactly size `k`.
    pub fn restrict_to_layer(&self, k: usize) -> SetFamily {
        Self::from_sorted(
            self.n,
            self.iter().filter(|m| m.count_ones() as usize == k).collect(),
        )
    }

    /// `2^[n]` minus this family.
    pub fn cube_complement(&self) -> SetFamily {
        Self::from_sorted(
            self.n,
            (0..=full_mask(self.n)).filter(|&m| !self.contains(m)).collect(),
        )
    }

    /// Inclusion-minimal members.
    pub fn minimal_members(&self) -> Vec<u32> {
        let mut by_size = self.members.clone();
        by_size.sort_by_key(|m| (m.count_ones(), *m));
        let mut minimal: Vec<u32> = Vec::new();
        for m in by_size {
            if !minimal.iter().any(|&g| g & m == g) {
                minimal.push(m);
            }
        }
        minimal.sort_unstable();
        minimal
    }

    pub fn is_up_closed(&self) -> bool {
        self.iter().all(|m| {
            (0..self.n)
                .filter(|i| m >> i & 1 == 0)
                .all(|i| self.contains(m | 1 << i))
        })
    }

    pub fn measure(&self, p: &Rational) -> Result<Rational> {
        Ok(BiasedMeasure::new(self.n, p)?.of_family(self))
    }

    /// Every ordered pair of members, including a member with itself, shares
    /// at least `t` elements.
    pub fn is_t_intersecting(&self, t: Threshold) -> bool {
        // |F ∩ F| = |F| covers the diagonal.
        self.members.iter().enumerate().all(|(i, &a)| {
            a.count_ones() as usize >= t
                && self.members[i + 1..]
                    .iter()
                    .all(|&b| (a & b).count_ones() as usize >= t)
        })
    }

    pub fn is_cross_t_intersecting(&self, other: &SetFamily, t: Threshold) -> Result<bool> {
        self.same_ground(other)?;
        Ok(self.iter().all(|a| {
            other
                .iter()
                .all(|b| (a & b).count_ones() as usize >= t)
        }))
    }

    pub(crate) fn same_ground(&self, other: &SetFamily) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Mismatch {
                left: format!("n={}", self.n),
                right: format!("n={}", other.n),
            });
        }
        Ok(())
    }

    /// Smallest superset-closed family containing this one.
    pub fn up_closure(&self) -> SetFamily {
        if self.is_empty() {
            return self.clone();
        }
        let size = 1usize << self.n;
        let mut inside = vec![false; size];
        let mut members = Vec::new();
        for s in 0..size {
            let mask = s as u32;
            let hit = self.contains(mask)
                || (0..self.n).any(|i| mask >> i & 1 == 1 && inside[s ^ (1 << i)]);
            if hit {
                inside[s] = true;
                members.push(mask);
            }
        }
        Self::from_sorted(self.n, members)
    }

    /// The largest family `G` with `(self, G)` cross `t`-intersecting:
    /// `{S ⊆ [n] : |S ∩ F| ≥ t for all F}`. The empty family yields the
    /// full power set.
    pub fn t_dual(&self, t: Threshold) -> SetFamily {
        let minimal = self.minimal_members();
        let size = 1usize << self.n;
        let mut inside = vec![false; size];
        let mut members = Vec::new();
        for s in 0..size {
            let mask = s as u32;
            // the dual is up-closed, so one member below `mask` decides it
            let hit = (0..self.n).any(|i| mask >> i & 1 == 1 && inside[s ^ (1 << i)])
                || minimal
                    .iter()
                    .all(|&f| (mask & f).count_ones() as usize >= t);
            if hit {
                inside[s] = true;
                members.push(mask);
            }
        }
        Self::from_sorted(self.n, members)
    }
}

impl PartialEq for SetFamily {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.members == other.members
    }
}

impl Eq for SetFamily {}

impl std::hash::Hash for SetFamily {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.members.hash(state);
    }
}

/// Ground-set size first, then lexicographic on the ascending mask list.
impl Ord for SetFamily {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.members.cmp(&other.members))
    }
}

impl PartialOrd for SetFamily {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SetFamily(n={}, {{", self.n)?;
        for (i, &m) in self.members.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{:?}", elements_of(m))?;
        }
        write!(f, "}})")
    }
}

/// Precomputed per-set weights `p^k (1-p)^(n-k)` for one `(n, p)`.
#[derive(Debug, Clone)]
pub struct BiasedMeasure {
    p: Rational,
    weights: Vec<Rational>,
}

impl BiasedMeasure {
    pub fn new(n: usize, p: &Rational) -> Result<Self> {
        if !p.is_open_unit() {
            return Err(Error::ProbabilityOutOfRange(p.to_string()));
        }
        let q = p.complement();
        let weights = (0..=n)
            .map(|k| &p.pow(k as u32) * &q.pow((n - k) as u32))
            .collect();
        Ok(BiasedMeasure {
            p: p.clone(),
            weights,
        })
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    /// Weight of a single set of size `k`.
    pub fn weight(&self, k: usize) -> &Rational {
        &self.weights[k]
    }

    /// Measure of a family given its layer profile.
    pub fn of_profile(&self, profile: &[u64]) -> Rational {
        profile
            .iter()
            .zip(&self.weights)
            .filter(|(&c, _)| c > 0)
            .map(|(&c, w)| w * &Rational::from_integer(c))
            .sum()
    }

    pub fn of_family(&self, family: &SetFamily) -> Rational {
        self.of_profile(&family.layer_profile())
    }
}

/// All supersets of `t_set`.
pub fn principal_family(n: usize, t_set: &[usize]) -> Result<SetFamily> {
    check_n(n)?;
    let t = mask_of(n, t_set)?;
    Ok(SetFamily::from_sorted(
        n,
        (0..=full_mask(n)).filter(|m| m & t == t).collect(),
    ))
}

/// `A_r(n, t) = {A ⊆ [n] : |A ∩ [t+2r]| ≥ t + r}`.
pub fn frankl_family(n: usize, t: usize, r: usize) -> Result<SetFamily> {
    check_n(n)?;
    if t == 0 {
        return Err(Error::hypothesis("frankl family requires t >= 1"));
    }
    if t + 2 * r > n {
        return Err(Error::hypothesis(format!(
            "frankl family requires t + 2r <= n (t + 2r = {} > {n})",
            t + 2 * r
        )));
    }
    let window = full_mask(t + 2 * r);
    Ok(SetFamily::from_sorted(
        n,
        (0..=full_mask(n))
            .filter(|m| (m & window).count_ones() as usize >= t + r)
            .collect(),
    ))
}

/// The Katona family `K(n, t)`: a size threshold, plus the boundary layer
/// restricted to `[n-1]` when `n + t` is odd.
pub fn katona_family(n: usize, t: usize) -> Result<SetFamily> {
    check_n(n)?;
    if t == 0 || t > n {
        return Err(Error::hypothesis(format!(
            "katona family requires 1 <= t <= n (t = {t}, n = {n})"
        )));
    }
    let members = if (n + t) % 2 == 0 {
        let floor = (n + t) / 2;
        (0..=full_mask(n))
            .filter(|m| m.count_ones() as usize >= floor)
            .collect()
    } else {
        let floor = (n + t + 1) / 2;
        let boundary = (n + t - 1) / 2;
        let head = full_mask(n - 1);
        (0..=full_mask(n))
            .filter(|&m| {
                let k = m.count_ones() as usize;
                k >= floor || (k == boundary && m & !head == 0)
            })
            .collect()
    };
    Ok(SetFamily::from_sorted(n, members))
}

/// Closed-form size of `K(n, t)` from binomial sums.
pub fn katona_count(n: usize, t: usize) -> u64 {
    use crate::arith::binomial;
    let (n32, t32) = (n as u32, t as u32);
    if (n + t) % 2 == 0 {
        ((n32 + t32) / 2..=n32).map(|i| binomial(n32, i)).sum()
    } else {
        ((n32 + t32 + 1) / 2..=n32)
            .map(|i| binomial(n32, i))
            .sum::<u64>()
            + binomial(n32 - 1, (n32 + t32 - 1) / 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    fn fam(n: usize, sets: &[&[usize]]) -> SetFamily {
        SetFamily::from_sets(n, sets).unwrap()
    }

    #[test]
    fn measure_examples() {
        let p = principal_family(3, &[1, 2]).unwrap();
        assert_eq!(p.measure(&r(1, 3)).unwrap(), r(1, 9));
        for n in [1, 4, 7] {
            assert_eq!(SetFamily::power_set(n).unwrap().measure(&r(2, 7)).unwrap(), Rational::one());
        }
        assert_eq!(katona_family(4, 1).unwrap().measure(&r(1, 2)).unwrap(), r(1, 2));
    }

    #[test]
    fn measure_rejects_bad_p() {
        let f = SetFamily::power_set(2).unwrap();
        for p in [r(0, 1), r(1, 1), r(-1, 2), r(3, 2)] {
            assert!(matches!(f.measure(&p), Err(Error::ProbabilityOutOfRange(_))));
        }
    }

    #[test]
    fn intersection_predicates() {
        let f = fam(3, &[&[1, 2], &[1, 3]]);
        assert!(f.is_t_intersecting(1));
        assert!(!f.is_t_intersecting(2));
        let a1 = frankl_family(4, 1, 1).unwrap();
        assert_eq!(a1.len(), 8);
        assert!(a1.is_t_intersecting(1));
        assert!(SetFamily::empty(3).unwrap().is_t_intersecting(5));

        let g = fam(3, &[&[1, 2]]);
        let h = fam(3, &[&[2, 3]]);
        assert!(g.is_cross_t_intersecting(&h, 1).unwrap());
        assert!(!g.is_cross_t_intersecting(&h, 2).unwrap());
        let p = principal_family(5, &[1, 2]).unwrap();
        assert!(p.is_cross_t_intersecting(&p, 2).unwrap());
        assert!(SetFamily::empty(3).unwrap().is_cross_t_intersecting(&h, 3).unwrap());
        let other = fam(4, &[&[1]]);
        assert!(matches!(g.is_cross_t_intersecting(&other, 1), Err(Error::Mismatch { .. })));
    }

    #[test]
    fn principal_examples() {
        assert_eq!(principal_family(3, &[1, 2]).unwrap(), fam(3, &[&[1, 2], &[1, 2, 3]]));
        assert_eq!(principal_family(2, &[]).unwrap(), SetFamily::power_set(2).unwrap());
        assert_eq!(principal_family(3, &[1, 2, 3]).unwrap(), fam(3, &[&[1, 2, 3]]));
        assert!(principal_family(3, &[4]).is_err());
    }

    #[test]
    fn frankl_examples() {
        for n in 1..=6 {
            for t in 1..=n {
                assert_eq!(
                    frankl_family(n, t, 0).unwrap(),
                    principal_family(n, &(1..=t).collect::<Vec<_>>()).unwrap()
                );
            }
        }
        let a1 = frankl_family(4, 1, 1).unwrap();
        let expected: Vec<u32> = (0u32..16).filter(|m| (m & 0b111).count_ones() >= 2).collect();
        assert_eq!(a1.members(), expected.as_slice());
        assert!(frankl_family(3, 2, 1).is_err());
    }

    #[test]
    fn katona_examples() {
        let k42 = katona_family(4, 2).unwrap();
        assert_eq!(k42.len(), 5);
        assert!(k42.iter().all(|m| m.count_ones() >= 3));
        let k41 = katona_family(4, 1).unwrap();
        assert_eq!(
            k41,
            fam(
                4,
                &[&[1, 2], &[1, 3], &[2, 3], &[1, 2, 3], &[1, 2, 4], &[1, 3, 4], &[2, 3, 4], &[1, 2, 3, 4]]
            )
        );
        for n in 1..=8 {
            assert_eq!(katona_family(n, n).unwrap(), SetFamily::from_masks(n, [full_mask(n)]).unwrap());
        }
        assert!(katona_family(3, 4).is_err());
    }

    #[test]
    fn katona_measure_matches_count_formula() {
        let half = r(1, 2);
        for n in 1..=12 {
            for t in 1..=n {
                let k = katona_family(n, t).unwrap();
                assert!(k.is_t_intersecting(t), "K({n},{t}) must be t-intersecting");
                let scaled = &k.measure(&half).unwrap() * &Rational::from_integer(1u64 << n);
                assert_eq!(scaled, Rational::from_integer(katona_count(n, t)), "n={n} t={t}");
            }
        }
    }

    #[test]
    fn up_closure_examples() {
        assert_eq!(fam(2, &[&[1]]).up_closure(), fam(2, &[&[1], &[1, 2]]));
        let k = katona_family(5, 2).unwrap();
        assert_eq!(k.up_closure(), k);
        assert!(SetFamily::empty(3).unwrap().up_closure().is_empty());
    }

    #[test]
    fn dual_examples() {
        assert_eq!(fam(2, &[&[1]]).t_dual(1), fam(2, &[&[1], &[1, 2]]));
        for n in 1..=6 {
            let p = principal_family(n, &[1, n]).unwrap();
            let t = if n == 1 { 1 } else { 2 };
            assert_eq!(p.t_dual(t), p);
        }
        assert!(fam(2, &[&[]]).t_dual(1).is_empty());
        assert_eq!(SetFamily::empty(3).unwrap().t_dual(2), SetFamily::power_set(3).unwrap());
    }

    #[test]
    fn dense_and_sparse_membership_agree() {
        let big = SetFamily::from_masks(22, [0, 5, 1 << 21, full_mask(22)]).unwrap();
        assert!(big.contains(5) && big.contains(1 << 21) && !big.contains(6));
        let small = SetFamily::from_masks(4, [0, 5, 15]).unwrap();
        assert!(small.contains(5) && !small.contains(6) && !small.contains(16));
    }

    #[test]
    fn rejects_out_of_range_and_duplicates() {
        assert!(matches!(
            SetFamily::from_sets(2, &[vec![3]]),
            Err(Error::ElementOutOfRange { element: 3, n: 2 })
        ));
        assert!(matches!(
            SetFamily::from_sets(3, &[vec![1, 2], vec![2, 1]]),
            Err(Error::DuplicateMember(_))
        ));
        assert!(SetFamily::from_masks(2, [4]).is_err());
        assert!(SetFamily::empty(25).is_err());
        assert!(SetFamily::empty(0).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn family(max_n: usize) -> impl Strategy<Value = SetFamily> {
            (1..=max_n).prop_flat_map(|n| {
                proptest::collection::vec(0..=full_mask(n), 0..12)
                    .prop_map(move |ms| SetFamily::from_masks(n, ms).unwrap())
            })
        }

        fn prob() -> impl Strategy<Value = Rational> {
            (1i64..50).prop_flat_map(|d| (1..d + 1).prop_map(move |k| r(k, d + 1)))
        }

        /// Brute-force dual straight from the definition.
        fn dual_oracle(f: &SetFamily, t: usize) -> Vec<u32> {
            (0..=full_mask(f.n()))
                .filter(|&s| f.iter().all(|m| (s & m).count_ones() as usize >= t))
                .collect()
        }

        proptest! {
            #[test]
            fn complement_partitions_cube(f in family(8), p in prob()) {
                let total = &f.measure(&p).unwrap() + &f.cube_complement().measure(&p).unwrap();
                prop_assert_eq!(total, Rational::one());
            }

            #[test]
            fn closure_never_decreases_measure(f in family(8), p in prob()) {
                let up = f.up_closure();
                prop_assert!(up.is_up_closed());
                prop_assert!(f.is_subfamily_of(&up));
                prop_assert!(up.measure(&p).unwrap() >= f.measure(&p).unwrap());
            }

            #[test]
            fn dual_matches_definition(f in family(7), t in 0usize..4) {
                let d = f.t_dual(t);
                let expected = dual_oracle(&f, t);
                prop_assert_eq!(d.members(), expected.as_slice());
                prop_assert!(d.is_up_closed());
                prop_assert!(f.is_cross_t_intersecting(&d, t).unwrap());
                prop_assert_eq!(f.is_t_intersecting(t), f.is_subfamily_of(&d));
            }

            #[test]
            fn principal_measure_is_p_to_the_t(n in 1usize..=14, seed in any::<u32>(), p in prob()) {
                let t_set: Vec<usize> = (1..=n).filter(|i| seed >> (i - 1) & 1 == 1).collect();
                let fam = principal_family(n, &t_set).unwrap();
                prop_assert_eq!(fam.measure(&p).unwrap(), p.pow(t_set.len() as u32));
            }
        }

        #[test]
        fn dual_is_maximal_partner_exhaustively() {
            // every G on n <= 3, every F from a sample: G ⊆ dual(F) ⟺ cross-t
            for n in 1..=3usize {
                let cube = 1u32 << n;
                let all_families = 1u32 << cube;
                for fbits in 0..all_families {
                    let f = SetFamily::from_masks(n, (0..cube).filter(|s| fbits >> s & 1 == 1)).unwrap();
                    for t in 0..=n {
                        let d = f.t_dual(t);
                        for gbits in 0..all_families {
                            let g = SetFamily::from_masks(n, (0..cube).filter(|s| gbits >> s & 1 == 1)).unwrap();
                            assert_eq!(g.is_subfamily_of(&d), f.is_cross_t_intersecting(&g, t).unwrap());
                        }
                    }
                }
            }
        }

        #[test]
        fn principal_measure_at_full_scale() {
            let p = r(3, 11);
            for n in [20usize, 24] {
                let f = principal_family(n, &[1, 5, 9]).unwrap();
                assert_eq!(f.measure(&p).unwrap(), p.pow(3));
            }
        }
    }
}
