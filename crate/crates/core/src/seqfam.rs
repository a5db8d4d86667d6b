//! Families of integer sequences in `[m]^n`.
//!
//! A sequence `(x_1, ..., x_n)` is stored as its base-`m` index
//! `sum (x_i - 1) m^(n-i)`, so ascending index order is lexicographic order
//! on vectors. For `m = 2` the index doubles as a bitmask of the positions
//! holding symbol 2, and meets reduce to XNOR and popcount.

use std::fmt;

use crate::error::{Error, Result};

/// Largest `m^n` for which families may be built.
pub const MAX_POINTS: usize = 1 << 24;

/// Coordinate tables are kept for spaces up to this many points.
const TABLE_MAX_POINTS: usize = 1 << 16;

/// Coordinatewise meet: `x_i` where the vectors agree, `0` elsewhere.
pub fn meet(x: &[usize], y: &[usize], m: usize) -> Result<Vec<usize>> {
    if x.len() != y.len() {
        return Err(Error::Mismatch {
            left: format!("length {}", x.len()),
            right: format!("length {}", y.len()),
        });
    }
    for &v in x.iter().chain(y) {
        if v == 0 || v > m {
            return Err(Error::SymbolOutOfRange { symbol: v, m });
        }
    }
    Ok(x.iter()
        .zip(y)
        .map(|(&a, &b)| if a == b { a } else { 0 })
        .collect())
}

/// Number of coordinates of `z` equal to `symbol`.
pub fn symbol_count(z: &[usize], symbol: usize) -> usize {
    z.iter().filter(|&&v| v == symbol).count()
}

/// The ambient space `[m]^n` with digit lookup.
#[derive(Debug, Clone)]
pub struct SeqSpace {
    m: usize,
    n: usize,
    size: usize,
    /// `powers[i] = m^(n-1-i)`, the weight of coordinate `i`.
    powers: Vec<usize>,
    table: Option<Vec<u8>>,
}

impl SeqSpace {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::hypothesis(format!("alphabet size m = {m} must be at least 2")));
        }
        if n == 0 {
            return Err(Error::hypothesis("sequence length n must be at least 1"));
        }
        let size = (0..n)
            .try_fold(1usize, |acc, _| acc.checked_mul(m).filter(|&s| s <= MAX_POINTS))
            .ok_or_else(|| Error::scale(format!("m^n = {m}^{n} exceeds 2^24")))?;
        let mut powers = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            powers[i] = powers[i + 1] * m;
        }
        let mut space = SeqSpace {
            m,
            n,
            size,
            powers,
            table: None,
        };
        if size <= TABLE_MAX_POINTS && m <= u8::MAX as usize {
            let table = (0..size)
                .flat_map(|idx| {
                    let sp = &space;
                    (0..n).map(move |i| sp.compute_digit(idx, i) as u8)
                })
                .collect();
            space.table = Some(table);
        }
        Ok(space)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `m^n`.
    pub fn size(&self) -> usize {
        self.size
    }

    fn compute_digit(&self, idx: usize, i: usize) -> usize {
        (idx / self.powers[i]) % self.m + 1
    }

    /// Symbol (1-based) at coordinate `i` of sequence `idx`.
    #[inline]
    pub fn digit(&self, idx: usize, i: usize) -> usize {
        match &self.table {
            Some(t) => t[idx * self.n + i] as usize,
            None => self.compute_digit(idx, i),
        }
    }

    pub fn vector_of(&self, idx: usize) -> Vec<usize> {
        (0..self.n).map(|i| self.digit(idx, i)).collect()
    }

    pub fn index_of(&self, x: &[usize]) -> Result<usize> {
        if x.len() != self.n {
            return Err(Error::Mismatch {
                left: format!("length {}", x.len()),
                right: format!("n={}", self.n),
            });
        }
        x.iter().zip(&self.powers).try_fold(0usize, |acc, (&v, &w)| {
            if v == 0 || v > self.m {
                Err(Error::SymbolOutOfRange { symbol: v, m: self.m })
            } else {
                Ok(acc + (v - 1) * w)
            }
        })
    }

    /// Per-symbol counts of the meet of `x` and `y`; index 0 is unused.
    pub fn meet_counts(&self, x: usize, y: usize) -> Vec<usize> {
        let mut counts = vec![0usize; self.m + 1];
        if self.m == 2 {
            let full = (1usize << self.n) - 1;
            let agree = !(x ^ y) & full;
            counts[1] = (agree & !x).count_ones() as usize;
            counts[2] = (agree & x).count_ones() as usize;
        } else {
            for i in 0..self.n {
                let a = self.digit(x, i);
                if a == self.digit(y, i) {
                    counts[a] += 1;
                }
            }
        }
        counts
    }

    /// Whether the meet of `x` and `y` satisfies `req`.
    pub fn meets(&self, x: usize, y: usize, req: &Requirement) -> bool {
        let counts = self.meet_counts(x, y);
        match req {
            Requirement::Total(t) => counts.iter().sum::<usize>() >= *t,
            Requirement::PerSymbol(tv) => tv.0.iter().zip(&counts[1..]).all(|(&need, &have)| have >= need),
        }
    }

    pub(crate) fn check_requirement(&self, req: &Requirement) -> Result<()> {
        match req {
            Requirement::Total(t) if *t > self.n => Err(Error::hypothesis(format!(
                "threshold t = {t} exceeds sequence length n = {}",
                self.n
            ))),
            Requirement::PerSymbol(tv) => {
                if tv.0.len() != self.m {
                    return Err(Error::hypothesis(format!(
                        "threshold vector has {} entries, expected m = {}",
                        tv.0.len(),
                        self.m
                    )));
                }
                if tv.total() > self.n {
                    return Err(Error::hypothesis(format!(
                        "threshold vector sum {} exceeds n = {}",
                        tv.total(),
                        self.n
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Per-symbol thresholds `(t_1, ..., t_m)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ThresholdVector(pub Vec<usize>);

impl ThresholdVector {
    pub fn new(t: Vec<usize>) -> Self {
        ThresholdVector(t)
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for ThresholdVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, ")")
    }
}

/// What a meet must contain: a total count of nonzero coordinates, or a
/// count per symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Requirement {
    Total(usize),
    PerSymbol(ThresholdVector),
}

/// A subset `P` of the alphabet `[m]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolSet {
    m: usize,
    inside: Vec<bool>,
}

impl SymbolSet {
    pub fn new(m: usize, symbols: &[usize]) -> Result<Self> {
        let mut inside = vec![false; m + 1];
        for &s in symbols {
            if s == 0 || s > m {
                return Err(Error::SymbolOutOfRange { symbol: s, m });
            }
            inside[s] = true;
        }
        Ok(SymbolSet { m, inside })
    }

    pub fn contains(&self, symbol: usize) -> bool {
        self.inside.get(symbol).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_proper(&self) -> bool {
        self.len() < self.m
    }

    pub fn is_disjoint(&self, other: &SymbolSet) -> bool {
        (1..=self.m).all(|s| !(self.contains(s) && other.contains(s)))
    }

    pub fn symbols(&self) -> Vec<usize> {
        (1..=self.m).filter(|&s| self.contains(s)).collect()
    }
}

/// A family of sequences in `[m]^n`.
#[derive(Clone)]
pub struct SeqFamily {
    space: SeqSpace,
    members: Vec<u32>,
}

impl SeqFamily {
    /// Builds a family from explicit vectors, rejecting duplicates.
    pub fn new<S: AsRef<[usize]>>(m: usize, n: usize, seqs: &[S]) -> Result<Self> {
        let space = SeqSpace::new(m, n)?;
        let mut members = Vec::with_capacity(seqs.len());
        for s in seqs {
            members.push(space.index_of(s.as_ref())? as u32);
        }
        members.sort_unstable();
        if let Some(w) = members.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateMember(format!("{:?}", space.vector_of(w[0] as usize))));
        }
        Ok(SeqFamily { space, members })
    }

    /// Builds a family from base-`m` indices; duplicates collapse.
    pub fn from_indices(space: SeqSpace, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut members = Vec::new();
        for idx in indices {
            if idx >= space.size {
                return Err(Error::hypothesis(format!("index {idx} outside [0, {})", space.size)));
            }
            members.push(idx as u32);
        }
        members.sort_unstable();
        members.dedup();
        Ok(SeqFamily { space, members })
    }

    fn from_dense(space: SeqSpace, inside: &[bool]) -> Self {
        let members = inside
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i as u32)
            .collect();
        SeqFamily { space, members }
    }

    pub fn full(m: usize, n: usize) -> Result<Self> {
        let space = SeqSpace::new(m, n)?;
        let members = (0..space.size as u32).collect();
        Ok(SeqFamily { space, members })
    }

    pub fn empty(m: usize, n: usize) -> Result<Self> {
        Ok(SeqFamily {
            space: SeqSpace::new(m, n)?,
            members: Vec::new(),
        })
    }

    pub fn space(&self) -> &SeqSpace {
        &self.space
    }

    pub fn m(&self) -> usize {
        self.space.m
    }

    pub fn n(&self) -> usize {
        self.space.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Member indices in ascending order.
    pub fn indices(&self) -> &[u32] {
        &self.members
    }

    pub fn vectors(&self) -> Vec<Vec<usize>> {
        self.members
            .iter()
            .map(|&i| self.space.vector_of(i as usize))
            .collect()
    }

    pub fn contains_index(&self, idx: usize) -> bool {
        self.members.binary_search(&(idx as u32)).is_ok()
    }

    pub fn is_subfamily_of(&self, other: &SeqFamily) -> bool {
        self.m() == other.m()
            && self.n() == other.n()
            && self.members.iter().all(|&i| other.contains_index(i as usize))
    }

    fn dense(&self) -> Vec<bool> {
        let mut inside = vec![false; self.space.size];
        for &i in &self.members {
            inside[i as usize] = true;
        }
        inside
    }

    fn same_space(&self, other: &SeqFamily) -> Result<()> {
        if self.m() != other.m() || self.n() != other.n() {
            return Err(Error::Mismatch {
                left: format!("[{}]^{}", self.m(), self.n()),
                right: format!("[{}]^{}", other.m(), other.n()),
            });
        }
        Ok(())
    }

    /// Every cross pair satisfies `req`; vacuous for empty families.
    pub fn is_cross_intersecting(&self, other: &SeqFamily, req: &Requirement) -> Result<bool> {
        self.same_space(other)?;
        self.space.check_requirement(req)?;
        Ok(self.members.iter().all(|&x| {
            other
                .members
                .iter()
                .all(|&y| self.space.meets(x as usize, y as usize, req))
        }))
    }

    /// Every cross meet holds at least `t_i` copies of each symbol `i`.
    pub fn is_cross_tvec_intersecting(&self, other: &SeqFamily, t: &ThresholdVector) -> Result<bool> {
        self.is_cross_intersecting(other, &Requirement::PerSymbol(t.clone()))
    }

    /// Every cross meet has at least `t` nonzero coordinates.
    pub fn is_cross_t_intersecting(&self, other: &SeqFamily, t: usize) -> Result<bool> {
        self.is_cross_intersecting(other, &Requirement::Total(t))
    }

    pub fn is_intersecting(&self, req: &Requirement) -> Result<bool> {
        self.is_cross_intersecting(self, req)
    }

    /// `{y : every x in the family meets y as required}`; all of `[m]^n` for
    /// the empty family.
    pub fn dual(&self, req: &Requirement) -> Result<SeqFamily> {
        self.space.check_requirement(req)?;
        let members = (0..self.space.size)
            .filter(|&y| {
                self.members
                    .iter()
                    .all(|&x| self.space.meets(x as usize, y, req))
            })
            .map(|y| y as u32)
            .collect();
        Ok(SeqFamily {
            space: self.space.clone(),
            members,
        })
    }

    fn check_symbols(&self, p: &SymbolSet) -> Result<()> {
        if p.m != self.m() {
            return Err(Error::Mismatch {
                left: format!("symbol set over [{}]", p.m),
                right: format!("family over [{}]", self.m()),
            });
        }
        if !p.is_proper() {
            return Err(Error::FullSymbolSet);
        }
        Ok(())
    }

    /// Smallest `P`-complete family containing this one: every coordinate
    /// whose symbol lies outside `P` is freed to take any value.
    pub fn p_complete_closure(&self, p: &SymbolSet) -> Result<SeqFamily> {
        self.check_symbols(p)?;
        let sp = &self.space;
        let mut inside = self.dense();
        // Freeing one coordinate at a time reaches every <_P successor: the
        // value at coordinate i is still the original one when i is freed.
        for i in 0..sp.n {
            let w = sp.powers[i];
            for idx in 0..sp.size {
                if !inside[idx] {
                    continue;
                }
                let d = sp.digit(idx, i);
                if p.contains(d) {
                    continue;
                }
                let base = idx - (d - 1) * w;
                for v in 0..sp.m {
                    inside[base + v * w] = true;
                }
            }
        }
        Ok(SeqFamily::from_dense(self.space.clone(), &inside))
    }

    pub fn is_p_complete(&self, p: &SymbolSet) -> Result<bool> {
        Ok(self.p_complete_closure(p)?.len() == self.len())
    }

    pub fn intersection(&self, other: &SeqFamily) -> Result<SeqFamily> {
        self.same_space(other)?;
        let members = self
            .members
            .iter()
            .copied()
            .filter(|&i| other.contains_index(i as usize))
            .collect();
        Ok(SeqFamily {
            space: self.space.clone(),
            members,
        })
    }
}

/// Verifies `|H1 ∩ H2| m^n <= |H1| |H2|` for a `P`-complete `H1` and a
/// `Q`-complete `H2` with `P`, `Q` nonempty, disjoint, and proper.
pub fn correlation_check(h1: &SeqFamily, h2: &SeqFamily, p: &SymbolSet, q: &SymbolSet) -> Result<bool> {
    h1.same_space(h2)?;
    if p.is_empty() || q.is_empty() {
        return Err(Error::hypothesis("symbol sets P and Q must be nonempty"));
    }
    if !p.is_disjoint(q) {
        return Err(Error::hypothesis("symbol sets P and Q must be disjoint"));
    }
    if !h1.is_p_complete(p)? {
        return Err(Error::hypothesis(format!("H1 is not P-complete for P = {:?}", p.symbols())));
    }
    if !h2.is_p_complete(q)? {
        return Err(Error::hypothesis(format!("H2 is not Q-complete for Q = {:?}", q.symbols())));
    }
    let common = h1.intersection(h2)?.len() as u128;
    Ok(common * h1.space.size as u128 <= h1.len() as u128 * h2.len() as u128)
}

impl PartialEq for SeqFamily {
    fn eq(&self, other: &Self) -> bool {
        self.m() == other.m() && self.n() == other.n() && self.members == other.members
    }
}

impl Eq for SeqFamily {}

impl fmt::Debug for SeqFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SeqFamily(m={}, n={}, {:?})", self.m(), self.n(), self.vectors())
    }
}
