//! Superset-closed families on `[n]`, generated through the
//! decomposition of an up-set `U` on `[n]` into the pair
//! `U0 = {S in U : n not in S}` and `U1 = {S : S + n in U}` of up-sets on
//! `[n-1]` with `U0 ⊆ U1`.

use crate::error::{Error, Result};
use crate::setfam::SetFamily;

pub const MAX_UPSET_N: usize = 6;

/// All up-sets on `[n]` as bitsets over subset masks, for `n <= 5`.
pub fn upset_masks(n: usize) -> Result<Vec<u64>> {
    if n > 5 {
        return Err(Error::scale(format!("materializing up-sets needs n <= 5, got {n}")));
    }
    // n = 0: the empty family and {∅}
    let mut level: Vec<u64> = vec![0, 1];
    for k in 1..=n {
        let half = 1u32 << (k - 1);
        level = UpsetIter::from_lower(level, half).collect();
    }
    Ok(level)
}

/// Streams the up-sets on `[n]` obtained from the up-sets on `[n-1]`.
pub struct UpsetIter {
    lower: Vec<u64>,
    half: u32,
    outer: usize,
    inner: usize,
}

impl UpsetIter {
    fn from_lower(lower: Vec<u64>, half: u32) -> Self {
        UpsetIter {
            lower,
            half,
            outer: 0,
            inner: 0,
        }
    }
}

impl Iterator for UpsetIter {
    type Item = u64;

    /// Outer loop over `U1`, inner over `U0`.
    fn next(&mut self) -> Option<u64> {
        while self.outer < self.lower.len() {
            let u1 = self.lower[self.outer];
            while self.inner < self.lower.len() {
                let u0 = self.lower[self.inner];
                self.inner += 1;
                if u0 & !u1 == 0 {
                    return Some(u0 | u1 << self.half);
                }
            }
            self.outer += 1;
            self.inner = 0;
        }
        None
    }
}

/// Every superset-closed family on `[n]` exactly once, `1 <= n <= 6`.
pub fn enumerate_upsets(n: usize) -> Result<impl Iterator<Item = SetFamily>> {
    let raw = raw_upsets(n)?;
    Ok(raw.map(move |bits| {
        SetFamily::from_masks(n, super::bit_positions(bits)).expect("up-set lives on [n]")
    }))
}

fn raw_upsets(n: usize) -> Result<UpsetIter> {
    if n == 0 || n > MAX_UPSET_N {
        return Err(Error::scale(format!("up-set enumeration supports 1 <= n <= {MAX_UPSET_N}, got {n}")));
    }
    let lower = upset_masks(n - 1)?;
    Ok(UpsetIter::from_lower(lower, 1 << (n - 1)))
}

/// Number of up-sets on `[n]`, counted by streaming.
pub fn count_upsets(n: usize) -> Result<u64> {
    Ok(raw_upsets(n)?.count() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Scans all `2^(2^n)` families and keeps the up-closed ones.
    fn brute_force_upsets(n: usize) -> Vec<u64> {
        let cube = 1u32 << n;
        (0..1u64 << cube)
            .filter(|&fam| {
                (0..cube).filter(|s| fam >> s & 1 == 1).all(|s| {
                    (0..n).all(|i| fam >> (s | 1 << i) & 1 == 1)
                })
            })
            .collect()
    }

    #[test]
    fn counts_match_exhaustive_scan() {
        for (n, expected) in [(1usize, 3usize), (2, 6), (3, 20), (4, 168)] {
            let mut recursive = upset_masks(n).unwrap();
            assert_eq!(recursive.len(), expected);
            recursive.sort_unstable();
            assert_eq!(recursive, brute_force_upsets(n));
        }
        assert_eq!(upset_masks(5).unwrap().len(), 7581);
    }

    #[test]
    fn enumerates_families_once() {
        let fams: Vec<SetFamily> = enumerate_upsets(2).unwrap().collect();
        assert_eq!(fams.len(), 6);
        assert!(fams.iter().all(|f| f.is_up_closed()));
        let mut dedup = fams.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 6);
        let mut one: Vec<SetFamily> = enumerate_upsets(1).unwrap().collect();
        one.sort();
        let expected = vec![
            SetFamily::empty(1).unwrap(),
            SetFamily::from_masks(1, [0, 1]).unwrap(),
            SetFamily::from_masks(1, [1]).unwrap(),
        ];
        assert_eq!(one, expected);
    }

    #[test]
    fn scale_limits() {
        assert!(enumerate_upsets(0).is_err());
        assert!(enumerate_upsets(7).is_err());
    }
}
