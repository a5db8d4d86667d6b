//! The `(A, B)`-shift operator on set families, stability predicates, and
//! the joint stabilization schedule for cross-intersecting pairs.
//!
//! A shift with `|B| > |A|` moves a member up in size, so applying effective
//! shifts strictly increases the total member size of a pair. That sum is
//! bounded by `2 n 2^n`, which bounds the length of every schedule.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::setfam::{elements_of, full_mask, SetFamily, Threshold};

/// One `(A, B)`-shift with disjoint `A` and `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShiftSpec {
    a: u32,
    b: u32,
}

impl ShiftSpec {
    pub fn new(a: u32, b: u32) -> Result<Self> {
        if a & b != 0 {
            return Err(Error::OverlappingShift);
        }
        Ok(ShiftSpec { a, b })
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    /// `|A|`; a `(k, k+1)`-shift lives at level `k`.
    pub fn level(&self) -> usize {
        self.a.count_ones() as usize
    }

    /// Image of a single set, or `None` when the shift does not apply to it.
    fn image(&self, set: u32) -> Option<u32> {
        (set & self.a == self.a && set & self.b == 0).then(|| (set & !self.a) | self.b)
    }

    fn check_ground(&self, n: usize) -> Result<()> {
        let outside = (self.a | self.b) & !full_mask(n);
        if outside != 0 {
            return Err(Error::ElementOutOfRange {
                element: 32 - outside.leading_zeros() as usize,
                n,
            });
        }
        Ok(())
    }
}

/// Applies `S_{A,B}` to every member. Members whose image is already present
/// stay put, so the size of the family never changes.
pub fn shift_ab(family: &SetFamily, spec: &ShiftSpec) -> Result<SetFamily> {
    spec.check_ground(family.n())?;
    Ok(apply(family, spec))
}

fn apply(family: &SetFamily, spec: &ShiftSpec) -> SetFamily {
    let moved = family.iter().map(|set| match spec.image(set) {
        Some(img) if !family.contains(img) => img,
        _ => set,
    });
    SetFamily::from_masks(family.n(), moved).expect("shift stays inside the ground set")
}

fn changes(family: &SetFamily, spec: &ShiftSpec) -> bool {
    family
        .iter()
        .any(|set| matches!(spec.image(set), Some(img) if !family.contains(img)))
}

/// Submasks of `mask` with exactly `k` bits, in ascending numeric order.
pub(crate) fn submasks_of_size(mask: u32, k: usize) -> Vec<u32> {
    let bits = elements_of(mask);
    if k > bits.len() {
        return Vec::new();
    }
    let mut out = Vec::new();
    // Gosper's hack over positions within `bits`, then scatter.
    if k == 0 {
        return vec![0];
    }
    let len = bits.len();
    let mut combo: u64 = (1u64 << k) - 1;
    while combo < 1u64 << len {
        let mut sub = 0u32;
        for (j, &e) in bits.iter().enumerate() {
            if combo >> j & 1 == 1 {
                sub |= 1 << (e - 1);
            }
        }
        out.push(sub);
        let c = combo & combo.wrapping_neg();
        let r = combo + c;
        combo = (((r ^ combo) >> 2) / c) | r;
    }
    out.sort_unstable();
    out
}

/// Every `(k, k+1)`-shift on `[n]`, ordered by `(A-mask, B-mask)`.
pub fn level_shifts(n: usize, k: usize) -> Vec<ShiftSpec> {
    let full = full_mask(n);
    let mut specs = Vec::new();
    for a in submasks_of_size(full, k) {
        for b in submasks_of_size(full & !a, k + 1) {
            specs.push(ShiftSpec { a, b });
        }
    }
    specs
}

/// True iff every `(k, k+1)`-shift fixes the family.
pub fn is_stable(family: &SetFamily, k: usize) -> bool {
    let full = full_mask(family.n());
    family.iter().all(|set| {
        submasks_of_size(set, k).into_iter().all(|a| {
            submasks_of_size(full & !set, k + 1)
                .into_iter()
                .all(|b| family.contains((set & !a) | b))
        })
    })
}

/// Stable at every level `0..n`.
pub fn is_fully_stable(family: &SetFamily) -> bool {
    (0..family.n()).all(|k| is_stable(family, k))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub level: usize,
    #[serde(rename = "A", serialize_with = "as_elements")]
    pub a: u32,
    #[serde(rename = "B", serialize_with = "as_elements")]
    pub b: u32,
    pub potential: u64,
}

fn as_elements<S: serde::Serializer>(mask: &u32, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(elements_of(*mask))
}

/// Ordered log of the effective shifts applied by [`stabilize_pair`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StabilizationTrace {
    pub steps: Vec<TraceStep>,
    pub initial_potential: u64,
    pub final_potential: u64,
}

impl StabilizationTrace {
    /// `[{level, A, B, potential}, ...]`
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.steps).expect("trace serializes")
    }

    pub fn potential_strictly_increases(&self) -> bool {
        let mut last = self.initial_potential;
        self.steps.iter().all(|s| {
            let ok = s.potential > last;
            last = s.potential;
            ok
        })
    }
}

fn potential(f1: &SetFamily, f2: &SetFamily) -> u64 {
    f1.iter()
        .chain(f2.iter())
        .map(|m| u64::from(m.count_ones()))
        .sum()
}

/// Jointly shifts a cross `t`-intersecting pair until both families are
/// `(i, i+1)`-stable for every `0 <= i < n`.
///
/// Levels are scanned in increasing order and shifts within a level in
/// `(A-mask, B-mask)` order. Whenever a shift changes either family the
/// scan restarts at level 0, so a level-`k` shift is only ever applied to a
/// pair that is stable at all lower levels.
pub fn stabilize_pair(
    f1: &SetFamily,
    f2: &SetFamily,
    t: Threshold,
) -> Result<(SetFamily, SetFamily, StabilizationTrace)> {
    let top = f1.n().saturating_sub(1);
    stabilize_pair_through(f1, f2, t, top)
}

/// As [`stabilize_pair`], but only levels `0..=max_level` are used.
pub fn stabilize_pair_through(
    f1: &SetFamily,
    f2: &SetFamily,
    t: Threshold,
    max_level: usize,
) -> Result<(SetFamily, SetFamily, StabilizationTrace)> {
    if !f1.is_cross_t_intersecting(f2, t)? {
        return Err(Error::NotCrossIntersecting(t));
    }
    let n = f1.n();
    let schedule: Vec<Vec<ShiftSpec>> = (0..=max_level.min(n.saturating_sub(1)))
        .map(|k| level_shifts(n, k))
        .collect();

    let mut cur1 = f1.clone();
    let mut cur2 = f2.clone();
    let mut trace = StabilizationTrace {
        initial_potential: potential(&cur1, &cur2),
        ..Default::default()
    };
    'restart: loop {
        for (level, specs) in schedule.iter().enumerate() {
            for spec in specs {
                if changes(&cur1, spec) || changes(&cur2, spec) {
                    cur1 = apply(&cur1, spec);
                    cur2 = apply(&cur2, spec);
                    trace.steps.push(TraceStep {
                        level,
                        a: spec.a,
                        b: spec.b,
                        potential: potential(&cur1, &cur2),
                    });
                    continue 'restart;
                }
            }
        }
        break;
    }
    trace.final_potential = potential(&cur1, &cur2);
    Ok((cur1, cur2, trace))
}

pub fn min_member_size(family: &SetFamily) -> Result<usize> {
    family
        .iter()
        .map(|m| m.count_ones() as usize)
        .min()
        .ok_or(Error::EmptyFamily)
}

/// With `u` the smallest member size: every set larger than `u` is present
/// and no member is smaller than `u`.
pub fn check_layer_sandwich(family: &SetFamily) -> Result<bool> {
    let u = min_member_size(family)?;
    let upper_layers_present = (0..=full_mask(family.n()))
        .filter(|m| m.count_ones() as usize > u)
        .all(|m| family.contains(m));
    Ok(upper_layers_present)
}
