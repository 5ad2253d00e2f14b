//! Canonical finite unions of closed intervals on the line.
//!
//! An [`IntervalSet`] is kept sorted, with every stored interval
//! non-degenerate (`lo < hi`) and strictly separated from its successor
//! (`hi_i < lo_{i+1}`). Touching intervals are merged. Comparisons are
//! exact; no merge epsilon is applied.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;
use crate::stats::NeumaierSum;

/// Closed interval `[lo, hi]`; serialized as `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[T; 2]", into = "[T; 2]")]
pub struct Interval<T: Copy> {
    pub lo: T,
    pub hi: T,
}

impl<T: Copy> From<[T; 2]> for Interval<T> {
    fn from([lo, hi]: [T; 2]) -> Self {
        Interval { lo, hi }
    }
}

impl<T: Copy> From<Interval<T>> for [T; 2] {
    fn from(iv: Interval<T>) -> Self {
        [iv.lo, iv.hi]
    }
}

impl<T: Real> Interval<T> {
    pub fn new(lo: T, hi: T) -> Self {
        Interval { lo, hi }
    }

    pub fn len(&self) -> T {
        self.hi - self.lo
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "Vec<Interval<T>>",
    into = "Vec<Interval<T>>",
    bound(
        serialize = "T: Real + Serialize",
        deserialize = "T: Real + Deserialize<'de>"
    )
)]
pub struct IntervalSet<T: Copy> {
    intervals: Vec<Interval<T>>,
}

impl<T: Real> TryFrom<Vec<Interval<T>>> for IntervalSet<T> {
    type Error = Error;

    fn try_from(raw: Vec<Interval<T>>) -> Result<Self> {
        IntervalSet::from_raw(raw.into_iter().map(|iv| (iv.lo, iv.hi)))
    }
}

impl<T: Copy> From<IntervalSet<T>> for Vec<Interval<T>> {
    fn from(set: IntervalSet<T>) -> Self {
        set.intervals
    }
}

fn cmp_lo<T: Real>(a: &Interval<T>, b: &Interval<T>) -> Ordering {
    a.lo.partial_cmp(&b.lo)
        .unwrap_or(Ordering::Equal)
        .then(a.hi.partial_cmp(&b.hi).unwrap_or(Ordering::Equal))
}

impl<T: Real> IntervalSet<T> {
    pub fn empty() -> Self {
        IntervalSet {
            intervals: Vec::new(),
        }
    }

    pub fn single(lo: T, hi: T) -> Result<Self> {
        Self::from_raw([(lo, hi)])
    }

    /// Builds a canonical set from arbitrary closed intervals.
    ///
    /// Sorts, drops degenerate pairs and merges overlapping or touching
    /// pairs. Non-finite endpoints or `lo > hi` are rejected.
    pub fn from_raw<I>(raw: I) -> Result<Self>
    where
        I: IntoIterator<Item = (T, T)>,
    {
        let mut intervals = Vec::new();
        for (i, (lo, hi)) in raw.into_iter().enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(invalid(format!("interval {i} has a non-finite endpoint")));
            }
            if lo > hi {
                return Err(invalid(format!("interval {i} has lo {lo} > hi {hi}")));
            }
            if lo < hi {
                intervals.push(Interval { lo, hi });
            }
        }
        intervals.sort_unstable_by(cmp_lo);
        Ok(Self::from_sorted(intervals))
    }

    /// Merges a list already sorted by `lo`; degenerate entries are dropped.
    pub(crate) fn from_sorted(sorted: Vec<Interval<T>>) -> Self {
        let mut out: Vec<Interval<T>> = Vec::with_capacity(sorted.len());
        for iv in sorted {
            if iv.lo.partial_cmp(&iv.hi) != Some(std::cmp::Ordering::Less) {
                continue;
            }
            match out.last_mut() {
                Some(last) if iv.lo <= last.hi => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                }
                _ => out.push(iv),
            }
        }
        IntervalSet { intervals: out }
    }

    /// Wraps intervals that are known to be canonical.
    pub(crate) fn from_canonical(intervals: Vec<Interval<T>>) -> Self {
        debug_assert!(Self::is_canonical_slice(&intervals));
        IntervalSet { intervals }
    }

    pub fn intervals(&self) -> &[Interval<T>] {
        &self.intervals
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interval<T>> {
        self.intervals.iter()
    }

    /// Number of stored (maximal) intervals.
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Lebesgue measure.
    pub fn measure(&self) -> T {
        self.intervals
            .iter()
            .map(Interval::len)
            .collect::<NeumaierSum<T>>()
            .value()
    }

    pub fn first(&self) -> Option<T> {
        self.intervals.first().map(|iv| iv.lo)
    }

    pub fn last(&self) -> Option<T> {
        self.intervals.last().map(|iv| iv.hi)
    }

    pub fn is_canonical(&self) -> bool {
        Self::is_canonical_slice(&self.intervals)
    }

    fn is_canonical_slice(ivs: &[Interval<T>]) -> bool {
        ivs.iter()
            .all(|iv| iv.lo.is_finite() && iv.hi.is_finite() && iv.lo < iv.hi)
            && ivs.windows(2).all(|w| w[0].hi < w[1].lo)
    }

    /// Image under `x ↦ scale·x + shift`, `scale > 0`.
    pub fn translate_scale(&self, scale: T, shift: T) -> Result<Self> {
        if !(scale > T::zero() && scale.is_finite()) || !shift.is_finite() {
            return Err(invalid(format!(
                "translate_scale needs finite scale > 0 and finite shift, got {scale}, {shift}"
            )));
        }
        // Rounding can close a small gap, so re-merge.
        Ok(Self::from_sorted(
            self.intervals
                .iter()
                .map(|iv| Interval {
                    lo: scale * iv.lo + shift,
                    hi: scale * iv.hi + shift,
                })
                .collect(),
        ))
    }

    pub fn union(&self, other: &Self) -> Self {
        let (a, b) = (&self.intervals, &other.intervals);
        let mut merged = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let take_a = j == b.len() || (i < a.len() && a[i].lo <= b[j].lo);
            if take_a {
                merged.push(a[i]);
                i += 1;
            } else {
                merged.push(b[j]);
                j += 1;
            }
        }
        Self::from_sorted(merged)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        for_each_overlap(&self.intervals, &other.intervals, T::zero(), |lo, hi| {
            out.push(Interval { lo, hi })
        });
        Self::from_sorted(out)
    }

    /// `self \ other` (closure of the set difference).
    pub fn difference(&self, other: &Self) -> Self {
        let b = &other.intervals;
        let mut out = Vec::new();
        let mut j = 0;
        for iv in &self.intervals {
            let mut lo = iv.lo;
            while j < b.len() && b[j].hi <= lo {
                j += 1;
            }
            let mut k = j;
            while k < b.len() && b[k].lo < iv.hi {
                if b[k].lo > lo {
                    out.push(Interval { lo, hi: b[k].lo });
                }
                if b[k].hi > lo {
                    lo = b[k].hi;
                }
                if lo >= iv.hi {
                    break;
                }
                k += 1;
            }
            if lo < iv.hi {
                out.push(Interval { lo, hi: iv.hi });
            }
        }
        Self::from_sorted(out)
    }

    /// True iff `measure(self \ other) ≤ tol`.
    pub fn subset_of(&self, other: &Self, tol: T) -> bool {
        self.difference(other).measure() <= tol
    }

    /// `measure(self ∩ other)` without building the intersection.
    pub fn overlap_measure(&self, other: &Self) -> T {
        let mut acc = NeumaierSum::new();
        for_each_overlap(&self.intervals, &other.intervals, T::zero(), |lo, hi| {
            acc.add(hi - lo)
        });
        acc.value()
    }

    /// `measure(self ∩ (self + shift))`.
    pub fn shifted_overlap_measure(&self, shift: T) -> T {
        let mut acc = NeumaierSum::new();
        for_each_overlap(&self.intervals, &self.intervals, shift, |lo, hi| {
            acc.add(hi - lo)
        });
        acc.value()
    }

    /// True iff every point lies in `[lo, hi]`.
    pub fn within(&self, lo: T, hi: T) -> bool {
        self.first().is_none_or(|f| f >= lo) && self.last().is_none_or(|l| l <= hi)
    }
}

/// Calls `f(lo, hi)` for every non-degenerate piece of `a ∩ (b + shift)`,
/// in increasing order.
fn for_each_overlap<T: Real>(
    a: &[Interval<T>],
    b: &[Interval<T>],
    shift: T,
    mut f: impl FnMut(T, T),
) {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let (blo, bhi) = (b[j].lo + shift, b[j].hi + shift);
        let lo = if a[i].lo > blo { a[i].lo } else { blo };
        let hi = if a[i].hi < bhi { a[i].hi } else { bhi };
        if lo < hi {
            f(lo, hi);
        }
        if a[i].hi < bhi {
            i += 1;
        } else {
            j += 1;
        }
    }
}

/// Hausdorff distance between the endpoint sets of two interval sets.
pub fn endpoint_hausdorff<T: Real>(a: &IntervalSet<T>, b: &IntervalSet<T>) -> T {
    let pa: Vec<T> = a.iter().flat_map(|iv| [iv.lo, iv.hi]).collect();
    let pb: Vec<T> = b.iter().flat_map(|iv| [iv.lo, iv.hi]).collect();
    match (pa.is_empty(), pb.is_empty()) {
        (true, true) => T::zero(),
        (true, false) | (false, true) => T::infinity(),
        _ => directed(&pa, &pb).max(directed(&pb, &pa)),
    }
}

// both inputs sorted ascending
fn directed<T: Real>(from: &[T], to: &[T]) -> T {
    let mut worst = T::zero();
    let mut j = 0;
    for &x in from {
        while j + 1 < to.len() && to[j + 1] <= x {
            j += 1;
        }
        let mut best = (x - to[j]).abs();
        if j + 1 < to.len() {
            best = best.min((to[j + 1] - x).abs());
        }
        worst = worst.max(best);
    }
    worst
}
