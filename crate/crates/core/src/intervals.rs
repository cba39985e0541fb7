//! Finite unions of half-open intervals `[lo, hi)` on the extended real line.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Sorted, disjoint, non-empty half-open intervals in canonical (merged) form.
///
/// A point `x` belongs to `[lo, hi)` iff `lo <= x < hi`; an interval starting
/// at `-inf` contains `-inf`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
}

impl IntervalSet {
    /// Validates and canonicalises a list of intervals. The list must already
    /// be sorted and non-overlapping; touching intervals are merged.
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
        for (lo, hi) in intervals {
            if lo.is_nan() || hi.is_nan() {
                return Err(Error::input("interval endpoints must not be NaN"));
            }
            if !(lo < hi) || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return Err(Error::input(alloc::format!("empty interval [{lo}, {hi})")));
            }
            match out.last_mut() {
                Some(last) if lo < last.1 => {
                    return Err(Error::input("intervals overlap or are not sorted"));
                }
                Some(last) if lo == last.1 => last.1 = hi,
                _ => out.push((lo, hi)),
            }
        }
        Ok(IntervalSet { intervals: out })
    }

    pub fn empty() -> Self {
        IntervalSet {
            intervals: Vec::new(),
        }
    }

    pub fn full() -> Self {
        IntervalSet {
            intervals: alloc::vec![(f64::NEG_INFINITY, f64::INFINITY)],
        }
    }

    /// `[t, inf)`.
    pub fn at_least(t: f64) -> Self {
        IntervalSet::new(alloc::vec![(t, f64::INFINITY)]).unwrap_or_else(|_| Self::empty())
    }

    /// `[-inf, t)`.
    pub fn below(t: f64) -> Self {
        IntervalSet::new(alloc::vec![(f64::NEG_INFINITY, t)]).unwrap_or_else(|_| Self::empty())
    }

    /// Region whose membership starts as `starts_inside` at `-inf` and flips at
    /// each of the sorted `toggles`.
    pub fn from_toggles(starts_inside: bool, toggles: &[f64]) -> Result<Self> {
        let mut inside = starts_inside;
        let mut start = f64::NEG_INFINITY;
        let mut out = Vec::new();
        for &t in toggles {
            if inside {
                out.push((start, t));
            }
            start = t;
            inside = !inside;
        }
        if inside {
            out.push((start, f64::INFINITY));
        }
        IntervalSet::new(out)
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.intervals == [(f64::NEG_INFINITY, f64::INFINITY)]
    }

    pub fn contains(&self, x: f64) -> bool {
        // Last interval with lo <= x.
        let idx = self.intervals.partition_point(|&(lo, _)| lo <= x);
        idx > 0 && {
            let (lo, hi) = self.intervals[idx - 1];
            lo <= x && x < hi || (lo == f64::NEG_INFINITY && x == f64::NEG_INFINITY)
        }
    }

    /// Whether membership at `-inf` holds.
    pub fn starts_inside(&self) -> bool {
        self.intervals
            .first()
            .is_some_and(|&(lo, _)| lo == f64::NEG_INFINITY)
    }

    /// Finite endpoints in ascending order; these are the decision boundary.
    pub fn boundaries(&self) -> Vec<f64> {
        self.intervals
            .iter()
            .flat_map(|&(lo, hi)| [lo, hi])
            .filter(|v| v.is_finite())
            .collect()
    }

    pub fn complement(&self) -> Self {
        IntervalSet::from_toggles(!self.starts_inside(), &self.boundaries())
            .expect("complement of a canonical set is canonical")
    }

    pub fn union(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a && !b)
    }

    pub fn symmetric_difference(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a != b)
    }

    fn combine(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Self {
        let mut cuts: Vec<f64> = self.boundaries();
        cuts.extend(other.boundaries());
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        // Membership is constant on each elementary piece, so sample it at the
        // piece's left end.
        let mut state = op(self.starts_inside(), other.starts_inside());
        let start = state;
        let mut toggles = Vec::new();
        for &c in &cuts {
            let s = op(self.contains(c), other.contains(c));
            if s != state {
                toggles.push(c);
                state = s;
            }
        }
        IntervalSet::from_toggles(start, &toggles).expect("toggles are strictly increasing")
    }

    /// Lebesgue measure of the part of the set inside `[lo, hi]`.
    pub fn measure_within(&self, lo: f64, hi: f64) -> f64 {
        self.intervals
            .iter()
            .map(|&(a, b)| (b.min(hi) - a.max(lo)).max(0.0))
            .sum()
    }

    /// Drops intervals no longer than `width`. Unbounded intervals are kept.
    pub fn without_slivers(&self, width: f64) -> Self {
        IntervalSet {
            intervals: self
                .intervals
                .iter()
                .copied()
                .filter(|&(a, b)| b - a > width)
                .collect(),
        }
    }

    /// Lexicographic order on the endpoint sequence, with shorter sets first.
    pub fn lex_cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            self.intervals
                .iter()
                .zip(&other.intervals)
                .map(|(a, b)| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)))
                .find(|o| o.is_ne())
                .unwrap_or(core::cmp::Ordering::Equal)
        })
    }
}

fn fmt_endpoint(v: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if v == f64::INFINITY {
        f.write_str("inf")
    } else if v == f64::NEG_INFINITY {
        f.write_str("-inf")
    } else {
        write!(f, "{v}")
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return f.write_str("{}");
        }
        for (i, &(lo, hi)) in self.intervals.iter().enumerate() {
            if i > 0 {
                f.write_str(" u ")?;
            }
            f.write_str("[")?;
            fmt_endpoint(lo, f)?;
            f.write_str(", ")?;
            fmt_endpoint(hi, f)?;
            f.write_str(")")?;
        }
        Ok(())
    }
}

// Infinite endpoints are written as the strings "-inf"/"inf" so that the
// encoding survives formats without IEEE infinities.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Endpoint {
    Finite(f64),
    Named(String),
}

impl Endpoint {
    fn encode(v: f64) -> Self {
        if v.is_finite() {
            Endpoint::Finite(v)
        } else if v > 0.0 {
            Endpoint::Named("inf".into())
        } else {
            Endpoint::Named("-inf".into())
        }
    }

    fn decode(self) -> core::result::Result<f64, &'static str> {
        match self {
            Endpoint::Finite(v) => Ok(v),
            Endpoint::Named(s) if s == "inf" => Ok(f64::INFINITY),
            Endpoint::Named(s) if s == "-inf" => Ok(f64::NEG_INFINITY),
            Endpoint::Named(_) => Err("expected a number, \"inf\" or \"-inf\""),
        }
    }
}

impl Serialize for IntervalSet {
    fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        let enc: Vec<(Endpoint, Endpoint)> = self
            .intervals
            .iter()
            .map(|&(a, b)| (Endpoint::encode(a), Endpoint::encode(b)))
            .collect();
        enc.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntervalSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = Vec::<(Endpoint, Endpoint)>::deserialize(d)?;
        let ivs = raw
            .into_iter()
            .map(|(a, b)| Ok((a.decode()?, b.decode()?)))
            .collect::<core::result::Result<Vec<_>, &str>>()
            .map_err(D::Error::custom)?;
        IntervalSet::new(ivs).map_err(D::Error::custom)
    }
}
