//! Intervals and ordered interval partitions of the real line.
//!
//! Everything downstream shares one boundary convention: intervals are
//! half-open `[lo, hi)`, except that the final interval of a partition is
//! closed at its right edge. A point sitting exactly on an interior boundary
//! therefore belongs to the interval on its right, and the masses of a
//! partition's intervals add up without double counting.

use crate::error::{Error, Result};

/// A finite interval `[lo, hi)`, optionally closed at `hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    /// Whether `hi` itself belongs to the interval. Only the last interval
    /// of a partition sets this.
    pub closed_right: bool,
}

impl Interval {
    /// Half-open `[lo, hi)`.
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::invalid(format!("non-finite interval [{lo}, {hi})")));
        }
        if lo > hi {
            return Err(Error::invalid(format!("interval [{lo}, {hi}) has lo > hi")));
        }
        Ok(Interval {
            lo,
            hi,
            closed_right: false,
        })
    }

    /// Closed `[lo, hi]`.
    pub fn closed(lo: f64, hi: f64) -> Result<Self> {
        let mut iv = Self::new(lo, hi)?;
        iv.closed_right = true;
        Ok(iv)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && (x < self.hi || (self.closed_right && x == self.hi))
    }

    /// Intersection as a plain half-open interval; `None` when empty.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo < hi {
            Some(Interval {
                lo,
                hi,
                closed_right: self.closed_right
                    && other.closed_right
                    && self.hi == hi
                    && other.hi == hi,
            })
        } else {
            None
        }
    }

    /// Maps `x` in `self` affinely onto the reference interval `[-1, 1]`.
    pub fn to_reference(&self, x: f64) -> f64 {
        2.0 * (x - self.lo) / (self.hi - self.lo) - 1.0
    }

    /// Inverse of [`Interval::to_reference`].
    pub fn from_reference(&self, u: f64) -> f64 {
        self.lo + 0.5 * (u + 1.0) * (self.hi - self.lo)
    }
}

/// Ordered, contiguous, disjoint intervals covering a root interval. The last
/// interval is closed at the right edge of the root.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    intervals: Vec<Interval>,
}

impl Partition {
    /// Builds a partition from its interior edges: `edges` must be strictly
    /// increasing with at least two entries; interval `i` is
    /// `[edges[i], edges[i+1])`, the last one closed.
    pub fn from_edges(edges: &[f64]) -> Result<Self> {
        Self::from_edges_with_end(edges, true)
    }

    /// Like [`Partition::from_edges`], but the caller decides whether the
    /// final interval owns its right edge (it must not when the partition
    /// subdivides an interior interval of a larger partition).
    pub fn from_edges_with_end(edges: &[f64], closed_end: bool) -> Result<Self> {
        if edges.len() < 2 {
            return Err(Error::invalid("partition needs at least two edges"));
        }
        let mut intervals = Vec::with_capacity(edges.len() - 1);
        for w in edges.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::invalid(format!(
                    "partition edges not strictly increasing at {} >= {}",
                    w[0], w[1]
                )));
            }
            intervals.push(Interval::new(w[0], w[1])?);
        }
        intervals.last_mut().unwrap().closed_right = closed_end;
        Ok(Partition { intervals })
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn root(&self) -> Interval {
        let mut iv = self.intervals[0];
        iv.hi = self.intervals.last().unwrap().hi;
        iv.closed_right = true;
        iv
    }

    pub fn edges(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.intervals.iter().map(|iv| iv.lo).collect();
        e.push(self.intervals.last().unwrap().hi);
        e
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interval> {
        self.intervals.iter()
    }
}
