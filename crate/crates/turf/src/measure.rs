//! Sorted samples, the empirical measure, and the A_k distance.
//!
//! The A_k distance between two measures is the largest absolute difference
//! of their masses over any union of at most `k` intervals. Against the
//! empirical measure the supremum may be attained on degenerate intervals
//! that pinch a single sample atom, so candidate evaluations are taken just
//! left and just right of every atom.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::poly::{isolate_roots, PiecewisePolynomial, RootFind, ROOT_TOL};

/// An owned, ascending sample array.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    xs: Vec<f64>,
}

impl SampleSet {
    /// Sorts and validates the samples (at least one, all finite).
    pub fn new(mut xs: Vec<f64>) -> Result<Self> {
        if xs.is_empty() {
            return Err(Error::invalid("sample set must not be empty"));
        }
        if xs.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("sample set contains non-finite values"));
        }
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(SampleSet { xs })
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.xs
    }

    pub fn min(&self) -> f64 {
        self.xs[0]
    }

    pub fn max(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    /// Number of samples strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        self.xs.partition_point(|v| *v < x)
    }

    /// Number of samples ≤ `x`.
    pub fn count_through(&self, x: f64) -> usize {
        self.xs.partition_point(|v| *v <= x)
    }
}

/// The measure placing mass `1/n` on each sample.
#[derive(Debug, Clone)]
pub struct EmpiricalMeasure {
    samples: Arc<SampleSet>,
}

impl EmpiricalMeasure {
    pub fn new(samples: Arc<SampleSet>) -> Self {
        EmpiricalMeasure { samples }
    }

    pub fn from_values(xs: Vec<f64>) -> Result<Self> {
        Ok(EmpiricalMeasure::new(Arc::new(SampleSet::new(xs)?)))
    }

    pub fn samples(&self) -> &SampleSet {
        &self.samples
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    /// Exact sample count inside `j`, honoring the half-open convention.
    pub fn count(&self, j: &Interval) -> usize {
        let hi = if j.closed_right {
            self.samples.count_through(j.hi)
        } else {
            self.samples.count_below(j.hi)
        };
        hi.saturating_sub(self.samples.count_below(j.lo))
    }

    /// Mass = count / n; an exact multiple of 1/n before division.
    pub fn mass(&self, j: &Interval) -> f64 {
        self.count(j) as f64 / self.n() as f64
    }
}

/// The exact A_k distance between the empirical measure and a piecewise
/// polynomial over `I`.
///
/// The discrepancy `D(x) = emp([I.lo, x)) − ∫_{I.lo}^x g` changes direction
/// only at sample atoms, piece breakpoints, and roots of `g`; both one-sided
/// values of `D` are collected at atoms. On that finite sequence the supremum
/// over unions of at most `k` intervals equals the best total profit from at
/// most `k` buy/sell round trips, taken over the sequence and its negation.
pub fn ak_distance(
    e: &EmpiricalMeasure,
    g: &PiecewisePolynomial,
    k: usize,
    i: &Interval,
) -> Result<f64> {
    let (pos, neg) = ak_distance_signed(e, g, k, i)?;
    Ok(pos.max(neg))
}

/// One-sided suprema: the largest `emp(S) − ∫_S g` and the largest
/// `∫_S g − emp(S)` over unions of at most `k` intervals. The A_k distance
/// is their maximum; the one-sided values are superadditive across disjoint
/// sub-intervals (the two-sided maximum is not when the sides disagree in
/// sign).
pub fn ak_distance_signed(
    e: &EmpiricalMeasure,
    g: &PiecewisePolynomial,
    k: usize,
    i: &Interval,
) -> Result<(f64, f64)> {
    if k < 1 {
        return Err(Error::invalid("A_k distance needs k >= 1"));
    }
    let values = discrepancy_profile(e, g, i)?;
    let neg: Vec<f64> = values.iter().map(|v| -v).collect();
    Ok((max_profit(&values, k), max_profit(&neg, k)))
}

/// Exhaustive A_k reference: maximizes over all unions of at most `k`
/// intervals with endpoints taken from `grid` (plus a pinch just left/right
/// of every atom). Lower-bounds [`ak_distance`] in general and matches it
/// when the grid contains all candidate breakpoints.
pub fn ak_distance_bruteforce(
    e: &EmpiricalMeasure,
    g: &PiecewisePolynomial,
    k: usize,
    i: &Interval,
    grid: &[f64],
) -> Result<f64> {
    if k < 1 {
        return Err(Error::invalid("A_k distance needs k >= 1"));
    }
    if grid.len() > 40 {
        return Err(Error::invalid("brute-force grid capped at 40 points"));
    }
    // Build one-sided discrepancy values at grid points and atoms, then
    // enumerate every choice of ≤ k disjoint index pairs. Points interior to
    // a monotone stretch can never be optimal endpoints, so the sequence is
    // first reduced to its alternating extrema; this keeps the enumeration
    // exhaustive over the values that matter while bounding its size.
    let mut points: Vec<f64> = grid
        .iter()
        .copied()
        .filter(|x| *x >= i.lo && *x <= i.hi)
        .collect();
    points.push(i.lo);
    points.push(i.hi);
    let values = reduce_to_extrema(&profile_at_points(e, g, i, &mut points)?);
    let mut best = 0.0f64;
    for sign in [1.0, -1.0] {
        let signed: Vec<f64> = values.iter().map(|v| sign * v).collect();
        enumerate_intervals(&signed, 0, k, 0.0, &mut best);
    }
    Ok(best)
}

/// Keeps only local minima/maxima (plus the endpoints) of a value sequence.
fn reduce_to_extrema(v: &[f64]) -> Vec<f64> {
    if v.len() <= 2 {
        return v.to_vec();
    }
    let mut out = vec![v[0]];
    for &x in &v[1..] {
        if x != *out.last().unwrap() {
            out.push(x);
        }
    }
    if out.len() <= 2 {
        return out;
    }
    let mut reduced = vec![out[0]];
    for w in out.windows(3) {
        let turning = (w[1] - w[0]) * (w[2] - w[1]) < 0.0;
        if turning {
            reduced.push(w[1]);
        }
    }
    reduced.push(*out.last().unwrap());
    reduced
}

fn enumerate_intervals(v: &[f64], from: usize, k_left: usize, acc: f64, best: &mut f64) {
    if acc > *best {
        *best = acc;
    }
    if k_left == 0 {
        return;
    }
    for start in from..v.len() {
        for end in (start + 1)..v.len() {
            let gain = v[end] - v[start];
            enumerate_intervals(v, end + 1, k_left - 1, acc + gain, best);
        }
    }
}

/// Candidate one-sided values of the discrepancy function over `I`, in
/// position order.
fn discrepancy_profile(
    e: &EmpiricalMeasure,
    g: &PiecewisePolynomial,
    i: &Interval,
) -> Result<Vec<f64>> {
    let mut points: Vec<f64> = vec![i.lo, i.hi];
    for p in g.pieces() {
        let d = p.domain();
        for edge in [d.lo, d.hi] {
            if edge > i.lo && edge < i.hi {
                points.push(edge);
            }
        }
        if let Some(seg) = d.intersect(i) {
            if seg.width() > 0.0 {
                if let RootFind::Roots(roots) = isolate_roots(p, &seg, ROOT_TOL)? {
                    points.extend(roots);
                }
            }
        }
    }
    profile_at_points(e, g, i, &mut points)
}

/// Shared profile builder: evaluates `D` at the given points (one value per
/// plain point, two one-sided values per atom location inside `I`).
fn profile_at_points(
    e: &EmpiricalMeasure,
    g: &PiecewisePolynomial,
    i: &Interval,
    points: &mut Vec<f64>,
) -> Result<Vec<f64>> {
    let xs = e.samples().values();
    let lo_idx = xs.partition_point(|v| *v < i.lo);
    let hi_idx = if i.closed_right {
        xs.partition_point(|v| *v <= i.hi)
    } else {
        xs.partition_point(|v| *v < i.hi)
    };
    points.extend(xs[lo_idx..hi_idx].iter().copied());
    points.retain(|x| *x >= i.lo && *x <= i.hi);
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    points.dedup();

    let n = e.n() as f64;
    let mut values = Vec::with_capacity(points.len() * 2);
    let mut mass_int = 0.0; // running ∫ g from i.lo
    let mut prev = i.lo;
    let mut atom_idx = lo_idx;
    let mut emp_before = 0.0; // emp mass of atoms strictly left of the cursor
    for &x in points.iter() {
        if x > prev {
            mass_int += g.mass_over(&Interval::new(prev, x)?)?;
            prev = x;
        }
        // Count atoms exactly at x.
        let mut mult = 0usize;
        while atom_idx < hi_idx && xs[atom_idx] < x {
            atom_idx += 1;
        }
        let mut probe = atom_idx;
        while probe < hi_idx && xs[probe] == x {
            mult += 1;
            probe += 1;
        }
        let left = emp_before - mass_int;
        values.push(left);
        if mult > 0 {
            emp_before += mult as f64 / n;
            values.push(left + mult as f64 / n);
            atom_idx = probe;
        }
    }
    Ok(values)
}

/// Classic maximum total gain from at most `k` disjoint (buy, sell) index
/// pairs over a value sequence. Empty gains count as zero.
fn max_profit(values: &[f64], k: usize) -> f64 {
    if values.len() < 2 || k == 0 {
        return 0.0;
    }
    let k = k.min(values.len() / 2 + 1);
    let mut buy = vec![f64::NEG_INFINITY; k + 1];
    let mut sell = vec![0.0f64; k + 1];
    for &price in values {
        for j in 1..=k {
            buy[j] = buy[j].max(sell[j - 1] - price);
            sell[j] = sell[j].max(buy[j] + price);
        }
    }
    sell[k]
}
