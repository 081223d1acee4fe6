//! The geometric partition and the mass-matching "split" transform.
//!
//! A degree-`d` polynomial can swing fast only near the ends of its interval,
//! so a partition whose sub-intervals shrink roughly geometrically toward
//! both ends pins every polynomial close to its per-interval average while
//! keeping the interval count at most `k`. Adding a constant per sub-interval
//! then matches the estimate's mass to the empirical mass exactly, which is
//! what turns a decent polynomial estimate into a two-factor one.

use crate::error::{Error, Result};
use crate::interval::{Interval, Partition};
use crate::measure::EmpiricalMeasure;
use crate::poly::{PiecewisePolynomial, Polynomial};

const QUARTER_ROOT_2_MINUS_1: f64 = 0.18920711500272103; // 2^(1/4) - 1

/// Smallest admissible sub-interval budget for degree `d`.
pub fn min_split_budget(d: usize) -> usize {
    (4.0 * (d as f64 + 1.0) / QUARTER_ROOT_2_MINUS_1).ceil() as usize
}

/// The geometric partition of an interval, mirror-symmetric about the
/// midpoint with widths shrinking toward both ends.
#[derive(Debug, Clone)]
pub struct GeomPartition {
    pub d: usize,
    pub k: usize,
    /// Density parameter `ell = k (2^{1/4}-1) / (4 (d+1))`.
    pub ell: f64,
    /// Number of geometric levels per half.
    pub m: usize,
    pub partition: Partition,
}

/// Builds the geometric partition of `I` with at most `k` sub-intervals.
pub fn build_geom_partition(d: usize, k: usize, i: &Interval) -> Result<GeomPartition> {
    if k < min_split_budget(d) {
        return Err(Error::invalid(format!(
            "split budget k={k} below minimum {} for degree {d}",
            min_split_budget(d)
        )));
    }
    if !(i.width() > 0.0) {
        return Err(Error::invalid("geometric partition needs a positive-width interval"));
    }
    let dp1 = d as f64 + 1.0;
    let ell = k as f64 * QUARTER_ROOT_2_MINUS_1 / (4.0 * dp1);
    let m = ((ell * dp1 * dp1).log2().ceil() as i64).max(1) as usize;

    // Right half of [-1, 1]: level i spans [1 - 1/2^(i-1), 1 - 1/2^i), cut
    // into ceil(ell (d+1) / 2^(i/4)) equal slices; the terminal sliver
    // [1 - 1/2^m, 1] completes the half.
    let mut half_edges: Vec<f64> = vec![0.0];
    for level in 1..=m {
        let a = 1.0 - 0.5f64.powi(level as i32 - 1);
        let b = 1.0 - 0.5f64.powi(level as i32);
        let slices = (ell * dp1 / 2f64.powf(level as f64 / 4.0)).ceil() as usize;
        for s in 1..=slices {
            half_edges.push(a + (b - a) * s as f64 / slices as f64);
        }
    }
    half_edges.push(1.0);

    // Mirror about zero, then map [-1, 1] affinely onto I.
    let mut ref_edges: Vec<f64> = half_edges.iter().rev().map(|e| -e).collect();
    ref_edges.extend(half_edges.iter().skip(1));
    let edges: Vec<f64> = ref_edges
        .iter()
        .map(|&u| {
            if u == -1.0 {
                i.lo
            } else if u == 1.0 {
                i.hi
            } else {
                i.from_reference(u)
            }
        })
        .collect();
    // A sub-partition of an interior interval must not own its right edge.
    let partition = Partition::from_edges_with_end(&edges, i.closed_right)?;
    debug_assert!(partition.len() <= k);
    Ok(GeomPartition {
        d,
        k,
        ell,
        m,
        partition,
    })
}

/// Anything with a (signed) mass on intervals; the histogram and adjust
/// transforms work uniformly for functions and for the empirical measure.
pub trait MassSource {
    fn mass_on(&self, j: &Interval) -> Result<f64>;
}

impl MassSource for PiecewisePolynomial {
    fn mass_on(&self, j: &Interval) -> Result<f64> {
        self.mass_over(j)
    }
}

impl MassSource for EmpiricalMeasure {
    fn mass_on(&self, j: &Interval) -> Result<f64> {
        Ok(self.mass(j))
    }
}

/// The piecewise-constant histogram of `g` over a partition: on each
/// interval the signed average mass `∫_J g / |J|`, with zero for zero-width
/// intervals.
pub fn histogram<T: MassSource>(g: &T, p: &Partition) -> Result<PiecewisePolynomial> {
    let mut pieces = Vec::with_capacity(p.len());
    for j in p.iter() {
        let w = j.width();
        let avg = if w > 0.0 { g.mass_on(j)? / w } else { 0.0 };
        pieces.push(Polynomial::constant(avg, *j)?);
    }
    PiecewisePolynomial::new(pieces)
}

/// The split transform: over every sub-interval of the geometric partition
/// of `I`, shifts `fpoly` by a constant so that its mass there equals the
/// empirical mass exactly.
pub fn adjust_single(
    fpoly: &Polynomial,
    e: &EmpiricalMeasure,
    d: usize,
    k: usize,
    i: &Interval,
) -> Result<PiecewisePolynomial> {
    let geom = build_geom_partition(d, k, i)?;
    adjust_on_partition(fpoly, e, &geom.partition)
}

/// Split transform over an explicit partition (the geometric one in normal
/// use).
pub fn adjust_on_partition(
    fpoly: &Polynomial,
    e: &EmpiricalMeasure,
    p: &Partition,
) -> Result<PiecewisePolynomial> {
    let mut pieces = Vec::with_capacity(p.len());
    for j in p.iter() {
        let mut piece = fpoly.rebase(*j)?;
        let target = e.mass(j);
        let shift = (target - piece.integral()) / j.width();
        piece.shift(shift);
        pieces.push(piece);
    }
    PiecewisePolynomial::new(pieces)
}
