//! Interval partitioners: greedy adjacent merging and the dyadic stitch.
//!
//! Both produce a [`FittedPartition`]: contiguous intervals covering the
//! sample range, a node-interpolation fit per interval, and each fit's
//! A_{d+1} distance to the empirical measure on its interval.
//!
//! The greedy merger starts from small equal-count buckets and repeatedly
//! merges adjacent pairs, always sparing the pairs whose merged fit looks
//! worst. The stitch walks the dyadic hierarchy over a power-of-two sample
//! count bottom-up, merging a block whenever `comp` certifies that no binary
//! refinement of it beats the merged fit by more than the deviation credit.

use crate::error::{Error, Result};
use crate::fit::{fit_eq, node_spec, NodeSpec};
use crate::interval::{Interval, Partition};
use crate::measure::{ak_distance, EmpiricalMeasure};
use crate::poly::{l1_pp_over, PiecewisePolynomial, Polynomial};

/// A partition with per-interval polynomial fits and fit errors.
#[derive(Debug, Clone)]
pub struct FittedPartition {
    pub partition: Partition,
    pub fits: Vec<Polynomial>,
    /// A_{d+1} distance of each fit to the empirical measure on its interval.
    pub errors: Vec<f64>,
}

impl FittedPartition {
    /// Concatenates the per-interval fits into one piecewise polynomial.
    pub fn to_piecewise(&self) -> Result<PiecewisePolynomial> {
        PiecewisePolynomial::new(self.fits.clone())
    }
}

/// One round of the greedy merge, for inspection by tests: the candidate
/// pair errors and which pairs were kept split.
#[derive(Debug, Clone)]
pub struct MergeRound {
    pub pair_errors: Vec<f64>,
    pub kept: Vec<usize>,
}

/// Greedy merging of adjacent equal-count buckets.
///
/// Buckets of `d+1` samples are paired left to right; each candidate pair is
/// scored by the A_{d+1} distance of the merged interval's fit to the
/// empirical measure, the `ceil(beta*t)` worst pairs stay split, everything
/// else merges, and rounds repeat until at most `2*ceil(beta*t)` intervals
/// remain. Per-interval errors below `eta` are floored at `eta`.
pub fn greedy_merge(
    e: &EmpiricalMeasure,
    t: usize,
    d: usize,
    beta: f64,
    eta: f64,
) -> Result<FittedPartition> {
    greedy_merge_with_trace(e, t, d, beta, eta).map(|(fp, _)| fp)
}

/// [`greedy_merge`] plus the per-round trace.
pub fn greedy_merge_with_trace(
    e: &EmpiricalMeasure,
    t: usize,
    d: usize,
    beta: f64,
    eta: f64,
) -> Result<(FittedPartition, Vec<MergeRound>)> {
    if t < 1 {
        return Err(Error::invalid("greedy merge needs t >= 1"));
    }
    if !(beta > 1.0) {
        return Err(Error::invalid("greedy merge needs beta > 1"));
    }
    let keep = (beta * t as f64).ceil() as usize;
    let n = e.n();
    if n < 2 * keep * (d + 1) {
        return Err(Error::invalid(format!(
            "greedy merge needs at least {} samples for t={t}, d={d}, beta={beta}; got {n}",
            2 * keep * (d + 1)
        )));
    }
    let spec = node_spec(d)?;

    // Atomic buckets of d+1 samples, described by sample-index edges.
    let xs = e.samples().values();
    let mut index_edges: Vec<usize> = (0..n).step_by(d + 1).collect();
    if *index_edges.last().unwrap() != n - 1 {
        index_edges.push(n - 1);
    }
    // Collapse duplicate sample values so every interval has positive width.
    let mut intervals: Vec<(usize, usize)> = Vec::new();
    for w in index_edges.windows(2) {
        if xs[w[0]] < xs[w[1]] {
            intervals.push((w[0], w[1]));
        } else if let Some(last) = intervals.last_mut() {
            last.1 = w[1];
        }
    }
    if intervals.is_empty() {
        return Err(Error::invalid("all samples are equal; no partition exists"));
    }

    let interval_of = |(a, b): (usize, usize)| -> Interval {
        if b == n - 1 {
            Interval {
                lo: xs[a],
                hi: xs[b],
                closed_right: true,
            }
        } else {
            Interval {
                lo: xs[a],
                hi: xs[b],
                closed_right: false,
            }
        }
    };
    let score = |span: (usize, usize)| -> Result<f64> {
        let j = interval_of(span);
        let fitp = fit_eq(e, &j, spec)?;
        let one = PiecewisePolynomial::new(vec![fitp])?;
        ak_distance(e, &one, d + 1, &j)
    };

    let mut trace = Vec::new();
    while intervals.len() > 2 * keep {
        let pairs = intervals.len() / 2;
        let mut pair_errors = Vec::with_capacity(pairs);
        for p in 0..pairs {
            let merged = (intervals[2 * p].0, intervals[2 * p + 1].1);
            pair_errors.push(score(merged)?);
        }
        // Worst pairs stay split; ties break toward the leftmost pair. At
        // least one pair must merge each round so the loop terminates.
        let keep_now = keep.min(pairs - 1);
        let mut order: Vec<usize> = (0..pairs).collect();
        order.sort_by(|&a, &b| {
            pair_errors[b]
                .partial_cmp(&pair_errors[a])
                .unwrap()
                .then(a.cmp(&b))
        });
        let kept: Vec<usize> = {
            let mut k: Vec<usize> = order[..keep_now].to_vec();
            k.sort_unstable();
            k
        };
        let mut next = Vec::with_capacity(pairs + keep_now + 1);
        let mut kept_iter = kept.iter().peekable();
        for p in 0..pairs {
            if kept_iter.peek() == Some(&&p) {
                kept_iter.next();
                next.push(intervals[2 * p]);
                next.push(intervals[2 * p + 1]);
            } else {
                next.push((intervals[2 * p].0, intervals[2 * p + 1].1));
            }
        }
        if intervals.len() % 2 == 1 {
            next.push(*intervals.last().unwrap());
        }
        trace.push(MergeRound { pair_errors, kept });
        intervals = next;
    }

    let mut fits = Vec::with_capacity(intervals.len());
    let mut errors = Vec::with_capacity(intervals.len());
    let mut edges = Vec::with_capacity(intervals.len() + 1);
    edges.push(xs[intervals[0].0]);
    for &span in &intervals {
        let j = interval_of(span);
        fits.push(fit_eq(e, &j, spec)?);
        let one = PiecewisePolynomial::new(vec![fits.last().unwrap().clone()])?;
        errors.push(ak_distance(e, &one, d + 1, &j)?.max(eta));
        edges.push(j.hi);
    }
    let partition = Partition::from_edges(&edges)?;
    Ok((
        FittedPartition {
            partition,
            fits,
            errors,
        },
        trace,
    ))
}

/// An empirical distribution whose interval masses are all powers of 1/2.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryDistribution {
    /// Sample count per interval, each a power of two.
    pub counts: Vec<usize>,
    /// Dyadic masses `counts / n`, summing to one.
    pub probs: Vec<f64>,
}

/// Result of the dyadic stitch: the fitted partition (degenerate zero-width
/// intervals folded away) and the underlying binary distribution.
#[derive(Debug, Clone)]
pub struct StitchResult {
    pub fitted: FittedPartition,
    pub binary: BinaryDistribution,
}

/// Bottom-up dyadic merging.
///
/// Requires a power-of-two sample count. Level `i` scans the `n / 2^i`
/// blocks of `2^i` consecutive sorted samples and merges a block's current
/// sub-partition whenever [`comp`] is non-positive for the block's fit at
/// threshold `gamma = alpha * r_d * eps * sqrt(d+1)`.
pub fn stitch(e: &EmpiricalMeasure, d: usize, alpha: f64, eps: f64) -> Result<StitchResult> {
    let n = e.n();
    if n < 8 || !n.is_power_of_two() {
        return Err(Error::invalid(format!(
            "stitch needs a power-of-two sample count >= 8, got {n}"
        )));
    }
    if !(alpha > 2.0) {
        return Err(Error::invalid("stitch threshold alpha must exceed 2"));
    }
    if !(eps > 0.0) {
        return Err(Error::invalid("stitch deviation scale eps must be positive"));
    }
    let spec = node_spec(d)?;
    let gamma = alpha * spec.ratio * eps * ((d + 1) as f64).sqrt();
    let levels = n.trailing_zeros() as usize;

    // Interior cut indices of the current partition; laminar in the dyadic
    // tree by construction.
    let mut cuts: Vec<bool> = vec![true; n]; // cuts[j] = boundary before sample j
    cuts[0] = false; // index 0 is the left edge, not an interior cut

    for level in 1..=levels {
        let block = 1usize << level;
        // Normalizing a block to unit mass multiplies the comparison by the
        // block's global mass; fits stay globally normalized here, so the
        // threshold scales instead.
        let gamma_block = gamma * block as f64 / n as f64;
        for start in (0..n).step_by(block) {
            let has_interior = cuts[start + 1..start + block].iter().any(|&c| c);
            if !has_interior {
                continue;
            }
            let j = sample_range_interval(e, start, start + block);
            let fhat = match fit_on(e, &j, spec)? {
                Some(p) => PiecewisePolynomial::new(vec![p])?,
                None => continue, // zero-width block: nothing to compare
            };
            let mu = comp_range(e, &fhat, start, start + block, &cuts, spec, gamma_block)?;
            if mu <= 0.0 {
                for c in cuts[start + 1..start + block].iter_mut() {
                    *c = false;
                }
            }
        }
    }

    // Materialize the partition. Zero-width intervals (duplicate samples or
    // the degenerate last single-sample leaf) fold into their left neighbor.
    let xs = e.samples().values();
    let mut counts = Vec::new();
    let mut probs = Vec::new();
    let mut edges: Vec<f64> = vec![xs[0]];
    let mut begin = 0usize;
    for jdx in 1..=n {
        if jdx < n && !cuts[jdx] {
            continue;
        }
        let count = jdx - begin;
        counts.push(count);
        probs.push(count as f64 / n as f64);
        let hi = if jdx == n { xs[n - 1] } else { xs[jdx] };
        if hi > *edges.last().unwrap() {
            edges.push(hi);
        }
        begin = jdx;
    }
    let partition = Partition::from_edges(&edges)?;
    let mut fits = Vec::with_capacity(partition.len());
    let mut errors = Vec::with_capacity(partition.len());
    for j in partition.iter() {
        let fitp = fit_eq(e, j, spec)?;
        let one = PiecewisePolynomial::new(vec![fitp.clone()])?;
        errors.push(ak_distance(e, &one, d + 1, j)?);
        fits.push(fitp);
    }
    Ok(StitchResult {
        fitted: FittedPartition {
            partition,
            fits,
            errors,
        },
        binary: BinaryDistribution { counts, probs },
    })
}

/// The bias-versus-deviation comparison statistic over a dyadic sample block.
///
/// `cuts[j]` marks a partition boundary immediately before sorted sample `j`;
/// the block `[from, to)` must contain a number of samples that is a power of
/// two and its cuts must be laminar in the block's binary tree. Returns the
/// largest value of (ℓ1 gap between a candidate refinement's fit and `fhat`)
/// minus the candidate's deviation credit, over all binary coarsenings of the
/// current partition. A single-interval block returns
/// `∫|fit − fhat| − gamma`; otherwise the block splits at its sample median
/// with the credit scaled by `1/sqrt(2)` on each side.
pub fn comp(
    e: &EmpiricalMeasure,
    fhat: &PiecewisePolynomial,
    from: usize,
    to: usize,
    cuts: &[bool],
    d: usize,
    gamma: f64,
) -> Result<f64> {
    if to <= from || to > e.n() || !(to - from).is_power_of_two() {
        return Err(Error::invalid(
            "comp needs a power-of-two sample block inside the sample range",
        ));
    }
    let spec = node_spec(d)?;
    comp_range(e, fhat, from, to, cuts, spec, gamma)
}

fn comp_range(
    e: &EmpiricalMeasure,
    fhat: &PiecewisePolynomial,
    from: usize,
    to: usize,
    cuts: &[bool],
    spec: &NodeSpec,
    gamma: f64,
) -> Result<f64> {
    let j = sample_range_interval(e, from, to);
    let lambda = match fit_on(e, &j, spec)? {
        Some(fitp) => {
            let one = PiecewisePolynomial::new(vec![fitp])?;
            l1_pp_over(&one, fhat, &Interval::new(j.lo, j.hi)?)?
        }
        None => 0.0,
    };
    let mu = lambda - gamma;
    if to - from == 1 {
        return Ok(mu);
    }
    let mid = from + (to - from) / 2;
    let has_interior = cuts[from + 1..to].iter().any(|&c| c);
    if !has_interior {
        return Ok(mu);
    }
    if !cuts[mid] {
        return Err(Error::invalid(
            "block partition is not laminar in the dyadic tree",
        ));
    }
    let scaled = gamma / std::f64::consts::SQRT_2;
    let left = comp_range(e, fhat, from, mid, cuts, spec, scaled)?;
    let right = comp_range(e, fhat, mid, to, cuts, spec, scaled)?;
    Ok(mu.max(left + right))
}

/// Spatial interval spanned by sorted samples `[from, to)`; right edge is the
/// next sample, or the maximum sample (closed) at the end. May be zero-width
/// for duplicate samples or the last single-sample range.
fn sample_range_interval(e: &EmpiricalMeasure, from: usize, to: usize) -> Interval {
    let xs = e.samples().values();
    let n = e.n();
    if to >= n {
        Interval {
            lo: xs[from],
            hi: xs[n - 1],
            closed_right: true,
        }
    } else {
        Interval {
            lo: xs[from],
            hi: xs[to],
            closed_right: false,
        }
    }
}

fn fit_on(e: &EmpiricalMeasure, j: &Interval, spec: &NodeSpec) -> Result<Option<Polynomial>> {
    if !(j.width() > 0.0) {
        return Ok(None);
    }
    fit_eq(e, j, spec).map(Some)
}

/// Enumerates every binary coarsening of the current cuts inside a block and
/// maximizes directly; test oracle for [`comp`].
pub fn comp_bruteforce(
    e: &EmpiricalMeasure,
    fhat: &PiecewisePolynomial,
    from: usize,
    to: usize,
    cuts: &[bool],
    d: usize,
    gamma: f64,
) -> Result<f64> {
    if to <= from || to > e.n() || !(to - from).is_power_of_two() {
        return Err(Error::invalid(
            "comp needs a power-of-two sample block inside the sample range",
        ));
    }
    let spec = node_spec(d)?;
    // Candidate values per node, combined bottom-up: every candidate is
    // either this node merged, or a product of candidates of the halves.
    fn candidates(
        e: &EmpiricalMeasure,
        fhat: &PiecewisePolynomial,
        from: usize,
        to: usize,
        cuts: &[bool],
        spec: &NodeSpec,
        gamma: f64,
    ) -> Result<Vec<f64>> {
        let j = sample_range_interval(e, from, to);
        let lambda = match fit_on(e, &j, spec)? {
            Some(fitp) => {
                let one = PiecewisePolynomial::new(vec![fitp])?;
                l1_pp_over(&one, fhat, &Interval::new(j.lo, j.hi)?)?
            }
            None => 0.0,
        };
        let merged = lambda - gamma;
        let mid = from + (to - from) / 2;
        let has_interior = to - from > 1 && cuts[from + 1..to].iter().any(|&c| c);
        if !has_interior {
            return Ok(vec![merged]);
        }
        let scaled = gamma / std::f64::consts::SQRT_2;
        let lefts = candidates(e, fhat, from, mid, cuts, spec, scaled)?;
        let rights = candidates(e, fhat, mid, to, cuts, spec, scaled)?;
        let mut all = vec![merged];
        for l in &lefts {
            for r in &rights {
                all.push(l + r);
            }
        }
        Ok(all)
    }
    let all = candidates(e, fhat, from, to, cuts, spec, gamma)?;
    Ok(all.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Default deviation scale for [`stitch`], tuned so the concentration event
/// behind the credit holds with high probability at sample size `n`.
pub fn default_stitch_eps(n: usize) -> f64 {
    let nf = n as f64;
    ((nf * (nf + 1.0)).ln() / (nf - 1.0)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn uniform_measure(n: usize, seed: u64) -> EmpiricalMeasure {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        EmpiricalMeasure::from_values(xs).unwrap()
    }

    #[test]
    fn budget_saturation_returns_atomic_buckets() {
        let e = uniform_measure(64, 1);
        // 2*ceil(beta*t) = 64 buckets >= 64/1 atomic buckets: nothing merges.
        let fp = greedy_merge(&e, 16, 0, 2.0, 0.0).unwrap();
        assert_eq!(fp.partition.len(), 63); // 64 edges collapse to 63 buckets
        assert_eq!(fp.fits.len(), fp.partition.len());
    }

    #[test]
    fn merge_reduces_to_budget() {
        let e = uniform_measure(512, 7);
        let fp = greedy_merge(&e, 2, 1, 2.0, 0.0).unwrap();
        let keep = (2.0f64 * 2.0).ceil() as usize;
        assert!(fp.partition.len() <= 2 * keep);
        assert!(!fp.partition.is_empty());
        let root = fp.partition.root();
        assert_eq!(root.lo, e.samples().min());
        assert_eq!(root.hi, e.samples().max());
    }

    #[test]
    fn lattice_data_fits_constants_with_tiny_error() {
        // Exactly uniform lattice: every merged fit is the correct constant.
        let xs: Vec<f64> = (0..256).map(|i| (i as f64 + 0.5) / 256.0).collect();
        let e = EmpiricalMeasure::from_values(xs).unwrap();
        let fp = greedy_merge(&e, 1, 0, 2.0, 0.0).unwrap();
        for (fit, j) in fp.fits.iter().zip(fp.partition.iter()) {
            // Constant fits reproduce the lattice density on every interval
            // wide enough to smooth out single-cell effects.
            if j.width() > 4.0 / 256.0 {
                let density = fit.eval(j.midpoint());
                assert!((density - 1.0).abs() < 0.15, "density {density}");
            }
        }
        for err in &fp.errors {
            assert!(*err < 0.05);
        }
    }

    #[test]
    fn merge_preconditions() {
        let e = uniform_measure(16, 3);
        assert!(greedy_merge(&e, 4, 1, 2.0, 0.0).is_err()); // needs 32 samples
        assert!(greedy_merge(&e, 1, 0, 1.0, 0.0).is_err()); // beta must exceed 1
        assert!(greedy_merge(&e, 0, 0, 2.0, 0.0).is_err());
    }

    #[test]
    fn witness_rounds_spare_the_worst_pairs() {
        let e = uniform_measure(512, 11);
        let (_, trace) = greedy_merge_with_trace(&e, 2, 1, 2.0, 0.0).unwrap();
        assert!(!trace.is_empty());
        for round in &trace {
            let kept_min = round
                .kept
                .iter()
                .map(|&p| round.pair_errors[p])
                .fold(f64::INFINITY, f64::min);
            for (p, err) in round.pair_errors.iter().enumerate() {
                if !round.kept.contains(&p) {
                    assert!(*err <= kept_min + 1e-12);
                }
            }
        }
    }

    #[test]
    fn stitch_extreme_thresholds() {
        let e = uniform_measure(64, 5);
        // Huge credit: everything merges into a single interval.
        let merged = stitch(&e, 0, 1e9, 1.0).unwrap();
        assert_eq!(merged.fitted.partition.len(), 1);
        assert_eq!(merged.binary.counts, vec![64]);

        // Zero-ish credit: nothing merges; the degenerate last leaf folds
        // into its neighbor, so 63 spatial intervals carry 64 samples.
        let fine = stitch(&e, 0, 2.0 + 1e-9, 1e-300).unwrap();
        assert_eq!(fine.fitted.partition.len(), 63);
        assert_eq!(fine.binary.counts.len(), 64);
        let total: f64 = fine.binary.probs.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        for &c in &fine.binary.counts {
            assert!(c.is_power_of_two());
        }
    }

    #[test]
    fn stitch_preconditions() {
        let e = uniform_measure(48, 2);
        assert!(stitch(&e, 0, 3.0, 0.1).is_err()); // not a power of two
        let e = uniform_measure(64, 2);
        assert!(stitch(&e, 0, 2.0, 0.1).is_err()); // alpha must exceed 2
        assert!(stitch(&e, 0, 3.0, 0.0).is_err());
    }

    #[test]
    fn comp_of_self_fit_is_minus_gamma() {
        let e = uniform_measure(8, 9);
        let spec = node_spec(0).unwrap();
        let j = sample_range_interval(&e, 0, 8);
        let fitp = fit_eq(&e, &j, spec).unwrap();
        let fhat = PiecewisePolynomial::new(vec![fitp]).unwrap();
        let mut cuts = vec![false; 8];
        let mu = comp(&e, &fhat, 0, 8, &cuts, 0, 0.25).unwrap();
        assert!((mu + 0.25).abs() < 1e-12);

        // gamma = 0 with any candidate set stays non-negative.
        cuts[4] = true;
        let mu0 = comp(&e, &fhat, 0, 8, &cuts, 0, 0.0).unwrap();
        assert!(mu0 >= -1e-15);
    }

    #[test]
    fn comp_matches_enumeration_on_two_leaves() {
        let e = uniform_measure(16, 13);
        let spec = node_spec(1).unwrap();
        let j = sample_range_interval(&e, 0, 8);
        let fhat =
            PiecewisePolynomial::new(vec![fit_eq(&e, &j, spec).unwrap()]).unwrap();
        // Current partition: two 4-sample halves inside the 8-sample block.
        let mut cuts = vec![false; 16];
        cuts[4] = true;
        let fast = comp(&e, &fhat, 0, 8, &cuts, 1, 0.3).unwrap();
        let brute = comp_bruteforce(&e, &fhat, 0, 8, &cuts, 1, 0.3).unwrap();
        assert!((fast - brute).abs() < 1e-12);
    }
}
