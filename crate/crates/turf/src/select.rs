//! Picking the piece count `t` from a dyadic ladder of estimates.
//!
//! The selector never sees the target density. It relies on two facts: the
//! bias of the `t`-piece estimate can only shrink as `t` grows, and its
//! deviation grows like a known variance proxy `c_t`. The smallest rung
//! whose distance to every later rung stays below `gamma * c_t(later)` is
//! then within a constant of the best rung. Distances between rungs are
//! total-variation distances, half the ℓ1 distance, computed exactly on the
//! union of supports.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::estimator::{merge_only_estimate, turf, EstimatorConfig, SharedEstimate};
use crate::measure::EmpiricalMeasure;
use crate::poly::l1_pp;

/// One rung of the ladder.
#[derive(Debug, Clone)]
pub struct LadderEntry {
    pub t: usize,
    pub estimate: SharedEstimate,
    /// Variance proxy for this rung; non-decreasing in `t`.
    pub c_t: f64,
}

/// `sqrt(cprime * t * (d+1) + cdprime * ln(1/delta)) / sqrt(n)`.
pub fn variance_proxy(
    t: usize,
    d: usize,
    n: usize,
    delta: f64,
    cprime: f64,
    cdprime: f64,
) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("delta must lie in (0, 1)"));
    }
    Ok(
        (cprime * t as f64 * (d as f64 + 1.0) + cdprime * (1.0 / delta).ln()).sqrt()
            / (n as f64).sqrt(),
    )
}

/// Core selection rule over an abstract distance: the smallest index `i`
/// such that `dist(i, j) <= gamma * c[j]` for every `j > i`. The last index
/// qualifies vacuously, so a selection always exists.
pub fn select_index(
    len: usize,
    mut dist: impl FnMut(usize, usize) -> Result<f64>,
    c: &[f64],
    gamma: f64,
) -> Result<usize> {
    if len == 0 || c.len() != len {
        return Err(Error::invalid("selection needs a non-empty ladder"));
    }
    if !(gamma > 2.0) {
        return Err(Error::invalid("selection threshold gamma must exceed 2"));
    }
    'outer: for i in 0..len {
        for j in (i + 1)..len {
            if dist(i, j)? > gamma * c[j] {
                continue 'outer;
            }
        }
        return Ok(i);
    }
    unreachable!("the last index always qualifies");
}

/// Applies the selection rule to a ladder of estimates with TV distances.
/// Returns the selected `t`.
pub fn select_t(ladder: &[LadderEntry], gamma: f64) -> Result<usize> {
    let c: Vec<f64> = ladder.iter().map(|l| l.c_t).collect();
    let idx = select_index(
        ladder.len(),
        |i, j| tv_between(&ladder[i].estimate, &ladder[j].estimate),
        &c,
        gamma,
    )?;
    Ok(ladder[idx].t)
}

fn tv_between(a: &SharedEstimate, b: &SharedEstimate) -> Result<f64> {
    if Arc::ptr_eq(a, b) {
        return Ok(0.0);
    }
    Ok(0.5 * l1_pp(a, b)?)
}

/// Which estimator family the ladder is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderKind {
    /// Partition, fit, and mass-match.
    Turf,
    /// Partition and fit only.
    MergeOnly,
}

/// Outcome of cross-validated estimation.
#[derive(Debug, Clone)]
pub struct CvResult {
    pub t_hat: usize,
    pub estimate: SharedEstimate,
    pub ladder: Vec<LadderEntry>,
}

/// Builds the dyadic ladder `t = 1, 2, 4, ...` of estimates, stopping at the
/// largest power of two not above `n` or at the first rung the partitioner
/// cannot support, and selects `t` with threshold `gamma = 2 + 2/beta_cv`.
pub fn cv_estimate(
    e: &EmpiricalMeasure,
    d: usize,
    alpha: f64,
    beta_cv: f64,
    delta: f64,
    cfg: &EstimatorConfig,
    kind: LadderKind,
) -> Result<CvResult> {
    if !(beta_cv > 0.0 && beta_cv < 1.0) {
        return Err(Error::invalid("beta_cv must lie in (0, 1)"));
    }
    let n = e.n();
    let gamma = 2.0 + 2.0 / beta_cv;
    let mut ladder: Vec<LadderEntry> = Vec::new();
    let mut t = 1usize;
    while t <= n {
        let built = match kind {
            LadderKind::Turf => turf(e, t, d, alpha, cfg),
            LadderKind::MergeOnly => merge_only_estimate(e, t, d, cfg),
        };
        let estimate = match built {
            Ok(est) => est,
            // The ladder ends where the sample budget does.
            Err(Error::InvalidInput(_)) if !ladder.is_empty() => break,
            Err(err) => return Err(err),
        };
        // Saturated rungs produce identical estimates; share them so the
        // distance matrix can skip the integration.
        let shared = match ladder.last() {
            Some(prev) if *prev.estimate == estimate => Arc::clone(&prev.estimate),
            _ => Arc::new(estimate),
        };
        ladder.push(LadderEntry {
            t,
            estimate: shared,
            c_t: variance_proxy(t, d, n, delta, cfg.cv_cprime, cfg.cv_cdprime)?,
        });
        t *= 2;
    }
    if ladder.is_empty() {
        return Err(Error::invalid("no feasible ladder rung for these samples"));
    }
    let t_hat = select_t(&ladder, gamma)?;
    let estimate = Arc::clone(
        &ladder
            .iter()
            .find(|l| l.t == t_hat)
            .expect("selected t comes from the ladder")
            .estimate,
    );
    Ok(CvResult {
        t_hat,
        estimate,
        ladder,
    })
}

/// Cross-validated mass-matching estimator.
pub fn cv_turf(
    e: &EmpiricalMeasure,
    d: usize,
    alpha: f64,
    beta_cv: f64,
    delta: f64,
    cfg: &EstimatorConfig,
) -> Result<CvResult> {
    cv_estimate(e, d, alpha, beta_cv, delta, cfg, LadderKind::Turf)
}
