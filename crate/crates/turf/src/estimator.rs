//! The top-level density estimators.
//!
//! `estimate_single` handles the single-piece polynomial class: fit one
//! polynomial over the sample range, then mass-match it on the geometric
//! partition. `turf` handles the `t`-piece class: a partitioner proposes
//! intervals and per-interval fits, and the same mass-matching transform is
//! applied inside every interval. Mass matching is what buys the two-factor
//! approximation guarantee; everything else only has to be a constant-factor
//! estimate.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{fit_eq, node_spec};
use crate::interval::Interval;
use crate::measure::EmpiricalMeasure;
use crate::partition::{greedy_merge, stitch, FittedPartition};
use crate::poly::{PiecewisePolynomial, MAX_FIT_DEGREE};
use crate::split::{adjust_on_partition, build_geom_partition, min_split_budget};

/// How the partition slack multiplier is chosen.
///
/// The theory derivation couples it to the split budget as
/// `1 + 4k/(alpha (d+1))`, which at desk-scale sample sizes produces
/// partitions far larger than any experiment can support; the practical
/// default pins it to a small constant instead.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BetaRule {
    /// `beta = 1 + 4k/(alpha (d+1))`.
    Formula,
    /// A fixed multiplier > 1.
    Fixed(f64),
}

/// Which partitioner proposes the intervals for the multi-piece estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionerKind {
    GreedyMerge,
    Stitch,
}

/// Estimator parameters plus the rules for every derived constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    /// Bias slack for the multi-piece estimator, in (0, 1).
    pub alpha: f64,
    /// Bias slack for the single-piece estimator, in (0, 1).
    pub gamma: f64,
    /// Histogram-distance constant; 1.0 in practical mode, 3764 in theory
    /// mode.
    pub c1: f64,
    pub beta: BetaRule,
    pub partitioner: PartitionerKind,
    /// Merge threshold for the stitch partitioner (must exceed 2).
    pub stitch_threshold: f64,
    /// Deviation scale for the stitch partitioner; `None` picks the
    /// concentration-driven default for the sample size.
    pub stitch_eps: Option<f64>,
    /// Clip negatives and rescale the output to unit mass.
    pub normalize_output: bool,
    /// Refuse to build estimates with more pieces than this.
    pub piece_cap: usize,
    /// Failure-probability budget for cross-validation.
    pub delta: f64,
    /// Variance-proxy coefficients for cross-validation.
    pub cv_cprime: f64,
    pub cv_cdprime: f64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            alpha: 0.5,
            gamma: 0.5,
            c1: 1.0,
            beta: BetaRule::Fixed(2.0),
            partitioner: PartitionerKind::GreedyMerge,
            stitch_threshold: 3.0,
            stitch_eps: None,
            normalize_output: true,
            piece_cap: 1_000_000,
            delta: 0.1,
            cv_cprime: 1.0,
            cv_cdprime: 1.0,
        }
    }
}

impl EstimatorConfig {
    /// Theory-faithful constants: the proof value of `c1` and the coupled
    /// slack multiplier.
    pub fn theory_mode() -> Self {
        EstimatorConfig {
            c1: 3764.0,
            beta: BetaRule::Formula,
            ..EstimatorConfig::default()
        }
    }

    /// `eta_d = sqrt((d+1)/n)`, the fit-accuracy floor handed to the
    /// partitioner.
    pub fn eta(d: usize, n: usize) -> f64 {
        ((d as f64 + 1.0) / n as f64).sqrt()
    }

    /// Split budget `k = ceil(8 c1 (d+1) / slack)`, floored at the smallest
    /// budget the geometric partition admits.
    pub fn split_budget(&self, d: usize, slack: f64) -> usize {
        let raw = (8.0 * self.c1 * (d as f64 + 1.0) / slack).ceil() as usize;
        raw.max(min_split_budget(d))
    }

    /// The partition slack multiplier for the given split budget.
    pub fn beta_value(&self, d: usize, k: usize) -> f64 {
        match self.beta {
            BetaRule::Formula => 1.0 + 4.0 * k as f64 / (self.alpha * (d as f64 + 1.0)),
            BetaRule::Fixed(b) => b,
        }
    }

    fn validate(&self, d: usize) -> Result<()> {
        if d > MAX_FIT_DEGREE {
            return Err(Error::invalid(format!("degree {d} exceeds {MAX_FIT_DEGREE}")));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::invalid("alpha must lie in (0, 1)"));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::invalid("gamma must lie in (0, 1)"));
        }
        if !(self.c1 > 0.0) {
            return Err(Error::invalid("c1 must be positive"));
        }
        if let BetaRule::Fixed(b) = self.beta {
            if !(b > 1.0) {
                return Err(Error::invalid("fixed beta must exceed 1"));
            }
        }
        Ok(())
    }
}

/// Single-piece estimator: node-interpolation fit over the sample range,
/// mass-matched on the geometric partition with budget `k(gamma)`.
pub fn estimate_single(
    e: &EmpiricalMeasure,
    d: usize,
    gamma: f64,
    cfg: &EstimatorConfig,
) -> Result<PiecewisePolynomial> {
    let mut cfg = cfg.clone();
    cfg.gamma = gamma;
    cfg.validate(d)?;
    let n = e.n();
    if n < 2 * (d + 1) {
        return Err(Error::invalid(format!(
            "single-piece estimator needs at least {} samples, got {n}",
            2 * (d + 1)
        )));
    }
    let support = Interval::closed(e.samples().min(), e.samples().max())?;
    if !(support.width() > 0.0) {
        return Err(Error::invalid("degenerate sample range (all samples equal)"));
    }
    let fpoly = fit_eq(e, &support, node_spec(d)?)?;
    let k = cfg.split_budget(d, gamma);
    let geom = build_geom_partition(d, k, &support)?;
    let adjusted = adjust_on_partition(&fpoly, e, &geom.partition)?;
    finish(adjusted, cfg.normalize_output)
}

/// Multi-piece estimator: run the configured partitioner, then mass-match
/// the per-interval fits on each interval's geometric partition.
pub fn turf(
    e: &EmpiricalMeasure,
    t: usize,
    d: usize,
    alpha: f64,
    cfg: &EstimatorConfig,
) -> Result<PiecewisePolynomial> {
    let mut cfg = cfg.clone();
    cfg.alpha = alpha;
    cfg.validate(d)?;
    let k = cfg.split_budget(d, alpha);
    let fp = run_partitioner(e, t, d, &cfg)?;
    if fp.partition.len().saturating_mul(k) > cfg.piece_cap {
        return Err(Error::invalid(format!(
            "estimate would need up to {} pieces, above the cap {}",
            fp.partition.len() * k,
            cfg.piece_cap
        )));
    }
    let mut pieces = Vec::new();
    for (fit, interval) in fp.fits.iter().zip(fp.partition.iter()) {
        let geom = build_geom_partition(d, k, interval)?;
        let adjusted = adjust_on_partition(fit, e, &geom.partition)?;
        pieces.extend(adjusted.pieces().iter().cloned());
    }
    finish(PiecewisePolynomial::new(pieces)?, cfg.normalize_output)
}

/// Partition-and-fit baseline: the partitioner's own per-interval fits,
/// concatenated without the mass-matching step.
pub fn merge_only_estimate(
    e: &EmpiricalMeasure,
    t: usize,
    d: usize,
    cfg: &EstimatorConfig,
) -> Result<PiecewisePolynomial> {
    cfg.validate(d)?;
    let fp = run_partitioner(e, t, d, cfg)?;
    finish(fp.to_piecewise()?, cfg.normalize_output)
}

fn run_partitioner(
    e: &EmpiricalMeasure,
    t: usize,
    d: usize,
    cfg: &EstimatorConfig,
) -> Result<FittedPartition> {
    match cfg.partitioner {
        PartitionerKind::GreedyMerge => {
            let k = cfg.split_budget(d, cfg.alpha);
            let beta = cfg.beta_value(d, k);
            greedy_merge(e, t, d, beta, EstimatorConfig::eta(d, e.n()))
        }
        PartitionerKind::Stitch => {
            let eps = cfg
                .stitch_eps
                .unwrap_or_else(|| crate::partition::default_stitch_eps(e.n()));
            stitch(e, d, cfg.stitch_threshold, eps).map(|s| s.fitted)
        }
    }
}

fn finish(raw: PiecewisePolynomial, normalize: bool) -> Result<PiecewisePolynomial> {
    if normalize {
        raw.normalize()
    } else {
        Ok(raw)
    }
}

/// Serializable estimate document: breakpoints, reference-basis coefficients
/// per piece, and an echo of the producing configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimateDoc {
    pub version: String,
    pub d: usize,
    pub t: Option<usize>,
    pub config: EstimatorConfig,
    pub breakpoints: Vec<f64>,
    pub pieces: Vec<Vec<f64>>,
}

pub const ESTIMATE_FORMAT_VERSION: &str = "turf-estimate/1";

impl EstimateDoc {
    pub fn from_estimate(
        est: &PiecewisePolynomial,
        d: usize,
        t: Option<usize>,
        cfg: &EstimatorConfig,
    ) -> Self {
        EstimateDoc {
            version: ESTIMATE_FORMAT_VERSION.to_string(),
            d,
            t,
            config: cfg.clone(),
            breakpoints: est.breakpoints().to_vec(),
            pieces: est.pieces().iter().map(|p| p.coeffs().to_vec()).collect(),
        }
    }

    pub fn to_estimate(&self) -> Result<PiecewisePolynomial> {
        if self.breakpoints.len() != self.pieces.len() + 1 {
            return Err(Error::invalid(
                "estimate document has mismatched breakpoints and pieces",
            ));
        }
        let mut polys = Vec::with_capacity(self.pieces.len());
        for (i, coeffs) in self.pieces.iter().enumerate() {
            let domain = if i + 1 == self.pieces.len() {
                Interval::closed(self.breakpoints[i], self.breakpoints[i + 1])?
            } else {
                Interval::new(self.breakpoints[i], self.breakpoints[i + 1])?
            };
            polys.push(crate::poly::Polynomial::new(coeffs.clone(), domain)?);
        }
        PiecewisePolynomial::new(polys)
    }
}

/// Shared handle used by ladders and the experiment harness.
pub type SharedEstimate = Arc<PiecewisePolynomial>;
