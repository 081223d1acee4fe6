//! Experiment harness: error-versus-n curves on the benchmark mixtures.
//!
//! A spec names a model (preset id or inline components, optionally
//! perturbed), a set of estimators, a degree, an `n` grid, and a seed count.
//! Every `(n, seed)` cell draws one sample set that all estimators share, so
//! the comparison is paired. Results land in a CSV (one row per cell and
//! estimator) and an SVG line chart (log-x sample size, mean ℓ1 with ±1
//! standard-error bars).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{merge_only_estimate, turf, EstimatorConfig, PartitionerKind};
use crate::measure::EmpiricalMeasure;
use crate::model::{l1_vs_model, perturb, presets, DistributionModel, ModelSpec, PerturbSpec};
use crate::select::{cv_estimate, LadderKind};

mod svg;

pub use svg::render_error_chart;

/// Which model a spec runs against.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelChoice {
    /// A preset id: `beta`, `gamma`, or `gauss`.
    Named(String),
    /// Inline mixture components.
    Inline(ModelSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Turf,
    MergeOnly,
    StitchOnly,
}

impl EstimatorKind {
    fn label(&self) -> &'static str {
        match self {
            EstimatorKind::Turf => "turf",
            EstimatorKind::MergeOnly => "merge_only",
            EstimatorKind::StitchOnly => "stitch_only",
        }
    }
}

/// One estimator column in the experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimatorSpec {
    pub kind: EstimatorKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_cv: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalize: Option<bool>,
    /// Fixed piece count, used when cross-validation is off.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stitch_threshold: Option<f64>,
}

impl EstimatorSpec {
    pub fn of_kind(kind: EstimatorKind) -> Self {
        EstimatorSpec {
            kind,
            label: None,
            alpha: None,
            c1: None,
            beta: None,
            delta: None,
            beta_cv: None,
            normalize: None,
            t: None,
            stitch_threshold: None,
        }
    }

    fn config(&self) -> EstimatorConfig {
        let mut cfg = EstimatorConfig::default();
        if let Some(a) = self.alpha {
            cfg.alpha = a;
        }
        if let Some(c) = self.c1 {
            cfg.c1 = c;
        }
        if let Some(b) = self.beta {
            cfg.beta = crate::estimator::BetaRule::Fixed(b);
        }
        if let Some(d) = self.delta {
            cfg.delta = d;
        }
        if let Some(nm) = self.normalize {
            cfg.normalize_output = nm;
        }
        if let Some(s) = self.stitch_threshold {
            cfg.stitch_threshold = s;
        }
        if self.kind == EstimatorKind::StitchOnly {
            cfg.partitioner = PartitionerKind::Stitch;
        }
        cfg
    }

    fn display_label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.kind.label().to_string())
    }
}

/// A full experiment description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub model: ModelChoice,
    /// Extra perturbation on top of a named model ("noisy" variants).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturb: Option<PerturbSpec>,
    pub estimators: Vec<EstimatorSpec>,
    pub d: usize,
    /// Ascending sample sizes.
    pub ns: Vec<usize>,
    pub seeds: usize,
    /// Select t by cross-validation (otherwise each estimator's fixed t).
    #[serde(default = "default_true")]
    pub cv: bool,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// ℓ1 quadrature tolerance.
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Record wall-clock fit times. Off by default so identical runs emit
    /// identical CSV bytes.
    #[serde(default)]
    pub timings: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_svg: Option<PathBuf>,
}

fn default_true() -> bool {
    true
}

fn default_seed() -> u64 {
    0
}

fn default_tol() -> f64 {
    1e-3
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.ns.is_empty() || self.ns.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("sample-size grid must be ascending"));
        }
        if self.seeds < 1 {
            return Err(Error::invalid("need at least one seed"));
        }
        if self.estimators.is_empty() {
            return Err(Error::invalid("need at least one estimator"));
        }
        Ok(())
    }

    pub fn model_label(&self) -> String {
        let base = match &self.model {
            ModelChoice::Named(name) => name.clone(),
            ModelChoice::Inline(_) => "custom".to_string(),
        };
        if self.perturb.is_some() {
            format!("{base}+noise")
        } else {
            base
        }
    }

    pub fn build_model(&self) -> Result<DistributionModel> {
        let base = match &self.model {
            ModelChoice::Named(name) => presets::by_name(name).ok_or_else(|| {
                Error::invalid(format!("unknown model preset '{name}'"))
            })?,
            ModelChoice::Inline(spec) => spec.build()?,
        };
        match self.perturb {
            Some(p) => Ok(perturb(&base, p.k, p.c2, p.seed)?.model),
            None => Ok(base),
        }
    }
}

/// One CSV row.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultRow {
    pub model: String,
    pub estimator: String,
    pub d: usize,
    pub n: usize,
    pub seed: u64,
    pub l1_error: f64,
    pub pieces_out: usize,
    pub t_selected: usize,
    pub wall_time_ms: f64,
}

/// Everything a run produced.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub rows: Vec<ResultRow>,
    pub csv_path: Option<PathBuf>,
    pub svg_path: Option<PathBuf>,
}

/// Runs the experiment: samples per `(n, seed)` cell, fits every estimator
/// on the shared samples, measures ℓ1 against the analytic model, and emits
/// CSV/SVG when paths are configured.
pub fn run(spec: &ExperimentSpec) -> Result<RunOutput> {
    spec.validate()?;
    let model = Arc::new(spec.build_model()?);
    let model_label = spec.model_label();

    let cells: Vec<(usize, u64)> = spec
        .ns
        .iter()
        .flat_map(|&n| (0..spec.seeds as u64).map(move |s| (n, s)))
        .collect();

    let mut rows: Vec<ResultRow> = cells
        .par_iter()
        .map(|&(n, seed)| run_cell(spec, &model, &model_label, n, seed))
        .collect::<Result<Vec<Vec<ResultRow>>>>()?
        .into_iter()
        .flatten()
        .collect();
    rows.sort_by(|a, b| {
        (&a.estimator, a.n, a.seed)
            .partial_cmp(&(&b.estimator, b.n, b.seed))
            .unwrap()
    });

    let csv_path = match &spec.out_csv {
        Some(path) => {
            write_csv(path, &rows)?;
            Some(path.clone())
        }
        None => None,
    };
    let svg_path = match &spec.out_svg {
        Some(path) => {
            let chart = render_error_chart(
                &format!("{} (d={})", model_label, spec.d),
                &aggregate(&rows),
            );
            std::fs::write(path, chart)?;
            Some(path.clone())
        }
        None => None,
    };
    Ok(RunOutput {
        rows,
        csv_path,
        svg_path,
    })
}

fn run_cell(
    spec: &ExperimentSpec,
    model: &DistributionModel,
    model_label: &str,
    n: usize,
    seed: u64,
) -> Result<Vec<ResultRow>> {
    use rand::SeedableRng;
    // One stream per (n, seed) cell so every estimator sees the same draw.
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(splitmix(n as u64, seed));
    let samples = model.sample(&mut rng, n)?;
    let e = EmpiricalMeasure::new(Arc::new(samples));

    let mut rows = Vec::with_capacity(spec.estimators.len());
    for est in &spec.estimators {
        let cfg = est.config();
        let started = Instant::now();
        let fitted = fit_cell(spec, est, &cfg, &e);
        let elapsed_ms = if spec.timings {
            started.elapsed().as_secs_f64() * 1e3
        } else {
            0.0
        };
        let row = match fitted {
            Ok((estimate, t_sel)) => {
                let l1 = l1_vs_model(&estimate, model, spec.tol)?;
                ResultRow {
                    model: model_label.to_string(),
                    estimator: est.display_label(),
                    d: spec.d,
                    n,
                    seed,
                    l1_error: l1,
                    pieces_out: estimate.num_pieces(),
                    t_selected: t_sel,
                    wall_time_ms: elapsed_ms,
                }
            }
            // A cell that cannot be estimated stays in the table as an
            // explicit error row.
            Err(_) => ResultRow {
                model: model_label.to_string(),
                estimator: est.display_label(),
                d: spec.d,
                n,
                seed,
                l1_error: f64::NAN,
                pieces_out: 0,
                t_selected: 0,
                wall_time_ms: elapsed_ms,
            },
        };
        rows.push(row);
    }
    Ok(rows)
}

fn fit_cell(
    spec: &ExperimentSpec,
    est: &EstimatorSpec,
    cfg: &EstimatorConfig,
    e: &EmpiricalMeasure,
) -> Result<(crate::poly::PiecewisePolynomial, usize)> {
    match est.kind {
        EstimatorKind::StitchOnly => {
            let out = crate::partition::stitch(
                e,
                spec.d,
                cfg.stitch_threshold,
                cfg.stitch_eps
                    .unwrap_or_else(|| crate::partition::default_stitch_eps(e.n())),
            )?;
            let raw = out.fitted.to_piecewise()?;
            let estimate = if cfg.normalize_output {
                raw.normalize()?
            } else {
                raw
            };
            Ok((estimate, out.fitted.partition.len()))
        }
        EstimatorKind::Turf | EstimatorKind::MergeOnly => {
            let kind = if est.kind == EstimatorKind::Turf {
                LadderKind::Turf
            } else {
                LadderKind::MergeOnly
            };
            if spec.cv {
                let beta_cv = est.beta_cv.unwrap_or(0.5);
                let cv = cv_estimate(e, spec.d, cfg.alpha, beta_cv, cfg.delta, cfg, kind)?;
                Ok(((*cv.estimate).clone(), cv.t_hat))
            } else {
                let t = est.t.unwrap_or(1);
                let estimate = match kind {
                    LadderKind::Turf => turf(e, t, spec.d, cfg.alpha, cfg)?,
                    LadderKind::MergeOnly => merge_only_estimate(e, t, spec.d, cfg)?,
                };
                Ok((estimate, t))
            }
        }
    }
}

fn splitmix(a: u64, b: u64) -> u64 {
    let mut z = a
        .wrapping_mul(0x9E3779B97F4A7C15)
        .wrapping_add(b)
        .wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn write_csv(path: &Path, rows: &[ResultRow]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let mut wtr =
        csv::Writer::from_path(path).map_err(|e| Error::Io(format!("csv open: {e}")))?;
    for row in rows {
        wtr.serialize(row)
            .map_err(|e| Error::Io(format!("csv write: {e}")))?;
    }
    wtr.flush()?;
    Ok(())
}

/// Per-(estimator, n) mean and standard error, for plotting.
pub fn aggregate(rows: &[ResultRow]) -> Vec<(String, Vec<(usize, f64, f64)>)> {
    let mut grouped: BTreeMap<String, BTreeMap<usize, Vec<f64>>> = BTreeMap::new();
    for row in rows {
        if row.l1_error.is_nan() {
            continue;
        }
        grouped
            .entry(row.estimator.clone())
            .or_default()
            .entry(row.n)
            .or_default()
            .push(row.l1_error);
    }
    grouped
        .into_iter()
        .map(|(label, by_n)| {
            let pts = by_n
                .into_iter()
                .map(|(n, vals)| {
                    let count = vals.len() as f64;
                    let mean = vals.iter().sum::<f64>() / count;
                    let var = if vals.len() > 1 {
                        vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
                            / (count - 1.0)
                    } else {
                        0.0
                    };
                    (n, mean, (var / count).sqrt())
                })
                .collect();
            (label, pts)
        })
        .collect()
}

/// Reads a samples file: one decimal value per line, UTF-8.
pub fn read_samples(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut xs = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let v: f64 = trimmed.parse().map_err(|e| {
            Error::invalid(format!("samples line {}: {e}", lineno + 1))
        })?;
        xs.push(v);
    }
    if xs.is_empty() {
        return Err(Error::invalid("samples file is empty"));
    }
    Ok(xs)
}
