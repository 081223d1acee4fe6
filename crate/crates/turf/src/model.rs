//! Analytic ground-truth distributions for experiments.
//!
//! Mixtures of Beta, Gamma (shape/scale), and Gaussian components, with
//! exact pdf/cdf through the standard special functions, seeded sampling by
//! per-component inverse-cdf bisection, quantile computation, and the
//! spike-noise perturbation used to raise a model's distance from the
//! piecewise-polynomial classes. Also home to `l1_vs_model`, the quadrature
//! that measures an estimate against one of these models.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, Continuous, ContinuousCDF, Gamma, Normal};
use statrs::statistics::Distribution as _;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::measure::SampleSet;
use crate::poly::PiecewisePolynomial;
use crate::quad::adaptive_simpson;

/// One mixture component family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    Beta { alpha: f64, beta: f64 },
    /// Shape/scale parameterization; the mean is `shape * scale`.
    Gamma { shape: f64, scale: f64 },
    Gaussian { mean: f64, sd: f64 },
}

impl Family {
    fn build(&self) -> Result<FamilyDist> {
        match *self {
            Family::Beta { alpha, beta } => Beta::new(alpha, beta)
                .map(FamilyDist::Beta)
                .map_err(|e| Error::invalid(format!("beta params: {e}"))),
            Family::Gamma { shape, scale } => {
                if !(scale > 0.0) {
                    return Err(Error::invalid("gamma scale must be positive"));
                }
                Gamma::new(shape, 1.0 / scale)
                    .map(FamilyDist::Gamma)
                    .map_err(|e| Error::invalid(format!("gamma params: {e}")))
            }
            Family::Gaussian { mean, sd } => Normal::new(mean, sd)
                .map(FamilyDist::Gaussian)
                .map_err(|e| Error::invalid(format!("gaussian params: {e}"))),
        }
    }
}

#[derive(Debug, Clone)]
enum FamilyDist {
    Beta(Beta),
    Gamma(Gamma),
    Gaussian(Normal),
}

impl FamilyDist {
    fn pdf(&self, x: f64) -> f64 {
        match self {
            // Open-interval evaluation: the density blows up at a boundary
            // when a shape parameter is below one, and the endpoints carry
            // no mass anyway.
            FamilyDist::Beta(d) => {
                if 0.0 < x && x < 1.0 {
                    d.pdf(x)
                } else {
                    0.0
                }
            }
            FamilyDist::Gamma(d) => {
                if x > 0.0 {
                    d.pdf(x)
                } else {
                    0.0
                }
            }
            FamilyDist::Gaussian(d) => d.pdf(x),
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        match self {
            FamilyDist::Beta(d) => d.cdf(x.clamp(0.0, 1.0)),
            FamilyDist::Gamma(d) => {
                if x <= 0.0 {
                    0.0
                } else {
                    d.cdf(x)
                }
            }
            FamilyDist::Gaussian(d) => d.cdf(x),
        }
    }

    /// A finite bracket carrying all but ~1e-14 of the mass.
    fn bracket(&self) -> (f64, f64) {
        match self {
            FamilyDist::Beta(_) => (0.0, 1.0),
            FamilyDist::Gamma(d) => {
                let mean = d.shape() / d.rate();
                let sd = d.shape().sqrt() / d.rate();
                let mut hi = mean + 12.0 * sd + 1.0;
                while self.cdf(hi) < 1.0 - 1e-14 {
                    hi *= 2.0;
                }
                (0.0, hi)
            }
            FamilyDist::Gaussian(d) => {
                let (m, s) = (d.mean().unwrap(), d.std_dev().unwrap());
                (m - 9.0 * s, m + 9.0 * s)
            }
        }
    }

    /// Points where the component concentrates; quadrature segment seeds.
    fn feature_points(&self) -> Vec<f64> {
        match self {
            FamilyDist::Beta(_) => vec![0.0, 0.25, 0.5, 0.75, 1.0],
            FamilyDist::Gamma(d) => {
                let mean = d.shape() / d.rate();
                let sd = d.shape().sqrt() / d.rate();
                vec![0.0, (mean - sd).max(0.0), mean, mean + sd, mean + 3.0 * sd]
            }
            FamilyDist::Gaussian(d) => {
                let (m, s) = (d.mean().unwrap(), d.std_dev().unwrap());
                vec![m - 6.0 * s, m - 2.0 * s, m, m + 2.0 * s, m + 6.0 * s]
            }
        }
    }
}

/// A finite mixture with exact pdf/cdf and reproducible sampling.
#[derive(Debug, Clone)]
pub struct DistributionModel {
    weights: Vec<f64>,
    families: Vec<Family>,
    dists: Vec<FamilyDist>,
}

impl DistributionModel {
    pub fn new(components: Vec<(f64, Family)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid("mixture needs at least one component"));
        }
        if components.iter().any(|(w, _)| !(*w >= 0.0)) {
            return Err(Error::invalid("mixture weights must be non-negative"));
        }
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "mixture weights sum to {total}, expected 1"
            )));
        }
        let mut weights = Vec::with_capacity(components.len());
        let mut families = Vec::with_capacity(components.len());
        let mut dists = Vec::with_capacity(components.len());
        for (w, fam) in components {
            weights.push(w);
            families.push(fam);
            dists.push(fam.build()?);
        }
        Ok(DistributionModel {
            weights,
            families,
            dists,
        })
    }

    pub fn components(&self) -> impl Iterator<Item = (f64, &Family)> {
        self.weights.iter().copied().zip(self.families.iter())
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.weights
            .iter()
            .zip(&self.dists)
            .map(|(w, d)| w * d.pdf(x))
            .sum()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.weights
            .iter()
            .zip(&self.dists)
            .map(|(w, d)| w * d.cdf(x))
            .sum()
    }

    /// A finite bracket holding all but ~1e-13 of the mixture mass.
    pub fn bracket(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for d in &self.dists {
            let (a, b) = d.bracket();
            lo = lo.min(a);
            hi = hi.max(b);
        }
        (lo, hi)
    }

    /// The quantile `cdf^{-1}(p)` by bisection.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0 < p && p < 1.0) {
            return Err(Error::invalid("quantile level must lie in (0, 1)"));
        }
        let (mut lo, mut hi) = self.bracket();
        for _ in 0..200 {
            if hi - lo <= 1e-10 * (1.0 + lo.abs().max(hi.abs())) {
                break;
            }
            let m = 0.5 * (lo + hi);
            if self.cdf(m) < p {
                lo = m;
            } else {
                hi = m;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// `[quantile(trim), quantile(1 - trim)]`.
    pub fn effective_support(&self, trim: f64) -> Result<Interval> {
        if !(trim > 0.0 && trim < 0.5) {
            return Err(Error::invalid("trim must lie in (0, 0.5)"));
        }
        Interval::closed(self.quantile(trim)?, self.quantile(1.0 - trim)?)
    }

    /// Draws `count` samples: a categorical component pick followed by
    /// inverse-cdf bisection inside the component.
    pub fn sample(&self, rng: &mut ChaCha8Rng, count: usize) -> Result<SampleSet> {
        if count == 0 {
            return Err(Error::invalid("sample count must be positive"));
        }
        let mut xs = Vec::with_capacity(count);
        for _ in 0..count {
            let pick: f64 = rng.gen();
            let mut acc = 0.0;
            let mut idx = self.dists.len() - 1;
            for (i, w) in self.weights.iter().enumerate() {
                acc += w;
                if pick < acc {
                    idx = i;
                    break;
                }
            }
            let u: f64 = rng.gen();
            xs.push(invert_component(&self.dists[idx], u));
        }
        SampleSet::new(xs)
    }
}

fn invert_component(d: &FamilyDist, u: f64) -> f64 {
    let (mut lo, mut hi) = d.bracket();
    for _ in 0..200 {
        if hi - lo <= 1e-12 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        let m = 0.5 * (lo + hi);
        if d.cdf(m) < u {
            lo = m;
        } else {
            hi = m;
        }
    }
    0.5 * (lo + hi)
}

/// A base model plus spike noise: weight 3/4 on the base and 1/4 split over
/// `k` narrow Gaussian bumps at positions drawn uniformly from the base's
/// effective support (5% tail trim on each side).
#[derive(Debug, Clone)]
pub struct PerturbedModel {
    pub model: DistributionModel,
    pub centers: Vec<f64>,
    pub k: usize,
    pub c2: f64,
    pub seed: u64,
}

pub fn perturb(base: &DistributionModel, k: usize, c2: f64, seed: u64) -> Result<PerturbedModel> {
    if k < 1 {
        return Err(Error::invalid("perturbation needs k >= 1 bumps"));
    }
    if !(c2 > 0.0) {
        return Err(Error::invalid("perturbation scale c2 must be positive"));
    }
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let support = base.effective_support(0.05)?;
    let centers: Vec<f64> = (0..k)
        .map(|_| support.lo + rng.gen::<f64>() * support.width())
        .collect();
    let sd = c2 / k as f64;
    let mut components: Vec<(f64, Family)> = base
        .components()
        .map(|(w, fam)| (0.75 * w, *fam))
        .collect();
    for &mu in &centers {
        components.push((0.25 / k as f64, Family::Gaussian { mean: mu, sd }));
    }
    Ok(PerturbedModel {
        model: DistributionModel::new(components)?,
        centers,
        k,
        c2,
        seed,
    })
}

/// ∫ |g − f| by per-segment adaptive quadrature over the union of `g`'s
/// support and `f`'s effective range, plus the exact `f`-tail mass outside
/// that range.
pub fn l1_vs_model(g: &PiecewisePolynomial, f: &DistributionModel, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::invalid("quadrature tolerance must be positive"));
    }
    let support = g.support();
    let lo = support.lo.min(f.quantile(1e-9)?);
    let hi = support.hi.max(f.quantile(1.0 - 1e-9)?);
    let tail = f.cdf(lo) + (1.0 - f.cdf(hi));

    // Segment seeds: estimate breakpoints and component feature points, so
    // narrow pdf features cannot slip between quadrature nodes.
    let mut edges: Vec<f64> = vec![lo, hi];
    edges.extend(
        g.breakpoints()
            .iter()
            .copied()
            .filter(|x| *x > lo && *x < hi),
    );
    for d in &f.dists {
        edges.extend(
            d.feature_points()
                .into_iter()
                .filter(|x| *x > lo && *x < hi),
        );
    }
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    edges.dedup();

    let width: f64 = hi - lo;
    let mut total = tail;
    let mut residual = 0.0;
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(b > a) {
            continue;
        }
        let seg_tol = tol * 0.5 * ((b - a) / width).max(1e-12);
        let out = adaptive_simpson(&|x| (g.eval(x) - f.pdf(x)).abs(), a, b, seg_tol, 40);
        total += out.value;
        residual += out.residual;
    }
    if residual > 0.5 * tol {
        return Err(Error::numeric_with_best(
            format!("quadrature residual {residual} above tolerance {tol}"),
            total,
        ));
    }
    Ok(total)
}

/// The three benchmark mixtures.
pub mod presets {
    use super::*;

    /// `0.4 Beta(0.8, 4) + 0.6 Beta(2, 2)`.
    pub fn beta_mixture() -> DistributionModel {
        DistributionModel::new(vec![
            (0.4, Family::Beta { alpha: 0.8, beta: 4.0 }),
            (0.6, Family::Beta { alpha: 2.0, beta: 2.0 }),
        ])
        .expect("valid preset")
    }

    /// `0.7 Gamma(2, 2) + 0.3 Gamma(7.5, 1)` (shape/scale).
    pub fn gamma_mixture() -> DistributionModel {
        DistributionModel::new(vec![
            (0.7, Family::Gamma { shape: 2.0, scale: 2.0 }),
            (0.3, Family::Gamma { shape: 7.5, scale: 1.0 }),
        ])
        .expect("valid preset")
    }

    /// `0.65 N(-0.45, 0.15^2) + 0.35 N(0.3, 0.2^2)`.
    pub fn gaussian_mixture() -> DistributionModel {
        DistributionModel::new(vec![
            (
                0.65,
                Family::Gaussian {
                    mean: -0.45,
                    sd: 0.15,
                },
            ),
            (
                0.35,
                Family::Gaussian {
                    mean: 0.3,
                    sd: 0.2,
                },
            ),
        ])
        .expect("valid preset")
    }

    /// Default bump scale for each preset's noisy variant.
    pub fn default_c2(name: &str) -> Option<f64> {
        match name {
            "beta" => Some(0.05),
            "gamma" => Some(1.0),
            "gauss" | "gaussian" => Some(0.1),
            _ => None,
        }
    }

    pub fn by_name(name: &str) -> Option<DistributionModel> {
        match name {
            "beta" => Some(beta_mixture()),
            "gamma" => Some(gamma_mixture()),
            "gauss" | "gaussian" => Some(gaussian_mixture()),
            _ => None,
        }
    }
}

/// JSON shape for a model: component list plus an optional perturbation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelSpec {
    pub components: Vec<ComponentSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturb: Option<PerturbSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComponentSpec {
    pub weight: f64,
    #[serde(flatten)]
    pub family: Family,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PerturbSpec {
    pub k: usize,
    pub c2: f64,
    pub seed: u64,
}

impl ModelSpec {
    pub fn build(&self) -> Result<DistributionModel> {
        let base = DistributionModel::new(
            self.components
                .iter()
                .map(|c| (c.weight, c.family))
                .collect(),
        )?;
        match self.perturb {
            Some(p) => Ok(perturb(&base, p.k, p.c2, p.seed)?.model),
            None => Ok(base),
        }
    }
}
