//! Shared helpers for the integration suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

use turf::interval::Interval;
use turf::measure::{EmpiricalMeasure, SampleSet};
use turf::poly::{PiecewisePolynomial, Polynomial};

/// Deterministic RNG stream for a (suite, case) pair.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// A piecewise polynomial density from (width, monomial coefficients) specs;
/// pieces are laid left to right starting at `lo` and the result integrates
/// to one (the caller's coefficients must already arrange that).
pub fn piecewise_density(lo: f64, specs: &[(f64, Vec<f64>)]) -> PiecewisePolynomial {
    let mut pieces = Vec::new();
    let mut cursor = lo;
    for (width, coeffs) in specs {
        let domain = Interval::new(cursor, cursor + width).unwrap();
        pieces.push(Polynomial::from_monomial(coeffs, domain).unwrap());
        cursor += width;
    }
    let pw = PiecewisePolynomial::new(pieces).unwrap();
    assert!(
        (pw.total_mass() - 1.0).abs() < 1e-9,
        "test density has mass {}",
        pw.total_mass()
    );
    pw
}

/// Draws `n` samples from a piecewise-polynomial density by bisecting its
/// exact cdf.
pub fn sample_from_density(
    density: &PiecewisePolynomial,
    rng: &mut ChaCha8Rng,
    n: usize,
) -> EmpiricalMeasure {
    let support = density.support();
    let cdf = |x: f64| -> f64 {
        density
            .mass_over(&Interval::new(support.lo, x).unwrap())
            .unwrap()
    };
    let xs: Vec<f64> = (0..n)
        .map(|_| {
            let u: f64 = rng.gen();
            let (mut lo, mut hi) = (support.lo, support.hi);
            for _ in 0..80 {
                let m = 0.5 * (lo + hi);
                if cdf(m) < u {
                    lo = m;
                } else {
                    hi = m;
                }
            }
            0.5 * (lo + hi)
        })
        .collect();
    EmpiricalMeasure::new(Arc::new(SampleSet::new(xs).unwrap()))
}

/// Random piecewise polynomial: `pieces` pieces of degree ≤ `max_degree`
/// over a random partition of `[0, 1]`, standard-normal reference
/// coefficients.
pub fn random_piecewise(
    rng: &mut ChaCha8Rng,
    pieces: usize,
    max_degree: usize,
) -> PiecewisePolynomial {
    let mut edges: Vec<f64> = (0..pieces - 1).map(|_| rng.gen::<f64>()).collect();
    edges.push(0.0);
    edges.push(1.0);
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    edges.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
    let mut out = Vec::new();
    for w in edges.windows(2) {
        let domain = Interval::new(w[0], w[1]).unwrap();
        let degree = rng.gen_range(0..=max_degree);
        let coeffs: Vec<f64> = (0..=degree)
            .map(|_| {
                // Box-Muller keeps the helper free of extra dependencies.
                let u1: f64 = rng.gen::<f64>().max(1e-12);
                let u2: f64 = rng.gen();
                (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
            })
            .collect();
        out.push(Polynomial::new(coeffs, domain).unwrap());
    }
    PiecewisePolynomial::new(out).unwrap()
}

/// Riemann-sum reference for ∫|g1 − g2| over the union of supports.
pub fn l1_riemann(g1: &PiecewisePolynomial, g2: &PiecewisePolynomial, points: usize) -> f64 {
    let lo = g1.support().lo.min(g2.support().lo);
    let hi = g1.support().hi.max(g2.support().hi);
    let step = (hi - lo) / points as f64;
    (0..points)
        .map(|i| {
            let x = lo + (i as f64 + 0.5) * step;
            (g1.eval(x) - g2.eval(x)).abs() * step
        })
        .sum()
}
