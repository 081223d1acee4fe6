use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::sync::Arc;
use turf::estimator::EstimatorConfig;
use turf::interval::Interval;
use turf::measure::{EmpiricalMeasure, SampleSet};
use turf::poly::{l1_pp, PiecewisePolynomial, Polynomial};
use turf::select::cv_turf;

fn sample(density: &PiecewisePolynomial, rng: &mut ChaCha8Rng, n: usize) -> EmpiricalMeasure {
    let support = density.support();
    let xs: Vec<f64> = (0..n).map(|_| {
        let u: f64 = rng.gen();
        let (mut lo, mut hi) = (support.lo, support.hi);
        for _ in 0..60 {
            let m = 0.5 * (lo + hi);
            let c = density.mass_over(&Interval::new(support.lo, m).unwrap()).unwrap();
            if c < u { lo = m; } else { hi = m; }
        }
        0.5 * (lo + hi)
    }).collect();
    EmpiricalMeasure::new(Arc::new(SampleSet::new(xs).unwrap()))
}

fn main() {
    // 4-piece degree-1 density on [0,4]
    let density = PiecewisePolynomial::new(vec![
        Polynomial::from_monomial(&[0.4, -0.3], Interval::new(0.0, 1.0).unwrap()).unwrap(),
        Polynomial::from_monomial(&[-0.4, 0.5], Interval::new(1.0, 2.0).unwrap()).unwrap(),
        Polynomial::from_monomial(&[0.1], Interval::new(2.0, 3.0).unwrap()).unwrap(),
        Polynomial::from_monomial(&[2.4, -0.6], Interval::new(3.0, 4.0).unwrap()).unwrap(),
    ]).unwrap();
    println!("mass {}", density.total_mass());
    let cfg = EstimatorConfig::default();

    let results: Vec<(usize, f64, f64)> = (0..40u64).into_par_iter().map(|seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 3000);
        let e = sample(&density, &mut rng, 16384);
        let cv = cv_turf(&e, 1, 0.5, 0.5, 0.1, &cfg).unwrap();
        let sel_err = l1_pp(&cv.estimate, &density).unwrap();
        let best = cv.ladder.iter().map(|l| l1_pp(&l.estimate, &density).unwrap()).fold(f64::INFINITY, f64::min);
        (cv.t_hat, sel_err, best)
    }).collect();
    let ok = results.iter().filter(|(_, s, b)| *s <= 1.5 * *b).count();
    let ts: Vec<usize> = results.iter().map(|r| r.0).collect();
    println!("cv 4-piece: sel<=1.5*best in {ok}/40; t values {:?}", ts);

    // gaussian: median t across n
    use turf::model::presets;
    let g = presets::gaussian_mixture();
    for n in [1024usize, 4096, 16384] {
        let mut ts: Vec<usize> = (0..20u64).into_par_iter().map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed * 77 + 1);
            rng.set_stream(n as u64);
            let samples = g.sample(&mut rng, n).unwrap();
            let e = EmpiricalMeasure::new(Arc::new(samples));
            cv_turf(&e, 1, 0.5, 0.5, 0.1, &cfg).unwrap().t_hat
        }).collect();
        ts.sort();
        println!("gauss n={n}: median t = {}, all {:?}", ts[10], ts);
    }
}
