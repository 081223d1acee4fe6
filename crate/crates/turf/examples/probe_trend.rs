use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::sync::Arc;
use std::time::Instant;
use turf::estimator::{turf, EstimatorConfig};
use turf::interval::Interval;
use turf::measure::{EmpiricalMeasure, SampleSet};
use turf::poly::{l1_pp, PiecewisePolynomial, Polynomial};

fn main() {
    // Base 2-piece linear density plus a 16-cell zero-mass quadratic wiggle.
    let base = PiecewisePolynomial::new(vec![
        Polynomial::from_monomial(&[0.15, 0.3], Interval::new(0.0, 1.0).unwrap()).unwrap(),
        Polynomial::from_monomial(&[2.2, -1.0], Interval::new(1.0, 2.0).unwrap()).unwrap(),
    ]).unwrap();
    let amp = 0.26;
    let cells = 16usize;
    let w = 2.0 / cells as f64;
    let mut pieces = Vec::new();
    for c in 0..cells {
        let lo = c as f64 * w;
        let hi = lo + w;
        let dom = Interval::new(lo, hi).unwrap();
        let base_piece = if hi <= 1.0 { &base.pieces()[0] } else { &base.pieces()[1] };
        let rb = base_piece.rebase(dom).unwrap();
        // bump(u) = amp (1 - 6u(1-u)) with u in [0,1] over the cell
        let bump = Polynomial::from_monomial(
            &[amp * (1.0 - 6.0 * (lo / w) * (1.0 - lo / w) - 0.0), 0.0, 0.0], dom).unwrap();
        let _ = bump;
        // direct in cell coords: u = (x-lo)/w, 1-6u+6u^2
        let a0 = 1.0 + 6.0 * lo / w + 6.0 * (lo / w) * (lo / w);
        let a1 = (-6.0 / w) - 12.0 * lo / (w * w);
        let a2 = 6.0 / (w * w);
        let bump = Polynomial::from_monomial(&[amp * a0, amp * a1, amp * a2], dom).unwrap();
        pieces.push(rb.add_scaled(&bump, 1.0).unwrap());
    }
    let f = PiecewisePolynomial::new(pieces).unwrap();
    println!("mass {}", f.total_mass());
    let bias = l1_pp(&f, &base).unwrap();
    println!("bias (l1 to base) = {bias:.4}");
    // check nonnegativity
    let minv = (0..2000).map(|i| f.eval(i as f64 / 1000.0)).fold(f64::INFINITY, f64::min);
    println!("min f = {minv:.4}");

    let cfg = EstimatorConfig::default();
    let alpha = 0.5;
    for n in [4000usize, 16000, 64000] {
        let started = Instant::now();
        let errs: Vec<f64> = (0..5u64).into_par_iter().map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed + 4000);
            let support = f.support();
            let xs: Vec<f64> = (0..n).map(|_| {
                let u: f64 = rng.gen();
                let (mut lo, mut hi) = (support.lo, support.hi);
                for _ in 0..60 {
                    let m = 0.5 * (lo + hi);
                    if f.mass_over(&Interval::new(support.lo, m).unwrap()).unwrap() < u { lo = m; } else { hi = m; }
                }
                0.5 * (lo + hi)
            }).collect();
            let e = EmpiricalMeasure::new(Arc::new(SampleSet::new(xs).unwrap()));
            let est = turf(&e, 2, 1, alpha, &cfg).unwrap();
            l1_pp(&est, &f).unwrap()
        }).collect();
        let mean = errs.iter().sum::<f64>() / errs.len() as f64;
        let slack = mean - (2.0 + alpha) * bias;
        println!("n={n}: mean l1 {mean:.4}, slack over (2+a)*bias {slack:.4}, took {:.2?}", started.elapsed());
    }

    // scaling: single fixed-t run, t=4, d=1
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let support = f.support();
    let mut times = Vec::new();
    for n in [16000usize, 64000] {
        let xs: Vec<f64> = (0..n).map(|_| {
            let u: f64 = rng.gen();
            let (mut lo, mut hi) = (support.lo, support.hi);
            for _ in 0..60 {
                let m = 0.5 * (lo + hi);
                if f.mass_over(&Interval::new(support.lo, m).unwrap()).unwrap() < u { lo = m; } else { hi = m; }
            }
            0.5 * (lo + hi)
        }).collect();
        let e = EmpiricalMeasure::new(Arc::new(SampleSet::new(xs).unwrap()));
        let started = Instant::now();
        let est = turf(&e, 4, 1, alpha, &cfg).unwrap();
        let dt = started.elapsed();
        times.push(dt.as_secs_f64());
        println!("turf n={n}: {:.3}s pieces={}", dt.as_secs_f64(), est.num_pieces());
    }
    println!("time ratio 64k/16k = {:.2}", times[1] / times[0]);
}
