use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use turf::estimator::{estimate_single, turf, EstimatorConfig};
use turf::interval::Interval;
use turf::measure::{EmpiricalMeasure, SampleSet};
use turf::model::{l1_vs_model, presets, DistributionModel, Family};
use turf::partition::{greedy_merge, stitch, default_stitch_eps};
use turf::poly::{l1_pp, PiecewisePolynomial, Polynomial};

fn main() {
    // --- greedy jump localization
    let mut within = vec![0usize; 6]; // 1,2,4,8,16,32 buckets
    let trials = 100;
    for seed in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs: Vec<f64> = (0..1024)
            .map(|_| {
                if rng.gen::<f64>() < 0.75 { rng.gen::<f64>() * 0.5 } else { 0.5 + rng.gen::<f64>() * 0.5 }
            })
            .collect();
        let e = EmpiricalMeasure::new(Arc::new(SampleSet::new(xs).unwrap()));
        let fp = greedy_merge(&e, 2, 0, 2.0, 0.0).unwrap();
        let bucket = 1.0 / 1024.0;
        let best = fp.partition.edges().iter().map(|b| (b - 0.5f64).abs()).fold(f64::INFINITY, f64::min);
        for (i, m) in [1.0, 2.0, 4.0, 8.0, 16.0, 32.0].iter().enumerate() {
            if best <= m * bucket { within[i] += 1; }
        }
    }
    println!("jump buckets 1/2/4/8/16/32: {:?}", within);

    // --- stitch: coarse vs unmerged on uniform samples, d=0
    let mut stitch_wins = 0;
    let uniform = PiecewisePolynomial::constant(1.0, Interval::new(0.0, 1.0).unwrap()).unwrap();
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 500);
        let xs: Vec<f64> = (0..256).map(|_| rng.gen::<f64>()).collect();
        let e = EmpiricalMeasure::new(Arc::new(SampleSet::new(xs).unwrap()));
        let eps = default_stitch_eps(256);
        let merged = stitch(&e, 0, 3.0, eps).unwrap().fitted.to_piecewise().unwrap();
        let fine = stitch(&e, 0, 2.0 + 1e-9, 1e-300).unwrap().fitted.to_piecewise().unwrap();
        let em = l1_pp(&merged, &uniform).unwrap();
        let ef = l1_pp(&fine, &uniform).unwrap();
        if em < ef { stitch_wins += 1; }
    }
    println!("stitch coarse beats finest: {stitch_wins}/100");

    // --- estimate_single on uniform, d=0, n=4096
    let flat = DistributionModel::new(vec![(1.0, Family::Beta { alpha: 1.0, beta: 1.0 })]).unwrap();
    let cfg = EstimatorConfig::default();
    let mut ok = 0;
    let mut worst: f64 = 0.0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 900);
        let samples = flat.sample(&mut rng, 4096).unwrap();
        let e = EmpiricalMeasure::new(Arc::new(samples));
        let est = estimate_single(&e, 0, 0.5, &cfg).unwrap();
        let err = l1_pp(&est, &uniform).unwrap();
        worst = worst.max(err);
        if err <= 0.1 { ok += 1; }
    }
    println!("single uniform <=0.1: {ok}/100 (worst {worst:.4})");

    // --- turf on a true 2-piece degree-1 density, t=2 d=1
    let density = {
        let p1 = Polynomial::from_monomial(&[0.15, 0.3], Interval::new(0.0, 1.0).unwrap()).unwrap();
        let p2 = Polynomial::from_monomial(&[2.2, -1.0], Interval::new(1.0, 2.0).unwrap()).unwrap();
        PiecewisePolynomial::new(vec![p1, p2]).unwrap()
    };
    println!("2-piece mass: {}", density.total_mass());
    for n in [4096usize, 16384] {
        let mut total = 0.0;
        for seed in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed + 1500);
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
            let e = EmpiricalMeasure::new(Arc::new(SampleSet::new(xs).unwrap()));
            let est = turf(&e, 2, 1, 0.5, &cfg).unwrap();
            total += l1_pp(&est, &density).unwrap();
        }
        println!("turf 2-piece n={n}: mean l1 {:.4}", total / 20.0);
    }

    // sanity vs model-based l1 on gaussian preset
    let g = presets::gaussian_mixture();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let samples = g.sample(&mut rng, 4096).unwrap();
    let e = EmpiricalMeasure::new(Arc::new(samples));
    let est = turf(&e, 2, 1, 0.5, &cfg).unwrap();
    println!("gauss t=2 l1: {:.4}", l1_vs_model(&est, &g, 1e-4).unwrap());
}
