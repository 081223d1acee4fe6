use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use turf::interval::Interval;
use turf::measure::{ak_distance, EmpiricalMeasure, SampleSet};
use turf::poly::{PiecewisePolynomial, Polynomial};

fn main() {
    let mut violations_density = 0;
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for case in 0..2000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(case);
        let n = rng.gen_range(5..40);
        let xs: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let e = EmpiricalMeasure::new(Arc::new(SampleSet::new(xs).unwrap()));
        // Nonnegative density-scale g: random positive piecewise constant/linear, normalized.
        let mut pieces = Vec::new();
        let edges = [0.0, 0.3 + 0.2 * rng.gen::<f64>(), 1.0];
        for w in edges.windows(2) {
            let dom = Interval::new(w[0], w[1]).unwrap();
            let c0 = 0.2 + rng.gen::<f64>();
            let c1 = rng.gen::<f64>() * 0.4 - 0.2;
            pieces.push(Polynomial::new(vec![c0, c1], dom).unwrap());
        }
        let raw = PiecewisePolynomial::new(pieces).unwrap();
        let mass = raw.total_mass();
        let g = PiecewisePolynomial::new(raw.pieces().iter().map(|p| p.scaled(1.0 / mass)).collect()).unwrap();

        let full = Interval::closed(0.0, 1.0).unwrap();
        let cut = 0.2 + 0.6 * rng.gen::<f64>();
        let left = Interval::new(0.0, cut).unwrap();
        let right = Interval::closed(cut, 1.0).unwrap();
        let k1 = rng.gen_range(1..4usize);
        let k2 = rng.gen_range(1..4usize);
        let lhs = ak_distance(&e, &g, k1, &left).unwrap() + ak_distance(&e, &g, k2, &right).unwrap();
        let rhs = ak_distance(&e, &g, k1 + k2, &full).unwrap();
        cases += 1;
        if lhs > rhs + 1e-9 {
            violations_density += 1;
            worst = worst.max(lhs - rhs);
        }
    }
    println!("density-pair violations: {violations_density}/{cases}, worst excess {worst:.4}");
}
