//! Monte-Carlo checks of the inequalities the estimators lean on.
//!
//! The proofs cannot be executed, but every statement here is a bound on an
//! observable quantity, so each check samples the quantity and compares it
//! to the stated bound. Report rows carry (observed, bound, margin) so that
//! tightness is visible, not just pass/fail.

use rand::distributions::Distribution as _;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{Beta, ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::poly::Polynomial;
use crate::split::{build_geom_partition, histogram, min_split_budget};

/// One verified statement instance.
#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub check: String,
    pub case: String,
    pub observed: f64,
    pub bound: f64,
    pub margin: f64,
    pub pass: bool,
}

impl ReportRow {
    fn new(check: &str, case: String, observed: f64, bound: f64) -> Self {
        ReportRow {
            check: check.to_string(),
            case,
            observed,
            bound,
            margin: bound - observed,
            pass: observed <= bound,
        }
    }
}

/// A batch of report rows with a quick pass summary.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub rows: Vec<ReportRow>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        for row in &self.rows {
            wtr.serialize(row)
                .map_err(|e| Error::Io(format!("report csv: {e}")))?;
        }
        wtr.flush().map_err(|e| Error::Io(format!("report csv: {e}")))?;
        Ok(())
    }
}

/// Range-to-mass bound for degree-d polynomials: the swing of `q` over the
/// inner window `[-a, a]` of `[-1, 1]` is at most
/// `28 (d+1) / sqrt(1 - a^2)` times `∫|q|`.
pub fn range_to_mass_bound(d: usize, a: f64) -> f64 {
    28.0 * (d as f64 + 1.0) / (1.0 - a * a).sqrt()
}

/// Samples random degree-d polynomials (standard normal reference
/// coefficients) and checks the range-to-mass bound on each window.
pub fn check_poly_inequality(
    d: usize,
    a_values: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Report> {
    if d > 8 {
        return Err(Error::invalid("degree capped at 8"));
    }
    if a_values.iter().any(|a| !(0.0..1.0).contains(a)) {
        return Err(Error::invalid("window parameters must lie in [0, 1)"));
    }
    let domain = Interval::new(-1.0, 1.0)?;
    let per_trial: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let normal = Normal::new(0.0, 1.0).unwrap();
            let coeffs: Vec<f64> = (0..=d).map(|_| normal.sample(&mut rng)).collect();
            let q = Polynomial::new(coeffs, domain).unwrap();
            let mass = q.abs_integral().unwrap();
            a_values
                .iter()
                .map(|&a| {
                    if mass == 0.0 {
                        return 0.0;
                    }
                    let window = Interval::new(-a, a).unwrap();
                    q.range_over(&window).unwrap() / mass
                })
                .collect()
        })
        .collect();
    let mut rows = Vec::new();
    for (ai, &a) in a_values.iter().enumerate() {
        let observed = per_trial
            .iter()
            .map(|t| t[ai])
            .fold(0.0f64, f64::max);
        rows.push(ReportRow::new(
            "poly_range_to_mass",
            format!("d={d} a={a} trials={trials}"),
            observed,
            range_to_mass_bound(d, a),
        ));
    }
    Ok(Report { rows })
}

/// Concentration of statistically equivalent blocks. With `n - 1` sorted
/// uniform samples, the true mass of the block between order statistics `a`
/// and `b` follows `Beta(b-a, n-(b-a))` no matter the generating density,
/// and deviates from `(b-a)/n` by `eps * sqrt(q)` with probability at most
/// `exp(-(n-1) eps^2 / 2) + exp(-(n-1) eps^2 q / (2 (q + eps sqrt(q))))`.
pub fn check_beta_concentration(
    n: usize,
    eps_values: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Report> {
    if n < 128 {
        return Err(Error::invalid("concentration check needs n >= 128"));
    }
    if trials < 100 {
        return Err(Error::invalid("too few trials for a frequency estimate"));
    }
    let pairs: Vec<(usize, usize)> = vec![
        (0, 1),
        (0, n / 4),
        (0, n / 2),
        (n / 4, n / 2),
        (n / 4, 3 * n / 4),
        (0, n),
    ];
    // Per-trial block masses: parallel over trials, one rng stream each.
    let masses: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64 + 1_000_000);
            let mut us: Vec<f64> = (0..n - 1).map(|_| rng.gen::<f64>()).collect();
            us.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let order = |idx: usize| -> f64 {
                if idx == 0 {
                    0.0
                } else if idx >= n {
                    1.0
                } else {
                    us[idx - 1]
                }
            };
            pairs.iter().map(|&(a, b)| order(b) - order(a)).collect()
        })
        .collect();

    let mut rows = Vec::new();
    let nf = n as f64;
    for (pi, &(a, b)) in pairs.iter().enumerate() {
        let q = (b - a) as f64 / nf;
        for &eps in eps_values {
            let threshold = eps * q.sqrt();
            let fails = masses
                .iter()
                .filter(|m| (m[pi] - q).abs() >= threshold)
                .count();
            let observed = fails as f64 / trials as f64;
            let bound = if eps == 0.0 {
                1.0
            } else {
                let first = (-(nf - 1.0) * eps * eps / 2.0).exp();
                let second =
                    (-(nf - 1.0) * eps * eps * q / (2.0 * (q + eps * q.sqrt()))).exp();
                (first + second).min(1.0)
            };
            let se = (bound.min(1.0) * (1.0 - bound.min(1.0)) / trials as f64)
                .sqrt()
                .max((1.0 / trials as f64).sqrt() * 0.1);
            rows.push(ReportRow::new(
                "block_mass_concentration",
                format!("n={n} a={a} b={b} eps={eps}"),
                observed,
                (bound + 3.0 * se).min(1.0 + 1e-12),
            ));
        }
        // Distributional check: the block mass follows Beta(b-a, n-(b-a)).
        if b > a && b - a < n {
            let dist = Beta::new((b - a) as f64, (n - (b - a)) as f64)
                .map_err(|e| Error::numeric(format!("beta law: {e}")))?;
            let mut sorted: Vec<f64> = masses.iter().map(|m| m[pi]).collect();
            sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
            let t = trials as f64;
            let mut ks: f64 = 0.0;
            for (i, &x) in sorted.iter().enumerate() {
                let f = dist.cdf(x);
                ks = ks.max(((i as f64 + 1.0) / t - f).max(f - i as f64 / t));
            }
            // One-sample Kolmogorov-Smirnov critical value at level 0.001.
            let crit = (2.0f64 / 0.001).ln().sqrt() / (2.0 * t).sqrt();
            rows.push(ReportRow::new(
                "block_mass_beta_law",
                format!("n={n} a={a} b={b} ks_level=0.001"),
                ks,
                crit,
            ));
        }
    }
    Ok(Report { rows })
}

/// The geometric partition's interval count never exceeds its budget.
pub fn check_partition_count(d_values: &[usize], k_values: &[usize]) -> Result<Report> {
    let unit = Interval::new(-1.0, 1.0)?;
    let mut rows = Vec::new();
    for &d in d_values {
        for &k in k_values {
            if k < min_split_budget(d) {
                continue;
            }
            let geom = build_geom_partition(d, k, &unit)?;
            rows.push(ReportRow::new(
                "geom_partition_count",
                format!("d={d} k={k}"),
                geom.partition.len() as f64,
                k as f64,
            ));
        }
    }
    Ok(Report { rows })
}

/// Histogram-distance constant: for random degree-d polynomials,
/// `∫|p - hist(p)| <= C (d+1) ∫|p| / k` on the geometric partition with the
/// proof constant `C = 3764`; the observed maximum is the empirical `C`.
pub fn check_histogram_distance(
    d_values: &[usize],
    k_values: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Report> {
    let unit = Interval::new(-1.0, 1.0)?;
    let mut rows = Vec::new();
    for &d in d_values {
        for &k in k_values {
            if k < min_split_budget(d) {
                // Below the admissible budget the statement does not apply.
                continue;
            }
            let geom = build_geom_partition(d, k, &unit)?;
            let worst = (0..trials)
                .into_par_iter()
                .map(|trial| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(trial as u64 + 2_000_000);
                    let normal = Normal::new(0.0, 1.0).unwrap();
                    let coeffs: Vec<f64> = (0..=d).map(|_| normal.sample(&mut rng)).collect();
                    let p = Polynomial::new(coeffs, unit).unwrap();
                    let pw = crate::poly::PiecewisePolynomial::new(vec![p.clone()]).unwrap();
                    let hist = histogram(&pw, &geom.partition).unwrap();
                    let dist = crate::poly::l1_pp(&pw, &hist).unwrap();
                    let mass = p.abs_integral().unwrap();
                    if mass == 0.0 {
                        0.0
                    } else {
                        dist * k as f64 / ((d as f64 + 1.0) * mass)
                    }
                })
                .reduce(|| 0.0f64, f64::max);
            rows.push(ReportRow::new(
                "histogram_distance_constant",
                format!("d={d} k={k} trials={trials}"),
                worst,
                3764.0,
            ));
        }
    }
    Ok(Report { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_polynomials_never_swing() {
        let report = check_poly_inequality(0, &[0.0, 0.5, 0.9], 50, 1).unwrap();
        assert!(report.all_pass());
        for row in &report.rows {
            assert_eq!(row.observed, 0.0);
        }
    }

    #[test]
    fn linear_hand_case_holds_with_margin() {
        // q(x) = x: swing over [-0.9, 0.9] is 1.8, ∫|q| = 1.
        let q = Polynomial::from_monomial(&[0.0, 1.0], Interval::new(-1.0, 1.0).unwrap())
            .unwrap();
        let swing = q
            .range_over(&Interval::new(-0.9, 0.9).unwrap())
            .unwrap();
        assert!((swing - 1.8).abs() < 1e-10);
        let mass = q.abs_integral().unwrap();
        assert!((mass - 1.0).abs() < 1e-10);
        let bound = range_to_mass_bound(1, 0.9);
        assert!((bound - 56.0 / (1.0f64 - 0.81).sqrt()).abs() < 1e-9);
        assert!(swing / mass <= bound);

        // Degenerate window at a = 0.
        assert_eq!(
            q.range_over(&Interval::new(0.0, 0.0).unwrap()).unwrap(),
            0.0
        );
    }

    #[test]
    fn small_poly_sweep_passes() {
        for d in [1usize, 3] {
            let report = check_poly_inequality(d, &[0.0, 0.5, 0.9], 200, 7).unwrap();
            assert!(report.all_pass(), "violation at d={d}");
        }
    }

    #[test]
    fn beta_concentration_smoke() {
        let report = check_beta_concentration(128, &[0.0, 0.2, 0.4], 2000, 3).unwrap();
        assert!(report.all_pass());
        // eps = 0 rows are vacuous: bound >= 1 >= frequency.
        for row in report.rows.iter().filter(|r| r.case.contains("eps=0 ")) {
            assert!(row.bound >= 1.0);
        }
        // The full block (a, b) = (0, n) is deterministic: mass exactly 1,
        // so any positive deviation threshold is never crossed.
        for row in report
            .rows
            .iter()
            .filter(|r| r.case.contains("a=0 b=128 eps") && !r.case.ends_with("eps=0"))
        {
            assert_eq!(row.observed, 0.0);
        }
    }

    #[test]
    fn partition_count_grid() {
        let report = check_partition_count(&[0, 1], &[22, 44, 128]).unwrap();
        assert!(report.all_pass());
        let first = &report.rows[0];
        assert_eq!(first.case, "d=0 k=22");
        assert_eq!(first.observed, 4.0);
    }

    #[test]
    fn histogram_constant_far_below_proof_value() {
        let report = check_histogram_distance(&[0, 1], &[64], 50, 11).unwrap();
        assert!(report.all_pass());
        for row in &report.rows {
            assert!(row.observed < 100.0, "constant {}", row.observed);
        }
    }

    #[test]
    fn report_csv_is_writable() {
        let report = check_partition_count(&[0], &[22]).unwrap();
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("check,case,observed,bound,margin,pass"));
        assert!(text.lines().count() >= 2);
    }
}
