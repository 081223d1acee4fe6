//! Degree-d polynomial fitting by node interpolation, and the node tables.
//!
//! A node spec cuts the unit interval at `d+2` points. The fit on an interval
//! is the unique degree-`d` polynomial whose integral over each of the `d+1`
//! node sub-intervals equals the empirical mass there — a `(d+1) × (d+1)`
//! linear solve. Its quality is governed by the ratio `r_d`: the worst case,
//! over nonzero polynomials `h`, of `∫|h|` against the sum of the absolute
//! sub-interval integrals of `h`. That worst case is attained on the `d+1`
//! polynomials that each have zero integral on all sub-intervals but one,
//! which reduces the ratio to `d+1` small null-space solves.
//!
//! Node positions for degrees 0–3 come from the known closed-form/numeric
//! optima; degrees 4–8 are produced at startup by a symmetric direct search
//! and are flagged as computed rather than externally verified.

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::measure::EmpiricalMeasure;
use crate::poly::{Polynomial, MAX_FIT_DEGREE};

/// Interpolation nodes on `[0, 1]` for one degree, with the achieved ratio.
#[derive(Debug, Clone, Serialize)]
pub struct NodeSpec {
    pub d: usize,
    /// `d + 2` increasing cut points, starting at 0 and ending at 1.
    pub nodes: Vec<f64>,
    /// Worst-case ℓ1-to-node-mass ratio `r_d` for these nodes.
    pub ratio: f64,
    /// Whether the node positions were computed here rather than taken from
    /// the published table.
    pub computed: bool,
}

impl NodeSpec {
    pub fn new(d: usize, nodes: Vec<f64>) -> Result<Self> {
        validate_nodes(d, &nodes)?;
        let ratio = compute_ratio(&nodes, d)?;
        Ok(NodeSpec {
            d,
            nodes,
            ratio,
            computed: false,
        })
    }
}

fn validate_nodes(d: usize, nodes: &[f64]) -> Result<()> {
    if nodes.len() != d + 2 {
        return Err(Error::invalid(format!(
            "degree {d} needs {} nodes, got {}",
            d + 2,
            nodes.len()
        )));
    }
    if nodes[0] != 0.0 || *nodes.last().unwrap() != 1.0 {
        return Err(Error::invalid("nodes must start at 0 and end at 1"));
    }
    if nodes.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid("nodes must be strictly increasing"));
    }
    Ok(())
}

/// The per-degree node table. Entries for d ≤ 3 carry the published optimal
/// positions; d = 4..8 are computed once per process and cached.
pub fn node_spec(d: usize) -> Result<&'static NodeSpec> {
    if d > MAX_FIT_DEGREE {
        return Err(Error::invalid(format!("degree {d} exceeds {MAX_FIT_DEGREE}")));
    }
    static TABLE: OnceLock<Vec<NodeSpec>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut specs = Vec::with_capacity(MAX_FIT_DEGREE + 1);
        specs.push(NodeSpec::new(0, vec![0.0, 1.0]).unwrap());
        specs.push(NodeSpec::new(1, vec![0.0, 0.5, 1.0]).unwrap());
        specs.push(NodeSpec::new(2, vec![0.0, 0.2599, 0.7401, 1.0]).unwrap());
        specs.push(NodeSpec::new(3, vec![0.0, 0.1548, 0.5, 0.8452, 1.0]).unwrap());
        for d in 4..=MAX_FIT_DEGREE {
            let mut spec = optimize_nodes_symmetric(d).unwrap();
            spec.computed = true;
            specs.push(spec);
        }
        specs
    });
    Ok(&table[d])
}

/// Fits the unique degree-d polynomial whose integral over each node
/// sub-interval of `I` equals the empirical mass there.
pub fn fit_eq(e: &EmpiricalMeasure, i: &Interval, spec: &NodeSpec) -> Result<Polynomial> {
    if !(i.width() > 0.0) {
        return Err(Error::invalid("fit interval must have positive width"));
    }
    let d = spec.d;
    let w = i.width();
    let mut masses = Vec::with_capacity(d + 1);
    for s in 0..=d {
        let lo = i.lo + spec.nodes[s] * w;
        let hi = i.lo + spec.nodes[s + 1] * w;
        let sub = if s == d && i.closed_right {
            Interval::closed(lo, i.hi)?
        } else {
            Interval::new(lo, hi)?
        };
        masses.push(e.mass(&sub));
    }
    fit_from_masses(&masses, i, spec)
}

/// Fits the degree-d polynomial with the prescribed masses on the node
/// sub-intervals of `I` (the fit is linear in the masses).
pub fn fit_from_masses(masses: &[f64], i: &Interval, spec: &NodeSpec) -> Result<Polynomial> {
    let d = spec.d;
    if masses.len() != d + 1 {
        return Err(Error::invalid(format!(
            "degree {d} needs {} masses, got {}",
            d + 1,
            masses.len()
        )));
    }
    if !(i.width() > 0.0) {
        return Err(Error::invalid("fit interval must have positive width"));
    }
    let w = i.width();
    let us: Vec<f64> = spec.nodes.iter().map(|&t| 2.0 * t - 1.0).collect();
    let rhs: Vec<f64> = masses.iter().map(|q| q * 2.0 / w).collect();
    // Row s: Σ_j c_j (U_{s+1}^{j+1} − U_s^{j+1}) / (j+1) = 2 q_s / w.
    let mut mat = vec![vec![0.0f64; d + 1]; d + 1];
    for s in 0..=d {
        let (a, b) = (us[s], us[s + 1]);
        let mut pa = a;
        let mut pb = b;
        for (j, cell) in mat[s].iter_mut().enumerate() {
            *cell = (pb - pa) / (j as f64 + 1.0);
            pa *= a;
            pb *= b;
        }
    }
    let coeffs = solve_dense(mat, rhs)?;
    Polynomial::new(coeffs, *i)
}

/// Worst-case ratio of `∫₀¹|h|` to the summed absolute node sub-interval
/// integrals, over degree-d polynomials for the given nodes.
pub fn compute_ratio(nodes: &[f64], d: usize) -> Result<f64> {
    validate_nodes(d, nodes)?;
    if d == 0 {
        return Ok(1.0);
    }
    let unit = Interval::new(0.0, 1.0)?;
    let us: Vec<f64> = nodes.iter().map(|&t| 2.0 * t - 1.0).collect();
    // Moment of u^j over node sub-interval s (reference coordinates, the
    // common w/2 factor cancels between numerator and denominator).
    let moment = |s: usize, j: usize| -> f64 {
        let (a, b) = (us[s], us[s + 1]);
        (b.powi(j as i32 + 1) - a.powi(j as i32 + 1)) / (j as f64 + 1.0)
    };
    let mut worst = 0.0f64;
    for hole in 0..=d {
        // h has zero integral on every sub-interval except `hole`; pin the
        // leading coefficient to 1 and solve for the rest.
        let mut mat = Vec::with_capacity(d);
        let mut rhs = Vec::with_capacity(d);
        for s in (0..=d).filter(|s| *s != hole) {
            mat.push((0..d).map(|j| moment(s, j)).collect::<Vec<f64>>());
            rhs.push(-moment(s, d));
        }
        let mut coeffs = solve_dense(mat, rhs).map_err(|_| {
            Error::Singular(format!(
                "null-space construction degenerate for nodes {nodes:?} (hole {hole})"
            ))
        })?;
        coeffs.push(1.0);
        let h = Polynomial::new(coeffs, unit)?;
        let num = h.abs_integral()?;
        let den = h
            .integral_over(&Interval::new(nodes[hole], nodes[hole + 1])?)?
            .abs();
        if !(den > 0.0) {
            return Err(Error::Singular(
                "null-space polynomial has zero mass on its own interval".into(),
            ));
        }
        worst = worst.max(num / den);
    }
    Ok(worst)
}

/// Minimizes [`compute_ratio`] over the symmetric node family for d ≤ 3
/// (a single free parameter once symmetry is imposed).
pub fn optimize_nodes(d: usize, grid_resolution: f64) -> Result<NodeSpec> {
    if d > 3 {
        return Err(Error::invalid(
            "direct node optimization is limited to d <= 3; higher degrees use the symmetric search",
        ));
    }
    if !(grid_resolution > 0.0) {
        return Err(Error::invalid("grid resolution must be positive"));
    }
    if d == 0 {
        return NodeSpec::new(0, vec![0.0, 1.0]);
    }
    let assemble = |m: f64| -> Vec<f64> {
        match d {
            1 => vec![0.0, m, 1.0],
            2 => vec![0.0, m, 1.0 - m, 1.0],
            _ => vec![0.0, m, 0.5, 1.0 - m, 1.0],
        }
    };
    let hi = if d == 1 { 0.98 } else { 0.49 };
    let objective = |m: f64| -> f64 {
        compute_ratio(&assemble(m), d).unwrap_or(f64::INFINITY)
    };
    // Coarse grid scan, then golden-section refinement around the best cell.
    let mut best_m = 0.25;
    let mut best_v = f64::INFINITY;
    let steps = ((hi - 0.02) / grid_resolution).ceil() as usize;
    for s in 0..=steps {
        let m = 0.02 + (hi - 0.02) * s as f64 / steps as f64;
        let v = objective(m);
        if v < best_v {
            best_v = v;
            best_m = m;
        }
    }
    let span = (hi - 0.02) / steps as f64;
    let (mut a, mut b) = ((best_m - span).max(0.005), (best_m + span).min(hi));
    let phi = 0.5 * (3.0 - 5f64.sqrt());
    let mut x1 = a + phi * (b - a);
    let mut x2 = b - phi * (b - a);
    let mut f1 = objective(x1);
    let mut f2 = objective(x2);
    for _ in 0..80 {
        if b - a < 1e-7 {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + phi * (b - a);
            f1 = objective(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = b - phi * (b - a);
            f2 = objective(x2);
        }
    }
    let m = 0.5 * (a + b);
    NodeSpec::new(d, assemble(m))
}

/// Symmetric direct search (Nelder–Mead) over the free interior node
/// positions; used to populate the table for d = 4..8.
pub fn optimize_nodes_symmetric(d: usize) -> Result<NodeSpec> {
    if d <= 3 {
        return optimize_nodes(d, 1e-3);
    }
    let free = d / 2;
    let assemble = |params: &[f64]| -> Option<Vec<f64>> {
        let mut interior: Vec<f64> = params.to_vec();
        interior.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if interior[0] <= 0.005 || *interior.last().unwrap() >= 0.495 {
            return None;
        }
        if interior.windows(2).any(|w| w[1] - w[0] < 1e-4) {
            return None;
        }
        let mut nodes = vec![0.0];
        nodes.extend(interior.iter().copied());
        if d % 2 == 1 {
            nodes.push(0.5);
        }
        for &m in interior.iter().rev() {
            nodes.push(1.0 - m);
        }
        nodes.push(1.0);
        Some(nodes)
    };
    let objective = |params: &[f64]| -> f64 {
        match assemble(params) {
            Some(nodes) => compute_ratio(&nodes, d).unwrap_or(f64::INFINITY),
            None => f64::INFINITY,
        }
    };
    // Chebyshev-flavored initial guess.
    let init: Vec<f64> = (1..=free)
        .map(|j| 0.5 * (1.0 - (std::f64::consts::PI * j as f64 / (d + 1) as f64).cos()))
        .collect();
    let best = nelder_mead(&objective, &init, 0.02, 400);
    let nodes = assemble(&best)
        .ok_or_else(|| Error::numeric(format!("node search left the feasible region for d={d}")))?;
    NodeSpec::new(d, nodes)
}

fn nelder_mead(
    f: &dyn Fn(&[f64]) -> f64,
    init: &[f64],
    step: f64,
    max_iter: usize,
) -> Vec<f64> {
    let n = init.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((init.to_vec(), f(init)));
    for i in 0..n {
        let mut p = init.to_vec();
        p[i] += step;
        let v = f(&p);
        simplex.push((p, v));
    }
    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        if (simplex[n].1 - simplex[0].1).abs() < 1e-10 {
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|(p, _)| p[j]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();
        let reflect: Vec<f64> = (0..n)
            .map(|j| centroid[j] + (centroid[j] - worst.0[j]))
            .collect();
        let fr = f(&reflect);
        if fr < simplex[0].1 {
            let expand: Vec<f64> = (0..n)
                .map(|j| centroid[j] + 2.0 * (centroid[j] - worst.0[j]))
                .collect();
            let fe = f(&expand);
            simplex[n] = if fe < fr { (expand, fe) } else { (reflect, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflect, fr);
        } else {
            let contract: Vec<f64> = (0..n)
                .map(|j| centroid[j] - 0.5 * (centroid[j] - worst.0[j]))
                .collect();
            let fc = f(&contract);
            if fc < worst.1 {
                simplex[n] = (contract, fc);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let shrunk: Vec<f64> = (0..n)
                        .map(|j| best[j] + 0.5 * (entry.0[j] - best[j]))
                        .collect();
                    entry.1 = f(&shrunk);
                    entry.0 = shrunk;
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    simplex[0].0.clone()
}

/// Gaussian elimination with partial pivoting for the small systems here.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    if a.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(Error::invalid("non-square linear system"));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    for col in 0..n {
        let (pivot_row, pivot_val) = (col..n)
            .map(|r| (r, a[r][col].abs()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
            .unwrap();
        if pivot_val < 1e-13 {
            return Err(Error::Singular(format!("pivot {pivot_val} at column {col}")));
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for r in (col + 1)..n {
            let factor = a[r][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            for c in col..n {
                a[r][c] -= factor * a[col][c];
            }
            b[r] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in (row + 1)..n {
            acc -= a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn fit_recovers_constants_and_lines() {
        // Total mass 1 on [0,1) with d=0 gives the constant 1.
        let e = EmpiricalMeasure::from_values(vec![0.2, 0.4, 0.6, 0.8]).unwrap();
        let fit = fit_eq(&e, &Interval::closed(0.0, 1.0).unwrap(), node_spec(0).unwrap()).unwrap();
        assert!((fit.eval(0.3) - 1.0).abs() < 1e-12);

        // Symmetric masses (0.5, 0.5) with d=1 give the constant 1.
        let e = EmpiricalMeasure::from_values(vec![0.25, 0.75]).unwrap();
        let fit = fit_eq(&e, &Interval::closed(0.0, 1.0).unwrap(), node_spec(1).unwrap()).unwrap();
        assert!((fit.eval(0.1) - 1.0).abs() < 1e-10);
        assert!((fit.eval(0.9) - 1.0).abs() < 1e-10);

        // Masses (0.25, 0.75) on the half intervals give p(x) = 2x.
        let xs: Vec<f64> = (0..4)
            .flat_map(|q| {
                // place 1 sample in [0, .5), 3 in [.5, 1): quarter masses
                if q == 0 {
                    vec![0.25]
                } else {
                    vec![0.55 + 0.1 * q as f64]
                }
            })
            .collect();
        let e = EmpiricalMeasure::from_values(xs).unwrap();
        let fit = fit_eq(&e, &Interval::closed(0.0, 1.0).unwrap(), node_spec(1).unwrap()).unwrap();
        for x in [0.1, 0.5, 0.9] {
            assert!((fit.eval(x) - 2.0 * x).abs() < 1e-10, "at {x}");
        }
    }

    #[test]
    fn fit_reproduces_node_masses() {
        let e = EmpiricalMeasure::from_values(vec![
            1.02, 1.3, 1.31, 1.4, 1.77, 2.1, 2.5, 2.51, 2.9, 2.95,
        ])
        .unwrap();
        let i = Interval::closed(1.0, 3.0).unwrap();
        for d in 0..=4 {
            let spec = node_spec(d).unwrap();
            let fit = fit_eq(&e, &i, spec).unwrap();
            for s in 0..=d {
                let lo = 1.0 + spec.nodes[s] * 2.0;
                let hi = 1.0 + spec.nodes[s + 1] * 2.0;
                let sub = if s == d {
                    Interval::closed(lo, 3.0).unwrap()
                } else {
                    Interval::new(lo, hi).unwrap()
                };
                let got = fit.integral_over(&sub).unwrap();
                assert!(
                    (got - e.mass(&sub)).abs() < 1e-10,
                    "d={d} sub-interval {s}: {got} vs {}",
                    e.mass(&sub)
                );
            }
        }
    }

    #[test]
    fn published_ratios() {
        assert!((compute_ratio(&[0.0, 1.0], 0).unwrap() - 1.0).abs() < 1e-12);
        assert!((compute_ratio(&[0.0, 0.5, 1.0], 1).unwrap() - 1.25).abs() < 1e-9);
        let r2 = compute_ratio(&[0.0, 0.2599, 0.7401, 1.0], 2).unwrap();
        assert!((r2 - 1.423).abs() < 2e-3, "r2 = {r2}");
        let r3 = compute_ratio(&[0.0, 0.1548, 0.5, 0.8452, 1.0], 3).unwrap();
        assert!((r3 - 1.559).abs() < 2e-3, "r3 = {r3}");
    }

    #[test]
    fn optimizer_recovers_published_nodes() {
        let s1 = optimize_nodes(1, 1e-3).unwrap();
        assert!((s1.nodes[1] - 0.5).abs() < 1e-4, "m1 = {}", s1.nodes[1]);
        assert!((s1.ratio - 1.25).abs() < 1e-6);

        let s2 = optimize_nodes(2, 1e-3).unwrap();
        assert!((s2.nodes[1] - 0.2599).abs() < 1e-3, "m2 = {}", s2.nodes[1]);

        let s3 = optimize_nodes(3, 1e-3).unwrap();
        assert!((s3.nodes[1] - 0.1548).abs() < 1e-3, "m3 = {}", s3.nodes[1]);
        assert!((s3.ratio - 1.559).abs() < 2e-3);

        assert!(optimize_nodes(4, 1e-3).is_err());
    }

    #[test]
    fn local_optimality_of_table_nodes() {
        for d in 1..=3 {
            let spec = node_spec(d).unwrap();
            let base = spec.ratio;
            for delta in [-0.02, 0.015] {
                let mut nodes = spec.nodes.clone();
                nodes[1] += delta;
                if d >= 2 {
                    let last = nodes.len() - 2;
                    nodes[last] -= delta;
                }
                if nodes.windows(2).all(|w| w[0] < w[1]) {
                    let perturbed = compute_ratio(&nodes, d).unwrap();
                    assert!(perturbed + 1e-9 >= base, "d={d} delta={delta}");
                }
            }
        }
    }

    #[test]
    fn computed_table_covers_high_degrees() {
        for d in 4..=MAX_FIT_DEGREE {
            let spec = node_spec(d).unwrap();
            assert!(spec.computed);
            assert!(spec.ratio >= 1.0 && spec.ratio.is_finite());
            assert_eq!(spec.nodes.len(), d + 2);
        }
    }
}
