//! Polynomials and piecewise polynomials with exact integral arithmetic.
//!
//! A [`Polynomial`] stores its coefficients over the reference interval
//! `[-1, 1]`; evaluation maps the argument affinely from the polynomial's
//! domain onto the reference interval first. Raw monomial coefficients over
//! sample coordinates become badly conditioned on narrow intervals, while the
//! reference basis stays well behaved for the degrees (≤ 8) used here.
//!
//! Integrals are computed from the antiderivative, so quantities like the ℓ1
//! distance between two piecewise polynomials are exact up to rounding: we
//! merge breakpoints, isolate the roots of the per-segment difference, and
//! integrate with sign flips between consecutive roots.

use crate::error::{Error, Result};
use crate::interval::Interval;

/// Largest degree the estimators fit.
pub const MAX_FIT_DEGREE: usize = 8;

/// Root brackets are refined to this width by default.
pub const ROOT_TOL: f64 = 1e-12;

/// A real polynomial of degree ≤ 9 over a finite domain.
///
/// `coeffs[j]` multiplies `u^j` where `u` is the affine image of `x` in
/// `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
    domain: Interval,
}

impl Polynomial {
    /// Builds a polynomial from reference-basis coefficients.
    pub fn new(coeffs: Vec<f64>, domain: Interval) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() > 10 {
            return Err(Error::invalid(format!(
                "coefficient count {} outside 1..=10",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("non-finite polynomial coefficient"));
        }
        if !(domain.width() > 0.0) {
            return Err(Error::invalid("polynomial domain must have positive width"));
        }
        Ok(Polynomial { coeffs, domain })
    }

    /// The constant polynomial `c` on `domain`.
    pub fn constant(c: f64, domain: Interval) -> Result<Self> {
        Self::new(vec![c], domain)
    }

    /// Builds from monomial coefficients in the raw coordinate:
    /// `p(x) = Σ a_j x^j`, converted into the reference basis.
    pub fn from_monomial(a: &[f64], domain: Interval) -> Result<Self> {
        // x = mid + (w/2) u; expand Σ a_j x^j by Horner in x with linear x(u).
        let mid = domain.midpoint();
        let half = 0.5 * domain.width();
        let mut acc = vec![0.0f64];
        for &aj in a.iter().rev() {
            // acc <- acc * (mid + half*u) + aj
            let mut next = vec![0.0; acc.len() + 1];
            for (j, &c) in acc.iter().enumerate() {
                next[j] += c * mid;
                next[j + 1] += c * half;
            }
            next[0] += aj;
            while next.len() > 1 && *next.last().unwrap() == 0.0 {
                next.pop();
            }
            acc = next;
        }
        Self::new(acc, domain)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Evaluates at `x`. NaN propagates; use [`Polynomial::checked_eval`]
    /// when the argument is untrusted.
    pub fn eval(&self, x: f64) -> f64 {
        let u = self.domain.to_reference(x);
        self.eval_ref(u)
    }

    pub fn checked_eval(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::invalid(format!("evaluation point {x} not finite")));
        }
        Ok(self.eval(x))
    }

    fn eval_ref(&self, u: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * u + c;
        }
        acc
    }

    /// Exact integral over `J ⊆ domain`.
    pub fn integral_over(&self, j: &Interval) -> Result<f64> {
        let slack = 1e-9 * (1.0 + self.domain.width());
        if j.lo < self.domain.lo - slack || j.hi > self.domain.hi + slack {
            return Err(Error::invalid(format!(
                "integration range [{}, {}] escapes domain [{}, {}]",
                j.lo, j.hi, self.domain.lo, self.domain.hi
            )));
        }
        let u1 = self.domain.to_reference(j.lo.max(self.domain.lo));
        let u2 = self.domain.to_reference(j.hi.min(self.domain.hi));
        Ok(self.integral_ref(u1, u2))
    }

    /// Exact integral over the full domain.
    pub fn integral(&self) -> f64 {
        self.integral_ref(-1.0, 1.0)
    }

    fn integral_ref(&self, u1: f64, u2: f64) -> f64 {
        // ∫ p dx = (w/2) ∫ p(u) du over the reference image.
        let half = 0.5 * self.domain.width();
        let mut s = 0.0;
        let mut p1 = u1;
        let mut p2 = u2;
        for (j, &c) in self.coeffs.iter().enumerate() {
            s += c * (p2 - p1) / (j as f64 + 1.0);
            p1 *= u1;
            p2 *= u2;
        }
        s * half
    }

    /// Derivative with respect to `x`, on the same domain.
    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() == 1 {
            return Polynomial {
                coeffs: vec![0.0],
                domain: self.domain,
            };
        }
        let scale = 2.0 / self.domain.width();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, &c)| c * j as f64 * scale)
            .collect();
        Polynomial {
            coeffs,
            domain: self.domain,
        }
    }

    /// Re-expresses the same pointwise function over a new positive-width
    /// domain (usually a sub-interval, e.g. when splitting pieces).
    pub fn rebase(&self, new_domain: Interval) -> Result<Polynomial> {
        if !(new_domain.width() > 0.0) {
            return Err(Error::invalid("rebase target must have positive width"));
        }
        // u_old = alpha * u_new + beta
        let w_old = self.domain.width();
        let alpha = new_domain.width() / w_old;
        let beta = 2.0 * (new_domain.lo - self.domain.lo) / w_old + alpha - 1.0;
        let mut acc = vec![0.0f64];
        for &c in self.coeffs.iter().rev() {
            let mut next = vec![0.0; acc.len() + 1];
            for (j, &a) in acc.iter().enumerate() {
                next[j] += a * beta;
                next[j + 1] += a * alpha;
            }
            next[0] += c;
            next.truncate(self.coeffs.len());
            acc = next;
        }
        while acc.len() > 1 && *acc.last().unwrap() == 0.0 {
            acc.pop();
        }
        Polynomial::new(acc, new_domain)
    }

    /// `self + s * other`; both must share a domain.
    pub fn add_scaled(&self, other: &Polynomial, s: f64) -> Result<Polynomial> {
        if self.domain != other.domain {
            return Err(Error::invalid("polynomial domains differ in add_scaled"));
        }
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![0.0; n];
        for (j, c) in coeffs.iter_mut().enumerate() {
            let a = self.coeffs.get(j).copied().unwrap_or(0.0);
            let b = other.coeffs.get(j).copied().unwrap_or(0.0);
            *c = a + s * b;
        }
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        Polynomial::new(coeffs, self.domain)
    }

    pub fn scaled(&self, s: f64) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            domain: self.domain,
        }
    }

    /// Adds a constant in place.
    pub fn shift(&mut self, c: f64) {
        self.coeffs[0] += c;
    }

    /// ∫ |p| over `J ⊆ domain`, using root isolation to flip signs exactly.
    pub fn abs_integral_over(&self, j: &Interval) -> Result<f64> {
        match isolate_roots(self, j, ROOT_TOL)? {
            RootFind::IdenticallyZero => Ok(0.0),
            RootFind::Roots(roots) => {
                let mut cuts = Vec::with_capacity(roots.len() + 2);
                cuts.push(j.lo);
                cuts.extend(roots.iter().copied().filter(|r| *r > j.lo && *r < j.hi));
                cuts.push(j.hi);
                let mut total = 0.0;
                for w in cuts.windows(2) {
                    let seg = Interval::new(w[0], w[1])?;
                    total += self.integral_over(&seg)?.abs();
                }
                Ok(total)
            }
        }
    }

    /// ∫ |p| over the full domain.
    pub fn abs_integral(&self) -> Result<f64> {
        let d = self.domain;
        self.abs_integral_over(&Interval::new(d.lo, d.hi)?)
    }

    /// (max − min) of the polynomial over `J ⊆ domain`, located through the
    /// derivative's roots.
    pub fn range_over(&self, j: &Interval) -> Result<f64> {
        if j.width() == 0.0 {
            return Ok(0.0);
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut consider = |v: f64| {
            lo = lo.min(v);
            hi = hi.max(v);
        };
        consider(self.eval(j.lo));
        consider(self.eval(j.hi));
        if self.degree() >= 2 {
            if let RootFind::Roots(crit) = isolate_roots(&self.derivative(), j, ROOT_TOL)? {
                for r in crit {
                    consider(self.eval(r));
                }
            }
        }
        Ok(hi - lo)
    }
}

/// Outcome of root isolation.
#[derive(Debug, Clone, PartialEq)]
pub enum RootFind {
    /// Every coefficient is exactly zero; the caller decides what that means.
    IdenticallyZero,
    /// Bracketed roots in ascending order, deduplicated within the tolerance.
    Roots(Vec<f64>),
}

/// Isolates the real roots of `p` inside `J ⊆ domain`.
///
/// Sign changes are located on monotone segments cut at the derivative's
/// roots (computed recursively), merged with a uniform `4·(degree+1)`-point
/// scan, then refined by bisection to width ≤ `tol`. Splitting at derivative
/// roots guarantees at most one sign change per segment, so no root pair can
/// hide between scan points. Tangential (even-multiplicity) roots may be
/// reported or dropped; they never carry sign changes, so they do not affect
/// the absolute-value integrals built on top of this.
pub fn isolate_roots(p: &Polynomial, j: &Interval, tol: f64) -> Result<RootFind> {
    if !(tol > 0.0) {
        return Err(Error::invalid("root tolerance must be positive"));
    }
    if p.is_zero() {
        return Ok(RootFind::IdenticallyZero);
    }
    if j.width() == 0.0 {
        return Ok(RootFind::Roots(Vec::new()));
    }

    // Candidate cut points: uniform scan plus derivative roots.
    let n_scan = 4 * (p.degree() + 1);
    let mut cuts: Vec<f64> = (0..=n_scan)
        .map(|i| j.lo + j.width() * i as f64 / n_scan as f64)
        .collect();
    if p.degree() >= 2 {
        if let RootFind::Roots(crit) = isolate_roots(&p.derivative(), j, tol)? {
            cuts.extend(crit);
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() <= tol);

    let mut roots = Vec::new();
    let mut prev_x = cuts[0];
    let mut prev_v = p.eval(prev_x);
    if prev_v == 0.0 {
        roots.push(prev_x);
    }
    for &x in cuts.iter().skip(1) {
        let v = p.eval(x);
        if v == 0.0 {
            roots.push(x);
        } else if prev_v != 0.0 && (prev_v < 0.0) != (v < 0.0) {
            roots.push(bisect(p, prev_x, x, tol));
        }
        prev_x = x;
        prev_v = v;
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() <= tol);
    Ok(RootFind::Roots(roots))
}

fn bisect(p: &Polynomial, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut fa = p.eval(a);
    for _ in 0..128 {
        if b - a <= tol {
            break;
        }
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = p.eval(m);
        if fm == 0.0 {
            return m;
        }
        if (fa < 0.0) != (fm < 0.0) {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

/// A contiguous piecewise polynomial: piece `i` lives on
/// `[breakpoints[i], breakpoints[i+1])`, the final piece closed at the right.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePolynomial {
    breakpoints: Vec<f64>,
    pieces: Vec<Polynomial>,
}

impl PiecewisePolynomial {
    /// Builds from contiguous pieces; adjacent domains must share edges
    /// exactly. Edge ownership is canonicalized: interior pieces are
    /// half-open, the final piece closed.
    pub fn new(mut pieces: Vec<Polynomial>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::invalid("piecewise polynomial needs pieces"));
        }
        let mut breakpoints = Vec::with_capacity(pieces.len() + 1);
        breakpoints.push(pieces[0].domain().lo);
        for w in pieces.windows(2) {
            if w[0].domain().hi != w[1].domain().lo {
                return Err(Error::invalid(format!(
                    "pieces not contiguous: {} vs {}",
                    w[0].domain().hi,
                    w[1].domain().lo
                )));
            }
        }
        let last = pieces.len() - 1;
        for (i, p) in pieces.iter_mut().enumerate() {
            p.domain.closed_right = i == last;
            breakpoints.push(p.domain.hi);
        }
        Ok(PiecewisePolynomial {
            breakpoints,
            pieces,
        })
    }

    /// A single constant piece.
    pub fn constant(c: f64, domain: Interval) -> Result<Self> {
        Self::new(vec![Polynomial::constant(c, domain)?])
    }

    pub fn pieces(&self) -> &[Polynomial] {
        &self.pieces
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn num_pieces(&self) -> usize {
        self.pieces.len()
    }

    /// The closed support interval.
    pub fn support(&self) -> Interval {
        Interval {
            lo: self.breakpoints[0],
            hi: *self.breakpoints.last().unwrap(),
            closed_right: true,
        }
    }

    /// Evaluates at `x`; zero outside the support. The right support edge
    /// belongs to the last piece.
    pub fn eval(&self, x: f64) -> f64 {
        let last = *self.breakpoints.last().unwrap();
        if x < self.breakpoints[0] || x > last {
            return 0.0;
        }
        if x == last {
            return self.pieces.last().unwrap().eval(x);
        }
        let idx = match self
            .breakpoints
            .partition_point(|b| *b <= x)
        {
            0 => 0,
            k => k - 1,
        };
        self.pieces[idx].eval(x)
    }

    /// Signed total mass Σ ∫ piece.
    pub fn total_mass(&self) -> f64 {
        self.pieces.iter().map(|p| p.integral()).sum()
    }

    /// Signed mass over an arbitrary interval (zero outside the support).
    pub fn mass_over(&self, j: &Interval) -> Result<f64> {
        let mut total = 0.0;
        for p in &self.pieces {
            if let Some(seg) = p.domain().intersect(j) {
                if seg.width() > 0.0 {
                    total += p.integral_over(&seg)?;
                }
            }
        }
        Ok(total)
    }

    /// ∫ |g| over the support.
    pub fn abs_mass(&self) -> Result<f64> {
        let mut total = 0.0;
        for p in &self.pieces {
            total += p.abs_integral()?;
        }
        Ok(total)
    }

    /// Clips the negative part and rescales so the result is a density:
    /// pointwise ≥ 0 with unit mass. Pieces are split at their sign changes;
    /// negative segments become explicit zero pieces.
    pub fn normalize(&self) -> Result<PiecewisePolynomial> {
        let mut out: Vec<Polynomial> = Vec::with_capacity(self.pieces.len());
        let mut positive_mass = 0.0;
        for p in &self.pieces {
            let d = p.domain();
            let segs = match isolate_roots(p, &Interval::new(d.lo, d.hi)?, ROOT_TOL)? {
                RootFind::IdenticallyZero => vec![(d.lo, d.hi)],
                RootFind::Roots(roots) => {
                    let mut cuts = vec![d.lo];
                    cuts.extend(roots.iter().copied().filter(|r| *r > d.lo && *r < d.hi));
                    cuts.push(d.hi);
                    cuts.windows(2).map(|w| (w[0], w[1])).collect()
                }
            };
            for (a, b) in segs {
                if !(a < b) {
                    continue;
                }
                let seg = Interval::new(a, b)?;
                let sub = p.rebase(seg)?;
                let m = sub.integral();
                // Sign decided by the segment mass; roots split sign changes.
                if m > 0.0 {
                    positive_mass += m;
                    out.push(sub);
                } else {
                    out.push(Polynomial::constant(0.0, seg)?);
                }
            }
        }
        if !(positive_mass > 0.0) {
            return Err(Error::numeric("no positive mass to normalize"));
        }
        let scale = 1.0 / positive_mass;
        for p in &mut out {
            *p = p.scaled(scale);
        }
        PiecewisePolynomial::new(out)
    }
}

/// Exact ℓ1 distance ∫ |g1 − g2| between two piecewise polynomials; each is
/// zero outside its own support.
pub fn l1_pp(g1: &PiecewisePolynomial, g2: &PiecewisePolynomial) -> Result<f64> {
    if std::ptr::eq(g1, g2) {
        return Ok(0.0);
    }
    let lo = g1.breakpoints()[0].min(g2.breakpoints()[0]);
    let hi = g1
        .breakpoints()
        .last()
        .unwrap()
        .max(*g2.breakpoints().last().unwrap());
    l1_pp_over(g1, g2, &Interval::closed(lo, hi)?)
}

/// Exact ∫_J |g1 − g2| restricted to an interval.
pub fn l1_pp_over(
    g1: &PiecewisePolynomial,
    g2: &PiecewisePolynomial,
    j: &Interval,
) -> Result<f64> {
    let mut edges: Vec<f64> = g1
        .breakpoints()
        .iter()
        .chain(g2.breakpoints().iter())
        .copied()
        .filter(|e| *e > j.lo && *e < j.hi)
        .collect();
    edges.push(j.lo);
    edges.push(j.hi);
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    edges.dedup();

    let mut total = 0.0;
    let mut i1 = 0usize;
    let mut i2 = 0usize;
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(a < b) {
            continue;
        }
        let seg = Interval::new(a, b)?;
        while i1 < g1.pieces().len() && g1.pieces()[i1].domain().hi <= a {
            i1 += 1;
        }
        while i2 < g2.pieces().len() && g2.pieces()[i2].domain().hi <= a {
            i2 += 1;
        }
        let p1 = piece_on(g1, i1, &seg)?;
        let p2 = piece_on(g2, i2, &seg)?;
        let diff = match (p1, p2) {
            (Some(a1), Some(b1)) => a1.add_scaled(&b1, -1.0)?,
            (Some(a1), None) => a1,
            (None, Some(b1)) => b1.scaled(-1.0),
            (None, None) => continue,
        };
        total += diff.abs_integral()?;
    }
    Ok(total)
}

fn piece_on(
    g: &PiecewisePolynomial,
    idx: usize,
    seg: &Interval,
) -> Result<Option<Polynomial>> {
    if idx >= g.pieces().len() {
        return Ok(None);
    }
    let p = &g.pieces()[idx];
    let d = p.domain();
    if d.lo <= seg.lo && d.hi >= seg.hi {
        Ok(Some(p.rebase(*seg)?))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn eval_constant_linear_quadratic() {
        let c = Polynomial::constant(1.0, iv(0.0, 1.0)).unwrap();
        assert_eq!(c.eval(0.5), 1.0);

        let two_x = Polynomial::from_monomial(&[0.0, 2.0], iv(0.0, 1.0)).unwrap();
        assert!((two_x.eval(0.25) - 0.5).abs() < 1e-15);

        let x_sq = Polynomial::from_monomial(&[0.0, 0.0, 1.0], iv(-1.0, 1.0)).unwrap();
        assert!((x_sq.eval(0.5) - 0.25).abs() < 1e-15);

        assert!(x_sq.checked_eval(f64::NAN).is_err());
    }

    #[test]
    fn integrals_match_antiderivatives() {
        let two_x = Polynomial::from_monomial(&[0.0, 2.0], iv(0.0, 1.0)).unwrap();
        assert!((two_x.integral_over(&iv(0.0, 0.5)).unwrap() - 0.25).abs() < 1e-15);

        let one = Polynomial::constant(1.0, iv(0.0, 1.0)).unwrap();
        assert!((one.integral_over(&iv(0.2, 0.7)).unwrap() - 0.5).abs() < 1e-15);

        let x_sq = Polynomial::from_monomial(&[0.0, 0.0, 1.0], iv(-1.0, 1.0)).unwrap();
        assert!((x_sq.integral() - 2.0 / 3.0).abs() < 1e-15);

        // Outside the domain is an error.
        assert!(one.integral_over(&iv(-0.5, 0.5)).is_err());
    }

    #[test]
    fn integral_is_linear_in_coefficients() {
        let d = iv(-2.0, 3.0);
        let p = Polynomial::from_monomial(&[1.0, -0.5, 2.0], d).unwrap();
        let q = Polynomial::from_monomial(&[0.3, 1.5, -1.0, 0.25], d).unwrap();
        let j = iv(-1.0, 2.0);
        let (a, b) = (1.7, -2.3);
        let combo = p.scaled(a).add_scaled(&q.scaled(b), 1.0).unwrap();
        let lhs = combo.integral_over(&j).unwrap();
        let rhs = a * p.integral_over(&j).unwrap() + b * q.integral_over(&j).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn roots_of_simple_polynomials() {
        let p = Polynomial::from_monomial(&[-1.0, 2.0], iv(0.0, 1.0)).unwrap();
        match isolate_roots(&p, &iv(0.0, 1.0), 1e-12).unwrap() {
            RootFind::Roots(r) => {
                assert_eq!(r.len(), 1);
                assert!((r[0] - 0.5).abs() < 1e-11);
            }
            RootFind::IdenticallyZero => panic!("not zero"),
        }

        let q = Polynomial::from_monomial(&[-0.25, 0.0, 1.0], iv(-1.0, 1.0)).unwrap();
        match isolate_roots(&q, &iv(-1.0, 1.0), 1e-12).unwrap() {
            RootFind::Roots(r) => {
                assert_eq!(r.len(), 2);
                assert!((r[0] + 0.5).abs() < 1e-11);
                assert!((r[1] - 0.5).abs() < 1e-11);
            }
            RootFind::IdenticallyZero => panic!("not zero"),
        }

        let c = Polynomial::constant(1.0, iv(0.0, 1.0)).unwrap();
        assert_eq!(
            isolate_roots(&c, &iv(0.0, 1.0), 1e-12).unwrap(),
            RootFind::Roots(vec![])
        );

        let z = Polynomial::constant(0.0, iv(0.0, 1.0)).unwrap();
        assert_eq!(
            isolate_roots(&z, &iv(0.0, 1.0), 1e-12).unwrap(),
            RootFind::IdenticallyZero
        );
    }

    #[test]
    fn rebase_preserves_pointwise_values() {
        let p = Polynomial::from_monomial(&[0.5, -1.0, 0.75, 2.0], iv(-1.0, 3.0)).unwrap();
        let sub = p.rebase(iv(0.25, 1.5)).unwrap();
        for i in 0..=20 {
            let x = 0.25 + 1.25 * i as f64 / 20.0;
            assert!((p.eval(x) - sub.eval(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn l1_between_simple_pairs() {
        let one = PiecewisePolynomial::constant(1.0, iv(0.0, 1.0)).unwrap();
        let two_x = PiecewisePolynomial::new(vec![
            Polynomial::from_monomial(&[0.0, 2.0], iv(0.0, 1.0)).unwrap(),
        ])
        .unwrap();
        assert!((l1_pp(&one, &two_x).unwrap() - 0.5).abs() < 1e-12);
        assert!(l1_pp(&one, &one).unwrap() == 0.0);

        let shifted = PiecewisePolynomial::constant(1.0, iv(1.0, 2.0)).unwrap();
        assert!((l1_pp(&one, &shifted).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn normalize_clips_and_rescales() {
        // 2x - 0.5 on [0,1): positive on [0.25, 1) with mass 0.5625.
        let g = PiecewisePolynomial::new(vec![
            Polynomial::from_monomial(&[-0.5, 2.0], iv(0.0, 1.0)).unwrap(),
        ])
        .unwrap();
        let n = g.normalize().unwrap();
        assert!((n.total_mass() - 1.0).abs() < 1e-9);
        assert_eq!(n.eval(0.1), 0.0);
        let expected = (2.0 * 0.5 - 0.5) / 0.5625;
        assert!((n.eval(0.5) - expected).abs() < 1e-9);

        // Already a density stays put.
        let u = PiecewisePolynomial::constant(1.0, iv(0.0, 1.0)).unwrap();
        let nu = u.normalize().unwrap();
        assert!(l1_pp(&u, &nu).unwrap() < 1e-12);

        // All-negative input has no positive mass.
        let neg = PiecewisePolynomial::constant(-1.0, iv(0.0, 1.0)).unwrap();
        assert!(neg.normalize().is_err());
    }

    #[test]
    fn eval_outside_support_is_zero() {
        let g = PiecewisePolynomial::constant(2.0, iv(0.0, 1.0)).unwrap();
        assert_eq!(g.eval(-0.5), 0.0);
        assert_eq!(g.eval(1.5), 0.0);
        assert_eq!(g.eval(1.0), 2.0); // closed right edge
    }
}
