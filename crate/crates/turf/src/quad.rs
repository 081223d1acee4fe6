//! Adaptive Simpson quadrature with recursive bisection.

/// Integral estimate plus the unresolved error carried out of depth-capped
/// subtrees.
#[derive(Debug, Clone, Copy)]
pub struct QuadOutcome {
    pub value: f64,
    pub residual: f64,
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`, splitting at
/// most `max_depth` times. Subtrees that hit the depth cap contribute their
/// Richardson-extrapolated value and report the leftover error estimate in
/// `residual` instead of recursing further.
pub fn adaptive_simpson(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: usize,
) -> QuadOutcome {
    if !(b > a) {
        return QuadOutcome {
            value: 0.0,
            residual: 0.0,
        };
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(a, b, fa, fm, fb);
    let mut out = QuadOutcome {
        value: 0.0,
        residual: 0.0,
    };
    recurse(f, a, b, fa, fm, fb, whole, tol, max_depth, &mut out);
    out
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
    out: &mut QuadOutcome,
) {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || m <= a || m >= b {
        out.value += left + right + delta / 15.0;
        return;
    }
    if depth == 0 {
        out.value += left + right + delta / 15.0;
        out.residual += delta.abs() / 15.0;
        return;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, out);
    recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, out);
}
