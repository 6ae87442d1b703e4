use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Enough to shrink any finite bracket to machine precision.
const MAX_ITERS: usize = 2000;

/// Default bracket tolerance, relative to the bracket width.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Maximizes a unimodal `f` on `[lo, hi]`, returning `(argmax, f(argmax))`.
///
/// Iterates until the bracket is narrower than `tol * (hi - lo)`, or a few
/// ulps if that is larger. The endpoints are compared against the interior
/// estimate at the end, so a monotone `f` returns the exact endpoint.
pub fn golden_section_max<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    if !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(Error::domain(format!("invalid bracket [{lo}, {hi}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    let f_lo = f(lo);
    if lo == hi {
        return Ok((lo, f_lo));
    }
    let f_hi = f(hi);
    // never ask for a bracket narrower than a few ulps of its endpoints
    let width_tol = (tol * (hi - lo)).max(4.0 * f64::EPSILON * lo.abs().max(hi.abs()));

    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iters = 0;
    while b - a > width_tol && iters < MAX_ITERS {
        iters += 1;
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
    }
    let (mut best_x, mut best_f) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    if f_lo > best_f {
        best_x = lo;
        best_f = f_lo;
    }
    if f_hi > best_f {
        best_x = hi;
        best_f = f_hi;
    }
    Ok((best_x, best_f))
}
