//! Bracketing root finders and a golden-section minimizer.

/// Bisection on a sign change of `f` over `[lo, hi]`.
///
/// Returns `None` when the endpoints do not bracket a root. Iterates until
/// the bracket is narrower than `tol` or floating point resolution is hit.
pub fn bisect<F>(mut lo: f64, mut hi: f64, tol: f64, mut f: F) -> Option<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Some(lo);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return None;
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Some(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Bisection on a boolean predicate that is `true` at `lo` and `false` at `hi`.
/// The endpoints may come in either order.
///
/// Returns the last point known to satisfy the predicate.
pub fn bisect_predicate<F>(mut lo: f64, mut hi: f64, tol: f64, mut pred: F) -> f64
where
    F: FnMut(f64) -> bool,
{
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= tol || mid == lo || mid == hi {
            break;
        }
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Golden-section search for a minimum of `f` on `[a, b]`.
///
/// Returns `(argmin, min)`. Exact for unimodal functions; for others it
/// returns some local minimum inside the bracket.
pub fn golden_min<F>(mut a: f64, mut b: f64, tol: f64, mut f: F) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..300 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
