//! Sign-change scanning and bracketing bisection.
//!
//! Robustness is preferred over speed here: candidates are located on a dense
//! grid and every bracket is closed by plain bisection, which converges
//! unconditionally for continuous functions.

use alloc::vec::Vec;

/// Refine a sign-change bracket [lo, hi] by bisection until the bracket
/// width falls below `tol`. Requires f(lo) and f(hi) of opposite sign (or
/// zero at an endpoint).
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= tol {
            return Some(mid);
        }
        let fmid = f(mid);
        if fmid == 0.0 {
            return Some(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Scan [lo, hi] on `points` grid nodes and return every sign-change
/// bracket refined to `tol`. Grid nodes where f is exactly zero are
/// returned as-is.
pub fn scan_roots<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points: usize, tol: f64) -> Vec<f64> {
    let mut roots = Vec::new();
    if points < 2 || !(hi > lo) {
        return roots;
    }
    let h = (hi - lo) / (points - 1) as f64;
    let mut x_prev = lo;
    let mut f_prev = f(lo);
    if f_prev == 0.0 {
        roots.push(lo);
    }
    for i in 1..points {
        let x = lo + i as f64 * h;
        let fx = f(x);
        if fx == 0.0 {
            roots.push(x);
        } else if f_prev != 0.0 && fx.signum() != f_prev.signum() {
            if let Some(r) = bisect(&f, x_prev, x, tol) {
                roots.push(r);
            }
        }
        x_prev = x;
        f_prev = fx;
    }
    // Collapse near-duplicates from zeros sitting exactly on grid nodes.
    roots.dedup_by(|a, b| (*a - *b).abs() <= tol.max(1e-14));
    roots
}
