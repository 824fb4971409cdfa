//! Real root classification for cubic polynomials.
//!
//! Roots are classified through the discriminant of the depressed cubic,
//! with a scale-relative cut deciding when a pair of roots collapses to a
//! double root. Closed-form roots are polished by a few Newton steps on the
//! original polynomial.

use alloc::vec::Vec;

use crate::math;

/// A real root together with its multiplicity (1, 2, or 3).
pub type RootMult = (f64, u8);

/// Real roots of c3 x^3 + c2 x^2 + c1 x + c0, sorted ascending.
///
/// `disc_cut` is the absolute threshold below which the discriminant is
/// treated as zero (multiple-root branch). Callers should scale it by the
/// sixth power of a magnitude estimate of the coefficients.
pub fn real_roots(c3: f64, c2: f64, c1: f64, c0: f64, disc_cut: f64) -> Vec<RootMult> {
    assert!(c3 != 0.0, "leading coefficient must be nonzero");
    // Normalize to monic x^3 + b x^2 + c x + d.
    let b = c2 / c3;
    let c = c1 / c3;
    let d = c0 / c3;

    // Depressed cubic t^3 + p t + q with x = t - b/3.
    let shift = b / 3.0;
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;

    let disc = -4.0 * p * p * p - 27.0 * q * q;

    let mut roots: Vec<RootMult> = Vec::new();
    if disc.abs() <= disc_cut {
        if p.abs() <= math::cbrt(disc_cut) && q.abs() <= math::sqrt(disc_cut) {
            // Triple root.
            roots.push((-shift, 3));
        } else {
            // Double root u and simple root -2u of t^3 + p t + q.
            let u = -3.0 * q / (2.0 * p);
            roots.push((u - shift, 2));
            roots.push((-2.0 * u - shift, 1));
        }
    } else if disc > 0.0 {
        // Three distinct real roots: trigonometric form.
        let m = 2.0 * math::sqrt(-p / 3.0);
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = math::acos(arg) / 3.0;
        for k in 0..3 {
            let t = m * math::cos(theta - 2.0 * core::f64::consts::PI * k as f64 / 3.0);
            roots.push((t - shift, 1));
        }
    } else {
        // One real root: Cardano.
        let half_q = q / 2.0;
        let rad = math::sqrt(half_q * half_q + p * p * p / 27.0);
        let t = math::cbrt(-half_q + rad) + math::cbrt(-half_q - rad);
        roots.push((t - shift, 1));
    }

    // Polish simple and double roots on the original polynomial.
    for (r, mult) in roots.iter_mut() {
        *r = polish(*r, *mult, c3, c2, c1, c0);
    }
    roots.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    roots
}

fn polish(mut x: f64, mult: u8, c3: f64, c2: f64, c1: f64, c0: f64) -> f64 {
    // Newton on p for simple roots, on p' for double roots (p' has a simple
    // zero there).
    for _ in 0..8 {
        let (f, fp, fpp) = eval_all(x, c3, c2, c1, c0);
        let (num, den) = match mult {
            1 => (f, fp),
            2 => (fp, fpp),
            _ => return x,
        };
        if den == 0.0 {
            break;
        }
        let step = num / den;
        x -= step;
        if step.abs() <= 1e-15 * (1.0 + x.abs()) {
            break;
        }
    }
    x
}

/// Value, first, and second derivative of the cubic at x.
pub fn eval_all(x: f64, c3: f64, c2: f64, c1: f64, c0: f64) -> (f64, f64, f64) {
    let f = ((c3 * x + c2) * x + c1) * x + c0;
    let fp = (3.0 * c3 * x + 2.0 * c2) * x + c1;
    let fpp = 6.0 * c3 * x + 2.0 * c2;
    (f, fp, fpp)
}
