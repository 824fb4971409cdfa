//! Compactly supported product bump test functions.
//!
//! phi(t, x) = A exp{-1/(1 - ((x - gamma(t))/d)^2)} exp{-1/(1 - ((t - tm)/R)^2)}
//! with gamma(t) = gamma0 + s t, R = (t_hi - t_lo)/2, tm the time-window
//! midpoint. Each factor is the standard mollifier rescaled to its support,
//! so the k-th derivative's L1 norm scales like d^(1-k); normalized
//! residuals are then comparable across bump sizes. All partials are exact
//! through forward-mode jets of order three (the weak forms use at most
//! phi_txx); nothing is finite-differenced.

use crate::math;

/// Value and first three derivatives with respect to one variable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet3 {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl Jet3 {
    pub const ZERO: Jet3 = Jet3 { v: 0.0, d1: 0.0, d2: 0.0, d3: 0.0 };

    pub fn constant(v: f64) -> Jet3 {
        Jet3 { v, d1: 0.0, d2: 0.0, d3: 0.0 }
    }

    /// The identity jet at the point v.
    pub fn variable(v: f64) -> Jet3 {
        Jet3 { v, d1: 1.0, d2: 0.0, d3: 0.0 }
    }

    pub fn neg(self) -> Jet3 {
        Jet3 { v: -self.v, d1: -self.d1, d2: -self.d2, d3: -self.d3 }
    }

    pub fn add(self, o: Jet3) -> Jet3 {
        Jet3 {
            v: self.v + o.v,
            d1: self.d1 + o.d1,
            d2: self.d2 + o.d2,
            d3: self.d3 + o.d3,
        }
    }

    pub fn mul(self, o: Jet3) -> Jet3 {
        Jet3 {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
            d3: self.d3 * o.v
                + 3.0 * self.d2 * o.d1
                + 3.0 * self.d1 * o.d2
                + self.v * o.d3,
        }
    }

    pub fn scale(self, c: f64) -> Jet3 {
        Jet3 { v: c * self.v, d1: c * self.d1, d2: c * self.d2, d3: c * self.d3 }
    }

    /// 1/u by Faa di Bruno through f(u) = u^{-1}.
    pub fn recip(self) -> Jet3 {
        let u = self.v;
        let f1 = -1.0 / (u * u);
        let f2 = 2.0 / (u * u * u);
        let f3 = -6.0 / (u * u * u * u);
        Jet3 {
            v: 1.0 / u,
            d1: f1 * self.d1,
            d2: f2 * self.d1 * self.d1 + f1 * self.d2,
            d3: f3 * self.d1 * self.d1 * self.d1
                + 3.0 * f2 * self.d1 * self.d2
                + f1 * self.d3,
        }
    }

    /// exp(u); exponents below -700 flush the whole jet to zero, avoiding
    /// overflow in the reciprocal chain right at the support boundary.
    pub fn exp(self) -> Jet3 {
        if self.v < -700.0 {
            return Jet3::ZERO;
        }
        let e = math::exp(self.v);
        Jet3 {
            v: e,
            d1: e * self.d1,
            d2: e * (self.d1 * self.d1 + self.d2),
            d3: e * (self.d1 * self.d1 * self.d1 + 3.0 * self.d1 * self.d2 + self.d3),
        }
    }
}

/// Jet of the one-dimensional bump factor exp(-1/(1 - (r/h)^2)) at r, with
/// respect to r. Identically zero (all orders) outside |r| < h.
fn bump_factor_jet(r: f64, h: f64) -> Jet3 {
    if r.abs() >= h {
        return Jet3::ZERO;
    }
    let inv_h2 = 1.0 / (h * h);
    let u = Jet3 {
        v: 1.0 - r * r * inv_h2,
        d1: -2.0 * r * inv_h2,
        d2: -2.0 * inv_h2,
        d3: 0.0,
    };
    u.recip().neg().exp()
}

/// The partials of phi entering the weak forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartialOrder {
    Phi,
    Dt,
    Dx,
    Dxx,
    Dtx,
    Dtxx,
}

/// A smooth compactly supported test function riding along the wave:
/// even in x - gamma(t) around the moving center gamma(t) = gamma0 + s t.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BumpTestFunction {
    /// Spatial center at t = 0.
    pub gamma0: f64,
    /// Speed of the moving center.
    pub s: f64,
    /// Spatial support half-width: phi = 0 for |x - gamma(t)| >= d_x.
    pub d_x: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    pub amplitude: f64,
}

impl BumpTestFunction {
    pub fn new(gamma0: f64, s: f64, d_x: f64, t_lo: f64, t_hi: f64) -> Self {
        BumpTestFunction { gamma0, s, d_x, t_lo, t_hi, amplitude: 1.0 }
    }

    /// Support in the profile coordinate xi = x - s t.
    pub fn xi_support(&self) -> (f64, f64) {
        (self.gamma0 - self.d_x, self.gamma0 + self.d_x)
    }

    pub fn t_support(&self) -> (f64, f64) {
        (self.t_lo, self.t_hi)
    }

    /// Jet in xi of the spatial factor A exp(-1/(d_x^2 - (xi - gamma0)^2)).
    pub fn xi_jet(&self, xi: f64) -> Jet3 {
        bump_factor_jet(xi - self.gamma0, self.d_x).scale(self.amplitude)
    }

    /// (T, T') of the time factor at t.
    pub fn time_factor(&self, t: f64) -> (f64, f64) {
        let tm = 0.5 * (self.t_lo + self.t_hi);
        let r = 0.5 * (self.t_hi - self.t_lo);
        let j = bump_factor_jet(t - tm, r);
        (j.v, j.d1)
    }
}

/// Evaluate the requested partial of phi at (t, x); exact through the jets.
pub fn bump_eval(b: &BumpTestFunction, t: f64, x: f64, order: PartialOrder) -> f64 {
    let gamma = b.gamma0 + b.s * t;
    let xj = bump_factor_jet(x - gamma, b.d_x).scale(b.amplitude);
    let tm = 0.5 * (b.t_lo + b.t_hi);
    let r = 0.5 * (b.t_hi - b.t_lo);
    let tj = bump_factor_jet(t - tm, r);
    // phi(t, x) = X(x - gamma(t)) T(t) with gamma'(t) = s, so each time
    // derivative brings -s X' T + X T'.
    match order {
        PartialOrder::Phi => xj.v * tj.v,
        PartialOrder::Dx => xj.d1 * tj.v,
        PartialOrder::Dxx => xj.d2 * tj.v,
        PartialOrder::Dt => -b.s * xj.d1 * tj.v + xj.v * tj.d1,
        PartialOrder::Dtx => -b.s * xj.d2 * tj.v + xj.d1 * tj.d1,
        PartialOrder::Dtxx => -b.s * xj.d3 * tj.v + xj.d2 * tj.d1,
    }
}
