//! Wave-speed coefficient functions c(u) with certified global bounds.
//!
//! Every family guarantees 0 < alpha <= c(u) <= beta together with bounds
//! K1, K2 on |c'| and |c''|. For the closed-form families the bounds are
//! analytic; for tabulated data they are certified by a dense scan plus
//! refinement around grid extrema.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;

const CERT_SCAN_POINTS: usize = 10_000;
const BOUND_SLACK: f64 = 1e-12;

/// Errors constructing a coefficient spec.
#[derive(Clone, Debug, PartialEq)]
pub enum CoefficientError {
    /// Family parameter outside its admissible range.
    InvalidParameter(&'static str),
    /// Tabulated nodes not strictly increasing in u or fewer than two.
    BadNodes,
    /// Certified minimum of c is not strictly positive.
    NotBoundedAwayFromZero,
}

impl core::fmt::Display for CoefficientError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            CoefficientError::InvalidParameter(what) => {
                write!(f, "invalid coefficient parameter: {what}")
            }
            CoefficientError::BadNodes => f.write_str("spline nodes must be >= 2, strictly increasing in u"),
            CoefficientError::NotBoundedAwayFromZero => {
                f.write_str("coefficient function must satisfy min c > 0")
            }
        }
    }
}

/// The supported closed-form and tabulated coefficient families.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "family", rename_all = "snake_case"))]
pub enum CoefficientFamily {
    /// c(u) = sqrt(sin u + q), q > 1.
    SqrtSin { q: f64 },
    /// c(u) = A atan(u) + B/2 with A = (beta - alpha)/pi, B = alpha + beta.
    ArctanLinear { alpha: f64, beta: f64 },
    /// c^2(u) = lambda1 sin^2 u + lambda2 cos^2 u (liquid-crystal director).
    LcDirector { lambda1: f64, lambda2: f64 },
    /// Cubic-spline interpolation through (u, c) samples, clamped outside.
    TabulatedSpline { nodes: Vec<(f64, f64)> },
}

/// A coefficient function with certified bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientSpec {
    family: CoefficientFamily,
    /// Certified global minimum of c.
    pub alpha: f64,
    /// Certified global maximum of c.
    pub beta: f64,
    /// Bound on |c'|. Metadata only; no constructed quantity consumes it.
    pub k1_bound: f64,
    /// Bound on |c''|. Metadata only.
    pub k2_bound: f64,
    spline: Option<NaturalSpline>,
}

impl CoefficientSpec {
    pub fn sqrt_sin(q: f64) -> Result<Self, CoefficientError> {
        if !(q > 1.0) || !q.is_finite() {
            return Err(CoefficientError::InvalidParameter("sqrt_sin requires q > 1"));
        }
        let alpha = math::sqrt(q - 1.0);
        let beta = math::sqrt(q + 1.0);
        let spec = CoefficientSpec {
            family: CoefficientFamily::SqrtSin { q },
            alpha,
            beta,
            k1_bound: 1.0 / (2.0 * alpha),
            k2_bound: 1.0 / (2.0 * alpha) + 1.0 / (4.0 * alpha * alpha * alpha),
            spline: None,
        };
        spec.certify_on_grid(0.0, 2.0 * core::f64::consts::PI)?;
        Ok(spec)
    }

    pub fn arctan_linear(alpha: f64, beta: f64) -> Result<Self, CoefficientError> {
        if !(0.0 < alpha && alpha < beta) || !alpha.is_finite() || !beta.is_finite() {
            return Err(CoefficientError::InvalidParameter(
                "arctan_linear requires 0 < alpha < beta",
            ));
        }
        let a = (beta - alpha) / core::f64::consts::PI;
        let spec = CoefficientSpec {
            family: CoefficientFamily::ArctanLinear { alpha, beta },
            alpha,
            beta,
            // |c'| = A/(1+u^2) peaks at u=0; |c''| = 2A|u|/(1+u^2)^2 peaks at
            // u = 1/sqrt(3) with value 3 sqrt(3) A / 8.
            k1_bound: a,
            k2_bound: 3.0 * math::sqrt(3.0) * a / 8.0,
            spline: None,
        };
        spec.certify_on_grid(-50.0, 50.0)?;
        Ok(spec)
    }

    pub fn lc_director(lambda1: f64, lambda2: f64) -> Result<Self, CoefficientError> {
        if !(lambda1 > 0.0 && lambda2 > 0.0) || !lambda1.is_finite() || !lambda2.is_finite() {
            return Err(CoefficientError::InvalidParameter(
                "lc_director requires lambda1, lambda2 > 0",
            ));
        }
        let lo = lambda1.min(lambda2);
        let hi = lambda1.max(lambda2);
        let mut spec = CoefficientSpec {
            family: CoefficientFamily::LcDirector { lambda1, lambda2 },
            alpha: math::sqrt(lo),
            beta: math::sqrt(hi),
            k1_bound: 0.0,
            k2_bound: 0.0,
            spline: None,
        };
        let (k1, k2) = spec.scan_derivative_bounds(0.0, 2.0 * core::f64::consts::PI);
        spec.k1_bound = k1;
        spec.k2_bound = k2;
        spec.certify_on_grid(0.0, 2.0 * core::f64::consts::PI)?;
        Ok(spec)
    }

    /// Build from tabulated (u, c) samples. Bounds alpha/beta are certified
    /// by a dense scan with local refinement at grid extrema; extrapolation
    /// clamps to the end values.
    pub fn tabulated(nodes: Vec<(f64, f64)>) -> Result<Self, CoefficientError> {
        if nodes.len() < 2 || nodes.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(CoefficientError::BadNodes);
        }
        if nodes.iter().any(|&(u, c)| !u.is_finite() || !c.is_finite()) {
            return Err(CoefficientError::BadNodes);
        }
        let spline = NaturalSpline::new(&nodes);
        let (u_lo, u_hi) = (nodes[0].0, nodes[nodes.len() - 1].0);

        let mut spec = CoefficientSpec {
            family: CoefficientFamily::TabulatedSpline { nodes },
            alpha: 0.0,
            beta: 0.0,
            k1_bound: 0.0,
            k2_bound: 0.0,
            spline: Some(spline),
        };
        let (alpha, beta) = spec.certify_extrema(u_lo, u_hi);
        if !(alpha > 0.0) {
            return Err(CoefficientError::NotBoundedAwayFromZero);
        }
        spec.alpha = alpha;
        spec.beta = beta;
        let (k1, k2) = spec.scan_derivative_bounds(u_lo, u_hi);
        spec.k1_bound = k1;
        spec.k2_bound = k2;
        Ok(spec)
    }

    /// Rebuild a spec from a plain family description.
    pub fn from_family(family: CoefficientFamily) -> Result<Self, CoefficientError> {
        match family {
            CoefficientFamily::SqrtSin { q } => Self::sqrt_sin(q),
            CoefficientFamily::ArctanLinear { alpha, beta } => Self::arctan_linear(alpha, beta),
            CoefficientFamily::LcDirector { lambda1, lambda2 } => Self::lc_director(lambda1, lambda2),
            CoefficientFamily::TabulatedSpline { nodes } => Self::tabulated(nodes),
        }
    }

    pub fn family(&self) -> &CoefficientFamily {
        &self.family
    }

    /// c(u), c'(u), c''(u).
    pub fn eval(&self, u: f64) -> (f64, f64, f64) {
        match &self.family {
            CoefficientFamily::SqrtSin { q } => {
                let c = math::sqrt(math::sin(u) + q);
                let cp = math::cos(u) / (2.0 * c);
                let cpp = -math::sin(u) / (2.0 * c) - cp * cp / c;
                (c, cp, cpp)
            }
            CoefficientFamily::ArctanLinear { alpha, beta } => {
                let a = (beta - alpha) / core::f64::consts::PI;
                let b = alpha + beta;
                let c = a * math::atan(u) + b / 2.0;
                let cp = a / (1.0 + u * u);
                let cpp = -2.0 * a * u / ((1.0 + u * u) * (1.0 + u * u));
                (c, cp, cpp)
            }
            CoefficientFamily::LcDirector { lambda1, lambda2 } => {
                let s = math::sin(u);
                let csq = lambda2 + (lambda1 - lambda2) * s * s;
                let c = math::sqrt(csq);
                let s2 = math::sin(2.0 * u);
                let c2 = math::cos(2.0 * u);
                let cp = (lambda1 - lambda2) * s2 / (2.0 * c);
                let cpp = (lambda1 - lambda2) * c2 / c - cp * cp / c;
                (c, cp, cpp)
            }
            CoefficientFamily::TabulatedSpline { nodes } => {
                let spline = self.spline.as_ref().expect("spline built at construction");
                let (u_lo, u_hi) = (nodes[0].0, nodes[nodes.len() - 1].0);
                if u <= u_lo {
                    (nodes[0].1, 0.0, 0.0)
                } else if u >= u_hi {
                    (nodes[nodes.len() - 1].1, 0.0, 0.0)
                } else {
                    spline.eval(u)
                }
            }
        }
    }

    /// Just c(u).
    pub fn c(&self, u: f64) -> f64 {
        self.eval(u).0
    }

    /// c^2(u) - s^2, the quantity whose roots are gluing candidates.
    pub fn csq_minus(&self, u: f64, s: f64) -> f64 {
        let c = self.c(u);
        c * c - s * s
    }

    fn certify_on_grid(&self, lo: f64, hi: f64) -> Result<(), CoefficientError> {
        let n = CERT_SCAN_POINTS;
        for i in 0..n {
            let u = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            let c = self.c(u);
            if c < self.alpha - BOUND_SLACK || c > self.beta + BOUND_SLACK || !(c > 0.0) {
                return Err(CoefficientError::NotBoundedAwayFromZero);
            }
        }
        Ok(())
    }

    /// Dense scan of c over [lo, hi] with golden-section refinement at the
    /// grid-local extrema. Returns (min, max).
    fn certify_extrema(&self, lo: f64, hi: f64) -> (f64, f64) {
        let n = CERT_SCAN_POINTS;
        let h = (hi - lo) / (n - 1) as f64;
        let grid: Vec<f64> = (0..n).map(|i| self.c(lo + i as f64 * h)).collect();
        let mut cmin = f64::INFINITY;
        let mut cmax = f64::NEG_INFINITY;
        for (i, &v) in grid.iter().enumerate() {
            cmin = cmin.min(v);
            cmax = cmax.max(v);
            let interior = i > 0 && i + 1 < n;
            if interior && v <= grid[i - 1] && v <= grid[i + 1] {
                let r = self.golden(lo + (i - 1) as f64 * h, lo + (i + 1) as f64 * h, true);
                cmin = cmin.min(r);
            }
            if interior && v >= grid[i - 1] && v >= grid[i + 1] {
                let r = self.golden(lo + (i - 1) as f64 * h, lo + (i + 1) as f64 * h, false);
                cmax = cmax.max(r);
            }
        }
        (cmin, cmax)
    }

    fn golden(&self, mut a: f64, mut b: f64, minimize: bool) -> f64 {
        let inv_phi = 0.618_033_988_749_894_9;
        let sign = if minimize { 1.0 } else { -1.0 };
        let mut c = b - inv_phi * (b - a);
        let mut d = a + inv_phi * (b - a);
        let mut fc = sign * self.c(c);
        let mut fd = sign * self.c(d);
        for _ in 0..80 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = sign * self.c(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = sign * self.c(d);
            }
        }
        self.c(0.5 * (a + b))
    }

    fn scan_derivative_bounds(&self, lo: f64, hi: f64) -> (f64, f64) {
        let n = CERT_SCAN_POINTS;
        let mut k1 = 0.0f64;
        let mut k2 = 0.0f64;
        for i in 0..n {
            let u = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            let (_, cp, cpp) = self.eval(u);
            k1 = k1.max(cp.abs());
            k2 = k2.max(cpp.abs());
        }
        (k1, k2)
    }
}

/// Natural cubic spline through (x, y) samples, evaluated with first and
/// second derivatives.
#[derive(Clone, Debug, PartialEq)]
struct NaturalSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the nodes.
    m: Vec<f64>,
}

impl NaturalSpline {
    fn new(nodes: &[(f64, f64)]) -> Self {
        let n = nodes.len();
        let x: Vec<f64> = nodes.iter().map(|p| p.0).collect();
        let y: Vec<f64> = nodes.iter().map(|p| p.1).collect();
        let mut m = vec![0.0; n];
        if n > 2 {
            // Tridiagonal system for interior second derivatives.
            let mut sub = vec![0.0; n];
            let mut diag = vec![0.0; n];
            let mut sup = vec![0.0; n];
            let mut rhs = vec![0.0; n];
            for i in 1..n - 1 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                sub[i] = h0 / 6.0;
                diag[i] = (h0 + h1) / 3.0;
                sup[i] = h1 / 6.0;
                rhs[i] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
            }
            // Thomas algorithm on indices 1..n-1 with natural ends m=0.
            for i in 2..n - 1 {
                let w = sub[i] / diag[i - 1];
                diag[i] -= w * sup[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            m[n - 2] = rhs[n - 2] / diag[n - 2];
            for i in (1..n - 2).rev() {
                m[i] = (rhs[i] - sup[i] * m[i + 1]) / diag[i];
            }
        }
        NaturalSpline { x, y, m }
    }

    fn eval(&self, u: f64) -> (f64, f64, f64) {
        let i = match self.x.partition_point(|&xi| xi <= u) {
            0 => 0,
            p if p >= self.x.len() => self.x.len() - 2,
            p => p - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - u) / h;
        let b = (u - self.x[i]) / h;
        let v = a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0;
        let dv = (self.y[i + 1] - self.y[i]) / h
            + ((1.0 - 3.0 * a * a) * self.m[i] + (3.0 * b * b - 1.0) * self.m[i + 1]) * h / 6.0;
        let d2v = a * self.m[i] + b * self.m[i + 1];
        (v, dv, d2v)
    }
}
