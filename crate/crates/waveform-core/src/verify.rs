//! Numerical certification of the weak-solution property.
//!
//! For a traveling profile u(t, x) = w(x - s t) and a separable test
//! function phi = X(xi - gamma0) T(t) riding along the wave, the space-time
//! weak residual collapses to R = G0 A + G1 B with G0 = int T dt,
//! G1 = int T' dt and A, B one-dimensional xi-integrals over the support.
//! Monotone pieces are integrated in the w-parametrization, where every
//! square-root slope singularity is removed exactly by w = w* +- t^2;
//! decay tails and exponential peakon arcs use their closed forms in xi.
//! Residuals are reported normalized by the L1 size of the partials of phi
//! entering the weak form.

use alloc::string::String;
use alloc::vec::Vec;

use crate::bump::{bump_eval, BumpTestFunction, PartialOrder};
use crate::ch::{check_glue_ch, ChGlueVerdict, Wxi2};
use crate::coefficient::CoefficientSpec;
use crate::math;
use crate::nvw::{check_glue_nvw, GlueVerdict};
use crate::profile::{EquationTag, GlueKind, Profile};
use crate::quad;
use crate::rng::SplitMix64;
use crate::segment::{MonotoneSegment, Segment, SegmentEq, SegmentKind};
use crate::tol::ToleranceConfig;

/// Errors from the verifier.
#[derive(Clone, Debug, PartialEq)]
pub enum VerifyError {
    /// The bump support sticks out of the covered xi-interval.
    UnsupportedOverlap { support: (f64, f64), domain: (f64, f64) },
    /// Profile equation tag disagrees with the requested residual form.
    WrongEquation,
    /// Glue index out of range.
    NoSuchGlue { index: usize },
    /// Empty test-function window or vanishing normalization.
    DegenerateBump,
}

impl core::fmt::Display for VerifyError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            VerifyError::UnsupportedOverlap { support, domain } => write!(
                f,
                "bump support [{}, {}] not contained in profile domain [{}, {}]",
                support.0, support.1, domain.0, domain.1
            ),
            VerifyError::WrongEquation => {
                f.write_str("profile equation does not match the requested weak form")
            }
            VerifyError::NoSuchGlue { index } => write!(f, "no glue point with index {index}"),
            VerifyError::DegenerateBump => f.write_str("test function is degenerate"),
        }
    }
}

/// Equation selector with the data the weak form needs beyond the profile.
#[derive(Clone, Copy, Debug)]
pub enum EquationParams<'a> {
    Nvw { spec: &'a CoefficientSpec },
    Ch,
}

impl<'a> EquationParams<'a> {
    pub fn tag(&self) -> EquationTag {
        match self {
            EquationParams::Nvw { .. } => EquationTag::Nvw,
            EquationParams::Ch => EquationTag::Ch,
        }
    }
}

/// One evaluated weak residual.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ResidualSample {
    /// Spatial bump center gamma0.
    pub center: f64,
    /// Raw weak residual R.
    pub raw: f64,
    /// Normalization N(phi): L1 size of the partials entering the form.
    pub norm: f64,
    /// |raw| / norm.
    pub normalized: f64,
    /// Total adaptive quadrature cells spent.
    pub cells: usize,
    /// Accumulated quadrature error estimate.
    pub quad_error: f64,
}

/// A named quantity entering a junction condition.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct JumpBracket {
    pub name: &'static str,
    pub value: f64,
}

/// Junction diagnosis: the bracket values of the jump condition together
/// with the admissibility verdict of the gluing checker.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct JumpReport {
    pub glue_index: usize,
    pub xi: f64,
    pub w: f64,
    pub kind: GlueKind,
    pub brackets: Vec<JumpBracket>,
    pub admissible: bool,
    /// Rejection reason, when inadmissible.
    pub reason: Option<String>,
}

/// Result of a bump suite over one profile.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ResidualReport {
    pub samples: Vec<ResidualSample>,
    pub max_normalized: f64,
    pub median_normalized: f64,
    pub jumps: Vec<JumpReport>,
    pub total_cells: usize,
    pub total_quad_error: f64,
}

/// Adaptive quadrature with shared cell/error accounting. Non-finite
/// integrand values (only reachable in vanishing-measure neighborhoods of
/// removed singularities) are treated as zero.
struct Quadrature {
    cells: usize,
    err: f64,
    abs_tol: f64,
}

impl Quadrature {
    fn new(abs_tol: f64) -> Self {
        Quadrature { cells: 0, err: 0.0, abs_tol }
    }

    fn integrate(&mut self, f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        if !(b > a) {
            return 0.0;
        }
        let r = quad::adaptive(
            |x| {
                let v = f(x);
                if v.is_finite() {
                    v
                } else {
                    0.0
                }
            },
            a,
            b,
            self.abs_tol,
        );
        self.cells += r.cells;
        self.err += r.error;
        r.value
    }

    /// Integral of h over [wl, wh] through the substitution w = end -+ t^2
    /// applied from both endpoints, which removes square-root singularities
    /// of h at either end (and is a harmless reparametrization otherwise).
    fn sqrt_ends(&mut self, h: &dyn Fn(f64) -> f64, wl: f64, wh: f64) -> f64 {
        if !(wh > wl) {
            return 0.0;
        }
        let mid = 0.5 * (wl + wh);
        let lower = self.integrate(
            &|t: f64| 2.0 * t * h(wl + t * t),
            0.0,
            math::sqrt(mid - wl),
        );
        let upper = self.integrate(
            &|t: f64| 2.0 * t * h(wh - t * t),
            0.0,
            math::sqrt(wh - mid),
        );
        lower + upper
    }
}

/// The xi-direction weak integrands at a point with known (w, w_xi),
/// returning the (A, B) contributions per unit xi.
fn pointwise(
    params: &EquationParams,
    s: f64,
    w: f64,
    wxi: f64,
    fj: &crate::bump::Jet3,
) -> (f64, f64) {
    match params {
        EquationParams::Nvw { spec } => {
            let (c, cp, _) = spec.eval(w);
            (
                (c * c - s * s) * wxi * fj.d1 + c * cp * wxi * wxi * fj.v,
                s * wxi * fj.v,
            )
        }
        EquationParams::Ch => (
            (s * w - 1.5 * w * w) * fj.d1 - s * w * fj.d3 - w * wxi * fj.d2
                - 0.5 * wxi * wxi * fj.d1,
            -w * (fj.v - fj.d2),
        ),
    }
}

/// A and B over the bump support, by direct xi-integration on closed-form
/// regions and w-parametrized integration on tabulated arcs.
fn weak_integrals(
    p: &Profile,
    params: &EquationParams,
    bmp: &BumpTestFunction,
    q: &mut Quadrature,
) -> Result<(f64, f64), VerifyError> {
    let (sup_lo, sup_hi) = bmp.xi_support();
    let (dom_lo, dom_hi) = p.xi_range();
    if sup_lo < dom_lo || sup_hi > dom_hi {
        return Err(VerifyError::UnsupportedOverlap {
            support: (sup_lo, sup_hi),
            domain: (dom_lo, dom_hi),
        });
    }

    let s = p.s;
    let mut acc_a = 0.0_f64;
    let mut acc_b = 0.0_f64;

    for seg in &p.segments {
        let (seg_lo, seg_hi) = seg.xi_range();
        let lo = seg_lo.max(sup_lo);
        let hi = seg_hi.min(sup_hi);
        if !(hi > lo) {
            continue;
        }
        match &seg.kind {
            SegmentKind::Constant { wbar, .. } => {
                if let EquationParams::Ch = params {
                    // With w_xi = 0 the A-integrand is a total derivative:
                    // (s w - 1.5 w^2) f' - s w f''' integrates exactly.
                    let w = *wbar;
                    let f_lo = bmp.xi_jet(lo);
                    let f_hi = bmp.xi_jet(hi);
                    acc_a += (s * w - 1.5 * w * w) * (f_hi.v - f_lo.v)
                        - s * w * (f_hi.d2 - f_lo.d2);
                    let int_f = q.integrate(&|xi: f64| bmp.xi_jet(xi).v, lo, hi);
                    acc_b += -w * (int_f - (f_hi.d1 - f_lo.d1));
                }
                // NVW constants contribute nothing: every term carries w_xi.
            }
            SegmentKind::Monotone(m) => {
                let (a, b) = mono_integrals(params, s, seg, m, bmp, lo, hi, q);
                acc_a += a;
                acc_b += b;
            }
        }
    }
    Ok((acc_a, acc_b))
}

/// Weak contributions of one monotone segment over [lo, hi] in xi.
#[allow(clippy::too_many_arguments)]
fn mono_integrals(
    params: &EquationParams,
    s: f64,
    seg: &Segment,
    m: &MonotoneSegment,
    bmp: &BumpTestFunction,
    lo: f64,
    hi: f64,
    q: &mut Quadrature,
) -> (f64, f64) {
    let xi_direct = |q: &mut Quadrature, a: f64, b: f64| -> (f64, f64) {
        let av = q.integrate(
            &|xi: f64| {
                let (w, slope) = m.eval(xi);
                let wxi = slope.finite().unwrap_or(f64::NAN);
                pointwise(params, s, w, wxi, &bmp.xi_jet(xi)).0
            },
            a,
            b,
        );
        let bv = q.integrate(
            &|xi: f64| {
                let (w, slope) = m.eval(xi);
                let wxi = slope.finite().unwrap_or(f64::NAN);
                pointwise(params, s, w, wxi, &bmp.xi_jet(xi)).1
            },
            a,
            b,
        );
        (av, bv)
    };

    // Exponential arcs evaluate exactly in xi; no singular kernel appears.
    if m.exp_form.is_some() {
        return xi_direct(q, lo, hi);
    }

    // xi-interval covered by the table; beyond it only decay tails remain.
    let (y_at_wlo, y_at_whi) = m.table.y_ends();
    let (tab_lo, tab_hi) = if y_at_wlo < y_at_whi {
        (y_at_wlo, y_at_whi)
    } else {
        (y_at_whi, y_at_wlo)
    };

    let mut acc_a = 0.0;
    let mut acc_b = 0.0;
    if lo < tab_lo {
        let (a, b) = xi_direct(q, lo, tab_lo.min(hi));
        acc_a += a;
        acc_b += b;
    }
    if hi > tab_hi {
        let (a, b) = xi_direct(q, tab_hi.max(lo), hi);
        acc_a += a;
        acc_b += b;
    }

    let core_lo = lo.max(tab_lo);
    let core_hi = hi.min(tab_hi);
    if !(core_hi > core_lo) {
        return (acc_a, acc_b);
    }
    let (wt_lo, wt_hi) = m.table.x_range();
    let w_at = |xi: f64| -> f64 {
        if xi <= tab_lo {
            if y_at_wlo < y_at_whi { wt_lo } else { wt_hi }
        } else if xi >= tab_hi {
            if y_at_wlo < y_at_whi { wt_hi } else { wt_lo }
        } else {
            m.table.invert(xi).clamp(wt_lo, wt_hi)
        }
    };
    let (w1, w2) = (w_at(core_lo), w_at(core_hi));
    let (wl, wh) = if w1 < w2 { (w1, w2) } else { (w2, w1) };
    if !(wh > wl) {
        return (acc_a, acc_b);
    }

    let sigma = m.orientation.sign();
    let xi_of = |w: f64| m.table.eval(w);

    match params {
        EquationParams::Nvw { spec } => {
            let k = match seg.equation {
                SegmentEq::Nvw { k } => k,
                SegmentEq::Ch { .. } => f64::NAN,
            };
            let abs_wxi = |w: f64| {
                math::sqrt(k.abs() / (s * s - spec.c(w) * spec.c(w)).abs())
            };
            // int (c^2 - s^2) w_xi f' dxi = sigma int (c^2 - s^2) f' dw.
            acc_a += sigma
                * q.integrate(
                    &|w: f64| {
                        let c = spec.c(w);
                        (c * c - s * s) * bmp.xi_jet(xi_of(w)).d1
                    },
                    wl,
                    wh,
                );
            // int c c' w_xi^2 f dxi = int c c' |w_xi| f dw.
            acc_a += q.sqrt_ends(
                &|w: f64| {
                    let (c, cp, _) = spec.eval(w);
                    c * cp * abs_wxi(w) * bmp.xi_jet(xi_of(w)).v
                },
                wl,
                wh,
            );
            // int s w_xi f dxi = sigma s int f dw.
            acc_b += sigma * s * q.integrate(&|w: f64| bmp.xi_jet(xi_of(w)).v, wl, wh);
        }
        EquationParams::Ch => {
            let (ca, cb) = match seg.equation {
                SegmentEq::Ch { a, b } => (a, b),
                SegmentEq::Nvw { .. } => (f64::NAN, f64::NAN),
            };
            let wxi2 = Wxi2::for_triple(s, ca, cb);
            // The arc is smooth as a function of xi away from a crest cusp
            // (w -> s with unbounded slope): turning points flatten out and
            // tails decay, so the bulk integrates directly in xi. Only a
            // window at a cusp end uses the w-substitution; there xi'(w)
            // behaves like 1/sqrt(s - w), which sqrt_ends regularizes.
            // (Near a double zero of w_xi^2, xi'(w) ~ 1/(w - z) instead,
            // which the sqrt substitution does not cure -- hence the
            // xi-direct bulk.)
            let near = |x: f64, y: f64| (x - y).abs() <= 1e-9 * (1.0 + y.abs());
            let cusp_hi = near(wt_hi, s) && near(wh, wt_hi);
            let cusp_lo = near(wt_lo, s) && near(wl, wt_lo);

            let mut xi_a = core_lo;
            let mut xi_b = core_hi;
            let mut cusp_win: Option<(f64, f64)> = None;
            if cusp_hi || cusp_lo {
                let ws = 0.5 * (wl + wh);
                let xw = xi_of(ws);
                if cusp_hi {
                    cusp_win = Some((ws, wh));
                    // Increasing arcs reach the crest at the high-xi end.
                    if sigma > 0.0 {
                        xi_b = xi_b.min(xw);
                    } else {
                        xi_a = xi_a.max(xw);
                    }
                } else {
                    cusp_win = Some((wl, ws));
                    if sigma > 0.0 {
                        xi_a = xi_a.max(xw);
                    } else {
                        xi_b = xi_b.min(xw);
                    }
                }
            }
            if xi_b > xi_a {
                let (a, b) = xi_direct(q, xi_a, xi_b);
                acc_a += a;
                acc_b += b;
            }
            if let Some((cl, ch)) = cusp_win {
                // dxi-measure terms carry |xi'(w)|.
                acc_a += q.sqrt_ends(
                    &|w: f64| {
                        let fj = bmp.xi_jet(xi_of(w));
                        ((s * w - 1.5 * w * w) * fj.d1 - s * w * fj.d3)
                            * wxi2.xi_prime(w)
                    },
                    cl,
                    ch,
                );
                // int -w w_xi f'' dxi = -sigma int w f'' dw.
                acc_a +=
                    -sigma * q.integrate(&|w: f64| w * bmp.xi_jet(xi_of(w)).d2, cl, ch);
                // int -(1/2) w_xi^2 f' dxi = -(1/2) int |w_xi| f' dw.
                acc_a += -0.5
                    * q.sqrt_ends(
                        &|w: f64| math::sqrt(wxi2.eval(w)) * bmp.xi_jet(xi_of(w)).d1,
                        cl,
                        ch,
                    );
                acc_b += -q.sqrt_ends(
                    &|w: f64| {
                        let fj = bmp.xi_jet(xi_of(w));
                        w * (fj.v - fj.d2) * wxi2.xi_prime(w)
                    },
                    cl,
                    ch,
                );
            }
        }
    }
    (acc_a, acc_b)
}

/// L1 size of the phi-partials entering the weak form, on a midpoint tensor
/// grid over the moving support.
pub fn bump_norm(equation: EquationTag, b: &BumpTestFunction) -> f64 {
    const N: usize = 96;
    let orders: &[PartialOrder] = match equation {
        EquationTag::Nvw => &[PartialOrder::Phi, PartialOrder::Dt, PartialOrder::Dx],
        EquationTag::Ch => &[
            PartialOrder::Dt,
            PartialOrder::Dtxx,
            PartialOrder::Dx,
            PartialOrder::Dxx,
        ],
    };
    let (t_lo, t_hi) = b.t_support();
    let dt = (t_hi - t_lo) / N as f64;
    let du = 2.0 * b.d_x / N as f64;
    let mut total = 0.0;
    for i in 0..N {
        let t = t_lo + (i as f64 + 0.5) * dt;
        let center = b.gamma0 + b.s * t;
        for j in 0..N {
            let x = center - b.d_x + (j as f64 + 0.5) * du;
            for &o in orders {
                total += bump_eval(b, t, x, o).abs();
            }
        }
    }
    total * dt * du
}

fn residual_with(
    p: &Profile,
    params: &EquationParams,
    bmp: &BumpTestFunction,
    tol: &ToleranceConfig,
) -> Result<ResidualSample, VerifyError> {
    if !(bmp.t_hi > bmp.t_lo) || !(bmp.d_x > 0.0) {
        return Err(VerifyError::DegenerateBump);
    }
    let mut q = Quadrature::new(tol.quad_abs_tol);
    let (a, b) = weak_integrals(p, params, bmp, &mut q)?;
    let (t_lo, t_hi) = bmp.t_support();
    let g0 = q.integrate(&|t: f64| bmp.time_factor(t).0, t_lo, t_hi);
    let g1 = q.integrate(&|t: f64| bmp.time_factor(t).1, t_lo, t_hi);
    let raw = g0 * a + g1 * b;
    let norm = bump_norm(p.equation, bmp);
    if !(norm > 0.0) {
        return Err(VerifyError::DegenerateBump);
    }
    Ok(ResidualSample {
        center: bmp.gamma0,
        raw,
        norm,
        normalized: raw.abs() / norm,
        cells: q.cells,
        quad_error: q.err,
    })
}

/// Weak residual of an NVW profile against one bump.
pub fn residual_nvw(
    p: &Profile,
    spec: &CoefficientSpec,
    bmp: &BumpTestFunction,
    tol: &ToleranceConfig,
) -> Result<ResidualSample, VerifyError> {
    if p.equation != EquationTag::Nvw {
        return Err(VerifyError::WrongEquation);
    }
    residual_with(p, &EquationParams::Nvw { spec }, bmp, tol)
}

/// Weak residual of a CH profile against one bump.
pub fn residual_ch(
    p: &Profile,
    bmp: &BumpTestFunction,
    tol: &ToleranceConfig,
) -> Result<ResidualSample, VerifyError> {
    if p.equation != EquationTag::Ch {
        return Err(VerifyError::WrongEquation);
    }
    residual_with(p, &EquationParams::Ch, bmp, tol)
}

/// Evaluate the jump-condition brackets and the admissibility verdict at
/// one junction of an assembled (possibly deliberately broken) profile.
pub fn jump_report(
    p: &Profile,
    glue_index: usize,
    params: &EquationParams,
    tol: &ToleranceConfig,
) -> Result<JumpReport, VerifyError> {
    if p.equation != params.tag() {
        return Err(VerifyError::WrongEquation);
    }
    if glue_index >= p.glue_points.len() || glue_index + 1 >= p.segments.len() {
        return Err(VerifyError::NoSuchGlue { index: glue_index });
    }
    let gp = p.glue_points[glue_index];
    let left = &p.segments[glue_index];
    let right = &p.segments[glue_index + 1];
    let s = p.s;

    let mut brackets = Vec::new();
    match params {
        EquationParams::Nvw { spec } => {
            let (c, cp, _) = spec.eval(gp.w);
            brackets.push(JumpBracket { name: "csq_minus_s2", value: c * c - s * s });
            brackets.push(JumpBracket { name: "cprime", value: cp });
            let k_of = |seg: &Segment| match seg.equation {
                SegmentEq::Nvw { k } => {
                    if seg.is_constant() {
                        0.0
                    } else {
                        k
                    }
                }
                SegmentEq::Ch { .. } => f64::NAN,
            };
            let (k1, k2) = (k_of(left), k_of(right));
            brackets.push(JumpBracket { name: "k_left", value: k1 });
            brackets.push(JumpBracket { name: "k_right", value: k2 });
            brackets.push(JumpBracket { name: "abs_k_gap", value: k1.abs() - k2.abs() });
        }
        EquationParams::Ch => {
            let ab_of = |seg: &Segment| match seg.equation {
                SegmentEq::Ch { a, b } => (a, b),
                SegmentEq::Nvw { .. } => (f64::NAN, f64::NAN),
            };
            let ((a1, b1), (a2, b2)) = (ab_of(left), ab_of(right));
            brackets.push(JumpBracket { name: "a_gap", value: a1 - a2 });
            brackets.push(JumpBracket { name: "g_at_s_left", value: 2.0 * a1 * s + b1 });
            brackets.push(JumpBracket { name: "g_at_s_right", value: 2.0 * a2 * s + b2 });
            brackets.push(JumpBracket { name: "crest_offset", value: gp.w - s });
            if let (Some(pl), Some(pr)) =
                (gp.left_slope.finite(), gp.right_slope.finite())
            {
                brackets.push(JumpBracket { name: "slope_diff", value: pl - pr });
                brackets.push(JumpBracket { name: "slope_sum", value: pl + pr });
            }
        }
    }

    let (admissible, reason) = match params {
        EquationParams::Nvw { spec } => {
            match check_glue_nvw(left, right, gp.w, spec, s, tol) {
                Ok(GlueVerdict::Admissible(_)) => (true, None),
                Ok(GlueVerdict::Inadmissible(r)) => {
                    (false, Some(alloc::format!("{r:?}")))
                }
                Err(e) => (false, Some(alloc::format!("{e}"))),
            }
        }
        EquationParams::Ch => match check_glue_ch(left, right, s, tol) {
            Ok(ChGlueVerdict::Admissible(_)) => (true, None),
            Ok(ChGlueVerdict::Inadmissible(r)) => (false, Some(alloc::format!("{r:?}"))),
            Err(e) => (false, Some(alloc::format!("{e}"))),
        },
    };

    Ok(JumpReport {
        glue_index,
        xi: gp.xi,
        w: gp.w,
        kind: gp.kind,
        brackets,
        admissible,
        reason,
    })
}

/// Max pointwise residual of the classical traveling-wave ODE on an
/// interior w-grid of one segment, using the once-integrated form for CH.
/// Each pointwise value is taken relative to 1 + w_xi^2, since the terms of
/// the ODE grow like the squared slope toward singular endpoints.
pub fn classical_residual(
    seg: &Segment,
    params: &EquationParams,
    s: f64,
    n_points: usize,
) -> f64 {
    match (&seg.kind, seg.equation, params) {
        (SegmentKind::Constant { .. }, SegmentEq::Nvw { .. }, EquationParams::Nvw { .. }) => {
            0.0
        }
        (SegmentKind::Constant { wbar, .. }, SegmentEq::Ch { a, .. }, EquationParams::Ch) => {
            (a - (1.5 * wbar * wbar - s * wbar)).abs()
        }
        (SegmentKind::Monotone(m), SegmentEq::Nvw { .. }, EquationParams::Nvw { spec }) => {
            let mut worst = 0.0_f64;
            for w in interior_grid(m, n_points) {
                let (_, d1, d2) = m.table.eval_all(w);
                if d1 == 0.0 {
                    continue;
                }
                let wxi = 1.0 / d1;
                let wxixi = -d2 / (d1 * d1 * d1);
                let (c, cp, _) = spec.eval(w);
                let resid = (s * s - c * c) * wxixi - c * cp * wxi * wxi;
                worst = worst.max(resid.abs() / (1.0 + wxi * wxi));
            }
            worst
        }
        (SegmentKind::Monotone(m), SegmentEq::Ch { a, .. }, EquationParams::Ch) => {
            let mut worst = 0.0_f64;
            for w in interior_grid(m, n_points) {
                let (w_use, wxi, wxixi) = if let Some(form) = &m.exp_form {
                    let xi = m.table.eval(w);
                    let (we, slope) = form.eval(xi);
                    // w_xixi = w - offset exactly on an exponential arc.
                    (we, slope, we - form.offset)
                } else {
                    let (_, d1, d2) = m.table.eval_all(w);
                    if d1 == 0.0 {
                        continue;
                    }
                    (w, 1.0 / d1, -d2 / (d1 * d1 * d1))
                };
                let w = w_use;
                let resid = s * wxixi - w * wxixi - 0.5 * wxi * wxi + 1.5 * w * w
                    - s * w
                    - a;
                worst = worst.max(resid.abs() / (1.0 + wxi * wxi));
            }
            worst
        }
        _ => f64::NAN,
    }
}

/// Interior w-grid keeping a small margin from the (possibly singular)
/// table edges.
fn interior_grid(m: &MonotoneSegment, n_points: usize) -> Vec<f64> {
    let (w_lo, w_hi) = m.w_range();
    let margin = 1e-3 * (w_hi - w_lo);
    let (a, b) = (w_lo + margin, w_hi - margin);
    let n = n_points.max(2);
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Run a bump suite over the profile: half the bumps centered on glue
/// points, half placed by the seeded generator, plus a jump report for
/// every junction.
pub fn residual_suite(
    p: &Profile,
    params: &EquationParams,
    n_bumps: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<ResidualReport, VerifyError> {
    if p.equation != params.tag() {
        return Err(VerifyError::WrongEquation);
    }
    let (dom_lo, dom_hi) = p.xi_range();
    let glue_xis: Vec<f64> = p.glue_points.iter().map(|g| g.xi).collect();
    // Finite core window around the structure of the profile.
    let pivot_lo = glue_xis.iter().cloned().fold(f64::INFINITY, f64::min);
    let pivot_hi = glue_xis.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let anchor_lo = if dom_lo.is_finite() {
        dom_lo
    } else if pivot_lo.is_finite() {
        pivot_lo - 4.0
    } else {
        -4.0
    };
    let anchor_hi = if dom_hi.is_finite() {
        dom_hi
    } else if pivot_hi.is_finite() {
        pivot_hi + 4.0
    } else {
        4.0
    };
    if !(anchor_hi > anchor_lo) {
        return Err(VerifyError::DegenerateBump);
    }
    let d_x = (0.25 * (anchor_hi - anchor_lo)).min(1.0);
    let (c_lo, c_hi) = (anchor_lo + d_x, anchor_hi - d_x);

    let mut rng = SplitMix64::new(seed);
    let mut samples = Vec::with_capacity(n_bumps);
    for i in 0..n_bumps {
        let center = if i < n_bumps / 2 && !glue_xis.is_empty() {
            glue_xis[i % glue_xis.len()].clamp(c_lo, c_hi)
        } else {
            rng.uniform(c_lo, c_hi)
        };
        let bmp = BumpTestFunction::new(center, p.s, d_x, 0.0, 1.0);
        samples.push(residual_with(p, params, &bmp, tol)?);
    }

    let mut jumps = Vec::with_capacity(glue_xis.len());
    for i in 0..p.glue_points.len().min(p.segments.len().saturating_sub(1)) {
        jumps.push(jump_report(p, i, params, tol)?);
    }

    let mut normalized: Vec<f64> = samples.iter().map(|r| r.normalized).collect();
    normalized.sort_by(|x, y| x.partial_cmp(y).unwrap_or(core::cmp::Ordering::Equal));
    let max_normalized = normalized.last().copied().unwrap_or(0.0);
    let median_normalized = if normalized.is_empty() {
        0.0
    } else if normalized.len() % 2 == 1 {
        normalized[normalized.len() / 2]
    } else {
        0.5 * (normalized[normalized.len() / 2 - 1] + normalized[normalized.len() / 2])
    };
    Ok(ResidualReport {
        total_cells: samples.iter().map(|r| r.cells).sum(),
        total_quad_error: samples.iter().map(|r| r.quad_error).sum(),
        samples,
        max_normalized,
        median_normalized,
        jumps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ch::{build_ch_profile, ch_arc, ch_constant, classify_ch, g_eval};
    use crate::nvw::{assemble_nvw, segment_between, NvwPiece, NvwPlan};
    use crate::segment::Orientation;
    use alloc::vec;

    const FULL_ARC: f64 = 2.396_280_469_471_184_4;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn sqrt_sin4() -> CoefficientSpec {
        CoefficientSpec::sqrt_sin(4.0).unwrap()
    }

    fn intro_profile() -> Profile {
        let pi = core::f64::consts::PI;
        let plan = NvwPlan {
            pieces: vec![
                NvwPiece::Const { wbar: pi, len: None },
                NvwPiece::Mono {
                    k: 1.0,
                    orientation: Orientation::Decreasing,
                    w_from: pi,
                    w_to: 0.0,
                },
                NvwPiece::Const { wbar: 0.0, len: None },
            ],
        };
        assemble_nvw(&sqrt_sin4(), 2.0, &plan, &tol()).unwrap()
    }

    #[test]
    fn constant_ch_profile_has_vanishing_residual() {
        let s = 1.3;
        let p = Profile::assemble_unchecked(
            EquationTag::Ch,
            s,
            vec![ch_constant(s, 0.7, f64::NEG_INFINITY, f64::INFINITY)],
            vec![],
            None,
        );
        let bmp = BumpTestFunction::new(0.0, s, 0.8, 0.0, 1.0);
        let r = residual_ch(&p, &bmp, &tol()).unwrap();
        assert!(r.normalized <= 1e-12, "normalized {:e}", r.normalized);
    }

    #[test]
    fn peakon_residual_is_tiny() {
        let tax = classify_ch(1.0, 0.0, 0.0);
        let p = build_ch_profile(1.0, 0.0, 0.0, &tax.kind, (-8.0, 8.0), &tol()).unwrap();
        let bmp = BumpTestFunction::new(0.0, 1.0, 1.0, 0.0, 1.0);
        let r = residual_ch(&p, &bmp, &tol()).unwrap();
        assert!(r.normalized <= 1e-6, "normalized {:e}", r.normalized);
        // Off-center bump over the smooth tail region.
        let bmp = BumpTestFunction::new(2.5, 1.0, 1.0, 0.0, 1.0);
        let r = residual_ch(&p, &bmp, &tol()).unwrap();
        assert!(r.normalized <= 1e-6, "normalized {:e}", r.normalized);
    }

    #[test]
    fn nvw_intro_residual_is_tiny() {
        let p = intro_profile();
        let spec = sqrt_sin4();
        for center in [0.0, FULL_ARC, 0.5 * FULL_ARC, -2.0] {
            let bmp = BumpTestFunction::new(center, 2.0, 1.0, 0.0, 1.0);
            let r = residual_nvw(&p, &spec, &bmp, &tol()).unwrap();
            assert!(
                r.normalized <= 1e-6,
                "center {center}: normalized {:e}",
                r.normalized
            );
        }
    }

    #[test]
    fn residual_is_linear_in_the_test_function() {
        let p = intro_profile();
        let spec = sqrt_sin4();
        let mut bmp = BumpTestFunction::new(0.3, 2.0, 0.9, 0.0, 1.0);
        let r1 = residual_nvw(&p, &spec, &bmp, &tol()).unwrap();
        bmp.amplitude = 2.0;
        let r2 = residual_nvw(&p, &spec, &bmp, &tol()).unwrap();
        assert!(
            (r2.raw - 2.0 * r1.raw).abs() <= 1e-9 * (1.0 + r1.raw.abs()),
            "{} vs {}",
            r2.raw,
            2.0 * r1.raw
        );
        // The normalization scales the same way, so normalized is invariant.
        assert!((r2.normalized - r1.normalized).abs() <= 1e-9 + 1e-6 * r1.normalized);
    }

    #[test]
    fn nvw_k_mismatch_is_detected() {
        // Two decreasing arcs meeting at w = pi/2 (not a root of c^2 = s^2)
        // with |k| jumping from 1 to 2: not a weak solution.
        let spec = sqrt_sin4();
        let pi = core::f64::consts::PI;
        let t = tol();
        let mut left =
            segment_between(&spec, 2.0, 1.0, pi, pi / 2.0, Orientation::Decreasing, &t).unwrap();
        let (_, l_hi) = left.xi_range();
        left.shift_xi(-l_hi);
        let right =
            segment_between(&spec, 2.0, 2.0, pi / 2.0, 0.0, Orientation::Decreasing, &t).unwrap();
        let p = Profile::assemble_unchecked(
            EquationTag::Nvw,
            2.0,
            vec![left, right],
            vec![],
            None,
        );
        let bmp = BumpTestFunction::new(0.0, 2.0, 0.7, 0.0, 1.0);
        let r = residual_nvw(&p, &spec, &bmp, &t).unwrap();
        assert!(r.normalized >= 1e-2, "normalized {:e}", r.normalized);
    }

    #[test]
    fn ch_a_mismatch_is_detected() {
        // Cusp junction at w = s with a jumping 2.5 -> 2.6. The left side is
        // the decaying half of the (2.5, 3) cuspon; the right side continues
        // as the true periodic cuspon of (2.6, 3), so the profile extends far
        // enough to support a wide test function. The jump residual scales
        // with phi on the gluing line, while N(phi) is dominated by the
        // first-order partials only once the bump is wide and long-lived;
        // narrow bumps would bury the signal under the phi_txx norm.
        let t = tol();
        let s = 1.0;
        let (a2, b2) = (2.6, 3.0);
        let mut left = ch_arc(s, 2.5, 3.0, -1.0, s, Orientation::Increasing, &t).unwrap();
        let (_, l_hi) = left.xi_range();
        left.shift_xi(-l_hi);
        // Turning root of the (2.6, 3) cubic just below the crest.
        let (mut lo, mut hi) = (-0.9, -0.7);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g_eval(s, a2, b2, mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let eta = 0.5 * (lo + hi);
        let mut segs = alloc::vec![left];
        let mut cursor = 0.0;
        let mut down = true;
        while cursor < 14.0 {
            let (from, to) = if down { (s, eta) } else { (eta, s) };
            let orient = if down { Orientation::Decreasing } else { Orientation::Increasing };
            let mut arc = ch_arc(s, a2, b2, from, to, orient, &t).unwrap();
            let (a_lo, a_hi) = arc.xi_range();
            arc.shift_xi(cursor - a_lo);
            cursor += a_hi - a_lo;
            segs.push(arc);
            down = !down;
        }
        let p = Profile::assemble_unchecked(EquationTag::Ch, s, segs, vec![], None);
        let bmp = BumpTestFunction::new(0.0, s, 12.0, 0.0, 120.0);
        let r = residual_ch(&p, &bmp, &t).unwrap();
        assert!(r.normalized >= 1e-2, "normalized {:e}", r.normalized);
    }

    #[test]
    fn jump_reports_flag_admissibility() {
        let p = intro_profile();
        let spec = sqrt_sin4();
        let params = EquationParams::Nvw { spec: &spec };
        let rep = jump_report(&p, 0, &params, &tol()).unwrap();
        assert!(rep.admissible);
        assert!(rep.brackets.iter().any(|b| b.name == "csq_minus_s2" && b.value.abs() < 1e-8));
        assert!(matches!(
            jump_report(&p, 5, &params, &tol()),
            Err(VerifyError::NoSuchGlue { index: 5 })
        ));
    }

    #[test]
    fn classical_residual_small_on_true_arcs() {
        let spec = sqrt_sin4();
        let pi = core::f64::consts::PI;
        let t = tol();
        let seg =
            segment_between(&spec, 2.0, 1.0, pi, 0.0, Orientation::Decreasing, &t).unwrap();
        let params = EquationParams::Nvw { spec: &spec };
        let r = classical_residual(&seg, &params, 2.0, 500);
        assert!(r <= 1e-4, "nvw classical residual {r:e}");
        let seg = ch_arc(1.0, 2.5, 3.0, -1.0, 1.0, Orientation::Increasing, &t).unwrap();
        let r = classical_residual(&seg, &EquationParams::Ch, 1.0, 500);
        assert!(r <= 5e-4, "ch classical residual {r:e}");
    }

    #[test]
    fn suite_over_intro_profile() {
        let p = intro_profile();
        let spec = sqrt_sin4();
        let params = EquationParams::Nvw { spec: &spec };
        let rep = residual_suite(&p, &params, 6, 0x5eed, &tol()).unwrap();
        assert_eq!(rep.samples.len(), 6);
        assert_eq!(rep.jumps.len(), 2);
        assert!(rep.jumps.iter().all(|j| j.admissible));
        assert!(rep.max_normalized <= 1e-6, "max {:e}", rep.max_normalized);
        assert!(rep.median_normalized <= rep.max_normalized);
    }
}
