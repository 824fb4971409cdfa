//! Traveling waves of the Camassa-Holm equation.
//!
//! A classical profile piece satisfies w_xi^2 (s - w) = g(w) with
//! g(w) = -w^3 + s w^2 + 2 a w + b, so the wave structure is governed by
//! the zeros of the cubic g relative to the speed s: a double zero gives an
//! exponential decay level, a simple zero a smooth turning point, and the
//! line w = s a cusp (g(s) != 0) or a peak (g(s) = 0).

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use crate::cubic;
use crate::math;
use crate::pchip::{MonotoneTable, TableError};
use crate::profile::{EquationTag, GlueKind, GluePoint, Profile, ProfileError};
use crate::quad;
use crate::segment::{
    End, EndpointFlag, ExpForm, ExtendedSlope, MonotoneSegment, Orientation, Segment, SegmentEq,
    SegmentKind,
};
use crate::tol::ToleranceConfig;

/// Zero structure of g(w) = -w^3 + s w^2 + 2 a w + b.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CubicAnalysis {
    pub s: f64,
    pub a: f64,
    pub b: f64,
    /// True iff s^2 + 6a > 0, i.e. g has critical points.
    pub crit_exists: bool,
    /// Location of the local minimum (s - sqrt(s^2+6a))/3, when it exists.
    pub w_crit_min: f64,
    /// Location of the local maximum (s + sqrt(s^2+6a))/3, when it exists.
    pub w_crit_max: f64,
    /// Real zeros with multiplicities, ascending.
    pub zeros: Vec<(f64, u8)>,
}

/// A named algebraic identity checked during classification.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Certificate {
    pub name: &'static str,
    pub value: f64,
}

/// Wave type of a CH parameter triple.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum ChKind {
    NoBoundedWave,
    /// Double zero at the decay level w_min, simple zero eta, w_min < s < eta.
    CusponWithDecay { w_min: f64, eta: f64 },
    /// Cuspon limit s = eta: bounded crest slope, exponential rate 1.
    PeakonWithDecay { w_min: f64 },
    /// Three simple zeros with eta2 < s < eta3: oscillation between the
    /// smooth minimum eta2 and the cusp crest at s.
    PeriodicCuspon { eta1: f64, eta2: f64, eta3: f64 },
    /// Periodic limit s = eta3: finite crest slopes.
    PeriodicPeakon { eta1: f64, eta2: f64 },
    /// The triple carries the stumpon constants 2a = s^2, b = -s^3; the
    /// inner kind is what the triple classifies as on its own.
    StumponCompatible { inner: Box<ChKind> },
    /// Double zero at the local maximum with eta <= s < w_max: the
    /// reflection (through w -> -w, s -> -s) of the decaying cuspon/peakon.
    MirrorCase { w_max: f64, eta: f64 },
    /// Bracket configurations outside the analyzed cases.
    UnclassifiedBoundedDerivative,
}

impl ChKind {
    pub fn is_constructible(&self) -> bool {
        match self {
            ChKind::NoBoundedWave | ChKind::UnclassifiedBoundedDerivative => false,
            ChKind::StumponCompatible { .. } => true,
            _ => true,
        }
    }
}

/// Classification result.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ChTaxonomy {
    pub analysis: CubicAnalysis,
    pub kind: ChKind,
    pub certificates: Vec<Certificate>,
}

/// Why a CH junction is rejected.
#[derive(Clone, Debug, PartialEq)]
pub enum ChGlueReason {
    /// The first integral a must agree across every junction.
    AMismatch { a1: f64, a2: f64 },
    /// Bounded one-sided slopes that neither match nor mirror at w = s.
    SlopeMismatch,
    /// Unbounded slope away from the line w = s.
    NotAtCrest,
    /// Constant piece meeting a singular glue away from w = s, or without
    /// the stumpon constants.
    StumponConstantsViolated,
    /// A constant piece whose stored first integrals differ from the values
    /// forced by its level.
    ConstantIntegralsMismatch { stored_b: f64, forced_b: f64 },
}

/// Verdict of the CH junction checker.
#[derive(Clone, Debug, PartialEq)]
pub enum ChGlueVerdict {
    Admissible(GlueKind),
    Inadmissible(ChGlueReason),
}

/// One piece of a CH construction plan. All pieces share (s, a).
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ChPiece {
    Const { wbar: f64, len: Option<f64> },
    Mono {
        b: f64,
        orientation: Orientation,
        w_from: f64,
        w_to: f64,
    },
    /// Exponential peak pair around a crest at w = s; c1, c2 derive from
    /// (s, a). Lengths are the xi-extents of the rising and falling parts.
    ExpPeak { len_left: f64, len_right: f64 },
}

/// An ordered CH gluing plan.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChPlan {
    pub pieces: Vec<ChPiece>,
}

/// Errors from CH construction.
#[derive(Clone, Debug, PartialEq)]
pub enum ChError {
    /// The requested kind has no bounded glued profile.
    NotConstructible,
    /// Exponential peak needs s^2 >= 2a.
    ComplexSlope,
    /// Junction values disagree.
    ValueMismatch { left: f64, right: f64 },
    /// Piece range, orientation, or region sign are inconsistent.
    BadPieceRange,
    /// w_xi^2 < 0 somewhere strictly inside the requested range.
    SignViolation { w_at: f64 },
    MissingConstLength { index: usize },
    InadmissiblePlan { index: usize, reason: String },
    /// A decay tail can only sit at an end of the profile.
    InteriorTail { index: usize },
    Table(TableError),
    Profile(ProfileError),
}

impl core::fmt::Display for ChError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ChError::NotConstructible => f.write_str("wave kind is not constructible"),
            ChError::ComplexSlope => f.write_str("exponential peak needs s^2 >= 2a"),
            ChError::ValueMismatch { left, right } => {
                write!(f, "junction values differ: {left} vs {right}")
            }
            ChError::BadPieceRange => f.write_str("piece range and orientation disagree"),
            ChError::SignViolation { w_at } => {
                write!(f, "w_xi^2 negative inside the piece near w = {w_at}")
            }
            ChError::MissingConstLength { index } => {
                write!(f, "interior constant piece {index} needs a length")
            }
            ChError::InadmissiblePlan { index, reason } => {
                write!(f, "junction {index} inadmissible: {reason}")
            }
            ChError::InteriorTail { index } => {
                write!(f, "piece {index} has a decay tail but is not at a profile end")
            }
            ChError::Table(e) => write!(f, "table: {e}"),
            ChError::Profile(e) => write!(f, "profile: {e}"),
        }
    }
}

impl From<TableError> for ChError {
    fn from(e: TableError) -> Self {
        ChError::Table(e)
    }
}

impl From<ProfileError> for ChError {
    fn from(e: ProfileError) -> Self {
        ChError::Profile(e)
    }
}

/// g(w) = -w^3 + s w^2 + 2 a w + b.
pub fn g_eval(s: f64, a: f64, b: f64, w: f64) -> f64 {
    ((-w + s) * w + 2.0 * a) * w + b
}

/// g'(w) = -3 w^2 + 2 s w + 2 a.
pub fn g_prime(s: f64, a: f64, w: f64) -> f64 {
    (-3.0 * w + 2.0 * s) * w + 2.0 * a
}

/// Zero structure of the cubic g for the triple (s, a, b).
pub fn analyze_g(s: f64, a: f64, b: f64) -> CubicAnalysis {
    let scale = 1.0 + s.abs() + a.abs() + b.abs();
    let disc_cut = 1e-10 * math::powi(scale, 6);
    let zeros = cubic::real_roots(-1.0, s, 2.0 * a, b, disc_cut);
    let disc_arg = s * s + 6.0 * a;
    let crit_exists = disc_arg > 0.0;
    let root = if crit_exists { math::sqrt(disc_arg) } else { 0.0 };
    CubicAnalysis {
        s,
        a,
        b,
        crit_exists,
        w_crit_min: (s - root) / 3.0,
        w_crit_max: (s + root) / 3.0,
        zeros,
    }
}

const KIND_TOL: f64 = 1e-8;
const STUMPON_TOL: f64 = 1e-10;

/// Classify a CH triple. Valid for either sign of s; negative speeds come
/// out as the mirrored configurations (double zero at the maximum etc.).
pub fn classify_ch(s: f64, a: f64, b: f64) -> ChTaxonomy {
    let analysis = analyze_g(s, a, b);
    let mut certificates = Vec::new();
    certificates.push(Certificate {
        name: "s2_plus_6a",
        value: s * s + 6.0 * a,
    });
    let tol8 = KIND_TOL * (1.0 + s.abs());

    let base = if !analysis.crit_exists {
        ChKind::NoBoundedWave
    } else {
        match analysis.zeros.as_slice() {
            [(_, 3)] | [(_, 1)] => ChKind::NoBoundedWave,
            [(z1, m1), (z2, m2)] if *m1 + *m2 == 3 => {
                let (zd, eta) = if *m1 == 2 { (*z1, *z2) } else { (*z2, *z1) };
                certificates.push(Certificate {
                    name: "g_at_double_zero",
                    value: g_eval(s, a, b, zd),
                });
                certificates.push(Certificate {
                    name: "gp_at_double_zero",
                    value: g_prime(s, a, zd),
                });
                if (zd - analysis.w_crit_min).abs() <= (zd - analysis.w_crit_max).abs() {
                    // Double zero at the local minimum: decaying cuspon or
                    // peakon family, provided s lies in (w_min, eta].
                    let w_min = zd;
                    certificates.push(Certificate {
                        name: "vieta_eta_plus_2wmin_minus_s",
                        value: eta + 2.0 * w_min - s,
                    });
                    certificates.push(Certificate {
                        name: "vieta_b_minus_eta_wmin2",
                        value: b - eta * w_min * w_min,
                    });
                    // The s = w_min boundary (crest at the decay level)
                    // admits only the constant, and the double zero may
                    // round to either side of s there, so it is resolved
                    // with the kind threshold rather than strict order.
                    if (s - eta).abs() <= tol8 {
                        ChKind::PeakonWithDecay { w_min }
                    } else if w_min + tol8 < s && s < eta {
                        ChKind::CusponWithDecay { w_min, eta }
                    } else {
                        ChKind::NoBoundedWave
                    }
                } else {
                    // Double zero at the local maximum: the mirrored family,
                    // with waves between the crest w = s and the decay level
                    // w_max, provided s lies in [eta, w_max).
                    let w_max = zd;
                    // As above: s = w_max is the constant boundary and is
                    // excluded with the kind threshold.
                    if (s - eta).abs() <= tol8 || (eta < s && s < w_max - tol8) {
                        ChKind::MirrorCase { w_max, eta }
                    } else {
                        ChKind::NoBoundedWave
                    }
                }
            }
            [(eta1, 1), (eta2, 1), (eta3, 1)] => {
                let (eta1, eta2, eta3) = (*eta1, *eta2, *eta3);
                certificates.push(Certificate {
                    name: "vieta_sum_minus_s",
                    value: eta1 + eta2 + eta3 - s,
                });
                if (s - eta3).abs() <= tol8 {
                    ChKind::PeriodicPeakon { eta1, eta2 }
                } else if eta2 < s && s < eta3 {
                    ChKind::PeriodicCuspon { eta1, eta2, eta3 }
                } else if s <= eta1 - tol8 || s >= eta3 + tol8 {
                    ChKind::NoBoundedWave
                } else {
                    ChKind::UnclassifiedBoundedDerivative
                }
            }
            _ => ChKind::NoBoundedWave,
        }
    };

    let stump_a = 2.0 * a - s * s;
    let stump_b = b + s * s * s;
    certificates.push(Certificate { name: "stumpon_2a_minus_s2", value: stump_a });
    certificates.push(Certificate { name: "stumpon_b_plus_s3", value: stump_b });
    let kind = if stump_a.abs() <= STUMPON_TOL * (1.0 + s * s)
        && stump_b.abs() <= STUMPON_TOL * (1.0 + s.abs() * s.abs() * s.abs())
    {
        ChKind::StumponCompatible { inner: Box::new(base) }
    } else {
        base
    };

    ChTaxonomy {
        analysis,
        kind,
        certificates,
    }
}

/// What a requested arc endpoint turns out to be.
#[derive(Clone, Copy, Debug, PartialEq)]
enum EndKind {
    Regular,
    /// w = s with g(s) != 0: unbounded slope, dxi/dw -> 0.
    Cusp,
    /// w = s with g(s) = 0: bounded nonzero slope.
    Peak,
    /// Simple zero of g away from s: smooth turning point, dxi/dw -> inf.
    Turning,
    /// Double zero of g: exponential approach over infinite xi.
    Tail { rate: f64, w_limit: f64 },
}

/// Stable evaluator of w_xi^2 = g(w)/(s - w) built on the factored cubic:
/// near the zeros of g a direct evaluation of (2as + b)/(s - w) + w^2 - 2a
/// cancels catastrophically, so the factored product is used instead.
pub struct Wxi2 {
    s: f64,
    /// Real zeros (value, multiplicity).
    zeros: Vec<(f64, u8)>,
    /// Quadratic cofactor coefficients when only one real zero exists:
    /// g = (w - z) (q2 w^2 + q1 w + q0).
    quad: Option<(f64, f64, f64)>,
    /// Index into zeros of a zero coinciding with s (peak case), if any.
    peak_zero: Option<usize>,
}

impl Wxi2 {
    /// Build the evaluator for a parameter triple.
    pub fn for_triple(s: f64, a: f64, b: f64) -> Self {
        Self::new(s, a, &analyze_g(s, a, b))
    }

    fn new(s: f64, a: f64, analysis: &CubicAnalysis) -> Self {
        let zeros = analysis.zeros.clone();
        let total: u8 = zeros.iter().map(|&(_, m)| m).sum();
        let quad = if total == 1 {
            let z = zeros[0].0;
            // Synthetic division of -w^3 + s w^2 + 2 a w + b by (w - z).
            let q2 = -1.0;
            let q1 = s + q2 * z;
            let q0 = 2.0 * a + q1 * z;
            Some((q2, q1, q0))
        } else {
            None
        };
        let tol = KIND_TOL * (1.0 + s.abs());
        let peak_zero = zeros.iter().position(|&(z, m)| m == 1 && (z - s).abs() <= tol);
        Wxi2 { s, zeros, quad, peak_zero }
    }

    /// w_xi^2 at w. Returns +inf at a cusp value, 0 at zeros of g.
    pub fn eval(&self, w: f64) -> f64 {
        if let Some((q2, q1, q0)) = self.quad {
            // g = (w - z) * (q2 w^2 + q1 w + q0) with a single real zero z.
            let quadratic = (q2 * w + q1) * w + q0;
            if self.peak_zero.is_some() {
                // z = s: the factor (w - s) cancels against (s - w).
                return -quadratic;
            }
            return (w - self.zeros[0].0) * quadratic / (self.s - w);
        }
        // Fully factored: g = -prod (w - z_i)^{m_i}.
        let mut p = -1.0_f64;
        for (i, &(z, m)) in self.zeros.iter().enumerate() {
            if Some(i) == self.peak_zero {
                continue;
            }
            for _ in 0..m {
                p *= w - z;
            }
        }
        if self.peak_zero.is_some() {
            // The skipped factor (w - s) of g cancels against (s - w).
            -p
        } else {
            p / (self.s - w)
        }
    }

    /// dxi/dw magnitude = 1 / sqrt(w_xi^2); 0 at cusp values.
    pub fn xi_prime(&self, w: f64) -> f64 {
        let v = self.eval(w);
        if v <= 0.0 {
            return f64::INFINITY;
        }
        if v.is_infinite() {
            return 0.0;
        }
        1.0 / math::sqrt(v)
    }
}

fn classify_endpoint(
    s: f64,
    a: f64,
    b: f64,
    analysis: &CubicAnalysis,
    w_end: f64,
    tol: &ToleranceConfig,
) -> Result<EndKind, ChError> {
    let scale = 1.0 + s.abs();
    if (w_end - s).abs() <= tol.glue_value_tol * scale {
        let gs = 2.0 * a * s + b;
        return Ok(if gs.abs() <= KIND_TOL * math::powi(scale, 3) {
            EndKind::Peak
        } else {
            EndKind::Cusp
        });
    }
    // A zero of g at the endpoint?
    for &(z, m) in &analysis.zeros {
        if (w_end - z).abs() <= KIND_TOL * (1.0 + z.abs()) {
            if m >= 2 {
                // Decay level: rate from the linearization
                // w_xi^2 ~ (g''(z)/2) (w-z)^2 / (s - z).
                let gpp = -6.0 * z + 2.0 * s;
                let lam2 = 0.5 * gpp / (s - z);
                if !(lam2 > 0.0) {
                    return Err(ChError::BadPieceRange);
                }
                return Ok(EndKind::Tail { rate: math::sqrt(lam2), w_limit: z });
            }
            return Ok(EndKind::Turning);
        }
    }
    let _ = b;
    Ok(EndKind::Regular)
}

const CH_MESH_CUSP: usize = 800;
const CH_MESH_TURNING: usize = 1000;
const CH_MESH_TAIL: usize = 1200;
const CH_MESH_REGULAR: usize = 400;
const CH_MESH_MIX: f64 = 1e-4;
/// Smaller linear admixture at turning points: the first interval length
/// bounds the capped node slope there (|w_xi| ~ sqrt(mu h1)/6 must stay
/// below the junction slope tolerance).
const CH_MESH_MIX_TURN: f64 = 1e-8;

/// Nodes for one half of the w-interval, from `from` (the outer end, with
/// the given end kind) toward `to` (the midpoint), exclusive of `to`.
fn half_mesh(from: f64, to: f64, end: EndKind, tol: &ToleranceConfig) -> Vec<f64> {
    let mut nodes = Vec::new();
    match end {
        EndKind::Cusp | EndKind::Turning => {
            // Quartic clustering toward the outer end (with a linear
            // admixture bounding the smallest spacing).
            let (n, mix) = if end == EndKind::Cusp {
                (CH_MESH_CUSP, CH_MESH_MIX)
            } else {
                (CH_MESH_TURNING, CH_MESH_MIX_TURN)
            };
            for j in 0..n {
                let tau = j as f64 / n as f64;
                let c = (math::powi(tau, 4) + mix * tau) / (1.0 + mix);
                nodes.push(from + (to - from) * c);
            }
        }
        EndKind::Tail { w_limit, .. } => {
            // The table starts at the cutoff edge; log-spaced distances
            // from the limit resolve dxi/dw ~ 1/(w - w_limit).
            let eps = (from - w_limit).abs();
            let span = (to - w_limit).abs();
            let ratio = span / eps;
            let n = CH_MESH_TAIL;
            for j in 0..n {
                let tau = j as f64 / n as f64;
                let dist = eps * math::exp(math::ln(ratio) * tau);
                let w = if to > from { w_limit + dist } else { w_limit - dist };
                nodes.push(w);
            }
            let _ = tol;
        }
        EndKind::Regular | EndKind::Peak => {
            let n = CH_MESH_REGULAR;
            for j in 0..n {
                let tau = j as f64 / n as f64;
                nodes.push(from + (to - from) * tau);
            }
        }
    }
    nodes
}

/// Build one monotone CH arc between w_from and w_to with first integrals
/// (a, b). Endpoint behaviour (cusp, peak, turning point, decay tail) is
/// detected from the zero structure of g. A Tail endpoint shifts the
/// tabulated edge to the cutoff distance and attaches the analytic
/// exponential extension. The xi-left end of the returned segment sits at
/// xi = 0.
pub fn ch_arc(
    s: f64,
    a: f64,
    b: f64,
    w_from: f64,
    w_to: f64,
    orientation: Orientation,
    tol: &ToleranceConfig,
) -> Result<Segment, ChError> {
    if w_from == w_to || (orientation == Orientation::Increasing) != (w_to > w_from) {
        return Err(ChError::BadPieceRange);
    }
    let (mut w_lo, mut w_hi) = if w_from < w_to { (w_from, w_to) } else { (w_to, w_from) };
    let analysis = analyze_g(s, a, b);
    let lo_kind = classify_endpoint(s, a, b, &analysis, w_lo, tol)?;
    let hi_kind = classify_endpoint(s, a, b, &analysis, w_hi, tol)?;

    // Snap endpoints onto the exact structural values.
    let snap = |w: f64, kind: EndKind, is_hi: bool| -> f64 {
        match kind {
            EndKind::Cusp | EndKind::Peak => s,
            EndKind::Turning => {
                analysis
                    .zeros
                    .iter()
                    .map(|&(z, _)| z)
                    .fold(w, |best, z| if (z - w).abs() < (best - w).abs() { z } else { best })
            }
            EndKind::Tail { w_limit, .. } => {
                // Move to the cutoff edge just inside the interval.
                let eps = tol.tail_cutoff_epsilon * (1.0 + w_limit.abs());
                if is_hi { w_limit - eps } else { w_limit + eps }
            }
            EndKind::Regular => w,
        }
    };
    w_lo = snap(w_lo, lo_kind, false);
    w_hi = snap(w_hi, hi_kind, true);
    if !(w_hi > w_lo) {
        return Err(ChError::BadPieceRange);
    }

    let wxi2 = Wxi2::new(s, a, &analysis);

    // Interior admissibility: w_xi^2 > 0 and s - w of one sign strictly
    // inside (endpoint structure already accounted for).
    let n_check = 1001;
    for i in 1..n_check {
        let w = w_lo + (w_hi - w_lo) * i as f64 / n_check as f64;
        let v = wxi2.eval(w);
        if !(v > 0.0) || v.is_infinite() {
            return Err(ChError::SignViolation { w_at: w });
        }
    }

    // Node mesh: each half clustered for its outer endpoint.
    let mid = 0.5 * (w_lo + w_hi);
    let mut ws = half_mesh(w_lo, mid, lo_kind, tol);
    ws.push(mid);
    let mut upper = half_mesh(w_hi, mid, hi_kind, tol);
    upper.reverse();
    ws.extend(upper.into_iter().filter(|&w| w > mid));
    let n = ws.len();

    // Cumulative xi from w_lo. Intervals in a cusp or turning half use the
    // substitution w = w* +- t^2 which makes the integrand smooth.
    let per_interval_tol = tol.quad_abs_tol / n as f64;
    let turning_zero = |kind: EndKind, w_end: f64| -> Option<f64> {
        if kind == EndKind::Turning { Some(w_end) } else { None }
    };
    let lo_turn = turning_zero(lo_kind, w_lo);
    let hi_turn = turning_zero(hi_kind, w_hi);

    let mut lengths = Vec::with_capacity(n);
    lengths.push(0.0);
    let mut acc = 0.0_f64;
    for j in 0..n - 1 {
        let (wa, wb) = (ws[j], ws[j + 1]);
        let piece = if lo_kind == EndKind::Cusp && wb <= mid {
            // w = s - t^2 toward the low end is impossible (s >= w_hi or
            // s <= w_lo); a cusp at the low end means s = w_lo.
            let (ta, tb) = (math::sqrt(wb - w_lo), math::sqrt(wa - w_lo));
            cusp_integral(&wxi2, s, ta, tb, true, per_interval_tol)
        } else if hi_kind == EndKind::Cusp && wa >= mid {
            let (ta, tb) = (math::sqrt(w_hi - wb), math::sqrt(w_hi - wa));
            cusp_integral(&wxi2, s, ta, tb, false, per_interval_tol)
        } else if let (Some(eta), true) = (lo_turn, wb <= mid) {
            let (ta, tb) = (math::sqrt(wa - eta), math::sqrt(wb - eta));
            turning_integral(s, a, b, eta, ta, tb, true, per_interval_tol)
        } else if let (Some(eta), true) = (hi_turn, wa >= mid) {
            let (ta, tb) = (math::sqrt(eta - wb), math::sqrt(eta - wa));
            turning_integral(s, a, b, eta, ta, tb, false, per_interval_tol)
        } else {
            quad::adaptive(|w| wxi2.xi_prime(w), wa, wb, per_interval_tol).value
        };
        acc += piece.abs();
        lengths.push(acc);
    }
    let total = acc;

    let ys: Vec<f64> = match orientation {
        Orientation::Increasing => lengths,
        Orientation::Decreasing => lengths.iter().map(|&l| total - l).collect(),
    };
    let ds: Vec<f64> = ws
        .iter()
        .enumerate()
        .map(|(j, &w)| {
            let at_lo = j == 0;
            let at_hi = j == n - 1;
            let kind = if at_lo {
                Some(lo_kind)
            } else if at_hi {
                Some(hi_kind)
            } else {
                None
            };
            let mag = match kind {
                Some(EndKind::Cusp) => 0.0,
                // Finite stand-in; the monotone cap replaces it by three
                // times the adjacent secant, which is the best finite slope
                // available at a vertical tangent of xi(w).
                Some(EndKind::Turning) => 1e300,
                _ => wxi2.xi_prime(w),
            };
            orientation.sign() * mag
        })
        .collect();

    let table = MonotoneTable::with_slopes(ws, ys, ds)?;
    let flag_of = |kind: EndKind| match kind {
        EndKind::Cusp => EndpointFlag::SingularDerivative,
        EndKind::Tail { rate, w_limit } => EndpointFlag::DecayTail { rate, w_limit },
        _ => EndpointFlag::Regular,
    };
    Ok(Segment {
        equation: SegmentEq::Ch { a, b },
        kind: SegmentKind::Monotone(MonotoneSegment {
            orientation,
            table,
            lo_flag: flag_of(lo_kind),
            hi_flag: flag_of(hi_kind),
            exp_form: None,
        }),
    })
}

/// Integral of dxi/dw over an interval expressed in t = sqrt(|w - s|):
/// the integrand 2 t^2 / sqrt(g(s) + t^2 C(t)) is smooth through t = 0.
fn cusp_integral(wxi2: &Wxi2, s: f64, ta: f64, tb: f64, below: bool, tol: f64) -> f64 {
    let f = |t: f64| {
        let w = if below { s + t * t } else { s - t * t };
        // dxi/dw dw = (1/sqrt(wxi2)) 2 t dt with wxi2 ~ g(s)/(s-w):
        // evaluate through the stable factored form.
        let v = wxi2.eval(w);
        if v.is_infinite() || v <= 0.0 {
            0.0
        } else {
            2.0 * t / math::sqrt(v)
        }
    };
    quad::adaptive(f, ta.min(tb), ta.max(tb), tol).value
}

/// Integral of dxi/dw near a simple zero eta of g, in t = sqrt(|w - eta|):
/// with g = (w - eta) q(w), dxi = 2 sqrt((s - w)/q(w)) dt, smooth at t = 0.
fn turning_integral(
    s: f64,
    a: f64,
    b: f64,
    eta: f64,
    ta: f64,
    tb: f64,
    above: bool,
    tol: f64,
) -> f64 {
    // Synthetic division g / (w - eta).
    let q2 = -1.0;
    let q1 = s + q2 * eta;
    let q0 = 2.0 * a + q1 * eta;
    let _ = b;
    let f = |t: f64| {
        let w = if above { eta + t * t } else { eta - t * t };
        let q = (q2 * w + q1) * w + q0;
        let num = (s - w) / q * if above { 1.0 } else { -1.0 };
        if num <= 0.0 {
            0.0
        } else {
            2.0 * math::sqrt(num)
        }
    };
    quad::adaptive(f, ta.min(tb), ta.max(tb), tol).value
}

/// First integrals forced on a constant CH piece at level wbar:
/// a = (3/2) wbar^2 - s wbar, b = s wbar^2 - 2 wbar^3.
pub fn const_integrals(s: f64, wbar: f64) -> (f64, f64) {
    (1.5 * wbar * wbar - s * wbar, s * wbar * wbar - 2.0 * wbar * wbar * wbar)
}

/// A constant CH piece with its forced first integrals.
pub fn ch_constant(s: f64, wbar: f64, xi_lo: f64, xi_hi: f64) -> Segment {
    let (a, b) = const_integrals(s, wbar);
    Segment::constant(SegmentEq::Ch { a, b }, wbar, xi_lo, xi_hi)
}

const A_MATCH_TOL: f64 = 1e-9;
/// Bounded one-sided slopes are compared with this absolute tolerance
/// (scaled by 1 + |s|). It must sit above the residual slope of a turning
/// endpoint, whose true slope 0 is represented by a capped table node.
const SLOPE_MATCH_TOL: f64 = 1e-5;

/// Decide whether two CH pieces may be joined where they meet.
///
/// The first integral a must agree across every junction. With bounded
/// slopes, continuity is required away from w = s, while at w = s the
/// slopes may mirror (peak). Unbounded slopes are admissible only on the
/// line w = s, where any pair b1, b2 may meet; a constant piece at such a
/// glue must sit at the level s itself (the stumpon configuration).
pub fn check_glue_ch(
    left: &Segment,
    right: &Segment,
    s: f64,
    tol: &ToleranceConfig,
) -> Result<ChGlueVerdict, ChError> {
    let wl = left.end_value(End::Right);
    let wr = right.end_value(End::Left);
    let scale = 1.0 + s.abs();
    if (wl - wr).abs() > tol.glue_value_tol * scale {
        return Err(ChError::ValueMismatch { left: wl, right: wr });
    }
    let w_star = 0.5 * (wl + wr);

    // A constant piece carries no free first integrals: both are forced by
    // its level. Stored values that disagree describe no classical solution.
    for seg in [left, right] {
        if let (SegmentKind::Constant { wbar, .. }, SegmentEq::Ch { a, b }) =
            (&seg.kind, seg.equation)
        {
            let (a_forced, b_forced) = const_integrals(s, *wbar);
            if (a - a_forced).abs() > A_MATCH_TOL * (1.0 + a_forced.abs()) {
                return Ok(ChGlueVerdict::Inadmissible(ChGlueReason::AMismatch {
                    a1: a,
                    a2: a_forced,
                }));
            }
            if (b - b_forced).abs() > A_MATCH_TOL * (1.0 + b_forced.abs()) {
                return Ok(ChGlueVerdict::Inadmissible(
                    ChGlueReason::ConstantIntegralsMismatch { stored_b: b, forced_b: b_forced },
                ));
            }
        }
    }

    let (a1, a2) = match (left.equation, right.equation) {
        (SegmentEq::Ch { a: a1, .. }, SegmentEq::Ch { a: a2, .. }) => (a1, a2),
        _ => (f64::NAN, f64::NAN),
    };
    if !((a1 - a2).abs() <= A_MATCH_TOL * (1.0 + a1.abs())) {
        return Ok(ChGlueVerdict::Inadmissible(ChGlueReason::AMismatch { a1, a2 }));
    }

    let ls = left.end_slope(End::Right);
    let rs = right.end_slope(End::Left);
    let at_crest = (w_star - s).abs() <= tol.glue_value_tol * scale;
    let slope_tol = SLOPE_MATCH_TOL * scale;

    match (ls, rs) {
        (ExtendedSlope::Finite(p), ExtendedSlope::Finite(q)) => {
            let near_zero = p.abs() <= slope_tol && q.abs() <= slope_tol;
            if left.is_constant() != right.is_constant() {
                // A constant can only continue a piece whose slope vanishes
                // (a decay limit never reached at finite xi), so bounded
                // constant junctions require a zero slope on the wave side.
                return Ok(if near_zero {
                    ChGlueVerdict::Admissible(GlueKind::ConstantJunction)
                } else {
                    ChGlueVerdict::Inadmissible(ChGlueReason::SlopeMismatch)
                });
            }
            if (p - q).abs() <= slope_tol || near_zero {
                return Ok(ChGlueVerdict::Admissible(GlueKind::SmoothC1));
            }
            if at_crest && (p + q).abs() <= slope_tol {
                return Ok(ChGlueVerdict::Admissible(GlueKind::Peak));
            }
            Ok(ChGlueVerdict::Inadmissible(ChGlueReason::SlopeMismatch))
        }
        _ => {
            // At least one unbounded slope: only on the line w = s.
            if !at_crest {
                return Ok(ChGlueVerdict::Inadmissible(ChGlueReason::NotAtCrest));
            }
            if left.is_constant() || right.is_constant() {
                // Constant at w = s: with matching a (checked above) the
                // stumpon constants 2a = s^2, b = -s^3 hold automatically.
                let ok = (2.0 * a1 - s * s).abs() <= KIND_TOL * (1.0 + s * s);
                return Ok(if ok {
                    ChGlueVerdict::Admissible(GlueKind::ConstantJunction)
                } else {
                    ChGlueVerdict::Inadmissible(ChGlueReason::StumponConstantsViolated)
                });
            }
            let kind = match (ls.signum() > 0.0, rs.signum() > 0.0) {
                (true, false) | (false, true) => GlueKind::Cusp,
                _ => GlueKind::InflectionSingular,
            };
            Ok(ChGlueVerdict::Admissible(kind))
        }
    }
}

/// Exponential peak pair around a crest at w = s:
/// w(xi) = c1 e^{xi - gamma0} + c2 e^{-(xi - gamma0)} with c1 + c2 = s and
/// c1 - c2 = sqrt(s^2 - 2a). Returns the rising (left) and falling (right)
/// pieces on [xi_interval.0, gamma0] and [gamma0, xi_interval.1].
pub fn build_exp_peak(
    s: f64,
    a: f64,
    gamma0: f64,
    xi_interval: (f64, f64),
) -> Result<(Segment, Segment), ChError> {
    let disc = s * s - 2.0 * a;
    if disc < 0.0 {
        return Err(ChError::ComplexSlope);
    }
    let r = math::sqrt(disc);
    let c1 = 0.5 * (s + r);
    let c2 = 0.5 * (s - r);
    let (xi_l, xi_r) = xi_interval;
    if !(xi_l < gamma0 && gamma0 < xi_r) {
        return Err(ChError::BadPieceRange);
    }
    let b = -2.0 * a * s;

    let make = |form: ExpForm, xi_a: f64, xi_b: f64, orientation: Orientation| {
        // Tabulate xi(w) on the covered w-range; evaluation goes through
        // the exact closed form, the table only serves inversion.
        let n = 400;
        let mut ws = Vec::with_capacity(n + 1);
        let mut ys = Vec::with_capacity(n + 1);
        let mut ds = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let xi = xi_a + (xi_b - xi_a) * j as f64 / n as f64;
            let (w, slope) = form.eval(xi);
            ws.push(w);
            ys.push(xi);
            ds.push(if slope != 0.0 { 1.0 / slope } else { 0.0 });
        }
        if ws[0] > ws[n] {
            ws.reverse();
            ys.reverse();
            ds.reverse();
        }
        // Monotonicity of w over the interval is required.
        if ws.windows(2).any(|p| p[1] <= p[0]) {
            return Err(ChError::BadPieceRange);
        }
        let table = MonotoneTable::with_slopes(ws, ys, ds)?;
        Ok(Segment {
            equation: SegmentEq::Ch { a, b },
            kind: SegmentKind::Monotone(MonotoneSegment {
                orientation,
                table,
                lo_flag: EndpointFlag::Regular,
                hi_flag: EndpointFlag::Regular,
                exp_form: Some(form),
            }),
        })
    };

    let rising = make(
        ExpForm { c1, c2, xi_ref: gamma0, offset: 0.0 },
        xi_l,
        gamma0,
        Orientation::Increasing,
    )?;
    // The falling piece mirrors the rising one: w(xi) = c1 e^{-(xi-g0)} +
    // c2 e^{xi-g0}, i.e. the coefficients swap.
    let falling = make(
        ExpForm { c1: c2, c2: c1, xi_ref: gamma0, offset: 0.0 },
        gamma0,
        xi_r,
        Orientation::Decreasing,
    )?;
    Ok((rising, falling))
}

/// Construct the profile of a classified CH kind. Decay kinds cover all of
/// the real line (crest at xi = 0); periodic kinds tile enough arcs to
/// cover `window`.
pub fn build_ch_profile(
    s: f64,
    a: f64,
    b: f64,
    kind: &ChKind,
    window: (f64, f64),
    tol: &ToleranceConfig,
) -> Result<Profile, ChError> {
    match kind {
        ChKind::CusponWithDecay { w_min, .. } | ChKind::PeakonWithDecay { w_min } => {
            decay_profile(s, a, b, *w_min, s, tol)
        }
        ChKind::MirrorCase { w_max, .. } => decay_profile(s, a, b, *w_max, s, tol),
        ChKind::PeriodicCuspon { eta2, .. } => periodic_profile(s, a, b, *eta2, window, tol),
        ChKind::PeriodicPeakon { eta2, .. } => periodic_profile(s, a, b, *eta2, window, tol),
        ChKind::StumponCompatible { .. } => stumpon_profile(s, tol),
        ChKind::NoBoundedWave | ChKind::UnclassifiedBoundedDerivative => {
            Err(ChError::NotConstructible)
        }
    }
}

/// Exact peakon halves around the crest at xi = 0: when g(s) = 0 with a
/// double zero of g at the level, w_xi^2 = (w - level)^2 exactly, so
/// w = level + (s - level) e^{-|xi|} in closed form on each side.
fn peakon_segments(
    s: f64,
    a: f64,
    b: f64,
    w_level: f64,
    tol: &ToleranceConfig,
) -> Result<(Segment, Segment), ChError> {
    let dev = s - w_level;
    if dev == 0.0 {
        return Err(ChError::BadPieceRange);
    }
    let eps = tol.tail_cutoff_epsilon * (1.0 + w_level.abs());
    // Table of xi(w) = ln((s - level)/(w - level)) on the right half (the
    // left half is its mirror); nodes log-spaced in |w - level|. The node
    // count keeps the interpolated-slope error of the first integral below
    // 1e-6 relative on dense grids.
    let n = 1200;
    let ratio = dev.abs() / eps;
    let mut dists = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let tau = j as f64 / n as f64;
        dists.push(eps * math::exp(math::ln(ratio) * tau));
    }
    // Ascending w nodes: below the level is impossible here; the wave lives
    // between the level and s on whichever side s sits.
    let mut ws: Vec<f64> = dists
        .iter()
        .map(|&d| if dev > 0.0 { w_level + d } else { w_level - d })
        .collect();
    *ws.last_mut().unwrap() = s;
    if dev < 0.0 {
        ws.reverse();
    }

    let make = |sign_right: bool| -> Result<Segment, ChError> {
        // xi(w) for the right half; the left half flips the sign.
        let half_sign = if sign_right { 1.0 } else { -1.0 };
        let ys: Vec<f64> = ws
            .iter()
            .map(|&w| half_sign * math::ln(dev / (w - w_level)))
            .collect();
        let ds: Vec<f64> = ws.iter().map(|&w| -half_sign / (w - w_level)).collect();
        // Orientation: on the right, w runs from s toward the level.
        let orientation = match (sign_right, dev > 0.0) {
            (true, true) | (false, false) => Orientation::Decreasing,
            _ => Orientation::Increasing,
        };
        let (lo_flag, hi_flag) = if dev > 0.0 {
            (
                EndpointFlag::DecayTail { rate: 1.0, w_limit: w_level },
                EndpointFlag::Regular,
            )
        } else {
            (
                EndpointFlag::Regular,
                EndpointFlag::DecayTail { rate: 1.0, w_limit: w_level },
            )
        };
        let (c1, c2) = if sign_right { (0.0, dev) } else { (dev, 0.0) };
        let table = MonotoneTable::with_slopes(ws.clone(), ys, ds)?;
        Ok(Segment {
            equation: SegmentEq::Ch { a, b },
            kind: SegmentKind::Monotone(MonotoneSegment {
                orientation,
                table,
                lo_flag,
                hi_flag,
                exp_form: Some(ExpForm { c1, c2, xi_ref: 0.0, offset: w_level }),
            }),
        })
    };
    Ok((make(false)?, make(true)?))
}

/// Two-piece wave decaying to `w_level` at both ends with crest (or trough,
/// in the mirrored case) at w = s, anchored at xi = 0.
fn decay_profile(
    s: f64,
    a: f64,
    b: f64,
    w_level: f64,
    w_crest: f64,
    tol: &ToleranceConfig,
) -> Result<Profile, ChError> {
    // Peakon limit g(s) = 0: both halves are exact exponentials.
    if (2.0 * a * s + b).abs() <= KIND_TOL * math::powi(1.0 + s.abs(), 3) {
        let (left, right) = peakon_segments(s, a, b, w_level, tol)?;
        let verdict = check_glue_ch(&left, &right, s, tol)?;
        let kind = match verdict {
            ChGlueVerdict::Admissible(k) => k,
            ChGlueVerdict::Inadmissible(reason) => {
                return Err(ChError::InadmissiblePlan {
                    index: 0,
                    reason: alloc::format!("{reason:?}"),
                })
            }
        };
        let glue = GluePoint {
            xi: 0.0,
            w: w_crest,
            kind,
            left_slope: left.end_slope(End::Right),
            right_slope: right.end_slope(End::Left),
        };
        return Ok(Profile::from_segments(
            EquationTag::Ch,
            s,
            alloc::vec![left, right],
            alloc::vec![glue],
            None,
            tol,
        )?);
    }
    // Rising part ends at the crest if the level lies below s, otherwise
    // the wave descends from above (mirror case).
    let level_below = w_level < w_crest;
    let (left_or, right_or) = if level_below {
        (Orientation::Increasing, Orientation::Decreasing)
    } else {
        (Orientation::Decreasing, Orientation::Increasing)
    };
    let mut left = ch_arc(s, a, b, w_level, w_crest, left_or, tol)?;
    let mut right = ch_arc(s, a, b, w_crest, w_level, right_or, tol)?;
    // Anchor the crest at xi = 0.
    let (_, l_hi) = left.xi_range();
    left.shift_xi(-l_hi);
    let (r_lo, _) = right.xi_range();
    right.shift_xi(-r_lo);

    let verdict = check_glue_ch(&left, &right, s, tol)?;
    let kind = match verdict {
        ChGlueVerdict::Admissible(k) => k,
        ChGlueVerdict::Inadmissible(reason) => {
            return Err(ChError::InadmissiblePlan { index: 0, reason: alloc::format!("{reason:?}") })
        }
    };
    let glue = GluePoint {
        xi: 0.0,
        w: w_crest,
        kind,
        left_slope: left.end_slope(End::Right),
        right_slope: right.end_slope(End::Left),
    };
    Ok(Profile::from_segments(
        EquationTag::Ch,
        s,
        alloc::vec![left, right],
        alloc::vec![glue],
        None,
        tol,
    )?)
}

/// Periodic wave oscillating between the smooth extremum at eta2 and the
/// crest at w = s, with crests at integer multiples of the period; tiled to
/// cover `window`.
fn periodic_profile(
    s: f64,
    a: f64,
    b: f64,
    eta2: f64,
    window: (f64, f64),
    tol: &ToleranceConfig,
) -> Result<Profile, ChError> {
    let falling = ch_arc(s, a, b, s, eta2, Orientation::Decreasing, tol)?;
    let rising = ch_arc(s, a, b, eta2, s, Orientation::Increasing, tol)?;
    let (f_lo, f_hi) = falling.xi_range();
    let half = f_hi - f_lo;
    let period = 2.0 * half;

    let (win_lo, win_hi) = window;
    if !(win_hi > win_lo) || !win_lo.is_finite() || !win_hi.is_finite() {
        return Err(ChError::BadPieceRange);
    }
    // Crest indices covering the window.
    let n_lo = math::floor(win_lo / period) as i64;
    let n_hi = math::ceil(win_hi / period) as i64;

    let mut segments = Vec::new();
    let mut glue_points = Vec::new();
    for n in n_lo..n_hi {
        let crest = n as f64 * period;
        let mut down = falling.clone();
        let (lo, _) = down.xi_range();
        down.shift_xi(crest - lo);
        let mut up = rising.clone();
        let (lo, _) = up.xi_range();
        up.shift_xi(crest + half - lo);
        segments.push(down);
        segments.push(up);
    }
    for i in 0..segments.len() - 1 {
        let (left, right) = (&segments[i], &segments[i + 1]);
        let verdict = check_glue_ch(left, right, s, tol)?;
        let kind = match verdict {
            ChGlueVerdict::Admissible(k) => k,
            ChGlueVerdict::Inadmissible(reason) => {
                return Err(ChError::InadmissiblePlan {
                    index: i,
                    reason: alloc::format!("{reason:?}"),
                })
            }
        };
        let (_, xi) = left.xi_range();
        glue_points.push(GluePoint {
            xi,
            w: left.end_value(End::Right),
            kind,
            left_slope: left.end_slope(End::Right),
            right_slope: right.end_slope(End::Left),
        });
    }
    Ok(Profile::from_segments(
        EquationTag::Ch,
        s,
        segments,
        glue_points,
        Some(period),
        tol,
    )?)
}

/// Stumpon from the compatible constants: cuspon halves with
/// b1 = 5 s^3 / 27 (double zero at -s/3, simple zero 5s/3) around a
/// constant plateau at level s of unit length.
fn stumpon_profile(s: f64, tol: &ToleranceConfig) -> Result<Profile, ChError> {
    let a = 0.5 * s * s;
    let b1 = 5.0 * s * s * s / 27.0;
    let w_min = -s / 3.0;
    let plateau = 1.0;

    let mut left = ch_arc(s, a, b1, w_min, s, Orientation::Increasing, tol)?;
    let (_, hi) = left.xi_range();
    left.shift_xi(-hi);
    let middle = ch_constant(s, s, 0.0, plateau);
    let mut right = ch_arc(s, a, b1, s, w_min, Orientation::Decreasing, tol)?;
    let (lo, _) = right.xi_range();
    right.shift_xi(plateau - lo);

    let segments = alloc::vec![left, middle, right];
    let mut glue_points = Vec::new();
    for i in 0..2 {
        let (l, r) = (&segments[i], &segments[i + 1]);
        match check_glue_ch(l, r, s, tol)? {
            ChGlueVerdict::Admissible(kind) => {
                let (_, xi) = l.xi_range();
                glue_points.push(GluePoint {
                    xi,
                    w: l.end_value(End::Right),
                    kind,
                    left_slope: l.end_slope(End::Right),
                    right_slope: r.end_slope(End::Left),
                });
            }
            ChGlueVerdict::Inadmissible(reason) => {
                return Err(ChError::InadmissiblePlan {
                    index: i,
                    reason: alloc::format!("{reason:?}"),
                })
            }
        }
    }
    Ok(Profile::from_segments(
        EquationTag::Ch,
        s,
        segments,
        glue_points,
        None,
        tol,
    )?)
}

/// Assemble a composite CH profile from an explicit plan sharing (s, a).
pub fn assemble_ch(
    s: f64,
    a: f64,
    plan: &ChPlan,
    tol: &ToleranceConfig,
) -> Result<Profile, ChError> {
    if plan.pieces.is_empty() {
        return Err(ChError::Profile(ProfileError::EmptyProfile));
    }
    let last = plan.pieces.len() - 1;
    let mut segments: Vec<Segment> = Vec::new();
    let mut cursor = 0.0_f64;
    for (i, piece) in plan.pieces.iter().enumerate() {
        let mut staged: Vec<Segment> = Vec::new();
        match *piece {
            ChPiece::Const { wbar, len } => {
                let (xi_lo, xi_hi) = match len {
                    Some(l) => (cursor, cursor + l),
                    None if i == 0 => (f64::NEG_INFINITY, cursor),
                    None if i == last => (cursor, f64::INFINITY),
                    None => return Err(ChError::MissingConstLength { index: i }),
                };
                staged.push(ch_constant(s, wbar, xi_lo, xi_hi));
            }
            ChPiece::Mono { b, orientation, w_from, w_to } => {
                let mut seg = ch_arc(s, a, b, w_from, w_to, orientation, tol)?;
                let (lo, hi) = seg.xi_range();
                if lo.is_finite() {
                    seg.shift_xi(cursor - lo);
                } else if i == 0 && hi.is_finite() {
                    seg.shift_xi(cursor - hi);
                } else if !lo.is_finite() && i != 0 {
                    return Err(ChError::InteriorTail { index: i });
                }
                if !seg.xi_range().1.is_finite() && i != last {
                    return Err(ChError::InteriorTail { index: i });
                }
                staged.push(seg);
            }
            ChPiece::ExpPeak { len_left, len_right } => {
                if !(len_left > 0.0 && len_right > 0.0) {
                    return Err(ChError::BadPieceRange);
                }
                let gamma0 = cursor + len_left;
                let (rise, fall) =
                    build_exp_peak(s, a, gamma0, (cursor, gamma0 + len_right))?;
                staged.push(rise);
                staged.push(fall);
            }
        }
        for seg in staged {
            let (_, hi) = seg.xi_range();
            if hi.is_finite() {
                cursor = hi;
            }
            segments.push(seg);
        }
    }

    let mut glue_points = Vec::new();
    for i in 0..segments.len().saturating_sub(1) {
        let (l, r) = (&segments[i], &segments[i + 1]);
        match check_glue_ch(l, r, s, tol) {
            Ok(ChGlueVerdict::Admissible(kind)) => {
                let (_, xi) = l.xi_range();
                glue_points.push(GluePoint {
                    xi,
                    w: l.end_value(End::Right),
                    kind,
                    left_slope: l.end_slope(End::Right),
                    right_slope: r.end_slope(End::Left),
                });
            }
            Ok(ChGlueVerdict::Inadmissible(reason)) => {
                return Err(ChError::InadmissiblePlan {
                    index: i,
                    reason: alloc::format!("{reason:?}"),
                })
            }
            Err(e) => {
                return Err(ChError::InadmissiblePlan {
                    index: i,
                    reason: alloc::format!("{e}"),
                })
            }
        }
    }
    Ok(Profile::from_segments(
        EquationTag::Ch,
        s,
        segments,
        glue_points,
        None,
        tol,
    )?)
}

/// Max relative residual of -s w^2 + w^3 + (s - w)/xi'(w)^2 = 2 a w + b on
/// an interior w-grid, with xi' taken from the stored interpolant.
pub fn segment_invariant_residual_ch(seg: &Segment, s: f64, grid_points: usize) -> f64 {
    let (mono, a, b) = match (&seg.kind, seg.equation) {
        (SegmentKind::Monotone(m), SegmentEq::Ch { a, b }) => (m, a, b),
        (SegmentKind::Constant { wbar, .. }, SegmentEq::Ch { a, b }) => {
            let w = *wbar;
            return (-s * w * w + w * w * w - 2.0 * a * w - b).abs() / (1.0 + b.abs());
        }
        _ => return f64::NAN,
    };
    let (w_lo, w_hi) = mono.w_range();
    let mut worst = 0.0_f64;
    for i in 1..=grid_points {
        let w = w_lo + (w_hi - w_lo) * i as f64 / (grid_points + 1) as f64;
        let (_, dxi_dw, _) = mono.table.eval_all(w);
        if dxi_dw == 0.0 {
            return f64::INFINITY;
        }
        let resid = (-s * w * w + w * w * w + (s - w) / (dxi_dw * dxi_dw)
            - 2.0 * a * w
            - b)
            .abs()
            / (1.0 + b.abs());
        worst = worst.max(resid);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nvw::{default_h_grid, holder_exponent};
    use crate::rng::SplitMix64;
    use alloc::vec;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn zeros_of(s: f64, a: f64, b: f64) -> Vec<(f64, u8)> {
        analyze_g(s, a, b).zeros
    }

    #[test]
    fn analyze_g_known_factorizations() {
        // g = -w^3 + w^2 = -w^2 (w - 1): double zero 0, simple zero 1.
        let z = zeros_of(1.0, 0.0, 0.0);
        assert_eq!(z.len(), 2);
        assert!((z[0].0 - 0.0).abs() < 1e-9 && z[0].1 == 2);
        assert!((z[1].0 - 1.0).abs() < 1e-9 && z[1].1 == 1);

        // g = -w^3 + w^2 - 2w: only the simple zero 0, and no critical
        // points (s^2 + 6a = -5).
        let an = analyze_g(1.0, -1.0, 0.0);
        assert!(!an.crit_exists);
        assert_eq!(an.zeros.len(), 1);
        assert!(an.zeros[0].0.abs() < 1e-12);

        // g = -w(w - 2)(w + 1): simple zeros {-1, 0, 2}.
        let z = zeros_of(1.0, 1.0, 0.0);
        let vals: Vec<f64> = z.iter().map(|p| p.0).collect();
        assert_eq!(z.iter().map(|p| p.1).collect::<Vec<_>>(), vec![1, 1, 1]);
        assert!((vals[0] + 1.0).abs() < 1e-9);
        assert!(vals[1].abs() < 1e-9);
        assert!((vals[2] - 2.0).abs() < 1e-9);

        // g = -(w - 2)(w - 1)(w + 1) for (2, 1/2, -2).
        let z = zeros_of(2.0, 0.5, -2.0);
        let vals: Vec<f64> = z.iter().map(|p| p.0).collect();
        assert!((vals[0] + 1.0).abs() < 1e-9);
        assert!((vals[1] - 1.0).abs() < 1e-9);
        assert!((vals[2] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn classify_known_triples() {
        match classify_ch(1.0, 0.0, 0.0).kind {
            ChKind::PeakonWithDecay { w_min } => assert!(w_min.abs() < 1e-9),
            k => panic!("expected peakon, got {k:?}"),
        }
        match classify_ch(1.0, 2.5, 3.0).kind {
            ChKind::CusponWithDecay { w_min, eta } => {
                assert!((w_min + 1.0).abs() < 1e-9);
                assert!((eta - 3.0).abs() < 1e-9);
            }
            k => panic!("expected cuspon, got {k:?}"),
        }
        match classify_ch(2.0, 0.5, -2.0).kind {
            ChKind::PeriodicPeakon { eta1, eta2 } => {
                assert!((eta1 + 1.0).abs() < 1e-9);
                assert!((eta2 - 1.0).abs() < 1e-9);
            }
            k => panic!("expected periodic peakon, got {k:?}"),
        }
        match classify_ch(1.0, 1.0, 0.0).kind {
            ChKind::PeriodicCuspon { eta1, eta2, eta3 } => {
                assert!((eta1 + 1.0).abs() < 1e-9);
                assert!(eta2.abs() < 1e-9);
                assert!((eta3 - 2.0).abs() < 1e-9);
            }
            k => panic!("expected periodic cuspon, got {k:?}"),
        }
        // Stumpon constants 2a = s^2, b = -s^3.
        assert!(matches!(
            classify_ch(1.0, 0.5, -1.0).kind,
            ChKind::StumponCompatible { .. }
        ));
        // Mirrored cuspon: double zero at the local maximum.
        match classify_ch(-1.0, 2.5, -3.0).kind {
            ChKind::MirrorCase { w_max, eta } => {
                assert!((w_max - 1.0).abs() < 1e-9);
                assert!((eta + 3.0).abs() < 1e-9);
            }
            k => panic!("expected mirror case, got {k:?}"),
        }
        // No critical points at all.
        assert_eq!(classify_ch(1.0, -1.0, 0.0).kind, ChKind::NoBoundedWave);
        // Three simple zeros {-3, 0, 2} with s = -1 in the unanalyzed
        // lower bracket.
        assert_eq!(
            classify_ch(-1.0, 3.0, 0.0).kind,
            ChKind::UnclassifiedBoundedDerivative
        );
    }

    #[test]
    fn mirror_map_swaps_kinds() {
        // (s, a, b) -> (-s, a, -b) maps g(w) -> -g(-w) and mirrors waves.
        assert!(matches!(
            classify_ch(-1.0, 0.0, 0.0).kind,
            ChKind::MirrorCase { .. }
        ));
        assert!(matches!(
            classify_ch(-1.0, 0.5, 1.0).kind,
            ChKind::StumponCompatible { .. }
        ));
        // The mirror of the periodic cuspon (1, 1, 0) has its cusps at the
        // troughs, which falls in the unanalyzed bracket.
        assert_eq!(
            classify_ch(-1.0, 1.0, 0.0).kind,
            ChKind::UnclassifiedBoundedDerivative
        );
        assert_eq!(classify_ch(-1.0, -1.0, 0.0).kind, ChKind::NoBoundedWave);
    }

    /// Random triples: every classification must be internally consistent
    /// with a direct evaluation of g.
    #[test]
    fn classification_consistent_on_random_triples() {
        let mut rng = SplitMix64::new(0x5eed_cafe);
        let mut seen_periodic = 0usize;
        let mut seen_none = 0usize;
        for _ in 0..1000 {
            let s = rng.uniform(-3.0, 3.0);
            let a = rng.uniform(-2.0, 3.0);
            let b = rng.uniform(-4.0, 4.0);
            let scale = 1.0 + s.abs() + a.abs() + b.abs();
            let t = classify_ch(s, a, b);
            for &(z, _) in &t.analysis.zeros {
                assert!(
                    g_eval(s, a, b, z).abs() <= 1e-5 * math::powi(scale, 3),
                    "root residual too large at ({s}, {a}, {b})"
                );
            }
            let kind = match &t.kind {
                ChKind::StumponCompatible { inner } => inner.as_ref(),
                k => k,
            };
            match *kind {
                ChKind::CusponWithDecay { w_min, eta } => {
                    assert!(w_min < s && s < eta);
                    assert!(g_eval(s, a, b, 0.5 * (w_min + s)) > 0.0);
                }
                ChKind::PeakonWithDecay { .. } | ChKind::PeriodicPeakon { .. } => {
                    assert!((2.0 * a * s + b).abs() <= 1e-5 * math::powi(scale, 3));
                }
                ChKind::PeriodicCuspon { eta2, eta3, .. } => {
                    assert!(eta2 < s && s < eta3);
                    assert!(g_eval(s, a, b, 0.5 * (eta2 + s)) > 0.0);
                    seen_periodic += 1;
                }
                ChKind::MirrorCase { w_max, eta } => {
                    assert!(eta <= s + 1e-7 && s < w_max);
                    let mid = 0.5 * (s + w_max);
                    assert!(g_eval(s, a, b, mid) / (s - mid) > 0.0);
                }
                ChKind::NoBoundedWave => seen_none += 1,
                _ => {}
            }
        }
        assert!(seen_periodic > 10, "periodic cuspons should be common");
        assert!(seen_none > 10);
    }

    /// Double-zero families built from the Vieta relations classify as the
    /// expected decaying kinds.
    #[test]
    fn classification_on_double_zero_families() {
        let mut rng = SplitMix64::new(0xd0b1e);
        for _ in 0..200 {
            let w_min = rng.uniform(-2.0, 2.0);
            let eta = w_min + rng.uniform(0.1, 3.0);
            // Double zero at w_min, simple zero at eta: s, a, b by Vieta.
            let s = eta + 2.0 * w_min;
            let a = 0.5 * (-2.0 * eta * w_min - w_min * w_min);
            let b = eta * w_min * w_min;
            let t = classify_ch(s, a, b);
            let kind = match t.kind {
                ChKind::StumponCompatible { inner } => *inner,
                k => k,
            };
            let tol8 = KIND_TOL * (1.0 + s.abs());
            if (s - eta).abs() <= tol8 {
                assert!(matches!(kind, ChKind::PeakonWithDecay { .. }), "{s} {a} {b}");
            } else if w_min < s && s < eta {
                assert!(matches!(kind, ChKind::CusponWithDecay { .. }), "{s} {a} {b}");
            } else {
                // The double zero may sit at the local maximum (mirror
                // family) or admit no bounded wave at all.
                assert!(
                    matches!(kind, ChKind::MirrorCase { .. } | ChKind::NoBoundedWave),
                    "{s} {a} {b} -> {kind:?}"
                );
            }
        }
    }

    #[test]
    fn peakon_profile_is_exact_exponential() {
        let t = tol();
        let kind = classify_ch(1.0, 0.0, 0.0).kind;
        let p = build_ch_profile(1.0, 0.0, 0.0, &kind, (-10.0, 10.0), &t).unwrap();
        assert_eq!(p.glue_points.len(), 1);
        assert_eq!(p.glue_points[0].kind, GlueKind::Peak);
        for &xi in &[-6.0, -2.0, -0.5, 0.0, 0.3, 1.7, 8.0] {
            let (w, _, _) = p.eval(xi).unwrap();
            let exact = math::exp(-xi.abs());
            assert!(
                (w - exact).abs() < 1e-12,
                "peakon value off at {xi}: {w} vs {exact}"
            );
        }
        // Crest slopes are +-(s - w_min) = +-1, exact in closed form.
        let (_, l, r) = p.eval(0.0).unwrap();
        assert!((l.finite().unwrap() - 1.0).abs() < 1e-12);
        assert!((r.finite().unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn cuspon_profile_rate_invariant_and_holder() {
        let t = tol();
        let (s, a, b) = (1.0, 2.5, 3.0);
        let kind = classify_ch(s, a, b).kind;
        let p = build_ch_profile(s, a, b, &kind, (-10.0, 10.0), &t).unwrap();
        assert_eq!(p.glue_points.len(), 1);
        assert_eq!(p.glue_points[0].kind, GlueKind::Cusp);
        let (w0, _, _) = p.eval(0.0).unwrap();
        assert!((w0 - s).abs() < 1e-9);

        // Decay rate lambda = sqrt((eta - w_min)/(s - w_min)) = sqrt(2):
        // least-squares fit of ln(w - w_min) over the tail.
        let w_min = -1.0;
        let lambda = math::sqrt(2.0);
        let (mut sx, mut sy, mut sxx, mut sxy, mut n) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for i in 0..40 {
            let xi = 4.0 + 0.2 * i as f64;
            let (w, _, _) = p.eval(xi).unwrap();
            let y = math::ln(w - w_min);
            sx += xi;
            sy += y;
            sxx += xi * xi;
            sxy += xi * y;
            n += 1.0;
        }
        let fitted = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
        assert!(
            (fitted - lambda).abs() < 0.01 * lambda,
            "fitted rate {fitted} vs {lambda}"
        );

        for seg in &p.segments {
            let r = segment_invariant_residual_ch(seg, s, 1000);
            assert!(r < 1e-6, "invariant residual {r:e}");
        }

        // The cusp is a 2/3-Hoelder point (w - w* ~ |xi|^{2/3} at a simple
        // zero of g at the crest line).
        let alpha = holder_exponent(&p, 0.0, &default_h_grid()[..8]);
        assert!(
            (0.60..=0.73).contains(&alpha),
            "cusp Hoelder exponent {alpha}"
        );
    }

    #[test]
    fn mirror_profile_decays_upward() {
        let t = tol();
        let (s, a, b) = (-1.0, 2.5, -3.0);
        let kind = classify_ch(s, a, b).kind;
        let p = build_ch_profile(s, a, b, &kind, (-10.0, 10.0), &t).unwrap();
        assert_eq!(p.glue_points[0].kind, GlueKind::Cusp);
        let (w0, _, _) = p.eval(0.0).unwrap();
        assert!((w0 - s).abs() < 1e-9);
        let (w_far, _, _) = p.eval(25.0).unwrap();
        assert!((w_far - 1.0).abs() < 1e-9, "should approach w_max = 1");
        for seg in &p.segments {
            assert!(segment_invariant_residual_ch(seg, s, 1000) < 1e-6);
        }
    }

    #[test]
    fn periodic_peakon_matches_cosh() {
        let t = tol();
        let (s, a, b) = (2.0, 0.5, -2.0);
        let kind = classify_ch(s, a, b).kind;
        let p = build_ch_profile(s, a, b, &kind, (-4.0, 4.0), &t).unwrap();
        // Exact period 2 arccosh(2) = 2 ln(2 + sqrt 3).
        let exact = 2.6339157938496334;
        let period = p.period.unwrap();
        assert!((period - exact).abs() < 1e-6, "period {period}");
        // One arch is w = cosh(|xi|) shifted so the crest w = 2 sits at 0.
        for &xi in &[0.0, 0.3, 0.9, 1.3] {
            let (w, _, _) = p.eval(xi).unwrap();
            let u = (xi.abs() % period).min(period - xi.abs() % period);
            let exact_w = 0.5 * (math::exp(exact / 2.0 - u) + math::exp(u - exact / 2.0));
            assert!((w - exact_w).abs() < 2e-6, "at {xi}: {w} vs {exact_w}");
        }
        // Crest glue is a peak, trough glue is smooth.
        let kinds: Vec<GlueKind> = p.glue_points.iter().map(|g| g.kind).collect();
        assert!(kinds.contains(&GlueKind::Peak));
        assert!(kinds.contains(&GlueKind::SmoothC1));
    }

    #[test]
    fn periodic_cuspon_period_and_glues() {
        let t = tol();
        let (s, a, b) = (1.0, 1.0, 0.0);
        let kind = classify_ch(s, a, b).kind;
        let p = build_ch_profile(s, a, b, &kind, (-3.0, 3.0), &t).unwrap();
        // Frozen half-arc integral for (1, 1, 0).
        let half = 1.0782578237498216;
        let period = p.period.unwrap();
        assert!((period - 2.0 * half).abs() < 1e-6, "period {period}");
        let kinds: Vec<GlueKind> = p.glue_points.iter().map(|g| g.kind).collect();
        assert!(kinds.contains(&GlueKind::Cusp));
        assert!(kinds.contains(&GlueKind::SmoothC1));
        for seg in &p.segments {
            assert!(segment_invariant_residual_ch(seg, s, 1000) < 1e-6);
        }
        // Troughs reach eta2 = 0 with bounded (vanishing) slope.
        let (w, l, _) = p.eval(half).unwrap();
        assert!(w.abs() < 1e-7, "trough value {w}");
        assert!(l.finite().unwrap().abs() < 1e-4);
    }

    #[test]
    fn stumpon_profile_structure() {
        let t = tol();
        let s = 1.0;
        let kind = classify_ch(s, 0.5, -1.0).kind;
        let p = build_ch_profile(s, 0.5, -1.0, &kind, (-5.0, 5.0), &t).unwrap();
        assert_eq!(p.segments.len(), 3);
        assert!(p.segments[1].is_constant());
        assert_eq!(p.glue_points.len(), 2);
        assert!(p
            .glue_points
            .iter()
            .all(|g| g.kind == GlueKind::ConstantJunction));
        // Plateau at level s on [0, 1].
        let (w, _, _) = p.eval(0.5).unwrap();
        assert!((w - s).abs() < 1e-12);
        // Outside the plateau the wave falls off toward -s/3.
        let (w, _, _) = p.eval(30.0).unwrap();
        assert!((w + s / 3.0).abs() < 1e-7);
    }

    #[test]
    fn glue_rejects_a_mismatch() {
        let t = tol();
        // Cuspon half with a = 2.5 against a cusp arc with a = 2.6.
        let left = ch_arc(1.0, 2.5, 3.0, -1.0, 1.0, Orientation::Increasing, &t).unwrap();
        let mut right = ch_arc(1.0, 2.6, 3.0, 1.0, 0.0, Orientation::Decreasing, &t).unwrap();
        let (_, l_hi) = left.xi_range();
        let (r_lo, _) = right.xi_range();
        right.shift_xi(l_hi - r_lo);
        match check_glue_ch(&left, &right, 1.0, &t).unwrap() {
            ChGlueVerdict::Inadmissible(ChGlueReason::AMismatch { a1, a2 }) => {
                assert!((a1 - 2.5).abs() < 1e-12 && (a2 - 2.6).abs() < 1e-12);
            }
            v => panic!("expected a-mismatch, got {v:?}"),
        }
    }

    #[test]
    fn glue_rejects_perturbed_constant_integrals() {
        // Stumpon junction: cuspon half against the plateau at level s. With
        // the forced constants it is admissible; nudging the stored b of the
        // constant by 1e-3 must flip the verdict.
        let t = tol();
        let s = 1.0;
        let a = 0.5 * s * s;
        let b1 = 5.0 * s * s * s / 27.0;
        let mut left = ch_arc(s, a, b1, -s / 3.0, s, Orientation::Increasing, &t).unwrap();
        let (_, hi) = left.xi_range();
        left.shift_xi(-hi);
        let plateau = ch_constant(s, s, 0.0, 1.0);
        assert!(matches!(
            check_glue_ch(&left, &plateau, s, &t).unwrap(),
            ChGlueVerdict::Admissible(GlueKind::ConstantJunction)
        ));
        let mut bent = plateau.clone();
        if let SegmentEq::Ch { b, .. } = &mut bent.equation {
            *b += 1e-3;
        }
        assert!(matches!(
            check_glue_ch(&left, &bent, s, &t).unwrap(),
            ChGlueVerdict::Inadmissible(ChGlueReason::ConstantIntegralsMismatch { .. })
        ));
    }

    #[test]
    fn glue_value_mismatch_errors() {
        let t = tol();
        let left = ch_arc(1.0, 2.5, 3.0, -1.0, 0.0, Orientation::Increasing, &t).unwrap();
        let right = ch_arc(1.0, 2.5, 3.0, 0.5, 1.0, Orientation::Increasing, &t).unwrap();
        assert!(matches!(
            check_glue_ch(&left, &right, 1.0, &t),
            Err(ChError::ValueMismatch { .. })
        ));
    }

    #[test]
    fn glue_interior_smooth_vs_b_mismatch() {
        let t = tol();
        // Same (a, b): splitting an arc at an interior value glues smoothly.
        let left = ch_arc(1.0, 2.5, 3.0, -0.9, 0.2, Orientation::Increasing, &t).unwrap();
        let mut right = ch_arc(1.0, 2.5, 3.0, 0.2, 1.0, Orientation::Increasing, &t).unwrap();
        let (_, l_hi) = left.xi_range();
        let (r_lo, _) = right.xi_range();
        right.shift_xi(l_hi - r_lo);
        assert_eq!(
            check_glue_ch(&left, &right, 1.0, &t).unwrap(),
            ChGlueVerdict::Admissible(GlueKind::SmoothC1)
        );
        // Different b at a non-crest value: bounded slopes cannot match.
        let mut other = ch_arc(1.0, 2.5, 3.5, 0.2, 1.0, Orientation::Increasing, &t).unwrap();
        let (o_lo, _) = other.xi_range();
        other.shift_xi(l_hi - o_lo);
        assert_eq!(
            check_glue_ch(&left, &other, 1.0, &t).unwrap(),
            ChGlueVerdict::Inadmissible(ChGlueReason::SlopeMismatch)
        );
    }

    #[test]
    fn exp_peak_pair_is_exact() {
        let (s, a) = (1.5, 0.5);
        let r = math::sqrt(s * s - 2.0 * a);
        // Monotonicity of each branch limits the interval to
        // |xi| < (1/2) ln(c1/c2) ~ 0.96.
        let (rise, fall) = build_exp_peak(s, a, 0.0, (-0.9, 0.9)).unwrap();
        // Values and slopes at the crest.
        assert!((rise.end_value(End::Right) - s).abs() < 1e-12);
        assert!((fall.end_value(End::Left) - s).abs() < 1e-12);
        assert!((rise.end_slope(End::Right).finite().unwrap() - r).abs() < 1e-12);
        assert!((fall.end_slope(End::Left).finite().unwrap() + r).abs() < 1e-12);
        // w_xixi = w exactly: check w(xi) +- on both sides via the identity
        // w(xi + h) + w(xi - h) = 2 cosh(h) w(xi) for solutions of w'' = w.
        let h = 0.15;
        let cosh_h = 0.5 * (math::exp(h) + math::exp(-h));
        for &xi in &[-0.7, -0.45, -0.2] {
            let (wm, _) = rise.eval(xi - h);
            let (w0, _) = rise.eval(xi);
            let (wp, _) = rise.eval(xi + h);
            assert!((wm + wp - 2.0 * cosh_h * w0).abs() < 1e-12);
        }
        // b = -2 a s is stored.
        match rise.equation {
            SegmentEq::Ch { a: aa, b } => {
                assert_eq!(aa, a);
                assert!((b + 2.0 * a * s).abs() < 1e-12);
            }
            _ => panic!(),
        }
        // The pair glues as a peak.
        assert_eq!(
            check_glue_ch(&rise, &fall, s, &tol()).unwrap(),
            ChGlueVerdict::Admissible(GlueKind::Peak)
        );
        // s^2 < 2a has no real slope.
        assert_eq!(
            build_exp_peak(1.0, 1.0, 0.0, (-1.0, 1.0)).unwrap_err(),
            ChError::ComplexSlope
        );
    }

    #[test]
    fn assemble_stumpon_plan() {
        let t = tol();
        let s = 1.0;
        let a = 0.5;
        let b1 = 5.0 / 27.0;
        let plan = ChPlan {
            pieces: vec![
                ChPiece::Mono {
                    b: b1,
                    orientation: Orientation::Increasing,
                    w_from: -s / 3.0,
                    w_to: s,
                },
                ChPiece::Const { wbar: s, len: Some(2.0) },
                ChPiece::Mono {
                    b: b1,
                    orientation: Orientation::Decreasing,
                    w_from: s,
                    w_to: -s / 3.0,
                },
            ],
        };
        let p = assemble_ch(s, a, &plan, &t).unwrap();
        assert_eq!(p.segments.len(), 3);
        assert!(p
            .glue_points
            .iter()
            .all(|g| g.kind == GlueKind::ConstantJunction));
        let (lo, hi) = p.xi_range();
        assert_eq!(lo, f64::NEG_INFINITY);
        assert_eq!(hi, f64::INFINITY);
        let (w, _, _) = p.eval(1.0).unwrap();
        assert!((w - s).abs() < 1e-12);
    }

    #[test]
    fn assemble_rejects_bad_constant_level() {
        let t = tol();
        // a = 0.6 != s^2/2: a constant at level s cannot join the cusp.
        let plan = ChPlan {
            pieces: vec![
                ChPiece::Mono {
                    b: 5.0 / 27.0,
                    orientation: Orientation::Increasing,
                    w_from: 0.0,
                    w_to: 1.0,
                },
                ChPiece::Const { wbar: 1.0, len: None },
            ],
        };
        match assemble_ch(1.0, 0.6, &plan, &t).unwrap_err() {
            ChError::InadmissiblePlan { index: 0, .. } => {}
            e => panic!("expected inadmissible plan, got {e}"),
        }
    }

    #[test]
    fn not_constructible_kinds_error() {
        let t = tol();
        assert_eq!(
            build_ch_profile(1.0, -1.0, 0.0, &ChKind::NoBoundedWave, (-1.0, 1.0), &t)
                .unwrap_err(),
            ChError::NotConstructible
        );
    }
}
