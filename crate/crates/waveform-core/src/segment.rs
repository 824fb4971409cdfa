//! One classical traveling-wave piece.
//!
//! Monotone pieces are stored as xi(w) tables: the slope blow-up at a
//! singular gluing value becomes a regular zero of dxi/dw, so nothing
//! infinite is ever tabulated. Constant pieces and analytic exponential
//! extensions (decay tails, peakon arcs) are stored in closed form.

use crate::math;
use crate::pchip::MonotoneTable;

/// Direction of w as xi increases.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Orientation {
    Increasing,
    Decreasing,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Increasing => 1.0,
            Orientation::Decreasing => -1.0,
        }
    }
}

/// First-integral constants identifying the local classical solution.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SegmentEq {
    /// w_xi^2 (s^2 - c^2(w)) = k.
    Nvw { k: f64 },
    /// -s w^2 + w^3 + w_xi^2 (s - w) = 2 a w + b.
    Ch { a: f64, b: f64 },
}

/// What happens to w_xi at a segment endpoint.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum EndpointFlag {
    Regular,
    /// One-sided slope is unbounded (dxi/dw has a zero here).
    SingularDerivative,
    /// The profile approaches `w_limit` exponentially over infinite
    /// xi-extent with the given rate.
    DecayTail { rate: f64, w_limit: f64 },
}

/// A one-sided slope that may be unbounded. Infinities are explicit flags;
/// they never enter floating-point arithmetic in quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ExtendedSlope {
    Finite(f64),
    PlusInf,
    MinusInf,
}

impl ExtendedSlope {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedSlope::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedSlope::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// Sign of the slope: -1, 0, or 1.
    pub fn signum(self) -> f64 {
        match self {
            ExtendedSlope::Finite(v) => {
                if v == 0.0 {
                    0.0
                } else {
                    v.signum()
                }
            }
            ExtendedSlope::PlusInf => 1.0,
            ExtendedSlope::MinusInf => -1.0,
        }
    }
}

/// Closed exponential form
/// w(xi) = offset + c1 e^{xi - xi_ref} + c2 e^{-(xi - xi_ref)}
/// carried by peakon-type arcs: solutions of w_xixi = w (offset 0) or of
/// w_xixi = w - offset (decaying peakon halves around a nonzero level).
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExpForm {
    pub c1: f64,
    pub c2: f64,
    pub xi_ref: f64,
    pub offset: f64,
}

impl ExpForm {
    pub fn eval(&self, xi: f64) -> (f64, f64) {
        let u = xi - self.xi_ref;
        let ep = math::exp(u);
        let em = math::exp(-u);
        (
            self.offset + self.c1 * ep + self.c2 * em,
            self.c1 * ep - self.c2 * em,
        )
    }
}

/// A strictly monotone classical piece stored in the w-parametrization.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MonotoneSegment {
    pub orientation: Orientation,
    /// xi(w) over ascending w; xi values ascend for Increasing orientation
    /// and descend for Decreasing.
    pub table: MonotoneTable,
    /// Endpoint behaviour at the low-w end of the table.
    pub lo_flag: EndpointFlag,
    /// Endpoint behaviour at the high-w end of the table.
    pub hi_flag: EndpointFlag,
    /// Closed form, when the piece is an exponential peakon arc.
    pub exp_form: Option<ExpForm>,
}

/// Either a constant piece or a monotone piece.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SegmentKind {
    Constant {
        wbar: f64,
        /// May be -inf for an unbounded left plateau.
        xi_lo: f64,
        /// May be +inf for an unbounded right plateau.
        xi_hi: f64,
    },
    Monotone(MonotoneSegment),
}

/// One classical piece of a composite profile.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Segment {
    pub equation: SegmentEq,
    pub kind: SegmentKind,
}

/// Which xi-side end of a segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum End {
    Left,
    Right,
}

impl Segment {
    pub fn constant(equation: SegmentEq, wbar: f64, xi_lo: f64, xi_hi: f64) -> Self {
        Segment {
            equation,
            kind: SegmentKind::Constant { wbar, xi_lo, xi_hi },
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, SegmentKind::Constant { .. })
    }

    pub fn as_monotone(&self) -> Option<&MonotoneSegment> {
        match &self.kind {
            SegmentKind::Monotone(m) => Some(m),
            _ => None,
        }
    }

    /// Covered xi-interval; ends may be infinite for plateaus and tails.
    pub fn xi_range(&self) -> (f64, f64) {
        match &self.kind {
            SegmentKind::Constant { xi_lo, xi_hi, .. } => (*xi_lo, *xi_hi),
            SegmentKind::Monotone(m) => m.xi_range(),
        }
    }

    /// w at the given xi-side end (the limit value for decay tails).
    pub fn end_value(&self, end: End) -> f64 {
        match &self.kind {
            SegmentKind::Constant { wbar, .. } => *wbar,
            SegmentKind::Monotone(m) => m.end_value(end),
        }
    }

    /// One-sided slope at the given xi-side end.
    pub fn end_slope(&self, end: End) -> ExtendedSlope {
        match &self.kind {
            SegmentKind::Constant { .. } => ExtendedSlope::Finite(0.0),
            SegmentKind::Monotone(m) => m.end_slope(end),
        }
    }

    /// (w, w_xi) at xi, which must lie inside this segment's range.
    pub fn eval(&self, xi: f64) -> (f64, ExtendedSlope) {
        match &self.kind {
            SegmentKind::Constant { wbar, .. } => (*wbar, ExtendedSlope::Finite(0.0)),
            SegmentKind::Monotone(m) => m.eval(xi),
        }
    }

    /// Translate the segment along the xi axis.
    pub fn shift_xi(&mut self, dxi: f64) {
        match &mut self.kind {
            SegmentKind::Constant { xi_lo, xi_hi, .. } => {
                *xi_lo += dxi;
                *xi_hi += dxi;
            }
            SegmentKind::Monotone(m) => {
                m.table.shift_y(dxi);
                if let Some(form) = &mut m.exp_form {
                    form.xi_ref += dxi;
                }
            }
        }
    }

    /// True if xi falls in an analytic decay-tail extension.
    pub fn in_tail(&self, xi: f64) -> bool {
        match &self.kind {
            SegmentKind::Constant { .. } => false,
            SegmentKind::Monotone(m) => m.tail_side(xi).is_some(),
        }
    }
}

impl MonotoneSegment {
    /// w endpoints of the table (ascending).
    pub fn w_range(&self) -> (f64, f64) {
        self.table.x_range()
    }

    fn has_tail(flag: &EndpointFlag) -> Option<(f64, f64)> {
        match flag {
            EndpointFlag::DecayTail { rate, w_limit } => Some((*rate, *w_limit)),
            _ => None,
        }
    }

    pub fn xi_range(&self) -> (f64, f64) {
        let (xi_at_wlo, xi_at_whi) = self.table.y_ends();
        let (mut lo, mut hi) = match self.orientation {
            Orientation::Increasing => (xi_at_wlo, xi_at_whi),
            Orientation::Decreasing => (xi_at_whi, xi_at_wlo),
        };
        // A decay tail extends the xi-side on which its w-end sits.
        let lo_tail = Self::has_tail(&self.lo_flag).is_some();
        let hi_tail = Self::has_tail(&self.hi_flag).is_some();
        match self.orientation {
            Orientation::Increasing => {
                if lo_tail {
                    lo = f64::NEG_INFINITY;
                }
                if hi_tail {
                    hi = f64::INFINITY;
                }
            }
            Orientation::Decreasing => {
                if lo_tail {
                    hi = f64::INFINITY;
                }
                if hi_tail {
                    lo = f64::NEG_INFINITY;
                }
            }
        }
        (lo, hi)
    }

    /// Which w-end flag owns the tail containing xi, if any.
    /// Returns (flag-at-low-w?, rate, w_limit, edge_w, edge_xi).
    fn tail_side(&self, xi: f64) -> Option<(bool, f64, f64, f64, f64)> {
        let (xi_at_wlo, xi_at_whi) = self.table.y_ends();
        let (w_lo, w_hi) = self.table.x_range();
        if let Some((rate, w_limit)) = Self::has_tail(&self.lo_flag) {
            let beyond = match self.orientation {
                Orientation::Increasing => xi < xi_at_wlo,
                Orientation::Decreasing => xi > xi_at_wlo,
            };
            if beyond {
                return Some((true, rate, w_limit, w_lo, xi_at_wlo));
            }
        }
        if let Some((rate, w_limit)) = Self::has_tail(&self.hi_flag) {
            let beyond = match self.orientation {
                Orientation::Increasing => xi > xi_at_whi,
                Orientation::Decreasing => xi < xi_at_whi,
            };
            if beyond {
                return Some((false, rate, w_limit, w_hi, xi_at_whi));
            }
        }
        None
    }

    pub fn end_value(&self, end: End) -> f64 {
        let (w_lo, w_hi) = self.table.x_range();
        let (w_near, flag) = match (end, self.orientation) {
            (End::Left, Orientation::Increasing) | (End::Right, Orientation::Decreasing) => {
                (w_lo, &self.lo_flag)
            }
            _ => (w_hi, &self.hi_flag),
        };
        if let Some((_, w_limit)) = Self::has_tail(flag) {
            w_limit
        } else {
            w_near
        }
    }

    pub fn end_slope(&self, end: End) -> ExtendedSlope {
        let flag = match (end, self.orientation) {
            (End::Left, Orientation::Increasing) | (End::Right, Orientation::Decreasing) => {
                &self.lo_flag
            }
            _ => &self.hi_flag,
        };
        match flag {
            EndpointFlag::SingularDerivative => match self.orientation {
                Orientation::Increasing => ExtendedSlope::PlusInf,
                Orientation::Decreasing => ExtendedSlope::MinusInf,
            },
            EndpointFlag::DecayTail { .. } => ExtendedSlope::Finite(0.0),
            EndpointFlag::Regular => {
                let (w_lo, w_hi) = self.table.x_range();
                let w_end = match (end, self.orientation) {
                    (End::Left, Orientation::Increasing) | (End::Right, Orientation::Decreasing) => w_lo,
                    _ => w_hi,
                };
                self.slope_at_w(w_end)
            }
        }
    }

    /// w_xi = 1 / (dxi/dw) from the stored interpolant (or the closed
    /// exponential form when the piece carries one).
    pub fn slope_at_w(&self, w: f64) -> ExtendedSlope {
        if let Some(form) = &self.exp_form {
            let xi = self.table.eval(w);
            let (_, slope) = form.eval(xi);
            return ExtendedSlope::Finite(slope);
        }
        let (_, dxi_dw, _) = self.table.eval_all(w);
        if dxi_dw == 0.0 {
            match self.orientation {
                Orientation::Increasing => ExtendedSlope::PlusInf,
                Orientation::Decreasing => ExtendedSlope::MinusInf,
            }
        } else {
            ExtendedSlope::Finite(1.0 / dxi_dw)
        }
    }

    pub fn eval(&self, xi: f64) -> (f64, ExtendedSlope) {
        if let Some((_at_lo, rate, w_limit, edge_w, edge_xi)) = self.tail_side(xi) {
            // Exponential approach to the limit beyond the tabulated edge.
            let dist = (xi - edge_xi).abs();
            let dev = (edge_w - w_limit) * math::exp(-rate * dist);
            let w = w_limit + dev;
            // Slope sign follows the orientation and which side we are on.
            let toward_limit = -rate * dev;
            let slope = if xi < edge_xi { -toward_limit } else { toward_limit };
            return (w, ExtendedSlope::Finite(slope));
        }
        if let Some(form) = &self.exp_form {
            let (w, slope) = form.eval(xi);
            return (w, ExtendedSlope::Finite(slope));
        }
        let w = self.table.invert(xi);
        (w, self.slope_at_w(w))
    }
}
