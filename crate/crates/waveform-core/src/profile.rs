//! Composite traveling-wave profiles: ordered classical pieces joined at
//! glue points, with one-sided slope bookkeeping at every junction.

use alloc::vec::Vec;

use crate::segment::{End, ExtendedSlope, Segment};
use crate::tol::ToleranceConfig;

/// Which equation the profile solves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum EquationTag {
    Nvw,
    Ch,
}

/// The nature of a junction between two classical pieces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum GlueKind {
    /// Both one-sided slopes unbounded with opposite signs.
    Cusp,
    /// Both one-sided slopes unbounded with the same sign.
    InflectionSingular,
    /// A constant piece meets a non-constant piece.
    ConstantJunction,
    /// Finite one-sided slopes of opposite sign and equal magnitude.
    Peak,
    /// One-sided slopes agree and are finite.
    SmoothC1,
}

/// One junction of a composite profile.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GluePoint {
    pub xi: f64,
    pub w: f64,
    pub kind: GlueKind,
    pub left_slope: ExtendedSlope,
    pub right_slope: ExtendedSlope,
}

/// Errors from profile assembly or evaluation.
#[derive(Clone, Debug, PartialEq)]
pub enum ProfileError {
    EmptyProfile,
    /// Adjacent segments do not abut in xi or disagree in w at the seam.
    DiscontinuousAssembly { index: usize, gap: f64 },
    /// Evaluation point lies outside the covered xi-interval.
    OutOfDomain { xi: f64 },
}

impl core::fmt::Display for ProfileError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ProfileError::EmptyProfile => f.write_str("profile has no segments"),
            ProfileError::DiscontinuousAssembly { index, gap } => {
                write!(f, "segments {index} and {} do not join (gap {gap:e})", index + 1)
            }
            ProfileError::OutOfDomain { xi } => write!(f, "xi = {xi} outside profile domain"),
        }
    }
}

/// Flag attached to a sampled point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SampleFlag {
    Ok,
    /// At (or one-sided against) a point of unbounded slope.
    Singular,
    /// Inside an analytic decay-tail extension.
    Tail,
}

/// One row of a sampled profile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleRow {
    pub xi: f64,
    pub w: f64,
    pub slope: ExtendedSlope,
    pub flag: SampleFlag,
}

/// A glued traveling-wave profile.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Profile {
    pub equation: EquationTag,
    /// Wave speed.
    pub s: f64,
    /// Pieces in ascending xi order, abutting exactly.
    pub segments: Vec<Segment>,
    /// Junctions between consecutive segments (len = segments.len() - 1).
    pub glue_points: Vec<GluePoint>,
    /// Spatial period for periodic profiles; None for waves with decay or
    /// unbounded plateaus.
    pub period: Option<f64>,
}

impl Profile {
    /// Assemble with continuity checks: consecutive segments must abut in xi
    /// and agree in w at each seam within `tol.glue_value_tol`.
    pub fn from_segments(
        equation: EquationTag,
        s: f64,
        segments: Vec<Segment>,
        glue_points: Vec<GluePoint>,
        period: Option<f64>,
        tol: &ToleranceConfig,
    ) -> Result<Self, ProfileError> {
        if segments.is_empty() {
            return Err(ProfileError::EmptyProfile);
        }
        for i in 0..segments.len() - 1 {
            let (_, hi) = segments[i].xi_range();
            let (lo, _) = segments[i + 1].xi_range();
            let xi_gap = (hi - lo).abs();
            let w_gap =
                (segments[i].end_value(End::Right) - segments[i + 1].end_value(End::Left)).abs();
            let scale = 1.0 + hi.abs();
            if !(xi_gap <= tol.glue_value_tol * scale) || !(w_gap <= tol.glue_value_tol * scale) {
                return Err(ProfileError::DiscontinuousAssembly {
                    index: i,
                    gap: xi_gap.max(w_gap),
                });
            }
        }
        Ok(Profile {
            equation,
            s,
            segments,
            glue_points,
            period,
        })
    }

    /// Assemble without any continuity or admissibility checks. Exists so
    /// that deliberately broken profiles can be fed to the verifier.
    pub fn assemble_unchecked(
        equation: EquationTag,
        s: f64,
        segments: Vec<Segment>,
        glue_points: Vec<GluePoint>,
        period: Option<f64>,
    ) -> Self {
        Profile {
            equation,
            s,
            segments,
            glue_points,
            period,
        }
    }

    /// Covered xi-interval.
    pub fn xi_range(&self) -> (f64, f64) {
        let (lo, _) = self.segments[0].xi_range();
        let (_, hi) = self.segments[self.segments.len() - 1].xi_range();
        (lo, hi)
    }

    /// Index of the segment covering xi, favoring the left segment at seams.
    fn segment_index(&self, xi: f64) -> Result<usize, ProfileError> {
        let (lo, hi) = self.xi_range();
        if xi < lo || xi > hi {
            return Err(ProfileError::OutOfDomain { xi });
        }
        // Seams are the right ends of all but the last segment.
        let mut i = 0;
        while i + 1 < self.segments.len() {
            let (_, seg_hi) = self.segments[i].xi_range();
            if xi <= seg_hi {
                return Ok(i);
            }
            i += 1;
        }
        Ok(i)
    }

    /// (w, left slope, right slope) at xi. The two slopes differ only at
    /// glue points.
    pub fn eval(&self, xi: f64) -> Result<(f64, ExtendedSlope, ExtendedSlope), ProfileError> {
        let i = self.segment_index(xi)?;
        let (_, seg_hi) = self.segments[i].xi_range();
        let (seg_lo, _) = self.segments[i].xi_range();
        if xi == seg_hi && i + 1 < self.segments.len() {
            let w = self.segments[i].end_value(End::Right);
            let left = self.segments[i].end_slope(End::Right);
            let right = self.segments[i + 1].end_slope(End::Left);
            return Ok((w, left, right));
        }
        if xi == seg_lo && i > 0 {
            // Only reachable for the leftmost point of the domain.
            let w = self.segments[i].end_value(End::Left);
            let sl = self.segments[i].end_slope(End::Left);
            return Ok((w, sl, sl));
        }
        let (w, slope) = self.segments[i].eval(xi);
        Ok((w, slope, slope))
    }

    /// Sample the profile on the given xi grid.
    pub fn sample(&self, grid: &[f64]) -> Result<Vec<SampleRow>, ProfileError> {
        let mut rows = Vec::with_capacity(grid.len());
        for &xi in grid {
            let i = self.segment_index(xi)?;
            let (w, left, right) = self.eval(xi)?;
            let (slope, flag) = if !left.is_finite() || !right.is_finite() {
                (left, SampleFlag::Singular)
            } else if self.segments[i].in_tail(xi) {
                (left, SampleFlag::Tail)
            } else {
                (left, SampleFlag::Ok)
            };
            rows.push(SampleRow { xi, w, slope, flag });
        }
        Ok(rows)
    }
}

/// Classify a junction from its one-sided slopes and neighbor kinds.
pub fn classify_glue(
    left_constant: bool,
    right_constant: bool,
    left_slope: ExtendedSlope,
    right_slope: ExtendedSlope,
) -> GlueKind {
    if left_constant != right_constant {
        return GlueKind::ConstantJunction;
    }
    match (left_slope, right_slope) {
        (ExtendedSlope::Finite(a), ExtendedSlope::Finite(b)) => {
            if a * b < 0.0 {
                GlueKind::Peak
            } else {
                GlueKind::SmoothC1
            }
        }
        (ExtendedSlope::PlusInf, ExtendedSlope::MinusInf)
        | (ExtendedSlope::MinusInf, ExtendedSlope::PlusInf) => GlueKind::Cusp,
        (ExtendedSlope::PlusInf, ExtendedSlope::PlusInf)
        | (ExtendedSlope::MinusInf, ExtendedSlope::MinusInf) => GlueKind::InflectionSingular,
        // One side unbounded, the other finite: only arises against a
        // constant piece, handled above; fall back to cusp-like labeling.
        _ => GlueKind::InflectionSingular,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pchip::MonotoneTable;
    use crate::segment::{EndpointFlag, MonotoneSegment, Orientation, SegmentEq, SegmentKind};
    use alloc::vec;

    fn line_segment(xi0: f64, xi1: f64, w0: f64, w1: f64) -> Segment {
        // Linear w(xi); store as xi(w) with constant slope.
        let slope = (xi1 - xi0) / (w1 - w0);
        let (w_lo, w_hi, y_lo, y_hi) = if w1 > w0 {
            (w0, w1, xi0, xi1)
        } else {
            (w1, w0, xi1, xi0)
        };
        let table = MonotoneTable::with_slopes(
            vec![w_lo, w_hi],
            vec![y_lo, y_hi],
            vec![slope, slope],
        )
        .unwrap();
        Segment {
            equation: SegmentEq::Nvw { k: 0.0 },
            kind: SegmentKind::Monotone(MonotoneSegment {
                orientation: if w1 > w0 {
                    Orientation::Increasing
                } else {
                    Orientation::Decreasing
                },
                table,
                lo_flag: EndpointFlag::Regular,
                hi_flag: EndpointFlag::Regular,
                exp_form: None,
            }),
        }
    }

    fn tent() -> Profile {
        let up = line_segment(-1.0, 0.0, 0.0, 1.0);
        let down = line_segment(0.0, 1.0, 1.0, 0.0);
        let glue = GluePoint {
            xi: 0.0,
            w: 1.0,
            kind: GlueKind::Peak,
            left_slope: ExtendedSlope::Finite(1.0),
            right_slope: ExtendedSlope::Finite(-1.0),
        };
        Profile::from_segments(
            EquationTag::Nvw,
            2.0,
            vec![up, down],
            vec![glue],
            None,
            &ToleranceConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn eval_interior_and_seam() {
        let p = tent();
        let (w, l, r) = p.eval(-0.5).unwrap();
        assert!((w - 0.5).abs() < 1e-13);
        assert_eq!(l, r);
        let (w, l, r) = p.eval(0.0).unwrap();
        assert!((w - 1.0).abs() < 1e-13);
        assert_eq!(l, ExtendedSlope::Finite(1.0));
        assert_eq!(r, ExtendedSlope::Finite(-1.0));
        assert!(matches!(p.eval(2.0), Err(ProfileError::OutOfDomain { .. })));
    }

    #[test]
    fn discontinuous_assembly_rejected() {
        let up = line_segment(-1.0, 0.0, 0.0, 1.0);
        let far = line_segment(0.5, 1.0, 1.0, 0.0);
        let err = Profile::from_segments(
            EquationTag::Nvw,
            2.0,
            vec![up, far],
            vec![],
            None,
            &ToleranceConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, ProfileError::DiscontinuousAssembly { index: 0, .. }));
    }

    #[test]
    fn glue_classification() {
        use ExtendedSlope::*;
        assert_eq!(classify_glue(false, false, PlusInf, MinusInf), GlueKind::Cusp);
        assert_eq!(
            classify_glue(false, false, PlusInf, PlusInf),
            GlueKind::InflectionSingular
        );
        assert_eq!(
            classify_glue(true, false, Finite(0.0), MinusInf),
            GlueKind::ConstantJunction
        );
        assert_eq!(
            classify_glue(false, false, Finite(2.0), Finite(-2.0)),
            GlueKind::Peak
        );
        assert_eq!(
            classify_glue(false, false, Finite(1.0), Finite(1.0)),
            GlueKind::SmoothC1
        );
    }

    #[test]
    fn sampling_flags() {
        let p = tent();
        let rows = p.sample(&[-1.0, -0.25, 0.0, 0.75]).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.flag == SampleFlag::Ok));
        assert!((rows[3].w - 0.25).abs() < 1e-13);
    }
}
