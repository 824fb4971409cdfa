//! Job-specification schema: the JSON document accepted by every
//! subcommand, plus its conversion into the core construction types.

use std::collections::BTreeMap;
use std::fmt;

use serde::Deserialize;
use waveform_core::ch::{ChPiece, ChPlan};
use waveform_core::coefficient::CoefficientFamily;
use waveform_core::nvw::{NvwPiece, NvwPlan};
use waveform_core::segment::Orientation;
use waveform_core::{CoefficientSpec, ToleranceConfig};

/// Errors turning a job document into runnable inputs. These are all
/// input errors (exit code 2).
#[derive(Debug)]
pub enum SpecError {
    Io(std::io::Error),
    Json(serde_json::Error),
    MissingField(&'static str),
    BadCoefficient(String),
    BadTolerance(String),
    BadPlan(String),
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecError::Io(e) => write!(f, "cannot read job spec: {e}"),
            SpecError::Json(e) => write!(f, "invalid job spec JSON: {e}"),
            SpecError::MissingField(name) => write!(f, "job spec is missing required field `{name}`"),
            SpecError::BadCoefficient(m) => write!(f, "invalid coefficient: {m}"),
            SpecError::BadTolerance(m) => write!(f, "invalid tolerance override: {m}"),
            SpecError::BadPlan(m) => write!(f, "invalid plan: {m}"),
        }
    }
}

impl std::error::Error for SpecError {}

/// Which equation the job targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Equation {
    Nvw,
    Ch,
}

/// Piece of a construction plan. For NVW pieces `k` is required on
/// monotone pieces; for CH pieces `b` is. `exp_peak` is CH-only.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PieceSpec {
    Const {
        w: f64,
        #[serde(default)]
        len: Option<f64>,
    },
    Mono {
        #[serde(default)]
        k: Option<f64>,
        #[serde(default)]
        b: Option<f64>,
        dir: Direction,
        from: f64,
        to: f64,
    },
    ExpPeak { len_left: f64, len_right: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
pub enum Direction {
    #[serde(rename = "inc")]
    Inc,
    #[serde(rename = "dec")]
    Dec,
}

impl Direction {
    fn orientation(self) -> Orientation {
        match self {
            Direction::Inc => Orientation::Increasing,
            Direction::Dec => Orientation::Decreasing,
        }
    }
}

/// An ordered gluing plan.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanSpec {
    pub pieces: Vec<PieceSpec>,
}

/// Output sampling grid.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub xi_lo: f64,
    pub xi_hi: f64,
    pub n: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Where and how to write sampled profiles.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub format: OutputFormat,
    pub path: String,
    pub grid: GridSpec,
}

/// Parameter ranges for the `sweep` subcommand (CH only).
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub s: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// The job document. Unknown keys are rejected so typos fail loudly.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub equation: Equation,
    pub wave_speed: f64,
    /// NVW coefficient family; required when `equation` is "nvw".
    #[serde(default)]
    pub coefficient: Option<CoefficientFamily>,
    /// CH first integral; required when `equation` is "ch".
    #[serde(default)]
    pub a: Option<f64>,
    /// CH second integral; required when `equation` is "ch".
    #[serde(default)]
    pub b: Option<f64>,
    #[serde(default)]
    pub plan: Option<PlanSpec>,
    #[serde(default)]
    pub tolerances: Option<BTreeMap<String, f64>>,
    #[serde(default)]
    pub output: Option<OutputSpec>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
}

impl JobSpec {
    pub fn load(path: &std::path::Path) -> Result<JobSpec, SpecError> {
        let text = std::fs::read_to_string(path).map_err(SpecError::Io)?;
        serde_json::from_str(&text).map_err(SpecError::Json)
    }

    /// Tolerances from the document plus `--tol KEY=VAL` overrides, which
    /// win over the document.
    pub fn tolerances(&self, overrides: &[String]) -> Result<ToleranceConfig, SpecError> {
        let mut tol = ToleranceConfig::default();
        if let Some(map) = &self.tolerances {
            for (key, value) in map {
                if !tol.set_by_key(key, *value) {
                    return Err(SpecError::BadTolerance(format!("unknown key `{key}`")));
                }
            }
        }
        for item in overrides {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| SpecError::BadTolerance(format!("`{item}` is not KEY=VAL")))?;
            let value: f64 = value
                .parse()
                .map_err(|_| SpecError::BadTolerance(format!("`{value}` is not a number")))?;
            if !tol.set_by_key(key, value) {
                return Err(SpecError::BadTolerance(format!("unknown key `{key}`")));
            }
        }
        if !tol.is_valid() {
            return Err(SpecError::BadTolerance(
                "all tolerances must be strictly positive".into(),
            ));
        }
        Ok(tol)
    }

    pub fn coefficient_spec(&self) -> Result<CoefficientSpec, SpecError> {
        let family = self
            .coefficient
            .clone()
            .ok_or(SpecError::MissingField("coefficient"))?;
        CoefficientSpec::from_family(family)
            .map_err(|e| SpecError::BadCoefficient(e.to_string()))
    }

    pub fn ch_params(&self) -> Result<(f64, f64), SpecError> {
        let a = self.a.ok_or(SpecError::MissingField("a"))?;
        let b = self.b.ok_or(SpecError::MissingField("b"))?;
        Ok((a, b))
    }

    pub fn nvw_plan(&self) -> Result<NvwPlan, SpecError> {
        let plan = self.plan.as_ref().ok_or(SpecError::MissingField("plan"))?;
        let mut pieces = Vec::with_capacity(plan.pieces.len());
        for (i, piece) in plan.pieces.iter().enumerate() {
            pieces.push(match piece {
                PieceSpec::Const { w, len } => NvwPiece::Const { wbar: *w, len: *len },
                PieceSpec::Mono { k, dir, from, to, .. } => NvwPiece::Mono {
                    k: k.ok_or_else(|| {
                        SpecError::BadPlan(format!("piece {i}: nvw mono pieces need `k`"))
                    })?,
                    orientation: dir.orientation(),
                    w_from: *from,
                    w_to: *to,
                },
                PieceSpec::ExpPeak { .. } => {
                    return Err(SpecError::BadPlan(format!(
                        "piece {i}: exp_peak pieces are CH-only"
                    )))
                }
            });
        }
        Ok(NvwPlan { pieces })
    }

    pub fn ch_plan(&self) -> Result<ChPlan, SpecError> {
        let plan = self.plan.as_ref().ok_or(SpecError::MissingField("plan"))?;
        let mut pieces = Vec::with_capacity(plan.pieces.len());
        for (i, piece) in plan.pieces.iter().enumerate() {
            pieces.push(match piece {
                PieceSpec::Const { w, len } => ChPiece::Const { wbar: *w, len: *len },
                PieceSpec::Mono { b, dir, from, to, .. } => ChPiece::Mono {
                    b: b.ok_or_else(|| {
                        SpecError::BadPlan(format!("piece {i}: ch mono pieces need `b`"))
                    })?,
                    orientation: dir.orientation(),
                    w_from: *from,
                    w_to: *to,
                },
                PieceSpec::ExpPeak { len_left, len_right } => ChPiece::ExpPeak {
                    len_left: *len_left,
                    len_right: *len_right,
                },
            });
        }
        Ok(ChPlan { pieces })
    }
}
