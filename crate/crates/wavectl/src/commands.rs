//! Subcommand implementations. Every command returns a process exit code:
//! 0 success / admissible, 1 inadmissible profile or failed verification,
//! 2 input error, 3 numerical failure.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;
use serde_json::json;
use waveform_core::ch::{self, ChError, ChKind, ChTaxonomy};
use waveform_core::nvw::{self, NvwError};
use waveform_core::profile::{ProfileError, SampleFlag, SampleRow};
use waveform_core::verify::{self, EquationParams, ResidualReport};
use waveform_core::{Profile, ToleranceConfig};

use crate::jobspec::{Equation, JobSpec, OutputFormat, OutputSpec, SpecError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INADMISSIBLE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Verification passes when every normalized residual sits below this.
pub const VERIFY_THRESHOLD: f64 = 1e-5;

/// A command failure carrying the exit code to report.
pub struct CmdError {
    pub code: i32,
    pub message: String,
}

impl CmdError {
    fn input(message: String) -> CmdError {
        CmdError { code: EXIT_INPUT, message }
    }
}

impl From<SpecError> for CmdError {
    fn from(e: SpecError) -> CmdError {
        CmdError::input(e.to_string())
    }
}

impl From<std::io::Error> for CmdError {
    fn from(e: std::io::Error) -> CmdError {
        CmdError { code: EXIT_NUMERICAL, message: format!("i/o failure: {e}") }
    }
}

fn ch_error_code(e: &ChError) -> i32 {
    match e {
        ChError::NotConstructible
        | ChError::ComplexSlope
        | ChError::ValueMismatch { .. }
        | ChError::SignViolation { .. }
        | ChError::InadmissiblePlan { .. }
        | ChError::InteriorTail { .. } => EXIT_INADMISSIBLE,
        ChError::BadPieceRange | ChError::MissingConstLength { .. } => EXIT_INPUT,
        ChError::Profile(ProfileError::EmptyProfile) => EXIT_INPUT,
        ChError::Table(_) | ChError::Profile(_) => EXIT_NUMERICAL,
    }
}

fn nvw_error_code(e: &NvwError) -> i32 {
    match e {
        NvwError::NotInteriorBand
        | NvwError::NoCandidates
        | NvwError::DegenerateEverywhere
        | NvwError::SignViolation { .. }
        | NvwError::DegenerateEndpoint { .. }
        | NvwError::ValueMismatch { .. }
        | NvwError::InadmissiblePlan { .. }
        | NvwError::DivergentIntegral { .. } => EXIT_INADMISSIBLE,
        NvwError::ZeroK | NvwError::BadPieceRange | NvwError::MissingConstLength { .. } => {
            EXIT_INPUT
        }
        NvwError::Profile(ProfileError::EmptyProfile) => EXIT_INPUT,
        NvwError::Table(_) | NvwError::Profile(_) => EXIT_NUMERICAL,
    }
}

fn from_ch(e: ChError) -> CmdError {
    CmdError { code: ch_error_code(&e), message: format!("ch construction failed: {e}") }
}

fn from_nvw(e: NvwError) -> CmdError {
    CmdError { code: nvw_error_code(&e), message: format!("nvw construction failed: {e}") }
}

fn kind_name(kind: &ChKind) -> &'static str {
    match kind {
        ChKind::NoBoundedWave => "NoBoundedWave",
        ChKind::CusponWithDecay { .. } => "CusponWithDecay",
        ChKind::PeakonWithDecay { .. } => "PeakonWithDecay",
        ChKind::PeriodicCuspon { .. } => "PeriodicCuspon",
        ChKind::PeriodicPeakon { .. } => "PeriodicPeakon",
        ChKind::StumponCompatible { .. } => "StumponCompatible",
        ChKind::MirrorCase { .. } => "MirrorCase",
        ChKind::UnclassifiedBoundedDerivative => "UnclassifiedBoundedDerivative",
    }
}

fn write_or_print(out_dir: Option<&Path>, name: &str, contents: &str) -> Result<(), CmdError> {
    match out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(name), contents)?;
        }
        None => println!("{contents}"),
    }
    Ok(())
}

fn resolve_output_path(out_dir: Option<&Path>, path: &str) -> PathBuf {
    let p = Path::new(path);
    match out_dir {
        Some(dir) if p.is_relative() => dir.join(p),
        _ => p.to_path_buf(),
    }
}

fn sample_grid(spec: &JobSpec, p: &Profile) -> Result<(Vec<f64>, Option<OutputSpec>), CmdError> {
    let output = spec.output.clone();
    let (lo, hi, n) = match &output {
        Some(o) => {
            if !(o.grid.xi_hi > o.grid.xi_lo) || o.grid.n < 2 {
                return Err(CmdError::input(
                    "output.grid needs xi_hi > xi_lo and n >= 2".into(),
                ));
            }
            (o.grid.xi_lo, o.grid.xi_hi, o.grid.n)
        }
        None => {
            let (a, b) = p.xi_range();
            (a.max(-10.0), b.min(10.0), 1001)
        }
    };
    let step = (hi - lo) / (n - 1) as f64;
    let grid = (0..n).map(|i| lo + step * i as f64).collect();
    Ok((grid, output))
}

fn samples_csv(rows: &[SampleRow]) -> String {
    let mut out = String::from("xi,w,slope,flag\n");
    for r in rows {
        let flag = match r.flag {
            SampleFlag::Ok => "ok",
            SampleFlag::Singular => "singular",
            SampleFlag::Tail => "tail",
        };
        match (r.flag, r.slope.finite()) {
            (SampleFlag::Singular, _) | (_, None) => {
                out.push_str(&format!("{},{},,{}\n", r.xi, r.w, flag));
            }
            (_, Some(slope)) => {
                out.push_str(&format!("{},{},{},{}\n", r.xi, r.w, slope, flag));
            }
        }
    }
    out
}

#[derive(Serialize)]
struct SampleJsonRow {
    xi: f64,
    w: f64,
    slope: Option<f64>,
    flag: &'static str,
}

fn samples_json(rows: &[SampleRow]) -> String {
    let rows: Vec<SampleJsonRow> = rows
        .iter()
        .map(|r| SampleJsonRow {
            xi: r.xi,
            w: r.w,
            slope: match r.flag {
                SampleFlag::Singular => None,
                _ => r.slope.finite(),
            },
            flag: match r.flag {
                SampleFlag::Ok => "ok",
                SampleFlag::Singular => "singular",
                SampleFlag::Tail => "tail",
            },
        })
        .collect();
    serde_json::to_string_pretty(&rows).expect("sample rows serialize")
}

/// Build the profile a job describes: from its explicit plan when present,
/// otherwise (CH only) from the classified wave type. Returns the profile
/// together with the taxonomy when classification ran.
fn build_profile(
    spec: &JobSpec,
    tol: &ToleranceConfig,
) -> Result<(Profile, Option<ChTaxonomy>), CmdError> {
    match spec.equation {
        Equation::Nvw => {
            let coeff = spec.coefficient_spec()?;
            let plan = spec.nvw_plan()?;
            let p = nvw::assemble_nvw(&coeff, spec.wave_speed, &plan, tol).map_err(from_nvw)?;
            Ok((p, None))
        }
        Equation::Ch => {
            let (a, b) = spec.ch_params()?;
            if spec.plan.is_some() {
                let plan = spec.ch_plan()?;
                let p = ch::assemble_ch(spec.wave_speed, a, &plan, tol).map_err(from_ch)?;
                Ok((p, None))
            } else {
                let tax = ch::classify_ch(spec.wave_speed, a, b);
                let window = spec
                    .output
                    .as_ref()
                    .map(|o| (o.grid.xi_lo, o.grid.xi_hi))
                    .unwrap_or((-8.0, 8.0));
                let p = ch::build_ch_profile(spec.wave_speed, a, b, &tax.kind, window, tol)
                    .map_err(from_ch)?;
                Ok((p, Some(tax)))
            }
        }
    }
}

pub fn cmd_classify(
    spec: &JobSpec,
    out_dir: Option<&Path>,
    tol: &ToleranceConfig,
) -> Result<i32, CmdError> {
    let report = match spec.equation {
        Equation::Ch => {
            let (a, b) = spec.ch_params()?;
            let tax = ch::classify_ch(spec.wave_speed, a, b);
            log::info!("classified ch({}, {a}, {b}) as {}", spec.wave_speed, kind_name(&tax.kind));
            json!({
                "equation": "ch",
                "wave_speed": spec.wave_speed,
                "a": a,
                "b": b,
                "kind": kind_name(&tax.kind),
                "detail": tax.kind,
                "constructible": tax.kind.is_constructible(),
                "zeros": tax.analysis.zeros,
                "certificates": tax.certificates,
                "analysis": tax.analysis,
            })
        }
        Equation::Nvw => {
            let coeff = spec.coefficient_spec()?;
            let regime = nvw::speed_regime(&coeff, spec.wave_speed, tol);
            // Scan one full 2*pi window; the closed-form families are
            // periodic or monotone, so this captures the root pattern.
            let (u_lo, u_hi) = (0.0, 2.0 * std::f64::consts::PI);
            let candidates =
                match nvw::glue_candidates(&coeff, spec.wave_speed, u_lo, u_hi, 2048, tol) {
                    Ok(c) => c,
                    Err(NvwError::NotInteriorBand) | Err(NvwError::NoCandidates) => Vec::new(),
                    Err(e) => return Err(from_nvw(e)),
                };
            log::info!(
                "nvw s={} regime={:?} with {} glue candidates",
                spec.wave_speed,
                regime,
                candidates.len()
            );
            json!({
                "equation": "nvw",
                "wave_speed": spec.wave_speed,
                "coefficient": spec.coefficient,
                "regime": regime,
                "scan_range": [u_lo, u_hi],
                "candidates": candidates,
            })
        }
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    write_or_print(out_dir, "classify.json", &text)?;
    if out_dir.is_some() {
        println!("{text}");
    }
    Ok(EXIT_OK)
}

pub fn cmd_build(
    spec: &JobSpec,
    out_dir: Option<&Path>,
    tol: &ToleranceConfig,
) -> Result<i32, CmdError> {
    let (profile, tax) = build_profile(spec, tol)?;
    let (grid, output) = sample_grid(spec, &profile)?;
    let rows = profile.sample(&grid).map_err(|e| CmdError {
        code: EXIT_NUMERICAL,
        message: format!("sampling failed: {e}"),
    })?;

    if let Some(o) = &output {
        let path = resolve_output_path(out_dir, &o.path);
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        let body = match o.format {
            OutputFormat::Csv => samples_csv(&rows),
            OutputFormat::Json => samples_json(&rows),
        };
        std::fs::write(&path, body)?;
        log::info!("wrote {} rows to {}", rows.len(), path.display());
    }
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        let full = serde_json::to_string_pretty(&profile).expect("profile serializes");
        std::fs::write(dir.join("profile.json"), full)?;
    }

    let (xi_lo, xi_hi) = profile.xi_range();
    let summary = json!({
        "equation": match spec.equation { Equation::Nvw => "nvw", Equation::Ch => "ch" },
        "wave_speed": profile.s,
        "xi_range": [xi_lo, xi_hi],
        "segments": profile.segments.len(),
        "glue_points": profile.glue_points.len(),
        "period": profile.period,
        "kind": tax.as_ref().map(|t| kind_name(&t.kind)),
        "rows": rows.len(),
    });
    println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
    Ok(EXIT_OK)
}

fn verify_report_json(spec: &JobSpec, report: &ResidualReport, pass: bool) -> String {
    let doc = json!({
        "equation": match spec.equation { Equation::Nvw => "nvw", Equation::Ch => "ch" },
        "wave_speed": spec.wave_speed,
        "threshold": VERIFY_THRESHOLD,
        "pass": pass,
        "report": report,
    });
    serde_json::to_string_pretty(&doc).expect("verify report serializes")
}

pub fn cmd_verify(
    spec: &JobSpec,
    out_dir: Option<&Path>,
    bumps: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<i32, CmdError> {
    let (profile, _) = build_profile(spec, tol)?;
    let coeff;
    let params = match spec.equation {
        Equation::Ch => EquationParams::Ch,
        Equation::Nvw => {
            coeff = spec.coefficient_spec()?;
            EquationParams::Nvw { spec: &coeff }
        }
    };
    let report = verify::residual_suite(&profile, &params, bumps, seed, tol).map_err(|e| {
        CmdError { code: EXIT_NUMERICAL, message: format!("residual suite failed: {e}") }
    })?;
    let admissible = report.jumps.iter().all(|j| j.admissible);
    let pass = admissible && report.max_normalized <= VERIFY_THRESHOLD;
    log::info!(
        "verify: max normalized residual {:.3e}, junctions admissible: {admissible}",
        report.max_normalized
    );
    let text = verify_report_json(spec, &report, pass);
    write_or_print(out_dir, "verify.json", &text)?;
    if out_dir.is_some() {
        println!("{text}");
    }
    Ok(if pass { EXIT_OK } else { EXIT_INADMISSIBLE })
}

#[derive(Clone, Serialize)]
struct SweepRow {
    s: f64,
    a: f64,
    b: f64,
    kind: Option<String>,
    constructible: Option<bool>,
    error: Option<String>,
}

fn sweep_row(s: f64, a: f64, b: f64) -> SweepRow {
    if !(s.is_finite() && a.is_finite() && b.is_finite()) {
        return SweepRow {
            s,
            a,
            b,
            kind: None,
            constructible: None,
            error: Some("non-finite parameter".into()),
        };
    }
    let tax = ch::classify_ch(s, a, b);
    SweepRow {
        s,
        a,
        b,
        kind: Some(kind_name(&tax.kind).to_string()),
        constructible: Some(tax.kind.is_constructible()),
        error: None,
    }
}

fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("s,a,b,kind,constructible,error\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.s,
            r.a,
            r.b,
            r.kind.as_deref().unwrap_or(""),
            r.constructible.map(|c| c.to_string()).unwrap_or_default(),
            r.error.as_deref().unwrap_or(""),
        ));
    }
    out
}

pub fn cmd_sweep(
    spec: &JobSpec,
    out_dir: Option<&Path>,
    jobs: usize,
) -> Result<i32, CmdError> {
    if spec.equation != Equation::Ch {
        return Err(CmdError::input("sweep supports only `\"equation\": \"ch\"`".into()));
    }
    let sweep = spec
        .sweep
        .as_ref()
        .ok_or(SpecError::MissingField("sweep"))?;

    let mut triples = Vec::new();
    for &s in &sweep.s {
        for &a in &sweep.a {
            for &b in &sweep.b {
                triples.push((s, a, b));
            }
        }
    }
    log::info!("sweeping {} triples on {} worker(s)", triples.len(), jobs.max(1));

    // A bounded worker pool over a shared work index; rows land at their
    // input position so output order is deterministic regardless of which
    // worker finishes first.
    let n = triples.len();
    let results: Mutex<Vec<Option<SweepRow>>> = Mutex::new(vec![None; n]);
    let next = AtomicUsize::new(0);
    let workers = jobs.max(1).min(n.max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let (s, a, b) = triples[i];
                let row = sweep_row(s, a, b);
                results.lock().expect("sweep results lock")[i] = Some(row);
            });
        }
    });
    let rows: Vec<SweepRow> = results
        .into_inner()
        .expect("sweep results lock")
        .into_iter()
        .map(|r| r.expect("every sweep row computed"))
        .collect();

    let (body, name) = match spec.output.as_ref().map(|o| o.format) {
        Some(OutputFormat::Csv) => (sweep_csv(&rows), "sweep.csv"),
        _ => (
            serde_json::to_string_pretty(&rows).expect("sweep rows serialize"),
            "sweep.json",
        ),
    };
    match spec.output.as_ref() {
        Some(o) => {
            let path = resolve_output_path(out_dir, &o.path);
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            std::fs::write(&path, &body)?;
            println!("{body}");
        }
        None => write_or_print(out_dir, name, &body)?,
    }
    Ok(EXIT_OK)
}
