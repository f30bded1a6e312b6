use std::path::PathBuf;

use kms_dynamics::groupoid::{
    isotropy_class, kms_census_with, orbit_consistent, CensusOptions, CensusOutcome, ExtremalState, IsotropyClass,
    KmsCensus, Provenance,
};
use kms_dynamics::measure::Atom;
use kms_dynamics::orbit::{
    analyze_orbit, classify_cycle, val_infinity, Assumptions, Confidence, OrbitVerdict, ValInfinity, NEUTRAL_TOL,
};
use kms_dynamics::sphere::Params;
use kms_dynamics::thermo::{
    bowen_dimension, bowen_dimension_at, conformal_eigenmeasure, default_depth, julia_seeds, lyubich_measure,
    pressure_curve, write_cloud, write_csv, DimensionEstimate, DiscretizedMeasure, PressureCurve,
};
use kms_dynamics::{RationalMap, SpherePoint};
use serde::Serialize;

use crate::args::{Command, Format, MeasureChoice};
use crate::config::{parse_complex, parse_point, RunConfig};
use crate::error::{status_of, CliError, CliResult, Status};
use crate::output::{csv_header, csv_table, json_document};
use crate::render::{default_radius, render_julia, render_phase, PhasePoint, MAX_RESOLUTION};

/// Bytes produced by a command and the exit status they carry.
pub struct Artifact {
    pub bytes: Vec<u8>,
    pub status: Status,
    /// Further files requested by the command.
    pub extra: Vec<(PathBuf, Vec<u8>)>,
}

impl Artifact {
    fn new(bytes: Vec<u8>, status: Status) -> Self {
        Artifact {
            bytes,
            status,
            extra: Vec::new(),
        }
    }
}

/// Atoms kept in census reports unless `--full` is given.
const SUPPORT_PREVIEW: usize = 16;

fn unsupported_format(cfg: &RunConfig) -> CliError {
    CliError::config(format!(
        "format {:?} is not available for {}",
        cfg.format,
        cfg.command.name()
    ))
}

pub fn execute(cfg: &RunConfig) -> CliResult<Artifact> {
    let map = cfg.rational_map()?;
    match &cfg.command {
        Command::Classify { point } => classify(cfg, &map, point),
        Command::Census { beta, action, full } => census(cfg, &map, beta, action, *full),
        Command::PhaseDiagram {
            beta_min,
            beta_max,
            steps,
            plot,
        } => phase_diagram(cfg, &map, *beta_min, *beta_max, *steps, plot.clone()),
        Command::Julia {
            resolution,
            radius,
            points,
        } => julia(cfg, &map, *resolution, *radius, *points),
        Command::Pressure { delta } => pressure(cfg, &map, delta),
        Command::Measure { kind, delta } => measure(cfg, &map, *kind, *delta),
    }
}

#[derive(Serialize)]
pub struct ClassifyReport {
    pub point: SpherePoint,
    pub verdict: OrbitVerdict,
    pub preperiod: Option<usize>,
    pub period: Option<usize>,
    pub cycle: Option<&'static str>,
    pub first_critical_hit: Option<usize>,
    pub exact: bool,
    pub isotropy: String,
    pub isotropy_detail: IsotropyClass,
    pub consistent: bool,
    pub critical: bool,
    #[serde(rename = "VAL_inf", skip_serializing_if = "Option::is_none")]
    pub val_inf: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub val_inf_detail: Option<ValInfinity>,
}

pub fn classify_report(cfg: &RunConfig, map: &RationalMap, x: &SpherePoint) -> ClassifyReport {
    let rec = analyze_orbit(map, x, cfg.horizon, cfg.tol);
    let (preperiod, period) = match &rec.verdict {
        OrbitVerdict::PrePeriodic { preperiod, period, .. } => (Some(*preperiod), Some(*period)),
        OrbitVerdict::Attracted { period, .. } => (None, Some(*period)),
        OrbitVerdict::NoCycleDetected { .. } => (None, None),
    };
    let cycle = classify_cycle(map, &rec, NEUTRAL_TOL).ok().map(|c| c.as_str());
    let iso = isotropy_class(map, x, cfg.horizon);
    let critical = map.valency(x) > 1;
    let vinf = critical.then(|| val_infinity(map, x, cfg.horizon));
    ClassifyReport {
        point: *x,
        preperiod,
        period,
        cycle,
        first_critical_hit: rec.first_critical_hit,
        exact: rec.exact,
        isotropy: iso.to_string(),
        consistent: orbit_consistent(map, x, cfg.horizon),
        critical,
        val_inf: vinf.as_ref().and_then(|v| v.value()),
        val_inf_detail: vinf,
        isotropy_detail: iso,
        verdict: rec.verdict,
    }
}

fn classify(cfg: &RunConfig, map: &RationalMap, point: &str) -> CliResult<Artifact> {
    if cfg.format != Format::Json {
        return Err(unsupported_format(cfg));
    }
    let x = parse_point(point, &cfg.param_bindings())?;
    let report = classify_report(cfg, map, &x);
    let status = if report.isotropy_detail.is_inconclusive() {
        Status::Inconclusive
    } else {
        Status::Success
    };
    Ok(Artifact::new(json_document(cfg, &report)?, status))
}

#[derive(Clone, Debug, Serialize)]
pub struct StateSummary {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    pub multiplicity: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub representative: Option<SpherePoint>,
    pub critical_members: Vec<SpherePoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finite_orbit: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atoms: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalization: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_estimate: Option<f64>,
    pub support: Vec<Atom>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CensusSummary {
    pub beta: f64,
    pub action: String,
    pub total: usize,
    pub atomic: usize,
    pub non_atomic: usize,
    pub outcome: CensusOutcome,
    pub assumptions: Assumptions,
    pub julia_confidence: Option<Confidence>,
    pub dimension: Option<DimensionEstimate>,
    pub notes: Vec<String>,
    pub states: Vec<StateSummary>,
}

fn summarize_state(s: &ExtremalState, full: bool) -> StateSummary {
    match s {
        ExtremalState::NonAtomic { measure } => StateSummary {
            kind: "non_atomic",
            provenance: Some(measure.provenance),
            exponent: Some(measure.exponent),
            multiplicity: 1,
            representative: None,
            critical_members: Vec::new(),
            finite_orbit: None,
            atoms: None,
            normalization: None,
            tail_estimate: None,
            support: Vec::new(),
            note: None,
        },
        ExtremalState::Atomic {
            class,
            multiplicity,
            measure,
            note,
        } => {
            let keep = if full { usize::MAX } else { SUPPORT_PREVIEW };
            StateSummary {
                kind: "atomic",
                provenance: None,
                exponent: None,
                multiplicity: *multiplicity,
                representative: Some(class.representative),
                critical_members: class.critical_members.clone(),
                finite_orbit: Some(class.finite),
                atoms: measure.as_ref().map(|m| m.atoms.len()),
                normalization: measure.as_ref().map(|m| m.normalization),
                tail_estimate: measure.as_ref().map(|m| m.tail_estimate),
                support: measure
                    .as_ref()
                    .map(|m| m.atoms.iter().take(keep).cloned().collect())
                    .unwrap_or_default(),
                note: note.clone(),
            }
        }
    }
}

pub fn summarize_census(c: &KmsCensus, full: bool) -> CensusSummary {
    CensusSummary {
        beta: c.beta,
        action: c.action.clone(),
        total: c.total,
        atomic: c.atomic,
        non_atomic: c.non_atomic,
        outcome: c.outcome.clone(),
        assumptions: c.assumptions,
        julia_confidence: c.julia_confidence,
        dimension: c.dimension.clone(),
        notes: c.notes.clone(),
        states: c.states.iter().map(|s| summarize_state(s, full)).collect(),
    }
}

#[derive(Serialize)]
#[serde(untagged)]
enum CensusEntry {
    Done(Box<CensusSummary>),
    Failed { beta: f64, error: String },
}

#[derive(Serialize)]
struct CensusRow {
    beta: f64,
    total: Option<usize>,
    atomic: Option<usize>,
    non_atomic: Option<usize>,
    status: String,
}

/// `β` values, with `logd` bound to the log of the degree.
pub fn parse_betas(values: &[String], map: &RationalMap) -> CliResult<Vec<f64>> {
    let mut params = Params::new();
    params.insert(
        "logd".into(),
        num_complex::Complex64::new((map.degree() as f64).ln(), 0.0),
    );
    values
        .iter()
        .map(|v| {
            let b = parse_complex(v, &params)?;
            if b.im != 0.0 {
                return Err(CliError::config(format!("β must be real, got `{v}`")));
            }
            if b.re == 0.0 {
                return Err(CliError::config("β must be non-zero"));
            }
            Ok(b.re)
        })
        .collect()
}

fn census_options(cfg: &RunConfig) -> CensusOptions {
    let mut opts = CensusOptions {
        horizon: cfg.horizon,
        ..Default::default()
    };
    if let Some(d) = cfg.depth {
        opts.series.depth = d;
    }
    opts
}

fn outcome_status(c: &KmsCensus) -> Status {
    match c.outcome {
        CensusOutcome::Classified => Status::Success,
        CensusOutcome::Unsupported { .. } => Status::Unsupported,
    }
}

fn census(cfg: &RunConfig, map: &RationalMap, betas: &[String], action: &str, full: bool) -> CliResult<Artifact> {
    let betas = parse_betas(betas, map)?;
    let spec = cfg.cocycle(action, map)?;
    let mut opts = census_options(cfg);
    let mut status = Status::Success;
    let mut entries = Vec::new();
    for &beta in &betas {
        match kms_census_with(map, cfg.region(), beta, &spec, &cfg.assumptions(), &opts) {
            Ok(c) => {
                status = status.worst(outcome_status(&c));
                if opts.dimension.is_none() {
                    opts.dimension = c.dimension.clone();
                }
                entries.push(CensusEntry::Done(Box::new(summarize_census(&c, full))));
            }
            Err(e) => {
                status = status.worst(status_of(&e));
                entries.push(CensusEntry::Failed {
                    beta,
                    error: e.to_string(),
                });
            }
        }
    }
    let bytes = match cfg.format {
        Format::Json => json_document(cfg, &serde_json::json!({ "censuses": entries }))?,
        Format::Csv => {
            let rows: Vec<CensusRow> = entries
                .iter()
                .map(|e| match e {
                    CensusEntry::Done(c) => {
                        let ok = c.outcome == CensusOutcome::Classified;
                        CensusRow {
                            beta: c.beta,
                            total: ok.then_some(c.total),
                            atomic: ok.then_some(c.atomic),
                            non_atomic: ok.then_some(c.non_atomic),
                            status: if ok { "classified" } else { "unsupported" }.into(),
                        }
                    }
                    CensusEntry::Failed { beta, error } => CensusRow {
                        beta: *beta,
                        total: None,
                        atomic: None,
                        non_atomic: None,
                        status: format!("error: {error}"),
                    },
                })
                .collect();
            csv_table(&csv_header(cfg, &[("action".into(), spec.label())]), &rows)?
        }
        _ => return Err(unsupported_format(cfg)),
    };
    Ok(Artifact::new(bytes, status))
}

#[derive(Clone, Debug, Serialize)]
pub struct PhaseRow {
    pub beta: f64,
    pub extremal_count: Option<usize>,
    pub atomic_count: Option<usize>,
    pub nonatomic_count: Option<usize>,
    pub hd: f64,
    pub hd_error: f64,
    pub status: String,
}

pub fn beta_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![lo];
    }
    (0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect()
}

fn phase_diagram(
    cfg: &RunConfig,
    map: &RationalMap,
    lo: f64,
    hi: f64,
    steps: usize,
    plot: Option<PathBuf>,
) -> CliResult<Artifact> {
    if !map.is_quadratic_polynomial() {
        return Err(CliError::config("phase diagrams need a quadratic polynomial"));
    }
    if steps == 0 || hi.is_nan() || lo.is_nan() || hi < lo {
        return Err(CliError::config("need steps >= 1 and beta-max >= beta-min"));
    }
    let spec = cfg.cocycle("conformal", map)?;
    let dim = bowen_dimension(map, cfg.tol)?;
    let mut opts = census_options(cfg);
    opts.dimension = Some(dim.clone());
    let mut status = Status::Success;
    let mut rows = Vec::with_capacity(steps);
    for beta in beta_grid(lo, hi, steps) {
        let mut row = PhaseRow {
            beta,
            extremal_count: None,
            atomic_count: None,
            nonatomic_count: None,
            hd: dim.value,
            hd_error: dim.error,
            status: String::new(),
        };
        match kms_census_with(map, cfg.region(), beta, &spec, &cfg.assumptions(), &opts) {
            Ok(c) => {
                status = status.worst(outcome_status(&c));
                match c.outcome {
                    CensusOutcome::Classified => {
                        row.extremal_count = Some(c.total);
                        row.atomic_count = Some(c.atomic);
                        row.nonatomic_count = Some(c.non_atomic);
                        row.status = "classified".into();
                    }
                    CensusOutcome::Unsupported { .. } => row.status = "unsupported".into(),
                }
            }
            Err(e) => {
                status = status.worst(status_of(&e));
                row.status = format!("error: {e}");
            }
        }
        rows.push(row);
    }
    let band = Some((dim.value - dim.error, dim.value + dim.error));
    let points: Vec<PhasePoint> = rows
        .iter()
        .map(|r| PhasePoint {
            beta: r.beta,
            count: r.extremal_count,
        })
        .collect();
    let header = csv_header(
        cfg,
        &[
            ("hd".into(), format!("{:?}", dim.value)),
            ("hd_error".into(), format!("{:?}", dim.error)),
            ("hd_non_rigorous".into(), dim.non_rigorous.to_string()),
        ],
    );
    let bytes = match cfg.format {
        Format::Csv => csv_table(&header, &rows)?,
        Format::Json => json_document(cfg, &serde_json::json!({ "dimension": dim, "rows": rows }))?,
        Format::Png => render_phase(&points, band).to_png(cfg)?,
        Format::Cloud => return Err(unsupported_format(cfg)),
    };
    let mut art = Artifact::new(bytes, status);
    if let Some(p) = plot {
        art.extra.push((p, render_phase(&points, band).to_png(cfg)?));
    }
    Ok(art)
}

fn julia(
    cfg: &RunConfig,
    map: &RationalMap,
    resolution: u32,
    radius: Option<f64>,
    points: usize,
) -> CliResult<Artifact> {
    if cfg.format != Format::Png {
        return Err(unsupported_format(cfg));
    }
    if resolution == 0 || resolution > MAX_RESOLUTION {
        return Err(CliError::config(format!("resolution must be in 1..={MAX_RESOLUTION}")));
    }
    let radius = radius.unwrap_or_else(|| default_radius(map));
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(CliError::config("--radius must be positive"));
    }
    let img = render_julia(map, resolution, radius, points, cfg.seed);
    Ok(Artifact::new(img.to_png(cfg)?, Status::Success))
}

#[derive(Serialize)]
struct PressureReport {
    curve: PressureCurve,
    root: Option<DimensionEstimate>,
    root_error: Option<String>,
}

fn pressure(cfg: &RunConfig, map: &RationalMap, deltas: &[f64]) -> CliResult<Artifact> {
    if deltas.is_empty() || deltas.iter().any(|d| !d.is_finite()) {
        return Err(CliError::config("--delta needs finite values"));
    }
    let depth = cfg.depth.unwrap_or_else(|| default_depth(map));
    let curve = pressure_curve(map, deltas, depth, &cfg.metric_for(map)?)?;
    let root = bowen_dimension_at(map, depth, cfg.tol);
    let mut status = if curve.monotone {
        Status::Success
    } else {
        Status::Inconclusive
    };
    if let Err(e) = &root {
        status = status.worst(status_of(e));
    }
    let bytes = match cfg.format {
        Format::Csv => {
            let mut extra = vec![
                ("depth".to_string(), depth.to_string()),
                ("hyperbolic".into(), curve.hyperbolic.to_string()),
                ("monotone".into(), curve.monotone.to_string()),
            ];
            match &root {
                Ok(d) => {
                    extra.push(("root".into(), format!("{:?}", d.value)));
                    extra.push(("root_error".into(), format!("{:?}", d.error)));
                    extra.push(("root_non_rigorous".into(), d.non_rigorous.to_string()));
                }
                Err(e) => extra.push(("root".into(), format!("unavailable ({e})"))),
            }
            csv_table(&csv_header(cfg, &extra), &curve.samples)?
        }
        Format::Json => {
            let report = PressureReport {
                root_error: root.as_ref().err().map(|e| e.to_string()),
                root: root.ok(),
                curve,
            };
            json_document(cfg, &report)?
        }
        _ => return Err(unsupported_format(cfg)),
    };
    Ok(Artifact::new(bytes, status))
}

/// Trailer appended to binary clouds: `META`, a `u32` length and the
/// provenance JSON.
pub const CLOUD_TRAILER: [u8; 4] = *b"META";

fn measure(cfg: &RunConfig, map: &RationalMap, kind: MeasureChoice, delta: Option<f64>) -> CliResult<Artifact> {
    let depth = cfg.depth.unwrap_or_else(|| default_depth(map));
    let mu: DiscretizedMeasure = match kind {
        MeasureChoice::Lyubich => lyubich_measure(map, depth, &julia_seeds(map)?[0])?,
        MeasureChoice::Eigen => {
            let delta = match delta {
                Some(d) => d,
                None => bowen_dimension(map, cfg.tol)?.value,
            };
            conformal_eigenmeasure(map, delta, depth)?
        }
    };
    let status = if mu.converged {
        Status::Success
    } else {
        Status::Inconclusive
    };
    let kind_label = match mu.kind {
        kms_dynamics::thermo::MeasureKind::Lyubich => "lyubich".to_string(),
        kms_dynamics::thermo::MeasureKind::Eigenmeasure { delta } => format!("eigenmeasure(delta={delta:?})"),
    };
    let bytes = match cfg.format {
        Format::Csv => {
            let header = csv_header(
                cfg,
                &[
                    ("kind".into(), kind_label),
                    ("depth".into(), mu.depth.to_string()),
                    ("base_point".into(), mu.seed.to_string()),
                    ("discretization_error".into(), format!("{:?}", mu.discretization_error)),
                    ("converged".into(), mu.converged.to_string()),
                ],
            );
            let mut out = Vec::new();
            write_csv(&mu.atoms, &header, &mut out)?;
            out
        }
        Format::Json => json_document(cfg, &mu)?,
        Format::Cloud => {
            let mut out = Vec::new();
            write_cloud(&mu.atoms, &mut out)?;
            let meta = serde_json::to_vec(&serde_json::json!({
                "schema_version": cfg.schema_version,
                "config_hash": cfg.hash(),
                "seed": cfg.seed,
                "kind": kind_label,
                "depth": mu.depth,
            }))
            .map_err(|e| CliError::io(e.to_string()))?;
            out.extend_from_slice(&CLOUD_TRAILER);
            out.extend_from_slice(&(meta.len() as u32).to_le_bytes());
            out.extend_from_slice(&meta);
            out
        }
        Format::Png => return Err(unsupported_format(cfg)),
    };
    Ok(Artifact::new(bytes, status))
}
