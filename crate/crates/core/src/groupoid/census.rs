use serde::Serialize;

use super::poincare::{class_measure, poincare_series, AtomicConformalMeasure, SeriesOptions, Summability};
use super::transfer::CocycleSpec;
use crate::error::{Error, Result};
use crate::orbit::{analyze_orbit, critical_classes, Assumptions, Confidence, GrandOrbitClass, Region, RETURN_TOL};
use crate::sphere::{RationalMap, SpherePoint};
use crate::thermo::{bowen_dimension, DimensionEstimate};

/// `β` within this distance of `log d` is the critical gauge temperature.
pub const CRITICAL_BETA_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Measure of maximal entropy.
    Lyubich,
    /// Conformal measure of exponent equal to the dimension.
    Sullivan,
}

/// How to construct a non-atomic measure (see the thermo module).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureHandle {
    pub provenance: Provenance,
    /// Exponent `δ` of the conformal measure, or `log d`.
    pub exponent: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExtremalState {
    NonAtomic {
        measure: MeasureHandle,
    },
    /// `multiplicity` extremal states share the measure of one orbit class.
    Atomic {
        class: GrandOrbitClass,
        multiplicity: usize,
        measure: Option<Box<AtomicConformalMeasure>>,
        /// Why the measure is missing, if it is.
        note: Option<String>,
    },
}

impl ExtremalState {
    pub fn count(&self) -> usize {
        match self {
            ExtremalState::NonAtomic { .. } => 1,
            ExtremalState::Atomic { multiplicity, .. } => *multiplicity,
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, ExtremalState::Atomic { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CensusOutcome {
    Classified,
    /// No classification is available for this map and action; lists the
    /// critical orbits whose Poincaré series looked summable.
    Unsupported {
        reason: String,
        summable_orbits: Vec<SpherePoint>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KmsCensus {
    pub beta: f64,
    pub action: String,
    pub states: Vec<ExtremalState>,
    pub total: usize,
    pub atomic: usize,
    pub non_atomic: usize,
    pub assumptions: Assumptions,
    /// Lowest Julia-membership confidence among the critical classes used.
    pub julia_confidence: Option<Confidence>,
    /// Dimension estimate used for the conformal action.
    pub dimension: Option<DimensionEstimate>,
    pub outcome: CensusOutcome,
    pub notes: Vec<String>,
}

impl KmsCensus {
    fn new(
        beta: f64,
        spec: &CocycleSpec,
        states: Vec<ExtremalState>,
        assumptions: &Assumptions,
        classes: &[GrandOrbitClass],
        outcome: CensusOutcome,
    ) -> Self {
        let atomic = states.iter().filter(|s| s.is_atomic()).map(|s| s.count()).sum();
        let non_atomic = states.iter().filter(|s| !s.is_atomic()).count();
        KmsCensus {
            beta,
            action: spec.label(),
            total: atomic + non_atomic,
            atomic,
            non_atomic,
            states,
            assumptions: *assumptions,
            julia_confidence: classes.iter().map(|c| c.julia_confidence).min(),
            dimension: None,
            outcome,
            notes: Vec::new(),
        }
    }

    pub fn is_supported(&self) -> bool {
        self.outcome == CensusOutcome::Classified
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CensusOptions {
    pub horizon: usize,
    pub series: SeriesOptions,
    /// Precomputed dimension of the Julia set; estimated when absent.
    pub dimension: Option<DimensionEstimate>,
    /// Target accuracy of the dimension estimate.
    pub dimension_tol: f64,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions {
            horizon: 400,
            series: SeriesOptions::default(),
            dimension: None,
            dimension_tol: 1e-4,
        }
    }
}

/// Extremal `β`-KMS states of the action given by `spec`.
pub fn kms_census(
    map: &RationalMap,
    region: Region,
    beta: f64,
    spec: &CocycleSpec,
    assumptions: &Assumptions,
) -> Result<KmsCensus> {
    kms_census_with(map, region, beta, spec, assumptions, &CensusOptions::default())
}

pub fn kms_census_with(
    map: &RationalMap,
    region: Region,
    beta: f64,
    spec: &CocycleSpec,
    assumptions: &Assumptions,
    opts: &CensusOptions,
) -> Result<KmsCensus> {
    if beta == 0.0 || !beta.is_finite() {
        return Err(Error::Precondition("β must be finite and non-zero".into()));
    }
    if map.degree() < 2 {
        return Err(Error::Precondition("degree at least two is required".into()));
    }
    match spec {
        CocycleSpec::Gauge => gauge_census(map, region, beta, spec, assumptions, opts),
        CocycleSpec::Conformal { .. } if map.is_quadratic_polynomial() && assumptions.collet_eckmann && beta > 0.0 => {
            conformal_quadratic_census(map, region, beta, spec, assumptions, opts)
        }
        _ => unsupported(map, region, beta, spec, assumptions, opts),
    }
}

fn atomic_entry(
    map: &RationalMap,
    class: &GrandOrbitClass,
    beta: f64,
    spec: &CocycleSpec,
    opts: &CensusOptions,
) -> ExtremalState {
    let (measure, note) = match class_measure(map, class, beta, spec, &opts.series) {
        Ok(m) => (Some(Box::new(m)), None),
        Err(e) => (None, Some(e.to_string())),
    };
    ExtremalState::Atomic {
        class: class.clone(),
        multiplicity: class.val_infinity,
        measure,
        note,
    }
}

fn gauge_census(
    map: &RationalMap,
    region: Region,
    beta: f64,
    spec: &CocycleSpec,
    assumptions: &Assumptions,
    opts: &CensusOptions,
) -> Result<KmsCensus> {
    let classes = critical_classes(map, region, opts.horizon, assumptions)?;
    let log_d = (map.degree() as f64).ln();
    let critical = (beta - log_d).abs() <= CRITICAL_BETA_TOL;
    let mut states: Vec<ExtremalState> = classes
        .iter()
        .filter(|c| c.finite || (beta > log_d && !critical))
        .map(|c| atomic_entry(map, c, beta, spec, opts))
        .collect();
    if critical {
        states.push(ExtremalState::NonAtomic {
            measure: MeasureHandle {
                provenance: Provenance::Lyubich,
                exponent: log_d,
            },
        });
    }
    let mut census = KmsCensus::new(beta, spec, states, assumptions, &classes, CensusOutcome::Classified);
    if classes.iter().any(|c| c.ambiguous) {
        census
            .notes
            .push("two critical orbits nearly collide; the class split may be wrong".into());
    }
    Ok(census)
}

fn conformal_quadratic_census(
    map: &RationalMap,
    region: Region,
    beta: f64,
    spec: &CocycleSpec,
    assumptions: &Assumptions,
    opts: &CensusOptions,
) -> Result<KmsCensus> {
    let dim = match &opts.dimension {
        Some(d) => d.clone(),
        None => bowen_dimension(map, opts.dimension_tol)?,
    };
    let c = map
        .critical_points()
        .iter()
        .find(|c| c.point.is_finite_value())
        .map(|c| c.point)
        .ok_or_else(|| Error::Internal("quadratic polynomial without a finite critical point".into()))?;
    let preperiodic = assumptions
        .critical_preperiodic
        .unwrap_or_else(|| analyze_orbit(map, &c, opts.horizon, RETURN_TOL).is_preperiodic());
    let (lo, hi) = (dim.value - dim.error, dim.value + dim.error);
    let sullivan = || ExtremalState::NonAtomic {
        measure: MeasureHandle {
            provenance: Provenance::Sullivan,
            exponent: dim.value,
        },
    };
    let mut classes = Vec::new();
    let states = if beta >= lo && beta <= hi {
        vec![sullivan()]
    } else if preperiodic || beta < lo {
        Vec::new()
    } else {
        let forced = Assumptions {
            critical_preperiodic: Some(false),
            ..*assumptions
        };
        classes = critical_classes(map, region, opts.horizon, &forced)?
            .into_iter()
            .filter(|k| k.critical_members.iter().any(|m| m.approx_eq(&c, 1e-9)))
            .collect();
        let class = classes.first().cloned().unwrap_or_else(|| GrandOrbitClass {
            representative: c,
            critical_members: vec![c],
            val_infinity: 2,
            finite: false,
            members: vec![c],
            julia_confidence: Confidence::Asserted,
            ambiguous: false,
        });
        vec![atomic_entry(map, &class, beta, spec, opts)]
    };
    let mut census = KmsCensus::new(beta, spec, states, assumptions, &classes, CensusOutcome::Classified);
    if dim.non_rigorous {
        census.notes.push(format!(
            "dimension {:.4} ± {:.4} is a numerical estimate",
            dim.value, dim.error
        ));
    }
    census.dimension = Some(dim);
    Ok(census)
}

fn unsupported(
    map: &RationalMap,
    region: Region,
    beta: f64,
    spec: &CocycleSpec,
    assumptions: &Assumptions,
    opts: &CensusOptions,
) -> Result<KmsCensus> {
    let reason = match spec {
        CocycleSpec::Conformal { .. } if !map.is_quadratic_polynomial() => {
            "conformal classification is only available for quadratic polynomials".to_string()
        }
        CocycleSpec::Conformal { .. } if !assumptions.collet_eckmann => {
            "conformal classification requires the Collet-Eckmann assumption".to_string()
        }
        CocycleSpec::Conformal { .. } => "conformal classification requires β > 0".to_string(),
        _ => "no classification is available for generalized cocycles".to_string(),
    };
    let forced = Assumptions {
        critical_preperiodic: Some(false),
        ..*assumptions
    };
    let mut summable_orbits = Vec::new();
    let candidates: Vec<SpherePoint> = match critical_classes(map, region, opts.horizon, &forced) {
        Ok(classes) => classes.iter().map(|c| c.representative).collect(),
        Err(_) => map.critical_points().iter().map(|c| c.point).collect(),
    };
    for x in candidates {
        if let Ok(s) = poincare_series(map, &x, beta, spec, &opts.series) {
            if matches!(s.verdict, Summability::Finite | Summability::Summable) {
                summable_orbits.push(x);
            }
        }
    }
    Ok(KmsCensus::new(
        beta,
        spec,
        Vec::new(),
        assumptions,
        &[],
        CensusOutcome::Unsupported {
            reason,
            summable_orbits,
        },
    ))
}
