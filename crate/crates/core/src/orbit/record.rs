use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sphere::exact::GaussRat;
use crate::sphere::{MetricSpec, RationalMap, SpherePoint};

/// Default chordal tolerance for orbit returns.
pub const RETURN_TOL: f64 = 1e-8;
/// Default number of forward iterates examined.
pub const DEFAULT_HORIZON: usize = 200;
/// Default tolerance for `|multiplier - 1|` below which a cycle is neutral.
pub const NEUTRAL_TOL: f64 = 1e-6;

/// A return at step `n > 0` whose predecessor is closer than this to its
/// cycle partner is treated as convergence rather than an exact landing.
const LANDING_GAP: f64 = 1e-4;
/// The same threshold for attracting cycles.
const ATTRACTED_GAP: f64 = 1e-2;
/// Bit budget per exact orbit point before falling back to floating point.
const EXACT_BITS: u64 = 4096;

/// Outcome of the forward-orbit scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrbitVerdict {
    /// `R^(n+p)(x) = R^n(x)` with `(n, p)` minimal.
    PrePeriodic {
        preperiod: usize,
        period: usize,
        cycle: Vec<SpherePoint>,
        multiplier: f64,
    },
    /// The orbit converges to a cycle without landing on it.
    Attracted {
        period: usize,
        cycle: Vec<SpherePoint>,
        multiplier: f64,
    },
    NoCycleDetected {
        horizon: usize,
        /// Steps shrink sub-geometrically, as near a parabolic point.
        slow_convergence: bool,
    },
}

/// Forward orbit of a point with its pre-periodicity verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitRecord {
    pub base: SpherePoint,
    pub samples: Vec<SpherePoint>,
    pub verdict: OrbitVerdict,
    /// Index of the first orbit point that is critical, if any.
    pub first_critical_hit: Option<usize>,
    /// True when the cycle was found by exact rational arithmetic.
    pub exact: bool,
}

impl OrbitRecord {
    pub fn is_preperiodic(&self) -> bool {
        matches!(self.verdict, OrbitVerdict::PrePeriodic { .. })
    }

    pub fn is_precritical(&self) -> bool {
        self.first_critical_hit.is_some()
    }

    /// Cycle data for `PrePeriodic` and `Attracted` verdicts.
    pub fn cycle(&self) -> Option<(&[SpherePoint], f64)> {
        match &self.verdict {
            OrbitVerdict::PrePeriodic { cycle, multiplier, .. } | OrbitVerdict::Attracted { cycle, multiplier, .. } => {
                Some((cycle, *multiplier))
            }
            OrbitVerdict::NoCycleDetected { .. } => None,
        }
    }
}

/// Stability type of a cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleClass {
    Superattracting,
    Attracting,
    Neutral,
    Repelling,
}

impl CycleClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            CycleClass::Superattracting => "superattracting",
            CycleClass::Attracting => "attracting",
            CycleClass::Neutral => "neutral",
            CycleClass::Repelling => "repelling",
        }
    }
}

/// Multiplier modulus of a cycle: the product of spherical derivatives.
pub fn cycle_multiplier(map: &RationalMap, cycle: &[SpherePoint]) -> f64 {
    cycle
        .iter()
        .map(|p| map.derivative_norm(p, &MetricSpec::Chordal))
        .product()
}

fn to_exact(p: &SpherePoint) -> Option<Option<GaussRat>> {
    match p {
        SpherePoint::Infinity => Some(None),
        SpherePoint::Finite(z) => GaussRat::recognize(*z).map(Some),
    }
}

fn from_exact(p: &Option<GaussRat>) -> SpherePoint {
    match p {
        None => SpherePoint::Infinity,
        Some(z) => SpherePoint::Finite(z.to_complex()),
    }
}

/// Exact `(n, p)` for maps and points with small rational coordinates.
fn exact_cycle(map: &RationalMap, x: &SpherePoint, horizon: usize) -> Option<(usize, usize, Vec<SpherePoint>)> {
    let mut cur = to_exact(x)?;
    map.eval_exact(cur.as_ref())?;
    let mut seen: HashMap<Option<GaussRat>, usize> = HashMap::new();
    let mut points: Vec<Option<GaussRat>> = Vec::new();
    for k in 0..=horizon {
        if let Some(&n) = seen.get(&cur) {
            let cycle = points[n..k].iter().map(from_exact).collect();
            return Some((n, k - n, cycle));
        }
        if cur.as_ref().is_some_and(|z| z.bits() > EXACT_BITS) {
            return None;
        }
        seen.insert(cur.clone(), k);
        points.push(cur.clone());
        cur = map.eval_exact(cur.as_ref())?;
    }
    None
}

/// Forward-orbit analysis: detects pre-periodicity with minimal `(n, p)` and
/// records the first critical hit.
pub fn analyze_orbit(map: &RationalMap, x: &SpherePoint, horizon: usize, tol: f64) -> OrbitRecord {
    let samples = map.orbit(x, horizon);
    if let Some((n, p, cycle)) = exact_cycle(map, x, horizon) {
        let multiplier = cycle_multiplier(map, &cycle);
        let first_critical_hit = first_critical(map, &samples[..(n + p).min(samples.len())]);
        return OrbitRecord {
            base: *x,
            samples,
            verdict: OrbitVerdict::PrePeriodic {
                preperiod: n,
                period: p,
                cycle,
                multiplier,
            },
            first_critical_hit,
            exact: true,
        };
    }

    let found = (0..=horizon).find_map(|n| {
        (1..=horizon - n)
            .find(|&p| samples[n + p].chordal_distance(&samples[n]) <= tol)
            .map(|p| (n, p))
    });
    let (verdict, scan_len) = match found {
        Some((n, p)) => {
            let cycle: Vec<SpherePoint> = samples[n..n + p].to_vec();
            let multiplier = cycle_multiplier(map, &cycle);
            let attracting = classify_multiplier(map, &cycle, multiplier, NEUTRAL_TOL) == CycleClass::Superattracting
                || multiplier < 1.0 - NEUTRAL_TOL;
            // an orbit cannot land on an attracting cycle from inside its
            // immediate neighbourhood without being on it already
            let gap = if attracting { ATTRACTED_GAP } else { LANDING_GAP };
            let partner_gap = |k: usize| samples[k].chordal_distance(&samples[k + p]);
            let landed = n == 0 || partner_gap(n - 1) > gap;
            if landed {
                (
                    OrbitVerdict::PrePeriodic {
                        preperiod: n,
                        period: p,
                        cycle,
                        multiplier,
                    },
                    n + p,
                )
            } else {
                // critical points met while converging are not hit
                let entry = (0..n).find(|&k| partner_gap(k) <= gap).unwrap_or(n);
                (
                    OrbitVerdict::Attracted {
                        period: p,
                        cycle,
                        multiplier,
                    },
                    entry,
                )
            }
        }
        None => (
            OrbitVerdict::NoCycleDetected {
                horizon,
                slow_convergence: slow_convergence(&samples),
            },
            samples.len(),
        ),
    };
    let first_critical_hit = first_critical(map, &samples[..scan_len.min(samples.len())]);
    OrbitRecord {
        base: *x,
        samples,
        verdict,
        first_critical_hit,
        exact: false,
    }
}

fn first_critical(map: &RationalMap, pts: &[SpherePoint]) -> Option<usize> {
    pts.iter().position(|p| map.valency(p) > 1)
}

/// Sub-geometric shrinking of the last steps: typical of orbits creeping
/// towards a parabolic point, which never come within tolerance in time.
fn slow_convergence(samples: &[SpherePoint]) -> bool {
    const WINDOW: usize = 30;
    if samples.len() < WINDOW + 2 {
        return false;
    }
    let steps: Vec<f64> = samples
        .windows(2)
        .rev()
        .take(WINDOW + 1)
        .map(|w| w[0].chordal_distance(&w[1]))
        .collect();
    let last = steps[0];
    let first = steps[WINDOW];
    let decreasing = steps.windows(2).all(|w| w[0] <= w[1]);
    decreasing && last < 1e-2 && last > 0.0 && last > 0.5 * first
}

/// Stability type of the terminal cycle of `record`.
pub fn classify_cycle(map: &RationalMap, record: &OrbitRecord, neutral_tol: f64) -> Result<CycleClass> {
    let (cycle, multiplier) = record
        .cycle()
        .ok_or_else(|| Error::Precondition("orbit has no detected cycle".into()))?;
    Ok(classify_multiplier(map, cycle, multiplier, neutral_tol))
}

pub(crate) fn classify_multiplier(
    map: &RationalMap,
    cycle: &[SpherePoint],
    multiplier: f64,
    neutral_tol: f64,
) -> CycleClass {
    if multiplier == 0.0 || cycle.iter().any(|p| map.valency(p) > 1) {
        CycleClass::Superattracting
    } else if (multiplier - 1.0).abs() < neutral_tol {
        CycleClass::Neutral
    } else if multiplier < 1.0 {
        CycleClass::Attracting
    } else {
        CycleClass::Repelling
    }
}

/// Lower envelope of `k -> (1/k) log |(R^k)'(R(c))|` over `k` in
/// `[n/4, n]`; positive values are consistent with exponential growth of
/// the derivative along the critical orbit.
pub fn critical_lyapunov_envelope(map: &RationalMap, c: &SpherePoint, n: usize) -> f64 {
    let mut x = map.eval(c);
    let mut acc = 0.0;
    let mut envelope = f64::INFINITY;
    for k in 1..=n {
        acc += map.derivative_norm(&x, &MetricSpec::Chordal).ln();
        x = map.eval(&x);
        if k >= n / 4 {
            envelope = envelope.min(acc / k as f64);
        }
    }
    envelope
}
