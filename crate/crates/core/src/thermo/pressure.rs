use serde::Serialize;

use crate::error::{Error, Result};
use crate::orbit::{
    analyze_orbit, classify_cycle, cycle_multiplier, unramified_tree, CycleClass, NEUTRAL_TOL, RETURN_TOL,
};
use crate::sphere::{MetricSpec, Poly, RationalMap, SpherePoint};

/// Trees are grown until a generation would exceed this many nodes.
const NODE_TARGET: usize = 1 << 17;
const MAX_SEEDS: usize = 3;
/// Seeds closer than this (chordally) to the postcritical set are skipped.
const POSTCRITICAL_GAP: f64 = 1e-4;
const POSTCRITICAL_STEPS: usize = 60;
/// Smallest reported error bar of a dimension estimate.
const ERROR_FLOOR: f64 = 1e-3;

/// True when every critical point is attracted to an attracting cycle.
pub fn is_hyperbolic(map: &RationalMap) -> bool {
    map.critical_points().iter().all(|c| {
        let rec = analyze_orbit(map, &c.point, 400, RETURN_TOL);
        rec.cycle().is_some()
            && matches!(
                classify_cycle(map, &rec, NEUTRAL_TOL),
                Ok(CycleClass::Attracting | CycleClass::Superattracting)
            )
    })
}

fn periodic_points(map: &RationalMap, period: usize) -> Result<Vec<SpherePoint>> {
    let f = map.power(period)?;
    let fixed = f.numerator() - &(&Poly::identity() * f.denominator());
    Ok(crate::sphere::roots::root_clusters(&fixed)
        .into_iter()
        .filter(|c| c.multiplicity == 1)
        .map(|c| SpherePoint::Finite(c.root))
        .collect())
}

/// Repelling periodic points of period one or two away from the
/// postcritical set; backward trees from them stay on the Julia set.
pub fn julia_seeds(map: &RationalMap) -> Result<Vec<SpherePoint>> {
    let mut post: Vec<SpherePoint> = Vec::new();
    for c in map.critical_points() {
        post.extend(map.orbit(&map.eval(&c.point), POSTCRITICAL_STEPS));
    }
    let mut seeds = Vec::new();
    for period in [1, 2] {
        for p in periodic_points(map, period)? {
            let cycle = map.orbit(&p, period - 1);
            if cycle_multiplier(map, &cycle) <= 1.0 + NEUTRAL_TOL {
                continue;
            }
            if post.iter().any(|q| q.chordal_distance(&p) <= POSTCRITICAL_GAP)
                || seeds.iter().any(|q: &SpherePoint| q.approx_eq(&p, POSTCRITICAL_GAP))
            {
                continue;
            }
            seeds.push(p);
        }
    }
    seeds.sort_by(|a, b| {
        let (a, b) = (a.finite().unwrap(), b.finite().unwrap());
        a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
    });
    seeds.truncate(MAX_SEEDS);
    if seeds.is_empty() {
        return Err(Error::Precondition(
            "no repelling periodic point of period at most two avoids the postcritical set".into(),
        ));
    }
    Ok(seeds)
}

/// Default tree depth for a map of degree `d`: the largest depth whose last
/// generation stays below the node target.
pub fn default_depth(map: &RationalMap) -> usize {
    let d = map.degree().max(2);
    let mut depth = 0;
    let mut n = 1usize;
    while n.saturating_mul(d) <= NODE_TARGET {
        n *= d;
        depth += 1;
    }
    depth
}

/// Backward trees from the Julia seeds, reduced to the log-derivatives of
/// each generation, for repeated pressure evaluations.
#[derive(Clone, Debug)]
pub struct PressureSampler {
    pub depth: usize,
    pub seeds: Vec<SpherePoint>,
    /// `logs[s][k]` are `log |(R^k)'(z)|` over generation `k` of seed `s`.
    logs: Vec<Vec<Vec<f64>>>,
    /// Number of branches dropped through critical points.
    pub excluded_branches: usize,
    pub hyperbolic: bool,
}

impl PressureSampler {
    pub fn new(map: &RationalMap, depth: usize, metric: &MetricSpec) -> Result<Self> {
        if depth < 2 {
            return Err(Error::InsufficientDepth("pressure needs depth at least two".into()));
        }
        let seeds = julia_seeds(map)?;
        let mut logs = Vec::with_capacity(seeds.len());
        let mut excluded = 0usize;
        for s in &seeds {
            let budget = 4 * map.degree().pow(depth as u32) + 16;
            let tree = unramified_tree(map, s, depth, metric, budget)?;
            let gens: Vec<Vec<f64>> = (0..=depth)
                .map(|k| tree.generation(k).iter().map(|n| n.log_derivative).collect())
                .collect();
            excluded += map.degree().pow(depth as u32) - gens[depth].len();
            logs.push(gens);
        }
        Ok(PressureSampler {
            depth,
            seeds,
            logs,
            excluded_branches: excluded,
            hyperbolic: is_hyperbolic(map),
        })
    }

    fn log_z(values: &[f64], delta: f64) -> f64 {
        let top = values.iter().map(|l| -delta * l).fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return top;
        }
        top + crate::measure::neumaier_sum(values.iter().map(|l| (-delta * l - top).exp())).ln()
    }

    /// `log Z_n - log Z_{n-1}` averaged over seeds, with
    /// `Z_n = Σ_{z ∈ R^{-n}(seed)} |(R^n)'(z)|^{-δ}`.
    pub fn pressure_at(&self, delta: f64, depth: usize) -> f64 {
        let depth = depth.clamp(1, self.depth);
        let total: f64 = self
            .logs
            .iter()
            .map(|g| Self::log_z(&g[depth], delta) - Self::log_z(&g[depth - 1], delta))
            .sum();
        total / self.logs.len() as f64
    }

    pub fn pressure(&self, delta: f64) -> f64 {
        self.pressure_at(delta, self.depth)
    }

    /// Root of `δ -> P(δ)` at the given depth by bisection on `[0, 3]`.
    pub fn root_at(&self, depth: usize, tol: f64) -> Result<f64> {
        let (mut lo, mut hi) = (0.0f64, 3.0f64);
        if self.pressure_at(lo, depth) <= 0.0 || self.pressure_at(hi, depth) >= 0.0 {
            return Err(Error::InsufficientDepth(format!(
                "pressure does not change sign on [0, 3] at depth {depth}"
            )));
        }
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if self.pressure_at(mid, depth) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Pressure of `-δ log |R'|` from preimage sums at the given depth.
pub fn pressure(map: &RationalMap, delta: f64, depth: usize, metric: &MetricSpec) -> Result<f64> {
    Ok(PressureSampler::new(map, depth, metric)?.pressure(delta))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PressureSample {
    pub delta: f64,
    pub pressure: f64,
    pub depth: usize,
    /// Set when the sample does not decrease from the previous one.
    pub flag: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PressureCurve {
    pub samples: Vec<PressureSample>,
    /// Consecutive sample exponents between which the pressure changes sign.
    pub bracket: Option<(f64, f64)>,
    pub monotone: bool,
    pub hyperbolic: bool,
}

pub fn pressure_curve(map: &RationalMap, deltas: &[f64], depth: usize, metric: &MetricSpec) -> Result<PressureCurve> {
    let sampler = PressureSampler::new(map, depth, metric)?;
    let mut samples: Vec<PressureSample> = Vec::with_capacity(deltas.len());
    let mut monotone = true;
    for &delta in deltas {
        let p = sampler.pressure(delta);
        let mut flag = false;
        if let Some(prev) = samples.last() {
            if delta > prev.delta && p >= prev.pressure {
                flag = true;
                monotone = false;
            }
        }
        samples.push(PressureSample {
            delta,
            pressure: p,
            depth,
            flag,
        });
    }
    let bracket = samples
        .windows(2)
        .find(|w| w[0].pressure > 0.0 && w[1].pressure <= 0.0)
        .map(|w| (w[0].delta, w[1].delta));
    Ok(PressureCurve {
        samples,
        bracket,
        monotone,
        hyperbolic: sampler.hyperbolic,
    })
}

/// Root of the pressure with an error bar from the spread over depths.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionEstimate {
    pub value: f64,
    pub error: f64,
    /// The map is not hyperbolic; the estimator carries no guarantee.
    pub non_rigorous: bool,
    /// `(depth, root)` pairs the estimate was formed from.
    pub by_depth: Vec<(usize, f64)>,
}

pub fn bowen_dimension(map: &RationalMap, tol: f64) -> Result<DimensionEstimate> {
    bowen_dimension_at(map, default_depth(map), tol)
}

pub fn bowen_dimension_at(map: &RationalMap, depth: usize, tol: f64) -> Result<DimensionEstimate> {
    if depth < 6 {
        return Err(Error::InsufficientDepth(
            "dimension estimates need depth at least six".into(),
        ));
    }
    let sampler = PressureSampler::new(map, depth, &MetricSpec::default_for(map))?;
    let mut by_depth = Vec::new();
    for k in [depth - 4, depth - 2, depth] {
        by_depth.push((k, sampler.root_at(k, tol)?));
    }
    let value = by_depth[2].1;
    let spread = by_depth.iter().map(|(_, r)| (r - value).abs()).fold(0.0, f64::max);
    Ok(DimensionEstimate {
        value,
        error: spread.max(ERROR_FLOOR).max(tol),
        non_rigorous: !sampler.hyperbolic,
        by_depth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn square_map_pressure_is_linear() {
        let m = RationalMap::quadratic(Complex64::new(0.0, 0.0));
        let s = PressureSampler::new(&m, 8, &MetricSpec::Flat).unwrap();
        for delta in [0.0, 0.5, 1.0, 1.5] {
            assert!((s.pressure(delta) - 2f64.ln() * (1.0 - delta)).abs() < 1e-9);
        }
        assert!(s.hyperbolic);
    }

    #[test]
    fn seeds_avoid_postcritical_cycle() {
        let m = RationalMap::quadratic(Complex64::new(0.0, 1.0));
        let seeds = julia_seeds(&m).unwrap();
        assert!(!seeds.iter().any(|s| s.approx_eq(&SpherePoint::new(-1.0, 1.0), 1e-6)));
        assert!(!is_hyperbolic(&m));
    }

    #[test]
    fn curve_flags_and_bracket() {
        let m = RationalMap::quadratic(Complex64::new(0.0, 0.0));
        let c = pressure_curve(&m, &[0.0, 0.5, 1.5, 2.0], 6, &MetricSpec::Flat).unwrap();
        assert!(c.monotone);
        assert_eq!(c.bracket, Some((0.5, 1.5)));
    }
}
