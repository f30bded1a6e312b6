use serde::Serialize;

use super::isotropy::orbit_consistent;
use super::transfer::{cocycle_value, CocycleSpec, TransferPath};
use crate::error::{Error, Result};
use crate::measure::{neumaier_sum, normalize, Atom, PointMasses};
use crate::orbit::{
    grand_orbit_member, unramified_tree, BackwardTree, GrandOrbitClass, GrandOrbitVerdict, DEFAULT_HORIZON,
    DEFAULT_NODE_BUDGET,
};
use crate::sphere::{MetricSpec, RationalMap, SpherePoint};

/// Depth and tolerances for Poincaré sums and atomic measures.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesOptions {
    pub depth: usize,
    pub horizon: usize,
    /// The tail ratio must be below `1 - margin` (above `1 + margin`) for a
    /// summable (non-summable) verdict.
    pub ratio_margin: f64,
    /// Largest accepted tail estimate relative to the partial sum.
    pub tail_tol: f64,
    pub budget: usize,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        SeriesOptions {
            depth: 12,
            horizon: DEFAULT_HORIZON,
            ratio_margin: 0.05,
            tail_tol: 0.25,
            budget: DEFAULT_NODE_BUDGET,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Summability {
    /// The orbit is finite; the series is a finite sum.
    Finite,
    Summable,
    NotSummable,
    /// The tail ratio is within the margin of 1.
    Undecided,
}

/// Truncated Poincaré series `Σ l_x(z)^β` over the backward part of the
/// orbit of `x`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoincareSeries {
    pub beta: f64,
    pub spec: String,
    pub depth: usize,
    /// `increments[k]` is the contribution of generation `k`.
    pub increments: Vec<f64>,
    /// `partial_sums[k] = increments[0] + ... + increments[k]`.
    pub partial_sums: Vec<f64>,
    /// Least-squares slope of `log increments[k]` against `k`, `k >= 1`.
    pub growth_rate: Option<f64>,
    /// `(I_N / I_{N-3})^{1/3}`.
    pub tail_ratio: Option<f64>,
    pub tail_estimate: f64,
    pub verdict: Summability,
}

impl PoincareSeries {
    pub fn sum(&self) -> f64 {
        *self.partial_sums.last().unwrap_or(&0.0)
    }
}

fn tree_metric(spec: &CocycleSpec) -> MetricSpec {
    match spec {
        CocycleSpec::Conformal { metric } => metric.clone(),
        _ => MetricSpec::Chordal,
    }
}

/// Cocycle of the path `root -> node` for every node of an unramified tree.
fn tree_cocycles(tree: &BackwardTree, spec: &CocycleSpec) -> Vec<f64> {
    match spec {
        CocycleSpec::Conformal { .. } => tree.nodes.iter().map(|n| -n.log_derivative).collect(),
        CocycleSpec::Gauge => tree.nodes.iter().map(|n| -(n.generation as f64)).collect(),
        CocycleSpec::Generalized { f } => {
            let mut out = Vec::with_capacity(tree.nodes.len());
            for n in &tree.nodes {
                let v = match n.parent {
                    None => 0.0,
                    Some(p) => out[p] - f.eval(&n.point),
                };
                out.push(v);
            }
            out
        }
    }
}

fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some(sxy / sxx)
}

fn series_from_tree(
    map: &RationalMap,
    tree: &BackwardTree,
    cocycles: &[f64],
    beta: f64,
    spec: &CocycleSpec,
    opts: &SeriesOptions,
) -> PoincareSeries {
    let increments: Vec<f64> = (0..=tree.depth)
        .map(|k| {
            let range = tree.generations[k].clone();
            neumaier_sum(cocycles[range].iter().map(|c| (beta * c).exp()))
        })
        .collect();
    let partial_sums: Vec<f64> = (0..increments.len())
        .map(|k| neumaier_sum(increments[..=k].iter().copied()))
        .collect();
    let fit: Vec<(f64, f64)> = increments
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, v)| **v > 0.0)
        .map(|(k, v)| (k as f64, v.ln()))
        .collect();
    let growth_rate = least_squares_slope(&fit);
    let depth = tree.depth;
    let tail_ratio = if depth >= 3 && increments[depth] > 0.0 && increments[depth - 3] > 0.0 {
        Some((increments[depth] / increments[depth - 3]).powf(1.0 / 3.0))
    } else {
        None
    };
    let last = increments[depth];
    let geometric_tail = |r: f64| if r < 1.0 { last * r / (1.0 - r) } else { f64::INFINITY };
    let (verdict, tail_estimate) = if tree.died_out() {
        (Summability::Finite, 0.0)
    } else if let CocycleSpec::Gauge = spec {
        // increments are exactly (d e^{-β})^k
        let r = map.degree() as f64 * (-beta).exp();
        if beta > (map.degree() as f64).ln() {
            (Summability::Summable, geometric_tail(r))
        } else {
            (Summability::NotSummable, f64::INFINITY)
        }
    } else {
        match tail_ratio {
            Some(r) if r < 1.0 - opts.ratio_margin => (Summability::Summable, geometric_tail(r)),
            Some(r) if r > 1.0 + opts.ratio_margin => (Summability::NotSummable, f64::INFINITY),
            _ => (Summability::Undecided, f64::INFINITY),
        }
    };
    PoincareSeries {
        beta,
        spec: spec.label(),
        depth,
        increments,
        partial_sums,
        growth_rate,
        tail_ratio,
        tail_estimate,
        verdict,
    }
}

fn consistent_tree(
    map: &RationalMap,
    x: &SpherePoint,
    spec: &CocycleSpec,
    opts: &SeriesOptions,
) -> Result<BackwardTree> {
    if !orbit_consistent(map, x, opts.horizon) {
        return Err(Error::Precondition(format!(
            "the orbit of {x} is pre-periodic to a repelling or attracting cycle"
        )));
    }
    unramified_tree(map, x, opts.depth, &tree_metric(spec), opts.budget)
}

/// Poincaré series of `x` to the given depth with default tolerances.
pub fn poincare_partial_sums(
    map: &RationalMap,
    x: &SpherePoint,
    beta: f64,
    spec: &CocycleSpec,
    depth: usize,
) -> Result<PoincareSeries> {
    let opts = SeriesOptions {
        depth,
        ..SeriesOptions::default()
    };
    poincare_series(map, x, beta, spec, &opts)
}

pub fn poincare_series(
    map: &RationalMap,
    x: &SpherePoint,
    beta: f64,
    spec: &CocycleSpec,
    opts: &SeriesOptions,
) -> Result<PoincareSeries> {
    let tree = consistent_tree(map, x, spec, opts)?;
    let cocycles = tree_cocycles(&tree, spec);
    Ok(series_from_tree(map, &tree, &cocycles, beta, spec, opts))
}

/// A critical point of an orbit class and its germ to the base point:
/// `R^n(point) = R^m(base)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RootLink {
    pub point: SpherePoint,
    pub n: usize,
    pub m: usize,
}

/// Normalized `β`-conformal measure on a summable orbit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AtomicConformalMeasure {
    pub beta: f64,
    pub spec: String,
    pub base: SpherePoint,
    /// Normalized atoms.
    pub atoms: Vec<Atom>,
    /// `β c(base -> atom)`, the logarithm of the unnormalized weight.
    pub log_weights: Vec<f64>,
    pub generations: Vec<usize>,
    /// Index into `roots` of the tree each atom was taken from.
    pub root_of: Vec<usize>,
    pub roots: Vec<RootLink>,
    /// Sum of the unnormalized weights.
    pub normalization: f64,
    pub depth: usize,
    pub tail_estimate: f64,
    pub finite: bool,
}

impl PointMasses for AtomicConformalMeasure {
    fn atoms(&self) -> &[Atom] {
        &self.atoms
    }
}

impl AtomicConformalMeasure {
    /// A germ from atom `i` to atom `j`, through the base point.
    pub fn path_between(&self, map: &RationalMap, i: usize, j: usize) -> Result<TransferPath> {
        let (a, b) = (&self.roots[self.root_of[i]], &self.roots[self.root_of[j]]);
        TransferPath::new(
            map,
            self.atoms[i].point,
            self.generations[i] + a.n + b.m,
            self.atoms[j].point,
            self.generations[j] + b.n + a.m,
        )
    }

    pub fn is_dirac_at(&self, p: &SpherePoint, tol: f64) -> bool {
        self.atoms.len() == 1 && self.atoms[0].point.approx_eq(p, tol) && (self.atoms[0].weight - 1.0).abs() < 1e-12
    }

    fn from_parts(
        beta: f64,
        spec: &CocycleSpec,
        base: SpherePoint,
        parts: Vec<(RootLink, f64, BackwardTree, Vec<f64>)>,
        depth: usize,
        tail: f64,
        finite: bool,
    ) -> Self {
        let mut atoms = Vec::new();
        let mut log_weights = Vec::new();
        let mut generations = Vec::new();
        let mut root_of = Vec::new();
        let mut roots = Vec::new();
        for (r, (link, link_cocycle, tree, cocycles)) in parts.into_iter().enumerate() {
            for (node, c) in tree.nodes.iter().zip(&cocycles) {
                atoms.push(Atom {
                    point: node.point,
                    weight: 0.0,
                });
                log_weights.push(beta * (link_cocycle + c));
                generations.push(node.generation);
                root_of.push(r);
            }
            roots.push(link);
        }
        // shift before exponentiating; the shift cancels in the normalization
        let shift = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for (a, lw) in atoms.iter_mut().zip(&log_weights) {
            a.weight = (lw - shift).exp();
        }
        let normalization = normalize(&mut atoms) * shift.exp();
        // a second pass absorbs the rounding of the first division
        normalize(&mut atoms);
        AtomicConformalMeasure {
            beta,
            spec: spec.label(),
            base,
            atoms,
            log_weights,
            generations,
            root_of,
            roots,
            normalization,
            depth,
            tail_estimate: tail,
            finite,
        }
    }
}

fn check_summable(series: &PoincareSeries, opts: &SeriesOptions) -> Result<()> {
    match series.verdict {
        Summability::Finite => Ok(()),
        Summability::Summable if series.tail_estimate <= opts.tail_tol * series.sum() => Ok(()),
        Summability::Summable => Err(Error::NotSummable(format!(
            "tail estimate {:.3e} exceeds {} of the partial sum {:.3e} at depth {}",
            series.tail_estimate,
            opts.tail_tol,
            series.sum(),
            series.depth
        ))),
        Summability::NotSummable => Err(Error::NotSummable(format!(
            "the series diverges (tail ratio {:?})",
            series.tail_ratio
        ))),
        Summability::Undecided => Err(Error::NotSummable(format!(
            "tail ratio {:?} within the margin of 1 at depth {}",
            series.tail_ratio, series.depth
        ))),
    }
}

/// The conformal measure on the orbit of `x`, truncated at `depth`.
pub fn atomic_measure(
    map: &RationalMap,
    x: &SpherePoint,
    beta: f64,
    spec: &CocycleSpec,
    depth: usize,
) -> Result<AtomicConformalMeasure> {
    let opts = SeriesOptions {
        depth,
        ..SeriesOptions::default()
    };
    atomic_measure_with(map, x, beta, spec, &opts)
}

pub fn atomic_measure_with(
    map: &RationalMap,
    x: &SpherePoint,
    beta: f64,
    spec: &CocycleSpec,
    opts: &SeriesOptions,
) -> Result<AtomicConformalMeasure> {
    let tree = consistent_tree(map, x, spec, opts)?;
    let cocycles = tree_cocycles(&tree, spec);
    let series = series_from_tree(map, &tree, &cocycles, beta, spec, opts);
    check_summable(&series, opts)?;
    let link = RootLink { point: *x, n: 0, m: 0 };
    Ok(AtomicConformalMeasure::from_parts(
        beta,
        spec,
        *x,
        vec![(link, 0.0, tree, cocycles)],
        opts.depth,
        series.tail_estimate,
        series.verdict == Summability::Finite,
    ))
}

/// The conformal measure on the orbit of a class of critical points: the
/// union of the unramified backward trees of its members.
pub fn class_measure(
    map: &RationalMap,
    class: &GrandOrbitClass,
    beta: f64,
    spec: &CocycleSpec,
    opts: &SeriesOptions,
) -> Result<AtomicConformalMeasure> {
    let base = class.representative;
    let mut parts = Vec::new();
    let mut tail = 0.0;
    let mut finite = true;
    let mut total = 0.0;
    for c in &class.critical_members {
        let (n, m) = if c.approx_eq(&base, 0.0) {
            (0, 0)
        } else {
            match grand_orbit_member(map, c, &base, opts.horizon) {
                GrandOrbitVerdict::Member { n, m } => (n, m),
                GrandOrbitVerdict::NonMember { horizon } => {
                    return Err(Error::Inconclusive {
                        horizon,
                        reason: format!("no germ found between {c} and {base}"),
                    })
                }
            }
        };
        let link_cocycle = cocycle_value(spec, &TransferPath::new(map, base, m, *c, n)?, map)?;
        let tree = consistent_tree(map, c, spec, opts)?;
        let cocycles = tree_cocycles(&tree, spec);
        let series = series_from_tree(map, &tree, &cocycles, beta, spec, opts);
        let scale = (beta * link_cocycle).exp();
        total += scale * series.sum();
        tail += scale * series.tail_estimate;
        finite &= series.verdict == Summability::Finite;
        if series.verdict != Summability::Finite && series.verdict != Summability::Summable {
            check_summable(&series, opts)?;
        }
        parts.push((RootLink { point: *c, n, m }, link_cocycle, tree, cocycles));
    }
    if tail > opts.tail_tol * total {
        return Err(Error::NotSummable(format!(
            "tail estimate {tail:.3e} exceeds {} of the partial sum {total:.3e}",
            opts.tail_tol
        )));
    }
    Ok(AtomicConformalMeasure::from_parts(
        beta, spec, base, parts, opts.depth, tail, finite,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn gauge_rate_on_circle() {
        let m = RationalMap::quadratic(Complex64::new(0.0, 0.0));
        let x = SpherePoint::Finite(Complex64::from_polar(1.0, 1.0));
        let s = poincare_partial_sums(&m, &x, 1.0, &CocycleSpec::Gauge, 10).unwrap();
        let rate = s.growth_rate.unwrap();
        assert!((rate - (2f64.ln() - 1.0)).abs() < 1e-9);
        assert_eq!(s.verdict, Summability::Summable);
        for (k, inc) in s.increments.iter().enumerate() {
            assert!((inc - ((2f64.ln() - 1.0) * k as f64).exp()).abs() < 1e-9 * inc);
        }
    }

    #[test]
    fn repelling_preperiodic_orbit_is_rejected() {
        let m = RationalMap::quadratic(Complex64::new(-2.0, 0.0));
        let err = poincare_partial_sums(&m, &SpherePoint::ZERO, 1.0, &CocycleSpec::Gauge, 4);
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn normalized_measure_sums_to_one() {
        let m = RationalMap::quadratic(Complex64::new(0.0, 0.0));
        let x = SpherePoint::Finite(Complex64::from_polar(1.0, 1.0));
        let mu = atomic_measure(&m, &x, 2.0, &CocycleSpec::Gauge, 10).unwrap();
        assert!((mu.total_mass() - 1.0).abs() < 1e-12);
        assert!(mu.atoms.iter().all(|a| a.weight > 0.0));
        assert!(atomic_measure(&m, &x, 0.5, &CocycleSpec::Gauge, 10).is_err());
    }
}
