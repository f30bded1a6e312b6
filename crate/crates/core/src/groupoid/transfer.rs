use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sphere::{Chart, MetricSpec, RationalMap, SpherePoint, Weight};

/// Endpoints of a path must agree to this chordal distance.
pub const PATH_TOL: f64 = 1e-7;

/// A real potential on the sphere, for generalized cocycles.
pub type Potential = Weight;

/// The one-parameter action, given by its cocycle on the groupoid.
#[derive(Clone, Debug)]
pub enum CocycleSpec {
    /// `log |η'(x)|` in the given metric.
    Conformal { metric: MetricSpec },
    /// `k = n - l`.
    Gauge,
    /// Birkhoff differences of a potential.
    Generalized { f: Potential },
}

impl CocycleSpec {
    pub fn label(&self) -> String {
        match self {
            CocycleSpec::Conformal { metric } => format!("conformal({})", metric.label()),
            CocycleSpec::Gauge => "gauge".into(),
            CocycleSpec::Generalized { f } => format!("generalized({})", f.label()),
        }
    }

    /// Logarithmic Jacobian of one step of the map at `x`.
    pub fn log_jacobian(&self, map: &RationalMap, x: &SpherePoint) -> f64 {
        match self {
            CocycleSpec::Conformal { metric } => map.derivative_norm(x, metric).ln(),
            CocycleSpec::Gauge => 1.0,
            CocycleSpec::Generalized { f } => f.eval(x),
        }
    }

    /// Sampled continuity check of the potential: finite values and small
    /// oscillation under perturbations of size `1e-6`.
    pub fn check_potential(&self, samples: &[SpherePoint]) -> Result<()> {
        let CocycleSpec::Generalized { f } = self else {
            return Ok(());
        };
        for p in samples {
            let v = f.eval(p);
            if !v.is_finite() {
                return Err(Error::Precondition(format!("potential is not finite at {p}")));
            }
            let chart = p.canonical_chart();
            let t = p.coordinate(chart).expect("canonical chart");
            for dt in [1e-6, -1e-6] {
                for dir in [
                    num_complex::Complex64::new(dt, 0.0),
                    num_complex::Complex64::new(0.0, dt),
                ] {
                    let q = SpherePoint::from_coordinate(chart, t + dir);
                    let w = f.eval(&q);
                    if !w.is_finite() || (w - v).abs() > 1e-3 * v.abs().max(1.0) {
                        return Err(Error::Precondition(format!("potential looks discontinuous at {p}")));
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for CocycleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// A germ of local transfer from `source` to `target`, specified by
/// `R^n(source) = R^l(target)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransferPath {
    pub source: SpherePoint,
    pub target: SpherePoint,
    pub n: usize,
    pub l: usize,
    /// Index of the target in the backward tree it was taken from.
    pub branch: Option<usize>,
    /// `val(R^n, source) = val(R^l, target)`.
    pub valency: usize,
}

impl TransferPath {
    pub fn new(map: &RationalMap, source: SpherePoint, n: usize, target: SpherePoint, l: usize) -> Result<Self> {
        let a = map.iterate(n, &source);
        let b = map.iterate(l, &target);
        if !a.approx_eq(&b, PATH_TOL) {
            return Err(Error::DegeneratePath(format!(
                "R^{n}({source}) = {a} but R^{l}({target}) = {b}"
            )));
        }
        let vs = map.valency_iterate(n, &source);
        let vt = map.valency_iterate(l, &target);
        if vs != vt {
            return Err(Error::DegeneratePath(format!(
                "valencies differ: val(R^{n}, {source}) = {vs}, val(R^{l}, {target}) = {vt}"
            )));
        }
        Ok(TransferPath {
            source,
            target,
            n,
            l,
            branch: None,
            valency: vs,
        })
    }

    pub fn with_branch(mut self, branch: usize) -> Self {
        self.branch = Some(branch);
        self
    }

    /// The path `source -> other.target` obtained by following `self` then `other`.
    pub fn then(&self, other: &TransferPath, map: &RationalMap) -> Result<TransferPath> {
        if !self.target.approx_eq(&other.source, PATH_TOL) {
            return Err(Error::DegeneratePath("paths are not composable".into()));
        }
        TransferPath::new(map, self.source, self.n + other.n, other.target, self.l + other.l)
    }

    pub fn inverse(&self) -> TransferPath {
        TransferPath {
            source: self.target,
            target: self.source,
            n: self.l,
            l: self.n,
            branch: None,
            valency: self.valency,
        }
    }
}

/// Leading local behaviour of `R^steps` at `x`: `log |a|` and the order `j`
/// in `R^steps(x + u) ≈ R^steps(x) + a u^j`, from the canonical chart of `x`
/// (or `end` when `steps == 0`) into the chart `end`.
fn leading_term(map: &RationalMap, x: &SpherePoint, steps: usize, end: Chart) -> Result<(f64, usize, Chart)> {
    if steps == 0 {
        return Ok((0.0, 1, end));
    }
    let pts = map.orbit(x, steps);
    let start = x.canonical_chart();
    let mut src = start;
    let mut log_a = 0.0;
    let mut order = 1usize;
    for i in 0..steps {
        let tgt = if i + 1 == steps {
            end
        } else {
            pts[i + 1].canonical_chart()
        };
        let v = map.valency(&pts[i]);
        let series = map
            .local_series_in(&pts[i], src, tgt, v)
            .ok_or_else(|| Error::DegeneratePath(format!("chart mismatch at {}", pts[i])))?;
        let c = series.coeffs[v].norm();
        if c == 0.0 || !c.is_finite() {
            return Err(Error::DegeneratePath(format!(
                "vanishing leading coefficient of order {v} at {}",
                pts[i]
            )));
        }
        log_a = c.ln() + v as f64 * log_a;
        order *= v;
        src = tgt;
    }
    Ok((log_a, order, start))
}

/// `log l_x(z)`: the logarithm of the metric norm of the transfer germ's
/// derivative at the source.
pub fn log_transfer_weight(map: &RationalMap, path: &TransferPath, metric: &MetricSpec) -> Result<f64> {
    let end = map.iterate(path.n, &path.source).canonical_chart();
    let (la, ja, sa) = leading_term(map, &path.source, path.n, end)?;
    let (lb, jb, sb) = leading_term(map, &path.target, path.l, end)?;
    if ja != jb {
        return Err(Error::DegeneratePath(format!(
            "leading orders differ: {ja} at the source, {jb} at the target"
        )));
    }
    let u = path
        .source
        .coordinate(sa)
        .ok_or_else(|| Error::DegeneratePath("source chart".into()))?;
    let v = path
        .target
        .coordinate(sb)
        .ok_or_else(|| Error::DegeneratePath("target chart".into()))?;
    Ok((la - lb) / ja as f64 + metric.density(sb, v).ln() - metric.density(sa, u).ln())
}

/// `l_x(z)`.
pub fn transfer_weight(map: &RationalMap, path: &TransferPath, metric: &MetricSpec) -> Result<f64> {
    log_transfer_weight(map, path, metric).map(f64::exp)
}

/// Value of the cocycle on the germ described by `path`.
pub fn cocycle_value(spec: &CocycleSpec, path: &TransferPath, map: &RationalMap) -> Result<f64> {
    match spec {
        CocycleSpec::Conformal { metric } => log_transfer_weight(map, path, metric),
        CocycleSpec::Gauge => Ok(path.n as f64 - path.l as f64),
        CocycleSpec::Generalized { f } => {
            let xs = map.orbit(&path.source, path.n);
            let zs = map.orbit(&path.target, path.l);
            let a: f64 = xs[..path.n].iter().map(|p| f.eval(p)).sum();
            let b: f64 = zs[..path.l].iter().map(|p| f.eval(p)).sum();
            Ok(a - b)
        }
    }
}
