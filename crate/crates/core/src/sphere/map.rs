use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use super::exact::{ExactPoly, GaussRat};
use super::metric::MetricSpec;
use super::point::{fmt_complex, Chart, SpherePoint, CLUSTER_TOL};
use super::poly::Poly;
use super::roots::root_clusters;
use crate::error::{Error, Result};

/// Relative size below which a Taylor coefficient counts as zero.
pub const VALENCY_REL_TOL: f64 = 1e-8;
/// Chordal radius within which a point inherits the valency of a critical point.
const CRITICAL_SNAP: f64 = 1e-7;
const COMMON_ROOT_TOL: f64 = 1e-9;
const WRONSKIAN_TRIM: f64 = 1e-13;
const PREIMAGE_TRIM: f64 = 1e-14;

/// A critical point with its local degree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub point: SpherePoint,
    pub valency: usize,
    pub ill_conditioned: bool,
}

/// One point of a fibre `R^{-1}(w)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Preimage {
    pub point: SpherePoint,
    pub multiplicity: usize,
    pub ill_conditioned: bool,
}

/// Taylor expansion of the map at a point between two charts.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalSeries {
    pub source: Chart,
    pub target: Chart,
    /// Coordinate of the base point in the source chart.
    pub at: Complex64,
    /// `coeffs[0]` is the image coordinate in the target chart.
    pub coeffs: Vec<Complex64>,
}

impl LocalSeries {
    /// First index `k >= 1` whose coefficient is significant relative to the
    /// largest coefficient of positive order.
    pub fn order(&self) -> Option<usize> {
        let scale = self.coeffs.iter().skip(1).map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return None;
        }
        (1..self.coeffs.len()).find(|&k| self.coeffs[k].norm() > VALENCY_REL_TOL * scale)
    }
}

#[derive(Debug)]
struct ExactCharts {
    z: (ExactPoly, ExactPoly),
    w: (ExactPoly, ExactPoly),
}

/// A rational map `p/q` of degree `d = max(deg p, deg q) >= 1`.
///
/// The numerator and denominator are coprime and the denominator is monic.
#[derive(Clone, Debug)]
pub struct RationalMap {
    p: Poly,
    q: Poly,
    degree: usize,
    p_rev: Poly,
    q_rev: Poly,
    wz: Poly,
    ww: Poly,
    exact: Option<Arc<ExactCharts>>,
    critical: OnceLock<Vec<CriticalPoint>>,
}

impl PartialEq for RationalMap {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.q == other.q
    }
}

impl RationalMap {
    /// Builds `p/q`, cancelling common factors and normalizing `q` to be monic.
    pub fn new(p: Poly, q: Poly) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::DegenerateMap("denominator is identically zero".into()));
        }
        if p.is_zero() {
            return Err(Error::DegenerateMap("map is constant".into()));
        }
        let (p, q) = cancel_common_factors(p, q);
        let lead = q.leading();
        let p = p.scale(lead.inv());
        let q = q.scale(lead.inv());
        let degree = p.degree().unwrap_or(0).max(q.degree().unwrap_or(0));
        if degree == 0 {
            return Err(Error::DegenerateMap("map is constant".into()));
        }
        let p_rev = p.reversed(degree);
        let q_rev = q.reversed(degree);
        let wz = wronskian(&p, &q);
        let ww = wronskian(&p_rev, &q_rev);
        let exact = match (ExactPoly::recognize(&p), ExactPoly::recognize(&q)) {
            (Some(ep), Some(eq)) => {
                let w = (ep.reversed(degree), eq.reversed(degree));
                Some(Arc::new(ExactCharts { z: (ep, eq), w }))
            }
            _ => None,
        };
        Ok(RationalMap {
            p,
            q,
            degree,
            p_rev,
            q_rev,
            wz,
            ww,
            exact,
            critical: OnceLock::new(),
        })
    }

    pub fn from_real(p: &[f64], q: &[f64]) -> Result<Self> {
        RationalMap::new(Poly::from_real(p), Poly::from_real(q))
    }

    pub fn polynomial(coeffs: &[Complex64]) -> Result<Self> {
        RationalMap::new(Poly::new(coeffs.to_vec()), Poly::one())
    }

    /// `z^2 + c`.
    pub fn quadratic(c: Complex64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        RationalMap::polynomial(&[c, Complex64::new(0.0, 0.0), one]).expect("degree two")
    }

    pub fn numerator(&self) -> &Poly {
        &self.p
    }

    pub fn denominator(&self) -> &Poly {
        &self.q
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_polynomial(&self) -> bool {
        self.q.degree() == Some(0)
    }

    /// True when the map is a quadratic polynomial `a z^2 + b z + c`.
    pub fn is_quadratic_polynomial(&self) -> bool {
        self.is_polynomial() && self.degree == 2
    }

    /// True when all coefficients are recognized as small Gaussian rationals.
    pub fn has_exact_coefficients(&self) -> bool {
        self.exact.is_some()
    }

    pub fn chart_polys(&self, chart: Chart) -> (&Poly, &Poly) {
        match chart {
            Chart::Z => (&self.p, &self.q),
            Chart::W => (&self.p_rev, &self.q_rev),
        }
    }

    fn wronskian_in(&self, chart: Chart) -> &Poly {
        match chart {
            Chart::Z => &self.wz,
            Chart::W => &self.ww,
        }
    }

    /// Homogeneous value `(A, B)` of the map at `x`, computed in the
    /// canonical chart of `x`.
    fn homogeneous_value(&self, x: &SpherePoint) -> (Complex64, Complex64) {
        let chart = x.canonical_chart();
        let u = x.coordinate(chart).expect("canonical chart contains the point");
        let (a, b) = self.chart_polys(chart);
        (a.eval(u), b.eval(u))
    }

    pub fn eval(&self, x: &SpherePoint) -> SpherePoint {
        let (a, b) = self.homogeneous_value(x);
        SpherePoint::from_ratio(a, b)
    }

    pub fn iterate(&self, n: usize, x: &SpherePoint) -> SpherePoint {
        (0..n).fold(*x, |y, _| self.eval(&y))
    }

    /// `[x, R(x), ..., R^n(x)]`.
    pub fn orbit(&self, x: &SpherePoint, n: usize) -> Vec<SpherePoint> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(*x);
        for _ in 0..n {
            let y = self.eval(out.last().unwrap());
            out.push(y);
        }
        out
    }

    /// Composition `self ∘ other`.
    pub fn compose(&self, other: &RationalMap) -> Result<RationalMap> {
        let (a, b) = (&other.p, &other.q);
        let d = self.degree;
        let mut num = Poly::zero();
        let mut den = Poly::zero();
        for k in 0..=d {
            let term = &a.pow(k as u32) * &b.pow((d - k) as u32);
            num = &num + &term.scale(self.p.coeff(k));
            den = &den + &term.scale(self.q.coeff(k));
        }
        RationalMap::new(num, den)
    }

    /// `R^n` as an explicit map; intended for small `n` only.
    pub fn power(&self, n: usize) -> Result<RationalMap> {
        let mut out = RationalMap::polynomial(&[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)])?;
        for _ in 0..n {
            out = self.compose(&out)?;
        }
        Ok(out)
    }

    /// Taylor coefficients up to `order` at `x` from the chart `source` into the
    /// chart `target`, or `None` if either chart misses the relevant point.
    pub fn local_series_in(&self, x: &SpherePoint, source: Chart, target: Chart, order: usize) -> Option<LocalSeries> {
        let u = x.coordinate(source)?;
        let (a, b) = self.chart_polys(source);
        let (a, b) = (a.shift(u), b.shift(u));
        let (num, den) = match target {
            Chart::Z => (a, b),
            Chart::W => (b, a),
        };
        let d0 = den.coeff(0);
        if d0.norm() == 0.0 {
            return None;
        }
        let mut s: Vec<Complex64> = Vec::with_capacity(order + 1);
        for k in 0..=order {
            let mut acc = num.coeff(k);
            for i in 1..=k {
                acc -= den.coeff(i) * s[k - i];
            }
            s.push(acc / d0);
        }
        Some(LocalSeries {
            source,
            target,
            at: u,
            coeffs: s,
        })
    }

    /// Taylor coefficients in the canonical charts of `x` and `R(x)`.
    pub fn local_series(&self, x: &SpherePoint, order: usize) -> LocalSeries {
        let source = x.canonical_chart();
        let (a, b) = self.homogeneous_value(x);
        let target = if a.norm() <= b.norm() { Chart::Z } else { Chart::W };
        self.local_series_in(x, source, target, order)
            .expect("canonical charts are valid")
    }

    /// Norm of the differential at `x` with respect to `metric`, computed in
    /// the canonical chart of `x`.
    pub fn derivative_norm(&self, x: &SpherePoint, metric: &MetricSpec) -> f64 {
        let source = x.canonical_chart();
        let (a, b) = self.homogeneous_value(x);
        let target = if a.norm() <= b.norm() { Chart::Z } else { Chart::W };
        self.derivative_norm_in_charts(x, source, target, metric)
            .expect("canonical charts are valid")
    }

    /// Same as [`derivative_norm`](Self::derivative_norm) with explicit charts.
    pub fn derivative_norm_in_charts(
        &self,
        x: &SpherePoint,
        source: Chart,
        target: Chart,
        metric: &MetricSpec,
    ) -> Option<f64> {
        let u = x.coordinate(source)?;
        let (pa, pb) = self.chart_polys(source);
        let (a, b) = (pa.eval(u), pb.eval(u));
        let w = self.wronskian_in(source).eval(u);
        let (s1, t) = match target {
            Chart::Z => (w / (b * b), a / b),
            Chart::W => (-w / (a * a), b / a),
        };
        if !(t.re.is_finite() && t.im.is_finite()) {
            return None;
        }
        Some(s1.norm() * metric.density(target, t) / metric.density(source, u))
    }

    /// All critical points with local degree; multiplicities `valency - 1`
    /// sum to `2d - 2`.
    pub fn critical_points(&self) -> &[CriticalPoint] {
        self.critical.get_or_init(|| self.compute_critical_points())
    }

    fn compute_critical_points(&self) -> Vec<CriticalPoint> {
        if self.degree < 2 {
            return Vec::new();
        }
        let w = self.wz.trim_relative(WRONSKIAN_TRIM);
        let mut out: Vec<CriticalPoint> = root_clusters(&w)
            .into_iter()
            .map(|c| {
                let mut point = SpherePoint::Finite(c.root);
                let mut valency = c.multiplicity + 1;
                if let Some((snapped, v)) = self.exact_snap(&point) {
                    point = snapped;
                    valency = v;
                }
                CriticalPoint {
                    point,
                    valency,
                    ill_conditioned: c.ill_conditioned,
                }
            })
            .collect();
        let finite_deg = w.degree().unwrap_or(0);
        let at_infinity = (2 * self.degree - 2).saturating_sub(finite_deg);
        if at_infinity > 0 {
            out.push(CriticalPoint {
                point: SpherePoint::Infinity,
                valency: at_infinity + 1,
                ill_conditioned: false,
            });
        }
        out
    }

    /// Replaces a numerically found critical point by the exact rational it
    /// approximates, when the exact computation confirms it is critical.
    fn exact_snap(&self, x: &SpherePoint) -> Option<(SpherePoint, usize)> {
        let z = x.finite()?;
        let r = GaussRat::recognize(z)?;
        let snapped = SpherePoint::Finite(r.to_complex());
        let v = self.exact_valency(&snapped)?;
        (v >= 2).then_some((snapped, v))
    }

    pub fn critical_values(&self) -> Vec<SpherePoint> {
        self.critical_points().iter().map(|c| self.eval(&c.point)).collect()
    }

    /// The critical point nearest to `x` if it lies within `tol` (chordal).
    pub fn near_critical(&self, x: &SpherePoint, tol: f64) -> Option<&CriticalPoint> {
        self.critical_points()
            .iter()
            .map(|c| (c, c.point.chordal_distance(x)))
            .filter(|(_, d)| *d <= tol)
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(c, _)| c)
    }

    pub fn is_critical(&self, x: &SpherePoint, tol: f64) -> bool {
        self.near_critical(x, tol).is_some()
    }

    /// Local degree of the map at `x`.
    pub fn valency(&self, x: &SpherePoint) -> usize {
        if let Some(v) = self.exact_valency(x) {
            return v;
        }
        if let Some(c) = self.near_critical(x, CRITICAL_SNAP) {
            return c.valency;
        }
        self.taylor_valency(x)
    }

    /// Order of vanishing of `A(u+t)B(u) - A(u)B(u+t)` in floating point,
    /// thresholded relative to its largest coefficient.
    fn taylor_valency(&self, x: &SpherePoint) -> usize {
        let chart = x.canonical_chart();
        let u = x.coordinate(chart).expect("canonical chart");
        let (a, b) = self.chart_polys(chart);
        let (a, b) = (a.shift(u), b.shift(u));
        let diff = &a.scale(b.coeff(0)) - &b.scale(a.coeff(0));
        let scale = diff.max_abs();
        if scale == 0.0 {
            return 1;
        }
        (1..=self.degree)
            .find(|&k| diff.coeff(k).norm() > VALENCY_REL_TOL * scale)
            .unwrap_or(self.degree)
    }

    /// Exact local degree when the coefficients and the point are small
    /// Gaussian rationals.
    pub fn exact_valency(&self, x: &SpherePoint) -> Option<usize> {
        let charts = self.exact.as_ref()?;
        let (u, (a, b)) = match x {
            SpherePoint::Infinity => (GaussRat::zero(), &charts.w),
            SpherePoint::Finite(z) => {
                let r = GaussRat::recognize(*z)?;
                if z.norm_sqr() <= 1.0 {
                    (r, &charts.z)
                } else {
                    (r.inv()?, &charts.w)
                }
            }
        };
        let (a, b) = (a.shift(&u), b.shift(&u));
        let diff = a.scale(&b.coeff(0)).sub(&b.scale(&a.coeff(0)));
        diff.low_order()
    }

    /// Exact image of a Gaussian-rational point (`None` is infinity), or
    /// `None` when the coefficients are not exactly representable.
    pub fn eval_exact(&self, x: Option<&GaussRat>) -> Option<Option<GaussRat>> {
        let charts = self.exact.as_ref()?;
        let (p, q) = &charts.z;
        let (a, b) = match x {
            None => (p.coeff(self.degree), q.coeff(self.degree)),
            Some(z) => (p.eval(z), q.eval(z)),
        };
        Some(b.inv().map(|bi| &a * &bi))
    }

    /// `val(R^n, x)` as the product of valencies along the orbit.
    pub fn valency_iterate(&self, n: usize, x: &SpherePoint) -> usize {
        let mut y = *x;
        let mut v = 1usize;
        for _ in 0..n {
            v = v.saturating_mul(self.valency(&y));
            y = self.eval(&y);
        }
        v
    }

    /// The fibre over `w` with multiplicities summing to `d`.
    pub fn preimages(&self, w: &SpherePoint) -> Vec<Preimage> {
        let poly = match w {
            SpherePoint::Finite(v) if v.norm_sqr() <= 1.0 => &self.p - &self.q.scale(*v),
            SpherePoint::Finite(v) => &self.p.scale(v.inv()) - &self.q,
            SpherePoint::Infinity => self.q.clone(),
        };
        let poly = trim_leading(poly, PREIMAGE_TRIM);
        let finite_degree = poly.degree().unwrap_or(0);
        let mut out: Vec<Preimage> = root_clusters(&poly)
            .into_iter()
            .map(|c| Preimage {
                point: SpherePoint::Finite(c.root),
                multiplicity: c.multiplicity,
                ill_conditioned: c.ill_conditioned,
            })
            .collect();
        if finite_degree < self.degree {
            out.push(Preimage {
                point: SpherePoint::Infinity,
                multiplicity: self.degree - finite_degree,
                ill_conditioned: false,
            });
        }
        out
    }

    /// Number of germs of local transfers between `(n, x)` and `(m, y)`:
    /// `val(R^n, x)` if it equals `val(R^m, y)`, else zero.
    pub fn germ_count(&self, n: usize, x: &SpherePoint, m: usize, y: &SpherePoint) -> Result<usize> {
        let fx = self.iterate(n, x);
        let fy = self.iterate(m, y);
        if !fx.approx_eq(&fy, 1e-8) {
            return Err(Error::Precondition(format!(
                "R^{n}({x}) = {fx} differs from R^{m}({y}) = {fy}"
            )));
        }
        let vx = self.valency_iterate(n, x);
        let vy = self.valency_iterate(m, y);
        Ok(if vx == vy { vx } else { 0 })
    }
}

fn wronskian(a: &Poly, b: &Poly) -> Poly {
    &(&a.derivative() * b) - &(a * &b.derivative())
}

fn trim_leading(p: Poly, rel: f64) -> Poly {
    let cut = rel * p.max_abs();
    let mut v = p.coeffs().to_vec();
    while v.last().is_some_and(|c| c.norm() <= cut) {
        v.pop();
    }
    Poly::new(v)
}

/// Removes exact common powers of `z`, then common roots found numerically.
fn cancel_common_factors(p: Poly, q: Poly) -> (Poly, Poly) {
    let k = p.low_order().unwrap_or(0).min(q.low_order().unwrap_or(0));
    let mut p = Poly::new(p.coeffs()[k..].to_vec());
    let mut q = Poly::new(q.coeffs()[k..].to_vec());
    'restart: loop {
        if q.degree().unwrap_or(0) == 0 || p.degree().unwrap_or(0) == 0 {
            break;
        }
        for c in root_clusters(&q) {
            let r = c.root;
            let scale: f64 = p
                .coeffs()
                .iter()
                .enumerate()
                .map(|(i, a)| a.norm() * r.norm().powi(i as i32))
                .sum();
            let tol = COMMON_ROOT_TOL.max(c.spread * 10.0).min(CLUSTER_TOL);
            if p.eval(r).norm() <= tol * scale {
                p = p.deflate(r);
                q = q.deflate(r);
                continue 'restart;
            }
        }
        break;
    }
    (p, q)
}

impl fmt::Display for RationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, p: &Poly) -> fmt::Result {
            write!(f, "[")?;
            for (i, c) in p.coeffs().iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                fmt_complex(f, *c)?;
            }
            write!(f, "]")
        }
        list(f, &self.p)?;
        write!(f, " / ")?;
        list(f, &self.q)
    }
}

#[derive(Serialize)]
struct MapRepr {
    numerator: Vec<[f64; 2]>,
    denominator: Vec<[f64; 2]>,
    degree: usize,
}

impl Serialize for RationalMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs = |p: &Poly| p.coeffs().iter().map(|c| [c.re, c.im]).collect();
        MapRepr {
            numerator: pairs(&self.p),
            denominator: pairs(&self.q),
            degree: self.degree,
        }
        .serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn rees(lambda: f64) -> RationalMap {
        RationalMap::from_real(&[4.0 * lambda, -4.0 * lambda, lambda], &[0.0, 0.0, 1.0]).unwrap()
    }

    fn parabolic() -> RationalMap {
        // z (1 + z/2)^2 = z + z^2 + z^3/4
        RationalMap::from_real(&[0.0, 1.0, 1.0, 0.25], &[1.0]).unwrap()
    }

    #[test]
    fn common_factors_cancel() {
        // (z^2 - 1) / (z - 1) = z + 1
        let m = RationalMap::from_real(&[-1.0, 0.0, 1.0], &[-1.0, 1.0]).unwrap();
        assert_eq!(m.degree(), 1);
        assert_eq!(m.numerator(), &Poly::from_real(&[1.0, 1.0]));
        assert!(matches!(
            RationalMap::from_real(&[1.0, 1.0], &[1.0, 1.0]),
            Err(Error::DegenerateMap(_))
        ));
        assert!(matches!(
            RationalMap::from_real(&[1.0], &[]),
            Err(Error::DegenerateMap(_))
        ));
    }

    #[test]
    fn evaluation_examples() {
        let m = RationalMap::quadratic(c(-2.0));
        assert_eq!(m.eval(&SpherePoint::ZERO), SpherePoint::real(-2.0));
        assert_eq!(m.eval(&SpherePoint::Infinity), SpherePoint::Infinity);
        assert_eq!(parabolic().eval(&SpherePoint::real(-2.0)), SpherePoint::ZERO);
        let r = rees(0.7);
        assert_eq!(r.eval(&SpherePoint::real(2.0)), SpherePoint::ZERO);
        assert_eq!(r.eval(&SpherePoint::ZERO), SpherePoint::Infinity);
        assert!(r.eval(&SpherePoint::Infinity).approx_eq(&SpherePoint::real(0.7), 1e-15));
    }

    #[test]
    fn derivative_norm_examples() {
        let sq = RationalMap::quadratic(c(0.0));
        let on_circle = SpherePoint::Finite(Complex64::from_polar(1.0, 0.7));
        assert!((sq.derivative_norm(&on_circle, &MetricSpec::Flat) - 2.0).abs() < 1e-14);
        let cheb = RationalMap::quadratic(c(-2.0));
        assert!((cheb.derivative_norm(&SpherePoint::real(2.0), &MetricSpec::Flat) - 4.0).abs() < 1e-13);
        assert!((parabolic().derivative_norm(&SpherePoint::ZERO, &MetricSpec::Flat) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn chordal_derivative_formula() {
        let m = rees(0.3);
        let z = Complex64::new(1.4, -0.6);
        let rz = m.eval(&z.into()).finite().unwrap();
        // R'(z) = 4 lambda (z - 2) / z^3
        let d = (c(4.0 * 0.3) * (z - 2.0) / z.powu(3)).norm();
        let expect = d * (1.0 + z.norm_sqr()) / (1.0 + rz.norm_sqr());
        let got = m.derivative_norm(&z.into(), &MetricSpec::Chordal);
        assert!((got - expect).abs() < 1e-13 * expect);
    }

    #[test]
    fn critical_point_examples() {
        let q = RationalMap::quadratic(Complex64::new(0.3, 0.2));
        let cps = q.critical_points();
        assert_eq!(cps.len(), 2);
        assert!(cps.iter().any(|c| c.point == SpherePoint::ZERO && c.valency == 2));
        assert!(cps.iter().any(|c| c.point.is_infinity() && c.valency == 2));

        let r = rees(0.3);
        let pts: Vec<_> = r.critical_points().iter().map(|c| c.point).collect();
        assert!(pts.contains(&SpherePoint::ZERO));
        assert!(pts.contains(&SpherePoint::real(2.0)));

        let p = parabolic();
        let finite: Vec<_> = p
            .critical_points()
            .iter()
            .filter(|c| !c.point.is_infinity())
            .map(|c| c.point)
            .collect();
        assert_eq!(finite.len(), 2);
        assert!(finite.iter().any(|x| x.approx_eq(&SpherePoint::real(-2.0), 1e-12)));
        assert!(finite
            .iter()
            .any(|x| x.approx_eq(&SpherePoint::real(-2.0 / 3.0), 1e-12)));
        // infinity has valency 3 for a cubic polynomial
        assert!(p
            .critical_points()
            .iter()
            .any(|c| c.point.is_infinity() && c.valency == 3));
    }

    #[test]
    fn valency_examples() {
        let sq = RationalMap::quadratic(c(0.0));
        assert_eq!(sq.valency(&SpherePoint::ZERO), 2);
        assert_eq!(sq.valency(&SpherePoint::real(1.0)), 1);
        assert_eq!(rees(0.3).valency(&SpherePoint::real(2.0)), 2);
        assert_eq!(rees(std::f64::consts::E).valency(&SpherePoint::real(2.0)), 2);
        let cheb = RationalMap::quadratic(c(-2.0));
        assert_eq!(cheb.valency_iterate(2, &SpherePoint::ZERO), 2);
        assert_eq!(cheb.valency_iterate(0, &SpherePoint::ZERO), 1);
        assert_eq!(sq.valency_iterate(3, &SpherePoint::ZERO), 8);
    }

    #[test]
    fn taylor_valency_matches_exact() {
        let m = RationalMap::from_real(&[0.0, 0.0, 0.0, 1.0], &[1.0, 0.0, 0.5]).unwrap();
        for x in [SpherePoint::ZERO, SpherePoint::Infinity, SpherePoint::real(0.5)] {
            assert_eq!(m.taylor_valency(&x), m.exact_valency(&x).unwrap(), "{x}");
        }
    }

    #[test]
    fn preimage_examples() {
        let sq = RationalMap::quadratic(c(0.0));
        let f = sq.preimages(&SpherePoint::real(4.0));
        assert_eq!(f.len(), 2);
        assert!(f.iter().all(|p| p.multiplicity == 1));
        assert!(f.iter().any(|p| p.point.approx_eq(&SpherePoint::real(2.0), 1e-14)));
        assert!(f.iter().any(|p| p.point.approx_eq(&SpherePoint::real(-2.0), 1e-14)));

        let r = rees(0.3).preimages(&SpherePoint::ZERO);
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].multiplicity, 2);
        assert!(r[0].point.approx_eq(&SpherePoint::real(2.0), 1e-12));

        let p = parabolic().preimages(&SpherePoint::ZERO);
        assert_eq!(p.len(), 2);
        assert!(p.iter().any(|x| x.point == SpherePoint::ZERO && x.multiplicity == 1));
        assert!(p
            .iter()
            .any(|x| x.point.approx_eq(&SpherePoint::real(-2.0), 1e-12) && x.multiplicity == 2));

        let inf = sq.preimages(&SpherePoint::Infinity);
        assert_eq!(
            inf,
            vec![Preimage {
                point: SpherePoint::Infinity,
                multiplicity: 2,
                ill_conditioned: false
            }]
        );
    }

    #[test]
    fn germ_count_examples() {
        let sq = RationalMap::quadratic(c(0.0));
        let one = SpherePoint::real(1.0);
        let minus = SpherePoint::real(-1.0);
        assert_eq!(sq.germ_count(1, &one, 1, &minus).unwrap(), 1);
        assert_eq!(sq.germ_count(1, &SpherePoint::ZERO, 1, &SpherePoint::ZERO).unwrap(), 2);
        let r = rees(0.3);
        assert_eq!(
            r.germ_count(1, &SpherePoint::ZERO, 2, &SpherePoint::real(2.0)).unwrap(),
            0
        );
        assert!(sq.germ_count(1, &one, 1, &SpherePoint::real(0.5)).is_err());
    }

    #[test]
    fn composition_degree_multiplies() {
        let r = rees(0.3);
        let r2 = r.power(2).unwrap();
        assert_eq!(r2.degree(), 4);
        let x = SpherePoint::new(0.4, 1.1);
        assert!(r2.eval(&x).approx_eq(&r.iterate(2, &x), 1e-12));
    }

    #[test]
    fn display_round_trip_text() {
        let m = RationalMap::from_real(&[-2.0, 0.0, 1.0], &[1.0]).unwrap();
        assert_eq!(m.to_string(), "[-2.0, 0.0, 1.0] / [1.0]");
    }
}
