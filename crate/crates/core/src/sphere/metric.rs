use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::point::{Chart, SpherePoint};

/// Unweighted metric underlying a [`MetricSpec`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaseMetric {
    /// Euclidean `|dz|`; infinite density at the point at infinity.
    Flat,
    /// Spherical metric `|dz| / (1 + |z|^2)`.
    Chordal,
}

/// A strictly positive weight function `r` on the sphere.
#[derive(Clone)]
pub struct Weight {
    label: String,
    f: Arc<dyn Fn(&SpherePoint) -> f64 + Send + Sync>,
}

impl Weight {
    pub fn new(label: impl Into<String>, f: impl Fn(&SpherePoint) -> f64 + Send + Sync + 'static) -> Self {
        Weight {
            label: label.into(),
            f: Arc::new(f),
        }
    }

    pub fn constant(c: f64) -> Self {
        Weight::new(format!("{c:?}"), move |_| c)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, p: &SpherePoint) -> f64 {
        (self.f)(p)
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Weight").field(&self.label).finish()
    }
}

/// Metric on the sphere used to measure derivatives.
#[derive(Clone, Debug)]
pub enum MetricSpec {
    Flat,
    Chordal,
    /// `r * g` for a base metric `g`.
    Weighted {
        base: BaseMetric,
        weight: Weight,
    },
}

impl MetricSpec {
    pub fn weighted(base: BaseMetric, weight: Weight) -> Self {
        MetricSpec::Weighted { base, weight }
    }

    pub fn base(&self) -> BaseMetric {
        match self {
            MetricSpec::Flat => BaseMetric::Flat,
            MetricSpec::Chordal => BaseMetric::Chordal,
            MetricSpec::Weighted { base, .. } => *base,
        }
    }

    pub fn weight(&self) -> Option<&Weight> {
        match self {
            MetricSpec::Weighted { weight, .. } => Some(weight),
            _ => None,
        }
    }

    /// Value of the weight at `p` (1 for unweighted metrics).
    pub fn weight_at(&self, p: &SpherePoint) -> f64 {
        self.weight().map_or(1.0, |w| w.eval(p))
    }

    /// Density of the metric with respect to `|dt|` in the chart coordinate
    /// `t` of `chart`.
    pub fn density(&self, chart: Chart, t: Complex64) -> f64 {
        let base = match (self.base(), chart) {
            (BaseMetric::Chordal, _) => 1.0 / (1.0 + t.norm_sqr()),
            (BaseMetric::Flat, Chart::Z) => 1.0,
            (BaseMetric::Flat, Chart::W) => 1.0 / t.norm_sqr(),
        };
        match self.weight() {
            Some(w) => base * w.eval(&SpherePoint::from_coordinate(chart, t)),
            None => base,
        }
    }

    pub fn label(&self) -> String {
        match self {
            MetricSpec::Flat => "flat".into(),
            MetricSpec::Chordal => "chordal".into(),
            MetricSpec::Weighted { base, weight } => {
                let b = match base {
                    BaseMetric::Flat => "flat",
                    BaseMetric::Chordal => "chordal",
                };
                format!("weighted({b}):{}", weight.label())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chordal_density_is_chart_independent() {
        let z = Complex64::new(1.3, -0.4);
        let dz = MetricSpec::Chordal.density(Chart::Z, z);
        // |dw| = |w|^2 |dz|
        let w = z.inv();
        let dw = MetricSpec::Chordal.density(Chart::W, w) * w.norm_sqr();
        assert!((dz - dw).abs() < 1e-15);
    }

    #[test]
    fn weighted_density_multiplies() {
        let m = MetricSpec::weighted(BaseMetric::Flat, Weight::constant(3.0));
        assert_eq!(m.density(Chart::Z, Complex64::new(0.2, 0.0)), 3.0);
        assert_eq!(m.label(), "weighted(flat):3.0");
    }
}
