//! Points of the Riemann sphere, metrics and rational maps.

pub mod exact;
mod map;
mod metric;
mod parse;
mod point;
mod poly;
pub mod roots;

pub use map::{CriticalPoint, LocalSeries, Preimage, RationalMap, VALENCY_REL_TOL};
pub use metric::{BaseMetric, MetricSpec, Weight};
pub use parse::{parse_expr, parse_map, Expr, Params};
pub use point::{Chart, SpherePoint, CLUSTER_TOL, POINT_TOL};
pub use poly::Poly;

impl MetricSpec {
    /// Flat for polynomials (whose Julia sets avoid infinity), chordal otherwise.
    pub fn default_for(map: &RationalMap) -> MetricSpec {
        if map.is_polynomial() {
            MetricSpec::Flat
        } else {
            MetricSpec::Chordal
        }
    }
}
