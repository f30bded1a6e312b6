//! Non-atomic measures: the measure of maximal entropy, pressure and the
//! dimension of the Julia set, and conformal eigenmeasures.

mod measures;
mod pressure;

pub use measures::{
    arcsine_cdf, conformal_eigenmeasure, grid_drift, ks_distance, lyubich_measure, read_cloud, write_cloud, write_csv,
    DiscretizedMeasure, MeasureKind, CLOUD_MAGIC, CLOUD_VERSION, DRIFT_TOL, MAX_ITERATIONS,
};
pub use pressure::{
    bowen_dimension, bowen_dimension_at, default_depth, is_hyperbolic, julia_seeds, pressure, pressure_curve,
    DimensionEstimate, PressureCurve, PressureSample, PressureSampler,
};
