//! Rational maps on the Riemann sphere and the data classifying the KMS
//! states of their transformation groupoids: critical and orbit structure,
//! isotropy, cocycle weights, Poincaré sums, conformal measures and
//! extremal-state counts.
//!
//! ```
//! use kms_dynamics::groupoid::{kms_census, CocycleSpec};
//! use kms_dynamics::orbit::{Assumptions, Region};
//! use kms_dynamics::parse_map;
//! use kms_dynamics::sphere::Params;
//!
//! let map = parse_map("z^2", &Params::new())?;
//! let c = kms_census(&map, Region::Julia, 2f64.ln(), &CocycleSpec::Gauge, &Assumptions::default())?;
//! assert_eq!(c.total, 1);
//! # Ok::<(), kms_dynamics::Error>(())
//! ```

pub mod error;
pub mod groupoid;
pub mod measure;
pub mod orbit;
pub mod sphere;
pub mod thermo;

pub use error::{Error, Result};
pub use sphere::{parse_map, Chart, MetricSpec, RationalMap, SpherePoint};

/// Version of the serialized report formats.
pub const SCHEMA_VERSION: u32 = 1;
