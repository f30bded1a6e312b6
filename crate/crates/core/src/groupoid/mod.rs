//! Isotropy, transfer weights, Poincaré series, atomic conformal measures,
//! conformality residuals and the census of extremal KMS states.

mod census;
mod isotropy;
mod poincare;
mod residual;
mod reweight;
mod transfer;

pub use census::{
    kms_census, kms_census_with, CensusOptions, CensusOutcome, ExtremalState, KmsCensus, MeasureHandle, Provenance,
    CRITICAL_BETA_TOL,
};
pub use isotropy::{isotropy_class, orbit_consistent, IsotropyClass};
pub use poincare::{
    atomic_measure, atomic_measure_with, class_measure, poincare_partial_sums, poincare_series, AtomicConformalMeasure,
    PoincareSeries, RootLink, SeriesOptions, Summability,
};
pub use residual::{
    conformality_residual, interval_partition, sector_partition, Cell, Notion, ResidualEntry, ResidualReport,
    ResidualTests, TestSet,
};
pub use reweight::{reweight_cocycle, reweight_measure};
pub use transfer::{
    cocycle_value, log_transfer_weight, transfer_weight, CocycleSpec, Potential, TransferPath, PATH_TOL,
};

use num_complex::Complex64;

use crate::sphere::{Poly, RationalMap};

/// `λ (1 - 2/z)^2`, whose critical point 0 has a one-point grand orbit.
pub fn rees_map(lambda: Complex64) -> RationalMap {
    let p = Poly::new(vec![lambda * 4.0, lambda * -4.0, lambda]);
    let q = Poly::monomial(Complex64::new(1.0, 0.0), 2);
    RationalMap::new(p, q).expect("λ must be non-zero")
}
