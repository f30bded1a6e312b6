use std::fmt;

use serde::Serialize;

use crate::orbit::{analyze_orbit, classify_cycle, CycleClass, OrbitRecord, OrbitVerdict, NEUTRAL_TOL, RETURN_TOL};
use crate::sphere::{RationalMap, SpherePoint};

/// Isomorphism type of the isotropy group at a point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IsotropyClass {
    /// Neither pre-critical nor pre-periodic.
    Trivial,
    /// Pre-periodic, not pre-critical.
    IntegerGroup,
    /// A subgroup of `Q/Z`. `orders` are the distinct values of
    /// `val(R^n, x)` seen up to the horizon; `infinite` is set when a
    /// critical point lies on the terminal cycle.
    TorsionQZ { orders: Vec<usize>, infinite: bool },
    /// `Z ⊕ Z_d` with `d = val(R^n, x)`, `n` the preperiod.
    IntegerCrossCyclic { d: usize },
    /// The orbit could not be resolved within the horizon.
    Inconclusive { horizon: usize, reason: String },
}

impl IsotropyClass {
    pub fn is_inconclusive(&self) -> bool {
        matches!(self, IsotropyClass::Inconclusive { .. })
    }

    /// Order of the torsion part, if finite.
    pub fn torsion_order(&self) -> Option<usize> {
        match self {
            IsotropyClass::Trivial | IsotropyClass::IntegerGroup => Some(1),
            IsotropyClass::TorsionQZ {
                orders,
                infinite: false,
            } => orders.last().copied(),
            IsotropyClass::IntegerCrossCyclic { d } => Some(*d),
            _ => None,
        }
    }
}

impl fmt::Display for IsotropyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsotropyClass::Trivial => write!(f, "trivial"),
            IsotropyClass::IntegerGroup => write!(f, "Z"),
            IsotropyClass::TorsionQZ { infinite: true, .. } => write!(f, "infinite subgroup of Q/Z"),
            IsotropyClass::TorsionQZ { orders, .. } => write!(f, "Z_{}", orders.last().copied().unwrap_or(1)),
            IsotropyClass::IntegerCrossCyclic { d } => write!(f, "Z⊕Z_{d}"),
            IsotropyClass::Inconclusive { .. } => write!(f, "inconclusive"),
        }
    }
}

/// Distinct running products of valencies along the first `n` orbit points.
fn observed_orders(map: &RationalMap, samples: &[SpherePoint]) -> Vec<usize> {
    let mut orders = Vec::new();
    let mut v = 1usize;
    for p in samples {
        v = v.saturating_mul(map.valency(p));
        if v > 1 && orders.last() != Some(&v) {
            orders.push(v);
        }
    }
    orders
}

pub fn isotropy_class(map: &RationalMap, x: &SpherePoint, horizon: usize) -> IsotropyClass {
    let rec = analyze_orbit(map, x, horizon, RETURN_TOL);
    isotropy_from_record(map, &rec, horizon)
}

fn isotropy_from_record(map: &RationalMap, rec: &OrbitRecord, horizon: usize) -> IsotropyClass {
    match &rec.verdict {
        OrbitVerdict::PrePeriodic { preperiod, cycle, .. } => {
            if cycle.iter().any(|p| map.valency(p) > 1) {
                // one pass around the cycle; later orders repeat the pattern
                let lap = (*preperiod + cycle.len()).min(rec.samples.len());
                return IsotropyClass::TorsionQZ {
                    orders: observed_orders(map, &rec.samples[..lap]),
                    infinite: true,
                };
            }
            let d = map.valency_iterate(*preperiod, &rec.base);
            if d > 1 {
                IsotropyClass::IntegerCrossCyclic { d }
            } else {
                IsotropyClass::IntegerGroup
            }
        }
        OrbitVerdict::Attracted { .. } | OrbitVerdict::NoCycleDetected { .. } => {
            if let OrbitVerdict::NoCycleDetected {
                slow_convergence: true, ..
            } = rec.verdict
            {
                if !rec.is_precritical() {
                    return IsotropyClass::Inconclusive {
                        horizon,
                        reason: "orbit converges too slowly to decide pre-periodicity".into(),
                    };
                }
            }
            if rec.is_precritical() {
                IsotropyClass::TorsionQZ {
                    orders: observed_orders(map, &rec.samples),
                    infinite: false,
                }
            } else {
                IsotropyClass::Trivial
            }
        }
    }
}

/// True when the isotropy at `x` is annihilated by every cocycle: the orbit
/// is not pre-periodic, or its cycle is neutral or critical.
pub fn orbit_consistent(map: &RationalMap, x: &SpherePoint, horizon: usize) -> bool {
    let rec = analyze_orbit(map, x, horizon, RETURN_TOL);
    consistent_from_record(map, &rec)
}

fn consistent_from_record(map: &RationalMap, rec: &OrbitRecord) -> bool {
    if !rec.is_preperiodic() {
        return true;
    }
    matches!(
        classify_cycle(map, rec, NEUTRAL_TOL),
        Ok(CycleClass::Neutral | CycleClass::Superattracting)
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn rees() -> RationalMap {
        crate::groupoid::rees_map(Complex64::new(0.75, 0.5))
    }

    #[test]
    fn witness_table() {
        let sq = RationalMap::quadratic(Complex64::new(0.0, 0.0));
        assert_eq!(
            isotropy_class(&sq, &SpherePoint::new(0.3, 0.1), 200),
            IsotropyClass::Trivial
        );
        assert_eq!(
            isotropy_class(&sq, &SpherePoint::real(1.0), 200),
            IsotropyClass::IntegerGroup
        );
        let cheb = RationalMap::quadratic(Complex64::new(-2.0, 0.0));
        assert_eq!(
            isotropy_class(&cheb, &SpherePoint::ZERO, 200),
            IsotropyClass::IntegerCrossCyclic { d: 2 }
        );
        let r = isotropy_class(&rees(), &SpherePoint::ZERO, 200);
        assert_eq!(
            r,
            IsotropyClass::TorsionQZ {
                orders: vec![2],
                infinite: false
            }
        );
        assert_eq!(r.to_string(), "Z_2");
    }

    #[test]
    fn periodic_critical_point_gives_infinite_torsion() {
        let sq = RationalMap::quadratic(Complex64::new(0.0, 0.0));
        let c = isotropy_class(&sq, &SpherePoint::ZERO, 50);
        assert!(matches!(c, IsotropyClass::TorsionQZ { infinite: true, .. }));
    }

    #[test]
    fn consistency_examples() {
        let cheb = RationalMap::quadratic(Complex64::new(-2.0, 0.0));
        assert!(!orbit_consistent(&cheb, &SpherePoint::ZERO, 200));
        let para = RationalMap::from_real(&[0.0, 1.0, 1.0, 0.25], &[1.0]).unwrap();
        assert!(orbit_consistent(&para, &SpherePoint::ZERO, 200));
        assert!(orbit_consistent(&rees(), &SpherePoint::ZERO, 200));
    }
}
