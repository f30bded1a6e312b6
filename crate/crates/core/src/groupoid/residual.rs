use num_complex::Complex64;
use serde::Serialize;

use super::transfer::{cocycle_value, CocycleSpec, TransferPath};
use crate::error::{Error, Result};
use crate::measure::{neumaier_sum, Atom, PointMasses};
use crate::sphere::{RationalMap, SpherePoint, POINT_TOL};

/// Atoms closer than this are the same point.
const ATOM_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Notion {
    /// `m(R(A)) = ∫_A exp(β log-Jacobian) dm` on injectivity sets.
    Ordinary,
    /// `m({z}) = l_x(z)^β m({x})` along local transfers.
    Groupoid,
}

/// A simple Borel set in the plane.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Cell {
    /// `r0 <= |z - center| < r1`, argument in `[theta0, theta1)`.
    Sector {
        center: Complex64,
        r0: f64,
        r1: f64,
        theta0: f64,
        theta1: f64,
    },
    /// Points of the real segment `[a, b)`.
    Interval {
        a: f64,
        b: f64,
    },
    Disk {
        center: Complex64,
        radius: f64,
    },
    Rect {
        re0: f64,
        re1: f64,
        im0: f64,
        im1: f64,
    },
}

impl Cell {
    pub fn contains(&self, p: &SpherePoint) -> bool {
        let Some(z) = p.finite() else {
            return false;
        };
        match *self {
            Cell::Sector {
                center,
                r0,
                r1,
                theta0,
                theta1,
            } => {
                let w = z - center;
                let r = w.norm();
                if r < r0 || r >= r1 {
                    return false;
                }
                let span = theta1 - theta0;
                let t = (w.arg() - theta0).rem_euclid(std::f64::consts::TAU);
                t < span
            }
            Cell::Interval { a, b } => z.im.abs() <= POINT_TOL && z.re >= a && z.re < b,
            Cell::Disk { center, radius } => (z - center).norm() < radius,
            Cell::Rect { re0, re1, im0, im1 } => z.re >= re0 && z.re < re1 && z.im >= im0 && z.im < im1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestSet {
    Points { points: Vec<SpherePoint> },
    Cell { cell: Cell },
}

/// What a residual is checked against.
#[derive(Clone, Debug)]
pub enum ResidualTests {
    Sets(Vec<TestSet>),
    Paths(Vec<TransferPath>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualEntry {
    pub index: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub notion: Notion,
    pub beta: f64,
    pub entries: Vec<ResidualEntry>,
    pub max_residual: f64,
}

impl ResidualReport {
    fn new(notion: Notion, beta: f64, entries: Vec<ResidualEntry>) -> Self {
        let max_residual = entries.iter().map(|e| e.residual).fold(0.0, f64::max);
        ResidualReport {
            notion,
            beta,
            entries,
            max_residual,
        }
    }
}

/// Checks the conformality relation of `measure` on the given tests.
///
/// `Ordinary` takes test sets and `Groupoid` takes transfer paths.
pub fn conformality_residual(
    measure: &(impl PointMasses + ?Sized),
    map: &RationalMap,
    beta: f64,
    spec: &CocycleSpec,
    notion: Notion,
    tests: &ResidualTests,
) -> Result<ResidualReport> {
    match (notion, tests) {
        (Notion::Groupoid, ResidualTests::Paths(paths)) => {
            let mut entries = Vec::with_capacity(paths.len());
            for (index, path) in paths.iter().enumerate() {
                let c = cocycle_value(spec, path, map)?;
                let lhs = measure.mass_at(&path.target, ATOM_TOL);
                let mx = measure.mass_at(&path.source, ATOM_TOL);
                let rhs = if mx == 0.0 { 0.0 } else { (beta * c).exp() * mx };
                entries.push(ResidualEntry {
                    index,
                    lhs,
                    rhs,
                    residual: (lhs - rhs).abs(),
                });
            }
            Ok(ResidualReport::new(notion, beta, entries))
        }
        (Notion::Ordinary, ResidualTests::Sets(sets)) => ordinary(measure.atoms(), map, beta, spec, sets),
        _ => Err(Error::Precondition(
            "ordinary residuals take test sets, groupoid residuals take paths".into(),
        )),
    }
}

fn ordinary(
    atoms: &[Atom],
    map: &RationalMap,
    beta: f64,
    spec: &CocycleSpec,
    sets: &[TestSet],
) -> Result<ResidualReport> {
    // preimages of every atom, computed once
    let has_cells = sets.iter().any(|s| matches!(s, TestSet::Cell { .. }));
    let fibres: Vec<Vec<SpherePoint>> = if has_cells {
        atoms
            .iter()
            .map(|a| map.preimages(&a.point).into_iter().map(|p| p.point).collect())
            .collect()
    } else {
        Vec::new()
    };
    let mut entries = Vec::with_capacity(sets.len());
    for (index, set) in sets.iter().enumerate() {
        let (lhs, rhs) = match set {
            TestSet::Points { points } => {
                let images: Vec<SpherePoint> = points.iter().map(|p| map.eval(p)).collect();
                for i in 0..images.len() {
                    for j in (i + 1)..images.len() {
                        if images[i].approx_eq(&images[j], ATOM_TOL) && !points[i].approx_eq(&points[j], ATOM_TOL) {
                            return Err(Error::NotInjective {
                                index,
                                reason: format!("{} and {} have the same image", points[i], points[j]),
                            });
                        }
                    }
                }
                let mut distinct: Vec<SpherePoint> = Vec::new();
                for y in &images {
                    if !distinct.iter().any(|d| d.approx_eq(y, ATOM_TOL)) {
                        distinct.push(*y);
                    }
                }
                let lhs = neumaier_sum(distinct.iter().map(|y| atoms.mass_at(y, ATOM_TOL)));
                let rhs = neumaier_sum(
                    atoms
                        .iter()
                        .filter(|a| points.iter().any(|p| p.approx_eq(&a.point, ATOM_TOL)))
                        .map(|a| a.weight * (beta * spec.log_jacobian(map, &a.point)).exp()),
                );
                (lhs, rhs)
            }
            TestSet::Cell { cell } => {
                if let Some(c) = map.critical_points().iter().find(|c| cell.contains(&c.point)) {
                    return Err(Error::NotInjective {
                        index,
                        reason: format!("critical point {} lies in the cell", c.point),
                    });
                }
                let mut lhs_terms = Vec::new();
                for (a, fibre) in atoms.iter().zip(&fibres) {
                    let inside = fibre.iter().filter(|p| cell.contains(p)).count();
                    if inside > 1 {
                        return Err(Error::NotInjective {
                            index,
                            reason: format!("{} has {inside} preimages in the cell", a.point),
                        });
                    }
                    if inside == 1 {
                        lhs_terms.push(a.weight);
                    }
                }
                let rhs = neumaier_sum(
                    atoms
                        .iter()
                        .filter(|a| cell.contains(&a.point))
                        .map(|a| a.weight * (beta * spec.log_jacobian(map, &a.point)).exp()),
                );
                (neumaier_sum(lhs_terms), rhs)
            }
        };
        entries.push(ResidualEntry {
            index,
            lhs,
            rhs,
            residual: (lhs - rhs).abs(),
        });
    }
    Ok(ResidualReport::new(Notion::Ordinary, beta, entries))
}

/// Partition of the annulus `r0 <= |z| < r1` into `n` equal sectors.
pub fn sector_partition(n: usize, r0: f64, r1: f64) -> Vec<TestSet> {
    let step = std::f64::consts::TAU / n as f64;
    (0..n)
        .map(|k| TestSet::Cell {
            cell: Cell::Sector {
                center: Complex64::new(0.0, 0.0),
                r0,
                r1,
                theta0: -std::f64::consts::PI + k as f64 * step,
                theta1: -std::f64::consts::PI + (k + 1) as f64 * step,
            },
        })
        .collect()
}

/// Partition of `[a, b)` into `n` equal intervals.
pub fn interval_partition(n: usize, a: f64, b: f64) -> Vec<TestSet> {
    let step = (b - a) / n as f64;
    (0..n)
        .map(|k| TestSet::Cell {
            cell: Cell::Interval {
                a: a + k as f64 * step,
                b: a + (k + 1) as f64 * step,
            },
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::MetricSpec;

    fn parabolic() -> RationalMap {
        RationalMap::from_real(&[0.0, 1.0, 1.0, 0.25], &[1.0]).unwrap()
    }

    #[test]
    fn dirac_at_parabolic_point() {
        let m = parabolic();
        let dirac = vec![Atom {
            point: SpherePoint::ZERO,
            weight: 1.0,
        }];
        let spec = CocycleSpec::Conformal {
            metric: MetricSpec::Flat,
        };
        let paths: Vec<TransferPath> = (0..4)
            .flat_map(|n| (0..4).map(move |l| (n, l)))
            .map(|(n, l)| TransferPath::new(&m, SpherePoint::ZERO, n, SpherePoint::ZERO, l).unwrap())
            .collect();
        for beta in [-1.0, 1.0, 2.0] {
            let g = conformality_residual(
                &dirac,
                &m,
                beta,
                &spec,
                Notion::Groupoid,
                &ResidualTests::Paths(paths.clone()),
            )
            .unwrap();
            assert!(g.max_residual < 1e-12);
            let sets = ResidualTests::Sets(vec![TestSet::Points {
                points: vec![SpherePoint::real(-2.0)],
            }]);
            let o = conformality_residual(&dirac, &m, beta, &spec, Notion::Ordinary, &sets).unwrap();
            assert_eq!(o.max_residual, 1.0);
        }
        // the gauge cocycle does not vanish on the isotropy
        let g = conformality_residual(
            &dirac,
            &m,
            1.0,
            &CocycleSpec::Gauge,
            Notion::Groupoid,
            &ResidualTests::Paths(paths),
        )
        .unwrap();
        assert!(g.max_residual > 0.5);
    }

    #[test]
    fn cells_containing_critical_points_are_rejected() {
        let m = RationalMap::quadratic(Complex64::new(0.0, 0.0));
        let atoms = vec![Atom {
            point: SpherePoint::real(0.5),
            weight: 1.0,
        }];
        let sets = ResidualTests::Sets(vec![TestSet::Cell {
            cell: Cell::Disk {
                center: Complex64::new(0.0, 0.0),
                radius: 0.1,
            },
        }]);
        let r = conformality_residual(&atoms, &m, 1.0, &CocycleSpec::Gauge, Notion::Ordinary, &sets);
        assert!(matches!(r, Err(Error::NotInjective { index: 0, .. })));
    }

    #[test]
    fn sector_membership_wraps() {
        let s = Cell::Sector {
            center: Complex64::new(0.0, 0.0),
            r0: 0.5,
            r1: 2.0,
            theta0: 3.0,
            theta1: 3.5,
        };
        assert!(s.contains(&SpherePoint::Finite(Complex64::from_polar(1.0, -3.0))));
        assert!(!s.contains(&SpherePoint::Finite(Complex64::from_polar(1.0, 0.0))));
    }
}
