//! Weighted point clouds shared by the atomic and discretized measures.

use serde::Serialize;

use crate::sphere::SpherePoint;

/// A point mass.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Atom {
    pub point: SpherePoint,
    pub weight: f64,
}

/// Compensated (Neumaier) sum, evaluated in the order given.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Divides all weights by their compensated total. Returns the total.
pub fn normalize(atoms: &mut [Atom]) -> f64 {
    let total = neumaier_sum(atoms.iter().map(|a| a.weight));
    if total > 0.0 {
        for a in atoms.iter_mut() {
            a.weight /= total;
        }
    }
    total
}

/// Anything that can be read as a finite list of point masses.
pub trait PointMasses {
    fn atoms(&self) -> &[Atom];

    /// Total mass of atoms within chordal distance `tol` of `p`.
    fn mass_at(&self, p: &SpherePoint, tol: f64) -> f64 {
        neumaier_sum(
            self.atoms()
                .iter()
                .filter(|a| a.point.chordal_distance(p) <= tol)
                .map(|a| a.weight),
        )
    }

    fn total_mass(&self) -> f64 {
        neumaier_sum(self.atoms().iter().map(|a| a.weight))
    }
}

impl PointMasses for [Atom] {
    fn atoms(&self) -> &[Atom] {
        self
    }
}

impl PointMasses for Vec<Atom> {
    fn atoms(&self) -> &[Atom] {
        self
    }
}
