use super::poincare::AtomicConformalMeasure;
use crate::measure::normalize;
use crate::sphere::{SpherePoint, Weight};

/// Conformal cocycle of a path `x -> z` after multiplying the metric by `r`.
pub fn reweight_cocycle(value: f64, x: &SpherePoint, z: &SpherePoint, r: &Weight) -> f64 {
    value + r.eval(z).ln() - r.eval(x).ln()
}

/// The measure for the metric scaled by `r`: weights pick up
/// `(r(z) / r(base))^β` and are renormalized.
pub fn reweight_measure(measure: &AtomicConformalMeasure, r: &Weight) -> AtomicConformalMeasure {
    let mut out = measure.clone();
    let base = r.eval(&measure.base).ln();
    for (lw, a) in out.log_weights.iter_mut().zip(&out.atoms) {
        *lw += measure.beta * (r.eval(&a.point).ln() - base);
    }
    let shift = out.log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for (a, lw) in out.atoms.iter_mut().zip(&out.log_weights) {
        a.weight = (lw - shift).exp();
    }
    out.normalization = normalize(&mut out.atoms) * shift.exp();
    normalize(&mut out.atoms);
    out.spec = format!("{} reweighted by {}", measure.spec, r.label());
    out
}
