//! Polynomial roots: closed forms up to degree two, Aberth iteration above,
//! Newton polishing and cluster merging for multiple roots.

use std::f64::consts::TAU;

use num_complex::Complex64;

use super::point::{SpherePoint, CLUSTER_TOL};
use super::poly::Poly;

const ABERTH_MAX_ITER: usize = 600;
const MERGE_RADIUS: f64 = 1e-3;
const MERGE_COEFF_TOL: f64 = 1e-7;

/// A group of numerically coincident roots.
#[derive(Clone, Debug, PartialEq)]
pub struct RootCluster {
    pub root: Complex64,
    pub multiplicity: usize,
    /// Largest distance of a raw root from the cluster centre.
    pub spread: f64,
    /// Set when the cluster could only be formed by the secondary merge pass,
    /// i.e. its raw roots were further apart than the clustering tolerance.
    pub ill_conditioned: bool,
}

/// All roots of `p` with multiplicity (unordered, unclustered).
///
/// Exact zero roots are split off before iterating, so `z^k` factors come
/// back as exact zeros.
pub fn roots(p: &Poly) -> Vec<Complex64> {
    let Some(low) = p.low_order() else {
        return Vec::new();
    };
    let mut out = vec![Complex64::new(0.0, 0.0); low];
    let reduced = Poly::new(p.coeffs()[low..].to_vec());
    match reduced.degree() {
        None | Some(0) => {}
        Some(1) => out.push(-reduced.coeff(0) / reduced.coeff(1)),
        Some(2) => {
            let (r1, r2) = quadratic(reduced.coeff(2), reduced.coeff(1), reduced.coeff(0));
            out.push(r1);
            out.push(r2);
        }
        Some(_) => out.extend(aberth(&reduced).into_iter().map(|z| polish(&reduced, z))),
    }
    out
}

/// Roots merged into clusters and sorted by real then imaginary part.
pub fn root_clusters(p: &Poly) -> Vec<RootCluster> {
    let raw = roots(p);
    let mut clusters = cluster(&raw, CLUSTER_TOL);
    merge_multiple(p, &mut clusters);
    for c in clusters.iter_mut() {
        if c.multiplicity > 1 {
            c.root = polish_multiple(p, c.root, c.multiplicity, c.spread);
        }
    }
    clusters.sort_by(|a, b| a.root.re.total_cmp(&b.root.re).then(a.root.im.total_cmp(&b.root.im)));
    clusters
}

/// Numerically stable roots of `a z^2 + b z + c`.
fn quadratic(a: Complex64, b: Complex64, c: Complex64) -> (Complex64, Complex64) {
    let disc = (b * b - a * c * 4.0).sqrt();
    // pick the sign that avoids cancellation
    let q = if (b.conj() * disc).re >= 0.0 {
        -(b + disc) * 0.5
    } else {
        -(b - disc) * 0.5
    };
    if q.norm() == 0.0 {
        return (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    }
    (q / a, c / q)
}

fn aberth(p: &Poly) -> Vec<Complex64> {
    let n = p.degree().unwrap_or(0);
    let lead = p.leading();
    let monic: Poly = p.scale(lead.inv());
    // Fujiwara-style bound gives the radius of the starting circle
    let radius = (0..n)
        .map(|k| (monic.coeff(k).norm()).powf(1.0 / (n - k) as f64))
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius * 0.9, TAU * k as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..ABERTH_MAX_ITER {
        let mut max_step = 0.0f64;
        for k in 0..n {
            let (v, dv) = monic.eval_with_derivative(z[k]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / dv;
            let s: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| {
                    let diff = z[k] - z[j];
                    if diff.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        diff.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if step.re.is_finite() && step.im.is_finite() {
                z[k] -= step;
                max_step = max_step.max(step.norm() / z[k].norm().max(1.0));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    z
}

/// A few Newton steps, each kept only if it lowers the residual.
fn polish(p: &Poly, mut z: Complex64) -> Complex64 {
    let mut res = p.eval(z).norm();
    for _ in 0..4 {
        let (v, dv) = p.eval_with_derivative(z);
        if dv.norm() == 0.0 {
            break;
        }
        let cand = z - v / dv;
        let r = p.eval(cand).norm();
        if r < res {
            z = cand;
            res = r;
        } else {
            break;
        }
    }
    z
}

/// A root of multiplicity `m` is a simple root of the `(m-1)`-th derivative.
fn polish_multiple(p: &Poly, centre: Complex64, m: usize, spread: f64) -> Complex64 {
    let mut d = p.clone();
    for _ in 1..m {
        d = d.derivative();
    }
    let z = polish(&d, centre);
    if (z - centre).norm() <= 10.0 * spread.max(1e-12 * centre.norm().max(1.0)) {
        z
    } else {
        centre
    }
}

/// Union-find clustering by chordal distance; centres are centroids.
pub(crate) fn cluster(raw: &[Complex64], tol: f64) -> Vec<RootCluster> {
    let n = raw.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let pts: Vec<SpherePoint> = raw.iter().map(|&z| z.into()).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if pts[i].chordal_distance(&pts[j]) <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b.max(a)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<Complex64>)> = Vec::new();
    for (i, &z) in raw.iter().enumerate().take(n) {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|(root, _)| *root == r) {
            Some((_, members)) => members.push(z),
            None => groups.push((r, vec![z])),
        }
    }
    groups
        .into_iter()
        .map(|(_, members)| summarize(&members, false))
        .collect()
}

fn summarize(members: &[Complex64], ill_conditioned: bool) -> RootCluster {
    let centre = members.iter().sum::<Complex64>() / members.len() as f64;
    let spread = members.iter().map(|z| (z - centre).norm()).fold(0.0, f64::max);
    RootCluster {
        root: centre,
        multiplicity: members.len(),
        spread,
        ill_conditioned,
    }
}

/// Joins nearby clusters whose combined centroid is numerically a root of the
/// combined multiplicity (all lower Taylor coefficients negligible).
fn merge_multiple(p: &Poly, clusters: &mut Vec<RootCluster>) {
    loop {
        let mut merged = false;
        'outer: for i in 0..clusters.len() {
            for j in (i + 1)..clusters.len() {
                let (a, b) = (&clusters[i], &clusters[j]);
                if (a.root - b.root).norm() > MERGE_RADIUS * a.root.norm().max(1.0) {
                    continue;
                }
                let m = a.multiplicity + b.multiplicity;
                let centroid = (a.root * a.multiplicity as f64 + b.root * b.multiplicity as f64) / m as f64;
                let width = (a.root - b.root).norm() + a.spread + b.spread;
                let centre = polish_multiple(p, centroid, m, width);
                if is_multiple_root(p, centre, m) {
                    let spread = (a.root - centre).norm() + a.spread;
                    let spread = spread.max((b.root - centre).norm() + b.spread);
                    clusters[i] = RootCluster {
                        root: centre,
                        multiplicity: m,
                        spread,
                        ill_conditioned: true,
                    };
                    clusters.swap_remove(j);
                    merged = true;
                    break 'outer;
                }
            }
        }
        if !merged {
            break;
        }
    }
}

fn is_multiple_root(p: &Poly, c: Complex64, m: usize) -> bool {
    let s = p.shift(c);
    let scale = s.max_abs();
    if scale == 0.0 || s.coeff(m).norm() <= MERGE_COEFF_TOL * scale {
        return false;
    }
    (0..m).all(|k| s.coeff(k).norm() <= MERGE_COEFF_TOL * scale)
}
