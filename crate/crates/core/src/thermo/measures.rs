use std::io::{self, Read, Write};

use serde::Serialize;

use super::pressure::julia_seeds;
use crate::error::{Error, Result};
use crate::measure::{neumaier_sum, normalize, Atom, PointMasses};
use crate::orbit::{backward_tree, unramified_tree, DEFAULT_NODE_BUDGET};
use crate::sphere::{MetricSpec, RationalMap, SpherePoint, CLUSTER_TOL};

/// Drift below which the eigenmeasure iteration counts as converged.
pub const DRIFT_TOL: f64 = 1e-3;
pub const MAX_ITERATIONS: usize = 200;
const GRID: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureKind {
    Lyubich,
    Eigenmeasure { delta: f64 },
}

/// A probability measure approximated by a weighted point cloud.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscretizedMeasure {
    pub atoms: Vec<Atom>,
    pub depth: usize,
    pub kind: MeasureKind,
    pub seed: SpherePoint,
    /// Largest single atom weight.
    pub discretization_error: f64,
    /// Grid total-variation distance between consecutive iterates
    /// (eigenmeasures only).
    pub drift: Vec<f64>,
    pub converged: bool,
}

impl PointMasses for DiscretizedMeasure {
    fn atoms(&self) -> &[Atom] {
        &self.atoms
    }
}

impl DiscretizedMeasure {
    fn new(atoms: Vec<Atom>, depth: usize, kind: MeasureKind, seed: SpherePoint) -> Self {
        let discretization_error = atoms.iter().map(|a| a.weight).fold(0.0, f64::max);
        DiscretizedMeasure {
            atoms,
            depth,
            kind,
            seed,
            discretization_error,
            drift: Vec::new(),
            converged: true,
        }
    }
}

/// Equidistributed mass on `R^{-depth}(seed)`, each branch carrying
/// `multiplicity / d` of its parent.
pub fn lyubich_measure(map: &RationalMap, depth: usize, seed: &SpherePoint) -> Result<DiscretizedMeasure> {
    let probe = backward_tree(map, seed, 2, &MetricSpec::Chordal)?;
    let mut distinct: Vec<SpherePoint> = Vec::new();
    for n in &probe.nodes {
        if !distinct.iter().any(|p| p.approx_eq(&n.point, CLUSTER_TOL)) {
            distinct.push(n.point);
        }
    }
    if distinct.len() <= 2 {
        return Err(Error::Precondition(format!("{seed} lies in the exceptional set")));
    }
    let tree =
        crate::orbit::backward_tree_filtered(map, seed, depth, &MetricSpec::Chordal, DEFAULT_NODE_BUDGET, |_| true)?;
    let d = map.degree() as f64;
    let mut w = vec![1.0f64; tree.nodes.len()];
    for (i, n) in tree.nodes.iter().enumerate().skip(1) {
        w[i] = w[n.parent.unwrap()] * n.multiplicity as f64 / d;
    }
    let range = tree.generations[depth].clone();
    let mut atoms: Vec<Atom> = tree.nodes[range.clone()]
        .iter()
        .zip(&w[range])
        .map(|(n, &weight)| Atom { point: n.point, weight })
        .collect();
    normalize(&mut atoms);
    Ok(DiscretizedMeasure::new(atoms, depth, MeasureKind::Lyubich, *seed))
}

fn bounding_box(a: &[Atom], b: &[Atom]) -> (f64, f64, f64, f64) {
    let mut bx = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for z in a.iter().chain(b).filter_map(|x| x.point.finite()) {
        bx = (bx.0.min(z.re), bx.1.max(z.re), bx.2.min(z.im), bx.3.max(z.im));
    }
    bx
}

fn grid_masses(atoms: &[Atom], bx: (f64, f64, f64, f64)) -> Vec<f64> {
    let mut cells = vec![0.0; GRID * GRID + 1];
    let w = (bx.1 - bx.0).max(1e-12);
    let h = (bx.3 - bx.2).max(1e-12);
    for a in atoms {
        let idx = match a.point.finite() {
            None => GRID * GRID,
            Some(z) => {
                let i = (((z.re - bx.0) / w * GRID as f64) as usize).min(GRID - 1);
                let j = (((z.im - bx.2) / h * GRID as f64) as usize).min(GRID - 1);
                i * GRID + j
            }
        };
        cells[idx] += a.weight;
    }
    cells
}

/// Total-variation distance of two clouds binned on a 16×16 grid over their
/// joint bounding box.
pub fn grid_drift(a: &[Atom], b: &[Atom]) -> f64 {
    let bx = bounding_box(a, b);
    let (ga, gb) = (grid_masses(a, bx), grid_masses(b, bx));
    0.5 * neumaier_sum(ga.iter().zip(&gb).map(|(x, y)| (x - y).abs()))
}

/// Iterates the dual transfer operator with weights `|R'|^{-δ}` from a Julia
/// seed, renormalizing each step, and returns generation `depth`.
pub fn conformal_eigenmeasure(map: &RationalMap, delta: f64, depth: usize) -> Result<DiscretizedMeasure> {
    let depth = depth.min(MAX_ITERATIONS);
    if depth == 0 {
        return Err(Error::InsufficientDepth(
            "eigenmeasure needs at least one iteration".into(),
        ));
    }
    let seed = julia_seeds(map)?[0];
    let metric = MetricSpec::default_for(map);
    let tree = unramified_tree(map, &seed, depth, &metric, DEFAULT_NODE_BUDGET)?;
    let generation = |k: usize| -> Vec<Atom> {
        let nodes = tree.generation(k);
        let top = nodes
            .iter()
            .map(|n| -delta * n.log_derivative)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut atoms: Vec<Atom> = nodes
            .iter()
            .map(|n| Atom {
                point: n.point,
                weight: (-delta * n.log_derivative - top).exp(),
            })
            .collect();
        normalize(&mut atoms);
        atoms
    };
    let mut prev = generation(0);
    let mut drift = Vec::with_capacity(depth);
    for k in 1..=depth {
        let cur = generation(k);
        drift.push(grid_drift(&prev, &cur));
        prev = cur;
    }
    let mut m = DiscretizedMeasure::new(prev, depth, MeasureKind::Eigenmeasure { delta }, seed);
    m.converged = drift.last().is_some_and(|&d| d < DRIFT_TOL);
    m.drift = drift;
    Ok(m)
}

/// Kolmogorov-Smirnov distance between a weighted sample on the line and a
/// continuous distribution function.
pub fn ks_distance(samples: &[(f64, f64)], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s: Vec<(f64, f64)> = samples.to_vec();
    s.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total = neumaier_sum(s.iter().map(|p| p.1));
    let mut acc = 0.0;
    let mut worst = 0.0f64;
    for (x, w) in s {
        let f = cdf(x);
        worst = worst.max((acc / total - f).abs());
        acc += w;
        worst = worst.max((acc / total - f).abs());
    }
    worst
}

/// Distribution function of the equilibrium measure of `[-2, 2]`.
pub fn arcsine_cdf(x: f64) -> f64 {
    0.5 + (x.clamp(-2.0, 2.0) / 2.0).asin() / std::f64::consts::PI
}

/// `re,im,weight` rows preceded by `#`-prefixed header lines.
pub fn write_csv(atoms: &[Atom], header: &[String], mut out: impl Write) -> io::Result<()> {
    for h in header {
        writeln!(out, "# {h}")?;
    }
    writeln!(out, "re,im,weight")?;
    for a in atoms {
        match a.point {
            SpherePoint::Finite(z) => writeln!(out, "{:?},{:?},{:?}", z.re, z.im, a.weight)?,
            SpherePoint::Infinity => writeln!(out, "inf,inf,{:?}", a.weight)?,
        }
    }
    Ok(())
}

pub const CLOUD_MAGIC: [u8; 4] = *b"KMSC";
pub const CLOUD_VERSION: u32 = 1;

/// Binary cloud: magic, `u32` version, `u64` count, then `re, im, weight`
/// as little-endian `f64` per atom (infinity as two `+inf`).
pub fn write_cloud(atoms: &[Atom], mut out: impl Write) -> io::Result<()> {
    out.write_all(&CLOUD_MAGIC)?;
    out.write_all(&CLOUD_VERSION.to_le_bytes())?;
    out.write_all(&(atoms.len() as u64).to_le_bytes())?;
    for a in atoms {
        let (re, im) = a
            .point
            .finite()
            .map_or((f64::INFINITY, f64::INFINITY), |z| (z.re, z.im));
        for v in [re, im, a.weight] {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_cloud(mut input: impl Read) -> io::Result<Vec<Atom>> {
    let bad = |m: &str| io::Error::new(io::ErrorKind::InvalidData, m.to_string());
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if magic != CLOUD_MAGIC {
        return Err(bad("not a point cloud"));
    }
    let mut v4 = [0u8; 4];
    input.read_exact(&mut v4)?;
    if u32::from_le_bytes(v4) != CLOUD_VERSION {
        return Err(bad("unsupported cloud version"));
    }
    let mut v8 = [0u8; 8];
    input.read_exact(&mut v8)?;
    let n = u64::from_le_bytes(v8) as usize;
    let mut atoms = Vec::with_capacity(n.min(1 << 24));
    for _ in 0..n {
        let mut vals = [0.0f64; 3];
        for v in vals.iter_mut() {
            input.read_exact(&mut v8)?;
            *v = f64::from_le_bytes(v8);
        }
        let point = if vals[0].is_infinite() {
            SpherePoint::Infinity
        } else {
            SpherePoint::new(vals[0], vals[1])
        };
        atoms.push(Atom { point, weight: vals[2] });
    }
    Ok(atoms)
}
