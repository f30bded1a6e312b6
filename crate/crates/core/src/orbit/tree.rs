use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sphere::{MetricSpec, RationalMap, SpherePoint};

/// Default cap on the number of nodes in a backward tree.
pub const DEFAULT_NODE_BUDGET: usize = 1 << 22;

/// One branch of the preimage tree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TreeNode {
    pub point: SpherePoint,
    pub parent: Option<usize>,
    pub generation: usize,
    /// Multiplicity of `point` in the fibre over its parent.
    pub multiplicity: usize,
    /// `log |(R^k)'(point)|` in the tree metric, `-inf` through critical points.
    pub log_derivative: f64,
    /// `val(R^k, point)`.
    pub valency_product: usize,
    pub ill_conditioned: bool,
}

/// Truncated tree of iterated preimages `R^{-k}(root)`, `k <= depth`.
///
/// Nodes are stored generation by generation; branches are never merged.
#[derive(Clone, Debug, Serialize)]
pub struct BackwardTree {
    pub root: SpherePoint,
    pub depth: usize,
    pub degree: usize,
    pub nodes: Vec<TreeNode>,
    /// `generations[k]` is the index range of generation `k` in `nodes`.
    pub generations: Vec<std::ops::Range<usize>>,
}

impl BackwardTree {
    pub fn generation(&self, k: usize) -> &[TreeNode] {
        self.generations.get(k).map_or(&[][..], |r| &self.nodes[r.clone()])
    }

    /// True when some generation within the depth is empty.
    pub fn died_out(&self) -> bool {
        self.generations.iter().any(|r| r.is_empty())
    }

    /// Points on the path from node `i` up to the root, starting at `i`.
    pub fn path(&self, mut i: usize) -> Vec<SpherePoint> {
        let mut out = vec![self.nodes[i].point];
        while let Some(p) = self.nodes[i].parent {
            out.push(self.nodes[p].point);
            i = p;
        }
        out
    }
}

/// Full backward tree to `depth` with the default node budget.
pub fn backward_tree(map: &RationalMap, x: &SpherePoint, depth: usize, metric: &MetricSpec) -> Result<BackwardTree> {
    build(map, x, depth, metric, DEFAULT_NODE_BUDGET, |_| true)
}

/// Backward tree keeping only nodes accepted by `keep`; rejected nodes are
/// not expanded.
pub fn backward_tree_filtered(
    map: &RationalMap,
    x: &SpherePoint,
    depth: usize,
    metric: &MetricSpec,
    budget: usize,
    keep: impl Fn(&TreeNode) -> bool + Sync,
) -> Result<BackwardTree> {
    build(map, x, depth, metric, budget, keep)
}

/// The part of the backward tree inside the grand orbit of the root:
/// branches along which the iterate is locally injective.
pub fn unramified_tree(
    map: &RationalMap,
    x: &SpherePoint,
    depth: usize,
    metric: &MetricSpec,
    budget: usize,
) -> Result<BackwardTree> {
    build(map, x, depth, metric, budget, |n| n.valency_product == 1)
}

fn build(
    map: &RationalMap,
    x: &SpherePoint,
    depth: usize,
    metric: &MetricSpec,
    budget: usize,
    keep: impl Fn(&TreeNode) -> bool + Sync,
) -> Result<BackwardTree> {
    let d = map.degree();
    let mut nodes = vec![TreeNode {
        point: *x,
        parent: None,
        generation: 0,
        multiplicity: 1,
        log_derivative: 0.0,
        valency_product: 1,
        ill_conditioned: false,
    }];
    let mut generations = Vec::new();
    generations.push(0..1);
    for k in 1..=depth {
        let prev = generations[k - 1].clone();
        let needed = nodes.len() as u128 + prev.len() as u128 * d as u128;
        if needed > budget as u128 {
            return Err(Error::BudgetExceeded { needed, budget });
        }
        let children: Vec<Vec<TreeNode>> = prev
            .clone()
            .into_par_iter()
            .map(|i| {
                let parent = &nodes[i];
                map.preimages(&parent.point)
                    .into_iter()
                    .map(|pre| {
                        let local = map.derivative_norm(&pre.point, metric);
                        TreeNode {
                            point: pre.point,
                            parent: Some(i),
                            generation: k,
                            multiplicity: pre.multiplicity,
                            log_derivative: parent.log_derivative + local.ln(),
                            valency_product: parent.valency_product * pre.multiplicity,
                            ill_conditioned: pre.ill_conditioned,
                        }
                    })
                    .filter(|n| keep(n))
                    .collect()
            })
            .collect();
        let start = nodes.len();
        nodes.extend(children.into_iter().flatten());
        generations.push(start..nodes.len());
    }
    Ok(BackwardTree {
        root: *x,
        depth,
        degree: d,
        nodes,
        generations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn square_map_tree_of_one() {
        let m = RationalMap::quadratic(Complex64::new(0.0, 0.0));
        let t = backward_tree(&m, &SpherePoint::real(1.0), 2, &MetricSpec::Flat).unwrap();
        assert_eq!(t.generation(1).len(), 2);
        let g2: Vec<SpherePoint> = t.generation(2).iter().map(|n| n.point).collect();
        assert_eq!(g2.len(), 4);
        for target in [
            SpherePoint::real(1.0),
            SpherePoint::real(-1.0),
            SpherePoint::new(0.0, 1.0),
            SpherePoint::new(0.0, -1.0),
        ] {
            assert!(g2.iter().any(|p| p.approx_eq(&target, 1e-14)));
        }
        // |(z^4)'| = 4 on the circle
        for n in t.generation(2) {
            assert!((n.log_derivative - 4f64.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn rees_tree_single_double_child() {
        let m = RationalMap::from_real(&[1.2, -1.2, 0.3], &[0.0, 0.0, 1.0]).unwrap();
        let t = backward_tree(&m, &SpherePoint::ZERO, 1, &MetricSpec::Chordal).unwrap();
        let g1 = t.generation(1);
        assert_eq!(g1.len(), 1);
        assert_eq!(g1[0].multiplicity, 2);
        assert!(g1[0].point.approx_eq(&SpherePoint::real(2.0), 1e-12));
        let u = unramified_tree(&m, &SpherePoint::ZERO, 3, &MetricSpec::Chordal, 1000).unwrap();
        assert!(u.died_out());
        assert_eq!(u.nodes.len(), 1);
    }

    #[test]
    fn budget_is_enforced() {
        let m = RationalMap::quadratic(Complex64::new(-1.0, 0.0));
        let err = backward_tree_filtered(&m, &SpherePoint::real(0.5), 10, &MetricSpec::Flat, 100, |_| true);
        assert!(matches!(err, Err(Error::BudgetExceeded { .. })));
    }
}
