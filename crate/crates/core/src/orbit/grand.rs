use serde::Serialize;

use super::record::{
    analyze_orbit, classify_multiplier, CycleClass, OrbitRecord, OrbitVerdict, NEUTRAL_TOL, RETURN_TOL,
};
use super::tree::unramified_tree;
use crate::error::{Error, Result};
use crate::sphere::{MetricSpec, RationalMap, SpherePoint, CLUSTER_TOL};

/// Number of consecutive non-critical iterates after which `val(R^n, c)` is
/// considered stable.
pub const STABLE_RUN: usize = 20;
/// Depth to which unramified trees are grown to decide finiteness.
pub const FINITENESS_DEPTH: usize = 8;
const FINITENESS_BUDGET: usize = 1 << 20;

/// The invariant set the groupoid lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// The Julia set, membership decided heuristically per point.
    Julia,
    /// The Julia set is the whole sphere (asserted by the caller).
    JuliaIsSphere,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Confidence {
    Low,
    Medium,
    High,
    Asserted,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JuliaVerdict {
    pub in_region: bool,
    pub confidence: Confidence,
    pub reason: String,
}

/// Caller-supplied facts that cannot be decided at finite precision.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Assumptions {
    /// The map satisfies the Collet-Eckmann condition.
    pub collet_eckmann: bool,
    /// Overrides the numerical pre-periodicity verdict for critical points.
    pub critical_preperiodic: Option<bool>,
}

/// Heuristic membership of `x` in the region, based on its forward orbit.
pub fn julia_membership(map: &RationalMap, x: &SpherePoint, region: Region, horizon: usize) -> JuliaVerdict {
    if region == Region::JuliaIsSphere {
        return JuliaVerdict {
            in_region: true,
            confidence: Confidence::Asserted,
            reason: "Julia set asserted to be the sphere".into(),
        };
    }
    let rec = analyze_orbit(map, x, horizon, RETURN_TOL);
    julia_from_record(map, &rec)
}

pub(crate) fn julia_from_record(map: &RationalMap, rec: &OrbitRecord) -> JuliaVerdict {
    let verdict = |in_region, confidence, reason: &str| JuliaVerdict {
        in_region,
        confidence,
        reason: reason.into(),
    };
    match &rec.verdict {
        OrbitVerdict::PrePeriodic {
            preperiod,
            cycle,
            multiplier,
            ..
        } => match classify_multiplier(map, cycle, *multiplier, NEUTRAL_TOL) {
            CycleClass::Repelling => verdict(true, Confidence::High, "pre-periodic to a repelling cycle"),
            CycleClass::Neutral => verdict(true, Confidence::Medium, "pre-periodic to a neutral cycle"),
            CycleClass::Attracting | CycleClass::Superattracting if *preperiod == 0 => {
                verdict(false, Confidence::High, "lies on an attracting cycle")
            }
            _ => verdict(false, Confidence::High, "pre-periodic to an attracting cycle"),
        },
        OrbitVerdict::Attracted { cycle, multiplier, .. } => {
            match classify_multiplier(map, cycle, *multiplier, NEUTRAL_TOL) {
                CycleClass::Neutral => verdict(false, Confidence::Medium, "converges to a neutral cycle"),
                CycleClass::Repelling => verdict(true, Confidence::Low, "shadows a repelling cycle"),
                _ => verdict(false, Confidence::High, "converges to an attracting cycle"),
            }
        }
        OrbitVerdict::NoCycleDetected {
            slow_convergence: true, ..
        } => verdict(false, Confidence::Low, "slow convergence, likely a parabolic basin"),
        OrbitVerdict::NoCycleDetected { .. } => verdict(true, Confidence::Low, "no cycle detected within the horizon"),
    }
}

/// Outcome of a grand-orbit membership search.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GrandOrbitVerdict {
    /// `R^n(x) = R^m(y)` with `val(R^n, x) = val(R^m, y)`.
    Member {
        n: usize,
        m: usize,
    },
    NonMember {
        horizon: usize,
    },
}

/// Searches `(n, m)` with `n, m <= horizon`, by increasing `n + m`, for a
/// germ between `x` and `y`.
pub fn grand_orbit_member(map: &RationalMap, x: &SpherePoint, y: &SpherePoint, horizon: usize) -> GrandOrbitVerdict {
    let ox = map.orbit(x, horizon);
    let oy = map.orbit(y, horizon);
    let vx = valency_prefix(map, &ox);
    let vy = valency_prefix(map, &oy);
    for total in 0..=2 * horizon {
        let n_hi = total.min(horizon);
        let n_lo = total.saturating_sub(horizon);
        for n in (n_lo..=n_hi).rev() {
            let m = total - n;
            if vx[n] == vy[m] && ox[n].chordal_distance(&oy[m]) <= RETURN_TOL {
                return GrandOrbitVerdict::Member { n, m };
            }
        }
    }
    GrandOrbitVerdict::NonMember { horizon }
}

/// `v[n] = val(R^n, orbit[0])` for each prefix of the orbit.
fn valency_prefix(map: &RationalMap, orbit: &[SpherePoint]) -> Vec<usize> {
    let mut out = Vec::with_capacity(orbit.len());
    let mut v = 1usize;
    out.push(v);
    for p in &orbit[..orbit.len() - 1] {
        v = v.saturating_mul(map.valency(p));
        out.push(v);
    }
    out
}

/// Limit of `val(R^n, c)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValInfinity {
    /// The value, reached after `since` steps.
    Stable {
        value: usize,
        since: usize,
    },
    Unresolved {
        reason: String,
    },
}

impl ValInfinity {
    pub fn value(&self) -> Option<usize> {
        match self {
            ValInfinity::Stable { value, .. } => Some(*value),
            ValInfinity::Unresolved { .. } => None,
        }
    }
}

pub fn val_infinity(map: &RationalMap, c: &SpherePoint, horizon: usize) -> ValInfinity {
    let rec = analyze_orbit(map, c, horizon, RETURN_TOL);
    val_infinity_from_record(map, &rec)
}

fn val_infinity_from_record(map: &RationalMap, rec: &OrbitRecord) -> ValInfinity {
    if let OrbitVerdict::PrePeriodic { cycle, .. } = &rec.verdict {
        if cycle.iter().any(|p| map.valency(p) > 1) {
            return ValInfinity::Unresolved {
                reason: "a critical point lies on the terminal cycle".into(),
            };
        }
    }
    let mut value = 1usize;
    let mut clear = 0usize;
    let mut since = 0usize;
    for (k, p) in rec.samples.iter().enumerate() {
        let v = map.valency(p);
        value = value.saturating_mul(v);
        if v > 1 {
            clear = 0;
            since = k + 1;
        } else {
            clear += 1;
            if clear >= STABLE_RUN {
                return ValInfinity::Stable { value, since };
            }
        }
    }
    ValInfinity::Unresolved {
        reason: format!(
            "critical points keep recurring within {} iterates",
            rec.samples.len().saturating_sub(1)
        ),
    }
}

/// A class of the relation on non-pre-periodic critical points of the region:
/// equal `VAL_∞` and colliding forward orbits.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrandOrbitClass {
    pub representative: SpherePoint,
    pub critical_members: Vec<SpherePoint>,
    pub val_infinity: usize,
    /// The grand orbit is finite (the class lies in `C00`).
    pub finite: bool,
    /// Members enumerated to the finiteness depth (all of them if finite).
    pub members: Vec<SpherePoint>,
    pub julia_confidence: Confidence,
    /// Some pair of critical orbits came within the clustering tolerance
    /// without colliding; the split into classes may be wrong.
    pub ambiguous: bool,
}

/// Non-pre-periodic critical points of the region, grouped into classes.
pub fn critical_classes(
    map: &RationalMap,
    region: Region,
    horizon: usize,
    assumptions: &Assumptions,
) -> Result<Vec<GrandOrbitClass>> {
    if map.degree() < 2 {
        return Err(Error::Precondition("degree at least two is required".into()));
    }
    struct Cand {
        point: SpherePoint,
        val_inf: usize,
        orbit: Vec<SpherePoint>,
        confidence: Confidence,
    }
    let mut cands: Vec<Cand> = Vec::new();
    for cp in map.critical_points() {
        let rec = analyze_orbit(map, &cp.point, horizon, RETURN_TOL);
        let jv = match region {
            Region::JuliaIsSphere => julia_membership(map, &cp.point, region, horizon),
            Region::Julia => julia_from_record(map, &rec),
        };
        if !jv.in_region {
            continue;
        }
        let preperiodic = assumptions.critical_preperiodic.unwrap_or_else(|| rec.is_preperiodic());
        if preperiodic {
            continue;
        }
        let val_inf = match val_infinity_from_record(map, &rec) {
            ValInfinity::Stable { value, .. } => value,
            ValInfinity::Unresolved { reason } => return Err(Error::Inconclusive { horizon, reason }),
        };
        cands.push(Cand {
            point: cp.point,
            val_inf,
            orbit: rec.samples,
            confidence: jv.confidence,
        });
    }

    // union-find over candidates
    let n = cands.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            i = p[i];
        }
        i
    }
    let mut near_miss = vec![false; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if cands[i].val_inf != cands[j].val_inf {
                continue;
            }
            let mut min_gap = f64::INFINITY;
            for a in &cands[i].orbit {
                for b in &cands[j].orbit {
                    min_gap = min_gap.min(a.chordal_distance(b));
                }
            }
            if min_gap <= RETURN_TOL {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            } else if min_gap <= CLUSTER_TOL {
                near_miss[i] = true;
                near_miss[j] = true;
            }
        }
    }

    let mut classes = Vec::new();
    for root in 0..n {
        if find(&mut parent, root) != root {
            continue;
        }
        let idx: Vec<usize> = (0..n).filter(|&i| find(&mut parent, i) == root).collect();
        let mut finite = true;
        let mut members: Vec<SpherePoint> = Vec::new();
        for &i in &idx {
            let tree = unramified_tree(
                map,
                &cands[i].point,
                FINITENESS_DEPTH,
                &MetricSpec::Chordal,
                FINITENESS_BUDGET,
            )?;
            finite &= tree.died_out();
            for node in &tree.nodes {
                if !members.iter().any(|m| m.approx_eq(&node.point, CLUSTER_TOL)) {
                    members.push(node.point);
                }
            }
        }
        classes.push(GrandOrbitClass {
            representative: cands[idx[0]].point,
            critical_members: idx.iter().map(|&i| cands[i].point).collect(),
            val_infinity: cands[idx[0]].val_inf,
            finite,
            members,
            julia_confidence: idx.iter().map(|&i| cands[i].confidence).min().unwrap(),
            ambiguous: idx.iter().any(|&i| near_miss[i]),
        });
    }
    Ok(classes)
}
