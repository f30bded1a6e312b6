//! Forward orbits, backward trees, grand orbits and critical classes.

mod grand;
mod record;
mod tree;

pub use grand::{
    critical_classes, grand_orbit_member, julia_membership, val_infinity, Assumptions, Confidence, GrandOrbitClass,
    GrandOrbitVerdict, JuliaVerdict, Region, ValInfinity, FINITENESS_DEPTH, STABLE_RUN,
};
pub use record::{
    analyze_orbit, classify_cycle, critical_lyapunov_envelope, cycle_multiplier, CycleClass, OrbitRecord, OrbitVerdict,
    DEFAULT_HORIZON, NEUTRAL_TOL, RETURN_TOL,
};
pub use tree::{backward_tree, backward_tree_filtered, unramified_tree, BackwardTree, TreeNode, DEFAULT_NODE_BUDGET};
