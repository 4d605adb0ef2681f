//! Affordance maps over the scene cloud: analytic per-plan fields and their coarse
//! (clustered) and fine (mean-max) compositions.

mod compose;
mod map;
mod plan_field;
mod select;

pub use compose::{
    compose_coarse, compose_fine, weighted_kmeans, Clusters, ACTIVE_THRESHOLD, COARSE_SIGMA,
    KMEANS_ITERS, KMEANS_SEED, KMEANS_TOL,
};
pub use map::{AffordanceMap, AFFORDANCE_SCHEMA_VERSION};
pub use plan_field::{plan_affordance, plan_target, HEIGHT_CUTOFF, PLAN_MARGIN};
pub use select::{high_affordance_indices, high_affordance_points};
