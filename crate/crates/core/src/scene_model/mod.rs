//! Scenes, objects, the closed relation set and the label geometry derived from them:
//! relation classification, ground-truth affordance maps and placement regions.

mod classify;
mod gt;
pub mod io;
mod object;
mod penetration;
mod plan;
mod region;
mod relation;

pub use classify::{classify_displacement, classify_relation, AMBIGUITY_TOL, STACK_TOL};
pub use gt::{gaussian_map, gt_affordance, SCENE_CLOUD_REF, TOP_SURFACE_TOL};
pub use io::{
    load_scene, save_scene, scene_from_json, scene_to_json, PointStorage, SCENE_SCHEMA_VERSION,
};
pub use object::{
    bake_tilt, footprint_radius, receptacle_top_points, Camera, Occupancy, Scene, SceneCloud,
    SceneObject, RECEPTACLE_SPACING, REST_TOL,
};
pub use penetration::{
    max_penetration, object_penetration, penetration_depth, scene_max_penetration,
};
pub use plan::{
    load_plans, plans_from_json, plans_to_json, save_plans, StructuredPlan, PLANS_SCHEMA_VERSION,
};
pub use region::{annotate_region, Region, RegionConstraint, BAND_RADII, REGION_TOL};
pub use relation::{to_viewer_frame, Relation};
