use super::classify::STACK_TOL;
use super::object::{footprint_radius, REST_TOL};
use super::Scene;
use crate::affordance::AffordanceMap;
use crate::{Pose, Vec3};

/// Reference name of the scene cloud that affordance maps index into.
pub const SCENE_CLOUD_REF: &str = "scene.ply";
/// Points within this distance below a supporting object's top count as its top surface.
pub const TOP_SURFACE_TOL: f64 = 0.01;

/// Gaussian label map around the ground-truth placement, normalized to peak at 1.
///
/// When the placement is stacked on another object the map is restricted to that
/// object's top-surface points.
pub fn gt_affordance(
    scene: &Scene,
    gt_pose: &Pose,
    dropped_extent: &Vec3,
    sigma_scale: f64,
) -> AffordanceMap<f64> {
    let cloud = scene.cloud();
    let t = gt_pose.translation();
    let sigma = (sigma_scale * footprint_radius(dropped_extent)).max(1e-6);
    let base = t.z - 0.5 * dropped_extent.z;
    let support = if base > scene.support_height() + REST_TOL {
        scene.objects().iter().find(|o| {
            (base - o.top_height()).abs() <= STACK_TOL && o.footprint().contains(t.xy(), 1e-9)
        })
    } else {
        None
    };
    let allowed = |i: usize| match support {
        None => true,
        Some(s) => {
            cloud.owners[i] == s.id() && cloud.points()[i].z >= s.top_height() - TOP_SURFACE_TOL
        }
    };
    gaussian_map(cloud.points(), &t, sigma, allowed)
}

/// `exp(-d²/2σ²)` over the allowed points, divided by its largest value (computed in the
/// log domain so far-away placements still peak at exactly 1).
pub fn gaussian_map(
    points: &[Vec3],
    center: &Vec3,
    sigma: f64,
    allowed: impl Fn(usize) -> bool,
) -> AffordanceMap<f64> {
    let expo: Vec<Option<f64>> = points
        .iter()
        .enumerate()
        .map(|(i, p)| allowed(i).then(|| -p.distance_squared(center) / (2.0 * sigma * sigma)))
        .collect();
    let peak = expo
        .iter()
        .flatten()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let act = expo
        .into_iter()
        .map(|e| {
            e.map_or(0.0, |e| {
                if peak.is_finite() {
                    (e - peak).exp()
                } else {
                    0.0
                }
            })
        })
        .collect();
    AffordanceMap::from_trusted(act, SCENE_CLOUD_REF)
}
