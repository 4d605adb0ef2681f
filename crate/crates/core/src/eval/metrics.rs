use crate::scene_factory::LabeledSample;
use crate::scene_model::{max_penetration, RegionConstraint, SceneObject};
use crate::{PointCloud, Pose, Result, Vec3, EPS_PEN};

/// Placement accuracy: the placed centroid lies in every plan's region (boundaries
/// inclusive). A plan whose anchor does not resolve counts as unsatisfied.
pub fn eval_pa(placed: &Pose, sample: &LabeledSample, subject_extent: &Vec3) -> bool {
    let q = placed.translation().xy();
    !sample.plans.is_empty()
        && sample.plans.iter().all(|p| {
            RegionConstraint::for_plan(&sample.scene, p, subject_extent)
                .map(|c| c.contains(q))
                .unwrap_or(false)
        })
}

/// Physical plausibility: largest penetration of the placed object against the scene's
/// non-receptacle objects, and whether it is within [`EPS_PEN`].
pub fn eval_pp(
    placed: &Pose,
    sample: &LabeledSample,
    object_points: &PointCloud,
) -> Result<(bool, f64)> {
    let obj = SceneObject::new(
        sample.dropped_object.id(),
        sample.dropped_object.category(),
        object_points.clone(),
        *placed,
    )?;
    let pen = max_penetration(&obj, sample.scene.objects());
    Ok((pen <= EPS_PEN, pen))
}
