use crate::scene_model::{
    footprint_radius, gaussian_map, Relation, Scene, StructuredPlan, TOP_SURFACE_TOL,
};
use crate::{AffordanceMap, Result, Vec3};

/// Clearance between anchor and subject footprints at the target center, meters.
pub const PLAN_MARGIN: f64 = 0.02;
/// Points higher than this above the support surface get zero activation.
pub const HEIGHT_CUTOFF: f64 = 0.03;

/// Target center `c*` of a compass plan: the anchor position pushed along the relation
/// direction until the footprints clear by [`PLAN_MARGIN`], at support height.
///
/// The anchor's extent along the direction is measured on its footprint hull, so
/// elongated anchors get a direction-dependent offset. `None` for "on".
pub fn plan_target(
    scene: &Scene,
    plan: &StructuredPlan,
    subject_extent: &Vec3,
) -> Result<Option<Vec3>> {
    let anchor = plan.resolve(scene)?;
    let Some(u) = plan.direction.scene_direction(scene.viewer_yaw()) else {
        return Ok(None);
    };
    let a = plan.anchor_position;
    let reach = anchor.footprint().reach(a.xy(), u);
    let delta = reach + footprint_radius(subject_extent) + PLAN_MARGIN;
    Ok(Some(Vec3::new(
        a.x + delta * u[0],
        a.y + delta * u[1],
        scene.support_height(),
    )))
}

/// Analytic per-plan affordance over the scene cloud.
pub fn plan_affordance(
    scene: &Scene,
    plan: &StructuredPlan,
    subject_extent: &Vec3,
) -> Result<AffordanceMap> {
    let anchor = plan.resolve(scene)?;
    let cloud = scene.cloud();
    let sigma = footprint_radius(subject_extent).max(1e-3);
    if plan.direction == Relation::On {
        let top = anchor.top_height();
        let c = plan.anchor_position;
        let center = Vec3::new(c.x, c.y, top);
        let id = anchor.id();
        return Ok(gaussian_map(cloud.points(), &center, sigma, |i| {
            cloud.owners[i] == id && cloud.points()[i].z >= top - TOP_SURFACE_TOL
        }));
    }
    let target = plan_target(scene, plan, subject_extent)?.expect("compass relation");
    let ceiling = scene.support_height() + HEIGHT_CUTOFF;
    Ok(gaussian_map(cloud.points(), &target, sigma, |i| {
        cloud.points()[i].z <= ceiling
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::surface::{box_surface, cylinder_surface};
    use crate::scene_model::{classify_relation, SceneObject};
    use crate::{PointCloud, Pose};

    fn scene(objs: Vec<SceneObject>) -> Scene {
        let table = SceneObject::receptacle(
            0,
            "table",
            Vec3::new(1.0, 1.0, 0.04),
            Pose::from_translation(Vec3::new(0.0, 0.0, -0.02)),
        )
        .unwrap();
        Scene::new(table, objs, None, Vec3::new(0.0, 0.0, -1.0)).unwrap()
    }

    fn can(id: u32, x: f64, y: f64) -> SceneObject {
        let pts = cylinder_surface(Vec3::zeros(), 0.05, 0.05, 0.005);
        SceneObject::new(
            id,
            "can",
            PointCloud::new(pts).unwrap(),
            Pose::from_translation(Vec3::new(x, y, 0.05)),
        )
        .unwrap()
    }

    #[test]
    fn right_target_offset() {
        let a = can(1, 0.0, 0.0);
        let s = scene(vec![a.clone()]);
        let plan = StructuredPlan::for_anchor(&a, Relation::Right);
        let t = plan_target(&s, &plan, &Vec3::new(0.1, 0.1, 0.1))
            .unwrap()
            .unwrap();
        assert!((t - Vec3::new(0.12, 0.0, 0.0)).norm() < 1e-12);
        let m = plan_affordance(&s, &plan, &Vec3::new(0.1, 0.1, 0.1)).unwrap();
        let cloud = s.cloud();
        let i = cloud
            .points()
            .iter()
            .position(|p| (*p - Vec3::new(0.12, 0.0, 0.0)).norm() < 1e-9)
            .unwrap();
        assert!((m.activations()[i] - 1.0).abs() < 1e-12);
        // Anchor points above the cutoff are zero.
        assert!(cloud
            .indices_of(1)
            .all(|j| cloud.points()[j].z <= 0.03 || m.activations()[j] == 0.0));
    }

    #[test]
    fn on_mass_on_top_surface() {
        let a = can(1, 0.1, 0.0);
        let s = scene(vec![a.clone()]);
        let m = plan_affordance(
            &s,
            &StructuredPlan::for_anchor(&a, Relation::On),
            &Vec3::new(0.03, 0.03, 0.03),
        )
        .unwrap();
        let cloud = s.cloud();
        for (j, &v) in m.activations().iter().enumerate() {
            if v > 0.0 {
                assert_eq!(cloud.owners[j], 1);
                assert!(cloud.points()[j].z >= a.top_height() - 0.01);
            }
        }
        assert_eq!(m.max(), 1.0);
    }

    #[test]
    fn argmax_classifies_back() {
        let pts = box_surface(Vec3::zeros(), Vec3::new(0.12, 0.04, 0.03), 0.01);
        let a = SceneObject::new(
            1,
            "book",
            PointCloud::new(pts).unwrap(),
            Pose::new(Vec3::new(0.05, -0.1, 0.03), 0.4),
        )
        .unwrap();
        let s = scene(vec![a.clone()]);
        let ext = Vec3::new(0.06, 0.08, 0.1);
        for rel in Relation::COMPASS {
            let plan = StructuredPlan::for_anchor(&a, rel);
            let m = plan_affordance(&s, &plan, &ext).unwrap();
            let p = s.cloud().points()[m.argmax().unwrap()];
            let sub_pts = box_surface(Vec3::zeros(), ext * 0.5, 0.01);
            let sub = SceneObject::new(
                2,
                "cup",
                PointCloud::new(sub_pts).unwrap(),
                Pose::from_translation(Vec3::new(p.x, p.y, 0.05)),
            )
            .unwrap();
            assert_eq!(classify_relation(&a, &sub, 0.0).unwrap(), rel);
        }
    }
}
