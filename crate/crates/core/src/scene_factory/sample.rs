use rand::seq::{index, SliceRandom};

use crate::rng::rng_from_seed;
use crate::scene_model::{
    classify_relation, gt_affordance, RegionConstraint, Scene, SceneObject, StructuredPlan,
    REST_TOL,
};
use crate::{AffordanceMap, Error, Pose, Result};

/// Label width of the ground-truth Gaussian relative to the dropped object's footprint radius.
pub const GT_SIGMA_SCALE: f64 = 1.0;

/// A scene with one object taken out, plus everything needed to score a placement of it.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledSample {
    pub scene: Scene,
    pub dropped_object: SceneObject,
    pub gt_pose: Pose,
    pub plans: Vec<StructuredPlan>,
    pub gt_affordance: AffordanceMap,
}

fn carries_others(scene: &Scene, o: &SceneObject) -> bool {
    scene.objects().iter().any(|s| {
        s.id() != o.id()
            && (s.base_height() - o.top_height()).abs() <= REST_TOL
            && o.footprint().contains(s.pose().translation().xy(), 1e-9)
    })
}

/// Anchors whose relation to the dropped object is well defined and whose region
/// constraint contains the dropped object's position, with their plans.
pub fn consistent_plans(rest: &Scene, dropped: &SceneObject) -> Vec<StructuredPlan> {
    let yaw = rest.viewer_yaw();
    let at = dropped.pose().translation().xy();
    rest.objects()
        .iter()
        .filter_map(|a| {
            let rel = classify_relation(a, dropped, yaw).ok()?;
            let plan = StructuredPlan::for_anchor(a, rel);
            let c = RegionConstraint::for_plan(rest, &plan, &dropped.extent()).ok()?;
            c.contains(at).then_some(plan)
        })
        .collect()
}

/// Drops a uniformly chosen object (among those nothing rests on) and samples `n_plans`
/// distinct anchors among those consistent with the dropped pose. Candidates are tried
/// in a seeded random order until one has enough consistent anchors.
pub fn make_sample(scene: &Scene, n_plans: usize, rng_seed: u64) -> Result<LabeledSample> {
    if n_plans == 0 {
        return Err(Error::InvalidArgument(
            "a sample needs at least one plan".into(),
        ));
    }
    let have = scene.objects().len();
    if have < n_plans + 1 {
        return Err(Error::TooFewObjects {
            needed: n_plans + 1,
            have,
        });
    }
    let mut rng = rng_from_seed(rng_seed);
    let mut order: Vec<u32> = scene
        .objects()
        .iter()
        .filter(|o| !carries_others(scene, o))
        .map(SceneObject::id)
        .collect();
    order.shuffle(&mut rng);
    for id in order {
        let (rest, dropped) = scene.without(id)?;
        let candidates = consistent_plans(&rest, &dropped);
        if candidates.len() < n_plans {
            continue;
        }
        let mut picked = index::sample(&mut rng, candidates.len(), n_plans).into_vec();
        picked.sort_unstable();
        let plans: Vec<StructuredPlan> =
            picked.into_iter().map(|i| candidates[i].clone()).collect();
        let gt_pose = *dropped.pose();
        let gt_affordance = gt_affordance(&rest, &gt_pose, &dropped.extent(), GT_SIGMA_SCALE);
        return Ok(LabeledSample {
            scene: rest,
            dropped_object: dropped,
            gt_pose,
            plans,
            gt_affordance,
        });
    }
    Err(Error::InfeasibleScene(format!(
        "no object has {n_plans} anchor(s) consistent with its placement"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::surface::box_surface;
    use crate::scene_model::Relation;
    use crate::{PointCloud, Vec3};

    fn cube(id: u32, x: f64, y: f64, half: f64) -> SceneObject {
        let pts = box_surface(Vec3::zeros(), Vec3::new(half, half, half), 0.01);
        SceneObject::new(
            id,
            "box",
            PointCloud::new(pts).unwrap(),
            Pose::from_translation(Vec3::new(x, y, half)),
        )
        .unwrap()
    }

    fn scene(objs: Vec<SceneObject>) -> Scene {
        let t = SceneObject::receptacle(
            0,
            "table",
            Vec3::new(1.0, 1.0, 0.04),
            Pose::from_translation(Vec3::new(0.0, 0.0, -0.02)),
        )
        .unwrap();
        Scene::new(t, objs, None, Vec3::new(0.0, 0.0, -1.0)).unwrap()
    }

    #[test]
    fn two_objects_force_the_anchor() {
        let s = scene(vec![cube(1, 0.0, 0.0, 0.04), cube(2, 0.15, 0.0, 0.04)]);
        let sample = make_sample(&s, 1, 3).unwrap();
        assert_eq!(sample.scene.objects().len(), 1);
        let anchor = sample.scene.objects()[0].id();
        assert_eq!(sample.plans[0].anchor_id, anchor);
        let expected = if anchor == 1 {
            Relation::Right
        } else {
            Relation::Left
        };
        assert_eq!(sample.plans[0].direction, expected);
        assert_eq!(sample.gt_pose, *sample.dropped_object.pose());
        assert_eq!(sample.gt_affordance.len(), sample.scene.cloud().len());
        assert_eq!(make_sample(&s, 1, 3).unwrap(), sample);
    }

    #[test]
    fn too_few_objects() {
        let s = scene(vec![cube(1, 0.0, 0.0, 0.04)]);
        assert!(matches!(
            make_sample(&s, 1, 0),
            Err(Error::TooFewObjects { needed: 2, have: 1 })
        ));
    }

    #[test]
    fn labels_agree_with_classifier() {
        let s = scene(vec![
            cube(1, 0.0, 0.0, 0.04),
            cube(2, 0.14, 0.02, 0.04),
            cube(3, -0.05, 0.15, 0.04),
            cube(4, -0.15, -0.12, 0.04),
        ]);
        for seed in 0..10 {
            let Ok(sample) = make_sample(&s, 2, seed) else {
                continue;
            };
            for p in &sample.plans {
                let a = sample.scene.object(p.anchor_id).unwrap();
                let rel = classify_relation(a, &sample.dropped_object, sample.scene.viewer_yaw())
                    .unwrap();
                assert_eq!(rel, p.direction);
            }
            assert_ne!(sample.plans[0].anchor_id, sample.plans[1].anchor_id);
        }
    }
}
