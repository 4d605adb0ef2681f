use std::f64::consts::FRAC_PI_4;

use super::object::footprint_radius;
use super::relation::to_viewer_frame;
use super::{Relation, Scene, StructuredPlan};
use crate::geometry::ConvexPolygon;
use crate::real::wrap_angle;
use crate::{Error, Result, Vec3};

/// Numerical slack for region boundaries (boundaries are inclusive).
pub const REGION_TOL: f64 = 1e-9;
/// Radial band width in multiples of the subject footprint radius.
pub const BAND_RADII: f64 = 3.0;
/// Grid step used to decide whether an intersection of regions is empty.
const FEASIBILITY_STEP: f64 = 0.005;

/// Horizontal region implied by one plan.
#[derive(Clone, Debug, PartialEq)]
pub enum RegionConstraint {
    /// Points within 45° of the relation direction around the anchor, at a distance
    /// between contact and contact plus three subject radii.
    Sector {
        anchor_id: u32,
        center: [f64; 2],
        footprint: ConvexPolygon<f64>,
        relation: Relation,
        viewer_yaw: f64,
        subject_radius: f64,
    },
    /// The anchor's top footprint.
    OnTop {
        anchor_id: u32,
        footprint: ConvexPolygon<f64>,
    },
}

impl RegionConstraint {
    pub fn for_plan(scene: &Scene, plan: &StructuredPlan, subject_extent: &Vec3) -> Result<Self> {
        let anchor = plan.resolve(scene)?;
        let footprint = anchor.footprint().clone();
        Ok(match plan.direction {
            Relation::On => RegionConstraint::OnTop {
                anchor_id: anchor.id(),
                footprint,
            },
            relation => RegionConstraint::Sector {
                anchor_id: anchor.id(),
                center: anchor.pose().translation().xy(),
                footprint,
                relation,
                viewer_yaw: scene.viewer_yaw(),
                subject_radius: footprint_radius(subject_extent),
            },
        })
    }

    /// Closed membership test for a horizontal position.
    pub fn contains(&self, q: [f64; 2]) -> bool {
        match self {
            RegionConstraint::OnTop { footprint, .. } => footprint.contains(q, REGION_TOL),
            RegionConstraint::Sector {
                center,
                relation,
                viewer_yaw,
                ..
            } => {
                let v = [q[0] - center[0], q[1] - center[1]];
                let r = v[0].hypot(v[1]);
                if r < 1e-12 {
                    return false;
                }
                let vv = to_viewer_frame(v, *viewer_yaw);
                let target: f64 = relation.viewer_angle().expect("compass relation");
                let dtheta = wrap_angle(vv[1].atan2(vv[0]) - target).abs();
                if dtheta > FRAC_PI_4 + REGION_TOL {
                    return false;
                }
                let (lo, hi) = self.radial_band([v[0] / r, v[1] / r]);
                r >= lo - REGION_TOL && r <= hi + REGION_TOL
            }
        }
    }

    /// `[contact, contact + 3 r_s]` along the unit direction `u` from the anchor center.
    pub fn radial_band(&self, u: [f64; 2]) -> (f64, f64) {
        match self {
            RegionConstraint::Sector {
                center,
                footprint,
                subject_radius,
                ..
            } => {
                let lo = footprint.reach(*center, u) + subject_radius;
                (lo, lo + BAND_RADII * subject_radius)
            }
            RegionConstraint::OnTop { .. } => (0.0, 0.0),
        }
    }

    /// A point in the middle of the region: mid-band along the relation direction, or
    /// the footprint centroid for "on".
    pub fn center_point(&self) -> [f64; 2] {
        match self {
            RegionConstraint::Sector {
                center,
                relation,
                viewer_yaw,
                ..
            } => {
                let u = relation
                    .scene_direction(*viewer_yaw)
                    .expect("compass relation");
                let (lo, hi) = self.radial_band(u);
                let m = 0.5 * (lo + hi);
                [center[0] + m * u[0], center[1] + m * u[1]]
            }
            RegionConstraint::OnTop { footprint, .. } => polygon_centroid(footprint),
        }
    }

    /// Axis-aligned bounds enclosing the region.
    pub fn bounds(&self) -> ([f64; 2], [f64; 2]) {
        let (verts, pad, c) = match self {
            RegionConstraint::OnTop { footprint, .. } => (footprint.vertices(), 0.0, None),
            RegionConstraint::Sector {
                footprint,
                center,
                subject_radius,
                ..
            } => (
                footprint.vertices(),
                (1.0 + BAND_RADII) * subject_radius,
                Some(*center),
            ),
        };
        match c {
            None => {
                let lo = verts
                    .iter()
                    .fold([f64::INFINITY; 2], |a, v| [a[0].min(v[0]), a[1].min(v[1])]);
                let hi = verts.iter().fold([f64::NEG_INFINITY; 2], |a, v| {
                    [a[0].max(v[0]), a[1].max(v[1])]
                });
                (lo, hi)
            }
            Some(c) => {
                let reach = verts
                    .iter()
                    .map(|v| (v[0] - c[0]).hypot(v[1] - c[1]))
                    .fold(0.0, f64::max);
                let r = reach + pad;
                ([c[0] - r, c[1] - r], [c[0] + r, c[1] + r])
            }
        }
    }
}

/// Mean of the polygon's vertices (area centroid for degenerate hulls).
fn polygon_centroid(p: &ConvexPolygon<f64>) -> [f64; 2] {
    let v = p.vertices();
    let a = p.area();
    if v.len() < 3 || a <= 1e-15 {
        let n = v.len().max(1) as f64;
        return v
            .iter()
            .fold([0.0, 0.0], |s, q| [s[0] + q[0] / n, s[1] + q[1] / n]);
    }
    let (mut cx, mut cy) = (0.0, 0.0);
    for i in 0..v.len() {
        let (p0, p1) = (v[i], v[(i + 1) % v.len()]);
        let cross = p0[0] * p1[1] - p1[0] * p0[1];
        cx += (p0[0] + p1[0]) * cross;
        cy += (p0[1] + p1[1]) * cross;
    }
    [cx / (6.0 * a), cy / (6.0 * a)]
}

/// Intersection of the regions implied by a set of plans.
#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    pub constraints: Vec<RegionConstraint>,
    /// Indices into the scene cloud of points whose horizontal position is in the region.
    pub members: Vec<usize>,
    /// Convex outline of the feasible sampling grid.
    pub outline: ConvexPolygon<f64>,
}

impl Region {
    pub fn contains(&self, q: [f64; 2]) -> bool {
        self.constraints.iter().all(|c| c.contains(q))
    }
}

/// Builds the ground-truth placement region for `plans`.
pub fn annotate_region(
    scene: &Scene,
    plans: &[StructuredPlan],
    subject_extent: &Vec3,
) -> Result<Region> {
    if plans.is_empty() {
        return Err(Error::InvalidArgument(
            "annotate_region needs at least one plan".into(),
        ));
    }
    let constraints = plans
        .iter()
        .map(|p| RegionConstraint::for_plan(scene, p, subject_extent))
        .collect::<Result<Vec<_>>>()?;
    let (mut lo, mut hi) = ([f64::NEG_INFINITY; 2], [f64::INFINITY; 2]);
    for c in &constraints {
        let (l, h) = c.bounds();
        lo = [lo[0].max(l[0]), lo[1].max(l[1])];
        hi = [hi[0].min(h[0]), hi[1].min(h[1])];
    }
    if lo[0] > hi[0] || lo[1] > hi[1] {
        return Err(Error::InfeasiblePlanSet);
    }
    let region = Region {
        constraints,
        members: Vec::new(),
        outline: ConvexPolygon::hull(std::iter::empty()),
    };
    let nx = ((hi[0] - lo[0]) / FEASIBILITY_STEP).ceil() as usize;
    let ny = ((hi[1] - lo[1]) / FEASIBILITY_STEP).ceil() as usize;
    let mut feasible = Vec::new();
    for i in 0..=nx {
        for j in 0..=ny {
            let q = [
                (lo[0] + i as f64 * FEASIBILITY_STEP).min(hi[0]),
                (lo[1] + j as f64 * FEASIBILITY_STEP).min(hi[1]),
            ];
            if region.contains(q) {
                feasible.push(q);
            }
        }
    }
    // Centers of single constraints may be feasible even when the grid misses them.
    for c in &region.constraints {
        let q = c.center_point();
        if region.contains(q) {
            feasible.push(q);
        }
    }
    if feasible.is_empty() {
        return Err(Error::InfeasiblePlanSet);
    }
    let members = scene
        .cloud()
        .points()
        .iter()
        .enumerate()
        .filter(|(_, p)| region.contains(p.xy()))
        .map(|(i, _)| i)
        .collect();
    Ok(Region {
        members,
        outline: ConvexPolygon::hull(feasible),
        ..region
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::surface::cylinder_surface;
    use crate::scene_model::{classify_relation, SceneObject};
    use crate::{PointCloud, Pose};
    use proptest::prelude::*;

    fn table() -> SceneObject {
        SceneObject::receptacle(
            0,
            "table",
            Vec3::new(1.2, 1.2, 0.04),
            Pose::from_translation(Vec3::new(0.0, 0.0, -0.02)),
        )
        .unwrap()
    }

    /// Cylinder of radius 5 cm whose hull reaches exactly 5 cm along the axes.
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

    fn scene_with(objs: Vec<SceneObject>) -> Scene {
        Scene::new(table(), objs, None, Vec3::new(0.0, 0.0, -1.0)).unwrap()
    }

    #[test]
    fn right_sector_band() {
        let anchor = can(1, 0.0, 0.0);
        let scene = scene_with(vec![anchor.clone()]);
        let plan = StructuredPlan::for_anchor(&anchor, Relation::Right);
        let subject = Vec3::new(0.1, 0.1, 0.1);
        let region = annotate_region(&scene, &[plan], &subject).unwrap();
        let (lo, hi) = region.constraints[0].radial_band([1.0, 0.0]);
        assert!(
            (lo - 0.10).abs() < 1e-9 && (hi - 0.25).abs() < 1e-9,
            "{lo} {hi}"
        );
        assert!(region.contains([0.10, 0.0]));
        assert!(region.contains([0.25, 0.0]));
        assert!(!region.contains([0.26, 0.0]));
        assert!(!region.contains([0.09, 0.0]));
        assert!(!region.contains([-0.2, 0.0]));
        // Sector edge at 45° is inclusive.
        let r = 0.15;
        let a = FRAC_PI_4;
        assert!(region.contains([r * a.cos(), r * a.sin()]));
        assert!(!region.contains([r * (a + 0.01).cos(), r * (a + 0.01).sin()]));
    }

    #[test]
    fn opposite_sides_are_infeasible() {
        let anchor = can(1, 0.0, 0.0);
        let scene = scene_with(vec![anchor.clone()]);
        let plans = [
            StructuredPlan::for_anchor(&anchor, Relation::Left),
            StructuredPlan::for_anchor(&anchor, Relation::Right),
        ];
        assert!(matches!(
            annotate_region(&scene, &plans, &Vec3::new(0.1, 0.1, 0.1)),
            Err(Error::InfeasiblePlanSet)
        ));
    }

    #[test]
    fn on_region_is_anchor_footprint() {
        let anchor = can(1, 0.2, 0.1);
        let scene = scene_with(vec![anchor.clone()]);
        let region = annotate_region(
            &scene,
            &[StructuredPlan::for_anchor(&anchor, Relation::On)],
            &Vec3::new(0.02, 0.02, 0.02),
        )
        .unwrap();
        for &v in anchor.footprint().vertices() {
            assert!(region.contains(v));
        }
        assert!(!region.contains([0.26, 0.1]));
        assert!(region.members.iter().all(|&i| anchor
            .footprint()
            .contains(scene.cloud().points()[i].xy(), 1e-9)));
    }

    #[test]
    fn two_anchor_intersection() {
        let a = can(1, 0.0, 0.0);
        let b = can(2, 0.4, 0.0);
        let scene = scene_with(vec![a.clone(), b.clone()]);
        let plans = [
            StructuredPlan::for_anchor(&a, Relation::Right),
            StructuredPlan::for_anchor(&b, Relation::Left),
        ];
        let region = annotate_region(&scene, &plans, &Vec3::new(0.08, 0.08, 0.1)).unwrap();
        assert!(region.contains([0.2, 0.0]));
        assert!(region.outline.contains([0.2, 0.0], 0.006));
    }

    proptest! {
        #[test]
        fn region_center_classifies_back(
            x in -0.3f64..0.3, y in -0.3f64..0.3, idx in 0usize..8,
            yaw in -3.1f64..3.1, rs in 0.02f64..0.08,
        ) {
            let anchor = can(1, x, y);
            let rel = Relation::COMPASS[idx];
            let plan = StructuredPlan::for_anchor(&anchor, rel);
            let mut scene = scene_with(vec![anchor.clone()]);
            scene = Scene::new_unchecked(
                scene.receptacle().clone(),
                scene.objects().to_vec(),
                Some(crate::scene_model::Camera {
                    intrinsics: crate::CameraIntrinsics::new(500.0, 500.0, 320.0, 240.0, 640, 480).unwrap(),
                    position: Vec3::new(0.0, -1.0, 0.6),
                    orientation: crate::geometry::UnitQuaternion::from_yaw(yaw),
                }),
                scene.gravity(),
            ).unwrap();
            let subject_extent = Vec3::new(2.0 * rs, 2.5 * rs, 0.1);
            let c = RegionConstraint::for_plan(&scene, &plan, &subject_extent).unwrap();
            let q = c.center_point();
            prop_assert!(c.contains(q));
            let pts = cylinder_surface(Vec3::zeros(), rs, 0.05, 0.01);
            let subject = SceneObject::new(2, "cup", PointCloud::new(pts).unwrap(),
                Pose::from_translation(Vec3::new(q[0], q[1], 0.05))).unwrap();
            prop_assert_eq!(classify_relation(&anchor, &subject, scene.viewer_yaw()).unwrap(), rel);
        }
    }
}
