//! Penetration depth between objects from their footprint-and-height occupancy.
//!
//! Depth is the smaller of the horizontal minimum translation distance between the
//! two footprints and the vertical one between their height ranges: the shortest
//! straight move that separates the two occupancy prisms.

use super::object::Occupancy;
use super::{Scene, SceneObject};

pub fn penetration_depth(a: &Occupancy, b: &Occupancy) -> f64 {
    let vertical = (a.zmax - b.zmin).min(b.zmax - a.zmin);
    if vertical <= 0.0 {
        return 0.0;
    }
    let horizontal = a.footprint.penetration_depth(&b.footprint);
    if horizontal <= 0.0 {
        return 0.0;
    }
    horizontal.min(vertical)
}

pub fn object_penetration(a: &SceneObject, b: &SceneObject) -> f64 {
    penetration_depth(a.occupancy(), b.occupancy())
}

/// Largest penetration of `obj` against any object of `others` with a different id.
pub fn max_penetration<'a>(
    obj: &SceneObject,
    others: impl IntoIterator<Item = &'a SceneObject>,
) -> f64 {
    others
        .into_iter()
        .filter(|o| o.id() != obj.id())
        .map(|o| object_penetration(obj, o))
        .fold(0.0, f64::max)
}

/// Largest pairwise penetration among the scene's non-receptacle objects.
pub fn scene_max_penetration(scene: &Scene) -> f64 {
    let objs = scene.objects();
    let mut worst = 0.0f64;
    for i in 0..objs.len() {
        for j in i + 1..objs.len() {
            worst = worst.max(object_penetration(&objs[i], &objs[j]));
        }
    }
    worst
}
