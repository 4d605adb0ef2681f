use super::relation::to_viewer_frame;
use super::{Relation, SceneObject};
use crate::{Error, Result};

/// How far the subject's base may sit below the anchor's top and still count as "on".
pub const STACK_TOL: f64 = 0.02;
/// Horizontal centroid distance below which no compass relation is defined.
pub const AMBIGUITY_TOL: f64 = 1e-3;

/// Relation of `subject` with respect to `anchor` as seen by a viewer with `viewer_yaw`.
pub fn classify_relation(
    anchor: &SceneObject,
    subject: &SceneObject,
    viewer_yaw: f64,
) -> Result<Relation> {
    let c = subject.pose().translation();
    if anchor.footprint().contains(c.xy(), 1e-9)
        && subject.base_height() >= anchor.top_height() - STACK_TOL
    {
        return Ok(Relation::On);
    }
    let d = c - anchor.pose().translation();
    classify_displacement([d.x, d.y], viewer_yaw)
}

/// Compass relation of a horizontal scene-frame displacement.
pub fn classify_displacement(d: [f64; 2], viewer_yaw: f64) -> Result<Relation> {
    let dist = d[0].hypot(d[1]);
    if dist < AMBIGUITY_TOL {
        return Err(Error::AmbiguousRelation(dist));
    }
    let v = to_viewer_frame(d, viewer_yaw);
    Ok(Relation::from_viewer_angle(v[1].atan2(v[0])))
}
