use std::collections::BTreeMap;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::instantiate::{world_extent, NodeShape, SUPPORT_HEIGHT};
use crate::geometry::ConvexPolygon;
use crate::rng::Rng;
use crate::scene_graph::SceneGraph;
use crate::scene_model::Relation;
use crate::{Pose, Result, Vec3};

/// Placement attempts per node before settling for the best clearance seen.
pub const LAYOUT_ATTEMPTS: usize = 24;
/// Attempts that keep the edge's own relation before trying other directions.
const RELATION_ATTEMPTS: usize = 6;
/// Angular jitter around the relation direction, radians.
const DIRECTION_JITTER: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Density {
    Sparse,
    Dense,
}

impl Density {
    /// Range of the gap between neighboring footprints, meters.
    pub fn gap_range(self) -> [f64; 2] {
        match self {
            Density::Dense => [0.02, 0.05],
            Density::Sparse => [0.08, 0.15],
        }
    }
}

fn footprint_at_origin(shape: &NodeShape) -> ConvexPolygon<f64> {
    let pose = Pose::new(Vec3::zeros(), shape.yaw);
    let pts: Vec<Vec3> = shape
        .shape
        .points
        .points()
        .iter()
        .map(|p| pose.transform_point(p))
        .collect();
    ConvexPolygon::from_points3(&pts)
}

/// Re-positions the nodes of `graph` so neighbors are separated by gaps drawn from
/// `gap`. Children follow their edge relation from the parent (jittered); "on" children
/// that fit inside their parent's footprint are stacked. When a direction does not clear
/// the already placed footprints by the minimum gap, other directions are tried.
/// Returns the graph with new centroids, world extents and refreshed edges.
pub fn layout_graph(
    graph: &SceneGraph,
    shapes: &BTreeMap<u32, NodeShape>,
    gap: [f64; 2],
    rng: &mut Rng,
) -> Result<SceneGraph> {
    let mut out = graph.clone();
    if graph.is_empty() {
        return Ok(out);
    }
    let polys: BTreeMap<u32, ConvexPolygon<f64>> = shapes
        .iter()
        .map(|(id, s)| (*id, footprint_at_origin(s)))
        .collect();
    let extents: BTreeMap<u32, Vec3> = shapes
        .iter()
        .map(|(id, s)| (*id, world_extent(s)))
        .collect();
    let mut xy: BTreeMap<u32, [f64; 2]> = BTreeMap::new();
    let mut base: BTreeMap<u32, f64> = BTreeMap::new();
    // Footprints resting on the support, for clearance checks.
    let mut ground: Vec<(u32, ConvexPolygon<f64>)> = Vec::new();
    for id in graph.bfs() {
        let ext = extents[&id];
        let poly = &polys[&id];
        let Some(edge) = graph.parent_edge(id) else {
            xy.insert(id, [0.0, 0.0]);
            base.insert(id, SUPPORT_HEIGHT);
            ground.push((id, poly.clone()));
            continue;
        };
        let p = edge.parent;
        let pxy = xy[&p];
        let pext = extents[&p];
        if edge.relation == Relation::On && ext.x <= pext.x && ext.y <= pext.y {
            let j = [
                rng.random_range(-0.25..=0.25) * (pext.x - ext.x),
                rng.random_range(-0.25..=0.25) * (pext.y - ext.y),
            ];
            xy.insert(id, [pxy[0] + j[0], pxy[1] + j[1]]);
            base.insert(id, base[&p] + pext.z);
            continue;
        }
        let ppoly = polys[&p].translated(pxy);
        let mut best: Option<(f64, [f64; 2])> = None;
        for attempt in 0..LAYOUT_ATTEMPTS {
            let rel = if attempt < RELATION_ATTEMPTS && edge.relation != Relation::On {
                edge.relation
            } else {
                Relation::COMPASS[rng.random_range(0..Relation::COMPASS.len())]
            };
            let a = rel.viewer_angle::<f64>().expect("compass relation")
                + graph.viewer_yaw
                + rng.random_range(-DIRECTION_JITTER..=DIRECTION_JITTER);
            let u = [a.cos(), a.sin()];
            let g = rng.random_range(gap[0]..=gap[1]);
            let d = ppoly.reach(pxy, u) + poly.reach([0.0, 0.0], [-u[0], -u[1]]) + g;
            let c = [pxy[0] + d * u[0], pxy[1] + d * u[1]];
            let placed = poly.translated(c);
            let clearance = ground
                .iter()
                .map(|(_, q)| placed.distance(q))
                .fold(f64::INFINITY, f64::min);
            if best.is_none_or(|(bc, _)| clearance > bc) {
                best = Some((clearance, c));
            }
            if clearance >= gap[0] {
                break;
            }
        }
        let c = best.expect("at least one attempt").1;
        xy.insert(id, c);
        base.insert(id, SUPPORT_HEIGHT);
        ground.push((id, poly.translated(c)));
    }
    for n in &mut out.nodes {
        let e = extents[&n.id];
        let c = xy[&n.id];
        n.centroid = Vec3::new(c[0], c[1], base[&n.id] + e.z / 2.0);
        n.extent = Some(e);
    }
    out.refresh_edges();
    Ok(out)
}

/// Smallest horizontal gap from each support-resting object footprint to its nearest
/// neighbor, averaged. `None` with fewer than two such objects.
pub fn mean_nearest_gap(footprints: &[ConvexPolygon<f64>]) -> Option<f64> {
    if footprints.len() < 2 {
        return None;
    }
    let total: f64 = footprints
        .iter()
        .enumerate()
        .map(|(i, a)| {
            footprints
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, b)| a.distance(b).max(0.0))
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    Some(total / footprints.len() as f64)
}
