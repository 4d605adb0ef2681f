use std::collections::BTreeSet;

use super::{node_relation, Edge, GraphNode, SceneGraph};
use crate::geometry::Aabb;
use crate::scene_model::Scene;
use crate::{Error, Result, Vec3};

/// Node closest to the mean of all centroids; ties go to the lowest id.
pub fn select_root(nodes: &[GraphNode]) -> Result<u32> {
    if nodes.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot select a root of an empty node list".into(),
        ));
    }
    let center = nodes.iter().map(|n| n.centroid).sum::<Vec3>() / nodes.len() as f64;
    let mut best: Option<(f64, u32)> = None;
    for n in nodes {
        let d = n.centroid.distance(&center);
        if best.is_none_or(|(bd, bid)| d < bd || (d == bd && n.id < bid)) {
            best = Some((d, n.id));
        }
    }
    Ok(best.unwrap().1)
}

/// Prim's tree grown from the selected root: repeatedly attach the unassigned node
/// nearest to the assigned set to its nearest assigned node. Ties prefer the lowest
/// candidate id, then the lowest attachment id.
pub fn build_graph(nodes: &[GraphNode], viewer_yaw: f64) -> Result<SceneGraph> {
    let mut ids = BTreeSet::new();
    for n in nodes {
        if !ids.insert(n.id) {
            return Err(Error::DuplicateId(n.id));
        }
        if !n.centroid.is_finite() {
            return Err(Error::NonFinite(format!("centroid of node {}", n.id)));
        }
    }
    let root = select_root(nodes)?;
    let mut sorted: Vec<&GraphNode> = nodes.iter().collect();
    sorted.sort_by_key(|n| n.id);
    let n = sorted.len();
    let mut assigned = vec![false; n];
    // Nearest assigned node per candidate: (distance, attachment index).
    let mut link: Vec<Option<(f64, usize)>> = vec![None; n];
    let root_idx = sorted.iter().position(|x| x.id == root).unwrap();
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    let mut newest = root_idx;
    assigned[root_idx] = true;
    for _ in 1..n {
        for (i, cand) in sorted.iter().enumerate() {
            if assigned[i] {
                continue;
            }
            let d = cand.centroid.distance(&sorted[newest].centroid);
            // Attachment indices follow id order, so the lower id wins equal distances.
            let better = match link[i] {
                None => true,
                Some((bd, bi)) => d < bd || (d == bd && newest < bi),
            };
            if better {
                link[i] = Some((d, newest));
            }
        }
        let (next, (_, att)) = (0..n)
            .filter(|&i| !assigned[i])
            .map(|i| (i, link[i].unwrap()))
            .fold(None::<(usize, (f64, usize))>, |best, (i, l)| match best {
                Some((_, bl)) if bl.0 <= l.0 => best,
                _ => Some((i, l)),
            })
            .unwrap();
        assigned[next] = true;
        newest = next;
        let (p, c) = (sorted[att], sorted[next]);
        edges.push(Edge {
            parent: p.id,
            child: c.id,
            relation: node_relation(p, c, viewer_yaw),
            offset: c.centroid - p.centroid,
        });
    }
    Ok(SceneGraph {
        root,
        viewer_yaw,
        nodes: nodes.to_vec(),
        edges,
    })
}

/// Graph nodes of a scene's objects: reference point as centroid, world AABB extent.
pub fn scene_nodes(scene: &Scene) -> Vec<GraphNode> {
    scene
        .objects()
        .iter()
        .map(|o| {
            let ext = Aabb::from_points(o.world_points())
                .map(|b| b.extent())
                .unwrap_or(o.extent());
            GraphNode::new(o.id(), o.category(), o.pose().translation()).with_extent(ext)
        })
        .collect()
}

/// Abstracts a scene into its scene graph.
pub fn abstract_scene(scene: &Scene) -> Result<SceneGraph> {
    let nodes = scene_nodes(scene);
    if nodes.is_empty() {
        return Err(Error::TooFewObjects { needed: 1, have: 0 });
    }
    build_graph(&nodes, scene.viewer_yaw())
}
