use std::collections::BTreeMap;

use rand::Rng as _;

use super::{Shape, ShapeLibrary};
use crate::geometry::{Aabb, UnitQuaternion};
use crate::real::wrap_angle;
use crate::rng::child_rng;
use crate::scene_graph::SceneGraph;
use crate::scene_model::{Camera, Relation, Scene, SceneObject};
use crate::{CameraIntrinsics, Error, Pose, Result, Vec3};

/// Receptacle scale factors tried in order until every footprint fits.
pub const RECEPTACLE_SCALES: [f64; 4] = [1.0, 1.1, 1.25, 1.5];
/// Clearance kept between object footprints and the receptacle edge.
pub const RECEPTACLE_MARGIN: f64 = 0.02;
/// Height of the receptacle top in generated scenes.
pub const SUPPORT_HEIGHT: f64 = 0.0;
pub const RECEPTACLE_CATEGORY: &str = "table";
/// Default receptacle size for generated scenes.
pub const DEFAULT_RECEPTACLE_EXTENT: [f64; 3] = [1.2, 0.8, 0.05];

/// Shape and yaw drawn for one graph node.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeShape {
    pub shape: Shape,
    pub yaw: f64,
}

/// Draws a shape and a yaw for every node. Each node uses its own stream, so the draw
/// for a node depends only on `(seed, id, category)`.
pub fn realize_shapes(
    graph: &SceneGraph,
    library: &ShapeLibrary,
    seed: u64,
) -> Result<BTreeMap<u32, NodeShape>> {
    graph
        .nodes
        .iter()
        .map(|n| {
            let mut rng = child_rng(seed, u64::from(n.id));
            let shape = library.sample(&n.category, &mut rng)?;
            let quarter = rng.random_range(0..4u32);
            let yaw =
                wrap_angle(graph.viewer_yaw + f64::from(quarter) * std::f64::consts::FRAC_PI_2);
            Ok((n.id, NodeShape { shape, yaw }))
        })
        .collect()
}

/// World-frame AABB extent of a shape at a yaw.
pub fn world_extent(shape: &NodeShape) -> Vec3 {
    let pose = Pose::new(Vec3::zeros(), shape.yaw);
    let pts: Vec<Vec3> = shape
        .shape
        .points
        .points()
        .iter()
        .map(|p| pose.transform_point(p))
        .collect();
    Aabb::from_points(&pts).expect("non-empty shape").extent()
}

/// A camera whose heading is the viewer yaw, standing in front of `center`.
pub fn viewer_camera(center: Vec3, viewer_yaw: f64) -> Camera {
    let (s, c) = viewer_yaw.sin_cos();
    // Viewer stands opposite the "behind" direction (-sin, cos).
    let position = center + Vec3::new(s, -c, 0.0) * 1.0 + Vec3::new(0.0, 0.0, 0.6);
    Camera {
        intrinsics: CameraIntrinsics::new(600.0, 600.0, 320.0, 240.0, 640, 480)
            .expect("valid intrinsics"),
        position,
        orientation: UnitQuaternion::from_yaw(viewer_yaw),
    }
}

fn receptacle_id(graph: &SceneGraph) -> u32 {
    if graph.node(0).is_none() {
        0
    } else {
        graph.max_id() + 1
    }
}

fn receptacle(id: u32, extent: Vec3, center: [f64; 2]) -> Result<SceneObject> {
    SceneObject::receptacle(
        id,
        RECEPTACLE_CATEGORY,
        extent,
        Pose::from_translation(Vec3::new(
            center[0],
            center[1],
            SUPPORT_HEIGHT - extent.z / 2.0,
        )),
    )
}

/// Realizes a scene graph: each node becomes a sampled shape at its centroid, resting on
/// the receptacle or, for "on" edges whose parent footprint holds the centroid, on the
/// parent's top. The receptacle is the smallest scaled version of `receptacle_extent`
/// holding all footprints with the edge margin.
pub fn instantiate(
    graph: &SceneGraph,
    library: &ShapeLibrary,
    receptacle_extent: Vec3,
    seed: u64,
) -> Result<Scene> {
    let shapes = realize_shapes(graph, library, seed)?;
    instantiate_shapes(graph, &shapes, receptacle_extent)
}

/// [`instantiate`] with shapes already drawn.
pub fn instantiate_shapes(
    graph: &SceneGraph,
    shapes: &BTreeMap<u32, NodeShape>,
    receptacle_extent: Vec3,
) -> Result<Scene> {
    if !(receptacle_extent.x > 0.0 && receptacle_extent.y > 0.0 && receptacle_extent.z > 0.0) {
        return Err(Error::InvalidArgument(
            "receptacle extent must be positive".into(),
        ));
    }
    let rid = receptacle_id(graph);
    let gravity = Vec3::new(0.0, 0.0, -1.0);
    if graph.is_empty() {
        let table = receptacle(rid, receptacle_extent, [0.0, 0.0])?;
        return Scene::new(
            table,
            Vec::new(),
            Some(viewer_camera(Vec3::zeros(), graph.viewer_yaw)),
            gravity,
        );
    }
    graph.validate()?;
    let mut placed: BTreeMap<u32, SceneObject> = BTreeMap::new();
    let mut order = Vec::with_capacity(graph.len());
    for id in graph.bfs() {
        let node = graph.node(id).expect("bfs yields nodes");
        let ns = &shapes.get(&id).ok_or(Error::UnknownId(id))?;
        let xy = node.centroid.xy();
        let mut base = SUPPORT_HEIGHT;
        if let Some(e) = graph.parent_edge(id) {
            let parent = &placed[&e.parent];
            if e.relation == Relation::On && parent.footprint().contains(xy, 1e-9) {
                base = parent.top_height();
            }
        }
        let pose = Pose::new(
            Vec3::new(xy[0], xy[1], base + ns.shape.extent.z / 2.0),
            ns.yaw,
        );
        let obj = SceneObject::new(id, node.category.clone(), ns.shape.points.clone(), pose)?;
        placed.insert(id, obj);
        order.push(id);
    }
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for o in placed.values() {
        for v in o.footprint().vertices() {
            for a in 0..2 {
                lo[a] = lo[a].min(v[a]);
                hi[a] = hi[a].max(v[a]);
            }
        }
    }
    let need = [
        hi[0] - lo[0] + 2.0 * RECEPTACLE_MARGIN,
        hi[1] - lo[1] + 2.0 * RECEPTACLE_MARGIN,
    ];
    let scale = RECEPTACLE_SCALES
        .iter()
        .copied()
        .find(|s| s * receptacle_extent.x >= need[0] && s * receptacle_extent.y >= need[1])
        .ok_or_else(|| {
            Error::InfeasibleScene(format!(
                "footprints need {:.3} x {:.3} m but the largest receptacle is {:.3} x {:.3} m",
                need[0],
                need[1],
                RECEPTACLE_SCALES[3] * receptacle_extent.x,
                RECEPTACLE_SCALES[3] * receptacle_extent.y
            ))
        })?;
    let extent = Vec3::new(
        scale * receptacle_extent.x,
        scale * receptacle_extent.y,
        receptacle_extent.z,
    );
    let center = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
    let table = receptacle(rid, extent, center)?;
    let objects: Vec<SceneObject> = order
        .into_iter()
        .map(|id| placed.remove(&id).unwrap())
        .collect();
    let cam_center = Vec3::new(center[0], center[1], SUPPORT_HEIGHT);
    Scene::new(
        table,
        objects,
        Some(viewer_camera(cam_center, graph.viewer_yaw)),
        gravity,
    )
}
