use std::collections::BTreeSet;

use crate::geometry::{surface, Aabb, ConvexPolygon, UnitQuaternion};
use crate::{CameraIntrinsics, Error, PointCloud, Pose, Result, Vec3};

/// Grid spacing of procedural receptacle top surfaces.
pub const RECEPTACLE_SPACING: f64 = 0.01;
/// Allowed gap between an object's base and the surface it rests on.
pub const REST_TOL: f64 = 0.005;

/// World-frame occupancy estimate of an object: horizontal convex footprint times
/// the object's height range.
#[derive(Clone, Debug, PartialEq)]
pub struct Occupancy {
    pub footprint: ConvexPolygon<f64>,
    pub zmin: f64,
    pub zmax: f64,
}

impl Occupancy {
    pub fn from_points(points: &[Vec3]) -> Self {
        let (zmin, zmax) = points
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p.z), hi.max(p.z))
            });
        Self {
            footprint: ConvexPolygon::from_points3(points),
            zmin,
            zmax,
        }
    }

    pub fn contains(&self, p: &Vec3, tol: f64) -> bool {
        p.z >= self.zmin - tol && p.z <= self.zmax + tol && self.footprint.contains(p.xy(), tol)
    }

    pub fn translated(&self, d: &Vec3) -> Self {
        Self {
            footprint: self.footprint.translated([d.x, d.y]),
            zmin: self.zmin + d.z,
            zmax: self.zmax + d.z,
        }
    }
}

/// A rigid object: surface samples in its own frame plus a 4-DOF pose in the scene.
///
/// Object-frame points are expressed relative to the object's reference point, which is
/// the pose translation in the scene.
#[derive(Clone, Debug, PartialEq)]
pub struct SceneObject {
    id: u32,
    category: String,
    points: PointCloud,
    pose: Pose,
    extent: Vec3,
    world: Vec<Vec3>,
    occupancy: Occupancy,
}

impl SceneObject {
    /// Extent is taken from the AABB of `points` and must be positive on every axis.
    pub fn new(
        id: u32,
        category: impl Into<String>,
        points: PointCloud,
        pose: Pose,
    ) -> Result<Self> {
        points.require_non_empty()?;
        let extent = points
            .aabb()
            .map(|b| b.extent())
            .unwrap_or_else(Vec3::zeros);
        Self::with_extent(id, category, points, pose, extent)
    }

    /// Like [`SceneObject::new`] with a declared extent, for surfaces sampled on one
    /// face only (receptacles).
    pub fn with_extent(
        id: u32,
        category: impl Into<String>,
        points: PointCloud,
        pose: Pose,
        extent: Vec3,
    ) -> Result<Self> {
        points.require_non_empty()?;
        let category = category.into();
        if !(extent.x > 0.0 && extent.y > 0.0 && extent.z > 0.0) || !extent.is_finite() {
            return Err(Error::InvalidScene(format!(
                "object {id} ({category}) has non-positive extent"
            )));
        }
        if !pose.translation().is_finite() {
            return Err(Error::NonFinite(format!("pose of object {id}")));
        }
        let world: Vec<Vec3> = points
            .points()
            .iter()
            .map(|p| pose.transform_point(p))
            .collect();
        let occupancy = Occupancy::from_points(&world);
        Ok(Self {
            id,
            category,
            points,
            pose,
            extent,
            world,
            occupancy,
        })
    }

    /// A flat receptacle with a procedural top-surface grid. `pose` is the slab center,
    /// so the support height is `pose.z + extent.z / 2`.
    pub fn receptacle(
        id: u32,
        category: impl Into<String>,
        extent: Vec3,
        pose: Pose,
    ) -> Result<Self> {
        let pts = receptacle_top_points(&extent);
        Self::with_extent(id, category, PointCloud::new(pts)?, pose, extent)
    }

    pub fn id(&self) -> u32 {
        self.id
    }

    pub fn category(&self) -> &str {
        &self.category
    }

    /// Object-frame surface samples.
    pub fn points(&self) -> &PointCloud {
        &self.points
    }

    pub fn pose(&self) -> &Pose {
        &self.pose
    }

    pub fn extent(&self) -> Vec3 {
        self.extent
    }

    pub fn world_points(&self) -> &[Vec3] {
        &self.world
    }

    pub fn world_cloud(&self) -> PointCloud {
        PointCloud::new(self.world.clone()).expect("finite world points")
    }

    pub fn occupancy(&self) -> &Occupancy {
        &self.occupancy
    }

    pub fn footprint(&self) -> &ConvexPolygon<f64> {
        &self.occupancy.footprint
    }

    pub fn base_height(&self) -> f64 {
        self.occupancy.zmin
    }

    pub fn top_height(&self) -> f64 {
        self.occupancy.zmax
    }

    /// Horizontal footprint radius: radius of the largest circle inscribed in the
    /// extent rectangle.
    pub fn footprint_radius(&self) -> f64 {
        footprint_radius(&self.extent)
    }

    pub fn with_pose(&self, pose: Pose) -> Self {
        let world: Vec<Vec3> = self
            .points
            .points()
            .iter()
            .map(|p| pose.transform_point(p))
            .collect();
        let occupancy = Occupancy::from_points(&world);
        Self {
            pose,
            world,
            occupancy,
            ..self.clone()
        }
    }

    pub fn with_id(&self, id: u32) -> Self {
        Self { id, ..self.clone() }
    }

    /// Volume of the extent box, used for removal tie-breaking.
    pub fn volume(&self) -> f64 {
        self.extent.x * self.extent.y * self.extent.z
    }
}

pub fn footprint_radius(extent: &Vec3) -> f64 {
    0.5 * extent.x.min(extent.y)
}

/// Top-face grid of a receptacle in its own frame.
pub fn receptacle_top_points(extent: &Vec3) -> Vec<Vec3> {
    surface::plane_grid(
        [0.0, 0.0],
        extent.x / 2.0,
        extent.y / 2.0,
        extent.z / 2.0,
        RECEPTACLE_SPACING,
    )
}

/// Bakes a tilt into object-frame points and recenters them on their AABB center.
/// Returns the recentered points and the offset that was removed.
pub fn bake_tilt(points: &[Vec3], q: &UnitQuaternion<f64>) -> (Vec<Vec3>, Vec3) {
    let tilt = q.tilt();
    let rotated: Vec<Vec3> = points.iter().map(|p| tilt.rotate(p)).collect();
    let c = Aabb::from_points(&rotated)
        .map(|b| b.center())
        .unwrap_or_else(Vec3::zeros);
    (rotated.into_iter().map(|p| p - c).collect(), c)
}

/// Camera used to define the viewer frame of spatial relations.
#[derive(Clone, Debug, PartialEq)]
pub struct Camera {
    pub intrinsics: CameraIntrinsics,
    pub position: Vec3,
    pub orientation: UnitQuaternion<f64>,
}

impl Camera {
    /// Yaw of the camera's right axis projected onto the support plane.
    pub fn viewer_yaw(&self) -> f64 {
        self.orientation.heading()
    }
}

/// Point cloud of a whole scene with the owning object of every point.
#[derive(Clone, Debug, PartialEq)]
pub struct SceneCloud {
    pub cloud: PointCloud,
    pub owners: Vec<u32>,
}

impl SceneCloud {
    pub fn points(&self) -> &[Vec3] {
        self.cloud.points()
    }

    pub fn len(&self) -> usize {
        self.owners.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owners.is_empty()
    }

    /// Indices of the points owned by `id`.
    pub fn indices_of(&self, id: u32) -> impl Iterator<Item = usize> + '_ {
        self.owners
            .iter()
            .enumerate()
            .filter(move |(_, &o)| o == id)
            .map(|(i, _)| i)
    }
}

/// A tabletop scene: one receptacle and the objects resting on it.
#[derive(Clone, Debug, PartialEq)]
pub struct Scene {
    receptacle: SceneObject,
    objects: Vec<SceneObject>,
    camera: Option<Camera>,
    gravity: Vec3,
}

impl Scene {
    /// Validates gravity, unique ids and the resting contract.
    pub fn new(
        receptacle: SceneObject,
        objects: Vec<SceneObject>,
        camera: Option<Camera>,
        gravity: Vec3,
    ) -> Result<Self> {
        let scene = Self::new_unchecked(receptacle, objects, camera, gravity)?;
        scene.check_resting()?;
        Ok(scene)
    }

    /// Validates gravity and ids but not that every object is supported.
    pub fn new_unchecked(
        receptacle: SceneObject,
        objects: Vec<SceneObject>,
        camera: Option<Camera>,
        gravity: Vec3,
    ) -> Result<Self> {
        let g = gravity
            .normalized()
            .ok_or_else(|| Error::InvalidScene("gravity vector is zero".into()))?;
        if (g - Vec3::new(0.0, 0.0, -1.0)).norm() > 1e-6 {
            return Err(Error::InvalidScene("gravity must point along -z".into()));
        }
        let mut ids = BTreeSet::new();
        for o in std::iter::once(&receptacle).chain(&objects) {
            if !ids.insert(o.id()) {
                return Err(Error::DuplicateId(o.id()));
            }
        }
        if let Some(c) = &camera {
            c.intrinsics.validate()?;
        }
        Ok(Self {
            receptacle,
            objects,
            camera,
            gravity: g,
        })
    }

    /// Every object either sits on the receptacle or on top of another object.
    pub fn check_resting(&self) -> Result<()> {
        let support = self.support_height();
        for o in &self.objects {
            if (o.base_height() - support).abs() <= REST_TOL {
                continue;
            }
            if self.supporter_of(o).is_none() {
                return Err(Error::InvalidScene(format!(
                    "object {} base at {:.4} m is not supported (support height {:.4} m)",
                    o.id(),
                    o.base_height(),
                    support
                )));
            }
        }
        Ok(())
    }

    /// The object another object is stacked on, if any.
    pub fn supporter_of(&self, o: &SceneObject) -> Option<&SceneObject> {
        let c = o.pose().translation();
        self.objects.iter().filter(|s| s.id() != o.id()).find(|s| {
            (o.base_height() - s.top_height()).abs() <= REST_TOL
                && s.footprint().contains(c.xy(), 1e-9)
        })
    }

    pub fn receptacle(&self) -> &SceneObject {
        &self.receptacle
    }

    pub fn objects(&self) -> &[SceneObject] {
        &self.objects
    }

    pub fn camera(&self) -> Option<&Camera> {
        self.camera.as_ref()
    }

    pub fn gravity(&self) -> Vec3 {
        self.gravity
    }

    /// Height of the receptacle's top surface.
    pub fn support_height(&self) -> f64 {
        self.receptacle.top_height()
    }

    pub fn viewer_yaw(&self) -> f64 {
        self.camera.as_ref().map(Camera::viewer_yaw).unwrap_or(0.0)
    }

    /// Looks up a non-receptacle object.
    pub fn object(&self, id: u32) -> Option<&SceneObject> {
        self.objects.iter().find(|o| o.id() == id)
    }

    /// Looks up any object including the receptacle.
    pub fn any_object(&self, id: u32) -> Option<&SceneObject> {
        if self.receptacle.id() == id {
            Some(&self.receptacle)
        } else {
            self.object(id)
        }
    }

    pub fn next_id(&self) -> u32 {
        self.objects
            .iter()
            .map(SceneObject::id)
            .chain([self.receptacle.id()])
            .max()
            .unwrap_or(0)
            + 1
    }

    /// Removes an object, returning the reduced scene and the object.
    pub fn without(&self, id: u32) -> Result<(Scene, SceneObject)> {
        let idx = self
            .objects
            .iter()
            .position(|o| o.id() == id)
            .ok_or(Error::UnknownId(id))?;
        let mut objects = self.objects.clone();
        let removed = objects.remove(idx);
        Ok((
            Self {
                objects,
                ..self.clone()
            },
            removed,
        ))
    }

    /// Adds an object, checking id uniqueness only.
    pub fn with_object(&self, obj: SceneObject) -> Result<Scene> {
        if self.any_object(obj.id()).is_some() {
            return Err(Error::DuplicateId(obj.id()));
        }
        let mut objects = self.objects.clone();
        objects.push(obj);
        Ok(Self {
            objects,
            ..self.clone()
        })
    }

    pub fn with_objects(&self, objects: Vec<SceneObject>) -> Result<Scene> {
        Self::new_unchecked(
            self.receptacle.clone(),
            objects,
            self.camera.clone(),
            self.gravity,
        )
    }

    pub fn with_receptacle(&self, receptacle: SceneObject) -> Result<Scene> {
        Self::new_unchecked(
            receptacle,
            self.objects.clone(),
            self.camera.clone(),
            self.gravity,
        )
    }

    /// World points of the receptacle followed by each object in list order.
    pub fn cloud(&self) -> SceneCloud {
        let mut pts = Vec::new();
        let mut owners = Vec::new();
        for o in std::iter::once(&self.receptacle).chain(&self.objects) {
            pts.extend_from_slice(o.world_points());
            owners.extend(std::iter::repeat_n(o.id(), o.world_points().len()));
        }
        SceneCloud {
            cloud: PointCloud::new(pts).expect("finite scene points"),
            owners,
        }
    }

    /// World point clouds of all non-receptacle objects.
    pub fn object_clouds(&self) -> Vec<PointCloud> {
        self.objects.iter().map(SceneObject::world_cloud).collect()
    }
}
