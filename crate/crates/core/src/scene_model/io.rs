use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::object::{bake_tilt, receptacle_top_points, Camera};
use super::{Scene, SceneObject};
use crate::geometry::{ply, rotate_z, surface, Aabb, UnitQuaternion};
use crate::{CameraIntrinsics, Error, PointCloud, Pose, Result, Vec3};

pub const SCENE_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PoseFile {
    t: Vec3,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    yaw: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    quat: Option<UnitQuaternion<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CameraFile {
    intrinsics: CameraIntrinsics,
    pose: PoseFile,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectFile {
    id: u32,
    category: String,
    pose: PoseFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    points_ply: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    points: Option<Vec<Vec3>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    extent: Option<Vec3>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneFile {
    schema_version: u32,
    gravity: Vec3,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    camera: Option<CameraFile>,
    receptacle: ObjectFile,
    objects: Vec<ObjectFile>,
}

/// Where object surface points go when a scene is written.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointStorage {
    /// Points embedded in the JSON document.
    Inline,
    /// One ASCII PLY per object in this directory, relative to the scene file.
    Ply(PathBuf),
}

impl PoseFile {
    /// Splits into a yaw pose and an optional tilt to bake into the points.
    fn resolve(&self) -> Result<(Pose, Option<UnitQuaternion<f64>>)> {
        match (self.yaw, self.quat) {
            (Some(_), Some(_)) => Err(Error::Schema("pose has both yaw and quat".into())),
            (yaw, None) => Ok((Pose::new(self.t, yaw.unwrap_or(0.0)), None)),
            (None, Some(q)) => {
                let tilt = (!q.is_upright(1e-9)).then_some(q);
                Ok((Pose::new(self.t, q.heading()), tilt))
            }
        }
    }
}

fn load_points(o: &ObjectFile, base_dir: &Path) -> Result<Option<Vec<Vec3>>> {
    match (&o.points_ply, &o.points) {
        (Some(_), Some(_)) => Err(Error::Schema(format!(
            "object {} has both points and points_ply",
            o.id
        ))),
        (Some(rel), None) => Ok(Some(
            ply::read_ply::<f64>(&base_dir.join(rel))?.into_points(),
        )),
        (None, Some(p)) => Ok(Some(p.clone())),
        (None, None) => Ok(None),
    }
}

fn build_object(o: &ObjectFile, base_dir: &Path) -> Result<SceneObject> {
    let (pose, tilt) = o.pose.resolve()?;
    let mut pts = match load_points(o, base_dir)? {
        Some(p) => p,
        None => {
            let e = o.extent.ok_or_else(|| {
                Error::Schema(format!(
                    "object {} needs points, points_ply or extent",
                    o.id
                ))
            })?;
            let area = 2.0 * (e.x * e.y + e.y * e.z + e.x * e.z);
            surface::box_surface(Vec3::zeros(), e * 0.5, surface_spacing(area))
        }
    };
    let mut t = pose.translation();
    if let Some(q) = tilt {
        let (baked, c) = bake_tilt(&pts, &q);
        pts = baked;
        t += rotate_z(&c, pose.yaw());
    }
    // Reference point is the AABB center of the object-frame points.
    let c = Aabb::from_points(&pts).ok_or(Error::EmptyCloud)?.center();
    if c.norm() > 1e-9 {
        pts.iter_mut().for_each(|p| *p -= c);
        t += rotate_z(&c, pose.yaw());
    }
    SceneObject::new(
        o.id,
        o.category.clone(),
        PointCloud::new(pts)?,
        pose.with_translation(t),
    )
}

fn build_receptacle(o: &ObjectFile, base_dir: &Path) -> Result<SceneObject> {
    let (pose, tilt) = o.pose.resolve()?;
    if tilt.is_some() {
        return Err(Error::InvalidScene("receptacle must be upright".into()));
    }
    let extent = o
        .extent
        .ok_or_else(|| Error::Schema("receptacle needs an extent".into()))?;
    match load_points(o, base_dir)? {
        None => SceneObject::receptacle(o.id, o.category.clone(), extent, pose),
        Some(p) => {
            SceneObject::with_extent(o.id, o.category.clone(), PointCloud::new(p)?, pose, extent)
        }
    }
}

/// Grid spacing giving roughly 400 samples over a surface of the given area, never
/// finer than 1 cm.
pub fn surface_spacing(area: f64) -> f64 {
    (area / 400.0).sqrt().max(0.01)
}

pub fn scene_from_json(text: &str, base_dir: &Path) -> Result<Scene> {
    let f: SceneFile = serde_json::from_str(text)?;
    if f.schema_version != SCENE_SCHEMA_VERSION {
        return Err(Error::Schema(format!(
            "unsupported scene schema_version {}",
            f.schema_version
        )));
    }
    let receptacle = build_receptacle(&f.receptacle, base_dir)?;
    let objects = f
        .objects
        .iter()
        .map(|o| build_object(o, base_dir))
        .collect::<Result<Vec<_>>>()?;
    let camera = f
        .camera
        .map(|c| {
            let orientation = match (c.pose.yaw, c.pose.quat) {
                (Some(_), Some(_)) => {
                    return Err(Error::Schema("camera pose has both yaw and quat".into()))
                }
                (_, Some(q)) => q,
                (yaw, None) => UnitQuaternion::from_yaw(yaw.unwrap_or(0.0)),
            };
            Ok(Camera {
                intrinsics: c.intrinsics,
                position: c.pose.t,
                orientation,
            })
        })
        .transpose()?;
    Scene::new(receptacle, objects, camera, f.gravity)
}

pub fn load_scene(path: &Path) -> Result<Scene> {
    let text = std::fs::read_to_string(path)?;
    scene_from_json(&text, path.parent().unwrap_or(Path::new(".")))
}

fn pose_file(p: &Pose) -> PoseFile {
    PoseFile {
        t: p.translation(),
        yaw: Some(p.yaw()),
        quat: None,
    }
}

/// Serializes a scene. With [`PointStorage::Ply`] the returned list holds the relative
/// PLY paths and clouds the caller must write.
fn scene_file(scene: &Scene, storage: &PointStorage) -> (SceneFile, Vec<(String, PointCloud)>) {
    let mut clouds = Vec::new();
    let r = scene.receptacle();
    let procedural = r.points().points() == receptacle_top_points(&r.extent()).as_slice();
    let receptacle = ObjectFile {
        id: r.id(),
        category: r.category().to_string(),
        pose: pose_file(r.pose()),
        points_ply: None,
        points: (!procedural).then(|| r.points().points().to_vec()),
        extent: Some(r.extent()),
    };
    let objects = scene
        .objects()
        .iter()
        .map(|o| {
            let (points, points_ply) = match storage {
                PointStorage::Inline => (Some(o.points().points().to_vec()), None),
                PointStorage::Ply(dir) => {
                    let rel = dir
                        .join(format!("obj_{}.ply", o.id()))
                        .to_string_lossy()
                        .replace('\\', "/");
                    clouds.push((rel.clone(), o.points().clone()));
                    (None, Some(rel))
                }
            };
            ObjectFile {
                id: o.id(),
                category: o.category().to_string(),
                pose: pose_file(o.pose()),
                points_ply,
                points,
                extent: Some(o.extent()),
            }
        })
        .collect();
    let camera = scene.camera().map(|c| CameraFile {
        intrinsics: c.intrinsics,
        pose: PoseFile {
            t: c.position,
            yaw: None,
            quat: Some(c.orientation),
        },
    });
    let file = SceneFile {
        schema_version: SCENE_SCHEMA_VERSION,
        gravity: scene.gravity(),
        camera,
        receptacle,
        objects,
    };
    (file, clouds)
}

/// Scene JSON with inline points.
pub fn scene_to_json(scene: &Scene) -> Result<String> {
    let (file, _) = scene_file(scene, &PointStorage::Inline);
    Ok(serde_json::to_string_pretty(&file)? + "\n")
}

pub fn save_scene(scene: &Scene, path: &Path, storage: &PointStorage) -> Result<()> {
    let (file, clouds) = scene_file(scene, storage);
    let base = path.parent().unwrap_or(Path::new("."));
    for (rel, cloud) in &clouds {
        let p = base.join(rel);
        if let Some(dir) = p.parent() {
            std::fs::create_dir_all(dir)?;
        }
        ply::write_ply(&p, cloud)?;
    }
    std::fs::write(path, serde_json::to_string_pretty(&file)? + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const DEMO: &str = r#"{
      "schema_version": 1,
      "gravity": [0, 0, -1],
      "camera": {"intrinsics": {"fx": 600, "fy": 600, "cx": 320, "cy": 240, "width": 640, "height": 480},
                 "pose": {"t": [0, -0.8, 0.6], "yaw": 0.0}},
      "receptacle": {"id": 0, "category": "table", "pose": {"t": [0, 0, -0.02]}, "extent": [0.8, 0.6, 0.04]},
      "objects": [
        {"id": 1, "category": "book", "pose": {"t": [0.1, 0.0, 0.015], "yaw": 0.3}, "extent": [0.2, 0.15, 0.03]},
        {"id": 2, "category": "mug", "pose": {"t": [-0.2, 0.1, 0.05]}, "points": [[-0.04,-0.04,-0.05],[0.04,0.04,0.05],[0.04,-0.04,0.0]]}
      ]
    }"#;

    #[test]
    fn loads_demo_and_round_trips() {
        let s = scene_from_json(DEMO, Path::new(".")).unwrap();
        assert_eq!(s.objects().len(), 2);
        assert!(s.support_height().abs() < 1e-12);
        assert!((s.object(1).unwrap().base_height()).abs() < 1e-9);
        let text = scene_to_json(&s).unwrap();
        let s2 = scene_from_json(&text, Path::new(".")).unwrap();
        assert_eq!(s.receptacle(), s2.receptacle(), "receptacle");
        assert_eq!(s.camera(), s2.camera(), "camera");
        for (a, b) in s.objects().iter().zip(s2.objects()) {
            assert_eq!(a.pose(), b.pose(), "pose {}", a.id());
            assert_eq!(a.points(), b.points(), "points {}", a.id());
        }
        assert_eq!(s, s2);
        assert_eq!(scene_to_json(&s2).unwrap(), text);
        // The procedural receptacle grid is not written out.
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(v["receptacle"].get("points").is_none());
    }

    #[test]
    fn ply_storage_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let s = scene_from_json(DEMO, Path::new(".")).unwrap();
        let path = dir.path().join("scene.json");
        save_scene(&s, &path, &PointStorage::Ply("clouds".into())).unwrap();
        assert!(dir.path().join("clouds/obj_1.ply").exists());
        assert_eq!(load_scene(&path).unwrap(), s);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_versions() {
        let bad = DEMO.replace("\"gravity\"", "\"colour\": 1, \"gravity\"");
        assert!(scene_from_json(&bad, Path::new(".")).is_err());
        let v2 = DEMO.replace("\"schema_version\": 1", "\"schema_version\": 2");
        assert!(matches!(
            scene_from_json(&v2, Path::new(".")),
            Err(Error::Schema(_))
        ));
        let sideways = DEMO.replace("[0, 0, -1]", "[1, 0, 0]");
        assert!(matches!(
            scene_from_json(&sideways, Path::new(".")),
            Err(Error::InvalidScene(_))
        ));
    }

    #[test]
    fn tilted_quaternion_is_baked() {
        let text = DEMO.replace(
            r#""pose": {"t": [0.1, 0.0, 0.015], "yaw": 0.3}, "extent": [0.2, 0.15, 0.03]"#,
            r#""pose": {"t": [0.1, 0.0, 0.0636396], "quat": [0.9238795, 0.3826834, 0, 0]}, "extent": [0.2, 0.15, 0.03]"#,
        );
        let s = scene_from_json(&text, Path::new(".")).unwrap();
        let book = s.object(1).unwrap();
        let expect_h = (0.15 + 0.03) / 2f64.sqrt();
        assert!((book.extent().z - expect_h).abs() < 1e-6);
        assert!((book.extent().x - 0.2).abs() < 1e-9);
        assert!(book.base_height().abs() < 1e-6);
        // Lifted off the table the object is unsupported.
        let floating = text.replace("0.0636396", "0.2");
        assert!(matches!(
            scene_from_json(&floating, Path::new(".")),
            Err(Error::InvalidScene(_))
        ));
    }
}
