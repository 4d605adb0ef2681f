//! On-disk layout of labeled samples: one directory per sample plus a manifest.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::LabeledSample;
use crate::geometry::ply;
use crate::scene_model::{
    load_plans, load_scene, save_plans, save_scene, PointStorage, SceneObject,
};
use crate::{AffordanceMap, Error, Pose, Result, Vec3};

pub const CORPUS_SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DroppedFile {
    id: u32,
    category: String,
    extent: Vec3,
    points_ply: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PoseFile {
    t: Vec3,
    yaw: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapFile {
    reference: String,
    activations: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GtFile {
    schema_version: u32,
    dropped: DroppedFile,
    gt_pose: PoseFile,
    affordance: MapFile,
}

/// One manifest row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub dir: String,
    pub seed: u64,
    /// Index of the source graph or scene the sample came from.
    pub source: usize,
    /// Object count of the full scene, including the dropped object.
    pub object_count: usize,
    #[serde(default)]
    pub removed_by_refinement: Vec<u32>,
}

/// A source that produced no sample, with the reason.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkippedEntry {
    pub source: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusManifest {
    pub schema_version: u32,
    pub seed: u64,
    pub config: serde_json::Value,
    pub samples: Vec<ManifestEntry>,
    #[serde(default)]
    pub skipped: Vec<SkippedEntry>,
}

impl CorpusManifest {
    pub fn new(seed: u64, config: serde_json::Value) -> Self {
        Self {
            schema_version: CORPUS_SCHEMA_VERSION,
            seed,
            config,
            samples: Vec::new(),
            skipped: Vec::new(),
        }
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::write(
            dir.join(MANIFEST_FILE),
            serde_json::to_string_pretty(self)? + "\n",
        )?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let m: Self = serde_json::from_str(&std::fs::read_to_string(dir.join(MANIFEST_FILE))?)?;
        if m.schema_version != CORPUS_SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "unsupported corpus schema_version {}",
                m.schema_version
            )));
        }
        Ok(m)
    }
}

/// Writes scene.json (+ clouds/), plans.json, gt.json, object.ply and scene.ply.
pub fn write_sample(dir: &Path, sample: &LabeledSample) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    save_scene(
        &sample.scene,
        &dir.join("scene.json"),
        &PointStorage::Ply(PathBuf::from("clouds")),
    )?;
    save_plans(&dir.join("plans.json"), &sample.plans)?;
    ply::write_ply(&dir.join("scene.ply"), &sample.scene.cloud().cloud)?;
    ply::write_ply(&dir.join("object.ply"), sample.dropped_object.points())?;
    let d = &sample.dropped_object;
    let gt = GtFile {
        schema_version: CORPUS_SCHEMA_VERSION,
        dropped: DroppedFile {
            id: d.id(),
            category: d.category().to_string(),
            extent: d.extent(),
            points_ply: "object.ply".into(),
        },
        gt_pose: PoseFile {
            t: sample.gt_pose.translation(),
            yaw: sample.gt_pose.yaw(),
        },
        affordance: MapFile {
            reference: sample.gt_affordance.reference().to_string(),
            activations: sample.gt_affordance.activations().to_vec(),
        },
    };
    std::fs::write(
        dir.join("gt.json"),
        serde_json::to_string_pretty(&gt)? + "\n",
    )?;
    Ok(())
}

pub fn read_sample(dir: &Path) -> Result<LabeledSample> {
    let scene = load_scene(&dir.join("scene.json"))?;
    let plans = load_plans(&dir.join("plans.json"))?;
    let gt: GtFile = serde_json::from_str(&std::fs::read_to_string(dir.join("gt.json"))?)?;
    if gt.schema_version != CORPUS_SCHEMA_VERSION {
        return Err(Error::Schema(format!(
            "unsupported gt schema_version {}",
            gt.schema_version
        )));
    }
    let points = ply::read_ply(&dir.join(&gt.dropped.points_ply))?;
    let gt_pose = Pose::new(gt.gt_pose.t, gt.gt_pose.yaw);
    let dropped = SceneObject::new(gt.dropped.id, gt.dropped.category, points, gt_pose)?;
    let gt_affordance = AffordanceMap::new(gt.affordance.activations, gt.affordance.reference)?;
    if gt_affordance.len() != scene.cloud().len() {
        return Err(Error::Schema(format!(
            "gt affordance has {} values for a {}-point scene cloud",
            gt_affordance.len(),
            scene.cloud().len()
        )));
    }
    Ok(LabeledSample {
        scene,
        dropped_object: dropped,
        gt_pose,
        plans,
        gt_affordance,
    })
}

/// Directory name of the i-th sample.
pub fn sample_dir_name(i: usize) -> String {
    format!("sample_{i:05}")
}

/// Writes all samples and the manifest. The directory must be empty or absent.
pub fn write_corpus(
    dir: &Path,
    manifest: &CorpusManifest,
    samples: &[LabeledSample],
) -> Result<()> {
    if manifest.samples.len() != samples.len() {
        return Err(Error::InvalidArgument(
            "manifest and sample counts differ".into(),
        ));
    }
    std::fs::create_dir_all(dir)?;
    for (entry, s) in manifest.samples.iter().zip(samples) {
        write_sample(&dir.join(&entry.dir), s)?;
    }
    manifest.save(dir)
}

pub fn read_corpus(dir: &Path) -> Result<(CorpusManifest, Vec<LabeledSample>)> {
    let manifest = CorpusManifest::load(dir)?;
    let samples = manifest
        .samples
        .iter()
        .map(|e| read_sample(&dir.join(&e.dir)))
        .collect::<Result<Vec<_>>>()?;
    Ok((manifest, samples))
}
