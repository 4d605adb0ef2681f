use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::corpus::{sample_dir_name, CorpusManifest, ManifestEntry, SkippedEntry};
use super::{
    instantiate, make_sample, refine_poses, LabeledSample, RefineParams, ShapeLibrary,
    DEFAULT_RECEPTACLE_EXTENT,
};
use crate::rng::derive_seed;
use crate::scene_graph::SceneGraph;
use crate::scene_model::Scene;
use crate::{Result, Vec3};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerateParams {
    pub n_plans: usize,
    pub receptacle_extent: Vec3,
    pub refine: RefineParams,
}

impl Default for GenerateParams {
    fn default() -> Self {
        let [x, y, z] = DEFAULT_RECEPTACLE_EXTENT;
        Self {
            n_plans: 1,
            receptacle_extent: Vec3::new(x, y, z),
            refine: RefineParams::default(),
        }
    }
}

/// Result of realizing one graph.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedScene {
    pub scene: Scene,
    pub removed: Vec<u32>,
}

/// Instantiates and refines one graph.
pub fn realize_graph(
    graph: &SceneGraph,
    library: &ShapeLibrary,
    params: &GenerateParams,
    seed: u64,
) -> Result<GeneratedScene> {
    let scene = instantiate(
        graph,
        library,
        params.receptacle_extent,
        derive_seed(seed, 0),
    )?;
    let (scene, removed) = refine_poses(&scene, &params.refine)?;
    Ok(GeneratedScene { scene, removed })
}

/// Graph `i` uses the stream `derive_seed(seed, i)`, so each sample depends only on its
/// graph, the library, the parameters and the global seed. Graphs that cannot produce a
/// sample are listed in the manifest's `skipped` section.
pub fn generate_corpus(
    graphs: &[SceneGraph],
    library: &ShapeLibrary,
    params: &GenerateParams,
    seed: u64,
) -> Result<(CorpusManifest, Vec<LabeledSample>)> {
    let results: Vec<Result<(LabeledSample, GeneratedScene, u64)>> = graphs
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let s = derive_seed(seed, i as u64);
            let gen = realize_graph(g, library, params, s)?;
            let sample = make_sample(&gen.scene, params.n_plans, derive_seed(s, 1))?;
            Ok((sample, gen, s))
        })
        .collect();
    let mut manifest = CorpusManifest::new(seed, serde_json::to_value(params)?);
    let mut samples = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok((sample, gen, s)) => {
                manifest.samples.push(ManifestEntry {
                    dir: sample_dir_name(i),
                    seed: s,
                    source: i,
                    object_count: gen.scene.objects().len(),
                    removed_by_refinement: gen.removed,
                });
                samples.push(sample);
            }
            Err(e) => manifest.skipped.push(SkippedEntry {
                source: i,
                reason: e.to_string(),
            }),
        }
    }
    Ok((manifest, samples))
}
