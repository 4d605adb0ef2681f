use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::rng::{derive_seed, rng_from_seed, Rng};
use crate::scene_factory::corpus::sample_dir_name;
use crate::scene_factory::{
    instantiate_shapes, layout_graph, make_sample, realize_shapes, refine_poses, CorpusManifest,
    Density, GenerateParams, LabeledSample, ManifestEntry, ShapeLibrary,
};
use crate::scene_graph::{
    crossover, mutate, AugmentParams, CrossoverPolicy, Edge, GraphNode, SceneGraph,
    SimilarityTable, UniformMatchingPairs,
};
use crate::scene_model::{scene_max_penetration, Relation};
use crate::{Error, Result, Vec3, EPS_PEN};

/// Attempts per benchmark scene before the spec is declared infeasible.
pub const BENCHMARK_RETRIES: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Easy,
    Hard,
    Custom,
}

impl Split {
    /// Declared object-count range of a named split.
    pub fn count_range(self) -> Option<[usize; 2]> {
        match self {
            Split::Easy => Some([5, 8]),
            Split::Hard => Some([8, 12]),
            Split::Custom => None,
        }
    }

    pub fn density(self) -> Option<Density> {
        match self {
            Split::Easy => Some(Density::Sparse),
            Split::Hard => Some(Density::Dense),
            Split::Custom => None,
        }
    }
}

/// What to generate. Object counts include the object that is taken out.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkSpec {
    pub split: Split,
    pub count_range: [usize; 2],
    pub density: Density,
    pub n_scenes: usize,
    pub seed: u64,
    #[serde(default = "default_plans")]
    pub n_plans: usize,
    #[serde(default)]
    pub generate: GenerateParams,
    #[serde(default)]
    pub augment: AugmentParams,
}

fn default_plans() -> usize {
    1
}

impl BenchmarkSpec {
    pub fn named(split: Split, n_scenes: usize, seed: u64) -> Result<Self> {
        let (Some(count_range), Some(density)) = (split.count_range(), split.density()) else {
            return Err(Error::InvalidArgument(
                "a custom split needs an explicit count range".into(),
            ));
        };
        Ok(Self {
            split,
            count_range,
            density,
            n_scenes,
            seed,
            n_plans: 1,
            generate: GenerateParams::default(),
            augment: AugmentParams::default(),
        })
    }

    pub fn easy(n_scenes: usize, seed: u64) -> Self {
        Self::named(Split::Easy, n_scenes, seed).expect("named split")
    }

    pub fn hard(n_scenes: usize, seed: u64) -> Self {
        Self::named(Split::Hard, n_scenes, seed).expect("named split")
    }

    pub fn validate(&self) -> Result<()> {
        let [lo, hi] = self.count_range;
        if lo < 2 || lo > hi {
            return Err(Error::InvalidArgument(format!(
                "bad object-count range [{lo}, {hi}]"
            )));
        }
        if let Some(r) = self.split.count_range() {
            if r != self.count_range {
                return Err(Error::InvalidArgument(format!(
                    "split {:?} requires counts {r:?}",
                    self.split
                )));
            }
        }
        if self.n_plans == 0 || self.n_plans >= lo {
            return Err(Error::InvalidArgument(
                "n_plans must be in [1, min count)".into(),
            ));
        }
        Ok(())
    }
}

/// Picks a compass relation uniformly.
fn random_compass(rng: &mut Rng) -> Relation {
    Relation::COMPASS[rng.random_range(0..Relation::COMPASS.len())]
}

/// Shrinks `g` by dropping random leaves, or grows it by hanging nodes copied from the
/// demo pool under random existing nodes, until it has `n` nodes.
fn resize(mut g: SceneGraph, n: usize, pool: &[GraphNode], rng: &mut Rng) -> SceneGraph {
    while g.len() > n {
        let leaves = g.leaves();
        let id = leaves[rng.random_range(0..leaves.len())];
        g.nodes.retain(|x| x.id != id);
        g.edges.retain(|e| e.child != id);
    }
    while g.len() < n {
        let src = &pool[rng.random_range(0..pool.len())];
        let parent = g.nodes[rng.random_range(0..g.nodes.len())].clone();
        let id = g.max_id() + 1;
        let relation = random_compass(rng);
        let a = relation.viewer_angle::<f64>().expect("compass") + g.viewer_yaw;
        let offset = Vec3::new(0.2 * a.cos(), 0.2 * a.sin(), 0.0);
        g.nodes.push(GraphNode {
            id,
            category: src.category.clone(),
            centroid: parent.centroid + offset,
            extent: None,
        });
        g.edges.push(Edge {
            parent: parent.id,
            child: id,
            relation,
            offset,
        });
    }
    g
}

/// One attempt at a benchmark scene.
fn attempt(
    spec: &BenchmarkSpec,
    demos: &[SceneGraph],
    pool: &[GraphNode],
    library: &ShapeLibrary,
    table: &SimilarityTable,
    seed: u64,
) -> Result<LabeledSample> {
    let mut rng = rng_from_seed(seed);
    let [lo, hi] = spec.count_range;
    let n = rng.random_range(lo..=hi);
    let a = rng.random_range(0..demos.len());
    let b = rng.random_range(0..demos.len());
    let mut g = demos[a].clone();
    if let Some((e1, e2)) = UniformMatchingPairs.select(&demos[a], &demos[b], &mut rng) {
        g = crossover(&demos[a], &demos[b], e1, e2, spec.augment.p_c, rng.random())?.0;
    }
    let g = resize(g, n, pool, &mut rng);
    let categories = library.categories();
    let g = mutate(
        &g,
        table,
        &categories,
        spec.augment.tau_p,
        spec.augment.p_m,
        rng.random(),
    )?;
    let shapes = realize_shapes(&g, library, rng.random())?;
    let laid = layout_graph(&g, &shapes, spec.density.gap_range(), &mut rng)?;
    let scene = instantiate_shapes(&laid, &shapes, spec.generate.receptacle_extent)?;
    let (scene, _) = refine_poses(&scene, &spec.generate.refine)?;
    let count = scene.objects().len();
    if count < lo || count > hi {
        return Err(Error::InfeasibleScene(format!(
            "{count} objects after refinement, need [{lo}, {hi}]"
        )));
    }
    if scene_max_penetration(&scene) > EPS_PEN {
        return Err(Error::InfeasibleScene("residual collision".into()));
    }
    make_sample(&scene, spec.n_plans, rng.random())
}

/// Generates `spec.n_scenes` labeled samples from augmented demonstration graphs.
/// Scene `i` depends only on `(spec, demos, library, i)`; each scene is retried with
/// fresh derived seeds up to [`BENCHMARK_RETRIES`] times.
pub fn gen_benchmark(
    spec: &BenchmarkSpec,
    demos: &[SceneGraph],
    library: &ShapeLibrary,
) -> Result<Vec<LabeledSample>> {
    spec.validate()?;
    if demos.iter().all(SceneGraph::is_empty) {
        return Err(Error::InvalidArgument(
            "demonstration corpus is empty".into(),
        ));
    }
    let demos: Vec<SceneGraph> = demos.iter().filter(|g| !g.is_empty()).cloned().collect();
    for n in demos.iter().flat_map(|g| &g.nodes) {
        library.get(&n.category)?;
    }
    let pool: Vec<GraphNode> = demos.iter().flat_map(|g| g.nodes.iter().cloned()).collect();
    let table = SimilarityTable::function_groups();
    (0..spec.n_scenes)
        .into_par_iter()
        .map(|i| {
            let base = derive_seed(spec.seed, i as u64);
            let mut last = None;
            for r in 0..BENCHMARK_RETRIES {
                match attempt(
                    spec,
                    &demos,
                    &pool,
                    library,
                    &table,
                    derive_seed(base, r as u64),
                ) {
                    Ok(s) => return Ok(s),
                    Err(e) => last = Some(e),
                }
            }
            Err(Error::InfeasibleSpec(format!(
                "scene {i}: no valid scene after {BENCHMARK_RETRIES} attempts (last: {})",
                last.expect("at least one attempt")
            )))
        })
        .collect()
}

/// [`gen_benchmark`] plus a manifest describing it, ready for `write_corpus`.
pub fn gen_benchmark_corpus(
    spec: &BenchmarkSpec,
    demos: &[SceneGraph],
    library: &ShapeLibrary,
) -> Result<(CorpusManifest, Vec<LabeledSample>)> {
    let samples = gen_benchmark(spec, demos, library)?;
    let mut manifest = CorpusManifest::new(spec.seed, serde_json::to_value(spec)?);
    manifest.samples = samples
        .iter()
        .enumerate()
        .map(|(i, s)| ManifestEntry {
            dir: sample_dir_name(i),
            seed: derive_seed(spec.seed, i as u64),
            source: i,
            object_count: s.scene.objects().len() + 1,
            removed_by_refinement: Vec::new(),
        })
        .collect();
    Ok((manifest, samples))
}
