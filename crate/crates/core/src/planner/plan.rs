use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cost::{cost_afford, cost_collide};
use super::denoiser::{AnalyticDenoiser, Denoiser, DenoiserCondition};
use super::guidance::{guided_reverse_step, CostContext, GuidanceConfig};
use super::schedule::{normal, normal3, DiffusionScales, NoiseSchedule, ScheduleConfig};
use crate::affordance::{compose_coarse, compose_fine, high_affordance_points, plan_affordance};
use crate::geometry::{KdTree, TsdfGrid, TsdfParams};
use crate::rng::{child_rng, derive_seed, rng_from_seed};
use crate::scene_model::{annotate_region, Relation, Scene, StructuredPlan};
use crate::{Error, PointCloud, Pose, Result, Vec3};

pub const PLAN_RESULT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerConfig {
    pub schedule: ScheduleConfig,
    pub scales: DiffusionScales,
    pub guidance: GuidanceConfig,
    /// Affordance points sampled for the denoiser condition.
    pub k_a: usize,
    /// Object points used by the cost terms.
    pub max_object_points: usize,
    pub kmeans_k: usize,
    pub top_k: usize,
    pub tsdf: TsdfParams,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            schedule: ScheduleConfig::default(),
            scales: DiffusionScales::default(),
            guidance: GuidanceConfig::default(),
            k_a: 64,
            max_object_points: 128,
            kmeans_k: 2,
            top_k: 2,
            tsdf: TsdfParams::default(),
        }
    }
}

/// Per-chain guidance diagnostics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainDiagnostics {
    /// Steps whose correction hit a bound.
    pub clamped_steps: usize,
    /// Whether any step produced a non-finite gradient.
    pub nonfinite: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Candidate {
    #[serde(rename = "t")]
    pub translation: Vec3,
    pub yaw: f64,
    /// Weighted guidance cost at the final pose; the ranking key.
    pub final_cost: f64,
    /// Unweighted alignment term at the final pose, m^2.
    pub afford_cost: f64,
    /// Unweighted penetration term at the final pose, m.
    pub collide_cost: f64,
    pub diagnostics: ChainDiagnostics,
}

impl Candidate {
    pub fn pose(&self) -> Pose {
        Pose::new(self.translation, self.yaw)
    }
}

/// Candidates sorted by ascending final cost.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanResult {
    pub schema_version: u32,
    pub candidates: Vec<Candidate>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl PlanResult {
    pub fn best(&self) -> Option<&Candidate> {
        self.candidates.first()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: Self = serde_json::from_str(text)?;
        if r.schema_version != PLAN_RESULT_SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "unsupported plan result schema_version {}",
                r.schema_version
            )));
        }
        Ok(r)
    }
}

/// Height of the surface under `xy`: the anchor top for a satisfied "on" plan, else the support.
fn surface_height(scene: &Scene, plans: &[StructuredPlan], xy: [f64; 2]) -> f64 {
    plans
        .iter()
        .filter(|p| p.direction == Relation::On)
        .filter_map(|p| p.resolve(scene).ok())
        .filter(|a| a.footprint().contains(xy, 1e-9))
        .map(|a| a.top_height())
        .fold(scene.support_height(), f64::max)
}

/// [`plan_placement_with`] using the analytic denoiser.
pub fn plan_placement(
    scene: &Scene,
    plans: &[StructuredPlan],
    object_points: &PointCloud,
    n_candidates: usize,
    config: &PlannerConfig,
    seed: u64,
) -> Result<PlanResult> {
    plan_placement_with(
        scene,
        plans,
        object_points,
        n_candidates,
        config,
        seed,
        &AnalyticDenoiser,
    )
}

/// Runs `n_candidates` independent guided reverse chains and ranks the resulting poses by
/// final cost. `object_points` are in the object frame. Every returned pose rests on the
/// support surface (or on the anchor top for a satisfied "on" plan).
pub fn plan_placement_with(
    scene: &Scene,
    plans: &[StructuredPlan],
    object_points: &PointCloud,
    n_candidates: usize,
    config: &PlannerConfig,
    seed: u64,
    denoiser: &dyn Denoiser<f64>,
) -> Result<PlanResult> {
    if plans.is_empty() {
        return Err(Error::InvalidArgument(
            "at least one plan is required".into(),
        ));
    }
    object_points.require_non_empty()?;
    if n_candidates == 0 {
        return Err(Error::InvalidArgument(
            "n_candidates must be at least 1".into(),
        ));
    }
    config.guidance.validate()?;
    let schedule = NoiseSchedule::<f64>::from_config(&config.schedule)?;
    let extent = object_points.aabb().expect("non-empty").extent();
    let mut warnings = Vec::new();
    match annotate_region(scene, plans, &extent) {
        Ok(_) => {}
        Err(Error::InfeasiblePlanSet) => warnings.push(Error::InfeasiblePlanSet.to_string()),
        Err(e) => return Err(e),
    }
    let cloud = scene.cloud().cloud;
    let maps = plans
        .iter()
        .map(|p| plan_affordance(scene, p, &extent))
        .collect::<Result<Vec<_>>>()?;
    let coarse = compose_coarse(&maps, &cloud, config.kmeans_k, config.top_k)?;
    let fine = compose_fine(&maps)?;
    let x_h = high_affordance_points(&fine, &cloud, config.guidance.threshold_frac)?;
    let x_h = KdTree::from_cloud(&x_h)?;
    let tsdf = if scene.objects().is_empty() {
        None
    } else {
        Some(collision_grid(scene, &config.tsdf)?)
    };
    let obj = object_points.subsampled(config.max_object_points);
    let cond = DenoiserCondition::new(
        obj.clone(),
        coarse,
        &cloud,
        config.k_a,
        &mut rng_from_seed(derive_seed(seed, 0)),
    )?;
    let ctx = CostContext {
        object_points: &obj,
        scene_cloud: &cloud,
        fine_map: &fine,
        x_h: &x_h,
        tsdf: tsdf.as_ref(),
        origin: cond.target_translation(),
    };
    let chains = (0..n_candidates)
        .into_par_iter()
        .map(|c| {
            let mut rng = child_rng(seed, c as u64 + 1);
            let s = config.scales;
            let mut pose = Pose::new(
                ctx.origin + normal3::<f64>(&mut rng) * s.translation,
                normal::<f64>(&mut rng) * s.yaw,
            );
            let mut diag = ChainDiagnostics::default();
            for k in (1..=schedule.steps()).rev() {
                let (next, d) = guided_reverse_step(
                    &pose,
                    k,
                    &cond,
                    denoiser,
                    &schedule,
                    &s,
                    &config.guidance,
                    &ctx,
                    &mut rng,
                )?;
                diag.clamped_steps += d.clamped as usize;
                diag.nonfinite |= d.nonfinite;
                pose = next;
            }
            let t = pose.translation();
            let z = surface_height(scene, plans, t.xy()) + cond.rest_offset;
            let pose = pose.with_translation(Vec3::new(t.x, t.y, z));
            Ok(score(&pose, &ctx, &config.guidance, diag))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut candidates = chains;
    // Stable: equal costs keep chain order.
    candidates.sort_by(|a, b| a.final_cost.total_cmp(&b.final_cost));
    Ok(PlanResult {
        schema_version: PLAN_RESULT_SCHEMA_VERSION,
        candidates,
        warnings,
    })
}

/// TSDF over the scene objects whose distances ignore each object's resting face. That face
/// touches the support and is never observed, and inside a low object it would otherwise be
/// the nearest surface, pointing the collision gradient into the support.
fn collision_grid(scene: &Scene, params: &TsdfParams) -> Result<TsdfGrid<f64>> {
    let clouds = scene.object_clouds();
    let tol = 0.5 * params.voxel_size;
    let surfaces = clouds
        .iter()
        .map(|c| {
            let zmin = c.points().iter().map(|p| p.z).fold(f64::INFINITY, f64::min);
            PointCloud::new(
                c.points()
                    .iter()
                    .copied()
                    .filter(|p| p.z > zmin + tol)
                    .collect(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    TsdfGrid::build_with_surfaces(&clouds, &surfaces, params)
}

fn score(
    pose: &Pose,
    ctx: &CostContext<'_, f64>,
    g: &GuidanceConfig,
    diagnostics: ChainDiagnostics,
) -> Candidate {
    let (afford, _) = cost_afford(pose, ctx.object_points, ctx.x_h);
    let collide = ctx
        .tsdf
        .map(|grid| cost_collide(pose, ctx.object_points, grid).0)
        .unwrap_or(0.0);
    let la = if g.afford_on { g.lambda_a } else { 0.0 };
    let lc = if g.collide_on { g.lambda_c } else { 0.0 };
    Candidate {
        translation: pose.translation(),
        yaw: pose.yaw(),
        final_cost: la * afford + lc * collide,
        afford_cost: afford,
        collide_cost: collide,
        diagnostics,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::surface::box_surface;
    use crate::scene_model::{Region, SceneObject};

    fn table_scene(objs: Vec<SceneObject>) -> Scene {
        let t = SceneObject::receptacle(
            0,
            "table",
            Vec3::new(1.2, 0.8, 0.04),
            Pose::from_translation(Vec3::new(0.0, 0.0, -0.02)),
        )
        .unwrap();
        Scene::new(t, objs, None, Vec3::new(0.0, 0.0, -1.0)).unwrap()
    }

    fn block(id: u32, x: f64, y: f64, half: [f64; 3]) -> SceneObject {
        let pts = box_surface(Vec3::zeros(), Vec3::new(half[0], half[1], half[2]), 0.01);
        SceneObject::new(
            id,
            "box",
            PointCloud::new(pts).unwrap(),
            Pose::from_translation(Vec3::new(x, y, half[2])),
        )
        .unwrap()
    }

    fn subject() -> PointCloud {
        PointCloud::new(box_surface(
            Vec3::zeros(),
            Vec3::new(0.04, 0.03, 0.05),
            0.01,
        ))
        .unwrap()
    }

    fn in_region(region: &Region, c: &Candidate) -> bool {
        region.contains(c.translation.xy())
    }

    #[test]
    fn single_anchor_lands_in_region() {
        let scene = table_scene(vec![block(1, 0.0, 0.0, [0.06, 0.06, 0.05])]);
        let extent = subject().aabb().unwrap().extent();
        for rel in Relation::COMPASS {
            let plans = vec![StructuredPlan::for_anchor(&scene.objects()[0], rel)];
            let region = annotate_region(&scene, &plans, &extent).unwrap();
            let r = plan_placement(&scene, &plans, &subject(), 8, &PlannerConfig::default(), 11)
                .unwrap();
            assert!(r.warnings.is_empty());
            let best = r.best().unwrap();
            assert!(in_region(&region, best), "{rel:?}: {:?}", best.translation);
            assert!((best.translation.z - 0.05).abs() < 1e-9);
            for w in r.candidates.windows(2) {
                assert!(w[0].final_cost <= w[1].final_cost);
            }
        }
    }

    #[test]
    fn seeded_runs_repeat() {
        let scene = table_scene(vec![
            block(1, 0.0, 0.0, [0.06, 0.06, 0.05]),
            block(2, 0.2, 0.1, [0.03, 0.03, 0.03]),
        ]);
        let plans = vec![StructuredPlan::for_anchor(
            &scene.objects()[0],
            Relation::Right,
        )];
        let a =
            plan_placement(&scene, &plans, &subject(), 1, &PlannerConfig::default(), 5).unwrap();
        let b =
            plan_placement(&scene, &plans, &subject(), 1, &PlannerConfig::default(), 5).unwrap();
        assert_eq!(a, b);
        let c =
            plan_placement(&scene, &plans, &subject(), 4, &PlannerConfig::default(), 5).unwrap();
        assert_eq!(PlanResult::from_json(&c.to_json().unwrap()).unwrap(), c);
    }

    #[test]
    fn duplicate_plans_change_nothing() {
        let scene = table_scene(vec![block(1, 0.0, 0.0, [0.06, 0.06, 0.05])]);
        let p = StructuredPlan::for_anchor(&scene.objects()[0], Relation::Front);
        let one = plan_placement(
            &scene,
            std::slice::from_ref(&p),
            &subject(),
            4,
            &PlannerConfig::default(),
            2,
        )
        .unwrap();
        let two = plan_placement(
            &scene,
            &[p.clone(), p],
            &subject(),
            4,
            &PlannerConfig::default(),
            2,
        )
        .unwrap();
        assert_eq!(one, two);
    }

    #[test]
    fn on_plan_rests_on_anchor() {
        let scene = table_scene(vec![block(1, 0.0, 0.0, [0.15, 0.12, 0.02])]);
        let small = PointCloud::new(box_surface(
            Vec3::zeros(),
            Vec3::new(0.03, 0.03, 0.03),
            0.01,
        ))
        .unwrap();
        let plans = vec![StructuredPlan::for_anchor(
            &scene.objects()[0],
            Relation::On,
        )];
        let r = plan_placement(&scene, &plans, &small, 4, &PlannerConfig::default(), 3).unwrap();
        let best = r.best().unwrap();
        assert!(scene.objects()[0]
            .footprint()
            .contains(best.translation.xy(), 0.0));
        assert!((best.translation.z - 0.07).abs() < 1e-9);
    }

    #[test]
    fn infeasible_plan_set_warns() {
        let scene = table_scene(vec![
            block(1, 0.0, 0.0, [0.04, 0.04, 0.04]),
            block(2, 0.4, 0.0, [0.04, 0.04, 0.04]),
        ]);
        let plans = vec![
            StructuredPlan::for_anchor(&scene.objects()[0], Relation::Left),
            StructuredPlan::for_anchor(&scene.objects()[1], Relation::Right),
        ];
        let r =
            plan_placement(&scene, &plans, &subject(), 2, &PlannerConfig::default(), 0).unwrap();
        assert_eq!(r.warnings.len(), 1);
        assert_eq!(r.candidates.len(), 2);
    }

    #[test]
    fn bad_inputs() {
        let scene = table_scene(vec![block(1, 0.0, 0.0, [0.04, 0.04, 0.04])]);
        let plans = vec![StructuredPlan::for_anchor(
            &scene.objects()[0],
            Relation::Left,
        )];
        let cfg = PlannerConfig::default();
        assert!(plan_placement(&scene, &[], &subject(), 2, &cfg, 0).is_err());
        assert!(plan_placement(&scene, &plans, &subject(), 0, &cfg, 0).is_err());
        assert!(matches!(
            plan_placement(
                &scene,
                &plans,
                &PointCloud::new(vec![]).unwrap(),
                1,
                &cfg,
                0
            ),
            Err(Error::EmptyCloud)
        ));
    }
}
