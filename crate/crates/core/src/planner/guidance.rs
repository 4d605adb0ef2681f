use serde::{Deserialize, Serialize};

use super::cost::{cost_afford, cost_collide};
use super::denoiser::{spatial_feature, Denoiser, DenoiserCondition};
use super::schedule::{normal, normal3, DiffusionScales, NoiseSchedule};
use crate::affordance::AffordanceMap;
use crate::geometry::{KdTree, PointCloud, Pose, PoseDelta, TsdfGrid, Vec3};
use crate::real::{wrap_angle, Real};
use crate::rng::Rng;
use crate::{Error, Result};

/// Cost-guidance weights and limits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GuidanceConfig {
    pub lambda_a: f64,
    pub lambda_c: f64,
    /// Fraction of the fine-map maximum that defines the high-affordance set.
    pub threshold_frac: f64,
    pub afford_on: bool,
    pub collide_on: bool,
    /// Per-component bound on the translation correction, meters.
    pub g_max: f64,
    /// Bound on the yaw correction, radians.
    pub yaw_max: f64,
}

impl Default for GuidanceConfig {
    fn default() -> Self {
        Self {
            lambda_a: 500.0,
            lambda_c: 1000.0,
            threshold_frac: 0.5,
            afford_on: true,
            collide_on: true,
            g_max: 0.05,
            yaw_max: 0.1,
        }
    }
}

impl GuidanceConfig {
    pub fn off() -> Self {
        Self {
            lambda_a: 0.0,
            lambda_c: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_a >= 0.0 && self.lambda_c >= 0.0) {
            return Err(Error::InvalidArgument(
                "guidance weights must be non-negative".into(),
            ));
        }
        if !(self.threshold_frac > 0.0 && self.threshold_frac <= 1.0) {
            return Err(Error::InvalidArgument(
                "threshold_frac must lie in (0, 1]".into(),
            ));
        }
        if !(self.g_max > 0.0 && self.yaw_max > 0.0) {
            return Err(Error::InvalidArgument(
                "correction bounds must be positive".into(),
            ));
        }
        Ok(())
    }

    fn afford_weight(&self) -> f64 {
        if self.afford_on {
            self.lambda_a
        } else {
            0.0
        }
    }

    fn collide_weight(&self) -> f64 {
        if self.collide_on {
            self.lambda_c
        } else {
            0.0
        }
    }

    /// True when no cost term contributes.
    pub fn is_off(&self) -> bool {
        self.afford_weight() == 0.0 && self.collide_weight() == 0.0
    }
}

/// Immutable per-query data the cost terms and the spatial feature read.
pub struct CostContext<'a, T> {
    pub object_points: &'a PointCloud<T>,
    pub scene_cloud: &'a PointCloud<T>,
    pub fine_map: &'a AffordanceMap<T>,
    pub x_h: &'a KdTree<T>,
    /// `None` when the scene has no objects to collide with.
    pub tsdf: Option<&'a TsdfGrid<T>>,
    /// Origin of the diffusion frame.
    pub origin: Vec3<T>,
}

/// Both cost terms, their weighted sum and its gradient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostTerms<T> {
    pub afford: T,
    pub collide: T,
    pub total: T,
    pub grad: PoseDelta<T>,
}

/// `lambda_a J_afford + lambda_c J_collide` at `pose`. Disabled terms are not evaluated.
pub fn guided_cost<T: Real>(
    pose: &Pose<T>,
    ctx: &CostContext<'_, T>,
    g: &GuidanceConfig,
) -> CostTerms<T> {
    let (la, lc) = (T::lit(g.afford_weight()), T::lit(g.collide_weight()));
    let mut out = CostTerms {
        afford: T::zero(),
        collide: T::zero(),
        total: T::zero(),
        grad: PoseDelta::zero(),
    };
    if la > T::zero() {
        let (j, d) = cost_afford(pose, ctx.object_points, ctx.x_h);
        out.afford = j;
        out.total += la * j;
        out.grad = out.grad.add(&d.scaled(la, la));
    }
    if let (true, Some(grid)) = (lc > T::zero(), ctx.tsdf) {
        let (j, d) = cost_collide(pose, ctx.object_points, grid);
        out.collide = j;
        out.total += lc * j;
        out.grad = out.grad.add(&d.scaled(lc, lc));
    }
    out
}

/// What happened to the guidance correction of one step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepDiagnostics {
    pub clamped: bool,
    pub nonfinite: bool,
}

fn clamp_component<T: Real>(v: T, bound: T, diag: &mut StepDiagnostics) -> T {
    if !v.is_finite() {
        diag.nonfinite = true;
        return T::zero();
    }
    if v.abs() > bound {
        diag.clamped = true;
        return v.signum() * bound;
    }
    v
}

/// One reverse step `k -> k-1`: denoise, correct the clean-pose estimate along the
/// negative cost gradient scaled by the step's posterior variance, then sample the
/// posterior around it. No noise is added at `k = 1`.
#[allow(clippy::too_many_arguments)]
pub fn guided_reverse_step<T: Real, D: Denoiser<T> + ?Sized>(
    pose_k: &Pose<T>,
    k: usize,
    cond: &DenoiserCondition<T>,
    denoiser: &D,
    schedule: &NoiseSchedule<T>,
    scales: &DiffusionScales,
    guidance: &GuidanceConfig,
    ctx: &CostContext<'_, T>,
    rng: &mut Rng,
) -> Result<(Pose<T>, StepDiagnostics)> {
    let var = schedule.posterior_variance(k)?;
    let a_k = spatial_feature(pose_k, ctx.fine_map, ctx.scene_cloud)?;
    let pred = denoiser.denoise(pose_k, a_k, cond, k, schedule)?;
    let mut diag = StepDiagnostics::default();
    let (s, sy) = (T::lit(scales.translation), T::lit(scales.yaw));
    let clean = if guidance.is_off() {
        pred
    } else {
        let grad = guided_cost(&pred, ctx, guidance).grad;
        let step = grad.scaled(var * s * s, var * sy * sy);
        let (gm, ym) = (T::lit(guidance.g_max), T::lit(guidance.yaw_max));
        let corr = PoseDelta {
            translation: Vec3::new(
                clamp_component(step.translation.x, gm, &mut diag),
                clamp_component(step.translation.y, gm, &mut diag),
                clamp_component(step.translation.z, gm, &mut diag),
            ),
            yaw: clamp_component(step.yaw, ym, &mut diag),
        };
        pred.boxplus(&corr.scaled(-T::one(), -T::one()))
    };
    let (c0, ck) = schedule.posterior_mean_coefs(k)?;
    let o = ctx.origin;
    let mean_t = (clean.translation() - o) * c0 + (pose_k.translation() - o) * ck + o;
    // Unwrap the clean yaw next to the current one before mixing.
    let yaw0 = pose_k.yaw() + wrap_angle(clean.yaw() - pose_k.yaw());
    let mean_yaw = yaw0 * c0 + pose_k.yaw() * ck;
    if k == 1 {
        return Ok((Pose::new(mean_t, mean_yaw), diag));
    }
    let sd = var.sqrt();
    let t = mean_t + normal3::<T>(rng) * (sd * s);
    let yaw = mean_yaw + normal::<T>(rng) * (sd * sy);
    Ok((Pose::new(t, yaw), diag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::AnalyticDenoiser;
    use crate::rng::rng_from_seed;

    struct Fixture {
        scene: PointCloud<f64>,
        map: AffordanceMap<f64>,
        tree: KdTree<f64>,
        obj: PointCloud<f64>,
        grid: TsdfGrid<f64>,
        cond: DenoiserCondition<f64>,
    }

    fn fixture() -> Fixture {
        let pts: Vec<Vec3<f64>> = (0..20)
            .flat_map(|i| (0..20).map(move |j| Vec3::new(i as f64 * 0.02, j as f64 * 0.02, 0.0)))
            .collect();
        let scene = PointCloud::new(pts.clone()).unwrap();
        let act: Vec<f64> = pts
            .iter()
            .map(|p| (-(p.x - 0.3).powi(2) / 0.005).exp())
            .collect();
        let map = AffordanceMap::new(act, "s").unwrap();
        let tree = KdTree::new(&pts[300..]).unwrap();
        let obj =
            PointCloud::new(vec![Vec3::new(-0.02, 0.0, 0.0), Vec3::new(0.02, 0.0, 0.0)]).unwrap();
        let blocker = PointCloud::new(crate::geometry::surface::box_surface(
            Vec3::new(0.1, 0.1, 0.0),
            Vec3::new(0.03, 0.03, 0.03),
            0.01,
        ))
        .unwrap();
        let grid = TsdfGrid::build(&[blocker], &Default::default()).unwrap();
        let cond =
            DenoiserCondition::new(obj.clone(), map.clone(), &scene, 16, &mut rng_from_seed(0))
                .unwrap();
        Fixture {
            scene,
            map,
            tree,
            obj,
            grid,
            cond,
        }
    }

    fn ctx(f: &Fixture) -> CostContext<'_, f64> {
        CostContext {
            object_points: &f.obj,
            scene_cloud: &f.scene,
            fine_map: &f.map,
            x_h: &f.tree,
            tsdf: Some(&f.grid),
            origin: f.cond.target_translation(),
        }
    }

    #[test]
    fn zero_weights_equal_unguided_step() {
        let f = fixture();
        let s = NoiseSchedule::<f64>::linear(50, 1e-4, 0.02).unwrap();
        let pose = Pose::new(Vec3::new(0.1, 0.1, 0.0), 0.3);
        let sc = DiffusionScales::default();
        let zero = GuidanceConfig {
            lambda_a: 0.0,
            lambda_c: 0.0,
            ..Default::default()
        };
        let flags = GuidanceConfig {
            afford_on: false,
            collide_on: false,
            ..Default::default()
        };
        for k in [1, 2, 30, 50] {
            let a = guided_reverse_step(
                &pose,
                k,
                &f.cond,
                &AnalyticDenoiser,
                &s,
                &sc,
                &zero,
                &ctx(&f),
                &mut rng_from_seed(4),
            )
            .unwrap();
            let b = guided_reverse_step(
                &pose,
                k,
                &f.cond,
                &AnalyticDenoiser,
                &s,
                &sc,
                &flags,
                &ctx(&f),
                &mut rng_from_seed(4),
            )
            .unwrap();
            assert_eq!(a, b);
            assert_eq!(a.1, StepDiagnostics::default());
        }
    }

    #[test]
    fn final_step_is_the_posterior_mean() {
        let f = fixture();
        let s = NoiseSchedule::<f64>::linear(50, 1e-4, 0.02).unwrap();
        let pose = Pose::new(Vec3::new(0.1, 0.1, 0.0), 0.3);
        let g = GuidanceConfig::default();
        let sc = DiffusionScales::default();
        let a = guided_reverse_step(
            &pose,
            1,
            &f.cond,
            &AnalyticDenoiser,
            &s,
            &sc,
            &g,
            &ctx(&f),
            &mut rng_from_seed(1),
        )
        .unwrap();
        let b = guided_reverse_step(
            &pose,
            1,
            &f.cond,
            &AnalyticDenoiser,
            &s,
            &sc,
            &g,
            &ctx(&f),
            &mut rng_from_seed(2),
        )
        .unwrap();
        assert_eq!(a, b);
        // Zero posterior variance means no correction either; c0 = 1 returns the prediction.
        let pred = AnalyticDenoiser
            .denoise(&pose, 0.0, &f.cond, 1, &s)
            .unwrap();
        assert!((a.0.translation() - pred.translation()).norm() < 1e-12);
    }

    #[test]
    fn stationary_cost_means_no_correction() {
        let f = fixture();
        let s = NoiseSchedule::<f64>::linear(50, 1e-4, 0.02).unwrap();
        let sc = DiffusionScales::default();
        // Single-point object whose target and pose coincide with an X_h point.
        let q = f.tree.point(0);
        let obj = PointCloud::new(vec![Vec3::zeros()]).unwrap();
        let cond = DenoiserCondition {
            object_points: obj.clone(),
            sampled_points: vec![q; 4],
            sampled_weights: vec![1.0; 4],
            rest_offset: 0.0,
            ..f.cond.clone()
        };
        let pose = Pose::from_translation(q);
        let c = CostContext {
            object_points: &obj,
            tsdf: None,
            origin: q,
            ..ctx(&f)
        };
        let g = GuidanceConfig::default();
        let pred = AnalyticDenoiser.denoise(&pose, 0.0, &cond, 20, &s).unwrap();
        assert_eq!(pred, pose);
        let terms = guided_cost(&pred, &c, &g);
        assert_eq!((terms.total, terms.grad), (0.0, PoseDelta::zero()));
        let a = guided_reverse_step(
            &pose,
            20,
            &cond,
            &AnalyticDenoiser,
            &s,
            &sc,
            &g,
            &c,
            &mut rng_from_seed(3),
        )
        .unwrap();
        let b = guided_reverse_step(
            &pose,
            20,
            &cond,
            &AnalyticDenoiser,
            &s,
            &sc,
            &GuidanceConfig::off(),
            &c,
            &mut rng_from_seed(3),
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn large_gradients_are_clamped() {
        let f = fixture();
        let s = NoiseSchedule::<f64>::linear(50, 1e-4, 0.02).unwrap();
        let sc = DiffusionScales::default();
        let g = GuidanceConfig {
            lambda_a: 1e9,
            ..Default::default()
        };
        let pose = Pose::new(Vec3::new(0.0, 0.0, 0.0), 0.0);
        let (_, d) = guided_reverse_step(
            &pose,
            40,
            &f.cond,
            &AnalyticDenoiser,
            &s,
            &sc,
            &g,
            &ctx(&f),
            &mut rng_from_seed(0),
        )
        .unwrap();
        assert!(d.clamped && !d.nonfinite);
    }
}
