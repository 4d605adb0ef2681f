use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;

use super::NoiseSchedule;
use crate::affordance::AffordanceMap;
use crate::geometry::{PointCloud, Pose, Vec3};
use crate::real::{wrap_angle, wrap_axis, Real};
use crate::rng::Rng;
use crate::{Error, Result};

/// Inverse-distance weighted mean of the map around the pose translation.
pub fn spatial_feature<T: Real>(
    pose_k: &Pose<T>,
    map: &AffordanceMap<T>,
    scene_cloud: &PointCloud<T>,
) -> Result<T> {
    map.check_aligned(scene_cloud)?;
    let t = pose_k.translation();
    let eps = T::lit(1e-6);
    let (mut num, mut den) = (T::zero(), T::zero());
    for (p, a) in scene_cloud.points().iter().zip(map.activations()) {
        let w = T::one() / (p.distance(&t) + eps);
        num += w * *a;
        den += w;
    }
    Ok(if den > T::zero() {
        (num / den).min(T::one()).max(T::zero())
    } else {
        T::zero()
    })
}

/// Angle of the dominant horizontal axis of weighted points, or `None` when the spread
/// is nearly isotropic.
fn principal_axis<T: Real>(points: &[Vec3<T>], weights: &[T]) -> Option<T> {
    let total: T = weights.iter().copied().sum();
    if !(total > T::zero()) {
        return None;
    }
    let (mut mx, mut my) = (T::zero(), T::zero());
    for (p, w) in points.iter().zip(weights) {
        mx += p.x * *w;
        my += p.y * *w;
    }
    mx /= total;
    my /= total;
    let (mut sxx, mut syy, mut sxy) = (T::zero(), T::zero(), T::zero());
    for (p, w) in points.iter().zip(weights) {
        let (dx, dy) = (p.x - mx, p.y - my);
        sxx += *w * dx * dx;
        syy += *w * dy * dy;
        sxy += *w * dx * dy;
    }
    let tr = sxx + syy;
    let det = sxx * syy - sxy * sxy;
    let disc = (tr * tr / T::lit(4.0) - det).max(T::zero()).sqrt();
    let (l1, l2) = (tr / T::two() + disc, tr / T::two() - disc);
    // Require the major axis to be clearly longer.
    if !(l1 > T::lit(1e-12)) || l2 > l1 * T::lit(0.7) {
        return None;
    }
    Some(T::half() * (T::two() * sxy).atan2(sxx - syy))
}

/// Everything the denoiser is conditioned on.
#[derive(Clone, Debug, PartialEq)]
pub struct DenoiserCondition<T> {
    /// Object surface points in the object frame.
    pub object_points: PointCloud<T>,
    pub coarse_map: AffordanceMap<T>,
    /// `k_a` scene points drawn with probability proportional to coarse activation.
    pub sampled_points: Vec<Vec3<T>>,
    /// Coarse activation of each sampled point.
    pub sampled_weights: Vec<T>,
    /// Height of the object's center above the surface it rests on.
    pub rest_offset: T,
}

impl<T: Real> DenoiserCondition<T> {
    pub fn new(
        object_points: PointCloud<T>,
        coarse_map: AffordanceMap<T>,
        scene_cloud: &PointCloud<T>,
        k_a: usize,
        rng: &mut Rng,
    ) -> Result<Self> {
        object_points.require_non_empty()?;
        coarse_map.check_aligned(scene_cloud)?;
        if k_a == 0 {
            return Err(Error::InvalidArgument("k_a must be at least 1".into()));
        }
        let w: Vec<f64> = coarse_map
            .activations()
            .iter()
            .map(|a| a.as_f64())
            .collect();
        let dist = WeightedIndex::new(&w).map_err(|_| Error::AllZeroMap)?;
        let idx: Vec<usize> = (0..k_a).map(|_| dist.sample(rng)).collect();
        let sampled_points = idx.iter().map(|&i| scene_cloud.points()[i]).collect();
        let sampled_weights = idx.iter().map(|&i| coarse_map.activations()[i]).collect();
        let zmin = object_points
            .points()
            .iter()
            .map(|p| p.z)
            .fold(T::infinity(), T::min);
        Ok(Self {
            object_points,
            coarse_map,
            sampled_points,
            sampled_weights,
            rest_offset: -zmin,
        })
    }

    /// Activation-weighted mean of the sampled points, lifted so the object would rest
    /// on them.
    pub fn target_translation(&self) -> Vec3<T> {
        let total: T = self.sampled_weights.iter().copied().sum();
        let mut m = Vec3::zeros();
        for (p, w) in self.sampled_points.iter().zip(&self.sampled_weights) {
            m += *p * (*w / total);
        }
        m + Vec3::new(T::zero(), T::zero(), self.rest_offset)
    }

    /// Yaw putting the object's long footprint axis along the sampled region's major
    /// axis (the sector tangent), closest to `current`. `None` when either is round.
    pub fn target_yaw(&self, current: T) -> Option<T> {
        let ones = vec![T::one(); self.object_points.len()];
        let obj_axis = principal_axis(self.object_points.points(), &ones)?;
        let region_axis = principal_axis(&self.sampled_points, &self.sampled_weights)?;
        let base = region_axis - obj_axis;
        // Yaws giving the same axis alignment differ by pi; take the nearest.
        Some(current + wrap_axis(base - current))
    }
}

/// Predicts the clean pose from a noisy one.
pub trait Denoiser<T: Real>: Sync {
    fn denoise(
        &self,
        pose_k: &Pose<T>,
        a_k: T,
        cond: &DenoiserCondition<T>,
        k: usize,
        schedule: &NoiseSchedule<T>,
    ) -> Result<Pose<T>>;
}

/// Closed-form stand-in for a learned denoiser: blends the noisy pose toward the target
/// with weight `1 - alpha_bar(k)`. The spatial feature is accepted but unused.
#[derive(Clone, Copy, Debug, Default)]
pub struct AnalyticDenoiser;

impl AnalyticDenoiser {
    pub fn blend<T: Real>(
        pose_k: &Pose<T>,
        target_t: Vec3<T>,
        target_yaw: Option<T>,
        gamma: T,
    ) -> Pose<T> {
        let t = target_t * gamma + pose_k.translation() * (T::one() - gamma);
        let yaw = match target_yaw {
            Some(y) => pose_k.yaw() + gamma * wrap_angle(y - pose_k.yaw()),
            None => pose_k.yaw(),
        };
        Pose::new(t, yaw)
    }
}

impl<T: Real> Denoiser<T> for AnalyticDenoiser {
    fn denoise(
        &self,
        pose_k: &Pose<T>,
        _a_k: T,
        cond: &DenoiserCondition<T>,
        k: usize,
        schedule: &NoiseSchedule<T>,
    ) -> Result<Pose<T>> {
        let gamma = T::one() - schedule.alpha_bar(k)?;
        schedule.beta(k)?;
        Ok(Self::blend(
            pose_k,
            cond.target_translation(),
            cond.target_yaw(pose_k.yaw()),
            gamma,
        ))
    }
}
