use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::geometry::{Pose, Vec3};
use crate::real::{wrap_angle, Real};
use crate::rng::Rng;
use crate::{Error, Result};

/// Linear variance schedule and the per-step quantities derived from it.
/// Steps are numbered `1..=K`; `alpha_bar(0) = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseSchedule<T> {
    betas: Vec<T>,
    alphas: Vec<T>,
    alpha_bars: Vec<T>,
    posterior_variances: Vec<T>,
}

/// Schedule settings as they appear in configuration files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleConfig {
    pub steps: usize,
    pub beta_start: f64,
    pub beta_end: f64,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self {
            steps: 50,
            beta_start: 1e-4,
            beta_end: 0.02,
        }
    }
}

impl<T: Real> NoiseSchedule<T> {
    pub fn new(betas: Vec<T>) -> Result<Self> {
        if betas.is_empty() {
            return Err(Error::InvalidArgument(
                "schedule needs at least one step".into(),
            ));
        }
        for w in betas.windows(2) {
            if w[1] < w[0] {
                return Err(Error::InvalidArgument(
                    "betas must be non-decreasing".into(),
                ));
            }
        }
        if !(betas[0] > T::zero()) || !(betas[betas.len() - 1] < T::one()) {
            return Err(Error::InvalidArgument("betas must lie in (0, 1)".into()));
        }
        let alphas: Vec<T> = betas.iter().map(|b| T::one() - *b).collect();
        let mut alpha_bars = Vec::with_capacity(betas.len());
        let mut acc = T::one();
        for a in &alphas {
            acc *= *a;
            alpha_bars.push(acc);
        }
        let posterior_variances = (0..betas.len())
            .map(|i| {
                let prev = if i == 0 { T::one() } else { alpha_bars[i - 1] };
                betas[i] * (T::one() - prev) / (T::one() - alpha_bars[i])
            })
            .collect();
        Ok(Self {
            betas,
            alphas,
            alpha_bars,
            posterior_variances,
        })
    }

    pub fn linear(steps: usize, beta_start: f64, beta_end: f64) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidArgument(
                "schedule needs at least one step".into(),
            ));
        }
        let betas = (0..steps)
            .map(|i| {
                let f = if steps == 1 {
                    0.0
                } else {
                    i as f64 / (steps - 1) as f64
                };
                T::lit(beta_start + f * (beta_end - beta_start))
            })
            .collect();
        Self::new(betas)
    }

    pub fn from_config(c: &ScheduleConfig) -> Result<Self> {
        Self::linear(c.steps, c.beta_start, c.beta_end)
    }

    pub fn steps(&self) -> usize {
        self.betas.len()
    }

    fn check(&self, k: usize) -> Result<usize> {
        if k == 0 || k > self.steps() {
            return Err(Error::StepOutOfRange {
                step: k,
                max: self.steps(),
            });
        }
        Ok(k - 1)
    }

    pub fn beta(&self, k: usize) -> Result<T> {
        Ok(self.betas[self.check(k)?])
    }

    pub fn alpha(&self, k: usize) -> Result<T> {
        Ok(self.alphas[self.check(k)?])
    }

    /// Cumulative product of alphas through step `k`; 1 at `k = 0`.
    pub fn alpha_bar(&self, k: usize) -> Result<T> {
        if k == 0 {
            return Ok(T::one());
        }
        Ok(self.alpha_bars[self.check(k)?])
    }

    /// Variance of `x^{k-1}` given `x^k` and `x^0`; zero at `k = 1`.
    pub fn posterior_variance(&self, k: usize) -> Result<T> {
        Ok(self.posterior_variances[self.check(k)?])
    }

    /// Coefficients `(c0, ck)` of the posterior mean `c0 x^0 + ck x^k`.
    pub fn posterior_mean_coefs(&self, k: usize) -> Result<(T, T)> {
        let i = self.check(k)?;
        let prev = self.alpha_bar(k - 1)?;
        let denom = T::one() - self.alpha_bars[i];
        Ok((
            prev.sqrt() * self.betas[i] / denom,
            self.alphas[i].sqrt() * (T::one() - prev) / denom,
        ))
    }
}

/// Scales mapping pose units to the unit-variance diffusion space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiffusionScales {
    /// Translation noise scale, meters.
    pub translation: f64,
    /// Yaw noise scale, radians.
    pub yaw: f64,
}

impl Default for DiffusionScales {
    fn default() -> Self {
        Self {
            translation: 0.15,
            yaw: std::f64::consts::FRAC_PI_2,
        }
    }
}

pub(crate) fn normal<T: Real>(rng: &mut Rng) -> T {
    T::lit(rng.sample::<f64, _>(StandardNormal))
}

pub(crate) fn normal3<T: Real>(rng: &mut Rng) -> Vec3<T> {
    Vec3::new(normal(rng), normal(rng), normal(rng))
}

/// Closed-form forward marginal `q(x^k | x^0)` around `origin`: translation
/// `sqrt(ab) x0 + sqrt(1 - ab) eps`, `eps ~ N(0, s^2 I)`, yaw likewise and wrapped.
pub fn forward_noise<T: Real>(
    pose0: &Pose<T>,
    k: usize,
    schedule: &NoiseSchedule<T>,
    scales: &DiffusionScales,
    origin: &Vec3<T>,
    rng: &mut Rng,
) -> Result<Pose<T>> {
    let ab = schedule.alpha_bar(k)?;
    schedule.check(k)?;
    let (a, b) = (ab.sqrt(), (T::one() - ab).sqrt());
    let s = T::lit(scales.translation);
    let t0 = pose0.translation() - *origin;
    let t = t0 * a + normal3::<T>(rng) * (b * s) + *origin;
    let yaw = pose0.yaw() * a + normal::<T>(rng) * (b * T::lit(scales.yaw));
    Ok(Pose::new(t, wrap_angle(yaw)))
}
