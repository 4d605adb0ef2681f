use serde::{Deserialize, Serialize};

use super::{Pose, Vec3};
use crate::error::{Error, Result};
use crate::real::Real;

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb<T> {
    pub min: Vec3<T>,
    pub max: Vec3<T>,
}

impl<T: Real> Aabb<T> {
    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Vec3<T>>) -> Option<Self> {
        let mut it = points.into_iter();
        let first = *it.next()?;
        Some(it.fold(
            Self {
                min: first,
                max: first,
            },
            |b, p| Self {
                min: b.min.min(p),
                max: b.max.max(p),
            },
        ))
    }

    pub fn center(&self) -> Vec3<T> {
        (self.min + self.max) * T::half()
    }

    pub fn extent(&self) -> Vec3<T> {
        self.max - self.min
    }

    pub fn union(&self, o: &Self) -> Self {
        Self {
            min: self.min.min(&o.min),
            max: self.max.max(&o.max),
        }
    }

    pub fn expanded(&self, margin: T) -> Self {
        let m = Vec3::new(margin, margin, margin);
        Self {
            min: self.min - m,
            max: self.max + m,
        }
    }
}

/// Points in meters with an optional per-point activation channel in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct PointCloud<T> {
    points: Vec<Vec3<T>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    activations: Option<Vec<T>>,
}

impl<T: Real> PointCloud<T> {
    /// Builds a cloud, rejecting non-finite coordinates. An empty cloud is allowed here;
    /// consumers that need points report [`Error::EmptyCloud`].
    pub fn new(points: Vec<Vec3<T>>) -> Result<Self> {
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::NonFinite(format!("point {i}")));
        }
        Ok(Self {
            points,
            activations: None,
        })
    }

    pub fn with_activations(points: Vec<Vec3<T>>, activations: Vec<T>) -> Result<Self> {
        if activations.len() != points.len() {
            return Err(Error::InvalidArgument(format!(
                "{} activations for {} points",
                activations.len(),
                points.len()
            )));
        }
        if activations
            .iter()
            .any(|a| !(*a >= T::zero() && *a <= T::one()))
        {
            return Err(Error::InvalidArgument("activation outside [0, 1]".into()));
        }
        let mut c = Self::new(points)?;
        c.activations = Some(activations);
        Ok(c)
    }

    pub fn points(&self) -> &[Vec3<T>] {
        &self.points
    }

    pub fn activations(&self) -> Option<&[T]> {
        self.activations.as_deref()
    }

    pub fn into_points(self) -> Vec<Vec3<T>> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn require_non_empty(&self) -> Result<()> {
        if self.points.is_empty() {
            Err(Error::EmptyCloud)
        } else {
            Ok(())
        }
    }

    pub fn aabb(&self) -> Option<Aabb<T>> {
        Aabb::from_points(&self.points)
    }

    pub fn transformed(&self, pose: &Pose<T>) -> Self {
        Self {
            points: self
                .points
                .iter()
                .map(|p| pose.transform_point(p))
                .collect(),
            activations: self.activations.clone(),
        }
    }

    /// Every `stride`-th point such that at most `max_points` remain (keeps order).
    pub fn subsampled(&self, max_points: usize) -> Self {
        if self.points.len() <= max_points || max_points == 0 {
            return self.clone();
        }
        let n = self.points.len();
        let idx: Vec<usize> = (0..max_points).map(|i| i * n / max_points).collect();
        Self {
            points: idx.iter().map(|&i| self.points[i]).collect(),
            activations: self
                .activations
                .as_ref()
                .map(|a| idx.iter().map(|&i| a[i]).collect()),
        }
    }

    pub fn concat(clouds: &[&Self]) -> Result<Self> {
        let points: Vec<_> = clouds
            .iter()
            .flat_map(|c| c.points.iter().copied())
            .collect();
        Self::new(points)
    }
}

fn median_sorted<T: Real>(v: &[T]) -> T {
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) * T::half()
    }
}

/// Per-axis median of the cloud; for an even count the two middle values are averaged.
pub fn robust_centroid<T: Real>(cloud: &PointCloud<T>) -> Result<Vec3<T>> {
    cloud.require_non_empty()?;
    let axis = |f: fn(&Vec3<T>) -> T| {
        let mut v: Vec<T> = cloud.points().iter().map(f).collect();
        v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        median_sorted(&v)
    };
    Ok(Vec3::new(axis(|p| p.x), axis(|p| p.y), axis(|p| p.z)))
}
