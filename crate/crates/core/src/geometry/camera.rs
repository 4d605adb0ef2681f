use serde::{Deserialize, Serialize};

use super::{PointCloud, Vec3};
use crate::error::{Error, Result};
use crate::real::Real;

/// Pinhole intrinsics in pixels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
#[serde(deny_unknown_fields)]
pub struct CameraIntrinsics<T> {
    pub fx: T,
    pub fy: T,
    pub cx: T,
    pub cy: T,
    pub width: usize,
    pub height: usize,
}

impl<T: Real> CameraIntrinsics<T> {
    pub fn new(fx: T, fy: T, cx: T, cy: T, width: usize, height: usize) -> Result<Self> {
        let k = Self {
            fx,
            fy,
            cx,
            cy,
            width,
            height,
        };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        let w = T::lit(self.width as f64);
        let h = T::lit(self.height as f64);
        if !(self.fx > T::zero() && self.fy > T::zero()) {
            return Err(Error::InvalidArgument(
                "focal lengths must be positive".into(),
            ));
        }
        if !(self.cx > T::zero() && self.cx < w && self.cy > T::zero() && self.cy < h) {
            return Err(Error::InvalidArgument(
                "principal point outside the image".into(),
            ));
        }
        Ok(())
    }

    /// Projects a camera-frame point (z forward) to pixel coordinates `(u, v)`.
    pub fn project(&self, p: &Vec3<T>) -> Option<(T, T)> {
        if !(p.z > T::zero()) {
            return None;
        }
        Some((self.fx * p.x / p.z + self.cx, self.fy * p.y / p.z + self.cy))
    }

    /// Lifts pixel `(u, v)` at the given depth to a camera-frame point.
    pub fn unproject(&self, u: T, v: T, depth: T) -> Vec3<T> {
        Vec3::new(
            (u - self.cx) * depth / self.fx,
            (v - self.cy) * depth / self.fy,
            depth,
        )
    }
}

/// Row-major depth image in meters; zero or NaN marks an invalid pixel.
#[derive(Clone, Debug, PartialEq)]
pub struct DepthImage<T> {
    pub width: usize,
    pub height: usize,
    pub data: Vec<T>,
}

impl<T: Real> DepthImage<T> {
    pub fn new(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::InvalidArgument(format!(
                "depth buffer has {} values for {width}x{height}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: T) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn set(&mut self, u: usize, v: usize, depth: T) {
        self.data[v * self.width + u] = depth;
    }
}

/// Back-projects every valid pixel (at its pixel center coordinates `(u, v)`) through the
/// pinhole model. Invalid pixels are dropped.
pub fn backproject<T: Real>(
    depth: &DepthImage<T>,
    k: &CameraIntrinsics<T>,
) -> Result<PointCloud<T>> {
    k.validate()?;
    let mut points = Vec::new();
    for v in 0..depth.height {
        for u in 0..depth.width {
            let d = depth.data[v * depth.width + u];
            if d.is_finite() && d > T::zero() {
                points.push(k.unproject(T::lit(u as f64), T::lit(v as f64), d));
            }
        }
    }
    if points.is_empty() {
        return Err(Error::EmptyCloud);
    }
    PointCloud::new(points)
}
