//! Truncated signed distance grid over detected-object geometry.
//!
//! Node values are the distance from the node to the nearest input point, clamped to
//! `truncation`, and negated for nodes inside an object's occupancy. Occupancy of one
//! object is the prism over its horizontal footprint (2D convex hull of its points)
//! between its lowest and highest point.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Aabb, ConvexPolygon, PointCloud, Vec3};
use crate::error::{Error, Result};
use crate::real::Real;

pub const TSDF_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TsdfParams {
    pub voxel_size: f64,
    pub truncation: f64,
    pub padding: f64,
}

impl Default for TsdfParams {
    fn default() -> Self {
        Self {
            voxel_size: 0.01,
            truncation: 0.05,
            padding: 0.10,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TsdfGrid<T> {
    origin: Vec3<T>,
    voxel_size: T,
    dims: [usize; 3],
    truncation: T,
    /// Row-major with x slowest: `index = (i * ny + j) * nz + k`.
    values: Vec<T>,
}

struct Occupancy<T> {
    footprint: ConvexPolygon<T>,
    zmin: T,
    zmax: T,
    bounds: Aabb<T>,
}

impl<T: Real> TsdfGrid<T> {
    /// Builds the grid over the union of `object_clouds`, padded by `max(padding, truncation)`.
    pub fn build(object_clouds: &[PointCloud<T>], params: &TsdfParams) -> Result<Self> {
        Self::build_with_surfaces(object_clouds, object_clouds, params)
    }

    /// Like [`TsdfGrid::build`], but distances are measured to `surfaces[i]` while the
    /// occupancy of object `i` still comes from `object_clouds[i]`. Lets a caller leave out
    /// faces that are not free surface, such as the face an object rests on.
    pub fn build_with_surfaces(
        object_clouds: &[PointCloud<T>],
        surfaces: &[PointCloud<T>],
        params: &TsdfParams,
    ) -> Result<Self> {
        if surfaces.len() != object_clouds.len() {
            return Err(Error::InvalidArgument(
                "one surface cloud per object is required".into(),
            ));
        }
        let voxel = T::lit(params.voxel_size);
        let trunc = T::lit(params.truncation);
        if !(params.voxel_size > 0.0) {
            return Err(Error::InvalidArgument("voxel_size must be positive".into()));
        }
        if !(params.truncation >= 2.0 * params.voxel_size) {
            return Err(Error::InvalidArgument(
                "truncation must be at least two voxels".into(),
            ));
        }
        let clouds: Vec<&PointCloud<T>> = object_clouds.iter().filter(|c| !c.is_empty()).collect();
        let bounds = clouds
            .iter()
            .filter_map(|c| c.aabb())
            .reduce(|a, b| a.union(&b))
            .ok_or(Error::EmptyCloud)?;
        if !(bounds.min.is_finite() && bounds.max.is_finite()) {
            return Err(Error::NonFinite("tsdf input".into()));
        }
        let bounds = bounds.expanded(T::lit(params.padding.max(params.truncation)));
        let ext = bounds.extent();
        let count = |e: T| (e / voxel).ceil().to_usize().expect("finite extent") + 1;
        let dims = [count(ext.x), count(ext.y), count(ext.z)];
        let mut grid = Self {
            origin: bounds.min,
            voxel_size: voxel,
            dims,
            truncation: trunc,
            values: vec![trunc; dims[0] * dims[1] * dims[2]],
        };
        for p in surfaces.iter().flat_map(|c| c.points()) {
            grid.splat(p);
        }
        for cloud in &clouds {
            let occ = Occupancy {
                footprint: ConvexPolygon::from_points3(cloud.points()),
                zmin: cloud
                    .points()
                    .iter()
                    .map(|p| p.z)
                    .fold(T::infinity(), T::min),
                zmax: cloud
                    .points()
                    .iter()
                    .map(|p| p.z)
                    .fold(T::neg_infinity(), T::max),
                bounds: cloud.aabb().expect("non-empty"),
            };
            grid.carve(&occ);
        }
        Ok(grid)
    }

    fn index_range(&self, lo: T, hi: T, axis: usize) -> Option<(usize, usize)> {
        let o = self.origin[axis];
        let a = ((lo - o) / self.voxel_size).ceil().max(T::zero());
        let b = ((hi - o) / self.voxel_size)
            .floor()
            .min(T::lit((self.dims[axis] - 1) as f64));
        if a > b {
            return None;
        }
        Some((a.to_usize()?, b.to_usize()?))
    }

    fn splat(&mut self, p: &Vec3<T>) {
        let t = self.truncation;
        let (Some(rx), Some(ry), Some(rz)) = (
            self.index_range(p.x - t, p.x + t, 0),
            self.index_range(p.y - t, p.y + t, 1),
            self.index_range(p.z - t, p.z + t, 2),
        ) else {
            return;
        };
        let t2 = t * t;
        for i in rx.0..=rx.1 {
            let dx = self.origin.x + T::lit(i as f64) * self.voxel_size - p.x;
            for j in ry.0..=ry.1 {
                let dy = self.origin.y + T::lit(j as f64) * self.voxel_size - p.y;
                let dxy = dx * dx + dy * dy;
                if dxy > t2 {
                    continue;
                }
                for k in rz.0..=rz.1 {
                    let dz = self.origin.z + T::lit(k as f64) * self.voxel_size - p.z;
                    let d2 = dxy + dz * dz;
                    if d2 < t2 {
                        let idx = self.flat(i, j, k);
                        let d = d2.sqrt();
                        if d < self.values[idx] {
                            self.values[idx] = d;
                        }
                    }
                }
            }
        }
    }

    fn carve(&mut self, occ: &Occupancy<T>) {
        let b = &occ.bounds;
        let (Some(rx), Some(ry), Some(rz)) = (
            self.index_range(b.min.x, b.max.x, 0),
            self.index_range(b.min.y, b.max.y, 1),
            self.index_range(occ.zmin, occ.zmax, 2),
        ) else {
            return;
        };
        for i in rx.0..=rx.1 {
            for j in ry.0..=ry.1 {
                let n = self.node_position(i, j, 0);
                if !occ.footprint.contains([n.x, n.y], T::zero()) {
                    continue;
                }
                for k in rz.0..=rz.1 {
                    let idx = self.flat(i, j, k);
                    self.values[idx] = -self.values[idx].abs();
                }
            }
        }
    }

    #[inline]
    fn flat(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    pub fn origin(&self) -> Vec3<T> {
        self.origin
    }

    pub fn voxel_size(&self) -> T {
        self.voxel_size
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn truncation(&self) -> T {
        self.truncation
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn node_position(&self, i: usize, j: usize, k: usize) -> Vec3<T> {
        Vec3::new(
            self.origin.x + T::lit(i as f64) * self.voxel_size,
            self.origin.y + T::lit(j as f64) * self.voxel_size,
            self.origin.z + T::lit(k as f64) * self.voxel_size,
        )
    }

    pub fn node_value(&self, i: usize, j: usize, k: usize) -> T {
        self.values[self.flat(i, j, k)]
    }

    /// Trilinear value and its exact gradient. Outside the grid: `(+truncation, 0)`.
    pub fn query(&self, p: &Vec3<T>) -> (T, Vec3<T>) {
        let mut cell = [0usize; 3];
        let mut frac = [T::zero(); 3];
        for a in 0..3 {
            let u = (p[a] - self.origin[a]) / self.voxel_size;
            let last = T::lit((self.dims[a] - 1) as f64);
            if !(u >= T::zero() && u <= last) {
                return (self.truncation, Vec3::zeros());
            }
            let i0 = u.floor().min(last - T::one());
            cell[a] = i0.to_usize().expect("in range");
            frac[a] = u - i0;
        }
        let [i, j, k] = cell;
        let [fx, fy, fz] = frac;
        let c = |di, dj, dk| self.values[self.flat(i + di, j + dj, k + dk)];
        let one = T::one();
        // Interpolate along z, then y, then x, keeping the partial derivatives.
        let c00 = c(0, 0, 0) * (one - fz) + c(0, 0, 1) * fz;
        let c01 = c(0, 1, 0) * (one - fz) + c(0, 1, 1) * fz;
        let c10 = c(1, 0, 0) * (one - fz) + c(1, 0, 1) * fz;
        let c11 = c(1, 1, 0) * (one - fz) + c(1, 1, 1) * fz;
        let dz00 = c(0, 0, 1) - c(0, 0, 0);
        let dz01 = c(0, 1, 1) - c(0, 1, 0);
        let dz10 = c(1, 0, 1) - c(1, 0, 0);
        let dz11 = c(1, 1, 1) - c(1, 1, 0);
        let c0 = c00 * (one - fy) + c01 * fy;
        let c1 = c10 * (one - fy) + c11 * fy;
        let value = c0 * (one - fx) + c1 * fx;
        let gx = c1 - c0;
        let gy = (c01 - c00) * (one - fx) + (c11 - c10) * fx;
        let gz =
            (dz00 * (one - fy) + dz01 * fy) * (one - fx) + (dz10 * (one - fy) + dz11 * fy) * fx;
        (value, Vec3::new(gx, gy, gz) / self.voxel_size)
    }

    pub fn value(&self, p: &Vec3<T>) -> T {
        self.query(p).0
    }

    /// Writes `<stem>.json` (header) and `<stem>.bin` (little-endian float32 payload).
    pub fn export(&self, header_path: &Path, payload_path: &Path) -> Result<()> {
        let header = TsdfHeader {
            schema_version: TSDF_SCHEMA_VERSION,
            origin: [
                self.origin.x.as_f64(),
                self.origin.y.as_f64(),
                self.origin.z.as_f64(),
            ],
            dims: self.dims,
            voxel_size: self.voxel_size.as_f64(),
            truncation: self.truncation.as_f64(),
            layout: "row-major x,y,z (z fastest)".into(),
            dtype: "float32-le".into(),
            payload: payload_path
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
        };
        std::fs::write(header_path, serde_json::to_string_pretty(&header)? + "\n")?;
        let mut f = std::io::BufWriter::new(std::fs::File::create(payload_path)?);
        for v in &self.values {
            f.write_all(&(v.as_f64() as f32).to_le_bytes())?;
        }
        f.flush()?;
        Ok(())
    }

    /// Loads a grid written by [`TsdfGrid::export`]; values pass through float32.
    pub fn import(header_path: &Path, payload_path: &Path) -> Result<Self> {
        let header: TsdfHeader = serde_json::from_str(&std::fs::read_to_string(header_path)?)?;
        if header.schema_version != TSDF_SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "unsupported tsdf schema {}",
                header.schema_version
            )));
        }
        let bytes = std::fs::read(payload_path)?;
        let n = header.dims.iter().product::<usize>();
        if bytes.len() != n * 4 {
            return Err(Error::Parse(format!(
                "tsdf payload has {} bytes, expected {}",
                bytes.len(),
                n * 4
            )));
        }
        let values = bytes
            .chunks_exact(4)
            .map(|c| T::lit(f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64))
            .collect();
        Ok(Self {
            origin: Vec3::from_f64(header.origin[0], header.origin[1], header.origin[2]),
            voxel_size: T::lit(header.voxel_size),
            dims: header.dims,
            truncation: T::lit(header.truncation),
            values,
        })
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TsdfHeader {
    pub schema_version: u32,
    pub origin: [f64; 3],
    pub dims: [usize; 3],
    pub voxel_size: f64,
    pub truncation: f64,
    pub layout: String,
    pub dtype: String,
    pub payload: String,
}
