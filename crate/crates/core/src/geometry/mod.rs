//! Core numerical types: vectors, poses, point clouds, camera back-projection,
//! nearest-neighbor search and the truncated signed distance grid.

mod camera;
mod cloud;
mod footprint;
mod kdtree;
pub mod ply;
mod pose;
pub mod surface;
mod tsdf;
mod vector;

pub use camera::{backproject, CameraIntrinsics, DepthImage};
pub use cloud::{robust_centroid, Aabb, PointCloud};
pub use footprint::ConvexPolygon;
pub use kdtree::{nn_distance, KdTree};
pub use pose::{rotate_z, Pose, PoseDelta, UnitQuaternion};
pub use tsdf::{TsdfGrid, TsdfHeader, TsdfParams, TSDF_SCHEMA_VERSION};
pub use vector::Vec3;
