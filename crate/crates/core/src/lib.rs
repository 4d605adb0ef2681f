//! Object-placement planning on tabletop scenes and a synthetic arrangement-data factory.
//!
//! The numeric kernels (geometry, affordance composition, diffusion planner) are generic
//! over [`Real`] (`f32` or `f64`). The scene-level pipeline works in `f64`; the aliases
//! below name the concrete types it uses.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod affordance;
pub mod config;
pub mod demos;
mod error;
pub mod eval;
pub mod geometry;
pub mod planner;
pub mod real;
pub mod rng;
pub mod scene_factory;
pub mod scene_graph;
pub mod scene_model;

pub use error::{Error, Result};
pub use real::Real;

pub type Vec3 = geometry::Vec3<f64>;
pub type Pose = geometry::Pose<f64>;
pub type PoseDelta = geometry::PoseDelta<f64>;
pub type PointCloud = geometry::PointCloud<f64>;
pub type TsdfGrid = geometry::TsdfGrid<f64>;
pub type CameraIntrinsics = geometry::CameraIntrinsics<f64>;
pub type AffordanceMap = affordance::AffordanceMap<f64>;
pub type NoiseSchedule = planner::NoiseSchedule<f64>;

pub type Vec3f = geometry::Vec3<f32>;
pub type Posef = geometry::Pose<f32>;
pub type PointCloudf = geometry::PointCloud<f32>;
pub type TsdfGridf = geometry::TsdfGrid<f32>;

/// Penetration tolerance in meters used for "collision-free" throughout.
pub const EPS_PEN: f64 = 0.005;
