//! Diffusion placement planner over the 4-DOF pose: noise schedule, pluggable denoiser,
//! cost guidance and best-of-N candidate selection.

mod cost;
mod denoiser;
mod guidance;
mod plan;
mod schedule;

pub use cost::{cost_afford, cost_afford_cloud, cost_collide};
pub use denoiser::{spatial_feature, AnalyticDenoiser, Denoiser, DenoiserCondition};
pub use guidance::{
    guided_cost, guided_reverse_step, CostContext, CostTerms, GuidanceConfig, StepDiagnostics,
};
pub use plan::{
    plan_placement, plan_placement_with, Candidate, ChainDiagnostics, PlanResult, PlannerConfig,
    PLAN_RESULT_SCHEMA_VERSION,
};
pub use schedule::{forward_noise, DiffusionScales, NoiseSchedule, ScheduleConfig};
