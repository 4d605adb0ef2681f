use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{eval_pa, eval_pp};
use crate::planner::{plan_placement, PlannerConfig};
use crate::rng::derive_seed;
use crate::scene_factory::LabeledSample;
use crate::{Error, Pose, Result, Vec3};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Anything that proposes a pose for the dropped object of a sample.
pub trait Placer: Sync {
    fn name(&self) -> String;
    fn place(&self, sample: &LabeledSample, seed: u64) -> Result<Pose>;
}

/// Top-ranked candidate of the diffusion planner.
#[derive(Clone, Debug)]
pub struct DiffusionPlacer {
    pub config: PlannerConfig,
    pub n_candidates: usize,
}

impl Placer for DiffusionPlacer {
    fn name(&self) -> String {
        "diffusion".into()
    }

    fn place(&self, sample: &LabeledSample, seed: u64) -> Result<Pose> {
        let r = plan_placement(
            &sample.scene,
            &sample.plans,
            sample.dropped_object.points(),
            self.n_candidates,
            &self.config,
            seed,
        )?;
        Ok(r.best().expect("at least one candidate").pose())
    }
}

/// Returns the ground-truth pose.
#[derive(Clone, Copy, Debug, Default)]
pub struct OraclePlacer;

impl Placer for OraclePlacer {
    fn name(&self) -> String {
        "oracle".into()
    }

    fn place(&self, sample: &LabeledSample, _seed: u64) -> Result<Pose> {
        Ok(sample.gt_pose)
    }
}

/// Puts the object in the receptacle corner farthest from every scene object, just
/// inside the edges. Ignores the plans.
#[derive(Clone, Copy, Debug, Default)]
pub struct FixedCornerPlacer;

impl Placer for FixedCornerPlacer {
    fn name(&self) -> String {
        "fixed_corner".into()
    }

    fn place(&self, sample: &LabeledSample, _seed: u64) -> Result<Pose> {
        let r = sample.scene.receptacle();
        let c = r.pose().translation();
        let re = r.extent();
        // Placed at zero yaw, so the object-frame box is the footprint.
        let oe = sample
            .dropped_object
            .points()
            .aabb()
            .ok_or(Error::EmptyCloud)?
            .extent();
        let half = [
            ((re.x - oe.x) / 2.0).max(0.0),
            ((re.y - oe.y) / 2.0).max(0.0),
        ];
        let clearance = |q: [f64; 2]| {
            sample
                .scene
                .objects()
                .iter()
                .map(|o| o.footprint().signed_distance(q))
                .fold(f64::INFINITY, f64::min)
        };
        let corners = [[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]]
            .map(|s| [c.x + s[0] * half[0], c.y + s[1] * half[1]]);
        let best = corners
            .into_iter()
            .max_by(|a, b| clearance(*a).total_cmp(&clearance(*b)))
            .expect("four corners");
        let z = sample.scene.support_height() + oe.z / 2.0;
        Ok(Pose::from_translation(Vec3::new(best[0], best[1], z)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseResult {
    pub index: usize,
    pub seed: u64,
    pub pa: bool,
    pub pp: bool,
    pub sr: bool,
    /// Largest penetration against scene objects, meters; `None` when placement failed.
    pub penetration: Option<f64>,
    pub pose: Option<Pose>,
    pub error: Option<String>,
}

/// Per-case outcomes and percentages.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalResult {
    pub schema_version: u32,
    pub placer: String,
    pub seed: u64,
    pub cases: Vec<CaseResult>,
    pub pa: f64,
    pub pp: f64,
    pub sr: f64,
}

fn percent(cases: &[CaseResult], f: impl Fn(&CaseResult) -> bool) -> f64 {
    100.0 * cases.iter().filter(|c| f(c)).count() as f64 / cases.len() as f64
}

fn eval_case(placer: &dyn Placer, sample: &LabeledSample, index: usize, seed: u64) -> CaseResult {
    let failed = |e: Error| CaseResult {
        index,
        seed,
        pa: false,
        pp: false,
        sr: false,
        penetration: None,
        pose: None,
        error: Some(format!("{}: {e}", e.kind())),
    };
    let pose = match placer.place(sample, seed) {
        Ok(p) => p,
        Err(e) => return failed(e),
    };
    let obj = sample.dropped_object.points();
    let pa = eval_pa(&pose, sample, &sample.dropped_object.extent());
    match eval_pp(&pose, sample, obj) {
        Ok((pp, pen)) => CaseResult {
            index,
            seed,
            pa,
            pp,
            sr: pa && pp,
            penetration: Some(pen),
            pose: Some(pose),
            error: None,
        },
        Err(e) => failed(e),
    }
}

/// Places every sample with `placer` (case `i` gets seed `derive_seed(seed, i)`) and
/// aggregates PA, PP and SR as percentages. A placement error fails the case on all three.
pub fn run_eval(placer: &dyn Placer, benchmark: &[LabeledSample], seed: u64) -> Result<EvalResult> {
    if benchmark.is_empty() {
        return Err(Error::InvalidArgument("benchmark is empty".into()));
    }
    let cases: Vec<CaseResult> = benchmark
        .par_iter()
        .enumerate()
        .map(|(i, s)| eval_case(placer, s, i, derive_seed(seed, i as u64)))
        .collect();
    Ok(EvalResult {
        schema_version: REPORT_SCHEMA_VERSION,
        placer: placer.name(),
        seed,
        pa: percent(&cases, |c| c.pa),
        pp: percent(&cases, |c| c.pp),
        sr: percent(&cases, |c| c.sr),
        cases,
    })
}

impl EvalResult {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: Self = serde_json::from_str(text)?;
        if r.schema_version != REPORT_SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "unsupported report schema_version {}",
                r.schema_version
            )));
        }
        Ok(r)
    }

    /// One row per case; the header line carries the schema version.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# schema_version={} placer={} seed={}\n",
            self.schema_version, self.placer, self.seed
        );
        out.push_str("index,seed,pa,pp,sr,penetration,x,y,z,yaw,error\n");
        for c in &self.cases {
            let pen = c.penetration.map(|p| format!("{p:.6}")).unwrap_or_default();
            let pose = c
                .pose
                .map(|p| {
                    let t = p.translation();
                    format!("{:.6},{:.6},{:.6},{:.6}", t.x, t.y, t.z, p.yaw())
                })
                .unwrap_or_else(|| ",,,".into());
            let err = c.error.as_deref().unwrap_or("").replace(['"', ','], ";");
            let _ = writeln!(
                out,
                "{},{},{},{},{},{pen},{pose},{err}",
                c.index, c.seed, c.pa, c.pp, c.sr
            );
        }
        out
    }

    /// Writes the JSON report to `json_path` and the CSV next to it.
    pub fn save(&self, json_path: &Path) -> Result<()> {
        std::fs::write(json_path, self.to_json()?)?;
        std::fs::write(json_path.with_extension("csv"), self.to_csv())?;
        Ok(())
    }
}
