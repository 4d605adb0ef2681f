//! One JSON document holding the global seed, input paths and every module's defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::planner::PlannerConfig;
use crate::scene_factory::GenerateParams;
use crate::scene_graph::AugmentParams;
use crate::{Error, Result};

pub const RUN_CONFIG_SCHEMA_VERSION: u32 = 1;

/// Optional input overrides; bundled data is used when absent.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub demos: Option<PathBuf>,
    pub library: Option<PathBuf>,
    pub similarity: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub paths: Paths,
    #[serde(default)]
    pub augment: AugmentParams,
    #[serde(default)]
    pub generate: GenerateParams,
    #[serde(default)]
    pub planner: PlannerConfig,
    /// Candidates per planning query.
    #[serde(default = "default_candidates")]
    pub n_candidates: usize,
}

fn default_candidates() -> usize {
    8
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema_version: RUN_CONFIG_SCHEMA_VERSION,
            seed: 0,
            paths: Paths::default(),
            augment: AugmentParams::default(),
            generate: GenerateParams::default(),
            planner: PlannerConfig::default(),
            n_candidates: default_candidates(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text)?;
        if c.schema_version != RUN_CONFIG_SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "unsupported config schema_version {}",
                c.schema_version
            )));
        }
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn validate(&self) -> Result<()> {
        self.planner.guidance.validate()?;
        let a = &self.augment;
        if !(0.0..=1.0).contains(&a.p_c) || !(0.0..=1.0).contains(&a.p_m) {
            return Err(Error::InvalidArgument(
                "augmentation probabilities must lie in [0, 1]".into(),
            ));
        }
        if !(a.tau_p > 0.0 && a.tau_p < 1.0) {
            return Err(Error::InvalidArgument("tau_p must lie in (0, 1)".into()));
        }
        if self.n_candidates == 0 {
            return Err(Error::InvalidArgument(
                "n_candidates must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_defaults() {
        let c = RunConfig::default();
        assert_eq!(RunConfig::from_json(&c.to_json().unwrap()).unwrap(), c);
        let minimal = RunConfig::from_json(r#"{"schema_version": 1, "seed": 4}"#).unwrap();
        assert_eq!(minimal.seed, 4);
        assert_eq!(minimal.planner.guidance.lambda_a, 500.0);
        assert_eq!(minimal.planner.guidance.lambda_c, 1000.0);
    }

    #[test]
    fn strict_parsing() {
        assert!(RunConfig::from_json(r#"{"seed": 4}"#).is_err());
        assert!(RunConfig::from_json(r#"{"schema_version": 1, "sede": 4}"#).is_err());
        assert!(RunConfig::from_json(
            r#"{"schema_version": 1, "planner": {"guidance": {"lambda": 1}}}"#
        )
        .is_err());
        assert!(RunConfig::from_json(r#"{"schema_version": 2}"#).is_err());
        assert!(RunConfig::from_json(
            r#"{"schema_version": 1, "planner": {"guidance": {"lambda_a": -1}}}"#
        )
        .is_err());
    }
}
