use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Relation, Scene, SceneObject};
use crate::{Error, Result, Vec3};

pub const PLANS_SCHEMA_VERSION: u32 = 1;

/// One pairwise placement constraint: put the subject `direction` of the anchor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructuredPlan {
    pub anchor_id: u32,
    pub anchor_category: String,
    pub anchor_position: Vec3,
    pub direction: Relation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor_bbox_2d: Option<[f64; 4]>,
}

impl StructuredPlan {
    /// Plan against an anchor object, positioned at its reference point.
    pub fn for_anchor(anchor: &SceneObject, direction: Relation) -> Self {
        Self {
            anchor_id: anchor.id(),
            anchor_category: anchor.category().to_string(),
            anchor_position: anchor.pose().translation(),
            direction,
            anchor_bbox_2d: None,
        }
    }

    /// Resolves the anchor among the scene's non-receptacle objects.
    pub fn resolve<'a>(&self, scene: &'a Scene) -> Result<&'a SceneObject> {
        scene
            .object(self.anchor_id)
            .filter(|o| o.category() == self.anchor_category)
            .ok_or(Error::UnresolvedAnchor(self.anchor_id))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanFile {
    schema_version: u32,
    plans: Vec<StructuredPlan>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PlanDoc {
    Versioned(PlanFile),
    Bare(Vec<StructuredPlan>),
}

pub fn plans_to_json(plans: &[StructuredPlan]) -> Result<String> {
    let file = PlanFile {
        schema_version: PLANS_SCHEMA_VERSION,
        plans: plans.to_vec(),
    };
    Ok(serde_json::to_string_pretty(&file)? + "\n")
}

/// Parses `{"schema_version": 1, "plans": [...]}` or a bare plan array.
pub fn plans_from_json(text: &str) -> Result<Vec<StructuredPlan>> {
    match serde_json::from_str::<PlanDoc>(text) {
        Ok(PlanDoc::Versioned(f)) => {
            if f.schema_version != PLANS_SCHEMA_VERSION {
                return Err(Error::Schema(format!(
                    "unsupported plans schema_version {}",
                    f.schema_version
                )));
            }
            Ok(f.plans)
        }
        Ok(PlanDoc::Bare(p)) => Ok(p),
        Err(_) => {
            // Re-parse strictly for a useful message.
            let f: PlanFile = serde_json::from_str(text)?;
            Ok(f.plans)
        }
    }
}

pub fn save_plans(path: &Path, plans: &[StructuredPlan]) -> Result<()> {
    std::fs::write(path, plans_to_json(plans)?)?;
    Ok(())
}

pub fn load_plans(path: &Path) -> Result<Vec<StructuredPlan>> {
    plans_from_json(&std::fs::read_to_string(path)?)
}
