//! Bundled demonstration scenes: small hand-authored tabletop arrangements used as the
//! seed corpus for graph augmentation.

use std::path::Path;

use crate::scene_graph::{abstract_scene, SceneGraph};
use crate::scene_model::{scene_from_json, Scene};
use crate::Result;

/// `(name, scene JSON)` pairs.
pub const DEMO_SCENES: &[(&str, &str)] = &[
    (
        "breakfast",
        include_str!("../../../data/demos/breakfast.json"),
    ),
    ("desk", include_str!("../../../data/demos/desk.json")),
    ("dining", include_str!("../../../data/demos/dining.json")),
    ("office", include_str!("../../../data/demos/office.json")),
    ("pantry", include_str!("../../../data/demos/pantry.json")),
    ("study", include_str!("../../../data/demos/study.json")),
];

pub fn demo_scenes() -> Result<Vec<Scene>> {
    DEMO_SCENES
        .iter()
        .map(|(_, text)| scene_from_json(text, Path::new(".")))
        .collect()
}

/// Scene graphs of the bundled demonstrations.
pub fn demo_graphs() -> Result<Vec<SceneGraph>> {
    demo_scenes()?.iter().map(abstract_scene).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene_factory::ShapeLibrary;
    use crate::scene_model::scene_max_penetration;

    #[test]
    fn demos_load_and_abstract() {
        let lib = ShapeLibrary::default();
        let scenes = demo_scenes().unwrap();
        let graphs = demo_graphs().unwrap();
        assert_eq!(graphs.len(), DEMO_SCENES.len());
        for (s, g) in scenes.iter().zip(&graphs) {
            assert_eq!(scene_max_penetration(s), 0.0);
            assert_eq!(g.len(), s.objects().len());
            g.validate().unwrap();
            assert!(g.nodes.iter().all(|n| lib.contains(&n.category)));
        }
        // The stacked demos produce "on" edges.
        let on = graphs
            .iter()
            .flat_map(|g| &g.edges)
            .filter(|e| e.relation == crate::scene_model::Relation::On)
            .count();
        assert!(on >= 2);
    }
}
