use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::scene_model::{classify_displacement, Relation, STACK_TOL};
use crate::{Error, Result, Vec3};

pub const GRAPH_SCHEMA_VERSION: u32 = 1;

/// An object abstracted to its category and centroid. `extent` is the world-frame
/// AABB extent when known; it decides "on" relations and sizes instantiated shapes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphNode {
    pub id: u32,
    pub category: String,
    pub centroid: Vec3,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extent: Option<Vec3>,
}

impl GraphNode {
    pub fn new(id: u32, category: impl Into<String>, centroid: Vec3) -> Self {
        Self {
            id,
            category: category.into(),
            centroid,
            extent: None,
        }
    }

    pub fn with_extent(mut self, extent: Vec3) -> Self {
        self.extent = Some(extent);
        self
    }
}

/// Directed tree edge `parent -> child`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Edge {
    pub parent: u32,
    pub child: u32,
    pub relation: Relation,
    /// `child.centroid - parent.centroid`.
    pub offset: Vec3,
}

/// Relation of `child` with respect to `parent` from node data alone.
///
/// "On" when the child's center lies over the parent's extent rectangle and its base is
/// no lower than the parent's top minus the stacking tolerance. Horizontally coincident
/// nodes that do not qualify are also labeled "on" (the only relation that does not
/// need a horizontal direction).
pub fn node_relation(parent: &GraphNode, child: &GraphNode, viewer_yaw: f64) -> Relation {
    let d = child.centroid - parent.centroid;
    if let (Some(pe), Some(ce)) = (parent.extent, child.extent) {
        let over = d.x.abs() <= pe.x / 2.0 + 1e-9 && d.y.abs() <= pe.y / 2.0 + 1e-9;
        let base = child.centroid.z - ce.z / 2.0;
        let top = parent.centroid.z + pe.z / 2.0;
        if over && base >= top - STACK_TOL {
            return Relation::On;
        }
    }
    classify_displacement([d.x, d.y], viewer_yaw).unwrap_or(Relation::On)
}

/// Rooted tree over object nodes with relation-labeled edges.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneGraph {
    pub root: u32,
    #[serde(default)]
    pub viewer_yaw: f64,
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<Edge>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    schema_version: u32,
    root: u32,
    viewer_yaw: f64,
    nodes: Vec<GraphNode>,
    edges: Vec<Edge>,
}

impl SceneGraph {
    /// A single-node graph.
    pub fn singleton(node: GraphNode, viewer_yaw: f64) -> Self {
        Self {
            root: node.id,
            viewer_yaw,
            nodes: vec![node],
            edges: Vec::new(),
        }
    }

    pub fn node(&self, id: u32) -> Option<&GraphNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn max_id(&self) -> u32 {
        self.nodes.iter().map(|n| n.id).max().unwrap_or(0)
    }

    pub fn children(&self, id: u32) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.parent == id)
    }

    pub fn parent_edge(&self, id: u32) -> Option<&Edge> {
        self.edges.iter().find(|e| e.child == id)
    }

    pub fn find_edge(&self, parent: u32, child: u32) -> Option<&Edge> {
        self.edges
            .iter()
            .find(|e| e.parent == parent && e.child == child)
    }

    /// Node ids of the subtree rooted at `id`, breadth first, children in edge order.
    pub fn subtree(&self, id: u32) -> Vec<u32> {
        let mut out = vec![id];
        let mut queue = VecDeque::from([id]);
        while let Some(n) = queue.pop_front() {
            for e in self.children(n) {
                out.push(e.child);
                queue.push_back(e.child);
            }
        }
        out
    }

    /// Node ids in breadth-first order from the root.
    pub fn bfs(&self) -> Vec<u32> {
        if self.is_empty() {
            return Vec::new();
        }
        self.subtree(self.root)
    }

    /// Non-root nodes without children.
    pub fn leaves(&self) -> Vec<u32> {
        let parents: BTreeSet<u32> = self.edges.iter().map(|e| e.parent).collect();
        self.nodes
            .iter()
            .map(|n| n.id)
            .filter(|id| !parents.contains(id) && *id != self.root)
            .collect()
    }

    /// Recomputes every edge's relation and offset from the current node positions.
    pub fn refresh_edges(&mut self) {
        let by_id: BTreeMap<u32, GraphNode> =
            self.nodes.iter().map(|n| (n.id, n.clone())).collect();
        for e in &mut self.edges {
            let (p, c) = (&by_id[&e.parent], &by_id[&e.child]);
            e.offset = c.centroid - p.centroid;
            e.relation = node_relation(p, c, self.viewer_yaw);
        }
    }

    /// Checks the tree invariants and edge labels.
    pub fn validate(&self) -> Result<()> {
        let mut ids = BTreeSet::new();
        for n in &self.nodes {
            if !ids.insert(n.id) {
                return Err(Error::DuplicateId(n.id));
            }
            if !n.centroid.is_finite() {
                return Err(Error::NonFinite(format!("centroid of node {}", n.id)));
            }
        }
        if self.nodes.is_empty() {
            return if self.edges.is_empty() {
                Ok(())
            } else {
                Err(Error::InvalidGraph("edges without nodes".into()))
            };
        }
        if !ids.contains(&self.root) {
            return Err(Error::InvalidGraph(format!(
                "root {} is not a node",
                self.root
            )));
        }
        if self.edges.len() != self.nodes.len() - 1 {
            return Err(Error::InvalidGraph(format!(
                "{} nodes but {} edges",
                self.nodes.len(),
                self.edges.len()
            )));
        }
        let mut has_parent = BTreeSet::new();
        for e in &self.edges {
            if !ids.contains(&e.parent) || !ids.contains(&e.child) {
                return Err(Error::InvalidGraph(format!(
                    "edge {}->{} references a missing node",
                    e.parent, e.child
                )));
            }
            if e.child == self.root || !has_parent.insert(e.child) {
                return Err(Error::InvalidGraph(format!(
                    "node {} has more than one parent",
                    e.child
                )));
            }
        }
        if self.bfs().len() != self.nodes.len() {
            return Err(Error::InvalidGraph(
                "graph is not connected from the root".into(),
            ));
        }
        for e in &self.edges {
            let (p, c) = (self.node(e.parent).unwrap(), self.node(e.child).unwrap());
            let off = c.centroid - p.centroid;
            if (off - e.offset).norm() > 1e-9 {
                return Err(Error::InvalidGraph(format!(
                    "edge {}->{} offset is stale",
                    e.parent, e.child
                )));
            }
            let rel = node_relation(p, c, self.viewer_yaw);
            if rel != e.relation {
                return Err(Error::InvalidGraph(format!(
                    "edge {}->{} labeled {} but geometry says {}",
                    e.parent, e.child, e.relation, rel
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let file = GraphFile {
            schema_version: GRAPH_SCHEMA_VERSION,
            root: self.root,
            viewer_yaw: self.viewer_yaw,
            nodes: self.nodes.clone(),
            edges: self.edges.clone(),
        };
        Ok(serde_json::to_string_pretty(&file)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text)?;
        if file.schema_version != GRAPH_SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "unsupported graph schema_version {}",
                file.schema_version
            )));
        }
        let g = SceneGraph {
            root: file.root,
            viewer_yaw: file.viewer_yaw,
            nodes: file.nodes,
            edges: file.edges,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
