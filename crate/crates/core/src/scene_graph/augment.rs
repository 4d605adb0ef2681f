use std::collections::BTreeMap;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{Edge, GraphNode, SceneGraph, SimilarityTable};
use crate::rng::{child_rng, rng_from_seed, Rng};
use crate::{Error, Result};

/// Probabilities and threshold of the genetic operators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentParams {
    pub p_c: f64,
    pub p_m: f64,
    pub tau_p: f64,
}

impl Default for AugmentParams {
    fn default() -> Self {
        Self {
            p_c: 0.5,
            p_m: 0.3,
            tau_p: 0.9,
        }
    }
}

/// An edge named by its endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeRef {
    pub parent: u32,
    pub child: u32,
}

impl From<&Edge> for EdgeRef {
    fn from(e: &Edge) -> Self {
        Self {
            parent: e.parent,
            child: e.child,
        }
    }
}

/// Chooses the pair of edges to cross over.
pub trait CrossoverPolicy {
    fn select(&self, g1: &SceneGraph, g2: &SceneGraph, rng: &mut Rng)
        -> Option<(EdgeRef, EdgeRef)>;
}

/// Uniform choice among all edge pairs whose endpoint categories match.
#[derive(Clone, Copy, Debug, Default)]
pub struct UniformMatchingPairs;

fn categories_match(g1: &SceneGraph, e1: &EdgeRef, g2: &SceneGraph, e2: &EdgeRef) -> Option<bool> {
    let cat = |g: &SceneGraph, id: u32| g.node(id).map(|n| n.category.clone());
    Some(cat(g1, e1.parent)? == cat(g2, e2.parent)? && cat(g1, e1.child)? == cat(g2, e2.child)?)
}

impl CrossoverPolicy for UniformMatchingPairs {
    fn select(
        &self,
        g1: &SceneGraph,
        g2: &SceneGraph,
        rng: &mut Rng,
    ) -> Option<(EdgeRef, EdgeRef)> {
        let pairs: Vec<(EdgeRef, EdgeRef)> = g1
            .edges
            .iter()
            .flat_map(|a| {
                g2.edges
                    .iter()
                    .map(move |b| (EdgeRef::from(a), EdgeRef::from(b)))
            })
            .filter(|(a, b)| categories_match(g1, a, g2, b) == Some(true))
            .collect();
        if pairs.is_empty() {
            return None;
        }
        Some(pairs[rng.random_range(0..pairs.len())])
    }
}

/// Replaces the subtree under `at.child` in `host` with `donor_subtree` (nodes of
/// `donor` in BFS order), placing the donor subtree root where `at.child` was.
fn graft(host: &SceneGraph, at: EdgeRef, donor: &SceneGraph, donor_subtree: &[u32]) -> SceneGraph {
    let removed = host.subtree(at.child);
    let anchor = host.node(at.child).expect("edge child").centroid;
    let mut nodes: Vec<GraphNode> = host
        .nodes
        .iter()
        .filter(|n| !removed.contains(&n.id))
        .cloned()
        .collect();
    let mut edges: Vec<Edge> = host
        .edges
        .iter()
        .filter(|e| !removed.contains(&e.child))
        .cloned()
        .collect();
    let next = nodes.iter().map(|n| n.id).max().unwrap_or(0) + 1;
    let ids: BTreeMap<u32, u32> = donor_subtree
        .iter()
        .enumerate()
        .map(|(i, &id)| (id, next + i as u32))
        .collect();
    let donor_root = donor.node(donor_subtree[0]).expect("donor root").centroid;
    for &old in donor_subtree {
        let n = donor.node(old).expect("donor node");
        nodes.push(GraphNode {
            id: ids[&old],
            centroid: anchor + (n.centroid - donor_root),
            ..n.clone()
        });
    }
    let placeholder = |p: u32, c: u32| Edge {
        parent: p,
        child: c,
        relation: crate::scene_model::Relation::On,
        offset: crate::Vec3::zeros(),
    };
    edges.push(placeholder(at.parent, ids[&donor_subtree[0]]));
    for &old in donor_subtree {
        for e in donor.children(old) {
            edges.push(placeholder(ids[&old], ids[&e.child]));
        }
    }
    let mut g = SceneGraph {
        root: host.root,
        viewer_yaw: host.viewer_yaw,
        nodes,
        edges,
    };
    g.refresh_edges();
    g
}

/// Exchanges the child-side subtrees of `e1` in `g1` and `e2` in `g2` with probability
/// `p_c`. Incoming nodes get fresh ids above the receiving graph's remaining ids.
pub fn crossover(
    g1: &SceneGraph,
    g2: &SceneGraph,
    e1: EdgeRef,
    e2: EdgeRef,
    p_c: f64,
    rng_seed: u64,
) -> Result<(SceneGraph, SceneGraph)> {
    if g1.find_edge(e1.parent, e1.child).is_none() {
        return Err(Error::InvalidArgument(format!(
            "edge {}->{} not in first graph",
            e1.parent, e1.child
        )));
    }
    if g2.find_edge(e2.parent, e2.child).is_none() {
        return Err(Error::InvalidArgument(format!(
            "edge {}->{} not in second graph",
            e2.parent, e2.child
        )));
    }
    if categories_match(g1, &e1, g2, &e2) != Some(true) {
        return Err(Error::CategoryMismatch(format!(
            "edges {}->{} and {}->{} have different endpoint categories",
            e1.parent, e1.child, e2.parent, e2.child
        )));
    }
    let mut rng = rng_from_seed(rng_seed);
    if rng.random::<f64>() >= p_c {
        return Ok((g1.clone(), g2.clone()));
    }
    let s1 = g1.subtree(e1.child);
    let s2 = g2.subtree(e2.child);
    Ok((graft(g1, e1, g2, &s2), graft(g2, e2, g1, &s1)))
}

/// Independently for each node, with probability `p_m`, swaps its category for one
/// drawn uniformly among library categories with `s_f > tau_p` (excluding itself).
pub fn mutate(
    g: &SceneGraph,
    table: &SimilarityTable,
    library_categories: &[String],
    tau_p: f64,
    p_m: f64,
    rng_seed: u64,
) -> Result<SceneGraph> {
    if !(tau_p > 0.0 && tau_p < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "tau_p must be in (0, 1), got {tau_p}"
        )));
    }
    let mut rng = rng_from_seed(rng_seed);
    let mut out = g.clone();
    let mut library: Vec<&String> = library_categories.iter().collect();
    library.sort();
    library.dedup();
    for node in &mut out.nodes {
        if rng.random::<f64>() >= p_m {
            continue;
        }
        let candidates: Vec<&String> = library
            .iter()
            .copied()
            .filter(|c| **c != node.category && table.score(&node.category, c) > tau_p)
            .collect();
        if !candidates.is_empty() {
            node.category = candidates[rng.random_range(0..candidates.len())].clone();
        }
    }
    Ok(out)
}

/// Produces `n_out` augmented graphs: for output `i`, two source graphs are drawn,
/// crossed over along a policy-selected edge pair and the first child is mutated.
/// Every output depends only on `(graphs, seed, i)`.
pub fn augment_corpus(
    graphs: &[SceneGraph],
    n_out: usize,
    params: &AugmentParams,
    table: &SimilarityTable,
    library_categories: &[String],
    policy: &dyn CrossoverPolicy,
    seed: u64,
) -> Result<Vec<SceneGraph>> {
    if graphs.is_empty() {
        return if n_out == 0 {
            Ok(Vec::new())
        } else {
            Err(Error::InvalidArgument("no input graphs".into()))
        };
    }
    (0..n_out)
        .map(|i| {
            let mut rng = child_rng(seed, i as u64);
            let a = rng.random_range(0..graphs.len());
            let b = rng.random_range(0..graphs.len());
            let mut g = graphs[a].clone();
            if let Some((e1, e2)) = policy.select(&graphs[a], &graphs[b], &mut rng) {
                g = crossover(&graphs[a], &graphs[b], e1, e2, params.p_c, rng.random())?.0;
            }
            mutate(
                &g,
                table,
                library_categories,
                params.tau_p,
                params.p_m,
                rng.random(),
            )
        })
        .collect()
}
