use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const SIMILARITY_SCHEMA_VERSION: u32 = 1;

/// Category groups whose members count as functionally interchangeable when no
/// embedding or score table is supplied.
pub const FUNCTION_GROUPS: &[&[&str]] = &[
    &["mug", "cup", "glass", "bottle", "can"],
    &["bowl", "plate"],
    &["fork", "knife", "spoon"],
    &["keyboard", "mouse", "laptop", "phone"],
    &["book", "notebook", "pen"],
    &["box"],
];

#[derive(Clone, Debug, PartialEq)]
enum Scores {
    /// Unit embedding per category; similarity is the dot product.
    Embeddings(Vec<Vec<f64>>),
    /// Dense symmetric score matrix.
    Matrix(Vec<Vec<f64>>),
    /// Similarity 1 within a group, 0 across.
    Groups(BTreeMap<String, usize>),
}

/// Functional similarity `s_f` between object categories.
#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityTable {
    categories: Vec<String>,
    scores: Scores,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    schema_version: u32,
    categories: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    embeddings: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scores: Option<Vec<Vec<f64>>>,
}

impl SimilarityTable {
    /// Embedding mode; vectors are normalized to unit length.
    pub fn from_embeddings(categories: Vec<String>, embeddings: Vec<Vec<f64>>) -> Result<Self> {
        if categories.len() != embeddings.len() {
            return Err(Error::InvalidArgument(
                "one embedding per category required".into(),
            ));
        }
        let dim = embeddings.first().map_or(0, Vec::len);
        let mut unit = Vec::with_capacity(embeddings.len());
        for (c, e) in categories.iter().zip(embeddings) {
            let n = e.iter().map(|v| v * v).sum::<f64>().sqrt();
            if e.len() != dim || !(n > 0.0) || !n.is_finite() {
                return Err(Error::InvalidArgument(format!("bad embedding for {c:?}")));
            }
            unit.push(e.into_iter().map(|v| v / n).collect());
        }
        Self::checked(categories, Scores::Embeddings(unit))
    }

    /// Score-matrix mode; must be symmetric with unit diagonal and entries in [-1, 1].
    pub fn from_matrix(categories: Vec<String>, scores: Vec<Vec<f64>>) -> Result<Self> {
        let n = categories.len();
        if scores.len() != n || scores.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument(
                "score matrix must be square over the categories".into(),
            ));
        }
        for i in 0..n {
            if (scores[i][i] - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "s({0},{0}) must be 1",
                    categories[i]
                )));
            }
            for (j, &v) in scores[i].iter().enumerate() {
                if !(-1.0..=1.0).contains(&v) || (v - scores[j][i]).abs() > 1e-12 {
                    return Err(Error::InvalidArgument(
                        "score matrix must be symmetric within [-1, 1]".into(),
                    ));
                }
            }
        }
        Self::checked(categories, Scores::Matrix(scores))
    }

    /// The function-group fallback.
    pub fn function_groups() -> Self {
        let mut map = BTreeMap::new();
        let mut categories = Vec::new();
        for (g, members) in FUNCTION_GROUPS.iter().enumerate() {
            for &m in *members {
                map.insert(m.to_string(), g);
                categories.push(m.to_string());
            }
        }
        Self {
            categories,
            scores: Scores::Groups(map),
        }
    }

    fn checked(categories: Vec<String>, scores: Scores) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for c in &categories {
            if !seen.insert(c) {
                return Err(Error::InvalidArgument(format!("duplicate category {c:?}")));
            }
        }
        Ok(Self { categories, scores })
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    fn index(&self, c: &str) -> Option<usize> {
        self.categories.iter().position(|x| x == c)
    }

    /// `s_f(a, b)`; 1 for identical names, 0 when either category is unknown.
    pub fn score(&self, a: &str, b: &str) -> f64 {
        if a == b {
            return 1.0;
        }
        match &self.scores {
            Scores::Groups(map) => match (map.get(a), map.get(b)) {
                (Some(x), Some(y)) if x == y => 1.0,
                _ => 0.0,
            },
            Scores::Embeddings(e) => match (self.index(a), self.index(b)) {
                (Some(i), Some(j)) => e[i]
                    .iter()
                    .zip(&e[j])
                    .map(|(x, y)| x * y)
                    .sum::<f64>()
                    .clamp(-1.0, 1.0),
                _ => 0.0,
            },
            Scores::Matrix(m) => match (self.index(a), self.index(b)) {
                (Some(i), Some(j)) => m[i][j],
                _ => 0.0,
            },
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: TableFile = serde_json::from_str(text)?;
        if f.schema_version != SIMILARITY_SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "unsupported similarity schema_version {}",
                f.schema_version
            )));
        }
        match (f.embeddings, f.scores) {
            (Some(e), None) => Self::from_embeddings(f.categories, e),
            (None, Some(s)) => Self::from_matrix(f.categories, s),
            _ => Err(Error::Schema(
                "similarity table needs exactly one of embeddings or scores".into(),
            )),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
