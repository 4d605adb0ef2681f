use std::collections::BTreeMap;
use std::path::Path;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::geometry::{surface, Aabb};
use crate::rng::Rng;
use crate::{Error, PointCloud, Result, Vec3};

pub const LIBRARY_SCHEMA_VERSION: u32 = 1;
/// Surface sampling spacing of generated shapes.
pub const SHAPE_SPACING: f64 = 0.01;
/// Depth of a mug handle along the length axis.
const HANDLE_DEPTH: f64 = 0.025;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    Box,
    Cylinder,
    Composite,
}

/// Recipes for composite shapes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompositeKind {
    /// Cylinder with a box handle on +x; width is the body diameter.
    CylinderWithHandle,
    /// Flat base with an upright lid along its -y edge.
    OpenLid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum UprightAxis {
    #[default]
    #[serde(rename = "z")]
    Z,
}

/// Generator and dimension ranges (meters) of one category. `length` is the object-frame
/// x extent, `width` y and `height` z; cylinders use `width` as diameter and ignore
/// `length` beyond validation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeSpec {
    pub category: String,
    pub kind: ShapeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub composite: Option<CompositeKind>,
    pub length: [f64; 2],
    pub width: [f64; 2],
    pub height: [f64; 2],
    #[serde(default)]
    pub upright: UprightAxis,
}

/// A sampled shape: surface points centered on their AABB center.
#[derive(Clone, Debug, PartialEq)]
pub struct Shape {
    pub category: String,
    pub points: PointCloud,
    pub extent: Vec3,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShapeLibrary {
    entries: BTreeMap<String, ShapeSpec>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LibraryFile {
    schema_version: u32,
    shapes: Vec<ShapeSpec>,
}

fn spec(
    category: &str,
    kind: ShapeKind,
    length: [f64; 2],
    width: [f64; 2],
    height: [f64; 2],
) -> ShapeSpec {
    ShapeSpec {
        category: category.into(),
        kind,
        composite: None,
        length,
        width,
        height,
        upright: UprightAxis::Z,
    }
}

fn cylinder(category: &str, diameter: [f64; 2], height: [f64; 2]) -> ShapeSpec {
    spec(category, ShapeKind::Cylinder, diameter, diameter, height)
}

fn composite(mut s: ShapeSpec, kind: CompositeKind) -> ShapeSpec {
    s.kind = ShapeKind::Composite;
    s.composite = Some(kind);
    s
}

fn draw(rng: &mut Rng, r: [f64; 2]) -> f64 {
    if r[1] > r[0] {
        rng.random_range(r[0]..=r[1])
    } else {
        r[0]
    }
}

impl Default for ShapeLibrary {
    fn default() -> Self {
        use ShapeKind::Box as B;
        let entries = vec![
            composite(
                spec(
                    "mug",
                    B,
                    [0.07 + HANDLE_DEPTH, 0.09 + HANDLE_DEPTH],
                    [0.07, 0.09],
                    [0.08, 0.11],
                ),
                CompositeKind::CylinderWithHandle,
            ),
            cylinder("cup", [0.06, 0.08], [0.07, 0.10]),
            cylinder("glass", [0.06, 0.08], [0.10, 0.15]),
            cylinder("bottle", [0.06, 0.08], [0.18, 0.28]),
            cylinder("can", [0.06, 0.07], [0.10, 0.13]),
            cylinder("bowl", [0.12, 0.18], [0.05, 0.08]),
            cylinder("plate", [0.18, 0.26], [0.015, 0.025]),
            spec("fork", B, [0.17, 0.20], [0.02, 0.03], [0.01, 0.015]),
            spec("knife", B, [0.19, 0.23], [0.015, 0.025], [0.01, 0.015]),
            spec("spoon", B, [0.15, 0.18], [0.03, 0.04], [0.01, 0.015]),
            spec("keyboard", B, [0.40, 0.46], [0.13, 0.16], [0.02, 0.035]),
            spec("mouse", B, [0.10, 0.12], [0.06, 0.07], [0.03, 0.04]),
            composite(
                spec("laptop", B, [0.30, 0.36], [0.21, 0.25], [0.20, 0.24]),
                CompositeKind::OpenLid,
            ),
            spec("phone", B, [0.14, 0.16], [0.07, 0.08], [0.008, 0.01]),
            spec("book", B, [0.20, 0.28], [0.14, 0.20], [0.02, 0.05]),
            spec("notebook", B, [0.20, 0.30], [0.15, 0.21], [0.01, 0.02]),
            spec("pen", B, [0.13, 0.15], [0.01, 0.012], [0.01, 0.012]),
            spec("box", B, [0.08, 0.25], [0.08, 0.25], [0.05, 0.20]),
        ];
        Self::new(entries).expect("built-in library is valid")
    }
}

impl ShapeLibrary {
    pub fn new(entries: Vec<ShapeSpec>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for e in entries {
            e.validate()?;
            if map.contains_key(&e.category) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate library entry {:?}",
                    e.category
                )));
            }
            map.insert(e.category.clone(), e);
        }
        Ok(Self { entries: map })
    }

    pub fn get(&self, category: &str) -> Result<&ShapeSpec> {
        self.entries
            .get(category)
            .ok_or_else(|| Error::UnknownCategory(category.to_string()))
    }

    pub fn contains(&self, category: &str) -> bool {
        self.entries.contains_key(category)
    }

    /// Category names in sorted order.
    pub fn categories(&self) -> Vec<String> {
        self.entries.keys().cloned().collect()
    }

    pub fn sample(&self, category: &str, rng: &mut Rng) -> Result<Shape> {
        self.get(category)?.sample(rng)
    }

    pub fn to_json(&self) -> Result<String> {
        let file = LibraryFile {
            schema_version: LIBRARY_SCHEMA_VERSION,
            shapes: self.entries.values().cloned().collect(),
        };
        Ok(serde_json::to_string_pretty(&file)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: LibraryFile = serde_json::from_str(text)?;
        if f.schema_version != LIBRARY_SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "unsupported library schema_version {}",
                f.schema_version
            )));
        }
        Self::new(f.shapes)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

impl ShapeSpec {
    fn validate(&self) -> Result<()> {
        for (name, r) in [
            ("length", self.length),
            ("width", self.width),
            ("height", self.height),
        ] {
            if !(r[0] > 0.0 && r[1] >= r[0] && r[1].is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "{}: bad {name} range {r:?}",
                    self.category
                )));
            }
        }
        match (self.kind, self.composite) {
            (ShapeKind::Composite, None) => Err(Error::InvalidArgument(format!(
                "{}: composite shape needs a recipe",
                self.category
            ))),
            (ShapeKind::Composite, Some(CompositeKind::CylinderWithHandle)) => {
                if self.length[0] < self.width[0] + HANDLE_DEPTH - 1e-12
                    || self.length[1] > self.width[1] + HANDLE_DEPTH + 1e-12
                {
                    return Err(Error::InvalidArgument(format!(
                        "{}: length range must be the width range plus the handle depth",
                        self.category
                    )));
                }
                Ok(())
            }
            (ShapeKind::Cylinder, _) if self.length != self.width => {
                Err(Error::InvalidArgument(format!(
                    "{}: cylinder length and width ranges must agree",
                    self.category
                )))
            }
            _ => Ok(()),
        }
    }

    /// Draws dimensions and samples the surface. Consumes a fixed number of draws.
    pub fn sample(&self, rng: &mut Rng) -> Result<Shape> {
        let (l, w, h) = (
            draw(rng, self.length),
            draw(rng, self.width),
            draw(rng, self.height),
        );
        let s = SHAPE_SPACING;
        let pts = match (self.kind, self.composite) {
            (ShapeKind::Box, _) => {
                surface::box_surface(Vec3::zeros(), Vec3::new(l / 2.0, w / 2.0, h / 2.0), s)
            }
            (ShapeKind::Cylinder, _) => {
                surface::cylinder_surface(Vec3::zeros(), w / 2.0, h / 2.0, s)
            }
            (ShapeKind::Composite, Some(CompositeKind::CylinderWithHandle)) => {
                let r = w / 2.0;
                let mut pts = surface::cylinder_surface(Vec3::zeros(), r, h / 2.0, s);
                let handle = Vec3::new(HANDLE_DEPTH / 2.0, 0.005, 0.3 * h);
                pts.extend(surface::box_surface(
                    Vec3::new(r + handle.x, 0.0, 0.0),
                    handle,
                    s,
                ));
                pts
            }
            (ShapeKind::Composite, Some(CompositeKind::OpenLid)) => {
                let base_h = 0.02;
                let mut pts = surface::box_surface(
                    Vec3::new(0.0, 0.0, base_h / 2.0),
                    Vec3::new(l / 2.0, w / 2.0, base_h / 2.0),
                    s,
                );
                let lid = Vec3::new(l / 2.0, 0.004, (h - base_h) / 2.0);
                pts.extend(surface::box_surface(
                    Vec3::new(0.0, -w / 2.0 + lid.y, base_h + lid.z),
                    lid,
                    s,
                ));
                pts
            }
            (ShapeKind::Composite, None) => unreachable!("validated"),
        };
        let c = Aabb::from_points(&pts).expect("non-empty shape").center();
        let pts: Vec<Vec3> = pts.into_iter().map(|p| p - c).collect();
        let extent = Aabb::from_points(&pts).expect("non-empty shape").extent();
        Ok(Shape {
            category: self.category.clone(),
            points: PointCloud::new(pts)?,
            extent,
        })
    }
}
