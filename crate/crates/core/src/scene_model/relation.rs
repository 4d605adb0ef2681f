use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::real::Real;
use crate::{Error, Result};

/// The closed set of pairwise spatial relations, expressed in the viewer frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Left,
    Right,
    Front,
    Behind,
    LeftFront,
    LeftBehind,
    RightFront,
    RightBehind,
    On,
}

/// Compass relations indexed by 45° sector, counter-clockwise from viewer right.
const SECTORS: [Relation; 8] = [
    Relation::Right,
    Relation::RightBehind,
    Relation::Behind,
    Relation::LeftBehind,
    Relation::Left,
    Relation::LeftFront,
    Relation::Front,
    Relation::RightFront,
];

impl Relation {
    pub const ALL: [Relation; 9] = [
        Relation::Left,
        Relation::Right,
        Relation::Front,
        Relation::Behind,
        Relation::LeftFront,
        Relation::LeftBehind,
        Relation::RightFront,
        Relation::RightBehind,
        Relation::On,
    ];

    pub const COMPASS: [Relation; 8] = SECTORS;

    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Left => "left",
            Relation::Right => "right",
            Relation::Front => "front",
            Relation::Behind => "behind",
            Relation::LeftFront => "left_front",
            Relation::LeftBehind => "left_behind",
            Relation::RightFront => "right_front",
            Relation::RightBehind => "right_behind",
            Relation::On => "on",
        }
    }

    /// Angle of the relation's sector center in the viewer frame
    /// (+x right, +y behind). `None` for `On`.
    pub fn viewer_angle<T: Real>(self) -> Option<T> {
        let i = SECTORS.iter().position(|&r| r == self)?;
        let deg = if i <= 4 {
            45.0 * i as f64
        } else {
            45.0 * i as f64 - 360.0
        };
        Some(T::lit(deg.to_radians()))
    }

    /// Bins a viewer-frame angle into one of the eight 45° sectors.
    pub fn from_viewer_angle<T: Real>(theta: T) -> Relation {
        let sector = T::FRAC_PI_4();
        let idx = ((theta + sector / T::two()) / sector)
            .floor()
            .to_i64()
            .unwrap_or(0);
        SECTORS[idx.rem_euclid(8) as usize]
    }

    /// Unit horizontal direction of the relation in the scene frame for a viewer with
    /// the given yaw. `None` for `On`.
    pub fn scene_direction<T: Real>(self, viewer_yaw: T) -> Option<[T; 2]> {
        let a = self.viewer_angle::<T>()? + viewer_yaw;
        Some([a.cos(), a.sin()])
    }

    pub fn opposite(self) -> Relation {
        match self {
            Relation::On => Relation::On,
            r => {
                let i = SECTORS.iter().position(|&s| s == r).unwrap_or(0);
                SECTORS[(i + 4) % 8]
            }
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Relation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        Relation::ALL
            .into_iter()
            .find(|r| r.as_str() == norm)
            .ok_or_else(|| Error::Parse(format!("unknown relation {s:?}")))
    }
}

/// Expresses a scene-frame horizontal displacement in the viewer frame.
pub fn to_viewer_frame<T: Real>(d: [T; 2], viewer_yaw: T) -> [T; 2] {
    let (s, c) = viewer_yaw.sin_cos();
    [d[0] * c + d[1] * s, -d[0] * s + d[1] * c]
}
