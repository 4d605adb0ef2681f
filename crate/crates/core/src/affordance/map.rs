use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::geometry::PointCloud;
use crate::real::Real;
use crate::{Error, Result};

pub const AFFORDANCE_SCHEMA_VERSION: u32 = 1;

/// Per-point activation in `[0, 1]`, index-aligned with a named scene cloud.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct AffordanceMap<T> {
    activations: Vec<T>,
    reference: String,
}

impl<T: Real> AffordanceMap<T> {
    pub fn new(activations: Vec<T>, reference: impl Into<String>) -> Result<Self> {
        if let Some(i) = activations.iter().position(|a| !a.is_finite()) {
            return Err(Error::NonFinite(format!("activation {i}")));
        }
        if let Some(i) = activations
            .iter()
            .position(|&a| a < T::zero() || a > T::one())
        {
            return Err(Error::InvalidArgument(format!(
                "activation {i} outside [0, 1]"
            )));
        }
        Ok(Self {
            activations,
            reference: reference.into(),
        })
    }

    /// For values computed in-crate that are in range by construction.
    pub(crate) fn from_trusted(activations: Vec<T>, reference: impl Into<String>) -> Self {
        debug_assert!(activations.iter().all(|&a| a >= T::zero() && a <= T::one()));
        Self {
            activations,
            reference: reference.into(),
        }
    }

    pub fn activations(&self) -> &[T] {
        &self.activations
    }

    pub fn reference(&self) -> &str {
        &self.reference
    }

    pub fn len(&self) -> usize {
        self.activations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.activations.is_empty()
    }

    pub fn max(&self) -> T {
        self.activations.iter().copied().fold(T::zero(), T::max)
    }

    /// Index of the largest activation (lowest index on ties).
    pub fn argmax(&self) -> Option<usize> {
        let mut best: Option<(usize, T)> = None;
        for (i, &a) in self.activations.iter().enumerate() {
            if best.is_none_or(|(_, b)| a > b) {
                best = Some((i, a));
            }
        }
        best.map(|(i, _)| i)
    }

    pub fn check_aligned(&self, cloud: &PointCloud<T>) -> Result<()> {
        if self.len() != cloud.len() {
            return Err(Error::InvalidArgument(format!(
                "affordance map has {} values but the cloud has {} points",
                self.len(),
                cloud.len()
            )));
        }
        Ok(())
    }

    pub fn cast<U: Real>(&self) -> AffordanceMap<U> {
        AffordanceMap {
            activations: self
                .activations
                .iter()
                .map(|a| U::lit(a.as_f64()))
                .collect(),
            reference: self.reference.clone(),
        }
    }

    /// Little-endian float32 payload.
    pub fn to_f32_bytes(&self) -> Vec<u8> {
        self.activations
            .iter()
            .flat_map(|a| (a.as_f64() as f32).to_le_bytes())
            .collect()
    }

    /// Writes the float32 payload and a JSON sidecar with `params` recorded verbatim.
    pub fn save(
        &self,
        payload_path: &Path,
        sidecar_path: &Path,
        params: serde_json::Value,
    ) -> Result<()> {
        std::fs::write(payload_path, self.to_f32_bytes())?;
        let payload = payload_path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let side = MapSidecar {
            schema_version: AFFORDANCE_SCHEMA_VERSION,
            reference: self.reference.clone(),
            count: self.len(),
            dtype: "float32-le".into(),
            payload,
            params,
        };
        std::fs::write(sidecar_path, serde_json::to_string_pretty(&side)? + "\n")?;
        Ok(())
    }

    pub fn load(sidecar_path: &Path) -> Result<Self> {
        let side: MapSidecar = serde_json::from_str(&std::fs::read_to_string(sidecar_path)?)?;
        if side.schema_version != AFFORDANCE_SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "unsupported affordance schema_version {}",
                side.schema_version
            )));
        }
        if side.dtype != "float32-le" {
            return Err(Error::Schema(format!("unsupported dtype {}", side.dtype)));
        }
        let dir = sidecar_path.parent().unwrap_or(Path::new("."));
        let bytes = std::fs::read(dir.join(&side.payload))?;
        if bytes.len() != side.count * 4 {
            return Err(Error::Schema(format!(
                "payload has {} bytes, expected {}",
                bytes.len(),
                side.count * 4
            )));
        }
        let act = bytes
            .chunks_exact(4)
            .map(|c| T::lit(f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64))
            .collect();
        Self::new(act, side.reference)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapSidecar {
    schema_version: u32,
    reference: String,
    count: usize,
    dtype: String,
    payload: String,
    params: serde_json::Value,
}
