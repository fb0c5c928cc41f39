use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Per-grasp record: object-frame grasp, and per-stable-pose robustness.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraspEntry {
    pub point: [f64; 3],
    pub approach: [f64; 3],
    /// Indexed by the object's stable-pose index: (lambda, label, seed).
    pub per_pose: Vec<(f64, u8, u64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObjectEntry {
    pub name: String,
    /// FNV-1a of the source mesh file.
    pub mesh_checksum: u64,
    pub stable_poses: usize,
    pub grasps: Vec<GraspEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShardEntry {
    pub file: String,
    pub provenance_file: String,
    pub tuples: usize,
    pub checksum: u64,
    pub provenance_checksum: u64,
}

/// Everything needed to regenerate the dataset bit-exactly: the full config
/// snapshot, the run seed, per-object grasp tables and shard checksums.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub schema_version: u32,
    pub config: RunConfig,
    pub seed: u64,
    pub objects: Vec<ObjectEntry>,
    pub shards: Vec<ShardEntry>,
    pub tuple_count: usize,
    pub positive_count: usize,
}

impl DatasetManifest {
    pub fn positive_fraction(&self) -> f64 {
        if self.tuple_count == 0 {
            0.0
        } else {
            self.positive_count as f64 / self.tuple_count as f64
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_vec_pretty(self)?).map_err(|e| Error::Io {
            path: path.to_owned(),
            source: e,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::Io {
            path: path.to_owned(),
            source: e,
        })?;
        let m: Self = serde_json::from_slice(&bytes)?;
        if m.schema_version != SCHEMA_VERSION {
            return Err(Error::Dataset(format!(
                "manifest schema {} unsupported (expected {})",
                m.schema_version, SCHEMA_VERSION
            )));
        }
        Ok(m)
    }
}
