//! Fixed-record binary shards. One record per tuple:
//! `side*side` little-endian f32 thumbnail pixels, then f32 gripper depth,
//! f32 approach angle, f32 robustness, u8 label. Provenance files carry a
//! parallel 16-byte record `(object, pose, image, grasp)` as u32 LE each.

use std::path::Path;

use crate::error::{Error, Result};
use crate::sensor::DepthImage;

/// Bytes per record beyond the thumbnail pixels.
pub const RECORD_HEADER_BYTES: usize = 13;

/// One dataset row: rotated target-centered depth crop plus grasp scalars
/// and the robustness label.
#[derive(Debug, Clone)]
pub struct GraspTuple {
    pub thumbnail: DepthImage,
    pub gripper_depth: f32,
    pub approach_angle: f32,
    pub lambda: f32,
    pub label: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Provenance {
    pub object: u32,
    pub pose: u32,
    pub image: u32,
    pub grasp: u32,
}

pub fn record_size(side: usize) -> usize {
    side * side * 4 + RECORD_HEADER_BYTES
}

pub fn encode_shard(tuples: &[GraspTuple], side: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(tuples.len() * record_size(side));
    for t in tuples {
        debug_assert_eq!(t.thumbnail.width, side);
        debug_assert_eq!(t.thumbnail.height, side);
        for px in &t.thumbnail.data {
            out.extend_from_slice(&px.to_le_bytes());
        }
        out.extend_from_slice(&t.gripper_depth.to_le_bytes());
        out.extend_from_slice(&t.approach_angle.to_le_bytes());
        out.extend_from_slice(&t.lambda.to_le_bytes());
        out.push(t.label);
    }
    out
}

pub fn read_shard(path: &Path, side: usize) -> Result<Vec<GraspTuple>> {
    let bytes = std::fs::read(path).map_err(|e| Error::Io {
        path: path.to_owned(),
        source: e,
    })?;
    let rec = record_size(side);
    if bytes.len() % rec != 0 {
        return Err(Error::Dataset(format!(
            "{}: {} bytes is not a multiple of the {}-byte record",
            path.display(),
            bytes.len(),
            rec
        )));
    }
    let f32_at = |buf: &[u8], off: usize| f32::from_le_bytes(buf[off..off + 4].try_into().unwrap());
    let mut out = Vec::with_capacity(bytes.len() / rec);
    for chunk in bytes.chunks_exact(rec) {
        let mut thumbnail = DepthImage::new(side, side);
        for (i, px) in thumbnail.data.iter_mut().enumerate() {
            *px = f32_at(chunk, i * 4);
        }
        let base = side * side * 4;
        out.push(GraspTuple {
            thumbnail,
            gripper_depth: f32_at(chunk, base),
            approach_angle: f32_at(chunk, base + 4),
            lambda: f32_at(chunk, base + 8),
            label: chunk[base + 12],
        });
    }
    Ok(out)
}

pub fn encode_provenance(rows: &[Provenance]) -> Vec<u8> {
    let mut out = Vec::with_capacity(rows.len() * 16);
    for r in rows {
        for v in [r.object, r.pose, r.image, r.grasp] {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn read_provenance(path: &Path) -> Result<Vec<Provenance>> {
    let bytes = std::fs::read(path).map_err(|e| Error::Io {
        path: path.to_owned(),
        source: e,
    })?;
    if bytes.len() % 16 != 0 {
        return Err(Error::Dataset(format!(
            "{}: provenance length {} not a multiple of 16",
            path.display(),
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(16)
        .map(|c| {
            let u = |o: usize| u32::from_le_bytes(c[o..o + 4].try_into().unwrap());
            Provenance {
                object: u(0),
                pose: u(4),
                image: u(8),
                grasp: u(12),
            }
        })
        .collect())
}
