//! OBJ (ASCII `v`/`f` records, 1-based indices) and binary STL (80-byte
//! header, u32 triangle count, 50-byte little-endian records). Units: meters;
//! `scale` rescales on load.

use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::Point3;

use super::mesh::Mesh;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    StlBinary,
}

/// Picks the format from the file extension (`.obj` / `.stl`).
pub fn load_mesh(path: &Path, scale: f64) -> Result<Mesh> {
    let format = match path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .as_deref()
    {
        Some("obj") => MeshFormat::Obj,
        Some("stl") => MeshFormat::StlBinary,
        other => {
            return Err(Error::Parse {
                path: path.to_owned(),
                line: 0,
                message: format!("unknown mesh extension {:?}", other),
            })
        }
    };
    load_mesh_as(path, format, scale)
}

pub fn load_mesh_as(path: &Path, format: MeshFormat, scale: f64) -> Result<Mesh> {
    let mesh = match format {
        MeshFormat::Obj => {
            let text = fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.to_owned(),
                source: e,
            })?;
            parse_obj(&text, path)?
        }
        MeshFormat::StlBinary => {
            let bytes = fs::read(path).map_err(|e| Error::Io {
                path: path.to_owned(),
                source: e,
            })?;
            parse_stl(&bytes, path)?
        }
    };
    if (scale - 1.0).abs() > 0.0 {
        mesh.scaled(scale)
    } else {
        Ok(mesh)
    }
}

pub fn parse_obj(text: &str, path: &Path) -> Result<Mesh> {
    let mut vertices: Vec<Point3<f64>> = Vec::new();
    let mut triangles: Vec<[u32; 3]> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => {
                let mut coords = [0.0f64; 3];
                for c in coords.iter_mut() {
                    *c = it
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| Error::Parse {
                            path: path.to_owned(),
                            line: lineno + 1,
                            message: "vertex needs three coordinates".into(),
                        })?;
                }
                vertices.push(Point3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let idx: Vec<u32> = it
                    .map(|tok| {
                        let first = tok.split('/').next().unwrap_or("");
                        first
                            .parse::<i64>()
                            .ok()
                            .and_then(|i| {
                                if i >= 1 && (i as usize) <= vertices.len() {
                                    Some((i - 1) as u32)
                                } else {
                                    None
                                }
                            })
                            .ok_or_else(|| Error::Parse {
                                path: path.to_owned(),
                                line: lineno + 1,
                                message: format!("bad face index {:?}", tok),
                            })
                    })
                    .collect::<Result<_>>()?;
                if idx.len() < 3 {
                    return Err(Error::Parse {
                        path: path.to_owned(),
                        line: lineno + 1,
                        message: "face needs at least three vertices".into(),
                    });
                }
                // Fan triangulation for quads and larger faces.
                for k in 1..idx.len() - 1 {
                    triangles.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            _ => {} // vn/vt/usemtl and friends are ignored
        }
    }
    Mesh::new(vertices, triangles)
}

pub fn parse_stl(bytes: &[u8], path: &Path) -> Result<Mesh> {
    if bytes.len() < 84 {
        return Err(Error::Parse {
            path: path.to_owned(),
            line: 0,
            message: "binary STL shorter than its header".into(),
        });
    }
    let count = u32::from_le_bytes(bytes[80..84].try_into().unwrap()) as usize;
    let need = 84 + count * 50;
    if bytes.len() < need {
        return Err(Error::Parse {
            path: path.to_owned(),
            line: 0,
            message: format!("expected {} bytes for {} triangles", need, count),
        });
    }
    let f32_at = |off: usize| f32::from_le_bytes(bytes[off..off + 4].try_into().unwrap()) as f64;

    // Weld identical vertices so watertightness is observable.
    let mut map: std::collections::HashMap<[u64; 3], u32> = std::collections::HashMap::new();
    let mut vertices: Vec<Point3<f64>> = Vec::new();
    let mut triangles: Vec<[u32; 3]> = Vec::new();
    for t in 0..count {
        let base = 84 + t * 50 + 12; // skip the facet normal
        let mut tri = [0u32; 3];
        for (v, slot) in tri.iter_mut().enumerate() {
            let off = base + v * 12;
            let p = [f32_at(off), f32_at(off + 4), f32_at(off + 8)];
            let key = [p[0].to_bits(), p[1].to_bits(), p[2].to_bits()];
            *slot = *map.entry(key).or_insert_with(|| {
                vertices.push(Point3::new(p[0], p[1], p[2]));
                (vertices.len() - 1) as u32
            });
        }
        triangles.push(tri);
    }
    Mesh::new(vertices, triangles)
}

pub fn write_obj(mesh: &Mesh, path: &Path) -> Result<()> {
    let mut out = String::new();
    for v in mesh.vertices() {
        out.push_str(&format!("v {} {} {}\n", v.x, v.y, v.z));
    }
    for t in mesh.triangles() {
        out.push_str(&format!("f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1));
    }
    fs::write(path, out).map_err(|e| Error::Io {
        path: path.to_owned(),
        source: e,
    })
}

pub fn write_stl(mesh: &Mesh, path: &Path) -> Result<()> {
    let mut buf: Vec<u8> = Vec::with_capacity(84 + mesh.triangles().len() * 50);
    buf.extend_from_slice(&[0u8; 80]);
    buf.extend_from_slice(&(mesh.triangles().len() as u32).to_le_bytes());
    for i in 0..mesh.triangles().len() {
        let n = mesh.triangle_normal(i);
        let pts = mesh.triangle_points(i);
        for c in [n.x, n.y, n.z] {
            buf.extend_from_slice(&(c as f32).to_le_bytes());
        }
        for p in &pts {
            for c in [p.x, p.y, p.z] {
                buf.extend_from_slice(&(c as f32).to_le_bytes());
            }
        }
        buf.extend_from_slice(&0u16.to_le_bytes());
    }
    let mut f = fs::File::create(path).map_err(|e| Error::Io {
        path: path.to_owned(),
        source: e,
    })?;
    f.write_all(&buf).map_err(|e| Error::Io {
        path: path.to_owned(),
        source: e,
    })
}
