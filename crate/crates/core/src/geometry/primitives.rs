//! Parametric watertight test shapes. Used by unit tests, the acceptance
//! suite, and `analyze --demo`-style runs; handy for desk-scale datasets too.

use std::collections::HashMap;

use nalgebra::{Point3, Vector3};

use super::mesh::Mesh;

/// Axis-aligned box spanning `lo..hi`, counterclockwise-outward winding.
pub fn make_box(lo: Point3<f64>, hi: Point3<f64>) -> Mesh {
    let v = vec![
        Point3::new(lo.x, lo.y, lo.z),
        Point3::new(hi.x, lo.y, lo.z),
        Point3::new(hi.x, hi.y, lo.z),
        Point3::new(lo.x, hi.y, lo.z),
        Point3::new(lo.x, lo.y, hi.z),
        Point3::new(hi.x, lo.y, hi.z),
        Point3::new(hi.x, hi.y, hi.z),
        Point3::new(lo.x, hi.y, hi.z),
    ];
    let t = vec![
        [0, 2, 1],
        [0, 3, 2], // bottom (z = lo)
        [4, 5, 6],
        [4, 6, 7], // top (z = hi)
        [0, 1, 5],
        [0, 5, 4], // y = lo
        [2, 3, 7],
        [2, 7, 6], // y = hi
        [1, 2, 6],
        [1, 6, 5], // x = hi
        [3, 0, 4],
        [3, 4, 7], // x = lo
    ];
    Mesh::new(v, t).expect("box is non-degenerate")
}

pub fn unit_cube() -> Mesh {
    make_box(Point3::origin(), Point3::new(1.0, 1.0, 1.0))
}

/// Cube of side `s` resting on z = 0, centered on the z axis.
pub fn table_cube(s: f64) -> Mesh {
    make_box(
        Point3::new(-s / 2.0, -s / 2.0, 0.0),
        Point3::new(s / 2.0, s / 2.0, s),
    )
}

/// Flat square plate of half-extent `half` and thickness `thickness`, top face at z = `top`.
pub fn plate(half: f64, thickness: f64, top: f64) -> Mesh {
    make_box(
        Point3::new(-half, -half, top - thickness),
        Point3::new(half, half, top),
    )
}

/// Two-level block: low part for x < `x_step`, high part beyond. Modeled as
/// two touching closed boxes so each component stays watertight.
pub fn stepped_block(
    width: f64,
    depth: f64,
    h_low: f64,
    h_high: f64,
    x_step: f64,
) -> Mesh {
    let a = make_box(
        Point3::new(-width / 2.0, -depth / 2.0, 0.0),
        Point3::new(x_step, depth / 2.0, h_low),
    );
    let b = make_box(
        Point3::new(x_step, -depth / 2.0, 0.0),
        Point3::new(width / 2.0, depth / 2.0, h_high),
    );
    merge(&[a, b])
}

/// Thin vertical fin of width `w` on top of a squat base block.
pub fn fin_block(base: f64, base_h: f64, fin_w: f64, fin_h: f64) -> Mesh {
    let b = make_box(
        Point3::new(-base / 2.0, -base / 2.0, 0.0),
        Point3::new(base / 2.0, base / 2.0, base_h),
    );
    let f = make_box(
        Point3::new(-fin_w / 2.0, -base / 2.0, base_h),
        Point3::new(fin_w / 2.0, base / 2.0, base_h + fin_h),
    );
    merge(&[b, f])
}

/// Annular plate: outer radius `r_outer`, circular through-hole of radius
/// `r_hole`, thickness `t`, top face at z = 0, `segments` around.
pub fn plate_with_hole(r_outer: f64, r_hole: f64, thickness: f64, segments: usize) -> Mesh {
    assert!(segments >= 8 && r_hole < r_outer);
    let n = segments;
    let mut v = Vec::with_capacity(4 * n);
    for &z in &[0.0, -thickness] {
        for &r in &[r_outer, r_hole] {
            for k in 0..n {
                let a = std::f64::consts::TAU * k as f64 / n as f64;
                v.push(Point3::new(r * a.cos(), r * a.sin(), z));
            }
        }
    }
    // Ring index helpers: 0 top-outer, 1 top-inner, 2 bottom-outer, 3 bottom-inner.
    let ring = |r: usize, k: usize| (r * n + k % n) as u32;
    let mut t = Vec::new();
    for k in 0..n {
        // top annulus (normal +z)
        t.push([ring(0, k), ring(0, k + 1), ring(1, k)]);
        t.push([ring(1, k), ring(0, k + 1), ring(1, k + 1)]);
        // bottom annulus (normal -z)
        t.push([ring(2, k), ring(3, k), ring(2, k + 1)]);
        t.push([ring(3, k), ring(3, k + 1), ring(2, k + 1)]);
        // outer wall (normal radially out)
        t.push([ring(0, k + 1), ring(0, k), ring(2, k)]);
        t.push([ring(0, k + 1), ring(2, k), ring(2, k + 1)]);
        // hole wall (normal radially in)
        t.push([ring(1, k), ring(1, k + 1), ring(3, k + 1)]);
        t.push([ring(1, k), ring(3, k + 1), ring(3, k)]);
    }
    Mesh::new(v, t).expect("annulus is non-degenerate")
}

/// Closed cylinder of radius `r` and height `h` resting on z = 0.
pub fn cylinder(r: f64, h: f64, segments: usize) -> Mesh {
    let n = segments;
    let mut v = Vec::with_capacity(2 * n + 2);
    for &z in &[0.0, h] {
        for k in 0..n {
            let a = std::f64::consts::TAU * k as f64 / n as f64;
            v.push(Point3::new(r * a.cos(), r * a.sin(), z));
        }
    }
    let bot_c = v.len() as u32;
    v.push(Point3::new(0.0, 0.0, 0.0));
    let top_c = v.len() as u32;
    v.push(Point3::new(0.0, 0.0, h));
    let mut t = Vec::new();
    for k in 0..n {
        let k1 = (k + 1) % n;
        t.push([bot_c, (k1) as u32, k as u32]);
        t.push([top_c, (n + k) as u32, (n + k1) as u32]);
        t.push([k as u32, k1 as u32, (n + k1) as u32]);
        t.push([k as u32, (n + k1) as u32, (n + k) as u32]);
    }
    Mesh::new(v, t).expect("cylinder is non-degenerate")
}

/// Closed cone of base radius `r` and height `h`, base on z = 0.
pub fn cone(r: f64, h: f64, segments: usize) -> Mesh {
    let n = segments;
    let mut v: Vec<Point3<f64>> = (0..n)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / n as f64;
            Point3::new(r * a.cos(), r * a.sin(), 0.0)
        })
        .collect();
    let base_c = v.len() as u32;
    v.push(Point3::new(0.0, 0.0, 0.0));
    let apex = v.len() as u32;
    v.push(Point3::new(0.0, 0.0, h));
    let mut t = Vec::new();
    for k in 0..n {
        let k1 = ((k + 1) % n) as u32;
        t.push([base_c, k1, k as u32]);
        t.push([k as u32, k1, apex]);
    }
    Mesh::new(v, t).expect("cone is non-degenerate")
}

/// Icosphere of radius `r` centered at `center` with `subdivisions` levels.
pub fn icosphere(center: Point3<f64>, r: f64, subdivisions: usize) -> Mesh {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let mut verts: Vec<Vector3<f64>> = vec![
        Vector3::new(-1.0, phi, 0.0),
        Vector3::new(1.0, phi, 0.0),
        Vector3::new(-1.0, -phi, 0.0),
        Vector3::new(1.0, -phi, 0.0),
        Vector3::new(0.0, -1.0, phi),
        Vector3::new(0.0, 1.0, phi),
        Vector3::new(0.0, -1.0, -phi),
        Vector3::new(0.0, 1.0, -phi),
        Vector3::new(phi, 0.0, -1.0),
        Vector3::new(phi, 0.0, 1.0),
        Vector3::new(-phi, 0.0, -1.0),
        Vector3::new(-phi, 0.0, 1.0),
    ]
    .into_iter()
    .map(|v| v.normalize())
    .collect();
    let mut faces: Vec<[u32; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut midpoint: HashMap<(u32, u32), u32> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        for f in &faces {
            let mut mid = [0u32; 3];
            for k in 0..3 {
                let a = f[k];
                let b = f[(k + 1) % 3];
                let key = (a.min(b), a.max(b));
                mid[k] = *midpoint.entry(key).or_insert_with(|| {
                    let m = ((verts[a as usize] + verts[b as usize]) / 2.0).normalize();
                    verts.push(m);
                    (verts.len() - 1) as u32
                });
            }
            next.push([f[0], mid[0], mid[2]]);
            next.push([f[1], mid[1], mid[0]]);
            next.push([f[2], mid[2], mid[1]]);
            next.push([mid[0], mid[1], mid[2]]);
        }
        faces = next;
    }
    let points = verts
        .into_iter()
        .map(|v| Point3::from(center.coords + v * r))
        .collect();
    Mesh::new(points, faces).expect("icosphere is non-degenerate")
}

/// Desk-scale demo set: easy prismatics mixed with seal-hostile geometry
/// (fins, holes, curvature, steps). Used by the CLI's `demo-objects` and the
/// pipeline tests.
pub fn demo_set() -> Vec<(String, Mesh)> {
    use super::transform::RigidTransform;
    vec![
        ("cube_50mm".into(), table_cube(0.05)),
        (
            "box_flat".into(),
            make_box(Point3::new(-0.04, -0.03, 0.0), Point3::new(0.04, 0.03, 0.02)),
        ),
        (
            "box_tall".into(),
            make_box(
                Point3::new(-0.015, -0.015, 0.0),
                Point3::new(0.015, 0.015, 0.09),
            ),
        ),
        ("cylinder".into(), cylinder(0.02, 0.05, 28)),
        ("cylinder_thin".into(), cylinder(0.008, 0.06, 20)),
        ("cone".into(), cone(0.025, 0.05, 28)),
        (
            "sphere".into(),
            icosphere(Point3::new(0.0, 0.0, 0.02), 0.02, 2),
        ),
        (
            "stepped_block".into(),
            stepped_block(0.06, 0.05, 0.015, 0.022, 0.0),
        ),
        ("fin_plate".into(), fin_block(0.05, 0.012, 0.0012, 0.025)),
        ("washer".into(), {
            let m = plate_with_hole(0.03, 0.004, 0.01, 40);
            m.transformed(&RigidTransform {
                rotation: nalgebra::Matrix3::identity(),
                translation: Vector3::new(0.0, 0.0, 0.01),
            })
        }),
    ]
}

/// Concatenates meshes into one (components stay individually closed).
pub fn merge(meshes: &[Mesh]) -> Mesh {
    let mut verts = Vec::new();
    let mut tris = Vec::new();
    for m in meshes {
        let base = verts.len() as u32;
        verts.extend_from_slice(m.vertices());
        tris.extend(m.triangles().iter().map(|t| [t[0] + base, t[1] + base, t[2] + base]));
    }
    Mesh::new(verts, tris).expect("merged mesh is non-degenerate")
}
