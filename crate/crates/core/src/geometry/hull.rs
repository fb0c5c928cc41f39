//! Incremental 3D convex hull with coplanar triangles merged into polygonal
//! facets. Facet polygons, adjacency and solid angles feed the resting-pose
//! analysis in [`super::stable`].

use std::collections::HashMap;

use nalgebra::{Point3, Vector3};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct HullFacet {
    /// Outward unit normal.
    pub normal: Vector3<f64>,
    /// Plane offset: `normal . x == offset` on the facet.
    pub offset: f64,
    /// Vertex loop, counterclockwise seen from outside.
    pub vertices: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct ConvexHull {
    pub points: Vec<Point3<f64>>,
    pub facets: Vec<HullFacet>,
    /// Undirected facet-loop edge -> (facet, facet).
    adjacency: HashMap<(u32, u32), [u32; 2]>,
}

#[derive(Clone)]
struct Face {
    tri: [u32; 3],
    normal: Vector3<f64>,
    offset: f64,
    alive: bool,
}

impl ConvexHull {
    pub fn build(points: &[Point3<f64>]) -> Result<Self> {
        if points.len() < 4 {
            return Err(Error::HullFailed("fewer than four points".into()));
        }
        let scale = points
            .iter()
            .map(|p| p.coords.abs().max())
            .fold(0.0f64, f64::max)
            .max(1e-12);
        let eps = 1e-10 * scale;

        let tris = incremental_hull(points, eps)?;
        let facets = merge_coplanar(points, &tris, eps);
        let mut adjacency: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
        for (fi, facet) in facets.iter().enumerate() {
            let n = facet.vertices.len();
            for k in 0..n {
                let a = facet.vertices[k];
                let b = facet.vertices[(k + 1) % n];
                adjacency
                    .entry((a.min(b), a.max(b)))
                    .or_default()
                    .push(fi as u32);
            }
        }
        let adjacency = adjacency
            .into_iter()
            .filter(|(_, v)| v.len() == 2)
            .map(|(k, v)| (k, [v[0], v[1]]))
            .collect();
        Ok(Self {
            points: points.to_vec(),
            facets,
            adjacency,
        })
    }

    pub fn facet_plane_point(&self, facet: usize) -> Point3<f64> {
        self.points[self.facets[facet].vertices[0] as usize]
    }

    /// Projects `p` onto the facet plane along the facet normal and tests
    /// polygon membership.
    pub fn projects_inside(&self, facet: usize, p: &Point3<f64>) -> bool {
        let f = &self.facets[facet];
        let q = p - (p.coords.dot(&f.normal) - f.offset) * f.normal;
        self.point_in_facet(facet, &Point3::from(q))
    }

    pub fn point_in_facet(&self, facet: usize, q: &Point3<f64>) -> bool {
        let f = &self.facets[facet];
        let (u, v) = plane_basis(&f.normal);
        let origin = self.facet_plane_point(facet);
        let qx = (q - origin).dot(&u);
        let qy = (q - origin).dot(&v);
        let mut winding = 0i32;
        let n = f.vertices.len();
        for k in 0..n {
            let a = self.points[f.vertices[k] as usize] - origin;
            let b = self.points[f.vertices[(k + 1) % n] as usize] - origin;
            let (ax, ay) = (a.dot(&u) - qx, a.dot(&v) - qy);
            let (bx, by) = (b.dot(&u) - qx, b.dot(&v) - qy);
            if ay <= 0.0 {
                if by > 0.0 && ax * by - ay * bx > 0.0 {
                    winding += 1;
                }
            } else if by <= 0.0 && ax * by - ay * bx < 0.0 {
                winding -= 1;
            }
        }
        winding != 0
    }

    /// Solid angle (steradians) the facet subtends at `observer`.
    pub fn facet_solid_angle(&self, facet: usize, observer: &Point3<f64>) -> f64 {
        let f = &self.facets[facet];
        let n = f.vertices.len();
        let mut total = 0.0;
        let p0 = self.points[f.vertices[0] as usize] - observer;
        for k in 1..n - 1 {
            let p1 = self.points[f.vertices[k] as usize] - observer;
            let p2 = self.points[f.vertices[k + 1] as usize] - observer;
            total += triangle_solid_angle(&p0, &p1, &p2);
        }
        total.abs()
    }

    pub fn neighbor_across(&self, facet: usize, a: u32, b: u32) -> Option<usize> {
        let pair = self.adjacency.get(&(a.min(b), a.max(b)))?;
        let fi = facet as u32;
        if pair[0] == fi {
            Some(pair[1] as usize)
        } else if pair[1] == fi {
            Some(pair[0] as usize)
        } else {
            None
        }
    }

    /// Facet crossed by the ray leaving `origin` (assumed inside) along `dir`.
    pub fn ray_exit_facet(&self, origin: &Point3<f64>, dir: &Vector3<f64>) -> Option<usize> {
        let mut best: Option<(f64, usize)> = None;
        for (fi, f) in self.facets.iter().enumerate() {
            let denom = f.normal.dot(dir);
            if denom <= 1e-14 {
                continue;
            }
            let t = (f.offset - f.normal.dot(&origin.coords)) / denom;
            if t <= 0.0 {
                continue;
            }
            let q = origin + dir * t;
            if self.point_in_facet(fi, &q) && best.is_none_or(|(bt, _)| t < bt) {
                best = Some((t, fi));
            }
        }
        best.map(|(_, fi)| fi)
    }

    /// Facet-loop edge closest to a point on (or near) the facet plane.
    pub fn closest_edge(&self, facet: usize, q: &Point3<f64>) -> (u32, u32) {
        let f = &self.facets[facet];
        let n = f.vertices.len();
        let mut best = (f.vertices[0], f.vertices[1 % n]);
        let mut best_d = f64::INFINITY;
        for k in 0..n {
            let a = f.vertices[k];
            let b = f.vertices[(k + 1) % n];
            let pa = self.points[a as usize];
            let pb = self.points[b as usize];
            let d = point_segment_distance(q, &pa, &pb);
            if d < best_d {
                best_d = d;
                best = (a, b);
            }
        }
        best
    }
}

fn plane_basis(normal: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let pick = if normal.x.abs() < 0.9 {
        Vector3::x()
    } else {
        Vector3::y()
    };
    let u = (pick - pick.dot(normal) * normal).normalize();
    let v = normal.cross(&u);
    (u, v)
}

/// Van Oosterom-Strackee signed solid angle of a triangle at the origin.
fn triangle_solid_angle(a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>) -> f64 {
    let det = a.dot(&b.cross(c));
    let (la, lb, lc) = (a.norm(), b.norm(), c.norm());
    let denom = la * lb * lc + a.dot(b) * lc + a.dot(c) * lb + b.dot(c) * la;
    2.0 * det.atan2(denom)
}

fn point_segment_distance(q: &Point3<f64>, a: &Point3<f64>, b: &Point3<f64>) -> f64 {
    let ab = b - a;
    let t = ((q - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
    (q - (a + ab * t)).norm()
}

fn incremental_hull(points: &[Point3<f64>], eps: f64) -> Result<Vec<[u32; 3]>> {
    let seed = initial_simplex(points, eps)?;
    let interior = Point3::from(
        (points[seed[0]].coords
            + points[seed[1]].coords
            + points[seed[2]].coords
            + points[seed[3]].coords)
            / 4.0,
    );

    let mut faces: Vec<Face> = Vec::new();
    let mut edge_owner: HashMap<(u32, u32), u32> = HashMap::new();
    let simplex_faces = [
        [seed[0], seed[1], seed[2]],
        [seed[0], seed[3], seed[1]],
        [seed[0], seed[2], seed[3]],
        [seed[1], seed[3], seed[2]],
    ];
    for tri in simplex_faces {
        push_face(
            &mut faces,
            &mut edge_owner,
            [tri[0] as u32, tri[1] as u32, tri[2] as u32],
            points,
            &interior,
        );
    }

    for (pi, p) in points.iter().enumerate() {
        if seed.contains(&pi) {
            continue;
        }
        let visible: Vec<u32> = faces
            .iter()
            .enumerate()
            .filter(|(_, f)| f.alive && f.normal.dot(&p.coords) - f.offset > eps)
            .map(|(i, _)| i as u32)
            .collect();
        if visible.is_empty() {
            continue;
        }
        let visible_set: std::collections::HashSet<u32> = visible.iter().copied().collect();
        let mut horizon: Vec<(u32, u32)> = Vec::new();
        for &fi in &visible {
            let tri = faces[fi as usize].tri;
            for k in 0..3 {
                let a = tri[k];
                let b = tri[(k + 1) % 3];
                let neighbor = edge_owner.get(&(b, a)).copied();
                if neighbor.is_none_or(|nf| !visible_set.contains(&nf)) {
                    horizon.push((a, b));
                }
            }
        }
        for &fi in &visible {
            let tri = faces[fi as usize].tri;
            faces[fi as usize].alive = false;
            for k in 0..3 {
                edge_owner.remove(&(tri[k], tri[(k + 1) % 3]));
            }
        }
        for (a, b) in horizon {
            push_face(&mut faces, &mut edge_owner, [a, b, pi as u32], points, &interior);
        }
    }

    Ok(faces
        .into_iter()
        .filter(|f| f.alive)
        .map(|f| f.tri)
        .collect())
}

fn push_face(
    faces: &mut Vec<Face>,
    edge_owner: &mut HashMap<(u32, u32), u32>,
    mut tri: [u32; 3],
    points: &[Point3<f64>],
    interior: &Point3<f64>,
) {
    let a = points[tri[0] as usize];
    let b = points[tri[1] as usize];
    let c = points[tri[2] as usize];
    let mut normal = (b - a).cross(&(c - a));
    if normal.norm() < 1e-30 {
        return;
    }
    normal.normalize_mut();
    let mut offset = normal.dot(&a.coords);
    if normal.dot(&interior.coords) - offset > 0.0 {
        tri.swap(1, 2);
        normal = -normal;
        offset = -offset;
    }
    let id = faces.len() as u32;
    for k in 0..3 {
        edge_owner.insert((tri[k], tri[(k + 1) % 3]), id);
    }
    faces.push(Face {
        tri,
        normal,
        offset,
        alive: true,
    });
}

fn initial_simplex(points: &[Point3<f64>], eps: f64) -> Result<[usize; 4]> {
    let p0 = (0..points.len())
        .min_by(|&a, &b| {
            points[a]
                .coords
                .iter()
                .partial_cmp(points[b].coords.iter())
                .unwrap()
        })
        .unwrap();
    let p1 = (0..points.len())
        .max_by(|&a, &b| {
            (points[a] - points[p0])
                .norm()
                .partial_cmp(&(points[b] - points[p0]).norm())
                .unwrap()
        })
        .unwrap();
    if (points[p1] - points[p0]).norm() < eps {
        return Err(Error::HullFailed("all points coincide".into()));
    }
    let dir = (points[p1] - points[p0]).normalize();
    let line_dist = |i: usize| {
        let d = points[i] - points[p0];
        (d - d.dot(&dir) * dir).norm()
    };
    let p2 = (0..points.len())
        .max_by(|&a, &b| line_dist(a).partial_cmp(&line_dist(b)).unwrap())
        .unwrap();
    if line_dist(p2) < eps {
        return Err(Error::HullFailed("points are collinear".into()));
    }
    let normal = (points[p1] - points[p0])
        .cross(&(points[p2] - points[p0]))
        .normalize();
    let plane_dist = |i: usize| (points[i] - points[p0]).dot(&normal).abs();
    let p3 = (0..points.len())
        .max_by(|&a, &b| plane_dist(a).partial_cmp(&plane_dist(b)).unwrap())
        .unwrap();
    if plane_dist(p3) < eps {
        return Err(Error::HullFailed("points are coplanar".into()));
    }
    Ok([p0, p1, p2, p3])
}

fn merge_coplanar(points: &[Point3<f64>], tris: &[[u32; 3]], eps: f64) -> Vec<HullFacet> {
    let mut groups: Vec<(Vector3<f64>, f64, Vec<usize>)> = Vec::new();
    for (ti, tri) in tris.iter().enumerate() {
        let a = points[tri[0] as usize];
        let b = points[tri[1] as usize];
        let c = points[tri[2] as usize];
        let normal = (b - a).cross(&(c - a)).normalize();
        let offset = normal.dot(&a.coords);
        let slot = groups.iter().position(|(n, d, _)| {
            n.dot(&normal) > 1.0 - 1e-8 && (d - offset).abs() < 10.0 * eps.max(1e-9)
        });
        match slot {
            Some(i) => groups[i].2.push(ti),
            None => groups.push((normal, offset, vec![ti])),
        }
    }

    let mut facets = Vec::with_capacity(groups.len());
    for (normal, offset, members) in groups {
        // Directed boundary edges: interior edges cancel with their reverse.
        let mut directed: HashMap<(u32, u32), ()> = HashMap::new();
        for &ti in &members {
            let tri = tris[ti];
            for k in 0..3 {
                let a = tri[k];
                let b = tri[(k + 1) % 3];
                if directed.remove(&(b, a)).is_none() {
                    directed.insert((a, b), ());
                }
            }
        }
        let mut next: HashMap<u32, u32> = HashMap::new();
        for (a, b) in directed.keys() {
            next.insert(*a, *b);
        }
        let start = *next.keys().min().unwrap();
        let mut loop_vertices = vec![start];
        let mut cur = next[&start];
        let mut guard = 0;
        while cur != start && guard < next.len() + 2 {
            loop_vertices.push(cur);
            cur = next[&cur];
            guard += 1;
        }
        facets.push(HullFacet {
            normal,
            offset,
            vertices: loop_vertices,
        });
    }
    facets
}
