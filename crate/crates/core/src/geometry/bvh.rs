use nalgebra::{Point3, Vector3};

use super::mesh::Mesh;

/// Hits closer than this along the ray are ignored, so rays started on a
/// surface do not re-hit it.
pub const RAY_MIN_T: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
pub struct RayHit {
    pub point: Point3<f64>,
    pub triangle: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, Copy)]
struct Aabb {
    lo: Point3<f64>,
    hi: Point3<f64>,
}

impl Aabb {
    fn empty() -> Self {
        Self {
            lo: Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY),
            hi: Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    fn grow(&mut self, p: &Point3<f64>) {
        for k in 0..3 {
            self.lo[k] = self.lo[k].min(p[k]);
            self.hi[k] = self.hi[k].max(p[k]);
        }
    }

    fn longest_axis(&self) -> usize {
        let d = self.hi - self.lo;
        if d.x >= d.y && d.x >= d.z {
            0
        } else if d.y >= d.z {
            1
        } else {
            2
        }
    }

    /// Slab test against `t_max`. Axes with zero direction reduce to an
    /// interval check; going through the multiply would yield 0 * inf = NaN
    /// for rays lying exactly on a box boundary.
    fn hit(&self, origin: &Point3<f64>, inv_dir: &Vector3<f64>, t_max: f64) -> bool {
        let mut t0 = 0.0f64;
        let mut t1 = t_max;
        for k in 0..3 {
            if inv_dir[k].is_infinite() {
                if origin[k] < self.lo[k] || origin[k] > self.hi[k] {
                    return false;
                }
                continue;
            }
            let a = (self.lo[k] - origin[k]) * inv_dir[k];
            let b = (self.hi[k] - origin[k]) * inv_dir[k];
            let (near, far) = if a <= b { (a, b) } else { (b, a) };
            t0 = t0.max(near);
            t1 = t1.min(far);
            if t0 > t1 {
                return false;
            }
        }
        true
    }
}

#[derive(Debug, Clone)]
struct Node {
    aabb: Aabb,
    /// First slot of this leaf's triangle range in `order`.
    index: u32,
    /// Leaf triangle count; 0 marks an inner node.
    len: u32,
    /// Inner nodes: index of the right child (left child is `self + 1`).
    right: u32,
}

/// Median-split bounding volume hierarchy over mesh triangles (longest axis,
/// leaf size 4). Immutable after construction; concurrent reads are safe.
#[derive(Debug, Clone)]
pub struct Bvh {
    nodes: Vec<Node>,
    /// Triangle ids ordered by tree position.
    order: Vec<u32>,
    tris: Vec<[Point3<f64>; 3]>,
}

const LEAF_SIZE: usize = 4;

impl Bvh {
    pub fn build(mesh: &Mesh) -> Self {
        let n = mesh.triangles().len();
        let tris: Vec<[Point3<f64>; 3]> = (0..n).map(|i| mesh.triangle_points(i)).collect();
        let centroids: Vec<Point3<f64>> = tris
            .iter()
            .map(|t| Point3::from((t[0].coords + t[1].coords + t[2].coords) / 3.0))
            .collect();
        let mut order: Vec<u32> = (0..n as u32).collect();
        let mut nodes = Vec::with_capacity(2 * n);
        let mut bvh = Self {
            nodes: Vec::new(),
            order: Vec::new(),
            tris,
        };
        Self::build_range(&bvh.tris, &centroids, &mut order, 0, n, &mut nodes);
        bvh.nodes = nodes;
        bvh.order = order;
        bvh
    }

    fn range_aabb(tris: &[[Point3<f64>; 3]], order: &[u32], lo: usize, hi: usize) -> Aabb {
        let mut bb = Aabb::empty();
        for &t in &order[lo..hi] {
            for p in &tris[t as usize] {
                bb.grow(p);
            }
        }
        bb
    }

    fn build_range(
        tris: &[[Point3<f64>; 3]],
        centroids: &[Point3<f64>],
        order: &mut [u32],
        lo: usize,
        hi: usize,
        nodes: &mut Vec<Node>,
    ) -> u32 {
        let aabb = Self::range_aabb(tris, order, lo, hi);
        let id = nodes.len() as u32;
        nodes.push(Node {
            aabb,
            index: lo as u32,
            len: (hi - lo) as u32,
            right: 0,
        });
        if hi - lo <= LEAF_SIZE {
            return id;
        }
        let mut cb = Aabb::empty();
        for &t in &order[lo..hi] {
            cb.grow(&centroids[t as usize]);
        }
        let axis = cb.longest_axis();
        let mid = (lo + hi) / 2;
        order[lo..hi].select_nth_unstable_by(mid - lo, |&a, &b| {
            centroids[a as usize][axis]
                .partial_cmp(&centroids[b as usize][axis])
                .unwrap()
                .then(a.cmp(&b))
        });
        nodes[id as usize].len = 0;
        Self::build_range(tris, centroids, order, lo, mid, nodes);
        let right = Self::build_range(tris, centroids, order, mid, hi, nodes);
        nodes[id as usize].right = right;
        id
    }

    /// Nearest intersection along a normalized direction, if any. Hits with
    /// distance below [`RAY_MIN_T`] are skipped; a miss is a valid result.
    pub fn ray_intersect(&self, origin: &Point3<f64>, dir: &Vector3<f64>) -> Option<RayHit> {
        self.ray_intersect_within(origin, dir, f64::INFINITY)
    }

    pub fn ray_intersect_within(
        &self,
        origin: &Point3<f64>,
        dir: &Vector3<f64>,
        t_max: f64,
    ) -> Option<RayHit> {
        if self.nodes.is_empty() {
            return None;
        }
        let inv = Vector3::new(1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z);
        let mut best: Option<(f64, usize)> = None;
        let mut limit = t_max;
        let mut stack = Vec::with_capacity(64);
        stack.push(0u32);
        while let Some(idx) = stack.pop() {
            let node = &self.nodes[idx as usize];
            if !node.aabb.hit(origin, &inv, limit) {
                continue;
            }
            if node.len > 0 {
                for &t in &self.order[node.index as usize..(node.index + node.len) as usize] {
                    let tri = &self.tris[t as usize];
                    if let Some(dist) = ray_triangle(origin, dir, tri) {
                        if dist < limit && best.is_none_or(|(b, _)| dist < b) {
                            best = Some((dist, t as usize));
                            limit = dist;
                        }
                    }
                }
            } else {
                // Left child immediately follows its parent; right is recorded.
                stack.push(node.right);
                stack.push(idx + 1);
            }
        }
        best.map(|(dist, tri)| RayHit {
            point: origin + dir * dist,
            triangle: tri,
            distance: dist,
        })
    }

    /// Parity point-in-mesh test; assumes a closed surface. The ray direction
    /// is fixed and slightly irrational to dodge shared-edge double counts.
    pub fn point_inside(&self, p: &Point3<f64>) -> bool {
        let dir = Vector3::new(0.577_350_269_189_623, 0.211_324_865_405_187, 0.788_675_134_594_813)
            .normalize();
        let mut count = 0usize;
        let mut origin = *p;
        let mut guard = 0;
        while let Some(hit) = self.ray_intersect(&origin, &dir) {
            count += 1;
            origin = hit.point + dir * (10.0 * RAY_MIN_T);
            guard += 1;
            if guard > 4096 {
                break;
            }
        }
        count % 2 == 1
    }
}

/// Moller-Trumbore; returns the ray parameter for hits beyond [`RAY_MIN_T`].
pub fn ray_triangle(
    origin: &Point3<f64>,
    dir: &Vector3<f64>,
    tri: &[Point3<f64>; 3],
) -> Option<f64> {
    let e1 = tri[1] - tri[0];
    let e2 = tri[2] - tri[0];
    let pvec = dir.cross(&e2);
    let det = e1.dot(&pvec);
    if det.abs() < 1e-16 {
        return None;
    }
    let inv_det = 1.0 / det;
    let tvec = origin - tri[0];
    let u = tvec.dot(&pvec) * inv_det;
    if !(-1e-12..=1.0 + 1e-12).contains(&u) {
        return None;
    }
    let qvec = tvec.cross(&e1);
    let v = dir.dot(&qvec) * inv_det;
    if v < -1e-12 || u + v > 1.0 + 1e-12 {
        return None;
    }
    let t = e2.dot(&qvec) * inv_det;
    if t > RAY_MIN_T {
        Some(t)
    } else {
        None
    }
}
