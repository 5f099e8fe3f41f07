//! Scalpel segment against the mesh surface.

use crate::exec::Exec;
use crate::reskin::BaryCoord;
use crate::rig::{Mesh, Vec3};

use super::{ScalpelState, TearAnchor, TearError};

/// Segment–triangle hit as `(t, u, v)`: `t` along the segment, `(u, v)` the
/// weights of the second and third corner. Grazing segments (nearly
/// parallel to the face) do not count as hits.
pub fn segment_triangle(origin: &Vec3, dir: &Vec3, tri: &[Vec3; 3]) -> Option<(f64, f64, f64)> {
    let e1 = tri[1] - tri[0];
    let e2 = tri[2] - tri[0];
    let pvec = dir.cross(&e2);
    let det = e1.dot(&pvec);
    if !(det.abs() > 1e-12 * dir.norm() * e1.norm() * e2.norm()) {
        return None;
    }
    let inv = 1.0 / det;
    let s = origin - tri[0];
    let u = s.dot(&pvec) * inv;
    if !(0.0..=1.0).contains(&u) {
        return None;
    }
    let q = s.cross(&e1);
    let v = dir.dot(&q) * inv;
    if !(v >= 0.0 && u + v <= 1.0) {
        return None;
    }
    let t = e2.dot(&q) * inv;
    if !(0.0..=1.0).contains(&t) {
        return None;
    }
    Some((t, u, v))
}

fn face_hit(mesh: &Mesh, f: usize, scalpel: &ScalpelState) -> Option<TearAnchor> {
    let tri = mesh.triangle(f);
    let (_, u, v) = segment_triangle(&scalpel.tip, &(scalpel.tail - scalpel.tip), &tri)?;
    let p = (1.0 - u - v).max(0.0);
    let point = tri[0] * p + tri[1] * u + tri[2] * v;
    Some(TearAnchor {
        point,
        face: f,
        bary: BaryCoord { face: f, p, q: u, r: v },
    })
}

/// Hits in ascending face order; hits within `eps` of an earlier one are
/// the same crossing (a segment through a shared edge or vertex).
fn resolve(hits: impl Iterator<Item = TearAnchor>, eps: f64) -> Result<TearAnchor, TearError> {
    let mut distinct: Vec<TearAnchor> = Vec::new();
    for h in hits {
        if !distinct.iter().any(|d| (d.point - h.point).norm() <= eps) {
            distinct.push(h);
        }
    }
    match distinct.len() {
        0 => Err(TearError::NoIntersection),
        1 => Ok(distinct.pop().unwrap()),
        count => Err(TearError::AmbiguousIntersection {
            count,
            faces: distinct.iter().map(|d| d.face).collect(),
        }),
    }
}

/// Linear scan over all faces.
pub fn scalpel_hit_linear(mesh: &Mesh, scalpel: &ScalpelState, eps: f64, exec: Exec) -> Result<TearAnchor, TearError> {
    let hits = exec.map(mesh.face_count(), |f| face_hit(mesh, f, scalpel));
    resolve(hits.into_iter().flatten(), eps)
}

#[derive(Clone, Copy, Debug)]
struct Aabb {
    lo: Vec3,
    hi: Vec3,
}

impl Aabb {
    fn empty() -> Self {
        Self {
            lo: Vec3::repeat(f64::INFINITY),
            hi: Vec3::repeat(f64::NEG_INFINITY),
        }
    }

    fn grow(&mut self, p: &Vec3) {
        self.lo = self.lo.inf(p);
        self.hi = self.hi.sup(p);
    }

    fn merge(&mut self, o: &Aabb) {
        self.lo = self.lo.inf(&o.lo);
        self.hi = self.hi.sup(&o.hi);
    }

    /// Slab test of the segment `origin + t dir`, `t ∈ [0, 1]`.
    fn hits_segment(&self, origin: &Vec3, inv_dir: &Vec3, pad: f64) -> bool {
        let mut t0: f64 = 0.0;
        let mut t1: f64 = 1.0;
        for k in 0..3 {
            let lo = self.lo[k] - pad;
            let hi = self.hi[k] + pad;
            if inv_dir[k].is_infinite() {
                if origin[k] < lo || origin[k] > hi {
                    return false;
                }
                continue;
            }
            let a = (lo - origin[k]) * inv_dir[k];
            let b = (hi - origin[k]) * inv_dir[k];
            t0 = t0.max(a.min(b));
            t1 = t1.min(a.max(b));
            if t0 > t1 {
                return false;
            }
        }
        true
    }
}

#[derive(Clone, Debug)]
enum Node {
    Leaf { bounds: Aabb, start: usize, end: usize },
    Inner { bounds: Aabb, left: usize, right: usize },
}

/// Bounding-volume hierarchy over faces, split at the centroid median of
/// the longest axis.
#[derive(Clone, Debug)]
pub struct FaceBvh {
    nodes: Vec<Node>,
    order: Vec<usize>,
    pad: f64,
}

const LEAF_SIZE: usize = 4;

impl FaceBvh {
    pub fn build(mesh: &Mesh) -> Self {
        let boxes: Vec<Aabb> = (0..mesh.face_count())
            .map(|f| {
                let mut b = Aabb::empty();
                for p in mesh.triangle(f) {
                    b.grow(&p);
                }
                b
            })
            .collect();
        let centroids: Vec<Vec3> = boxes.iter().map(|b| (b.lo + b.hi) * 0.5).collect();
        let mut bvh = Self {
            nodes: Vec::new(),
            order: (0..mesh.face_count()).collect(),
            pad: 1e-9 * mesh.bbox_diagonal(),
        };
        if !bvh.order.is_empty() {
            bvh.split(0, bvh.order.len(), &boxes, &centroids);
        }
        bvh
    }

    fn split(&mut self, start: usize, end: usize, boxes: &[Aabb], centroids: &[Vec3]) -> usize {
        let mut bounds = Aabb::empty();
        let mut cbounds = Aabb::empty();
        for &f in &self.order[start..end] {
            bounds.merge(&boxes[f]);
            cbounds.grow(&centroids[f]);
        }
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { bounds, start, end });
            return id;
        }
        let axis = (cbounds.hi - cbounds.lo).imax();
        let mid = (start + end) / 2;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            centroids[a][axis].total_cmp(&centroids[b][axis]).then(a.cmp(&b))
        });
        self.nodes.push(Node::Leaf { bounds, start: 0, end: 0 });
        let left = self.split(start, mid, boxes, centroids);
        let right = self.split(mid, end, boxes, centroids);
        self.nodes[id] = Node::Inner { bounds, left, right };
        id
    }

    /// Faces whose boxes the segment touches, ascending.
    pub fn candidates(&self, scalpel: &ScalpelState) -> Vec<usize> {
        let mut out = Vec::new();
        if self.nodes.is_empty() {
            return out;
        }
        let dir = scalpel.tail - scalpel.tip;
        let inv = dir.map(|c| 1.0 / c);
        let mut stack = vec![0usize];
        while let Some(n) = stack.pop() {
            match &self.nodes[n] {
                Node::Leaf { bounds, start, end } => {
                    if bounds.hits_segment(&scalpel.tip, &inv, self.pad) {
                        out.extend_from_slice(&self.order[*start..*end]);
                    }
                }
                Node::Inner { bounds, left, right } => {
                    if bounds.hits_segment(&scalpel.tip, &inv, self.pad) {
                        stack.push(*right);
                        stack.push(*left);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn scalpel_hit(&self, mesh: &Mesh, scalpel: &ScalpelState, eps: f64) -> Result<TearAnchor, TearError> {
        let faces = self.candidates(scalpel);
        resolve(faces.into_iter().filter_map(|f| face_hit(mesh, f, scalpel)), eps)
    }
}
