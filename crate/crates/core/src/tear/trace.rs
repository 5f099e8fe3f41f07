//! Walking the tear plane across the surface between two anchors.

use std::collections::HashSet;

use crate::algebra::Plane;
use crate::rig::{edge_key, EdgeFaces, Mesh, Vec3};

use super::{TearError, TearStart};

/// Where the tear plane crosses a mesh edge.
#[derive(Clone, Debug, PartialEq)]
pub struct Intermediate {
    pub position: Vec3,
    /// Host edge, lower index first.
    pub edge: (usize, usize),
    /// Position along the edge from its lower-index endpoint.
    pub lambda: f64,
    /// Face the walk leaves through this edge.
    pub from_face: usize,
    /// Face the walk enters.
    pub to_face: usize,
}

/// Plane distances with on-plane vertices moved to `+2 eps`, as in cutting.
pub(crate) struct PlaneSides<'a> {
    pub mesh: &'a Mesh,
    pub plane: Plane,
    pub eps: f64,
    pub dist: Vec<f64>,
    pub raw: Vec<f64>,
}

impl<'a> PlaneSides<'a> {
    pub fn new(mesh: &'a Mesh, plane: Plane, eps: f64) -> Self {
        let raw: Vec<f64> = mesh.vertices.iter().map(|v| plane.signed_distance(v)).collect();
        let dist = raw.iter().map(|&d| if d.abs() < eps { d + 2.0 * eps } else { d }).collect();
        Self { mesh, plane, eps, dist, raw }
    }

    pub fn positive(&self, v: usize) -> bool {
        self.dist[v] > 0.0
    }

    fn crossed(&self, a: usize, b: usize) -> bool {
        self.positive(a) != self.positive(b)
    }

    fn moved(&self, v: usize) -> Vec3 {
        let p = self.mesh.vertices[v];
        if self.raw[v].abs() < self.eps {
            p + self.plane.normal() * (2.0 * self.eps)
        } else {
            p
        }
    }

    fn intermediate(&self, a: usize, b: usize, from_face: usize, to_face: usize) -> Intermediate {
        let (a, b) = edge_key(a, b);
        let lambda = self.dist[a] / (self.dist[a] - self.dist[b]);
        Intermediate {
            position: self.moved(a) * (1.0 - lambda) + self.moved(b) * lambda,
            edge: (a, b),
            lambda,
            from_face,
            to_face,
        }
    }
}

/// Follows the plane from `face` through edge `(a, b)` until `target` is
/// entered. Fails on a boundary, a revisited face or budget exhaustion.
fn walk(
    sides: &PlaneSides,
    edges: &EdgeFaces,
    start: usize,
    first: (usize, usize),
    target: usize,
) -> Option<Vec<Intermediate>> {
    let mesh = sides.mesh;
    let mut visited = HashSet::from([start]);
    let mut out = Vec::new();
    let (mut face, mut edge) = (start, first);
    loop {
        let next = edges.neighbor(face, edge.0, edge.1)?;
        out.push(sides.intermediate(edge.0, edge.1, face, next));
        if next == target {
            return Some(out);
        }
        if !visited.insert(next) || visited.len() > mesh.face_count() {
            return None;
        }
        let tri = mesh.faces[next];
        let exit = (0..3)
            .map(|k| (tri[k], tri[(k + 1) % 3]))
            .find(|&(a, b)| edge_key(a, b) != edge_key(edge.0, edge.1) && sides.crossed(a, b))?;
        face = next;
        edge = exit;
    }
}

/// Ordered plane crossings from `from` to the face holding `to_point`.
///
/// A face anchor can leave through either crossed edge of its face; a vertex
/// start through the far edge of any incident face whose endpoints lie
/// clearly on opposite sides. Of the directions that reach the target, the
/// one whose first crossing lies closest to `to_point` wins.
pub(crate) fn trace(
    sides: &PlaneSides,
    from: &TearStart,
    to_face: usize,
    to_point: &Vec3,
) -> Result<Vec<Intermediate>, TearError> {
    let mesh = sides.mesh;
    let edges = mesh.edge_faces();
    let mut starts: Vec<(usize, (usize, usize))> = Vec::new();
    match from {
        TearStart::Face(anchor) => {
            if anchor.face == to_face {
                return Ok(Vec::new());
            }
            let tri = mesh.faces[anchor.face];
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                if sides.crossed(a, b) {
                    starts.push((anchor.face, (a, b)));
                }
            }
        }
        TearStart::Vertex(v) => {
            for (f, tri) in mesh.faces.iter().enumerate() {
                let Some(k) = tri.iter().position(|x| x == v) else { continue };
                if f == to_face {
                    return Ok(Vec::new());
                }
                let (a, b) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
                let clear = sides.raw[a].abs() >= sides.eps && sides.raw[b].abs() >= sides.eps;
                if clear && sides.crossed(a, b) {
                    starts.push((f, (a, b)));
                }
            }
        }
    }
    let mut best: Option<(f64, Vec<Intermediate>)> = None;
    for (face, edge) in starts {
        if let Some(path) = walk(sides, &edges, face, edge, to_face) {
            let d = (path[0].position - to_point).norm();
            let better = match &best {
                None => true,
                Some((bd, bp)) => d < *bd || (d == *bd && path.len() < bp.len()),
            };
            if better {
                best = Some((d, path));
            }
        }
    }
    best.map(|(_, p)| p).ok_or(TearError::PathNotFound)
}
