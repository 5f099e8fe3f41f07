//! Splitting the traversed faces and duplicating the crossings.

use std::collections::{BTreeMap, HashMap};

use crate::reskin::{weight_by_barycentric, weight_by_edge};
use crate::rig::{edge_key, Influences, Mesh, RiggedModel, SkinBinding, Vec3};

use super::trace::PlaneSides;
use super::{TearAnchor, TearError, TearPath, TearStart};

/// Vertex indices produced by one tear step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepVertices {
    /// Start anchor (new for a face start, reused for a vertex start).
    pub from: usize,
    pub to: usize,
    /// `(plus, minus)` copies of each crossing, in path order.
    pub copies: Vec<(usize, usize)>,
    /// Extra copy of a vertex start created to keep the mesh manifold.
    pub split: Option<(usize, usize)>,
}

struct Builder<'a> {
    model: &'a RiggedModel,
    vertices: Vec<Vec3>,
    influences: Vec<Influences>,
}

impl Builder<'_> {
    fn push(&mut self, p: Vec3, w: Influences) -> usize {
        self.vertices.push(p);
        self.influences.push(w);
        self.vertices.len() - 1
    }

    fn anchor(&mut self, a: &TearAnchor) -> Result<usize, TearError> {
        let [i, j, k] = self.model.mesh.faces[a.face];
        let inf = &self.model.binding.influences;
        let w = weight_by_barycentric([&inf[i], &inf[j], &inf[k]], &a.bary)?;
        Ok(self.push(a.point, w))
    }
}

/// Rotates `tri` so that the edge `(a, b)` (either direction) starts at
/// position 0; returns the rotation offset.
fn edge_slot(tri: &[usize; 3], edge: (usize, usize)) -> usize {
    (0..3)
        .find(|&k| edge_key(tri[k], tri[(k + 1) % 3]) == edge)
        .expect("edge belongs to face")
}

fn fan_with_entry(centre: usize, tri: &[usize; 3], edge: (usize, usize), copy: impl Fn(usize) -> usize) -> Vec<[usize; 3]> {
    let k = edge_slot(tri, edge);
    let (c0, c1, c2) = (tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]);
    vec![
        [centre, c0, copy(c0)],
        [centre, copy(c1), c1],
        [centre, c1, c2],
        [centre, c2, c0],
    ]
}

fn contains(tri: &[Vec3; 3], p: &Vec3) -> f64 {
    // smallest barycentric coordinate of p, computed in the triangle's plane
    let (a, b, c) = (tri[0], tri[1], tri[2]);
    let n = (b - a).cross(&(c - a));
    let area = n.norm_squared();
    if area == 0.0 {
        return f64::NEG_INFINITY;
    }
    let u = (c - b).cross(&(p - b)).dot(&n) / area;
    let v = (a - c).cross(&(p - c)).dot(&n) / area;
    let w = (b - a).cross(&(p - a)).dot(&n) / area;
    u.min(v).min(w)
}

/// Groups the faces around `v` into fans connected through edges at `v`.
fn fans_at(faces: &[[usize; 3]], v: usize) -> Vec<Vec<usize>> {
    let incident: Vec<usize> = (0..faces.len()).filter(|&f| faces[f].contains(&v)).collect();
    let mut group: HashMap<usize, usize> = HashMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &f in &incident {
        if group.contains_key(&f) {
            continue;
        }
        let g = groups.len();
        let mut stack = vec![f];
        let mut members = Vec::new();
        group.insert(f, g);
        while let Some(h) = stack.pop() {
            members.push(h);
            for &o in &faces[h] {
                if o == v {
                    continue;
                }
                for &k in &incident {
                    if !group.contains_key(&k) && faces[k].contains(&o) {
                        group.insert(k, g);
                        stack.push(k);
                    }
                }
            }
        }
        members.sort_unstable();
        groups.push(members);
    }
    groups.sort();
    groups
}

/// Inserts the anchors and both copies of every crossing, and re-triangulates
/// the faces the path runs through.
pub(crate) fn apply_step(
    model: &RiggedModel,
    sides: &PlaneSides,
    path: &TearPath,
) -> Result<(RiggedModel, StepVertices), TearError> {
    let mesh = &model.mesh;
    let mut b = Builder {
        model,
        vertices: mesh.vertices.clone(),
        influences: model.binding.influences.clone(),
    };
    let from = match &path.from {
        TearStart::Face(a) => b.anchor(a)?,
        TearStart::Vertex(v) => *v,
    };
    let mut copies = Vec::with_capacity(path.intermediates.len());
    for q in &path.intermediates {
        let inf = &model.binding.influences;
        let w = weight_by_edge(&inf[q.edge.0], &inf[q.edge.1], q.lambda)?;
        let plus = b.push(q.position, w.clone());
        let minus = b.push(q.position, w);
        copies.push((plus, minus));
    }
    let to = b.anchor(&path.to)?;
    let copy = |j: usize, v: usize| if sides.positive(v) { copies[j].0 } else { copies[j].1 };

    let mut replaced: BTreeMap<usize, Vec<[usize; 3]>> = BTreeMap::new();
    let m = path.intermediates.len();
    let start_face = match &path.from {
        TearStart::Face(a) => a.face,
        TearStart::Vertex(_) => path.intermediates.first().map_or(path.to.face, |q| q.from_face),
    };
    if m == 0 {
        let tri = mesh.faces[start_face];
        let pos = |v: usize| b.vertices[v];
        let (centre, first) = match &path.from {
            TearStart::Face(_) => (from, None),
            TearStart::Vertex(v) => (to, Some(*v)),
        };
        let mut tris: Vec<[usize; 3]> = (0..3).map(|k| [centre, tri[k], tri[(k + 1) % 3]]).collect();
        if first.is_none() {
            // put the end anchor into whichever fan triangle holds it
            let host = (0..3)
                .max_by(|&i, &j| {
                    let ti = tris[i].map(pos);
                    let tj = tris[j].map(pos);
                    contains(&ti, &pos(to)).total_cmp(&contains(&tj, &pos(to))).then(j.cmp(&i))
                })
                .unwrap();
            let [x, y, z] = tris.remove(host);
            tris.extend([[to, x, y], [to, y, z], [to, z, x]]);
        }
        replaced.insert(start_face, tris);
    } else {
        let first = &path.intermediates[0];
        let tri = mesh.faces[start_face];
        let tris = match &path.from {
            TearStart::Face(_) => fan_with_entry(from, &tri, first.edge, |v| copy(0, v)),
            TearStart::Vertex(v) => {
                let k = tri.iter().position(|x| x == v).expect("start vertex in face");
                let (c1, c2) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
                vec![[*v, c1, copy(0, c1)], [*v, copy(0, c2), c2]]
            }
        };
        replaced.insert(start_face, tris);
        for j in 1..m {
            let (entry, exit) = (&path.intermediates[j - 1], &path.intermediates[j]);
            let face = entry.to_face;
            let tri = mesh.faces[face];
            let shared = [entry.edge.0, entry.edge.1]
                .into_iter()
                .find(|v| *v == exit.edge.0 || *v == exit.edge.1)
                .ok_or(TearError::PathNotFound)?;
            let k = tri.iter().position(|&x| x == shared).unwrap();
            let (l, a, c) = (tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]);
            // x on edge (l, a), y on edge (l, c)
            let (jx, jy) = if edge_key(l, a) == entry.edge { (j - 1, j) } else { (j, j - 1) };
            let mut tris = vec![[l, copy(jx, l), copy(jy, l)]];
            let (xq, yq) = (copy(jx, a), copy(jy, a));
            if jx == j - 1 {
                tris.push([xq, a, c]);
                tris.push([xq, c, yq]);
            } else {
                tris.push([yq, xq, a]);
                tris.push([yq, a, c]);
            }
            replaced.insert(face, tris);
        }
        let last = &path.intermediates[m - 1];
        let tri = mesh.faces[path.to.face];
        replaced.insert(path.to.face, fan_with_entry(to, &tri, last.edge, |v| copy(m - 1, v)));
    }

    let min_area = 1e-24 * mesh.bbox_diagonal().powi(2);
    let mut faces = Vec::with_capacity(mesh.face_count() + 4 * (m + 2));
    for (f, tri) in mesh.faces.iter().enumerate() {
        match replaced.get(&f) {
            None => faces.push(*tri),
            Some(tris) => {
                for t in tris {
                    let [p, q, r] = t.map(|v| b.vertices[v]);
                    if (q - p).cross(&(r - p)).norm_squared() > min_area {
                        faces.push(*t);
                    }
                }
            }
        }
    }

    let mut split = None;
    if let TearStart::Vertex(v) = path.from {
        let fans = fans_at(&faces, v);
        if fans.len() > 1 {
            let dup = b.push(b.vertices[v], b.influences[v].clone());
            for &f in &fans[1] {
                for x in faces[f].iter_mut() {
                    if *x == v {
                        *x = dup;
                    }
                }
            }
            split = Some((v, dup));
        }
    }

    let torn = model.with_mesh(Mesh::new(b.vertices, faces), SkinBinding { influences: b.influences });
    torn.validate()?;
    Ok((torn, StepVertices { from, to, copies, split }))
}
