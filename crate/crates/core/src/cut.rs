//! Planar cut of a skinned mesh into two skinned meshes.
//!
//! Vertices are classified by the sign of `up(v)·Π`. Vertices within `εₚ`
//! of the plane are treated as if moved `2εₚ` along the normal, which puts
//! them strictly on the positive side; only the cut-point computation sees
//! the moved position, original vertices keep theirs. Every edge with
//! endpoints on opposite sides gets one shared cut point, every crossed
//! face is split into three triangles, and faces are then distributed to
//! the two sides. The cut is left open.

use std::collections::HashMap;

use thiserror::Error;

use crate::algebra::Plane;
use crate::exec::Exec;
use crate::reskin::{weight_by_edge, ReskinError};
use crate::rig::{edge_key, Influences, Mesh, RigError, RiggedModel, SkinBinding, Vec3};

/// Relative on-plane tolerance; `εₚ` is this times the bbox diagonal.
pub const PLANE_EPSILON: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CutError {
    #[error("cut edge ({0}, {1}) is shared by more than two cut faces")]
    NonManifoldCut(usize, usize),
    #[error(transparent)]
    Reskin(#[from] ReskinError),
    #[error("cut produced an invalid model: {0}")]
    Rig(#[from] RigError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Neg,
    On,
    Pos,
}

pub fn epsilon_for(mesh: &Mesh) -> f64 {
    PLANE_EPSILON * mesh.bbox_diagonal()
}

/// Side of every vertex, with `|up(v)·Π| < eps` mapped to `On`.
pub fn classify_vertices(mesh: &Mesh, plane: &Plane, eps: f64, exec: Exec) -> Vec<Side> {
    exec.map(mesh.vertex_count(), |v| {
        let d = plane.signed_distance(&mesh.vertices[v]);
        if d.abs() < eps {
            Side::On
        } else if d > 0.0 {
            Side::Pos
        } else {
            Side::Neg
        }
    })
}

/// Signed distance after moving on-plane vertices by `+2 eps`.
fn effective_distances(mesh: &Mesh, plane: &Plane, eps: f64, exec: Exec) -> Vec<f64> {
    exec.map(mesh.vertex_count(), |v| {
        let d = plane.signed_distance(&mesh.vertices[v]);
        if d.abs() < eps {
            d + 2.0 * eps
        } else {
            d
        }
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CutPoint {
    pub position: Vec3,
    /// Host edge, lower index first.
    pub edge: (usize, usize),
    /// Position along the host edge from its lower-index endpoint.
    pub lambda: f64,
    /// Index in the combined vertex numbering: original count plus cut id.
    pub index: usize,
    pub influences: Influences,
}

/// Cut points in face-then-edge discovery order, plus the edge → id map.
pub struct CutPoints {
    pub points: Vec<CutPoint>,
    pub by_edge: HashMap<(usize, usize), usize>,
}

fn compute_points(
    model: &RiggedModel,
    plane: &Plane,
    eps: f64,
    dist: &[f64],
) -> Result<CutPoints, CutError> {
    let mesh = &model.mesh;
    let n = plane.normal();
    let moved = |v: usize| {
        let p = mesh.vertices[v];
        if plane.signed_distance(&p).abs() < eps {
            p + n * (2.0 * eps)
        } else {
            p
        }
    };
    let mut points = Vec::new();
    let mut by_edge = HashMap::new();
    for tri in &mesh.faces {
        for k in 0..3 {
            let (a, b) = edge_key(tri[k], tri[(k + 1) % 3]);
            if (dist[a] > 0.0) == (dist[b] > 0.0) || by_edge.contains_key(&(a, b)) {
                continue;
            }
            let lambda = dist[a] / (dist[a] - dist[b]);
            let position = moved(a) * (1.0 - lambda) + moved(b) * lambda;
            let influences = weight_by_edge(
                &model.binding.influences[a],
                &model.binding.influences[b],
                lambda,
            )?;
            by_edge.insert((a, b), points.len());
            points.push(CutPoint {
                position,
                edge: (a, b),
                lambda,
                index: mesh.vertex_count() + points.len(),
                influences,
            });
        }
    }
    Ok(CutPoints { points, by_edge })
}

/// One cut point per edge whose endpoints lie strictly on opposite sides.
pub fn compute_cut_points(model: &RiggedModel, plane: &Plane) -> Result<CutPoints, CutError> {
    let eps = epsilon_for(&model.mesh);
    let dist = effective_distances(&model.mesh, plane, eps, Exec::Sequential);
    compute_points(model, plane, eps, &dist)
}

/// A face of the re-triangulated mesh, in combined vertex numbering.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SplitFace {
    pub vertices: [usize; 3],
    pub side: Side,
    /// Index of the original face this came from.
    pub parent: usize,
}

/// Replaces every crossed face by one triangle on its lone vertex's side
/// and two triangles tiling the quad on the other side, split along the
/// shorter diagonal. Uncut faces are kept as they are.
pub fn retriangulate_cut_faces(mesh: &Mesh, dist: &[f64], cuts: &CutPoints) -> Vec<SplitFace> {
    let side = |v: usize| if dist[v] > 0.0 { Side::Pos } else { Side::Neg };
    let n = mesh.vertex_count();
    let pos = |v: usize| {
        if v < n {
            mesh.vertices[v]
        } else {
            cuts.points[v - n].position
        }
    };
    let cut_index = |a: usize, b: usize| n + cuts.by_edge[&edge_key(a, b)];
    let mut out = Vec::with_capacity(mesh.face_count() + 2 * cuts.points.len());
    for (f, tri) in mesh.faces.iter().enumerate() {
        let s = tri.map(side);
        if s[0] == s[1] && s[1] == s[2] {
            out.push(SplitFace { vertices: *tri, side: s[0], parent: f });
            continue;
        }
        let lone = (0..3).find(|&k| s[k] != s[(k + 1) % 3] && s[k] != s[(k + 2) % 3]).expect("two sides present");
        let (l, a, b) = (tri[lone], tri[(lone + 1) % 3], tri[(lone + 2) % 3]);
        let x = cut_index(l, a);
        let y = cut_index(l, b);
        let other = side(a);
        out.push(SplitFace { vertices: [l, x, y], side: side(l), parent: f });
        // quad x, a, b, y in the parent's cyclic order
        if (pos(x) - pos(b)).norm() <= (pos(a) - pos(y)).norm() {
            out.push(SplitFace { vertices: [x, a, b], side: other, parent: f });
            out.push(SplitFace { vertices: [x, b, y], side: other, parent: f });
        } else {
            out.push(SplitFace { vertices: [x, a, y], side: other, parent: f });
            out.push(SplitFace { vertices: [a, b, y], side: other, parent: f });
        }
    }
    out
}

/// An ordered run of cut ids whose neighbours share a cut face.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polyline {
    pub points: Vec<usize>,
    pub closed: bool,
}

/// Orders cut points into chains by walking the crossed faces.
pub fn order_cut_polyline(mesh: &Mesh, cuts: &CutPoints) -> Result<Vec<Polyline>, CutError> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); cuts.points.len()];
    for tri in &mesh.faces {
        let ids: Vec<usize> = (0..3)
            .filter_map(|k| cuts.by_edge.get(&edge_key(tri[k], tri[(k + 1) % 3])).copied())
            .collect();
        if let [p, q] = ids[..] {
            adj[p].push(q);
            adj[q].push(p);
        }
    }
    for (id, nbrs) in adj.iter().enumerate() {
        if nbrs.len() > 2 {
            let (a, b) = cuts.points[id].edge;
            return Err(CutError::NonManifoldCut(a, b));
        }
    }
    let mut used = vec![false; adj.len()];
    let mut chains = Vec::new();
    let walk = |start: usize, used: &mut Vec<bool>| {
        let mut chain = vec![start];
        used[start] = true;
        let mut cur = start;
        while let Some(&next) = adj[cur].iter().filter(|&&q| !used[q]).min() {
            used[next] = true;
            chain.push(next);
            cur = next;
        }
        chain
    };
    for start in 0..adj.len() {
        if !used[start] && adj[start].len() < 2 {
            chains.push(Polyline { points: walk(start, &mut used), closed: false });
        }
    }
    for start in 0..adj.len() {
        if !used[start] {
            chains.push(Polyline { points: walk(start, &mut used), closed: true });
        }
    }
    Ok(chains)
}

#[derive(Clone, Debug)]
pub struct CutResult {
    /// The side with more unsplit original faces (ties go to `Pos`).
    pub m1: RiggedModel,
    pub m2: RiggedModel,
    pub m1_side: Side,
    pub cut_points: Vec<CutPoint>,
    pub polylines: Vec<Polyline>,
    /// For each piece, new vertex index → host edge of the original mesh.
    pub provenance: [Vec<(usize, (usize, usize))>; 2],
    pub cut_faces: usize,
    pub eps: f64,
}

impl CutResult {
    pub fn pieces(&self) -> [&RiggedModel; 2] {
        [&self.m1, &self.m2]
    }
}

/// Builds one side's model, keeping original vertices first (in original
/// order) followed by cut points (in cut-id order).
fn build_piece(
    model: &RiggedModel,
    cuts: &CutPoints,
    faces: &[SplitFace],
    side: Side,
) -> Result<(RiggedModel, Vec<(usize, (usize, usize))>), CutError> {
    let n = model.mesh.vertex_count();
    let total = n + cuts.points.len();
    let mut used = vec![false; total];
    for f in faces.iter().filter(|f| f.side == side) {
        for &v in &f.vertices {
            used[v] = true;
        }
    }
    let mut remap = vec![usize::MAX; total];
    let mut vertices = Vec::new();
    let mut influences = Vec::new();
    let mut provenance = Vec::new();
    for v in (0..total).filter(|&v| used[v]) {
        remap[v] = vertices.len();
        if v < n {
            vertices.push(model.mesh.vertices[v]);
            influences.push(model.binding.influences[v].clone());
        } else {
            let cp = &cuts.points[v - n];
            provenance.push((vertices.len(), cp.edge));
            vertices.push(cp.position);
            influences.push(cp.influences.clone());
        }
    }
    let tris = faces
        .iter()
        .filter(|f| f.side == side)
        .map(|f| f.vertices.map(|v| remap[v]))
        .collect();
    let piece = model.with_mesh(Mesh::new(vertices, tris), SkinBinding { influences });
    piece.validate()?;
    Ok((piece, provenance))
}

pub fn cut(model: &RiggedModel, plane: &Plane) -> Result<CutResult, CutError> {
    cut_with(model, plane, Exec::Parallel)
}

pub fn cut_with(model: &RiggedModel, plane: &Plane, exec: Exec) -> Result<CutResult, CutError> {
    let mesh = &model.mesh;
    let eps = epsilon_for(mesh);
    let dist = effective_distances(mesh, plane, eps, exec);
    let cuts = compute_points(model, plane, eps, &dist)?;
    let faces = retriangulate_cut_faces(mesh, &dist, &cuts);
    let polylines = order_cut_polyline(mesh, &cuts)?;

    let side = |v: usize| dist[v] > 0.0;
    let (mut pos, mut neg, mut cut_faces) = (0usize, 0usize, 0usize);
    for tri in &mesh.faces {
        match tri.map(side) {
            [true, true, true] => pos += 1,
            [false, false, false] => neg += 1,
            _ => cut_faces += 1,
        }
    }
    let m1_side = if neg > pos { Side::Neg } else { Side::Pos };
    let m2_side = if m1_side == Side::Pos { Side::Neg } else { Side::Pos };
    let (m1, p1) = build_piece(model, &cuts, &faces, m1_side)?;
    let (m2, p2) = build_piece(model, &cuts, &faces, m2_side)?;
    Ok(CutResult {
        m1,
        m2,
        m1_side,
        cut_points: cuts.points,
        polylines,
        provenance: [p1, p2],
        cut_faces,
        eps,
    })
}
