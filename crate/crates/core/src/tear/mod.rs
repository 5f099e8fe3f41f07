//! Partial tears driven by a sequence of scalpel positions.
//!
//! Each consecutive pair of scalpel states gives one step: the first
//! state's surface hit `S_i` and the second state's segment span a plane,
//! the plane is followed across the surface from `S_i` to the next hit
//! `S_{i+1}`, and every edge crossing `Q_j` on the way is inserted twice,
//! once for each side of the plane. Anchors are inserted once. The copies
//! are pushed apart along the plane normal by [`open_tear`].
//!
//! Steps after the first start at the previous end anchor, which is already
//! on a slit. When the new slit would leave that vertex with two separate
//! face fans, the vertex is split in two so the result stays manifold.

mod apply;
mod hit;
pub mod scripts;
mod trace;

use thiserror::Error;

use crate::algebra::{AlgebraError, Plane};
use crate::cut::PLANE_EPSILON;
use crate::exec::Exec;
use crate::reskin::{BaryCoord, ReskinError};
use crate::rig::{Mesh, RigError, RiggedModel, Vec3};

pub use apply::StepVertices;
pub use hit::{scalpel_hit_linear, segment_triangle, FaceBvh};
pub use trace::Intermediate;

use trace::PlaneSides;

#[derive(Debug, Error)]
pub enum TearError {
    #[error("scalpel does not cross the surface")]
    NoIntersection,
    #[error("scalpel crosses the surface {count} times (faces {faces:?}); exactly one crossing is required")]
    AmbiguousIntersection { count: usize, faces: Vec<usize> },
    #[error("scalpel endpoints coincide")]
    DegenerateScalpel,
    #[error("anchor and next scalpel endpoints are collinear; the tear plane is undefined")]
    DegenerateTearStep,
    #[error("the tear plane does not connect the two anchors across the surface")]
    PathNotFound,
    #[error("a tear needs at least two scalpel states, got {0}")]
    TooFewStates(usize),
    #[error("opening displacement must be finite and non-negative, got {0}")]
    NegativeDisplacement(f64),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Reskin(#[from] ReskinError),
    #[error("tear produced an invalid model: {0}")]
    Rig(#[from] RigError),
}

/// Scalpel segment at one time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalpelState {
    pub time: f64,
    pub tip: Vec3,
    pub tail: Vec3,
}

/// Scalpel–surface intersection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TearAnchor {
    pub point: Vec3,
    pub face: usize,
    pub bary: BaryCoord,
}

/// Where a tear step begins.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TearStart {
    Face(TearAnchor),
    /// A vertex left by the previous step.
    Vertex(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TearPath {
    pub from: TearStart,
    pub to: TearAnchor,
    pub intermediates: Vec<Intermediate>,
    pub plane: Plane,
    /// Distance of the end anchor from the plane.
    pub projection_distance: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Accel {
    #[default]
    Linear,
    Bvh,
}

pub fn scalpel_hit(mesh: &Mesh, scalpel: &ScalpelState, accel: Accel, exec: Exec) -> Result<TearAnchor, TearError> {
    let eps = PLANE_EPSILON * mesh.bbox_diagonal();
    match accel {
        Accel::Linear => scalpel_hit_linear(mesh, scalpel, eps, exec),
        Accel::Bvh => FaceBvh::build(mesh).scalpel_hit(mesh, scalpel, eps),
    }
}

/// Plane through `anchor` and both endpoints of `next`, with normal
/// `(tip − S) × (tail − S)`.
pub fn build_tear_plane(anchor: &Vec3, next: &ScalpelState) -> Result<Plane, TearError> {
    let a = next.tip - anchor;
    let b = next.tail - anchor;
    let n = a.cross(&b);
    if !(n.norm() > 1e-12 * a.norm() * b.norm()) {
        return Err(TearError::DegenerateTearStep);
    }
    Ok(Plane::through_point(n, anchor)?)
}

/// Traces the plane from `from` to `to`'s face.
pub fn trace_surface_path(mesh: &Mesh, plane: &Plane, from: &TearStart, to: &TearAnchor) -> Result<TearPath, TearError> {
    let eps = PLANE_EPSILON * mesh.bbox_diagonal();
    let sides = PlaneSides::new(mesh, *plane, eps);
    let intermediates = trace::trace(&sides, from, to.face, &to.point)?;
    Ok(TearPath {
        from: *from,
        to: *to,
        intermediates,
        plane: *plane,
        projection_distance: plane.signed_distance(&to.point).abs(),
    })
}

/// Applies one traced step to `model`.
pub fn apply_tear(model: &RiggedModel, path: &TearPath) -> Result<(RiggedModel, StepVertices), TearError> {
    let eps = PLANE_EPSILON * model.mesh.bbox_diagonal();
    let sides = PlaneSides::new(&model.mesh, path.plane, eps);
    apply::apply_step(model, &sides, path)
}

/// Two copies of one crossing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Duplicate {
    pub step: usize,
    pub plus: usize,
    pub minus: usize,
    /// Unit normal of the step's plane; `plus` lies on its positive side.
    pub normal: Vec3,
}

#[derive(Clone, Debug)]
pub struct TornModel {
    pub model: RiggedModel,
    pub paths: Vec<TearPath>,
    pub duplicates: Vec<Duplicate>,
    /// Anchor vertex indices, in scalpel order.
    pub anchors: Vec<usize>,
    /// `(original, copy)` for anchors split between steps.
    pub anchor_splits: Vec<(usize, usize)>,
}

impl TornModel {
    pub fn intersection_points(&self) -> usize {
        self.paths.iter().map(|p| p.intermediates.len()).sum()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TearOptions {
    pub accel: Accel,
    pub exec: Exec,
}

/// Runs every step of a scalpel script.
pub fn tear(model: &RiggedModel, states: &[ScalpelState], opts: TearOptions) -> Result<TornModel, TearError> {
    if states.len() < 2 {
        return Err(TearError::TooFewStates(states.len()));
    }
    let scale = model.mesh.bbox_diagonal();
    for s in states {
        if !((s.tail - s.tip).norm() > PLANE_EPSILON * scale) {
            return Err(TearError::DegenerateScalpel);
        }
    }
    let mut current = model.clone();
    let first = scalpel_hit(&current.mesh, &states[0], opts.accel, opts.exec)?;
    let mut from = TearStart::Face(first);
    let mut from_point = first.point;
    let mut out = TornModel {
        model: model.clone(),
        paths: Vec::new(),
        duplicates: Vec::new(),
        anchors: Vec::new(),
        anchor_splits: Vec::new(),
    };
    for (step, next) in states.iter().enumerate().skip(1) {
        let plane = build_tear_plane(&from_point, next)?;
        let to = scalpel_hit(&current.mesh, next, opts.accel, opts.exec)?;
        let path = trace_surface_path(&current.mesh, &plane, &from, &to)?;
        let (torn, verts) = apply_tear(&current, &path)?;
        if out.anchors.is_empty() {
            out.anchors.push(verts.from);
        }
        out.anchors.push(verts.to);
        out.anchor_splits.extend(verts.split);
        for &(plus, minus) in &verts.copies {
            out.duplicates.push(Duplicate {
                step: step - 1,
                plus,
                minus,
                normal: plane.normal(),
            });
        }
        out.paths.push(path);
        current = torn;
        from = TearStart::Vertex(verts.to);
        from_point = to.point;
    }
    out.model = current;
    Ok(out)
}

/// Default opening displacement: 1% of the bounding-box diagonal.
pub fn default_opening(model: &RiggedModel) -> f64 {
    0.01 * model.mesh.bbox_diagonal()
}

/// Moves each crossing's copies `±delta` along their plane normal.
pub fn open_tear(torn: &TornModel, delta: f64) -> Result<RiggedModel, TearError> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(TearError::NegativeDisplacement(delta));
    }
    let mut model = torn.model.clone();
    if delta == 0.0 {
        return Ok(model);
    }
    for d in &torn.duplicates {
        model.mesh.vertices[d.plus] += d.normal * delta;
        model.mesh.vertices[d.minus] -= d.normal * delta;
    }
    Ok(model)
}
