use nalgebra::{DualQuaternion, Matrix4, Translation3, UnitDualQuaternion, UnitQuaternion, Vector3};

use crate::algebra::{down, up, Multivector, Sandwich};
use crate::exec::Exec;
use crate::rig::{Influences, RiggedModel, Vec3};

use super::pose::Pose;
use super::AnimError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Backend {
    #[default]
    Cga,
    Lbs,
    Dq,
}

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::Cga, Backend::Lbs, Backend::Dq];

    pub fn name(self) -> &'static str {
        match self {
            Backend::Cga => "cga",
            Backend::Lbs => "lbs",
            Backend::Dq => "dq",
        }
    }
}

impl std::str::FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cga" => Ok(Backend::Cga),
            "lbs" => Ok(Backend::Lbs),
            "dq" => Ok(Backend::Dq),
            _ => Err(format!("unknown backend '{s}' (expected cga, lbs or dq)")),
        }
    }
}

/// How the CGA backend combines the per-bone sandwiches of one vertex.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CgaMode {
    /// Down-project each term, then take the Euclidean weighted sum.
    #[default]
    ProjectEachTerm,
    /// Sum the conformal points, then down-project once.
    SumThenProject,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SkinnedFrame {
    pub positions: Vec<Vec3>,
    pub backend: Backend,
    pub time: f64,
}

fn check_finite(positions: Vec<Vec3>, backend: Backend, time: f64) -> Result<SkinnedFrame, AnimError> {
    if let Some(vertex) = positions.iter().position(|p| !p.iter().all(|c| c.is_finite())) {
        return Err(AnimError::NumericalFailure { vertex, backend });
    }
    Ok(SkinnedFrame {
        positions,
        backend,
        time,
    })
}

fn influences(model: &RiggedModel, m: usize) -> &Influences {
    &model.binding.influences[m]
}

/// `Σ w · down((M_n B_n) up(v) (M_n B_n)⁻¹)`.
pub fn skin_cga(model: &RiggedModel, pose: &Pose, mode: CgaMode, exec: Exec) -> Result<SkinnedFrame, AnimError> {
    let sandwiches: Vec<Sandwich> = model
        .skeleton
        .bones()
        .iter()
        .map(|b| pose.versors[b.id as usize].compose(&b.offset_versor()).prepare())
        .collect::<Result<_, _>>()?;
    let mesh = &model.mesh;
    let positions = exec.try_map(mesh.vertex_count(), |m| {
        let c: Multivector = up(&mesh.vertices[m]).into();
        let inf = influences(model, m);
        match mode {
            CgaMode::ProjectEachTerm => {
                let mut acc = Vector3::zeros();
                for i in inf.iter() {
                    acc += down(&sandwiches[i.bone as usize].apply(&c))? * i.weight;
                }
                Ok(acc)
            }
            CgaMode::SumThenProject => {
                let mut acc = Multivector::ZERO;
                for i in inf.iter() {
                    acc += sandwiches[i.bone as usize].apply(&c).scale(i.weight);
                }
                down(&acc)
            }
        }
        .map_err(|e| AnimError::Algebra { vertex: Some(m), source: e })
    })?;
    check_finite(positions, Backend::Cga, pose.time)
}

/// `Σ w · T_n O_n v` in homogeneous coordinates.
pub fn skin_lbs(model: &RiggedModel, pose: &Pose, exec: Exec) -> Result<SkinnedFrame, AnimError> {
    let skin: Vec<Matrix4<f64>> = model
        .skeleton
        .bones()
        .iter()
        .map(|b| pose.matrices[b.id as usize] * b.offset.to_matrix())
        .collect();
    let mesh = &model.mesh;
    let positions = exec.map(mesh.vertex_count(), |m| {
        let v = mesh.vertices[m].push(1.0);
        let mut acc = nalgebra::Vector4::zeros();
        for i in influences(model, m).iter() {
            acc += skin[i.bone as usize] * v * i.weight;
        }
        acc.xyz()
    });
    check_finite(positions, Backend::Lbs, pose.time)
}

/// Dual-quaternion skinning. Each bone's `G_n O_n` is split into a rigid
/// part and a uniform scale; the weighted scale is applied to the rest
/// position first, then the blended rigid motion.
pub fn skin_dq(model: &RiggedModel, pose: &Pose, exec: Exec) -> Result<SkinnedFrame, AnimError> {
    let parts: Vec<(DualQuaternion<f64>, f64)> = model
        .skeleton
        .bones()
        .iter()
        .map(|b| {
            let t = pose.globals[b.id as usize].compose(&b.offset);
            let rot = UnitQuaternion::new_normalize(t.rotation);
            let dq = UnitDualQuaternion::from_parts(Translation3::from(t.translation), rot);
            (dq.into_inner(), t.scale)
        })
        .collect();
    let mesh = &model.mesh;
    let positions = exec.map(mesh.vertex_count(), |m| {
        let inf = influences(model, m);
        let pivot = parts[inf.as_slice()[0].bone as usize].0.real;
        let mut blend = DualQuaternion::from_real_and_dual(Default::default(), Default::default());
        let mut scale = 0.0;
        for i in inf.iter() {
            let (dq, s) = parts[i.bone as usize];
            let w = if dq.real.dot(&pivot) < 0.0 { -i.weight } else { i.weight };
            blend = blend + dq * w;
            scale += s * i.weight;
        }
        let unit = UnitDualQuaternion::new_normalize(blend);
        let p = mesh.vertices[m] * scale;
        unit.transform_point(&p.into()).coords
    });
    check_finite(positions, Backend::Dq, pose.time)
}

pub fn skin(model: &RiggedModel, pose: &Pose, backend: Backend, exec: Exec) -> Result<SkinnedFrame, AnimError> {
    match backend {
        Backend::Cga => skin_cga(model, pose, CgaMode::ProjectEachTerm, exec),
        Backend::Lbs => skin_lbs(model, pose, exec),
        Backend::Dq => skin_dq(model, pose, exec),
    }
}
