use nalgebra::{Matrix3, Matrix4, Quaternion, Rotation3, UnitQuaternion, Vector3};

use crate::algebra::Versor;

use super::RigError;

/// Translation, rotation and uniform scale, applied as `T · R · S`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Trs {
    pub translation: Vector3<f64>,
    /// `(w, x, y, z)`; unit within 1e-9.
    pub rotation: Quaternion<f64>,
    pub scale: f64,
}

impl Default for Trs {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Trs {
    pub const IDENTITY: Self = Self {
        translation: Vector3::new(0.0, 0.0, 0.0),
        rotation: Quaternion::new(1.0, 0.0, 0.0, 0.0),
        scale: 1.0,
    };

    pub fn new(translation: Vector3<f64>, rotation: Quaternion<f64>, scale: f64) -> Self {
        Self {
            translation,
            rotation,
            scale,
        }
    }

    pub fn from_translation(t: Vector3<f64>) -> Self {
        Self {
            translation: t,
            ..Self::IDENTITY
        }
    }

    /// Rotation about a (not necessarily unit) axis.
    pub fn from_axis_angle(axis: Vector3<f64>, angle: f64) -> Self {
        let q = UnitQuaternion::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle);
        Self {
            rotation: q.into_inner(),
            ..Self::IDENTITY
        }
    }

    pub fn from_scale(s: f64) -> Self {
        Self {
            scale: s,
            ..Self::IDENTITY
        }
    }

    pub fn check(&self) -> Result<(), RigError> {
        let n = self.rotation.norm();
        if !((n - 1.0).abs() <= 1e-9) {
            return Err(RigError::NonUnitQuaternion(n));
        }
        if !(self.scale > 0.0) || !self.scale.is_finite() {
            return Err(RigError::NonPositiveScale(self.scale));
        }
        if !self.translation.iter().all(|c| c.is_finite()) {
            return Err(RigError::NonFinite("translation".into()));
        }
        Ok(())
    }

    fn unit_rotation(&self) -> UnitQuaternion<f64> {
        UnitQuaternion::new_normalize(self.rotation)
    }

    /// `translator ∘ rotor ∘ dilator`.
    pub fn to_versor(&self) -> Versor {
        let t = Versor::translator(&self.translation);
        let r = Versor::from_quaternion(&self.rotation);
        let d = Versor::dilator(self.scale).unwrap_or(Versor::IDENTITY);
        t.compose(&r).compose(&d)
    }

    pub fn to_matrix(&self) -> Matrix4<f64> {
        let r = self.unit_rotation().to_rotation_matrix();
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&(r.matrix() * self.scale));
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        m
    }

    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.translation + self.unit_rotation() * (p * self.scale)
    }

    /// `self ∘ other` (apply `other` first). Closed because scale is uniform.
    pub fn compose(&self, other: &Self) -> Self {
        let r = self.unit_rotation();
        Self {
            translation: self.translation + r * (other.translation * self.scale),
            rotation: self.rotation * other.rotation,
            scale: self.scale * other.scale,
        }
    }

    pub fn inverse(&self) -> Self {
        let r_inv = self.unit_rotation().inverse();
        let s_inv = 1.0 / self.scale;
        Self {
            translation: -(r_inv * self.translation) * s_inv,
            rotation: self.rotation.conjugate(),
            scale: s_inv,
        }
    }

    /// Decomposes `Translation · Rotation · UniformScale`.
    ///
    /// Rejects a bottom row other than `(0, 0, 0, 1)`, reflections, shear and
    /// non-uniform scale (the 3×3 block must be a positive multiple of an
    /// orthogonal matrix within 1e-6).
    pub fn from_matrix(m: &Matrix4<f64>) -> Result<Self, RigError> {
        if !m.iter().all(|c| c.is_finite()) {
            return Err(RigError::NonConformalMatrix("non-finite entry".into()));
        }
        let bottom = m.fixed_view::<1, 4>(3, 0);
        if (bottom[0].abs() + bottom[1].abs() + bottom[2].abs() + (bottom[3] - 1.0).abs()) > 1e-9 {
            return Err(RigError::NonConformalMatrix("projective bottom row".into()));
        }
        let a: Matrix3<f64> = m.fixed_view::<3, 3>(0, 0).into_owned();
        let det = a.determinant();
        if !(det > 0.0) {
            return Err(RigError::NonConformalMatrix(format!("determinant {det} is not positive")));
        }
        let s = det.cbrt();
        let gram = a.transpose() * a / (s * s);
        let dev = (gram - Matrix3::identity()).abs().max();
        if dev > 1e-6 {
            return Err(RigError::NonConformalMatrix(format!(
                "3x3 block is not a uniform scale of a rotation (deviation {dev:e})"
            )));
        }
        let rot = Rotation3::from_matrix(&(a / s));
        let q = UnitQuaternion::from_rotation_matrix(&rot);
        let mut q = q.into_inner();
        if q.w < 0.0 {
            q = -q;
        }
        Ok(Self {
            translation: m.fixed_view::<3, 1>(0, 3).into_owned(),
            rotation: q,
            scale: s,
        })
    }
}

/// Converts a `T·R·S` matrix with uniform scale into a versor.
pub fn matrix_to_versor(m: &Matrix4<f64>) -> Result<Versor, RigError> {
    Ok(Trs::from_matrix(m)?.to_versor())
}
