use nalgebra::{Quaternion, Vector3};

use super::blade::idx;
use super::multivector::Multivector;
use super::AlgebraError;

/// Scalar `V·reverse(V)` below this is treated as singular.
pub const SINGULAR_NORM: f64 = 1e-14;

/// An even-grade multivector applied by the sandwich product.
///
/// Rotors, translators, dilators and their products (motors with dilation)
/// are all represented by this type. Composition is the geometric product:
/// `a.compose(&b)` applies `b` first, then `a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Versor(Multivector);

impl Default for Versor {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Versor {
    pub const IDENTITY: Self = Self(Multivector::ONE);

    /// Wraps an even-grade multivector.
    pub fn from_multivector(m: Multivector) -> Result<Self, AlgebraError> {
        if !m.is_even() {
            return Err(AlgebraError::NotEven);
        }
        Ok(Self(m))
    }

    pub fn as_multivector(&self) -> &Multivector {
        &self.0
    }

    pub fn into_multivector(self) -> Multivector {
        self.0
    }

    /// `T = 1 − ½ t n∞`.
    pub fn translator(t: &Vector3<f64>) -> Self {
        let mut m = Multivector::ONE;
        if t.x == 0.0 && t.y == 0.0 && t.z == 0.0 {
            return Self(m);
        }
        // −½ t ∧ (e− + e+): t_i e_i e+ and t_i e_i e− blades
        let e_ip = [8usize, 11, 13]; // e1+, e2+, e3+
        let e_im = [9usize, 12, 14]; // e1-, e2-, e3-
        for (k, c) in [t.x, t.y, t.z].into_iter().enumerate() {
            m.0[e_ip[k]] = -0.5 * c;
            m.0[e_im[k]] = -0.5 * c;
        }
        Self(m)
    }

    /// Rotor from a unit quaternion `(w, x, y, z)`.
    ///
    /// Coefficient mapping: scalar `w`, `e23` gets `−x`, `e13` gets `+y`,
    /// `e12` gets `−z`, i.e. `R = w − x e23 − y e31 − z e12`.
    pub fn from_quaternion(q: &Quaternion<f64>) -> Self {
        let mut m = Multivector::ZERO;
        m.0[idx::SCALAR] = q.w;
        m.0[idx::E23] = -q.i;
        m.0[idx::E13] = q.j;
        m.0[idx::E12] = -q.k;
        Self(m)
    }

    /// Rotor for a right-handed rotation by `angle` about the unit `axis`.
    pub fn rotor(axis: &Vector3<f64>, angle: f64) -> Result<Self, AlgebraError> {
        let n = axis.norm();
        if !((n - 1.0).abs() <= 1e-9) {
            return Err(AlgebraError::NonUnitAxis(n));
        }
        if angle == 0.0 {
            return Ok(Self::IDENTITY);
        }
        let (s, c) = (0.5 * angle).sin_cos();
        Ok(Self::from_quaternion(&Quaternion::new(
            c,
            s * axis.x,
            s * axis.y,
            s * axis.z,
        )))
    }

    /// Dilator scaling points about the origin by `s`:
    /// `D = cosh(½ ln s) + sinh(½ ln s) no∧n∞`.
    pub fn dilator(s: f64) -> Result<Self, AlgebraError> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(AlgebraError::NonPositiveScale(s));
        }
        if s == 1.0 {
            return Ok(Self::IDENTITY);
        }
        let a = 0.5 * s.ln();
        let mut m = Multivector::ZERO;
        m.0[idx::SCALAR] = a.cosh();
        // no∧n∞ = e−∧e+ = −e+−
        m.0[idx::EPM] = -a.sinh();
        Ok(Self(m))
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Self(self.0.geometric_product(&other.0))
    }

    pub fn reverse(&self) -> Self {
        Self(self.0.reverse())
    }

    /// Scalar part of `V·reverse(V)`.
    pub fn norm_squared(&self) -> f64 {
        self.0.scalar_product(&self.0.reverse())
    }

    /// `reverse(V) / ⟨V·reverse(V)⟩₀`.
    pub fn inverse(&self) -> Result<Self, AlgebraError> {
        let n = self.norm_squared();
        if !(n.abs() >= SINGULAR_NORM) {
            return Err(AlgebraError::SingularVersor(n));
        }
        Ok(Self(self.0.reverse().scale(1.0 / n)))
    }

    /// Scales so that `⟨V·reverse(V)⟩₀ = 1`.
    pub fn normalized(&self) -> Result<Self, AlgebraError> {
        let n = self.norm_squared();
        if !(n >= SINGULAR_NORM) {
            return Err(AlgebraError::SingularVersor(n));
        }
        if n == 1.0 {
            return Ok(*self);
        }
        Ok(Self(self.0.scale(1.0 / n.sqrt())))
    }

    /// Sandwich `V X V⁻¹`.
    pub fn apply(&self, x: &Multivector) -> Result<Multivector, AlgebraError> {
        Ok(self.prepare()?.apply(x))
    }

    /// Precomputes the inverse for repeated application.
    pub fn prepare(&self) -> Result<Sandwich, AlgebraError> {
        Ok(Sandwich {
            versor: self.0,
            inverse: self.inverse()?.0,
        })
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }
}

/// A versor paired with its inverse.
#[derive(Clone, Copy, Debug)]
pub struct Sandwich {
    versor: Multivector,
    inverse: Multivector,
}

impl Sandwich {
    pub fn apply(&self, x: &Multivector) -> Multivector {
        self.versor.geometric_product(x).geometric_product(&self.inverse)
    }
}

/// `normalize(Σ wᵢ Vᵢ)`.
///
/// Weights must sum to one within 1e-9. When a single input carries all of
/// the weight, or all inputs are identical, that input is returned unchanged.
pub fn blend_linear(pairs: &[(f64, Versor)]) -> Result<Versor, AlgebraError> {
    let first = pairs.first().ok_or(AlgebraError::EmptyBlend)?;
    let total: f64 = pairs.iter().map(|(w, _)| w).sum();
    if !((total - 1.0).abs() <= 1e-9) {
        return Err(AlgebraError::WeightSum(total));
    }
    if let Some((_, v)) = pairs.iter().find(|(w, _)| *w == 1.0) {
        if pairs.iter().all(|(w, _)| *w == 1.0 || *w == 0.0) {
            return Ok(*v);
        }
    }
    if pairs.iter().all(|(_, v)| *v == first.1) {
        return Ok(first.1);
    }
    let mut sum = Multivector::ZERO;
    for (w, v) in pairs {
        sum += v.0.scale(*w);
    }
    let blended = Versor(sum);
    let n = blended.norm_squared();
    if !(n >= SINGULAR_NORM) {
        return Err(AlgebraError::DegenerateBlend(n));
    }
    blended.normalized()
}

/// Two-versor interpolation `blend([(1−a, V₁), (a, V₂)])`.
pub fn interpolate(v1: &Versor, v2: &Versor, a: f64) -> Result<Versor, AlgebraError> {
    blend_linear(&[(1.0 - a, *v1), (a, *v2)])
}
