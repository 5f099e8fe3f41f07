//! The R(4,1) conformal geometric algebra.
//!
//! Metric: `e1² = e2² = e3² = e+² = 1`, `e−² = −1`. The null vectors are
//! derived: `n∞ = e− + e+`, `no = ½(e− − e+)`, with `no·n∞ = −1`.

pub mod blade;
mod conformal;
mod multivector;
mod versor;

use thiserror::Error;

pub use conformal::{down, origin_weight, up, ConformalPoint, Plane, INFINITY_TOLERANCE};
pub use multivector::Multivector;
pub use versor::{blend_linear, interpolate, Sandwich, Versor, SINGULAR_NORM};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("grade {0} is out of range 0..=5")]
    GradeOutOfRange(usize),
    #[error("versor is singular: V·reverse(V) = {0}")]
    SingularVersor(f64),
    #[error("point at infinity: no-coefficient {0}")]
    PointAtInfinity(f64),
    #[error("axis or normal must be a unit vector, got length {0}")]
    NonUnitAxis(f64),
    #[error("scale must be positive and finite, got {0}")]
    NonPositiveScale(f64),
    #[error("multivector has odd-grade components")]
    NotEven,
    #[error("blend needs at least one versor")]
    EmptyBlend,
    #[error("blend weights sum to {0}, expected 1")]
    WeightSum(f64),
    #[error("blended versor is degenerate: V·reverse(V) = {0}")]
    DegenerateBlend(f64),
}

/// Geometric product.
pub fn geometric_product(a: &Multivector, b: &Multivector) -> Multivector {
    a.geometric_product(b)
}

pub fn outer_product(a: &Multivector, b: &Multivector) -> Multivector {
    a.outer_product(b)
}

pub fn left_contraction(a: &Multivector, b: &Multivector) -> Multivector {
    a.left_contraction(b)
}

pub fn grade_project(a: &Multivector, k: usize) -> Result<Multivector, AlgebraError> {
    a.grade_project(k)
}

pub fn reverse(a: &Multivector) -> Multivector {
    a.reverse()
}

pub fn versor_inverse(v: &Versor) -> Result<Versor, AlgebraError> {
    v.inverse()
}

pub fn apply_versor(v: &Versor, x: &Multivector) -> Result<Multivector, AlgebraError> {
    v.apply(x)
}

pub fn normalize_versor(v: &Versor) -> Result<Versor, AlgebraError> {
    v.normalized()
}
