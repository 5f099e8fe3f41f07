use nalgebra::Vector3;

use super::blade::idx;
use super::multivector::Multivector;
use super::AlgebraError;

/// Below this magnitude the `no` coefficient marks a point at infinity.
pub const INFINITY_TOLERANCE: f64 = 1e-14;

/// A normalized conformal point `v + ½v² n∞ + no`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConformalPoint(Multivector);

impl ConformalPoint {
    pub fn as_multivector(&self) -> &Multivector {
        &self.0
    }

    pub fn euclidean(&self) -> Vector3<f64> {
        Vector3::new(self.0[idx::E1], self.0[idx::E2], self.0[idx::E3])
    }
}

impl From<ConformalPoint> for Multivector {
    fn from(p: ConformalPoint) -> Self {
        p.0
    }
}

/// Embeds a Euclidean point.
pub fn up(v: &Vector3<f64>) -> ConformalPoint {
    let h = 0.5 * v.norm_squared();
    // h n∞ + no = (h − ½) e+ + (h + ½) e−
    ConformalPoint(Multivector::vector(v.x, v.y, v.z, h - 0.5, h + 0.5))
}

/// Coefficient of `no` in a grade-1 element, `−X·n∞`.
pub fn origin_weight(x: &Multivector) -> f64 {
    x[idx::EM] - x[idx::EP]
}

/// Normalizes the `no` coefficient to one and extracts the Euclidean part.
pub fn down(x: &Multivector) -> Result<Vector3<f64>, AlgebraError> {
    let w = origin_weight(x);
    if !(w.abs() >= INFINITY_TOLERANCE) {
        return Err(AlgebraError::PointAtInfinity(w));
    }
    Ok(Vector3::new(x[idx::E1] / w, x[idx::E2] / w, x[idx::E3] / w))
}

/// An oriented plane `n̂·p = d`, represented in the algebra as `n̂ + d n∞`.
///
/// For a normalized conformal point, `up(p)·Π = n̂·p − d`: the inner product
/// is the Euclidean signed distance with proportionality factor one. The
/// positive side is the one the normal points into.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Plane {
    normal: Vector3<f64>,
    offset: f64,
    ipns: Multivector,
}

impl Plane {
    pub fn new(normal: Vector3<f64>, offset: f64) -> Result<Self, AlgebraError> {
        let n = normal.norm();
        if !((n - 1.0).abs() <= 1e-9) || !offset.is_finite() {
            return Err(AlgebraError::NonUnitAxis(n));
        }
        Ok(Self::from_parts(normal, offset))
    }

    /// Normalizes `normal` first; fails on a zero vector.
    pub fn from_normal(normal: Vector3<f64>, offset: f64) -> Result<Self, AlgebraError> {
        let n = normal.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(AlgebraError::NonUnitAxis(n));
        }
        Self::new(normal / n, offset / n)
    }

    pub fn through_point(normal: Vector3<f64>, point: &Vector3<f64>) -> Result<Self, AlgebraError> {
        let n = normal.norm();
        if !(n > 0.0) {
            return Err(AlgebraError::NonUnitAxis(n));
        }
        let unit = normal / n;
        Self::new(unit, unit.dot(point))
    }

    fn from_parts(normal: Vector3<f64>, offset: f64) -> Self {
        let ninf = Multivector::ninf();
        let ipns = Multivector::vector(normal.x, normal.y, normal.z, 0.0, 0.0) + ninf.scale(offset);
        Self {
            normal,
            offset,
            ipns,
        }
    }

    pub fn normal(&self) -> Vector3<f64> {
        self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn as_multivector(&self) -> &Multivector {
        &self.ipns
    }

    /// Signed distance computed in the algebra, `up(p)·Π`.
    pub fn signed_distance(&self, p: &Vector3<f64>) -> f64 {
        up(p).as_multivector().scalar_product(&self.ipns)
    }

    pub fn flipped(&self) -> Self {
        Self::from_parts(-self.normal, -self.offset)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embeddings() {
        assert_eq!(Multivector::from(up(&Vector3::zeros())), Multivector::no());
        let e = Multivector::e1() + Multivector::ninf().scale(0.5) + Multivector::no();
        assert_eq!(Multivector::from(up(&Vector3::new(1.0, 0.0, 0.0))), e);
        let p = up(&Vector3::new(0.3, -2.0, 7.5));
        assert!(p.as_multivector().scalar_product(p.as_multivector()).abs() < 1e-12);
    }

    #[test]
    fn point_at_infinity() {
        assert!(matches!(
            down(&Multivector::ninf()),
            Err(AlgebraError::PointAtInfinity(_))
        ));
    }

    #[test]
    fn plane_orientation() {
        let z0 = Plane::new(Vector3::z(), 0.0).unwrap();
        assert_eq!(z0.signed_distance(&Vector3::new(3.0, 4.0, 0.0)), 0.0);
        assert!(z0.signed_distance(&Vector3::new(0.0, 0.0, 1.0)) > 0.0);
        assert!(z0.signed_distance(&Vector3::new(0.0, 0.0, -1.0)) < 0.0);
        assert!(Plane::new(Vector3::new(0.0, 0.0, 2.0), 0.0).is_err());
        let p = Plane::from_normal(Vector3::new(0.0, 0.0, 2.0), 4.0).unwrap();
        assert_eq!(p.offset(), 2.0);
    }
}
