use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use super::blade::{idx, BLADE_COUNT, BLADE_GRADES, BLADE_MASKS, GP_SIGN, GP_TARGET};
use super::AlgebraError;

/// A general element of the R(4,1) geometric algebra.
///
/// Coefficients are stored densely in the canonical blade order documented
/// in [`super::blade`].
#[derive(Clone, Copy, PartialEq)]
pub struct Multivector(pub [f64; BLADE_COUNT]);

impl Default for Multivector {
    fn default() -> Self {
        Self::ZERO
    }
}

impl Multivector {
    pub const ZERO: Self = Self([0.0; BLADE_COUNT]);

    pub const ONE: Self = {
        let mut c = [0.0; BLADE_COUNT];
        c[idx::SCALAR] = 1.0;
        Self(c)
    };

    pub fn scalar(s: f64) -> Self {
        let mut m = Self::ZERO;
        m.0[idx::SCALAR] = s;
        m
    }

    /// Unit blade at canonical position `index`.
    pub fn basis(index: usize) -> Self {
        let mut m = Self::ZERO;
        m.0[index] = 1.0;
        m
    }

    pub fn e1() -> Self {
        Self::basis(idx::E1)
    }

    pub fn e2() -> Self {
        Self::basis(idx::E2)
    }

    pub fn e3() -> Self {
        Self::basis(idx::E3)
    }

    /// `e+`, squares to +1.
    pub fn ep() -> Self {
        Self::basis(idx::EP)
    }

    /// `e-`, squares to -1.
    pub fn em() -> Self {
        Self::basis(idx::EM)
    }

    /// Point at infinity `n∞ = e- + e+`.
    pub fn ninf() -> Self {
        let mut m = Self::ZERO;
        m.0[idx::EP] = 1.0;
        m.0[idx::EM] = 1.0;
        m
    }

    /// Origin `no = ½(e- − e+)`.
    pub fn no() -> Self {
        let mut m = Self::ZERO;
        m.0[idx::EP] = -0.5;
        m.0[idx::EM] = 0.5;
        m
    }

    /// Grade-1 element from Euclidean components plus `e+`/`e-` parts.
    pub fn vector(x: f64, y: f64, z: f64, ep: f64, em: f64) -> Self {
        let mut m = Self::ZERO;
        m.0[idx::E1] = x;
        m.0[idx::E2] = y;
        m.0[idx::E3] = z;
        m.0[idx::EP] = ep;
        m.0[idx::EM] = em;
        m
    }

    pub fn coefficients(&self) -> &[f64; BLADE_COUNT] {
        &self.0
    }

    pub fn scalar_part(&self) -> f64 {
        self.0[idx::SCALAR]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn geometric_product(&self, rhs: &Self) -> Self {
        let mut out = [0.0; BLADE_COUNT];
        for (i, &a) in self.0.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let signs = &GP_SIGN[i];
            let targets = &GP_TARGET[i];
            for (j, &b) in rhs.0.iter().enumerate() {
                if b == 0.0 {
                    continue;
                }
                out[targets[j] as usize] += signs[j] as f64 * a * b;
            }
        }
        Self(out)
    }

    /// Products of blade pairs selected by `keep(mask_a, mask_b)`.
    fn filtered_product(&self, rhs: &Self, keep: impl Fn(u8, u8) -> bool) -> Self {
        let mut out = [0.0; BLADE_COUNT];
        for (i, &a) in self.0.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in rhs.0.iter().enumerate() {
                if b == 0.0 || !keep(BLADE_MASKS[i], BLADE_MASKS[j]) {
                    continue;
                }
                out[GP_TARGET[i][j] as usize] += GP_SIGN[i][j] as f64 * a * b;
            }
        }
        Self(out)
    }

    pub fn outer_product(&self, rhs: &Self) -> Self {
        self.filtered_product(rhs, |a, b| a & b == 0)
    }

    /// Left contraction `a ⌋ b`: nonzero blade terms only when `a ⊆ b`.
    pub fn left_contraction(&self, rhs: &Self) -> Self {
        self.filtered_product(rhs, |a, b| a & b == a)
    }

    /// Scalar part of the geometric product, without forming the rest.
    pub fn scalar_product(&self, rhs: &Self) -> f64 {
        let mut s = 0.0;
        for i in 0..BLADE_COUNT {
            let (a, b) = (self.0[i], rhs.0[i]);
            if a != 0.0 && b != 0.0 {
                s += GP_SIGN[i][i] as f64 * a * b;
            }
        }
        s
    }

    pub fn grade_project(&self, grade: usize) -> Result<Self, AlgebraError> {
        if grade > 5 {
            return Err(AlgebraError::GradeOutOfRange(grade));
        }
        let mut out = Self::ZERO;
        for i in 0..BLADE_COUNT {
            if BLADE_GRADES[i] as usize == grade {
                out.0[i] = self.0[i];
            }
        }
        Ok(out)
    }

    /// Reversion: grade k picks up `(-1)^(k(k-1)/2)`.
    pub fn reverse(&self) -> Self {
        let mut out = self.0;
        for (i, c) in out.iter_mut().enumerate() {
            let k = BLADE_GRADES[i] as u32;
            if (k * k.saturating_sub(1) / 2) % 2 == 1 {
                *c = -*c;
            }
        }
        Self(out)
    }

    /// Grade involution: grade k picks up `(-1)^k`.
    pub fn involute(&self) -> Self {
        let mut out = self.0;
        for (i, c) in out.iter_mut().enumerate() {
            if BLADE_GRADES[i] % 2 == 1 {
                *c = -*c;
            }
        }
        Self(out)
    }

    /// True when every coefficient outside the even grades is exactly zero.
    pub fn is_even(&self) -> bool {
        (0..BLADE_COUNT).all(|i| BLADE_GRADES[i] % 2 == 0 || self.0[i] == 0.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.0;
        for c in out.iter_mut() {
            *c *= s;
        }
        Self(out)
    }

    /// Maximum coefficient difference.
    pub fn distance(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

impl Index<usize> for Multivector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Multivector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add for Multivector {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl AddAssign for Multivector {
    fn add_assign(&mut self, rhs: Self) {
        for (a, b) in self.0.iter_mut().zip(rhs.0.iter()) {
            *a += b;
        }
    }
}

impl Sub for Multivector {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(rhs.0.iter()) {
            *a -= b;
        }
        self
    }
}

impl Neg for Multivector {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl Mul for Multivector {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.geometric_product(&rhs)
    }
}

impl Mul<f64> for Multivector {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}

impl Mul<Multivector> for f64 {
    type Output = Multivector;
    fn mul(self, rhs: Multivector) -> Multivector {
        rhs.scale(self)
    }
}

impl fmt::Debug for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.0.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if i == idx::SCALAR {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*{}", super::blade::blade_name(i))?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_products() {
        let one = Multivector::ONE;
        assert_eq!(Multivector::e1() * Multivector::e1(), one);
        assert_eq!(Multivector::em() * Multivector::em(), -one);
        let e12 = Multivector::basis(idx::E12);
        assert_eq!(Multivector::e1() * Multivector::e2(), e12);
        assert_eq!(Multivector::e2() * Multivector::e1(), -e12);
    }

    #[test]
    fn outer_and_contraction() {
        let e1 = Multivector::e1();
        assert_eq!(e1.outer_product(&e1), Multivector::ZERO);
        let e12 = Multivector::e1().outer_product(&Multivector::e2());
        assert_eq!(e12, Multivector::basis(idx::E12));
        // e1 ⌋ e12 = e2
        assert_eq!(e1.left_contraction(&e12), Multivector::e2());
        // e12 ⌋ e1 = 0
        assert_eq!(e12.left_contraction(&e1), Multivector::ZERO);
    }

    #[test]
    fn reverse_and_grades() {
        let e12 = Multivector::basis(idx::E12);
        assert_eq!(e12.reverse(), -e12);
        let g = Multivector::e1() * Multivector::e2();
        assert_eq!(g.grade_project(2).unwrap(), e12);
        let s = Multivector::e1() * Multivector::e1();
        assert_eq!(s.grade_project(0).unwrap(), Multivector::ONE);
        assert!(matches!(
            s.grade_project(6),
            Err(AlgebraError::GradeOutOfRange(6))
        ));
    }

    #[test]
    fn null_basis() {
        let ninf = Multivector::ninf();
        let no = Multivector::no();
        assert_eq!(ninf * ninf, Multivector::ZERO);
        assert_eq!(no * no, Multivector::ZERO);
        assert_eq!(no.scalar_product(&ninf), -1.0);
        assert_eq!(ninf.scalar_product(&no), -1.0);
    }
}
