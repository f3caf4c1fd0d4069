//! Determinant-1 2×2 matrices over a closed set of scalar kinds, and
//! generator→matrix assignments.
//!
//! Scalar kinds are distinct Rust types (exact rational, complex double,
//! rational function of T); mixing kinds is a type error rather than a
//! runtime coercion.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::ops::{Add, Mul, Neg, Sub};

use crate::words::{Letter, Word};

/// Scalar kinds admissible as matrix entries.
pub trait Scalar:
    Clone
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
}

impl Scalar for BigRational {}
impl Scalar for Complex64 {}
impl Scalar for RatPoly {}

/// A 2×2 matrix [[p, q], [r, s]].
#[derive(Clone, PartialEq, Debug)]
pub struct Mat2<S: Scalar> {
    pub p: S,
    pub q: S,
    pub r: S,
    pub s: S,
}

impl<S: Scalar> Mat2<S> {
    pub fn new(p: S, q: S, r: S, s: S) -> Self {
        Mat2 { p, q, r, s }
    }

    pub fn identity() -> Self {
        Mat2::new(S::one(), S::zero(), S::zero(), S::one())
    }

    pub fn det(&self) -> S {
        self.p.clone() * self.s.clone() - self.q.clone() * self.r.clone()
    }

    pub fn trace(&self) -> S {
        self.p.clone() + self.s.clone()
    }

    /// Inverse of a determinant-1 matrix, via the adjugate.
    pub fn inverse_sl2(&self) -> Self {
        Mat2::new(
            self.s.clone(),
            -self.q.clone(),
            -self.r.clone(),
            self.p.clone(),
        )
    }

    pub fn mul(&self, o: &Self) -> Self {
        Mat2::new(
            self.p.clone() * o.p.clone() + self.q.clone() * o.r.clone(),
            self.p.clone() * o.q.clone() + self.q.clone() * o.s.clone(),
            self.r.clone() * o.p.clone() + self.s.clone() * o.r.clone(),
            self.r.clone() * o.q.clone() + self.s.clone() * o.s.clone(),
        )
    }

    pub fn is_sl2(&self) -> bool {
        self.det() == S::one()
    }
}

/// A generator→matrix assignment for a free group of the given rank.
#[derive(Clone, Debug)]
pub struct Representation<S: Scalar> {
    mats: Vec<Mat2<S>>,
}

impl<S: Scalar> Representation<S> {
    pub fn new(mats: Vec<Mat2<S>>) -> Self {
        Representation { mats }
    }

    pub fn rank(&self) -> usize {
        self.mats.len()
    }

    pub fn generator(&self, index: usize) -> &Mat2<S> {
        &self.mats[index]
    }

    pub fn apply_letter(&self, l: Letter) -> Mat2<S> {
        let m = &self.mats[l.generator()];
        if l.is_inverse() {
            m.inverse_sl2()
        } else {
            m.clone()
        }
    }

    pub fn evaluate(&self, w: &Word) -> Mat2<S> {
        let mut acc = Mat2::identity();
        for &l in w.letters() {
            acc = acc.mul(&self.apply_letter(l));
        }
        acc
    }

    pub fn conjugated(&self, g: &Mat2<S>) -> Representation<S> {
        let gi = g.inverse_sl2();
        Representation {
            mats: self.mats.iter().map(|m| g.mul(m).mul(&gi)).collect(),
        }
    }
}

/// A polynomial in the Horowitz family parameter T with exact rational
/// coefficients, dense from degree 0 upward.
#[derive(Clone, PartialEq, Debug)]
pub struct RatPoly {
    coeffs: Vec<BigRational>,
}

impl RatPoly {
    pub fn from_coeffs(coeffs: Vec<BigRational>) -> Self {
        let mut p = RatPoly { coeffs };
        p.trim();
        p
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The indeterminate T.
    pub fn t() -> Self {
        Self::from_coeffs(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }
}

impl Zero for RatPoly {
    fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for RatPoly {
    fn one() -> Self {
        RatPoly::constant(BigRational::one())
    }
}

impl Add for RatPoly {
    type Output = RatPoly;
    fn add(self, rhs: RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect();
        RatPoly::from_coeffs(coeffs)
    }
}

impl Sub for RatPoly {
    type Output = RatPoly;
    fn sub(self, rhs: RatPoly) -> RatPoly {
        self + (-rhs)
    }
}

impl Neg for RatPoly {
    type Output = RatPoly;
    fn neg(self) -> RatPoly {
        RatPoly::from_coeffs(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl Mul for RatPoly {
    type Output = RatPoly;
    fn mul(self, rhs: RatPoly) -> RatPoly {
        if self.is_zero() || rhs.is_zero() {
            return RatPoly::zero();
        }
        let mut coeffs = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        RatPoly::from_coeffs(coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn sl2_inverse_is_inverse() {
        let m = Mat2::new(q(2, 1), q(3, 1), q(1, 1), q(2, 1)); // det 1
        assert!(m.is_sl2());
        assert_eq!(m.mul(&m.inverse_sl2()), Mat2::identity());
    }

    #[test]
    fn ratpoly_arithmetic() {
        let t = RatPoly::t();
        let p = t.clone() * t.clone() + RatPoly::constant(q(1, 2));
        assert_eq!(p.degree(), Some(2));
        assert_eq!(p.coeff(0), q(1, 2));
        assert_eq!(p.coeff(2), q(1, 1));
        let z = p.clone() - p;
        assert!(z.is_zero());
    }
}
