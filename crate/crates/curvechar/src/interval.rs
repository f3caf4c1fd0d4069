//! Certified interval arithmetic over exact rationals.
//!
//! Structures whose Fricke coordinates are irrational get matrix entries that
//! are algebraic of degree 4; those are enclosed in rational intervals whose
//! only inexact step is the square-root enclosure, taken at a chosen number
//! of bits.  All ring operations on intervals are exact, so a comparison is
//! either certified or reported undecided (and the caller refines).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq)]
pub struct IntervalRat {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl IntervalRat {
    pub fn point(v: BigRational) -> Self {
        IntervalRat { lo: v.clone(), hi: v }
    }

    pub fn from_int(n: i64) -> Self {
        Self::point(BigRational::from(BigInt::from(n)))
    }

    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "inverted interval");
        IntervalRat { lo, hi }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, v: &BigRational) -> bool {
        self.lo <= *v && *v <= self.hi
    }

    pub fn neg(&self) -> Self {
        IntervalRat { lo: -self.hi.clone(), hi: -self.lo.clone() }
    }

    pub fn add(&self, o: &Self) -> Self {
        IntervalRat { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let cands = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        IntervalRat {
            lo: cands.iter().min().unwrap().clone(),
            hi: cands.iter().max().unwrap().clone(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        self.mul(&IntervalRat::point(c.clone()))
    }

    /// Reciprocal; undecided (None) if the interval may contain zero.
    pub fn recip(&self) -> Option<Self> {
        if self.sign().is_none() || self.lo.is_zero() || self.hi.is_zero() {
            return None;
        }
        Some(IntervalRat {
            lo: self.hi.recip(),
            hi: self.lo.recip(),
        })
    }

    /// Certified sign: Some(-1|0|+1), or None if undecidable at this width.
    pub fn sign(&self) -> Option<i8> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(0)
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        let mid = (&self.lo + &self.hi) / BigRational::from(BigInt::from(2));
        mid.to_f64().unwrap_or(f64::NAN)
    }
}

/// Encloses √v to roughly `bits` fractional bits.  Requires the whole
/// interval nonnegative.
pub fn sqrt_enclosure(v: &IntervalRat, bits: u32) -> IntervalRat {
    assert!(!v.lo.is_negative(), "square root of a possibly negative interval");
    IntervalRat {
        lo: sqrt_lower(&v.lo, bits),
        hi: sqrt_upper(&v.hi, bits),
    }
}

fn sqrt_lower(v: &BigRational, bits: u32) -> BigRational {
    // √(p/q) = √(p·q)/q; floor(√N · 2^bits) / 2^bits underestimates.
    let scale = BigInt::one() << (2 * bits);
    let n = v.numer() * v.denom() * &scale;
    let root = n.sqrt();
    BigRational::new(root, v.denom() * (BigInt::one() << bits))
}

fn sqrt_upper(v: &BigRational, bits: u32) -> BigRational {
    let scale = BigInt::one() << (2 * bits);
    let n = v.numer() * v.denom() * &scale;
    let root = n.sqrt() + BigInt::one();
    BigRational::new(root, v.denom() * (BigInt::one() << bits))
}

/// A boundary point in projective coordinates with interval entries.
#[derive(Clone, Debug)]
pub struct ProjI {
    pub x: IntervalRat,
    pub y: IntervalRat,
}

impl ProjI {
    pub fn finite(t: IntervalRat) -> Self {
        ProjI { x: t, y: IntervalRat::from_int(1) }
    }

    pub fn infinity() -> Self {
        ProjI { x: IntervalRat::from_int(1), y: IntervalRat::from_int(0) }
    }
}

pub fn det_sign_i(p: &ProjI, q: &ProjI) -> Option<i8> {
    p.x.mul(&q.y).sub(&q.x.mul(&p.y)).sign()
}

pub fn orient_i(p: &ProjI, q: &ProjI, r: &ProjI) -> Option<i8> {
    let a = det_sign_i(p, q)?;
    let b = det_sign_i(q, r)?;
    let c = det_sign_i(r, p)?;
    Some(a * b * c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn sqrt_encloses() {
        let two = IntervalRat::from_int(2);
        let r = sqrt_enclosure(&two, 40);
        assert!(r.lo.clone() * r.lo.clone() <= rat(2, 1));
        assert!(r.hi.clone() * r.hi.clone() >= rat(2, 1));
        assert!(r.width() < rat(1, 1 << 38));
    }

    #[test]
    fn interval_ring_ops() {
        let a = IntervalRat::new(rat(1, 2), rat(2, 3));
        let b = IntervalRat::new(rat(-1, 3), rat(1, 4));
        let p = a.mul(&b);
        assert!(p.lo <= rat(-1, 6) && p.hi >= rat(1, 6));
        assert_eq!(a.sub(&a).sign(), None); // width folds in; can't certify 0
        assert_eq!(a.sign(), Some(1));
        assert_eq!(b.sign(), None);
    }

    #[test]
    fn orientation_with_intervals() {
        let pt = |n: i64| ProjI::finite(IntervalRat::from_int(n));
        assert_eq!(orient_i(&pt(0), &pt(1), &ProjI::infinity()), Some(1));
        assert_eq!(orient_i(&pt(1), &pt(0), &ProjI::infinity()), Some(-1));
    }
}
