//! Exact arithmetic for boundary-circle computations.
//!
//! Fixed points of hyperbolic elements with rational matrix entries live in
//! real quadratic extensions Q(√d).  Interleaving decisions reduce to signs
//! of determinants whose entries mix at most two such extensions; those signs
//! are decided exactly by repeated squaring, never by floating comparison.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// a + b√d with rational a, b and integer d ≥ 0.  Invariant: d == 0 iff
/// b == 0, and d is never a perfect square.
#[derive(Clone, PartialEq, Debug)]
pub struct QuadVal {
    pub a: BigRational,
    pub b: BigRational,
    pub d: BigInt,
}

fn perfect_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

impl QuadVal {
    pub fn from_rational(a: BigRational) -> Self {
        QuadVal { a, b: BigRational::zero(), d: BigInt::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from(BigInt::from(n)))
    }

    /// a + b√d, folding perfect-square and zero radicands into the rational
    /// part.
    pub fn new(a: BigRational, b: BigRational, d: BigInt) -> Self {
        assert!(!d.is_negative(), "negative radicand");
        if b.is_zero() || d.is_zero() {
            return Self::from_rational(a);
        }
        if let Some(r) = perfect_sqrt(&d) {
            return Self::from_rational(a + b * BigRational::from(r));
        }
        QuadVal { a, b, d }
    }

    pub fn is_rational(&self) -> bool {
        self.d.is_zero()
    }

    /// Exact sign: -1, 0 or +1.
    pub fn sign(&self) -> i8 {
        let sa = rat_sign(&self.a);
        if self.b.is_zero() {
            return sa;
        }
        let sb = rat_sign(&self.b);
        if sa == 0 {
            return sb;
        }
        if sa == sb {
            return sa;
        }
        // Opposite signs: compare a² with b²·d.
        let cmp = &self.a * &self.a - &self.b * &self.b * BigRational::from(self.d.clone());
        sa * rat_sign(&cmp)
    }

    pub fn neg(&self) -> Self {
        QuadVal { a: -self.a.clone(), b: -self.b.clone(), d: self.d.clone() }
    }

    /// Sum; both operands must be rational or share the same radicand.
    pub fn add(&self, o: &Self) -> Self {
        let d = self.join_radicand(o);
        QuadVal::new(&self.a + &o.a, &self.b + &o.b, d)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let d = self.join_radicand(o);
        let rad = BigRational::from(d.clone());
        QuadVal::new(
            &self.a * &o.a + &self.b * &o.b * rad,
            &self.a * &o.b + &self.b * &o.a,
            d,
        )
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        QuadVal::new(&self.a * c, &self.b * c, self.d.clone())
    }

    fn join_radicand(&self, o: &Self) -> BigInt {
        if self.d.is_zero() {
            o.d.clone()
        } else if o.d.is_zero() || self.d == o.d {
            self.d.clone()
        } else {
            panic!("mixed radicands {} and {} in same-field arithmetic", self.d, o.d)
        }
    }

    /// Exact comparison, valid for arbitrary radicands.
    pub fn cmp_exact(&self, o: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        let s = if self.d.is_zero() || o.d.is_zero() || self.d == o.d {
            self.sub(o).sign()
        } else {
            // a1 - a2 + b1√d1 - b2√d2.
            BiQuad {
                c00: &self.a - &o.a,
                c10: self.b.clone(),
                c01: -o.b.clone(),
                c11: BigRational::zero(),
                m: self.d.clone(),
                n: o.d.clone(),
            }
            .sign()
        };
        match s {
            -1 => Less,
            0 => Equal,
            _ => Greater,
        }
    }

    pub fn to_f64(&self) -> f64 {
        rat_f64(&self.a) + rat_f64(&self.b) * bigint_f64(&self.d).sqrt()
    }
}

fn rat_sign(r: &BigRational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

fn rat_f64(r: &BigRational) -> f64 {
    bigint_f64(r.numer()) / bigint_f64(r.denom())
}

fn bigint_f64(n: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    n.to_f64().unwrap_or(f64::NAN)
}

/// c00 + c10√m + c01√n + c11√(mn), the product field of two quadratic
/// extensions.  Only its sign is ever needed.
pub struct BiQuad {
    pub c00: BigRational,
    pub c10: BigRational,
    pub c01: BigRational,
    pub c11: BigRational,
    pub m: BigInt,
    pub n: BigInt,
}

impl BiQuad {
    /// Exact sign via one level of squaring: write the value as L + √n·R
    /// with L, R ∈ Q(√m) and compare L² with n·R².
    pub fn sign(&self) -> i8 {
        let l = QuadVal::new(self.c00.clone(), self.c10.clone(), self.m.clone());
        let r = QuadVal::new(self.c01.clone(), self.c11.clone(), self.m.clone());
        let sl = l.sign();
        let sr = r.sign();
        if sr == 0 {
            return sl;
        }
        if sl == 0 || sl == sr {
            return if sl == 0 { sr } else { sl };
        }
        let delta = l.square().sub(&r.square().scale(&BigRational::from(self.n.clone())));
        sl * delta.sign()
    }
}

/// A point of the boundary circle RP¹ in projective coordinates (x : y);
/// y = 0 is the point at infinity.  Möbius transformations act linearly, so
/// there is no special case for ∞.
#[derive(Clone, Debug)]
pub struct ProjQ {
    pub x: QuadVal,
    pub y: QuadVal,
}

impl ProjQ {
    pub fn finite(t: QuadVal) -> Self {
        ProjQ { x: t, y: QuadVal::from_int(1) }
    }

    pub fn finite_rational(t: BigRational) -> Self {
        Self::finite(QuadVal::from_rational(t))
    }

    pub fn infinity() -> Self {
        ProjQ { x: QuadVal::from_int(1), y: QuadVal::from_int(0) }
    }

    pub fn is_infinite(&self) -> bool {
        self.y.sign() == 0
    }

    pub fn to_f64(&self) -> f64 {
        self.x.to_f64() / self.y.to_f64()
    }
}

/// Sign of the determinant |x₁ x₂; y₁ y₂| of two boundary points, the basic
/// projective predicate.  Handles entries from two different quadratic
/// extensions.
pub fn det_sign(p: &ProjQ, q: &ProjQ) -> i8 {
    let dp = radicand_of(p);
    let dq = radicand_of(q);
    if dp.is_zero() || dq.is_zero() || dp == dq {
        p.x.mul(&q.y).sub(&q.x.mul(&p.y)).sign()
    } else {
        // Each product (a+b√dp)(c+e√dq) contributes to all four components.
        let mut acc = BiQuad {
            c00: BigRational::zero(),
            c10: BigRational::zero(),
            c01: BigRational::zero(),
            c11: BigRational::zero(),
            m: dp.clone(),
            n: dq.clone(),
        };
        accumulate_product(&mut acc, &p.x, &q.y, false);
        accumulate_product(&mut acc, &q.x, &p.y, true);
        acc.sign()
    }
}

fn radicand_of(p: &ProjQ) -> BigInt {
    if !p.x.d.is_zero() {
        assert!(p.y.d.is_zero() || p.y.d == p.x.d, "point mixes radicands");
        p.x.d.clone()
    } else {
        p.y.d.clone()
    }
}

/// acc += ±(u·v), writing each factor as rational + (coef)√m + (coef)√n and
/// expanding; √m·√n contributes to the √(mn) component.
fn accumulate_product(acc: &mut BiQuad, u: &QuadVal, v: &QuadVal, negate: bool) {
    let sign = if negate { -BigRational::one() } else { BigRational::one() };
    let (ua, um, un) = classify(acc, u);
    let (va, vm, vn) = classify(acc, v);
    acc.c00 += &sign
        * (&ua * &va
            + &um * &vm * BigRational::from(acc.m.clone())
            + &un * &vn * BigRational::from(acc.n.clone()));
    acc.c10 += &sign * (&ua * &vm + &um * &va);
    acc.c01 += &sign * (&ua * &vn + &un * &va);
    acc.c11 += &sign * (&um * &vn + &un * &vm);
}

fn classify(acc: &BiQuad, u: &QuadVal) -> (BigRational, BigRational, BigRational) {
    if u.d.is_zero() {
        (u.a.clone(), BigRational::zero(), BigRational::zero())
    } else if u.d == acc.m {
        (u.a.clone(), u.b.clone(), BigRational::zero())
    } else if u.d == acc.n {
        (u.a.clone(), BigRational::zero(), u.b.clone())
    } else {
        panic!("radicand {} fits neither extension", u.d)
    }
}

/// Cyclic orientation of three distinct boundary points: +1 if (p, q, r) is
/// positively oriented, -1 if negatively, 0 if two coincide.
pub fn orient(p: &ProjQ, q: &ProjQ, r: &ProjQ) -> i8 {
    det_sign(p, q) * det_sign(q, r) * det_sign(r, p)
}

/// Whether chords {a1, a2} and {b1, b2} of the circle cross, i.e. the
/// endpoint pairs strictly interleave.  Returns None if any endpoints
/// coincide.
pub fn chords_cross(a1: &ProjQ, a2: &ProjQ, b1: &ProjQ, b2: &ProjQ) -> Option<bool> {
    let o1 = orient(a1, b1, a2);
    let o2 = orient(a1, b2, a2);
    if o1 == 0 || o2 == 0 {
        return None;
    }
    Some(o1 != o2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn qv(a: (i64, i64), b: (i64, i64), d: i64) -> QuadVal {
        QuadVal::new(rat(a.0, a.1), rat(b.0, b.1), BigInt::from(d))
    }

    #[test]
    fn sign_basic() {
        assert_eq!(qv((0, 1), (1, 1), 2).sign(), 1); // √2
        assert_eq!(qv((-1, 1), (1, 1), 2).sign(), 1); // √2 - 1
        assert_eq!(qv((-3, 2), (1, 1), 2).sign(), -1); // √2 - 3/2
        assert_eq!(qv((2, 1), (-1, 1), 4).sign(), 0); // 2 - √4
        assert_eq!(qv((3, 1), (-2, 1), 2).sign(), 1); // 3 - 2√2 > 0
        assert_eq!(qv((-3, 1), (2, 1), 2).sign(), -1);
    }

    #[test]
    fn cross_field_compare() {
        // √2 < √3, √2 + √3 > 3, √2 + √3 < 3.2
        let s2 = qv((0, 1), (1, 1), 2);
        let s3 = qv((0, 1), (1, 1), 3);
        assert_eq!(s2.cmp_exact(&s3), std::cmp::Ordering::Less);
        let sum = BiQuad {
            c00: -rat(3, 1),
            c10: rat(1, 1),
            c01: rat(1, 1),
            c11: rat(0, 1),
            m: BigInt::from(2),
            n: BigInt::from(3),
        };
        assert_eq!(sum.sign(), 1);
        let sum2 = BiQuad {
            c00: -rat(16, 5),
            c10: rat(1, 1),
            c01: rat(1, 1),
            c11: rat(0, 1),
            m: BigInt::from(2),
            n: BigInt::from(3),
        };
        assert_eq!(sum2.sign(), -1);
    }

    #[test]
    fn det_sign_mixed() {
        // Points √2 and √3 on the line: det((√2,1),(√3,1)) = √2 - √3 < 0.
        let p = ProjQ::finite(qv((0, 1), (1, 1), 2));
        let q = ProjQ::finite(qv((0, 1), (1, 1), 3));
        assert_eq!(det_sign(&p, &q), -1);
        assert_eq!(det_sign(&q, &p), 1);
        assert_eq!(det_sign(&p, &p), 0);
        // Against infinity: det((√2,1),(1,0)) = -1.
        assert_eq!(det_sign(&p, &ProjQ::infinity()), -1);
    }

    #[test]
    fn orientation_and_crossing() {
        let pt = |t: i64| ProjQ::finite_rational(rat(t, 1));
        // 0 → 1 → ∞ is positively oriented.
        assert_eq!(orient(&pt(0), &pt(1), &ProjQ::infinity()), 1);
        assert_eq!(orient(&pt(1), &pt(0), &ProjQ::infinity()), -1);
        assert_eq!(chords_cross(&pt(0), &pt(2), &pt(1), &pt(3)), Some(true));
        assert_eq!(chords_cross(&pt(0), &pt(1), &pt(2), &pt(3)), Some(false));
        assert_eq!(chords_cross(&pt(0), &pt(2), &pt(2), &pt(5)), None);
        // Mixed radical crossing: {-√2, √2} and {1, 3} do not cross, but
        // {-√2, √2} and {1, ∞} do... (1 < √2).
        let s2 = ProjQ::finite(qv((0, 1), (1, 1), 2));
        let ms2 = ProjQ::finite(qv((0, 1), (-1, 1), 2));
        assert_eq!(chords_cross(&ms2, &s2, &pt(2), &pt(3)), Some(false));
        assert_eq!(chords_cross(&ms2, &s2, &pt(1), &ProjQ::infinity()), Some(true));
    }
}
