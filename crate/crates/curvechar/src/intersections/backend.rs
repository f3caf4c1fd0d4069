//! Arithmetic backends for boundary-circle geometry.
//!
//! Rational-entry structures get exact quadratic-irrational endpoints; the
//! ζ-form structures (irrational z) get certified rational intervals at a
//! caller-chosen precision.  Every predicate either certifies its answer or
//! returns `None`, upon which the caller re-runs everything at higher
//! precision.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::exact::{orient, ProjQ, QuadVal};
use crate::interval::{orient_i, sqrt_enclosure, IntervalRat, ProjI};
use crate::traces::{fixed_points_exact, FixedPointsQ, Mat2};
use crate::words::{Letter, Word};

/// An endpoint on the boundary circle: exact quadratic irrational or a
/// certified interval enclosure.
#[derive(Clone, Debug)]
pub enum BoundaryPoint {
    Exact(ProjQ),
    Certified(ProjI),
}

impl BoundaryPoint {
    pub fn to_f64(&self) -> f64 {
        match self {
            BoundaryPoint::Exact(p) => p.to_f64(),
            BoundaryPoint::Certified(p) => {
                if p.y.sign() == Some(0) {
                    f64::INFINITY
                } else {
                    p.x.to_f64() / p.y.to_f64()
                }
            }
        }
    }
}

/// Orientation of three pairwise-distinct boundary points: +1 ccw, −1 cw;
/// `None` if the intervals are too wide to certify.
pub(crate) fn orient3(p: &BoundaryPoint, q: &BoundaryPoint, r: &BoundaryPoint) -> Option<i8> {
    match (p, q, r) {
        (BoundaryPoint::Exact(a), BoundaryPoint::Exact(b), BoundaryPoint::Exact(c)) => {
            Some(orient(a, b, c))
        }
        (BoundaryPoint::Certified(a), BoundaryPoint::Certified(b), BoundaryPoint::Certified(c)) => {
            orient_i(a, b, c)
        }
        _ => panic!("mixed arithmetic backends"),
    }
}

#[derive(Clone, Debug)]
pub(crate) struct IMat {
    pub p: IntervalRat,
    pub q: IntervalRat,
    pub r: IntervalRat,
    pub s: IntervalRat,
}

impl IMat {
    fn mul(&self, o: &IMat) -> IMat {
        IMat {
            p: self.p.mul(&o.p).add(&self.q.mul(&o.r)),
            q: self.p.mul(&o.q).add(&self.q.mul(&o.s)),
            r: self.r.mul(&o.p).add(&self.s.mul(&o.r)),
            s: self.r.mul(&o.q).add(&self.s.mul(&o.s)),
        }
    }

    /// Adjugate = inverse, because the enclosed matrix has determinant 1.
    fn inverse(&self) -> IMat {
        IMat {
            p: self.s.clone(),
            q: self.q.neg(),
            r: self.r.neg(),
            s: self.p.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) enum GMat {
    Q(Mat2<BigRational>),
    I(IMat),
}

impl GMat {
    pub fn mul(&self, o: &GMat) -> GMat {
        match (self, o) {
            (GMat::Q(a), GMat::Q(b)) => GMat::Q(a.mul(b)),
            (GMat::I(a), GMat::I(b)) => GMat::I(a.mul(b)),
            _ => panic!("mixed arithmetic backends"),
        }
    }

    pub fn apply(&self, pt: &BoundaryPoint) -> BoundaryPoint {
        match (self, pt) {
            (GMat::Q(m), BoundaryPoint::Exact(p)) => {
                let x = p.x.scale(&m.p).add(&p.y.scale(&m.q));
                let y = p.x.scale(&m.r).add(&p.y.scale(&m.s));
                BoundaryPoint::Exact(ProjQ { x, y })
            }
            (GMat::I(m), BoundaryPoint::Certified(p)) => BoundaryPoint::Certified(ProjI {
                x: p.x.mul(&m.p).add(&p.y.mul(&m.q)),
                y: p.x.mul(&m.r).add(&p.y.mul(&m.s)),
            }),
            _ => panic!("mixed arithmetic backends"),
        }
    }
}

/// Encloses a quadratic irrational in a rational interval.
pub(crate) fn quad_to_interval(v: &QuadVal, bits: u32) -> IntervalRat {
    let a = IntervalRat::point(v.a.clone());
    if v.b.is_zero() {
        return a;
    }
    let root = sqrt_enclosure(&IntervalRat::point(BigRational::from(v.d.clone())), bits);
    a.add(&root.scale(&v.b))
}

/// Generator matrices (a, a⁻¹, b, b⁻¹ in letter order) at one precision.
pub(crate) struct Kernel {
    gens: [GMat; 4],
}

impl Kernel {
    pub fn exact(ma: Mat2<BigRational>, mb: Mat2<BigRational>) -> Kernel {
        Kernel {
            gens: [
                GMat::Q(ma.clone()),
                GMat::Q(ma.inverse_sl2()),
                GMat::Q(mb.clone()),
                GMat::Q(mb.inverse_sl2()),
            ],
        }
    }

    /// The ζ-form realization a ↦ [[x, −1],[1, 0]], b ↦ [[0, ζ],[−ζ⁻¹, y]]
    /// with ζ = (z + √(z² − 4))/2, enclosed at the given precision.
    pub fn interval(x: &BigRational, y: &BigRational, z: &QuadVal, bits: u32) -> Kernel {
        let z_iv = quad_to_interval(z, bits);
        let z2m4 = z.square().sub(&QuadVal::from_int(4));
        // Enclose √(z² − 4) through the exact quadratic value of z² − 4.
        let inner = quad_to_interval(&z2m4, bits + 16);
        let root = sqrt_enclosure(&inner, bits);
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let zeta = z_iv.add(&root).scale(&half);
        let zeta_inv = z_iv.sub(&root).scale(&half);
        let c = |v: &BigRational| IntervalRat::point(v.clone());
        let ma = IMat {
            p: c(x),
            q: c(&-BigRational::one()),
            r: c(&BigRational::one()),
            s: c(&BigRational::zero()),
        };
        let mb = IMat {
            p: c(&BigRational::zero()),
            q: zeta,
            r: zeta_inv.neg(),
            s: c(y),
        };
        Kernel {
            gens: [
                GMat::I(ma.clone()),
                GMat::I(ma.inverse()),
                GMat::I(mb.clone()),
                GMat::I(mb.inverse()),
            ],
        }
    }

    pub fn letter_mat(&self, l: Letter) -> &GMat {
        &self.gens[l.order_key() as usize]
    }

    pub fn identity(&self) -> GMat {
        match &self.gens[0] {
            GMat::Q(_) => GMat::Q(Mat2::identity()),
            GMat::I(_) => {
                let one = IntervalRat::point(BigRational::one());
                let zero = IntervalRat::point(BigRational::zero());
                GMat::I(IMat {
                    p: one.clone(),
                    q: zero.clone(),
                    r: zero,
                    s: one,
                })
            }
        }
    }

    pub fn word_mat(&self, w: &Word) -> GMat {
        let mut acc = self.identity();
        for &l in w.letters() {
            acc = acc.mul(self.letter_mat(l));
        }
        acc
    }
}

/// Fixed point of a parabolic with known eigenvalue (±1): a nonzero kernel
/// vector of M − λ, namely (q, λ − p) or (λ − s, r).
pub(crate) fn parabolic_fix(m: &GMat, lambda: &BigRational) -> Option<BoundaryPoint> {
    match m {
        GMat::Q(m) => {
            let v1 = (m.q.clone(), lambda - &m.p);
            let v = if v1.0.is_zero() && v1.1.is_zero() {
                (lambda - &m.s, m.r.clone())
            } else {
                v1
            };
            Some(BoundaryPoint::Exact(ProjQ {
                x: QuadVal::from_rational(v.0),
                y: QuadVal::from_rational(v.1),
            }))
        }
        GMat::I(m) => {
            let lam = IntervalRat::point(lambda.clone());
            for v in [
                (m.q.clone(), lam.sub(&m.p)),
                (lam.sub(&m.s), m.r.clone()),
            ] {
                if v.0.sign().is_some_and(|s| s != 0) || v.1.sign().is_some_and(|s| s != 0) {
                    return Some(BoundaryPoint::Certified(ProjI { x: v.0, y: v.1 }));
                }
            }
            None
        }
    }
}

/// Axis endpoints of a hyperbolic matrix, attracting first.  The caller has
/// already certified |tr| > 2 exactly.
pub(crate) fn hyperbolic_endpoints(
    m: &GMat,
    bits: u32,
) -> Option<(BoundaryPoint, BoundaryPoint)> {
    match m {
        GMat::Q(m) => {
            let fp = fixed_points_exact(m).ok()?;
            let FixedPointsQ::Two(p1, p2) = fp else {
                return None;
            };
            // Eigenvalue at a fixed point (x : y) is (r·x + s·y)/y for finite
            // points and p at ∞; attracting means eigenvalue² > 1.
            let attracting_first = {
                let eig_sq_minus_one = |pt: &ProjQ| -> std::cmp::Ordering {
                    if pt.is_infinite() {
                        let e = QuadVal::from_rational(m.p.clone());
                        e.square().cmp_exact(&QuadVal::from_int(1))
                    } else {
                        // y = 1 for finite points produced by fixed_points_exact
                        let e = pt.x.scale(&m.r).add(&QuadVal::from_rational(m.s.clone()));
                        e.square().cmp_exact(&QuadVal::from_int(1))
                    }
                };
                eig_sq_minus_one(&p1) == std::cmp::Ordering::Greater
            };
            let (a, r) = if attracting_first { (p1, p2) } else { (p2, p1) };
            Some((BoundaryPoint::Exact(a), BoundaryPoint::Exact(r)))
        }
        GMat::I(m) => {
            let tr = m.p.add(&m.s);
            let disc = tr.mul(&tr).sub(&IntervalRat::from_int(4));
            if disc.sign() != Some(1) {
                return None;
            }
            let root = sqrt_enclosure(&disc, bits);
            let half = BigRational::new(BigInt::one(), BigInt::from(2));
            let lam_plus = tr.add(&root).scale(&half);
            let lam_minus = tr.sub(&root).scale(&half);
            // tr > 2 ⟹ λ₊ attracting; tr < −2 ⟹ λ₋ attracting.
            let tr_sign = tr.sign()?;
            let (lam_att, lam_rep) = if tr_sign > 0 {
                (lam_plus, lam_minus)
            } else {
                (lam_minus, lam_plus)
            };
            let eigenvector = |lam: &IntervalRat| -> Option<ProjI> {
                for v in [
                    (m.q.clone(), lam.sub(&m.p)),
                    (lam.sub(&m.s), m.r.clone()),
                ] {
                    if v.0.sign().is_some_and(|s| s != 0) || v.1.sign().is_some_and(|s| s != 0) {
                        return Some(ProjI { x: v.0, y: v.1 });
                    }
                }
                None
            };
            let att = eigenvector(&lam_att)?;
            let rep = eigenvector(&lam_rep)?;
            Some((BoundaryPoint::Certified(att), BoundaryPoint::Certified(rep)))
        }
    }
}
