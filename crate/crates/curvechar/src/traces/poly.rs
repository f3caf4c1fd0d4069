//! Integer-coefficient polynomials in the Fricke coordinates
//! (x, y, z) = (tr a, tr b, tr ab).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exponents of (x, y, z) in one monomial.
pub type Mono = (u32, u32, u32);

/// Monomial order used for rendering and hashing: total degree first, then
/// lexicographic with x > y > z.  Higher comes first in the rendered string.
fn mono_key(m: &Mono) -> (u32, u32, u32, u32) {
    (m.0 + m.1 + m.2, m.0, m.1, m.2)
}

/// A character of a rank-2 free group written as a polynomial in the Fricke
/// coordinates.  Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct FrickePolynomial {
    terms: BTreeMap<Mono, BigInt>,
}

impl FrickePolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: i64) -> Self {
        Self::from_terms([((0, 0, 0), BigInt::from(c))])
    }

    pub fn monomial(m: Mono, c: i64) -> Self {
        Self::from_terms([(m, BigInt::from(c))])
    }

    pub fn x() -> Self {
        Self::monomial((1, 0, 0), 1)
    }

    pub fn y() -> Self {
        Self::monomial((0, 1, 0), 1)
    }

    pub fn z() -> Self {
        Self::monomial((0, 0, 1), 1)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Mono, BigInt)>) -> Self {
        let mut map = BTreeMap::new();
        for (m, c) in terms {
            if !c.is_zero() {
                let e = map.entry(m).or_insert_with(BigInt::zero);
                *e += c;
                if e.is_zero() {
                    map.remove(&m);
                }
            }
        }
        FrickePolynomial { terms: map }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &BigInt)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.0 + m.1 + m.2).max().unwrap_or(0)
    }

    /// Evaluates at exact rational coordinates.
    pub fn eval(&self, x: &BigRational, y: &BigRational, z: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for (&(i, j, k), c) in &self.terms {
            let mut t = BigRational::from(c.clone());
            t *= pow_rat(x, i);
            t *= pow_rat(y, j);
            t *= pow_rat(z, k);
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64, y: f64, z: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(i, j, k), c)| {
                bigint_to_f64(c) * x.powi(i as i32) * y.powi(j as i32) * z.powi(k as i32)
            })
            .sum()
    }

    /// Canonical string: monomials sorted by total degree then lex x > y > z,
    /// e.g. `x^2*y - 2*z + 3`.  Used as the search bucket key.
    pub fn canonical_string(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut terms: Vec<(&Mono, &BigInt)> = self.terms.iter().collect();
        terms.sort_by(|a, b| mono_key(b.0).cmp(&mono_key(a.0)));
        let mut out = String::new();
        for (idx, (m, c)) in terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if !(abs.is_one() && **m != (0, 0, 0)) {
                factors.push(abs.to_string());
            }
            for (e, v) in [(m.0, "x"), (m.1, "y"), (m.2, "z")] {
                match e {
                    0 => {}
                    1 => factors.push(v.to_string()),
                    _ => factors.push(format!("{v}^{e}")),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

fn pow_rat(b: &BigRational, e: u32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..e {
        acc *= b;
    }
    acc
}

fn bigint_to_f64(c: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    c.to_f64().unwrap_or(f64::NAN)
}

impl Add for &FrickePolynomial {
    type Output = FrickePolynomial;
    fn add(self, rhs: &FrickePolynomial) -> FrickePolynomial {
        FrickePolynomial::from_terms(
            self.terms
                .iter()
                .chain(rhs.terms.iter())
                .map(|(m, c)| (*m, c.clone())),
        )
    }
}

impl Sub for &FrickePolynomial {
    type Output = FrickePolynomial;
    fn sub(self, rhs: &FrickePolynomial) -> FrickePolynomial {
        FrickePolynomial::from_terms(
            self.terms
                .iter()
                .map(|(m, c)| (*m, c.clone()))
                .chain(rhs.terms.iter().map(|(m, c)| (*m, -c.clone()))),
        )
    }
}

impl Neg for &FrickePolynomial {
    type Output = FrickePolynomial;
    fn neg(self) -> FrickePolynomial {
        FrickePolynomial::from_terms(self.terms.iter().map(|(m, c)| (*m, -c.clone())))
    }
}

impl Mul for &FrickePolynomial {
    type Output = FrickePolynomial;
    fn mul(self, rhs: &FrickePolynomial) -> FrickePolynomial {
        let mut terms: Vec<(Mono, BigInt)> = Vec::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                terms.push(((a.0 + b.0, a.1 + b.1, a.2 + b.2), ca * cb));
            }
        }
        FrickePolynomial::from_terms(terms)
    }
}

impl fmt::Display for FrickePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_string_format() {
        let p = &(&FrickePolynomial::monomial((2, 1, 0), 1) - &FrickePolynomial::monomial((0, 0, 1), 2))
            + &FrickePolynomial::constant(3);
        assert_eq!(p.canonical_string(), "x^2*y - 2*z + 3");
        assert_eq!(FrickePolynomial::zero().canonical_string(), "0");
        assert_eq!(FrickePolynomial::constant(-1).canonical_string(), "-1");
    }

    #[test]
    fn arithmetic_drops_zeros() {
        let x = FrickePolynomial::x();
        let d = &x - &x;
        assert!(d.is_zero());
        let p = &(&x + &FrickePolynomial::y()) * &(&x - &FrickePolynomial::y());
        assert_eq!(p.canonical_string(), "x^2 - y^2");
    }
}
