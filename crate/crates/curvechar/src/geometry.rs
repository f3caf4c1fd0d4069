//! Hyperbolic length functions on the cusped once-punctured-torus slice.
//!
//! A structure is a Fricke triple (x, y, z) with x, y > 2 and
//! x² + y² + z² = xyz (commutator trace −2, the cusp condition); z is the
//! larger quadratic root unless the mapping-class mirror is requested.
//! Traces of curve classes are evaluated exactly (z is at worst a quadratic
//! irrational); only the final arccosh is floating point.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::exact::QuadVal;
use crate::intersections::{self, DiscreteStructure, IntersectError};
use crate::traces::{FrickePolynomial, FrickeTable, TraceError};
use crate::words::{parse_word, CurveClass, WordError};

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("x and y must both exceed 2")]
    DomainBound,
    #[error("no real cusped structure: discriminant x²y² − 4(x² + y²) is negative")]
    NoRealStructure,
    #[error("trace is elliptic (|t| < 2): no geodesic length")]
    Elliptic,
    #[error("complex trace lies in [−2, 2]: not loxodromic")]
    NotLoxodromic,
    #[error("length must be positive")]
    NonpositiveLength,
    #[error("scan grid is empty")]
    EmptyGrid,
    #[error("scan max length must be at least 5")]
    ScanTooShort,
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Intersect(#[from] IntersectError),
}

// ---------------------------------------------------------------------------
// The Fricke/Markov slice
// ---------------------------------------------------------------------------

/// A cusped hyperbolic structure in trace coordinates
/// (x, y, z) = (tr a, tr b, tr ab) with x² + y² + z² = xyz.
#[derive(Clone, Debug, PartialEq)]
pub struct FrickeTriple {
    x: BigRational,
    y: BigRational,
    z: QuadVal,
}

impl FrickeTriple {
    pub fn x(&self) -> &BigRational {
        &self.x
    }

    pub fn y(&self) -> &BigRational {
        &self.y
    }

    pub fn z(&self) -> &QuadVal {
        &self.z
    }

    pub fn x_f64(&self) -> f64 {
        self.x.to_f64().unwrap_or(f64::NAN)
    }

    pub fn y_f64(&self) -> f64 {
        self.y.to_f64().unwrap_or(f64::NAN)
    }

    pub fn z_f64(&self) -> f64 {
        self.z.to_f64()
    }

    /// x² + y² + z² − xyz, exactly; zero for every constructed triple.
    pub fn markov_residual(&self) -> QuadVal {
        let xq = QuadVal::from_rational(self.x.clone());
        let yq = QuadVal::from_rational(self.y.clone());
        let sq = xq.square().add(&yq.square()).add(&self.z.square());
        sq.sub(&self.z.scale(&(&self.x * &self.y)))
    }
}

/// Builds the cusped structure with the given generator traces; `z` is the
/// larger root of z² − xyz + (x² + y²) = 0 unless `smaller_root` is set.
pub fn punctured_torus_structure(
    x: BigRational,
    y: BigRational,
    smaller_root: bool,
) -> Result<FrickeTriple, GeometryError> {
    let two = BigRational::from(BigInt::from(2));
    if x <= two || y <= two {
        return Err(GeometryError::DomainBound);
    }
    let xx = &x * &x;
    let yy = &y * &y;
    let disc = &xx * &yy - BigRational::from(BigInt::from(4)) * (&xx + &yy);
    if disc.is_negative() {
        return Err(GeometryError::NoRealStructure);
    }
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let center = &x * &y * &half;
    // √disc = √(num·den)/den.
    let rad = disc.numer() * disc.denom();
    let coeff = BigRational::new(BigInt::one(), disc.denom() * BigInt::from(2));
    let z = QuadVal::new(
        center,
        if smaller_root { -coeff } else { coeff },
        rad,
    );
    let triple = FrickeTriple { x, y, z };
    debug_assert_eq!(triple.markov_residual().sign(), 0);
    Ok(triple)
}

/// Evaluates a Fricke polynomial at the triple, exactly.
pub fn exact_char_value(p: &FrickePolynomial, t: &FrickeTriple) -> QuadVal {
    let mut acc = QuadVal::from_int(0);
    let mut z_pow: Vec<QuadVal> = vec![QuadVal::from_int(1)];
    for (&(i, j, k), c) in p.terms() {
        while z_pow.len() <= k as usize {
            let last = z_pow.last().unwrap().clone();
            z_pow.push(last.mul(t.z()));
        }
        let mut rat = BigRational::from(c.clone());
        for _ in 0..i {
            rat *= t.x();
        }
        for _ in 0..j {
            rat *= t.y();
        }
        acc = acc.add(&z_pow[k as usize].scale(&rat));
    }
    acc
}

/// tr ρ(c) at the structure, exactly.
pub fn exact_trace(t: &FrickeTriple, c: &CurveClass) -> Result<QuadVal, GeometryError> {
    let poly = FrickeTable::new().char_of_class(c)?;
    Ok(exact_char_value(&poly, t))
}

// ---------------------------------------------------------------------------
// Trace → length
// ---------------------------------------------------------------------------

/// ℓ = 2·arccosh(|t|/2); 0 at |t| = 2 (the parabolic convention).
pub fn real_length_from_trace(t: f64) -> Result<f64, GeometryError> {
    let h = t.abs() / 2.0;
    if h < 1.0 {
        return Err(GeometryError::Elliptic);
    }
    Ok(2.0 * h.acosh())
}

/// Real translation length of a loxodromic with complex trace t:
/// ℓ = 2·Re(arccosh(t/2)).
pub fn complex_length_from_trace(t: Complex64) -> Result<f64, GeometryError> {
    if t.im == 0.0 && t.re.abs() <= 2.0 {
        return Err(GeometryError::NotLoxodromic);
    }
    Ok(2.0 * (t / 2.0).acosh().re)
}

/// Length of one curve at one structure, with the peripheral convention.
#[derive(Clone, Debug, Serialize)]
pub struct CurveLength {
    pub trace: f64,
    pub length: f64,
    pub peripheral: bool,
}

pub fn curve_length(t: &FrickeTriple, c: &CurveClass) -> Result<CurveLength, GeometryError> {
    let tr = exact_trace(t, c)?;
    let two = QuadVal::from_int(2);
    let abs_cmp = tr.square().cmp_exact(&QuadVal::from_int(4));
    match abs_cmp {
        std::cmp::Ordering::Less => Err(GeometryError::Elliptic),
        std::cmp::Ordering::Equal => Ok(CurveLength {
            trace: tr.to_f64(),
            length: 0.0,
            peripheral: true,
        }),
        std::cmp::Ordering::Greater => {
            let _ = two;
            Ok(CurveLength {
                trace: tr.to_f64(),
                length: real_length_from_trace(tr.to_f64())?,
                peripheral: false,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Collar lemma
// ---------------------------------------------------------------------------

pub fn collar_product(l1: f64, l2: f64) -> Result<f64, GeometryError> {
    if l1 <= 0.0 || l2 <= 0.0 {
        return Err(GeometryError::NonpositiveLength);
    }
    Ok((l1 / 2.0).sinh() * (l2 / 2.0).sinh())
}

/// Strict collar inequality sinh(ℓ₁/2)·sinh(ℓ₂/2) > 1 for intersecting
/// geodesic pairs.
pub fn collar_check(l1: f64, l2: f64) -> Result<bool, GeometryError> {
    Ok(collar_product(l1, l2)? > 1.0)
}

// ---------------------------------------------------------------------------
// Pinching
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct PinchingSchedule {
    pub steps: Vec<(BigRational, BigRational)>,
    pub probes: Vec<CurveClass>,
}

impl PinchingSchedule {
    /// x_n = 2 + 4⁻ⁿ for n = 1..10, y_n the minimal admissible value
    /// (2x/√(x²−4)) scaled by 1.01, rationalized from the double value.
    pub fn reference(probes: Vec<CurveClass>) -> Self {
        let steps = (1..=10)
            .map(|n| {
                let x = BigRational::from(BigInt::from(2))
                    + BigRational::new(BigInt::one(), BigInt::from(4u64.pow(n)));
                let xf = x.to_f64().unwrap();
                let y_min = 2.0 * xf / (xf * xf - 4.0).sqrt();
                let y = BigRational::from_float(y_min * 1.01).unwrap();
                (x, y)
            })
            .collect();
        PinchingSchedule { steps, probes }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LengthRow {
    pub step: usize,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub curve: String,
    pub trace: f64,
    pub length: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LengthReport {
    pub rows: Vec<LengthRow>,
    /// ℓ of the pinched curve `a` decreases strictly across the schedule.
    pub pinched_monotone: bool,
    pub final_pinched_length: f64,
    /// Minimum observed length of each probe over all steps.
    pub probe_min: BTreeMap<String, f64>,
}

pub fn pinching_experiment(schedule: &PinchingSchedule) -> Result<LengthReport, GeometryError> {
    let pinched = parse_word("a", 2)?.canonical_class()?;
    let mut rows = Vec::new();
    let mut pinched_lengths = Vec::new();
    let mut probe_min: BTreeMap<String, f64> = BTreeMap::new();

    for (i, (x, y)) in schedule.steps.iter().enumerate() {
        let t = punctured_torus_structure(x.clone(), y.clone(), false)?;
        let mut record = |curve: &CurveClass| -> Result<f64, GeometryError> {
            let l = curve_length(&t, curve)?;
            rows.push(LengthRow {
                step: i + 1,
                x: t.x_f64(),
                y: t.y_f64(),
                z: t.z_f64(),
                curve: curve.to_string(),
                trace: l.trace,
                length: l.length,
            });
            Ok(l.length)
        };
        pinched_lengths.push(record(&pinched)?);
        for p in &schedule.probes {
            let l = record(p)?;
            probe_min
                .entry(p.to_string())
                .and_modify(|m| *m = m.min(l))
                .or_insert(l);
        }
    }

    let pinched_monotone = pinched_lengths.windows(2).all(|w| w[1] < w[0]);
    Ok(LengthReport {
        pinched_monotone,
        final_pinched_length: *pinched_lengths.last().unwrap_or(&f64::NAN),
        rows,
        probe_min,
    })
}

// ---------------------------------------------------------------------------
// Hempel scan
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct HempelScanConfig {
    pub max_len: usize,
    pub grid: Vec<(BigRational, BigRational)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HempelScan {
    /// Empirical stand-in for the uniform lower bound on non-simple lengths;
    /// reported, never asserted against a theoretical constant.
    pub observed_min: f64,
    pub witness_curve: String,
    pub witness_structure: (f64, f64),
    pub classes_measured: usize,
}

/// Minimum length over all non-simple classes of bounded length across the
/// structure grid.
pub fn hempel_scan(cfg: &HempelScanConfig) -> Result<HempelScan, GeometryError> {
    if cfg.grid.is_empty() {
        return Err(GeometryError::EmptyGrid);
    }
    if cfg.max_len < 5 {
        return Err(GeometryError::ScanTooShort);
    }
    let classes = crate::words::enumerate_classes(cfg.max_len, 2, false);
    // Simplicity is structure-independent; decide it once at the first
    // structure and measure lengths everywhere.
    let first = punctured_torus_structure(cfg.grid[0].0.clone(), cfg.grid[0].1.clone(), false)?;
    let s0 = DiscreteStructure::new(first)?;
    let non_simple: Vec<&CurveClass> = classes
        .par_iter()
        .map(|c| Ok::<_, GeometryError>((c, intersections::classify(c, &s0)?)))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .filter(|(_, kind)| *kind == intersections::CurveKind::NonSimple)
        .map(|(c, _)| c)
        .collect();

    let mut best: Option<(f64, String, (f64, f64))> = None;
    let mut measured = 0usize;
    for (x, y) in &cfg.grid {
        let t = punctured_torus_structure(x.clone(), y.clone(), false)?;
        let lengths: Vec<(f64, String)> = non_simple
            .par_iter()
            .map(|c| curve_length(&t, c).map(|l| (l.length, c.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        for (l, name) in lengths {
            measured += 1;
            let key = (l, name.clone(), (t.x_f64(), t.y_f64()));
            let better = match &best {
                None => true,
                Some((bl, bn, _)) => l < *bl || (l == *bl && name < *bn),
            };
            if better {
                best = Some(key);
            }
        }
    }
    let (observed_min, witness_curve, witness_structure) =
        best.ok_or(GeometryError::EmptyGrid)?;
    Ok(HempelScan {
        observed_min,
        witness_curve,
        witness_structure,
        classes_measured: measured,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn class(s: &str) -> CurveClass {
        parse_word(s, 2).unwrap().canonical_class().unwrap()
    }

    #[test]
    fn standard_triple() {
        let t = punctured_torus_structure(rat(3, 1), rat(3, 1), false).unwrap();
        assert_eq!(t.z_f64(), 6.0);
        assert_eq!(t.markov_residual().sign(), 0);
        let small = punctured_torus_structure(rat(3, 1), rat(3, 1), true).unwrap();
        assert_eq!(small.z_f64(), 3.0);
        assert_eq!(small.markov_residual().sign(), 0);

        assert!(matches!(
            punctured_torus_structure(rat(5, 2), rat(3, 1), false),
            Err(GeometryError::NoRealStructure)
        ));
        assert!(matches!(
            punctured_torus_structure(rat(2, 1), rat(3, 1), false),
            Err(GeometryError::DomainBound)
        ));
    }

    #[test]
    fn irrational_triple_satisfies_markov() {
        let t = punctured_torus_structure(rat(3, 1), rat(4, 1), false).unwrap();
        assert!((t.z_f64() - (6.0 + 11.0f64.sqrt())).abs() < 1e-12);
        assert_eq!(t.markov_residual().sign(), 0);
        // Commutator trace is −2 exactly, via the character.
        let comm = exact_trace(&t, &class("abAB")).unwrap();
        assert_eq!(comm.cmp_exact(&QuadVal::from_int(-2)), std::cmp::Ordering::Equal);
    }

    #[test]
    fn trace_length_relation() {
        assert_eq!(real_length_from_trace(2.0).unwrap(), 0.0);
        assert_eq!(real_length_from_trace(-2.0).unwrap(), 0.0);
        let l3 = real_length_from_trace(3.0).unwrap();
        assert!((l3 - 1.9248473002384139).abs() < 1e-12);
        assert_eq!(real_length_from_trace(-3.0).unwrap(), l3);
        assert!(real_length_from_trace(1.9).is_err());
        // Monotone in |t|.
        let mut prev = 0.0;
        for i in 0..50 {
            let t = 2.0 + 0.3 * i as f64;
            let l = real_length_from_trace(t).unwrap();
            assert!(l >= prev);
            prev = l;
        }
    }

    #[test]
    fn complex_length_consistency() {
        for t in [2.5, 3.0, 7.0, -4.0] {
            let a = real_length_from_trace(t).unwrap();
            let b = complex_length_from_trace(Complex64::new(t, 0.0)).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
        // Eigenvalue oracle: λ + λ⁻¹ = t, ℓ = 2 ln |λ| for the larger root.
        let t = Complex64::new(0.0, 2.0);
        let l = complex_length_from_trace(t).unwrap();
        let disc = (t * t - 4.0).sqrt();
        let lam = (t + disc) / 2.0;
        let lam = if lam.norm() >= 1.0 { lam } else { (t - disc) / 2.0 };
        assert!((l - 2.0 * lam.norm().ln()).abs() < 1e-12);
        assert!(l > 0.0);
        // Near-parabolic asymptotics ℓ ≈ 2√(2(t−2)) — order of magnitude.
        let small = complex_length_from_trace(Complex64::new(2.0001, 0.0)).unwrap();
        assert!(small > 0.0 && small < 0.05);
        assert!(complex_length_from_trace(Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn curve_lengths_at_standard_structure() {
        let t = punctured_torus_structure(rat(3, 1), rat(3, 1), false).unwrap();
        let la = curve_length(&t, &class("a")).unwrap();
        assert!(!la.peripheral);
        assert!((la.length - real_length_from_trace(3.0).unwrap()).abs() < 1e-12);
        let lab = curve_length(&t, &class("ab")).unwrap();
        assert!((lab.length - real_length_from_trace(6.0).unwrap()).abs() < 1e-12);
        let lk = curve_length(&t, &class("abAB")).unwrap();
        assert!(lk.peripheral);
        assert_eq!(lk.length, 0.0);
    }

    #[test]
    fn collar_values() {
        let boundary = 2.0 * 1.0f64.asinh();
        let p = collar_product(boundary, boundary).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        assert!(!collar_check(boundary, boundary).unwrap());
        // (3,3,6): ℓ_a and ℓ_b intersect once; collar holds.
        let l = real_length_from_trace(3.0).unwrap();
        assert!(collar_check(l, l).unwrap());
        assert!(collar_product(0.0, 1.0).is_err());
    }

    #[test]
    fn reference_pinching_schedule() {
        let probes = vec![class("b"), class("abaaB")];
        let schedule = PinchingSchedule::reference(probes);
        assert_eq!(schedule.steps.len(), 10);
        let report = pinching_experiment(&schedule).unwrap();
        assert!(report.pinched_monotone);
        assert!(report.final_pinched_length < 5e-3);
        // ℓ_b grows without bound as y_n → ∞; last b-length dominates.
        let b_rows: Vec<f64> = report
            .rows
            .iter()
            .filter(|r| r.curve == "b")
            .map(|r| r.length)
            .collect();
        assert!(b_rows.windows(2).all(|w| w[1] > w[0]));
        assert!(*b_rows.last().unwrap() > 10.0);
        let key = class("abaaB").to_string();
        assert!(report.probe_min[&key] > 0.0);
        assert_eq!(report.probe_min.len(), 2);
    }
}
