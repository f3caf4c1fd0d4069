//! Self- and pairwise intersection numbers of closed geodesics.
//!
//! The self-intersection number of a class w is the number of double cosets
//! ⟨w⟩g⟨w⟩ (with g and g⁻¹ identified) whose translate g·axis(w) crosses
//! axis(w).  Rather than enumerating all g up to a length bound, the crossing
//! cosets are read off a certified ideal-quadrilateral tessellation: any
//! crossing translate shares a tessellation tile with the axis, and the tiles
//! the axis crosses repeat with period P under w, so the P² products
//! f_i·f_j⁻¹ of one period exhaust every candidate coset.  Candidates are
//! then confirmed or rejected by an exact (or certified-interval) endpoint
//! interleaving test, so the count carries no unverified numerics.

mod backend;
mod tiling;

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::exact::QuadVal;
use crate::geometry::{exact_char_value, FrickeTriple};
use crate::traces::{FrickeTable, Mat2, TraceError};
use crate::words::{CurveClass, Letter, Word, WordError};

pub use backend::BoundaryPoint;
use backend::{hyperbolic_endpoints, orient3, Kernel};
use tiling::Tiling;

#[derive(Debug, Error)]
pub enum IntersectError {
    #[error("peripheral class: the geodesic escapes into the cusp")]
    Peripheral,
    #[error("elliptic trace: no closed geodesic")]
    Elliptic,
    #[error("the two classes share an axis; crossing is undefined")]
    SharedAxis,
    #[error("axes live on different structures")]
    StructureMismatch,
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("crossing count not stable at bound {bound}")]
    Unstable { bound: usize },
    #[error("interval precision exhausted without certifying every predicate")]
    PrecisionExhausted,
    #[error("slope is only defined for simple classes")]
    NotSimple,
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Trace(#[from] TraceError),
}

/// Interval precisions tried in order before giving up.  Rational-matrix
/// structures are exact and use a single pass.
const PRECISION_LADDER: [u32; 6] = [64, 128, 256, 512, 1024, 2048];

// ---------------------------------------------------------------------------
// Structures
// ---------------------------------------------------------------------------

/// A cusped structure realized by explicit SL₂ matrices: exact integer
/// matrices for (x, y, z) = (3, 3, 6), certified-interval ζ-form matrices
/// a ↦ [[x, −1],[1, 0]], b ↦ [[0, ζ],[−ζ⁻¹, y]] otherwise.
#[derive(Clone, Debug)]
pub struct DiscreteStructure {
    triple: FrickeTriple,
    exact: Option<(Mat2<BigRational>, Mat2<BigRational>)>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}

impl DiscreteStructure {
    pub fn new(triple: FrickeTriple) -> Result<Self, IntersectError> {
        if triple.markov_residual().sign() != 0 {
            return Err(IntersectError::InvalidStructure(
                "triple is not on the cusped slice x² + y² + z² = xyz".into(),
            ));
        }
        let is_336 = *triple.x() == rat(3)
            && *triple.y() == rat(3)
            && triple.z().cmp_exact(&QuadVal::from_int(6)) == Ordering::Equal;
        let exact = if is_336 {
            let ma = Mat2::new(rat(1), rat(1), rat(1), rat(2));
            let mb = Mat2::new(rat(2), rat(1), rat(1), rat(1));
            let comm = ma
                .mul(&mb)
                .mul(&ma.inverse_sl2())
                .mul(&mb.inverse_sl2());
            debug_assert_eq!(ma.trace(), rat(3));
            debug_assert_eq!(mb.trace(), rat(3));
            debug_assert_eq!(ma.mul(&mb).trace(), rat(6));
            debug_assert_eq!(comm.trace(), rat(-2));
            Some((ma, mb))
        } else {
            None
        };
        Ok(DiscreteStructure { triple, exact })
    }

    /// The (3, 3, 6) structure with integer matrices.
    pub fn standard() -> Self {
        let triple = crate::geometry::punctured_torus_structure(rat(3), rat(3), false)
            .expect("(3,3) is in the domain");
        Self::new(triple).expect("(3,3,6) is a valid structure")
    }

    pub fn triple(&self) -> &FrickeTriple {
        &self.triple
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    fn kernel(&self, bits: u32) -> Kernel {
        match &self.exact {
            Some((ma, mb)) => Kernel::exact(ma.clone(), mb.clone()),
            None => Kernel::interval(self.triple.x(), self.triple.y(), self.triple.z(), bits),
        }
    }

    fn precisions(&self) -> &'static [u32] {
        if self.exact.is_some() {
            &PRECISION_LADDER[..1]
        } else {
            &PRECISION_LADDER
        }
    }
}

/// Certifies that the class is hyperbolic on this structure via its exact
/// trace value.
fn certify_hyperbolic(s: &DiscreteStructure, w: &Word) -> Result<(), IntersectError> {
    let poly = FrickeTable::new().char_of_word(w)?;
    let t = exact_char_value(&poly, s.triple());
    match t.square().cmp_exact(&QuadVal::from_int(4)) {
        Ordering::Less => Err(IntersectError::Elliptic),
        Ordering::Equal => Err(IntersectError::Peripheral),
        Ordering::Greater => Ok(()),
    }
}

// ---------------------------------------------------------------------------
// Axes
// ---------------------------------------------------------------------------

/// The axis of a hyperbolic class on a structure, with approximate endpoint
/// positions for display; crossing predicates recompute endpoints exactly.
#[derive(Clone)]
pub struct Axis {
    structure: DiscreteStructure,
    word: Word,
    attracting: f64,
    repelling: f64,
}

impl Axis {
    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn structure(&self) -> &DiscreteStructure {
        &self.structure
    }

    /// (attracting, repelling) endpoints as floats; ∞ maps to f64 infinity.
    pub fn endpoints_f64(&self) -> (f64, f64) {
        (self.attracting, self.repelling)
    }
}

/// Computes the axis of a hyperbolic class.
pub fn axis(s: &DiscreteStructure, c: &CurveClass) -> Result<Axis, IntersectError> {
    let w = c.word().to_word();
    axis_of_word(s, &w)
}

fn axis_of_word(s: &DiscreteStructure, w: &Word) -> Result<Axis, IntersectError> {
    certify_hyperbolic(s, w)?;
    for &bits in s.precisions() {
        let kernel = s.kernel(bits);
        let m = kernel.word_mat(w);
        if let Some((att, rep)) = hyperbolic_endpoints(&m, bits) {
            return Ok(Axis {
                structure: s.clone(),
                word: w.clone(),
                attracting: att.to_f64(),
                repelling: rep.to_f64(),
            });
        }
    }
    Err(IntersectError::PrecisionExhausted)
}

/// The primitive root of a word as a group element: u = c·t₀ᵏ·c⁻¹ gives
/// c·t₀·c⁻¹.  Two elements have the same axis iff their roots agree up to
/// inversion.
fn primitive_root(w: &Word) -> Word {
    let letters = w.letters();
    // Strip the conjugating part: matched inverse prefix/suffix pairs.
    let mut lo = 0;
    let mut hi = letters.len();
    while hi - lo >= 2 && letters[lo] == letters[hi - 1].inverse() {
        lo += 1;
        hi -= 1;
    }
    let conj = Word::new(letters[..lo].iter().copied(), w.rank());
    let core = &letters[lo..hi];
    let n = core.len();
    let mut period = n;
    'outer: for p in 1..n {
        if n % p != 0 {
            continue;
        }
        for i in 0..n {
            if core[i] != core[i % p] {
                continue 'outer;
            }
        }
        period = p;
        break;
    }
    let root = Word::new(core[..period].iter().copied(), w.rank());
    conj.concat(&root).concat(&conj.invert())
}

/// Whether two axes on the same structure cross transversally.
pub fn axes_cross(a: &Axis, b: &Axis) -> Result<bool, IntersectError> {
    if a.structure.triple != b.structure.triple {
        return Err(IntersectError::StructureMismatch);
    }
    let ra = primitive_root(&a.word);
    let rb = primitive_root(&b.word);
    if ra == rb || ra == rb.invert() {
        return Err(IntersectError::SharedAxis);
    }
    let s = &a.structure;
    for &bits in s.precisions() {
        let kernel = s.kernel(bits);
        let Some((pa, qa)) = hyperbolic_endpoints(&kernel.word_mat(&a.word), bits) else {
            continue;
        };
        let Some((pb, qb)) = hyperbolic_endpoints(&kernel.word_mat(&b.word), bits) else {
            continue;
        };
        let Some(o1) = orient3(&pa, &pb, &qa) else {
            continue;
        };
        let Some(o2) = orient3(&pa, &qb, &qa) else {
            continue;
        };
        if o1 == 0 || o2 == 0 {
            // Distinct axes in a free discrete group never share an endpoint.
            continue;
        }
        return Ok(o1 != o2);
    }
    Err(IntersectError::PrecisionExhausted)
}

// ---------------------------------------------------------------------------
// Double-coset canonical forms
// ---------------------------------------------------------------------------

fn word_order(a: &Word, b: &Word) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| {
        a.letters()
            .iter()
            .map(|l| l.order_key())
            .cmp(b.letters().iter().map(|l| l.order_key()))
    })
}

/// Minimal representative of the double coset ⟨left⟩·g·⟨right⟩ under the
/// (length, letter-order) well-ordering: coordinate descent to a local
/// length minimum, then an exhaustive window wide enough to contain every
/// global minimum.
fn coset_min(left: &Word, g: &Word, right: &Word) -> Word {
    let mut cur = g.clone();
    loop {
        let mut best = cur.clone();
        for cand in [
            left.concat(&cur),
            left.invert().concat(&cur),
            cur.concat(right),
            cur.concat(&right.invert()),
        ] {
            if cand.len() < best.len() {
                best = cand;
            }
        }
        if best.len() == cur.len() {
            break;
        }
        cur = best;
    }
    let unit = left.len().min(right.len()).max(1);
    let r = (2 * cur.len() / unit + 6) as i64;
    let mut best = cur.clone();
    for i in -r..=r {
        let li = left.pow(i).concat(&cur);
        for j in -r..=r {
            let cand = li.concat(&right.pow(j));
            if word_order(&cand, &best) == Ordering::Less {
                best = cand;
            }
        }
    }
    best
}

/// Canonical key of ⟨left⟩·g·⟨right⟩; with `with_inverse`, the coset of g⁻¹
/// is identified as well (the self-intersection convention).
fn double_coset_key(left: &Word, g: &Word, right: &Word, with_inverse: bool) -> Word {
    let k1 = coset_min(left, g, right);
    if !with_inverse {
        return k1;
    }
    let k2 = coset_min(left, &g.invert(), right);
    if word_order(&k2, &k1) == Ordering::Less {
        k2
    } else {
        k1
    }
}

// ---------------------------------------------------------------------------
// Crossing enumeration
// ---------------------------------------------------------------------------

/// A verified crossing count together with the enumeration bound at which it
/// was certified stable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossingCount {
    pub count: usize,
    pub bound: usize,
    pub stable: bool,
}

/// All crossing double cosets ⟨w⟩g⟨w⟩ of the axis of w, as canonical keys,
/// at one precision.  `Ok(None)` requests a precision escalation.
fn self_crossing_keys(
    s: &DiscreteStructure,
    w: &Word,
    bits: u32,
) -> Result<Option<BTreeMap<Vec<Letter>, Word>>, IntersectError> {
    let kernel = s.kernel(bits);
    let Some(tiling) = Tiling::build(&kernel)? else {
        return Ok(None);
    };
    let m = kernel.word_mat(w);
    let Some((q, p)) = hyperbolic_endpoints(&m, bits) else {
        return Ok(None);
    };
    let Some(f0) = tiling.locate(&p, &q) else {
        return Ok(None);
    };
    let Some(period) = tiling.axis_tiles(f0, &q, w) else {
        return Ok(None);
    };

    let mut seen: BTreeMap<Vec<Letter>, ()> = BTreeMap::new();
    let mut keys: BTreeMap<Vec<Letter>, Word> = BTreeMap::new();
    let w_inv = w.invert();
    for ti in &period {
        for tj in &period {
            let g = ti.word.concat(&tj.word.invert());
            if g.is_empty() || seen.insert(g.letters().to_vec(), ()).is_some() {
                continue;
            }
            // Same-axis translates (g in ⟨w⟩, or conjugating w to w or w⁻¹)
            // never count as crossings.
            let conj = g.invert().concat(w).concat(&g);
            if conj == *w || conj == w_inv {
                continue;
            }
            let gm = kernel.word_mat(&g);
            let gp = gm.apply(&p);
            let gq = gm.apply(&q);
            let Some(o1) = orient3(&p, &gp, &q) else {
                return Ok(None);
            };
            let Some(o2) = orient3(&p, &gq, &q) else {
                return Ok(None);
            };
            if o1 == 0 || o2 == 0 {
                // Distinct axes cannot share an endpoint; an exact zero here
                // would contradict the same-axis filter above.
                return Ok(None);
            }
            if o1 != o2 {
                let key = double_coset_key(w, &g, w, true);
                keys.entry(key.letters().to_vec()).or_insert(key);
            }
        }
    }
    Ok(Some(keys))
}

/// Converts a complete key set into the bounded-enumeration count contract:
/// the count at the smallest bound B ≥ len + 6 with count(B) = count(B + 2),
/// capped at len + 14.
fn stabilized_count(
    keys: &BTreeMap<Vec<Letter>, Word>,
    class_len: usize,
) -> Result<CrossingCount, IntersectError> {
    let max_key = keys.keys().map(|k| k.len()).max().unwrap_or(0);
    let floor = class_len + 6;
    let cap = class_len + 14;
    let bound = floor.max(max_key);
    if bound > cap {
        return Err(IntersectError::Unstable { bound: cap });
    }
    Ok(CrossingCount {
        count: keys.len(),
        bound,
        stable: true,
    })
}

/// Self-intersection number of a class on a structure.
pub fn self_intersection(
    c: &CurveClass,
    s: &DiscreteStructure,
) -> Result<CrossingCount, IntersectError> {
    let w = c.word().to_word();
    certify_hyperbolic(s, &w)?;
    for &bits in s.precisions() {
        if let Some(keys) = self_crossing_keys(s, &w, bits)? {
            return stabilized_count(&keys, c.len());
        }
    }
    Err(IntersectError::PrecisionExhausted)
}

/// Whether the class is a simple closed curve on the surface.  Simplicity is
/// a topological property: the answer is independent of the structure.
pub fn is_simple(c: &CurveClass, s: &DiscreteStructure) -> Result<bool, IntersectError> {
    Ok(self_intersection(c, s)?.count == 0)
}

/// Topological type of a class, with peripheral classes (powers of the
/// commutator's conjugates) folded in rather than reported as errors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveKind {
    Simple,
    NonSimple,
    Peripheral,
}

pub fn classify(c: &CurveClass, s: &DiscreteStructure) -> Result<CurveKind, IntersectError> {
    match self_intersection(c, s) {
        Ok(r) if r.count == 0 => Ok(CurveKind::Simple),
        Ok(_) => Ok(CurveKind::NonSimple),
        Err(IntersectError::Peripheral) => Ok(CurveKind::Peripheral),
        Err(e) => Err(e),
    }
}

/// Geometric intersection number of two distinct classes.
pub fn pairwise_intersection(
    u: &CurveClass,
    v: &CurveClass,
    s: &DiscreteStructure,
) -> Result<CrossingCount, IntersectError> {
    if u == v {
        return Err(IntersectError::SharedAxis);
    }
    let wu = u.word().to_word();
    let wv = v.word().to_word();
    certify_hyperbolic(s, &wu)?;
    certify_hyperbolic(s, &wv)?;
    for &bits in s.precisions() {
        match pairwise_keys(s, &wu, &wv, bits)? {
            Some(keys) => {
                let max_key = keys.keys().map(|k| k.len()).max().unwrap_or(0);
                return Ok(CrossingCount {
                    count: keys.len(),
                    bound: max_key,
                    stable: true,
                });
            }
            None => continue,
        }
    }
    Err(IntersectError::PrecisionExhausted)
}

fn pairwise_keys(
    s: &DiscreteStructure,
    wu: &Word,
    wv: &Word,
    bits: u32,
) -> Result<Option<BTreeMap<Vec<Letter>, Word>>, IntersectError> {
    let kernel = s.kernel(bits);
    let Some(tiling) = Tiling::build(&kernel)? else {
        return Ok(None);
    };
    let Some((qu, pu)) = hyperbolic_endpoints(&kernel.word_mat(wu), bits) else {
        return Ok(None);
    };
    let Some((qv, pv)) = hyperbolic_endpoints(&kernel.word_mat(wv), bits) else {
        return Ok(None);
    };
    let Some(f0u) = tiling.locate(&pu, &qu) else {
        return Ok(None);
    };
    let Some(period_u) = tiling.axis_tiles(f0u, &qu, wu) else {
        return Ok(None);
    };
    let Some(f0v) = tiling.locate(&pv, &qv) else {
        return Ok(None);
    };
    let Some(period_v) = tiling.axis_tiles(f0v, &qv, wv) else {
        return Ok(None);
    };

    let ru = primitive_root(wu);
    let mut seen: BTreeMap<Vec<Letter>, ()> = BTreeMap::new();
    let mut keys: BTreeMap<Vec<Letter>, Word> = BTreeMap::new();
    for ti in &period_u {
        for tj in &period_v {
            let g = ti.word.concat(&tj.word.invert());
            if seen.insert(g.letters().to_vec(), ()).is_some() {
                continue;
            }
            // Distinct classes can still share an axis through a conjugating
            // translate; skip those.
            let root_conj = primitive_root(&g.concat(wv).concat(&g.invert()));
            if root_conj == ru || root_conj == ru.invert() {
                continue;
            }
            let gm = kernel.word_mat(&g);
            let gp = gm.apply(&pv);
            let gq = gm.apply(&qv);
            let Some(o1) = orient3(&pu, &gp, &qu) else {
                return Ok(None);
            };
            let Some(o2) = orient3(&pu, &gq, &qu) else {
                return Ok(None);
            };
            if o1 == 0 || o2 == 0 {
                return Ok(None);
            }
            if o1 != o2 {
                let key = double_coset_key(wu, &g, wv, false);
                keys.entry(key.letters().to_vec()).or_insert(key);
            }
        }
    }
    Ok(Some(keys))
}

// ---------------------------------------------------------------------------
// Slopes of simple classes
// ---------------------------------------------------------------------------

/// The slope (p, q) of a simple class: its primitive homology class, with
/// sign normalized so p > 0, or p = 0 and q > 0.  The structure is only used
/// to certify simplicity.
pub fn slope(c: &CurveClass, s: &DiscreteStructure) -> Result<(i64, i64), IntersectError> {
    if !is_simple(c, s)? {
        return Err(IntersectError::NotSimple);
    }
    let mut p: i64 = 0;
    let mut q: i64 = 0;
    for &l in c.word().letters() {
        let delta = if l.is_inverse() { -1 } else { 1 };
        if l.generator() == 0 {
            p += delta;
        } else {
            q += delta;
        }
    }
    if p == 0 && q == 0 {
        // A simple class with trivial homology is peripheral, which
        // certify_hyperbolic inside is_simple has already rejected.
        return Err(IntersectError::Peripheral);
    }
    debug_assert_eq!(p.unsigned_abs().gcd(&q.unsigned_abs()), 1);
    if p < 0 || (p == 0 && q < 0) {
        p = -p;
        q = -q;
    }
    Ok((p, q))
}

/// Intersection number |ps − qr| of two slopes on the torus.
pub fn slope_intersection(a: (i64, i64), b: (i64, i64)) -> u64 {
    (a.0 * b.1 - a.1 * b.0).unsigned_abs()
}

// ---------------------------------------------------------------------------
// Brute-force oracle
// ---------------------------------------------------------------------------

/// Counts crossing double cosets by enumerating every reduced g up to
/// `max_len` — exponential, for cross-checking the tessellation enumeration
/// on small inputs only.
pub fn self_intersection_brute(
    c: &CurveClass,
    s: &DiscreteStructure,
    max_len: usize,
) -> Result<usize, IntersectError> {
    let w = c.word().to_word();
    certify_hyperbolic(s, &w)?;
    let w_inv = w.invert();
    for &bits in s.precisions() {
        let kernel = s.kernel(bits);
        let Some((q, p)) = hyperbolic_endpoints(&kernel.word_mat(&w), bits) else {
            continue;
        };
        let mut keys: BTreeMap<Vec<Letter>, ()> = BTreeMap::new();
        let mut undecided = false;
        let letters: Vec<Letter> = (0..2)
            .flat_map(|g| [Letter::new(g, false), Letter::new(g, true)])
            .collect();
        let mut stack: Vec<Vec<Letter>> = letters.iter().map(|&l| vec![l]).collect();
        while let Some(g_letters) = stack.pop() {
            let g = Word::new(g_letters.iter().copied(), 2);
            let conj = g.invert().concat(&w).concat(&g);
            if conj != w && conj != w_inv {
                let gm = kernel.word_mat(&g);
                let gp = gm.apply(&p);
                let gq = gm.apply(&q);
                match (orient3(&p, &gp, &q), orient3(&p, &gq, &q)) {
                    (Some(o1), Some(o2)) if o1 != 0 && o2 != 0 => {
                        if o1 != o2 {
                            let key = double_coset_key(&w, &g, &w, true);
                            keys.insert(key.letters().to_vec(), ());
                        }
                    }
                    _ => {
                        undecided = true;
                        break;
                    }
                }
            }
            if g_letters.len() < max_len {
                let last = *g_letters.last().expect("nonempty");
                for &l in &letters {
                    if l != last.inverse() {
                        let mut next = g_letters.clone();
                        next.push(l);
                        stack.push(next);
                    }
                }
            }
        }
        if undecided {
            continue;
        }
        return Ok(keys.len());
    }
    Err(IntersectError::PrecisionExhausted)
}

#[cfg(test)]
mod tests;
