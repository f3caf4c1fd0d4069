//! Exhaustive search for distinct curve classes sharing a Fricke character.
//!
//! Every class up to a length bound is bucketed by the canonical string of
//! its exact character polynomial, so two classes land in the same bucket iff
//! their characters are identical as polynomials.  Multi-member buckets are
//! the interesting output; the filters below check them against the
//! structural predictions (reversal pairs, Ginzburg–Rudnick non-singularity,
//! singleton buckets for a^m b^n and for simple classes).

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::intersections::{self, DiscreteStructure, IntersectError};
use crate::traces::{FrickeTable, TraceError};
use crate::words::{enumerate_classes, parse_word, CurveClass, WordError};

#[derive(Debug, Error)]
pub enum ExplorerError {
    #[error("search length bound must be at least 2")]
    MaxLenTooSmall,
    #[error("exact bucketing requires rank 2")]
    RankNotTwo,
    #[error("vector entry {0} at position {1} is zero")]
    ZeroEntry(i64, usize),
    #[error("vector has {0} entries; the exhaustive subset check allows at most 20")]
    TooLong(usize),
    #[error("(m, n) = (0, 0) names no curve")]
    ZeroExponents,
    #[error("|m| + |n| = {0} exceeds the search bound {1}")]
    TargetTooLong(usize, usize),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Intersect(#[from] IntersectError),
}

// ---------------------------------------------------------------------------
// Ginzburg–Rudnick non-singularity
// ---------------------------------------------------------------------------

/// A vector of nonzero integer exponents (r₁, …, r_p).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GRVector {
    entries: Vec<i64>,
}

impl GRVector {
    pub fn new(entries: Vec<i64>) -> Result<Self, ExplorerError> {
        if entries.len() > 20 {
            return Err(ExplorerError::TooLong(entries.len()));
        }
        if let Some(pos) = entries.iter().position(|&e| e == 0) {
            return Err(ExplorerError::ZeroEntry(0, pos));
        }
        Ok(GRVector { entries })
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }
}

/// Non-singularity: no entry r_k equals the sum over any subset
/// S ⊆ {1, …, p} with S ≠ {k} (the empty sum 0 included).  Exhaustive over
/// all 2^p subsets.
pub fn gr_nonsingular(v: &GRVector) -> bool {
    let p = v.entries.len();
    for mask in 0u32..(1u32 << p) {
        let sum: i64 = (0..p)
            .filter(|&j| mask & (1 << j) != 0)
            .map(|j| v.entries[j])
            .sum();
        for (k, &r) in v.entries.iter().enumerate() {
            if mask == 1 << k {
                continue;
            }
            if r == sum {
                return false;
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Bucketed search
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub max_len: usize,
    pub rank: usize,
    pub include_powers: bool,
    /// Classes in multi-member buckets get their self-intersection number
    /// annotated (on the (3,3,6) structure) when set.
    pub annotate_self_intersections: bool,
}

impl SearchConfig {
    pub fn new(max_len: usize) -> Self {
        SearchConfig {
            max_len,
            rank: 2,
            include_powers: false,
            annotate_self_intersections: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MemberFlags {
    pub is_reversal_of_first: bool,
    pub gr_nonsingular_both_vectors: bool,
    pub self_intersection: Option<usize>,
}

/// One character bucket with at least two members.
#[derive(Clone, Debug)]
pub struct TupleReport {
    /// Canonical polynomial string of the shared character.
    pub key: String,
    pub members: Vec<CurveClass>,
    pub flags: Vec<MemberFlags>,
}

/// Buckets every class of length ≤ max_len by the canonical string of its
/// exact character.  Deterministic: members sorted within buckets, buckets
/// keyed by polynomial string.
pub fn bucket_classes(
    cfg: &SearchConfig,
) -> Result<BTreeMap<String, Vec<CurveClass>>, ExplorerError> {
    if cfg.max_len < 2 {
        return Err(ExplorerError::MaxLenTooSmall);
    }
    if cfg.rank != 2 {
        return Err(ExplorerError::RankNotTwo);
    }
    let classes = enumerate_classes(cfg.max_len, 2, cfg.include_powers);
    // Character computation is memoized per worker; the merge by key is
    // order-independent, so the result does not depend on the worker count.
    let keyed: Vec<(String, CurveClass)> = classes
        .into_par_iter()
        .map(|c| {
            let poly = FrickeTable::new().char_of_class(&c)?;
            Ok::<_, ExplorerError>((poly.canonical_string(), c))
        })
        .collect::<Result<_, _>>()?;
    let mut buckets: BTreeMap<String, Vec<CurveClass>> = BTreeMap::new();
    for (key, c) in keyed {
        buckets.entry(key).or_default().push(c);
    }
    for members in buckets.values_mut() {
        members.sort();
    }
    Ok(buckets)
}

/// Whether both exponent vectors of the class are defined and GR-nonsingular.
fn both_vectors_nonsingular(c: &CurveClass) -> Result<bool, ExplorerError> {
    let (m, n) = match c.word().exponent_vectors() {
        Ok(v) => v,
        // Single-generator classes have no syllable-pair decomposition.
        Err(WordError::SingleGenerator) => return Ok(false),
        Err(e) => return Err(e.into()),
    };
    Ok(gr_nonsingular(&GRVector::new(m)?) && gr_nonsingular(&GRVector::new(n)?))
}

/// Emits every bucket with at least two members, flagged.
pub fn search_tuples(cfg: &SearchConfig) -> Result<Vec<TupleReport>, ExplorerError> {
    let buckets = bucket_classes(cfg)?;
    let structure = if cfg.annotate_self_intersections {
        Some(DiscreteStructure::standard())
    } else {
        None
    };
    reports_from_buckets(&buckets, structure.as_ref())
}

/// Builds the multi-member reports from an existing bucket map.
pub fn reports_from_buckets(
    buckets: &BTreeMap<String, Vec<CurveClass>>,
    structure: Option<&DiscreteStructure>,
) -> Result<Vec<TupleReport>, ExplorerError> {
    let mut out = Vec::new();
    for (key, members) in buckets {
        if members.len() < 2 {
            continue;
        }
        let first_reversal = members[0].reversal_class();
        let mut flags = Vec::with_capacity(members.len());
        for (i, m) in members.iter().enumerate() {
            let self_intersection = match structure {
                Some(s) => match intersections::self_intersection(m, s) {
                    Ok(r) => Some(r.count),
                    Err(IntersectError::Peripheral) => None,
                    Err(e) => return Err(e.into()),
                },
                None => None,
            };
            flags.push(MemberFlags {
                is_reversal_of_first: i > 0 && *m == first_reversal,
                gr_nonsingular_both_vectors: both_vectors_nonsingular(m)?,
                self_intersection,
            });
        }
        out.push(TupleReport {
            key: key.clone(),
            members: members.clone(),
            flags,
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Verdicts
// ---------------------------------------------------------------------------

/// Bucket inspection for a^m b^n: the class and everything sharing its
/// character within the length bound.
#[derive(Clone, Debug)]
pub struct PrimitiveVerdict {
    pub target: CurveClass,
    pub bucket: Vec<CurveClass>,
}

impl PrimitiveVerdict {
    pub fn is_singleton(&self) -> bool {
        self.bucket.len() == 1
    }
}

/// Checks that the character of a^m b^n determines it among all classes of
/// length ≤ max_len.
pub fn horowitz_primitive_check(
    m: i64,
    n: i64,
    max_len: usize,
) -> Result<PrimitiveVerdict, ExplorerError> {
    if m == 0 && n == 0 {
        return Err(ExplorerError::ZeroExponents);
    }
    let len = (m.unsigned_abs() + n.unsigned_abs()) as usize;
    if len > max_len {
        return Err(ExplorerError::TargetTooLong(len, max_len));
    }
    let word = parse_word("", 2)?
        .concat(&parse_word("a", 2)?.pow(m))
        .concat(&parse_word("b", 2)?.pow(n));
    let target = word.canonical_class()?;
    let key = FrickeTable::new()
        .char_of_class(&target)?
        .canonical_string();
    let buckets = bucket_classes(&SearchConfig::new(max_len))?;
    let bucket = buckets.get(&key).cloned().unwrap_or_default();
    debug_assert!(bucket.contains(&target));
    Ok(PrimitiveVerdict { target, bucket })
}

/// A GR-nonsingular bucket member whose bucketmate is not its reversal class.
#[derive(Clone, Debug, Serialize)]
pub struct GrViolation {
    pub key: String,
    pub member: String,
    pub bucketmate: String,
}

/// For every bucket member with both exponent vectors non-singular, every
/// other member of its bucket must be its reversal class.
pub fn gr_filter_check(reports: &[TupleReport]) -> Result<Vec<GrViolation>, ExplorerError> {
    let mut violations = Vec::new();
    for report in reports {
        for (i, member) in report.members.iter().enumerate() {
            if !both_vectors_nonsingular(member)? {
                continue;
            }
            let reversal = member.reversal_class();
            for (j, other) in report.members.iter().enumerate() {
                if i != j && *other != reversal {
                    violations.push(GrViolation {
                        key: report.key.clone(),
                        member: member.to_string(),
                        bucketmate: other.to_string(),
                    });
                }
            }
        }
    }
    Ok(violations)
}

/// A simple class whose character bucket has further members.
#[derive(Clone, Debug, Serialize)]
pub struct McShaneViolation {
    pub key: String,
    pub simple_member: String,
    pub bucket: Vec<String>,
}

/// Character-level curve determination for simple classes: every simple
/// class of length ≤ max_len must sit in a singleton bucket.
pub fn mcshane_character_check(max_len: usize) -> Result<Vec<McShaneViolation>, ExplorerError> {
    let buckets = bucket_classes(&SearchConfig::new(max_len))?;
    let structure = DiscreteStructure::standard();
    let mut violations = Vec::new();
    for (key, members) in &buckets {
        if members.len() < 2 {
            continue;
        }
        for m in members {
            if intersections::classify(m, &structure)? == intersections::CurveKind::Simple {
                violations.push(McShaneViolation {
                    key: key.clone(),
                    simple_member: m.to_string(),
                    bucket: members.iter().map(|c| c.to_string()).collect(),
                });
            }
        }
    }
    Ok(violations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::traces::chars_equal_exact;

    fn class(s: &str) -> CurveClass {
        parse_word(s, 2).unwrap().canonical_class().unwrap()
    }

    fn gr(v: &[i64]) -> bool {
        gr_nonsingular(&GRVector::new(v.to_vec()).unwrap())
    }

    #[test]
    fn gr_nonsingular_examples() {
        assert!(gr(&[5]));
        assert!(!gr(&[1, 1])); // r₁ = r₂ over S = {2}
        assert!(gr(&[1, 2]));
        assert!(!gr(&[1, 2, 3])); // r₃ = r₁ + r₂
        assert!(gr(&[1, -1])); // 1 ≠ {0, -1}; -1 ≠ {0, 1}
        assert!(!gr(&[2, 1, 1])); // r₁ = r₂ + r₃
    }

    #[test]
    fn gr_vector_validation() {
        assert!(matches!(
            GRVector::new(vec![1, 0, 2]),
            Err(ExplorerError::ZeroEntry(_, 1))
        ));
        assert!(matches!(
            GRVector::new(vec![1; 21]),
            Err(ExplorerError::TooLong(21))
        ));
    }

    #[test]
    fn short_search_finds_no_tuples() {
        let reports = search_tuples(&SearchConfig::new(2)).unwrap();
        assert!(reports.is_empty());
    }

    #[test]
    fn search_finds_the_filling_pair() {
        let mut cfg = SearchConfig::new(5);
        cfg.annotate_self_intersections = true;
        let reports = search_tuples(&cfg).unwrap();
        let pair = reports
            .iter()
            .find(|r| r.members.contains(&class("abaaB")))
            .expect("the length-5 pair must be found");
        assert_eq!(pair.members.len(), 2);
        assert!(pair.members.contains(&class("aabaB")));
        // The second member is the reversal class of the first.
        assert!(pair.flags[1].is_reversal_of_first);
        assert_eq!(pair.flags[0].self_intersection, Some(2));
        assert_eq!(pair.flags[1].self_intersection, Some(2));
        // Exponent vectors (1,2) and (1,−1): both nonsingular.
        assert!(pair.flags[0].gr_nonsingular_both_vectors);
    }

    #[test]
    fn buckets_are_sound_and_reversal_closed() {
        let buckets = bucket_classes(&SearchConfig::new(6)).unwrap();
        for members in buckets.values() {
            for m in members {
                let r = m.reversal_class();
                assert!(members.contains(&r), "bucket not reversal-closed: {m}");
                assert!(chars_equal_exact(&members[0], m).unwrap());
            }
        }
        // Cross-bucket pairs must fail exact equality.
        let keys: Vec<&String> = buckets.keys().collect();
        for pair in keys.windows(2) {
            let u = &buckets[pair[0]][0];
            let v = &buckets[pair[1]][0];
            assert!(!chars_equal_exact(u, v).unwrap());
        }
    }

    #[test]
    fn primitive_buckets_are_singletons() {
        for (m, n) in [(1, 0), (1, 1), (2, 1)] {
            let v = horowitz_primitive_check(m, n, 6).unwrap();
            assert!(v.is_singleton(), "a^{m} b^{n} bucket: {:?}", v.bucket);
        }
        assert!(matches!(
            horowitz_primitive_check(0, 0, 6),
            Err(ExplorerError::ZeroExponents)
        ));
    }

    #[test]
    fn gr_filter_accepts_real_run_and_rejects_synthetic() {
        let reports = search_tuples(&SearchConfig::new(6)).unwrap();
        assert!(gr_filter_check(&reports).unwrap().is_empty());

        // Synthetic bucket: two GR-nonsingular members that are not
        // reversals of each other must be flagged.
        let synthetic = TupleReport {
            key: "synthetic".into(),
            members: vec![class("abaaB"), class("ab")],
            flags: Vec::new(),
        };
        let violations = gr_filter_check(&[synthetic]).unwrap();
        assert!(!violations.is_empty());
    }

    #[test]
    fn simple_classes_sit_in_singleton_buckets() {
        assert!(mcshane_character_check(6).unwrap().is_empty());
    }
}
