//! Free-group word calculus: parsing, free and cyclic reduction, canonical
//! conjugacy-and-inversion classes, syllable decomposition and enumeration.
//!
//! Words are immutable values; every operation returns a new value.  The
//! canonical form of an unoriented conjugacy class is the minimum, in the
//! letter order a < a⁻¹ < b < b⁻¹ < …, over all rotations of the cyclic word
//! and all rotations of its inverse.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("letter '{letter}' has generator index {index} but rank is {rank}")]
    RankExceeded { letter: char, index: usize, rank: usize },
    #[error("word is trivial after reduction")]
    Trivial,
    #[error("word is a proper power: root {root}, exponent {exponent}")]
    ProperPower { root: String, exponent: usize },
    #[error("word uses a single generator; no syllable-pair decomposition")]
    SingleGenerator,
    #[error("operation requires rank 2, got rank {0}")]
    RankNotTwo(usize),
}

/// One letter of a free-group word: a generator or its inverse.
///
/// Encoded as a nonzero `i8`: `g+1` for generator `g`, `-(g+1)` for its
/// inverse.  Rank is capped at 26 so letters render as `a..z` / `A..Z`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(i8);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        assert!(generator < 26, "generator index out of range");
        let v = (generator as i8) + 1;
        Letter(if inverse { -v } else { v })
    }

    pub fn generator(self) -> usize {
        (self.0.unsigned_abs() as usize) - 1
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    pub fn inverse(self) -> Self {
        Letter(-self.0)
    }

    /// Position in the total order a < a⁻¹ < b < b⁻¹ < …
    pub fn order_key(self) -> u8 {
        (self.generator() as u8) * 2 + u8::from(self.is_inverse())
    }

    fn to_char(self) -> char {
        let c = b'a' + self.generator() as u8;
        if self.is_inverse() {
            c.to_ascii_uppercase() as char
        } else {
            c as char
        }
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

fn free_reduce(letters: impl IntoIterator<Item = Letter>) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::new();
    for l in letters {
        if out.last().is_some_and(|&p| p == l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

fn key_seq(letters: &[Letter]) -> Vec<u8> {
    letters.iter().map(|l| l.order_key()).collect()
}

/// A freely reduced word in a free group of the given rank.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Word {
    letters: Vec<Letter>,
    rank: usize,
}

impl Word {
    /// Builds a word from letters, freely reducing.
    pub fn new(letters: impl IntoIterator<Item = Letter>, rank: usize) -> Self {
        let letters = free_reduce(letters);
        debug_assert!(letters.iter().all(|l| l.generator() < rank));
        Word { letters, rank }
    }

    pub fn identity(rank: usize) -> Self {
        Word { letters: Vec::new(), rank }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The word written backwards, each letter keeping its sign.
    pub fn reverse(&self) -> Word {
        Word::new(self.letters.iter().rev().copied(), self.rank)
    }

    pub fn invert(&self) -> Word {
        Word::new(self.letters.iter().rev().map(|l| l.inverse()), self.rank)
    }

    pub fn concat(&self, other: &Word) -> Word {
        assert_eq!(self.rank, other.rank, "rank mismatch");
        Word::new(self.letters.iter().chain(other.letters.iter()).copied(), self.rank)
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.invert() } else { self.clone() };
        let mut out = Word::identity(self.rank);
        for _ in 0..n.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    pub fn conjugate_by(&self, g: &Word) -> Word {
        g.concat(self).concat(&g.invert())
    }

    /// Removes inverse pairs from the two ends until the word is cyclically
    /// reduced.
    pub fn cyclic_reduce(&self) -> Result<CyclicWord, WordError> {
        let mut l = self.letters.clone();
        while l.len() >= 2 && l[0] == l[l.len() - 1].inverse() {
            l.pop();
            l.remove(0);
        }
        if l.is_empty() {
            return Err(WordError::Trivial);
        }
        Ok(CyclicWord { letters: l, rank: self.rank })
    }

    pub fn canonical_class(&self) -> Result<CurveClass, WordError> {
        self.cyclic_reduce()?.canonical_class()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render(&self.letters))
    }
}

/// A cyclically reduced, nonempty word considered up to rotation.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CyclicWord {
    letters: Vec<Letter>,
    rank: usize,
}

impl CyclicWord {
    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn to_word(&self) -> Word {
        Word { letters: self.letters.clone(), rank: self.rank }
    }

    pub fn rotated(&self, k: usize) -> CyclicWord {
        let n = self.letters.len();
        let mut l = Vec::with_capacity(n);
        for i in 0..n {
            l.push(self.letters[(i + k) % n]);
        }
        CyclicWord { letters: l, rank: self.rank }
    }

    pub fn invert(&self) -> CyclicWord {
        CyclicWord {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
            rank: self.rank,
        }
    }

    /// Tests whether the cyclic letter sequence is periodic with period a
    /// proper divisor of its length.
    pub fn proper_power(&self) -> Option<(CyclicWord, usize)> {
        let n = self.letters.len();
        for period in 1..n {
            if n % period != 0 {
                continue;
            }
            if (period..n).all(|i| self.letters[i] == self.letters[i - period]) {
                let root = CyclicWord {
                    letters: self.letters[..period].to_vec(),
                    rank: self.rank,
                };
                return Some((root, n / period));
            }
        }
        None
    }

    /// Minimum rotation of this word or its inverse, in the fixed letter
    /// order.  Unlike [`CyclicWord::canonical_class`] this accepts proper
    /// powers; it is the memo key used for trace computations.
    pub fn canonical_letters(&self) -> Vec<Letter> {
        let mut best: Option<Vec<Letter>> = None;
        for cw in [self.clone(), self.invert()] {
            let n = cw.letters.len();
            for k in 0..n {
                let rot = cw.rotated(k).letters;
                if best.as_ref().is_none_or(|b| key_seq(&rot) < key_seq(b)) {
                    best = Some(rot);
                }
            }
        }
        best.unwrap()
    }

    pub fn canonical_class(&self) -> Result<CurveClass, WordError> {
        if let Some((root, exponent)) = self.proper_power() {
            return Err(WordError::ProperPower {
                root: render(&root.letters),
                exponent,
            });
        }
        Ok(CurveClass {
            canonical: CyclicWord {
                letters: self.canonical_letters(),
                rank: self.rank,
            },
        })
    }

    /// Syllable decomposition, reading from the first position that starts a
    /// new syllable in the cyclic order (so the decomposition is a rotation
    /// of the written form, not a re-ordering).
    pub fn syllables(&self) -> SyllableForm {
        let n = self.letters.len();
        // Start index: first letter whose cyclic predecessor has a different
        // generator; for single-syllable words, position 0.
        let start = (0..n)
            .find(|&i| {
                self.letters[(i + n - 1) % n].generator() != self.letters[i].generator()
            })
            .unwrap_or(0);
        let mut syl: Vec<(usize, i64)> = Vec::new();
        for i in 0..n {
            let l = self.letters[(start + i) % n];
            let e: i64 = if l.is_inverse() { -1 } else { 1 };
            match syl.last_mut() {
                Some((g, acc)) if *g == l.generator() => *acc += e,
                _ => syl.push((l.generator(), e)),
            }
        }
        SyllableForm { syllables: syl }
    }

    /// Exponent vectors (m, n) of a two-generator word a^{m₁}b^{n₁}…a^{m_p}b^{n_p},
    /// read from the first a-syllable.
    pub fn exponent_vectors(&self) -> Result<(Vec<i64>, Vec<i64>), WordError> {
        if self.rank != 2 {
            return Err(WordError::RankNotTwo(self.rank));
        }
        let syl = self.syllables();
        if syl.syllables.iter().any(|&(g, _)| g > 1) {
            return Err(WordError::RankNotTwo(self.rank));
        }
        let gens: BTreeSet<usize> = syl.syllables.iter().map(|&(g, _)| g).collect();
        if gens.len() < 2 {
            return Err(WordError::SingleGenerator);
        }
        // Alternating a/b syllables; rotate so the first is an a-syllable.
        let k = syl.syllables.len();
        debug_assert!(k % 2 == 0);
        let shift = if syl.syllables[0].0 == 0 { 0 } else { 1 };
        let mut m = Vec::with_capacity(k / 2);
        let mut n = Vec::with_capacity(k / 2);
        for i in 0..k / 2 {
            m.push(syl.syllables[(2 * i + shift) % k].1);
            n.push(syl.syllables[(2 * i + 1 + shift) % k].1);
        }
        Ok((m, n))
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render(&self.letters))
    }
}

/// Syllable decomposition of a cyclic word: runs of a single generator with
/// signed exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyllableForm {
    /// (generator index, nonzero exponent) pairs; adjacent generators differ.
    pub syllables: Vec<(usize, i64)>,
}

impl SyllableForm {
    /// Number of a-syllable/b-syllable pairs for a two-generator word.
    pub fn pair_count(&self) -> usize {
        self.syllables.len() / 2
    }
}

/// Canonical representative of an unoriented free-homotopy class: the minimum
/// over all rotations of the cyclic word and of its inverse, required to be
/// primitive (not a proper power).
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct CurveClass {
    canonical: CyclicWord,
}

impl PartialOrd for CyclicWord {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CyclicWord {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.letters.len(), key_seq(&self.letters))
            .cmp(&(other.letters.len(), key_seq(&other.letters)))
    }
}

impl CurveClass {
    pub fn word(&self) -> &CyclicWord {
        &self.canonical
    }

    pub fn rank(&self) -> usize {
        self.canonical.rank
    }

    pub fn len(&self) -> usize {
        self.canonical.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The class of the reversed word.
    pub fn reversal_class(&self) -> CurveClass {
        self.canonical
            .to_word()
            .reverse()
            .canonical_class()
            .expect("reversal of a primitive word is primitive")
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical)
    }
}

/// Parses the word grammar: `token+` with `token := letter ('^' signed-int)?`.
/// Lowercase letters are generators, uppercase their inverses; whitespace is
/// ignored.  `a^-1` and `A` are both accepted.
pub fn parse_word(text: &str, rank: usize) -> Result<Word, WordError> {
    let mut letters: Vec<Letter> = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        if c.is_whitespace() {
            continue;
        }
        if !c.is_ascii_alphabetic() {
            return Err(WordError::Parse(format!("unexpected character '{c}'")));
        }
        let index = (c.to_ascii_lowercase() as u8 - b'a') as usize;
        if index >= rank {
            return Err(WordError::RankExceeded { letter: c, index, rank });
        }
        let inverse = c.is_ascii_uppercase();
        let mut exponent: i64 = 1;
        if chars.peek() == Some(&'^') {
            chars.next();
            let mut s = String::new();
            if chars.peek() == Some(&'-') || chars.peek() == Some(&'+') {
                s.push(chars.next().unwrap());
            }
            while chars.peek().is_some_and(|d| d.is_ascii_digit()) {
                s.push(chars.next().unwrap());
            }
            exponent = s
                .parse()
                .map_err(|_| WordError::Parse(format!("bad exponent after '{c}^'")))?;
        }
        let l = Letter::new(index, inverse != (exponent < 0));
        for _ in 0..exponent.unsigned_abs() {
            letters.push(l);
        }
    }
    Ok(Word::new(letters, rank))
}

/// Canonical text rendering with run-length exponents, e.g. `a^2bB^3`.
/// Round-trips through [`parse_word`] bit-exactly.
pub fn render(letters: &[Letter]) -> String {
    let mut out = String::new();
    let mut i = 0;
    while i < letters.len() {
        let l = letters[i];
        let mut run = 1;
        while i + run < letters.len() && letters[i + run] == l {
            run += 1;
        }
        out.push(l.to_char());
        if run > 1 {
            out.push_str(&format!("^{run}"));
        }
        i += run;
    }
    out
}

/// Emits each unoriented conjugacy class with cyclic length ≤ `max_len`
/// exactly once, in order (length, canonical letters).  Proper powers are
/// excluded unless `include_powers` is set.
pub fn enumerate_classes(max_len: usize, rank: usize, include_powers: bool) -> Vec<CurveClass> {
    assert!(max_len >= 1 && (2..=26).contains(&rank));
    let mut seen: BTreeSet<CyclicWord> = BTreeSet::new();
    let alphabet: Vec<Letter> = (0..rank)
        .flat_map(|g| [Letter::new(g, false), Letter::new(g, true)])
        .collect();
    // DFS over cyclically reduced letter strings.
    let mut stack: Vec<Letter> = Vec::new();
    fn recurse(
        stack: &mut Vec<Letter>,
        alphabet: &[Letter],
        max_len: usize,
        rank: usize,
        include_powers: bool,
        seen: &mut BTreeSet<CyclicWord>,
    ) {
        for &l in alphabet {
            if stack.last().is_some_and(|&p| p == l.inverse()) {
                continue;
            }
            stack.push(l);
            // Cyclic reducedness: last letter must not invert the first.
            if stack.len() == 1 || stack[0] != l.inverse() {
                let cw = CyclicWord { letters: stack.clone(), rank };
                let is_power = cw.proper_power().is_some();
                if include_powers || !is_power {
                    let canonical = CyclicWord { letters: cw.canonical_letters(), rank };
                    seen.insert(canonical);
                }
            }
            if stack.len() < max_len {
                recurse(stack, alphabet, max_len, rank, include_powers, seen);
            }
            stack.pop();
        }
    }
    recurse(&mut stack, &alphabet, max_len, rank, include_powers, &mut seen);
    seen.into_iter().map(|canonical| CurveClass { canonical }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        parse_word(s, 2).unwrap()
    }

    #[test]
    fn parse_cancels_and_expands() {
        assert_eq!(w("aA b").to_string(), "b");
        assert_eq!(w("a^2 B").to_string(), "a^2B");
        assert_eq!(w("abaaB").to_string(), "aba^2B");
        assert_eq!(w("a^-2").to_string(), "A^2");
        assert_eq!(w("a^0").to_string(), "");
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(matches!(parse_word("c", 2), Err(WordError::RankExceeded { .. })));
        assert!(matches!(parse_word("a$b", 2), Err(WordError::Parse(_))));
    }

    #[test]
    fn render_round_trips() {
        for s in ["a^2bA^3", "aBa^4b", "A^2B^2"] {
            assert_eq!(w(s).to_string(), s);
        }
    }

    #[test]
    fn reverse_examples() {
        assert_eq!(w("abaaB").reverse().to_string(), "Ba^2ba");
        assert_eq!(w("a").reverse(), w("a"));
        assert_eq!(w("ab").reverse(), w("ba"));
    }

    #[test]
    fn reverse_is_involution_and_commutes_with_invert() {
        for s in ["abaaB", "aBBaab", "A", "abAB"] {
            let x = w(s);
            assert_eq!(x.reverse().reverse(), x);
            assert_eq!(x.reverse().invert(), x.invert().reverse());
        }
    }

    #[test]
    fn canonical_class_examples() {
        let base = w("abaaB").canonical_class().unwrap();
        assert_eq!(w("baaBa").canonical_class().unwrap(), base);
        // bAABA = (abaaB)⁻¹, an inverse of a rotation.
        assert_eq!(w("bAABA").canonical_class().unwrap(), base);
        assert_ne!(w("aabaB").canonical_class().unwrap(), base);
    }

    #[test]
    fn canonical_class_conjugation_invariance() {
        let conjugators = ["a", "ab", "Ba", "abA", "BBa", "abab"];
        for s in ["abaaB", "ab", "aab", "aBab"] {
            let x = w(s);
            let c = x.canonical_class().unwrap();
            for g in conjugators {
                assert_eq!(x.conjugate_by(&w(g)).canonical_class().unwrap(), c);
            }
            assert_eq!(x.invert().canonical_class().unwrap(), c);
        }
    }

    #[test]
    fn trivial_and_power_errors() {
        assert!(matches!(w("aA").canonical_class(), Err(WordError::Trivial)));
        match w("aa").canonical_class() {
            Err(WordError::ProperPower { root, exponent }) => {
                assert_eq!(root, "a");
                assert_eq!(exponent, 2);
            }
            other => panic!("expected proper power, got {other:?}"),
        }
        match w("abab").canonical_class() {
            Err(WordError::ProperPower { root, exponent }) => {
                assert_eq!(root, "ab");
                assert_eq!(exponent, 2);
            }
            other => panic!("expected proper power, got {other:?}"),
        }
        assert!(w("abaaB").canonical_class().is_ok());
    }

    #[test]
    fn syllable_examples() {
        let cw = w("abaaB").cyclic_reduce().unwrap();
        let (m, n) = cw.exponent_vectors().unwrap();
        assert_eq!(m, vec![1, 2]);
        assert_eq!(n, vec![1, -1]);

        let cw = w("ab").cyclic_reduce().unwrap();
        let (m, n) = cw.exponent_vectors().unwrap();
        assert_eq!(m, vec![1]);
        assert_eq!(n, vec![1]);

        let cw = w("aaa").cyclic_reduce().unwrap();
        assert!(matches!(cw.exponent_vectors(), Err(WordError::SingleGenerator)));
    }

    #[test]
    fn syllables_reconstruct_up_to_rotation() {
        for s in ["abaaB", "aBaab", "bbaBa"] {
            let cw = w(s).cyclic_reduce().unwrap();
            let syl = cw.syllables();
            let mut letters = Vec::new();
            for (g, e) in &syl.syllables {
                let l = Letter::new(*g, *e < 0);
                for _ in 0..e.unsigned_abs() {
                    letters.push(l);
                }
            }
            let rebuilt = CyclicWord { letters, rank: 2 };
            assert_eq!(rebuilt.canonical_letters(), cw.canonical_letters());
        }
    }

    #[test]
    fn enumerate_small() {
        let names: Vec<String> =
            enumerate_classes(1, 2, false).iter().map(|c| c.to_string()).collect();
        assert_eq!(names, vec!["a", "b"]);
        let names: Vec<String> =
            enumerate_classes(2, 2, false).iter().map(|c| c.to_string()).collect();
        assert_eq!(names, vec!["a", "b", "ab", "aB"]);
        let found = enumerate_classes(5, 2, false)
            .iter()
            .any(|c| *c == w("abaaB").canonical_class().unwrap());
        assert!(found);
    }

    #[test]
    fn enumerate_matches_brute_force() {
        // Independent oracle: all letter strings, reduce, canonicalize, dedupe.
        for max_len in 1..=6 {
            let alphabet: Vec<Letter> = (0..2)
                .flat_map(|g| [Letter::new(g, false), Letter::new(g, true)])
                .collect();
            let mut oracle: BTreeSet<Vec<Letter>> = BTreeSet::new();
            let mut frontier: Vec<Vec<Letter>> = vec![Vec::new()];
            for _ in 0..max_len {
                let mut next = Vec::new();
                for s in &frontier {
                    for &l in &alphabet {
                        let mut t = s.clone();
                        t.push(l);
                        next.push(t);
                    }
                }
                for s in &next {
                    let word = Word::new(s.iter().copied(), 2);
                    if let Ok(cw) = word.cyclic_reduce() {
                        if cw.len() <= max_len && cw.proper_power().is_none() {
                            oracle.insert(cw.canonical_letters());
                        }
                    }
                }
                frontier = next;
            }
            assert_eq!(enumerate_classes(max_len, 2, false).len(), oracle.len());
        }
    }

    #[test]
    fn reduction_is_idempotent_and_order_independent() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(0..14);
            let raw: Vec<Letter> = (0..n)
                .map(|_| Letter::new(rng.gen_range(0..2), rng.gen_bool(0.5)))
                .collect();
            let reduced = free_reduce(raw.iter().copied());
            assert_eq!(free_reduce(reduced.iter().copied()), reduced);
            // Randomized cancellation schedule: cancel a random adjacent
            // inverse pair until none remain.
            let mut work = raw.clone();
            loop {
                let pairs: Vec<usize> = (0..work.len().saturating_sub(1))
                    .filter(|&i| work[i] == work[i + 1].inverse())
                    .collect();
                match pairs.choose(&mut rng) {
                    Some(&i) => {
                        work.remove(i + 1);
                        work.remove(i);
                    }
                    None => break,
                }
            }
            assert_eq!(work, reduced);
        }
    }
}
