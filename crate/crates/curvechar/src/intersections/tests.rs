use super::*;
use crate::geometry::punctured_torus_structure;
use crate::words::parse_word;

fn class(s: &str) -> CurveClass {
    parse_word(s, 2).unwrap().canonical_class().unwrap()
}

fn structure_34() -> DiscreteStructure {
    let t = punctured_torus_structure(rat(3), rat(4), false).unwrap();
    DiscreteStructure::new(t).unwrap()
}

#[test]
fn simple_classes_have_no_crossings() {
    let s = DiscreteStructure::standard();
    for name in ["a", "b", "ab", "aB", "aab"] {
        let r = self_intersection(&class(name), &s).unwrap();
        assert_eq!(r.count, 0, "{name} should be simple");
        assert!(r.stable);
        assert!(is_simple(&class(name), &s).unwrap());
    }
}

#[test]
fn filling_pair_has_two_crossings() {
    let s = DiscreteStructure::standard();
    for name in ["abaaB", "aabaB"] {
        let r = self_intersection(&class(name), &s).unwrap();
        assert_eq!(r.count, 2, "{name}");
        assert!(r.stable);
        assert!(r.bound >= class(name).len() + 6);
    }
}

#[test]
fn counts_are_structure_independent() {
    let s = structure_34();
    assert!(!s.is_exact());
    for (name, expected) in [("a", 0), ("ab", 0), ("abaaB", 2), ("aabaB", 2)] {
        let r = self_intersection(&class(name), &s).unwrap();
        assert_eq!(r.count, expected, "{name} at (3,4)");
    }
}

#[test]
fn peripheral_class_is_rejected() {
    let s = DiscreteStructure::standard();
    assert!(matches!(
        self_intersection(&class("abAB"), &s),
        Err(IntersectError::Peripheral)
    ));
}

#[test]
fn tessellation_agrees_with_brute_force() {
    let s = DiscreteStructure::standard();
    for name in ["ab", "abaaB", "aabaB", "aabb", "aabab"] {
        let c = class(name);
        let w = c.word().to_word();
        let keys = self_crossing_keys(&s, &w, 64).unwrap().unwrap();
        for bound in [5, 6, 7] {
            let brute = self_intersection_brute(&c, &s, bound).unwrap();
            let filtered = keys.keys().filter(|k| k.len() <= bound).count();
            assert_eq!(brute, filtered, "{name} at bound {bound}");
        }
    }
}

#[test]
fn generator_axes_cross_once() {
    let s = DiscreteStructure::standard();
    let ax_a = axis(&s, &class("a")).unwrap();
    let ax_b = axis(&s, &class("b")).unwrap();
    assert!(axes_cross(&ax_a, &ax_b).unwrap());
    // Fixed points of [[1,1],[1,2]] are (−1 ± √5)/2.
    let (att, rep) = ax_a.endpoints_f64();
    let gold = 5f64.sqrt();
    assert!((att - (-1.0 + gold) / 2.0).abs() < 1e-12);
    assert!((rep - (-1.0 - gold) / 2.0).abs() < 1e-12);
}

#[test]
fn power_shares_the_axis() {
    let s = DiscreteStructure::standard();
    let ax_a = axis(&s, &class("a")).unwrap();
    let ax_aa = axis_of_word(&s, &parse_word("aa", 2).unwrap()).unwrap();
    assert!(matches!(
        axes_cross(&ax_a, &ax_aa),
        Err(IntersectError::SharedAxis)
    ));
}

#[test]
fn slopes_of_simple_classes() {
    let s = DiscreteStructure::standard();
    assert_eq!(slope(&class("a"), &s).unwrap(), (1, 0));
    assert_eq!(slope(&class("A"), &s).unwrap(), (1, 0));
    assert_eq!(slope(&class("b"), &s).unwrap(), (0, 1));
    assert_eq!(slope(&class("ab"), &s).unwrap(), (1, 1));
    assert_eq!(slope(&class("aB"), &s).unwrap(), (1, -1));
    assert!(matches!(
        slope(&class("abaaB"), &s),
        Err(IntersectError::NotSimple)
    ));
}

#[test]
fn pairwise_counts_match_slope_formula() {
    let s = DiscreteStructure::standard();
    let pairs = [
        ("a", "b"),
        ("a", "ab"),
        ("ab", "aB"),
        ("a", "aab"),
        ("aab", "abb"),
    ];
    for (u, v) in pairs {
        let cu = class(u);
        let cv = class(v);
        let su = slope(&cu, &s).unwrap();
        let sv = slope(&cv, &s).unwrap();
        let expected = slope_intersection(su, sv);
        let got = pairwise_intersection(&cu, &cv, &s).unwrap();
        assert_eq!(got.count as u64, expected, "i({u}, {v})");
    }
}

#[test]
fn pairwise_rejects_equal_classes() {
    let s = DiscreteStructure::standard();
    assert!(matches!(
        pairwise_intersection(&class("ab"), &class("ba"), &s),
        Err(IntersectError::SharedAxis)
    ));
}

#[test]
fn primitive_root_strips_powers_and_conjugation() {
    let w = parse_word("abab", 2).unwrap();
    assert_eq!(primitive_root(&w), parse_word("ab", 2).unwrap());
    let w = parse_word("baBABAbb", 2).unwrap(); // b·(aBA)²·b⁻¹ reduced form
    let u = parse_word("aBA", 2).unwrap();
    let conj = parse_word("b", 2).unwrap();
    let expected = conj.concat(&u).concat(&conj.invert());
    let full = conj.concat(&u.pow(2)).concat(&conj.invert());
    assert_eq!(primitive_root(&full), expected);
    let _ = w;
}

#[test]
fn double_coset_key_is_representative_independent() {
    let w = parse_word("abaaB", 2).unwrap();
    let g = parse_word("ba", 2).unwrap();
    let base = double_coset_key(&w, &g, &w, true);
    for (i, j) in [(1, 0), (0, 2), (-2, 1), (3, -3)] {
        let rep = w.pow(i).concat(&g).concat(&w.pow(j));
        assert_eq!(double_coset_key(&w, &rep, &w, true), base);
        let rep_inv = rep.invert();
        assert_eq!(double_coset_key(&w, &rep_inv, &w, true), base);
    }
}
