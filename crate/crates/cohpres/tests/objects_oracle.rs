mod common;

use std::sync::OnceLock;

use cohpres::core::search::SearchLimits;
use cohpres::core::*;
use cohpres::objects::*;
use cohpres::oracle::*;
use common::*;
use proptest::prelude::*;
use proptest::sample::Index;

fn ds2() -> &'static Presentation {
    static P: OnceLock<Presentation> = OnceLock::new();
    P.get_or_init(|| load("ds2.cp"))
}

#[test]
fn normal_forms_sort_letters() {
    let p = ds2();
    let n = normalize(p, &word(p, "babbaa")).unwrap();
    assert_eq!(p.show_word(&n.normal), "aaabbb");
    assert_eq!(n.path.len(), 7);
    assert!(is_normal(p, &word(p, "aabb")));
    assert!(!is_normal(p, &word(p, "ba")));
}

#[test]
fn transposition_numbers() {
    let p = ds2();
    let (a, b) = (p.object_id("a").unwrap(), p.object_id("b").unwrap());
    for (w, n) in [("", 0), ("ab", 0), ("ba", 1), ("bba", 2), ("babbaa", 7), ("bbbaaa", 9)] {
        assert_eq!(transposition_number(&word(p, w), b, a), n, "{w}");
    }
}

#[test]
fn termination_cycle_in_huet() {
    let h = load("huet.cp");
    let v = check_equational_termination(&h, 10_000);
    let TerminationStatus::Cycle { words } = v.status else { panic!("{:?}", v.status) };
    assert_eq!(show_words(&h, &words), "[x, y, x]");
    assert_eq!(check_equational_termination(ds2(), 10_000).status, TerminationStatus::Terminating);
}

#[test]
fn normalization_laws_up_to_length_six() {
    assert_eq!(normalize_laws(ds2(), 6).unwrap(), 127);
}

#[test]
fn exchange_fibers_up_to_length_four() {
    assert!(exchange_fibers(ds2(), 4, 4).unwrap() > 100);
}

#[test]
fn exchange_canonical_examples() {
    let p = ds2();
    assert!(exchange_equal(p, &path(p, "[n]aa ; b[m]"), &path(p, "bb[m] ; [n]a")));
    let s = path(p, "b[m]");
    assert_eq!(exchange_canonical(p, &s), s);
    let a = path(p, "[g]ba ; a[n]a ; a[g] ; [m]b");
    let b = path(p, "ba[g] ; b[m]b ; [g]b ; a[n]");
    assert!(!exchange_equal(p, &a, &b));
    assert!(cells_equal(p, &a, &b, SearchLimits::depth(10)).is_equal());
}

#[test]
fn surjection_counts_match_enumeration() {
    assert_eq!(surjection_count((3, 0), (1, 0)), 1);
    assert_eq!(surjection_count((3, 0), (2, 0)), 2);
    assert_eq!(surjection_count((2, 2), (1, 1)), 1);
    for n in 0..7 {
        for k in 0..7 {
            assert_eq!(monotone_surjections(n, k), brute_surjections(n, k), "[{n}] -> [{k}]");
        }
    }
}

#[test]
fn hom_class_examples() {
    let p = ds2();
    let h = enumerate_hom_classes(p, &word(p, "aaa"), &word(p, "aa"), 3).unwrap();
    assert_eq!(h.count(), 2);
    let h = enumerate_hom_classes(p, &word(p, "aaa"), &word(p, "a"), 3).unwrap();
    assert_eq!(h.count(), 1);
    let h = enumerate_hom_classes(p, &word(p, "ab"), &word(p, "ab"), 3).unwrap();
    assert_eq!(h.class_of(&Path::id(word(p, "ab"))), Some(0));
}

#[test]
fn hom_class_counts_grow_with_the_bound() {
    let p = ds2();
    for (s, t) in [("aabb", "ab"), ("baa", "ab"), ("abab", "ab")] {
        let counts: Vec<usize> = (0..=5)
            .map(|b| enumerate_hom_classes(p, &word(p, s), &word(p, t), b).unwrap().count())
            .collect();
        assert!(counts.windows(2).all(|w| w[0] <= w[1]), "{s} -> {t}: {counts:?}");
    }
}

#[test]
fn path_cap_is_an_error() {
    let p = ds2();
    assert!(enumerate_hom_classes_capped(p, &word(p, "bbbbaaaa"), &word(p, "ab"), 10, 50).is_err());
}

#[test]
fn cells_between_alpha_sides() {
    let p = ds2();
    assert!(cells_equal(p, &path(p, "[m]a ; [m]"), &path(p, "a[m] ; [m]"), SearchLimits::default()).is_equal());
    let h = load("huet.cp");
    let loc = cohpres::constructions::localize_equational(&h);
    let r = cells_equal(&loc, &path(&loc, "[g] ; [g']"), &path(&loc, "id x"), SearchLimits::depth(8));
    assert!(!r.is_equal());
}

proptest! {
    #[test]
    fn normalize_is_idempotent(w in prop::collection::vec(0u16..2, 0..9)) {
        let p = ds2();
        let n = normalize(p, &w).unwrap();
        prop_assert!(is_normal(p, &n.normal));
        prop_assert_eq!(normalize(p, &n.normal).unwrap().normal, n.normal.clone());
        let mut sorted = w.clone();
        sorted.sort_unstable();
        prop_assert_eq!(n.normal, sorted);
    }

    #[test]
    fn exchange_canonical_is_idempotent(i: Index) {
        static PATHS: OnceLock<Vec<Path>> = OnceLock::new();
        let p = ds2();
        let paths = PATHS.get_or_init(|| fragment(p, 5, 4));
        let q = i.get(paths);
        let c = exchange_canonical(p, q);
        prop_assert_eq!(exchange_canonical(p, &c), c.clone());
        prop_assert!(exchange_equal(p, q, &c));
        prop_assert_eq!(c.target(p), q.target(p));
    }
}
