//! User field profiles of low cohomological dimension: JSON loading, the
//! first-page collapse, the shape of the resulting table, and honest
//! ambiguity for the undetermined extensions.

use kqcalc::coeffrings::{CD2Tables, CoefficientProfile};
use kqcalc::exactalg::{AmbiguousSet, FGAbGroup};
use kqcalc::ktables::kq_table;
use kqcalc::ssengine::{apply_first_differential, build_page1, certify_collapse};
use num_bigint::BigUint;
use std::collections::BTreeMap;

const PRIMES: &[u64] = &[
    3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193,
    197, 199, 211, 223, 227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307,
    311, 313, 317, 331, 337, 347, 349, 353, 359, 367, 373, 379, 383, 389, 397, 401, 409, 419, 421,
    431, 433, 439, 443, 449, 457, 461, 463, 467, 479, 487, 491, 499, 503, 509, 521, 523, 541, 547,
    557, 563, 569, 571, 577, 587, 593, 599, 601, 607, 613, 617, 619, 631, 641, 643, 647, 653, 659,
    661, 673, 677, 683, 701, 709, 719, 727, 733, 739, 743, 751, 757, 761, 769, 773, 787, 797, 809,
    811, 821, 823, 827, 829, 839, 853, 857, 859, 863, 877, 881, 883, 887, 907, 911, 919, 929, 937,
    941, 947, 953, 967, 971, 977, 983, 991, 997,
];

/// Profile with a distinct odd prime in every usable table slot, so the
/// origin of every output layer is identifiable by its order.
fn distinct_prime_profile() -> (CoefficientProfile, BTreeMap<(char, i64, i64), u64>) {
    let mut assignment = BTreeMap::new();
    let mut tables = CD2Tables { max_weight: 30, ..CD2Tables::default() };
    let mut next = 0usize;
    let mut take = || {
        let p = PRIMES[next];
        next += 1;
        p
    };
    for w in 1..=28i64 {
        for s in 1..=2i64 {
            let p = take();
            assignment.insert(('H', s, w), p);
            tables.h.insert((s, w), FGAbGroup::cyclic(p));
        }
    }
    for w in 0..=28i64 {
        for s in 0..=2i64 {
            let p = take();
            assignment.insert(('h', s, w), p);
            tables.h2.insert((s, w), FGAbGroup::cyclic(p));
        }
    }
    let p0 = take();
    assignment.insert(('K', 0, 0), p0);
    tables.kmw.insert(0, FGAbGroup::cyclic(p0));
    let p1 = take();
    assignment.insert(('K', 0, 1), p1);
    tables.kmw.insert(1, FGAbGroup::cyclic(p1));
    let p2 = take();
    assignment.insert(('K', 0, 2), p2);
    tables.kmw.insert(2, FGAbGroup::cyclic(p2));
    let profile = CoefficientProfile::cd2_field("shape-test", tables).unwrap();
    (profile, assignment)
}

/// The expected cell shape for degrees n > 0: which table entries sit in the
/// column for pi_(n+w)+(w), deepest layer first, as (table, s, w) triples
/// with k = n div 8 (so the row index is n mod 8).
///
/// In the two diagonal-adjacent cells the published layers (second mod-2
/// cohomology over first cohomology) are the fundamental-ideal filtration of
/// the Milnor-Witt group in weights one and two; the profile supplies that
/// group directly, so those cells read from the Milnor-Witt table.
fn expected_shape(n: i64, w: i64) -> Vec<(char, i64, i64)> {
    if (n, w) == (1, 3) {
        return vec![('K', 0, 1)];
    }
    if (n, w) == (2, 2) {
        return vec![('K', 0, 2)];
    }
    let k = n.div_euclid(8);
    match (n.rem_euclid(8), w) {
        (0, 0) => vec![('h', 2, 4 * k + 1), ('h', 1, 4 * k + 1)],
        (0, 1) => vec![('H', 2, 4 * k + 1), ('h', 0, 4 * k)],
        (0, 2) => vec![],
        (0, 3) => vec![('H', 2, 4 * k + 1)],
        (1, 0) => vec![('h', 1, 4 * k + 1), ('h', 0, 4 * k + 1)],
        (1, 1) => vec![('H', 1, 4 * k + 1)],
        (1, 2) => vec![],
        (1, 3) => vec![('h', 2, 4 * k + 2), ('H', 1, 4 * k + 1)],
        (2, 0) => vec![('H', 2, 4 * k + 2), ('h', 0, 4 * k + 1)],
        (2, 1) => vec![],
        (2, 2) => vec![('H', 2, 4 * k + 2)],
        (2, 3) => vec![('h', 2, 4 * k + 2), ('h', 1, 4 * k + 2)],
        (3, 0) => vec![('H', 1, 4 * k + 2)],
        (3, 1) => vec![],
        (3, 2) => vec![('h', 2, 4 * k + 3), ('H', 1, 4 * k + 2)],
        (3, 3) => vec![('h', 1, 4 * k + 2), ('h', 0, 4 * k + 2)],
        (4, 0) => vec![],
        (4, 1) => vec![('H', 2, 4 * k + 3)],
        (4, 2) => vec![('h', 2, 4 * k + 3), ('h', 1, 4 * k + 3)],
        (4, 3) => vec![('H', 2, 4 * k + 3), ('h', 0, 4 * k + 2)],
        (5, 0) => vec![],
        (5, 1) => vec![('h', 2, 4 * k + 4), ('H', 1, 4 * k + 3)],
        (5, 2) => vec![('h', 1, 4 * k + 3), ('h', 0, 4 * k + 3)],
        (5, 3) => vec![('H', 1, 4 * k + 3)],
        (6, 0) => vec![('H', 2, 4 * k + 4)],
        (6, 1) => vec![('h', 2, 4 * k + 4), ('h', 1, 4 * k + 4)],
        (6, 2) => vec![('H', 2, 4 * k + 4), ('h', 0, 4 * k + 3)],
        (6, 3) => vec![],
        (7, 0) => vec![('h', 2, 4 * k + 5), ('H', 1, 4 * k + 4)],
        (7, 1) => vec![('h', 1, 4 * k + 4), ('h', 0, 4 * k + 4)],
        (7, 2) => vec![('H', 1, 4 * k + 4)],
        _ => vec![],
    }
}

#[test]
fn cd2_collapses_at_page_one() {
    let (profile, _) = distinct_prime_profile();
    let p1 = build_page1(&profile, 0, (-2, 20), None).unwrap();
    let p2 = apply_first_differential(&p1).unwrap();
    assert!(p2.collapsed_at_page_one, "a low-dimension base must have no first differential");
    let report = certify_collapse(&p2);
    assert!(report.certified);
    assert_eq!(report.from_page, 1);
}

#[test]
fn cd2_table_shape_matches() {
    let (profile, assignment) = distinct_prime_profile();
    let table = kq_table(&profile, (0, 20), &[0, 1, 2, 3]).unwrap();
    for n in 1..=16i64 {
        for w in 0..4i64 {
            let expected = expected_shape(n, w);
            let cell = table.cell(n + w, w).unwrap_or_else(|| panic!("cell ({}, {})", n + w, w));
            let expected_order: BigUint = expected
                .iter()
                .map(|key| BigUint::from(*assignment.get(key).unwrap_or(&1)))
                .product();
            // Distinct primes force a split, so the shape is fully resolved
            // and the group is the product of the assigned primes.
            let got = cell
                .value
                .as_ref()
                .unwrap_or_else(|| panic!("cell ({}, {}) unexpectedly ambiguous", n + w, w));
            assert_eq!(
                got.torsion_order(),
                expected_order,
                "wrong layer content at n = {}, weight {} (expected {:?})",
                n,
                w,
                expected
            );
            assert_eq!(got.free_rank, 0, "no free parts in the synthetic tables");
        }
    }
}

#[test]
fn shared_prime_extensions_stay_ambiguous() {
    // Same shape, but every entry is Z/5: the two-layer cells are now
    // genuinely undetermined extensions and must come back ambiguous with
    // both candidate middles.
    let mut tables = CD2Tables { max_weight: 30, ..CD2Tables::default() };
    for w in 1..=28i64 {
        for s in 1..=2i64 {
            tables.h.insert((s, w), FGAbGroup::cyclic(5));
        }
    }
    for w in 0..=28i64 {
        for s in 0..=2i64 {
            tables.h2.insert((s, w), FGAbGroup::cyclic(5));
        }
    }
    tables.kmw.insert(1, FGAbGroup::cyclic(5));
    tables.kmw.insert(2, FGAbGroup::cyclic(5));
    let profile = CoefficientProfile::cd2_field("ambiguous-test", tables).unwrap();
    let table = kq_table(&profile, (0, 20), &[0, 1, 2, 3]).unwrap();
    let mut ambiguous_seen = 0;
    for n in 1..=16i64 {
        for w in 0..4i64 {
            let expected = expected_shape(n, w);
            let cell = table.cell(n + w, w).unwrap();
            if expected.len() == 2 {
                let set = cell.ambiguous.as_ref().unwrap_or_else(|| {
                    panic!("two-layer cell at n = {}, w = {} must be ambiguous", n, w)
                });
                match set {
                    AmbiguousSet::Candidates(c) => {
                        assert_eq!(
                            c,
                            &vec![FGAbGroup::elementary(5, 2), FGAbGroup::cyclic(25)],
                            "candidates at n = {}, w = {}",
                            n,
                            w
                        );
                    }
                    AmbiguousSet::Unevaluated => panic!("desk-scale candidates must be listed"),
                }
                assert!(cell.value.is_none(), "an ambiguous cell must not print a group");
                ambiguous_seen += 1;
            } else if expected.len() == 1 {
                assert_eq!(cell.value.as_ref().unwrap().torsion_order(), BigUint::from(5u32));
            } else {
                assert!(cell.value.as_ref().unwrap().is_trivial());
            }
        }
    }
    assert!(ambiguous_seen > 10, "the window must exercise many undetermined cells");
}

#[test]
fn profile_json_roundtrip_and_errors() {
    let doc = r#"{
        "name": "demo",
        "tables": {
            "H": [[1, 1, "Z/3"], [2, 2, "Z/9"]],
            "h2": [[0, 1, "Z/2"], [1, 1, "Z/2"]],
            "h3": [],
            "kmw": [[0, "Z"], [1, "Z/2"]],
            "max_weight": 8
        }
    }"#;
    let p = CoefficientProfile::from_json(doc).unwrap();
    assert_eq!(p.name, "demo");
    assert_eq!(p.integral(1, 1).unwrap().group, FGAbGroup::cyclic(3));
    assert_eq!(p.mod2(0, 1).unwrap().group, FGAbGroup::cyclic(2));
    assert_eq!(p.kmw(1).unwrap().group, FGAbGroup::cyclic(2));
    assert!(p.kmw(5).unwrap().group.is_trivial());
    // Queries beyond the declared window are refused.
    assert!(p.integral(1, 9).is_err());

    // Malformed group literal is rejected with the offending bidegree.
    let bad = r#"{"name": "bad", "tables": {"H": [[1, 4, "Z%7"]]}}"#;
    let err = CoefficientProfile::from_json(bad).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("(1, 4)"), "error must cite the offending entry: {}", msg);

    // Entries violating the dimension bound are rejected.
    let too_deep = r#"{"name": "deep", "tables": {"H": [[3, 5, "Z/7"]]}}"#;
    assert!(CoefficientProfile::from_json(too_deep).is_err());

    // Milnor-Witt data above weight two must vanish.
    let bad_kmw = r#"{"name": "kmw", "tables": {"kmw": [[4, "Z/3"]]}}"#;
    assert!(CoefficientProfile::from_json(bad_kmw).is_err());
}
