use std::collections::BTreeSet;

use commcalc::algebra::{AlgRef, FiniteAlgebra};
use commcalc::library::{builtin, cyclic, digroups, groups, loops, na_rings, VarietySpec};
use commcalc::search::{
    canonical_form, enumerate_models, fingerprint, fingerprint_classes, find_witness, validate_witness, EnumOptions,
    GoalKind, ReplayStep, SearchGoal, Witness,
};
use commcalc::Budget;

fn labelled() -> EnumOptions {
    EnumOptions { symmetry_breaking: false, ..EnumOptions::default() }
}

fn reduced() -> EnumOptions {
    EnumOptions::default()
}

fn classes(models: &[FiniteAlgebra]) -> BTreeSet<Vec<Vec<usize>>> {
    models.iter().map(|m| canonical_form(m, 1 << 20).expect("small colour classes")).collect()
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Relabellings fixing 0 that leave every table unchanged.
fn automorphisms(a: &FiniteAlgebra) -> u64 {
    let mut tail: Vec<usize> = (1..a.size()).collect();
    let mut count = 0;
    loop {
        let perm: Vec<usize> = std::iter::once(0).chain(tail.iter().copied()).collect();
        if a.relabel(&perm).unwrap().tables() == a.tables() {
            count += 1;
        }
        if !next_permutation(&mut tail) {
            return count;
        }
    }
}

/// Labelled models on a fixed carrier, counted by orbit-stabiliser from
/// one representative per isomorphism type.
fn labelled_count(types: &[AlgRef]) -> u64 {
    let n = types[0].size();
    let fact: u64 = (1..n as u64).product();
    types.iter().map(|g| fact / automorphisms(g)).sum()
}

#[test]
fn labelled_group_counts_match_orbit_stabiliser() {
    let z2xz2 = builtin("Z2xZ2").unwrap();
    let cases: Vec<(usize, Vec<AlgRef>)> = vec![
        (2, vec![cyclic(2)]),
        (3, vec![cyclic(3)]),
        (4, vec![cyclic(4), z2xz2]),
        (5, vec![cyclic(5)]),
        (6, vec![cyclic(6), builtin("S3").unwrap()]),
    ];
    for (n, types) in cases {
        let e = enumerate_models(&groups(), n, &labelled()).unwrap();
        assert!(e.complete);
        assert_eq!(e.models.len() as u64, labelled_count(&types), "n = {n}");
    }
}

#[test]
fn reduced_group_enumeration_keeps_every_isomorphism_type() {
    for (n, types) in [(4, 2), (6, 2), (8, 5)] {
        let e = enumerate_models(&groups(), n, &reduced()).unwrap();
        assert!(e.complete);
        assert_eq!(classes(&e.models).len(), types, "n = {n}");
    }
}

#[test]
fn fingerprints_separate_the_groups_of_order_four_and_eight() {
    let e4 = enumerate_models(&groups(), 4, &labelled()).unwrap();
    assert_eq!(fingerprint_classes(&e4.models).0, 2);
    let e8 = enumerate_models(&groups(), 8, &reduced()).unwrap();
    assert_eq!(fingerprint_classes(&e8.models).0, 5);
}

#[test]
fn fingerprint_is_a_relabelling_invariant() {
    let d4 = builtin("D4").unwrap();
    let perm = [0, 3, 1, 7, 2, 6, 4, 5];
    let moved = d4.relabel(&perm).unwrap();
    assert_eq!(fingerprint(&d4), fingerprint(&moved));
    assert_eq!(canonical_form(&d4, 1 << 20), canonical_form(&moved, 1 << 20));
    assert_ne!(fingerprint(&d4), fingerprint(&builtin("Q8").unwrap()));
}

fn same_types(v: &VarietySpec, n: usize) {
    let plain = enumerate_models(v, n, &labelled()).unwrap();
    let fast = enumerate_models(v, n, &reduced()).unwrap();
    assert!(plain.complete && fast.complete);
    assert_eq!(classes(&plain.models), classes(&fast.models), "{} n = {n}", v.name);
    assert!(fast.models.len() <= plain.models.len());
}

#[test]
fn block_split_digroup_enumeration_agrees_with_labelled_enumeration() {
    for n in 1..=5 {
        same_types(&digroups(), n);
    }
}

#[test]
fn symmetry_breaking_preserves_types_in_other_varieties() {
    for n in 1..=4 {
        same_types(&na_rings(), n);
        same_types(&loops(), n);
    }
}

#[test]
fn digroup_type_counts() {
    let counts: Vec<usize> = (1..=5)
        .map(|n| classes(&enumerate_models(&digroups(), n, &reduced()).unwrap().models).len())
        .collect();
    assert_eq!(counts, [1, 1, 1, 5, 3]);
}

#[test]
fn groups_have_no_sh_gap_up_to_six() {
    let out = find_witness(&SearchGoal::new(GoalKind::ShGap, groups(), 6), 1, &Budget::default()).unwrap();
    assert!(out.witness.is_none());
    assert!(!out.exhausted);
    assert!(out.sizes.iter().all(|s| s.complete));
}

#[test]
fn search_is_deterministic_across_job_counts() {
    let goal = SearchGoal::new(GoalKind::NhGap, digroups(), 5);
    let a = find_witness(&goal, 1, &Budget::default()).unwrap();
    let b = find_witness(&goal, 4, &Budget::default()).unwrap();
    assert_eq!(a.sizes, b.sizes);
    assert_eq!(a.witness, b.witness);
}

fn s3_witness() -> Witness {
    let s3 = builtin("S3").unwrap();
    Witness {
        kind: GoalKind::NhGap,
        variety: "groups".into(),
        size: 6,
        tables: s3.tables().to_vec(),
        replay: vec![
            ReplayStep::Higgins { k: (0..6).collect(), l: (0..6).collect(), result: vec![0, 2, 5] },
            ReplayStep::IsIdeal { set: vec![0, 2, 5], result: true },
            ReplayStep::SmithNormalised { k: vec![0, 2, 5], l: (0..6).collect(), result: vec![0, 2, 5] },
        ],
    }
}

#[test]
fn validate_witness_accepts_true_replays_and_rejects_perturbations() {
    let budget = Budget::default();
    let good = s3_witness();
    let check = validate_witness(&good, &budget);
    assert!(check.valid, "{:?}", check.details);

    let mut wrong_result = good.clone();
    wrong_result.replay[0] = ReplayStep::Higgins { k: (0..6).collect(), l: (0..6).collect(), result: vec![0, 1] };
    assert!(!validate_witness(&wrong_result, &budget).valid);

    let mut wrong_flag = good.clone();
    wrong_flag.replay[1] = ReplayStep::IsIdeal { set: vec![0, 2, 5], result: false };
    assert!(!validate_witness(&wrong_flag, &budget).valid);

    let mut wrong_table = good.clone();
    let mul = &mut wrong_table.tables[1];
    mul.swap(7, 8);
    assert!(!validate_witness(&wrong_table, &budget).valid);

    let mut wrong_variety = good;
    wrong_variety.variety = "abelian-groups".into();
    assert!(!validate_witness(&wrong_variety, &budget).valid);
}
