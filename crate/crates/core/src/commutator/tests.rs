use super::*;
use crate::congruence::{all_ideals, congruence_generate};
use crate::library::{builtin, cyclic, find_element_of_order, group_malcev, symmetric3};

fn malcev() -> Term {
    group_malcev("mul", "inv")
}

fn a3(s3: &AlgRef) -> Subuniverse {
    let c = find_element_of_order(s3, 3).unwrap();
    Subuniverse::generate(s3, &[c], &Budget::default()).unwrap()
}

#[test]
fn higgins_examples() {
    let b = Budget::default();
    let s3 = symmetric3();
    let all = Subuniverse::full(&s3);
    let alt = a3(&s3);
    assert_eq!(higgins(&s3, &all, &all, &b).unwrap(), alt);
    assert!(higgins(&s3, &alt, &alt, &b).unwrap().is_trivial());
    assert!(higgins(&s3, &all, &Subuniverse::zero(&s3), &b).unwrap().is_trivial());

    let q8 = builtin("Q8").unwrap();
    let q = Subuniverse::full(&q8);
    assert_eq!(higgins(&q8, &q, &q, &b).unwrap().len(), 2);
}

#[test]
fn ternary_examples() {
    let b = Budget::default();
    let s3 = symmetric3();
    let all = Subuniverse::full(&s3);
    assert_eq!(higgins3(&s3, &all, &all, &all, &b).unwrap(), a3(&s3));
    let z4 = cyclic(4);
    let f = Subuniverse::full(&z4);
    assert!(higgins3(&z4, &f, &f, &f, &b).unwrap().is_trivial());
    assert!(higgins3(&z4, &f, &f, &Subuniverse::zero(&z4), &b)
        .unwrap()
        .is_trivial());
}

#[test]
fn huq_examples() {
    let b = Budget::default();
    let s3 = symmetric3();
    let all = Subuniverse::full(&s3);
    let alt = a3(&s3);
    assert!(huq(&s3, &alt, &alt, &b).unwrap().is_trivial());
    assert_eq!(huq(&s3, &all, &all, &b).unwrap(), alt);
    // [t, t] is trivial but [t, S3] is not normal: its closure is A3.
    let t = Subuniverse::generate(&s3, &[find_element_of_order(&s3, 2).unwrap()], &b).unwrap();
    assert_eq!(higgins(&s3, &t, &all, &b).unwrap(), alt);
}

#[test]
fn centralizes_examples() {
    let b = Budget::default();
    let z4 = cyclic(4);
    let s3 = symmetric3();
    assert!(centralizes(&z4, &Congruence::nabla(&z4), &Congruence::nabla(&z4), &malcev(), &b).unwrap());
    assert!(!centralizes(&s3, &Congruence::nabla(&s3), &Congruence::nabla(&s3), &malcev(), &b).unwrap());
    assert!(centralizes(&s3, &Congruence::delta(&s3), &Congruence::nabla(&s3), &malcev(), &b).unwrap());
}

#[test]
fn smith_examples() {
    let b = Budget::default();
    let z4 = cyclic(4);
    let nz = Congruence::nabla(&z4);
    assert!(smith(&z4, &nz, &nz, &malcev(), &b).unwrap().is_delta());
    assert!(smith_oracle(&z4, &nz, &nz, &malcev(), &b).unwrap().is_delta());

    let s3 = symmetric3();
    let n = Congruence::nabla(&s3);
    let alt = denormalise(&s3, &a3(&s3)).unwrap();
    assert_eq!(smith(&s3, &n, &n, &malcev(), &b).unwrap(), alt);
    assert_eq!(smith_oracle(&s3, &n, &n, &malcev(), &b).unwrap(), alt);
    assert!(smith_oracle(&s3, &alt, &alt, &malcev(), &b).unwrap().is_delta());
    assert!(smith(&s3, &Congruence::delta(&s3), &n, &malcev(), &b).unwrap().is_delta());
}

#[test]
fn smith_normalised_examples() {
    let b = Budget::default();
    let s3 = symmetric3();
    let all = Subuniverse::full(&s3);
    let alt = a3(&s3);
    assert_eq!(smith_normalised(&s3, &alt, &all, &malcev(), &b).unwrap(), alt);
    let z4 = cyclic(4);
    let two = Subuniverse::from_members(&z4, &[0, 2]).unwrap();
    assert!(smith_normalised(&z4, &two, &Subuniverse::full(&z4), &malcev(), &b)
        .unwrap()
        .is_trivial());
}

#[test]
fn malcev_validation_rejects_non_malcev_terms() {
    let s3 = symmetric3();
    let bad = Term::binary("mul", Term::var(0), Term::var(2));
    assert!(matches!(validate_malcev(&s3, &bad), Err(Error::NotMalcev { .. })));
    let r = congruence_generate(&s3, &[]).unwrap();
    assert!(smith(&s3, &r, &r, &bad, &Budget::default()).is_err());
}

#[test]
fn word_oracle_agrees_on_small_groups() {
    let b = Budget::default();
    for name in ["S3", "D4", "Q8", "A4"] {
        let g = builtin(name).unwrap();
        let ideals = all_ideals(&g, &b).unwrap();
        for k in &ideals {
            for l in &ideals {
                assert_eq!(
                    higgins(&g, k, l, &b).unwrap(),
                    commutator_word_oracle(&g, k, l, &b).unwrap(),
                    "{name}"
                );
            }
        }
    }
}

#[test]
fn budget_is_enforced() {
    let s3 = symmetric3();
    let mut b = Budget::default();
    b.max_closure = 10;
    let all = Subuniverse::full(&s3);
    assert!(matches!(
        higgins(&s3, &all, &all, &b),
        Err(Error::BudgetExceeded { .. })
    ));
}

#[test]
fn substitution_construction_overshoots_on_s3() {
    let b = Budget::default();
    let s3 = symmetric3();
    let all = Subuniverse::full(&s3);
    assert!(higgins3_substitution(&s3, &all, &all, &all, &b).unwrap().is_full());
}

