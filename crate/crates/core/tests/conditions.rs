use commcalc::conditions::{
    abelianise, centre, check_uce_instance, condition_suite, grun_check, is_central_extension,
    is_perfect, law_suite, LawConfig,
};
use commcalc::library::{builtin, cyclic, group_malcev, library, symmetric3};
use commcalc::report::Verdict;
use commcalc::Budget;

fn m() -> commcalc::algebra::Term {
    group_malcev("mul", "inv")
}

#[test]
fn abelianisation_examples() {
    let b = Budget::default();
    assert_eq!(abelianise(&symmetric3(), &b).unwrap().0.size(), 2);
    assert_eq!(abelianise(&cyclic(4), &b).unwrap().0.size(), 4);
    assert_eq!(abelianise(&builtin("A5").unwrap(), &b).unwrap().0.size(), 1);
}

#[test]
fn perfectness_examples() {
    let b = Budget::default();
    assert!(is_perfect(&builtin("A5").unwrap(), &b).unwrap());
    assert!(!is_perfect(&symmetric3(), &b).unwrap());
    assert!(is_perfect(&cyclic(1), &b).unwrap());
}

#[test]
fn centre_examples() {
    let b = Budget::default();
    assert!(centre(&symmetric3(), &m(), &b).unwrap().is_trivial());
    assert_eq!(centre(&builtin("Q8").unwrap(), &m(), &b).unwrap().len(), 2);
    let z4 = cyclic(4);
    assert!(centre(&z4, &m(), &b).unwrap().is_full());
    assert_eq!(centre(&builtin("D4").unwrap(), &m(), &b).unwrap().len(), 2);
}

#[test]
fn central_extension_examples() {
    let b = Budget::default();
    let lib = library();
    assert!(is_central_extension(lib.hom("z4_to_z2").unwrap(), &m(), &b).unwrap());
    assert!(!is_central_extension(lib.hom("s3_sign").unwrap(), &m(), &b).unwrap());
}

#[test]
fn uce_record_for_identities() {
    let b = Budget::default();
    let lib = library();
    let id = lib.hom("id_A5").unwrap();
    let r = check_uce_instance(id, id, &m(), &b).unwrap();
    assert!(r.middle_perfect && r.f_central && r.g_central && r.composite_central);
    assert!(!r.gap());
    assert!(check_uce_instance(lib.hom("s3_sign").unwrap(), id, &m(), &b).is_err());
}

#[test]
fn grun_skips_non_perfect() {
    let b = Budget::default();
    assert_eq!(grun_check(&cyclic(4), &m(), &b).unwrap().verdict, Verdict::Skipped);
    assert_eq!(grun_check(&builtin("A5").unwrap(), &m(), &b).unwrap().verdict, Verdict::Pass);
}

#[test]
fn abelian_groups_pass_every_condition_trivially() {
    let b = Budget::default();
    for name in ["Z2", "Z4", "Z2xZ2"] {
        let r = condition_suite(&builtin(name).unwrap(), &m(), &b).unwrap();
        assert!(r.passed(), "{name}");
    }
}

#[test]
fn law_suite_on_s3_is_vacuous_for_perfect_quotients() {
    let b = Budget::default();
    let s3 = symmetric3();
    let r = law_suite(&s3, &m(), &LawConfig::default(), &b).unwrap();
    assert!(r.passed());
    let joins: Vec<_> = r.results.iter().filter(|c| c.id.starts_with("join-kernel-derived")).collect();
    assert_eq!(joins.len(), 1);
}
