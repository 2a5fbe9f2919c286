use std::collections::BTreeSet;
use std::sync::Arc;

use commcalc::algebra::{direct_product, AlgRef, FiniteAlgebra, Subuniverse};
use commcalc::cli::{parse_algebra_file, serialize_algebra, AlgebraRecord};
use commcalc::commutator::{higgins, huq, smith, smith_oracle};
use commcalc::congruence::{all_congruences, congruence_meet};
use commcalc::library::{builtin, digroups, group_malcev, na_rings, ring_signature};
use commcalc::search::{canonical_form, enumerate_models, fingerprint, EnumOptions};
use commcalc::Budget;
use proptest::prelude::*;

/// Least set containing `gens` and the constants closed under every
/// operation, by brute-force iteration.
fn naive_closure(a: &FiniteAlgebra, gens: &[usize]) -> Vec<usize> {
    let sig = a.signature();
    let mut set: BTreeSet<usize> = gens.iter().copied().collect();
    set.insert(0);
    loop {
        let members: Vec<usize> = set.iter().copied().collect();
        let mut grew = false;
        for op in 0..sig.len() {
            let arity = sig.arity(op);
            let mut idx = vec![0usize; arity];
            loop {
                let args: Vec<usize> = idx.iter().map(|&i| members[i]).collect();
                grew |= set.insert(a.apply(op, &args));
                let mut p = arity;
                let more = loop {
                    if p == 0 {
                        break false;
                    }
                    p -= 1;
                    idx[p] += 1;
                    if idx[p] < members.len() {
                        break true;
                    }
                    idx[p] = 0;
                };
                if !more {
                    break;
                }
            }
        }
        if !grew {
            return set.into_iter().collect();
        }
    }
}

fn closure_algebras() -> Vec<AlgRef> {
    let budget = Budget::default();
    let x = builtin("X").unwrap();
    let (x3, _) = direct_product(&[x.clone(), x.clone(), x], &budget).unwrap();
    let mut out = vec![
        builtin("Z4").unwrap(),
        builtin("D4").unwrap(),
        builtin("paperC").unwrap(),
        x3,
    ];
    for v in [digroups(), na_rings()] {
        let models = enumerate_models(&v, 4, &EnumOptions::default()).unwrap().models;
        out.extend(models.into_iter().take(6).map(Arc::new));
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generation_matches_brute_force(which in 0usize..16, picks in prop::collection::vec(0usize..64, 0..3)) {
        let algs = closure_algebras();
        let a = &algs[which % algs.len()];
        let gens: Vec<usize> = picks.iter().map(|p| p % a.size()).collect();
        let fast = Subuniverse::generate(a, &gens, &Budget::default()).unwrap();
        let slow = naive_closure(a, &gens);
        prop_assert_eq!(fast.members(), slow.as_slice());
    }

    #[test]
    fn relabelling_preserves_fingerprint_and_canonical_form(which in 0usize..16, seed in any::<u64>()) {
        let algs = closure_algebras();
        let a = &algs[which % algs.len()];
        let mut tail: Vec<usize> = (1..a.size()).collect();
        let mut s = seed;
        for i in (1..tail.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            tail.swap(i, (s >> 33) as usize % (i + 1));
        }
        let perm: Vec<usize> = std::iter::once(0).chain(tail).collect();
        let b = a.relabel(&perm).unwrap();
        prop_assert_eq!(fingerprint(a), fingerprint(&b));
        prop_assert_eq!(canonical_form(a, 5040), canonical_form(&b, 5040));
    }

    #[test]
    fn higgins_is_symmetric_and_below_huq_in_groups(which in 0usize..4, k in prop::collection::vec(0usize..24, 1..3), l in prop::collection::vec(0usize..24, 1..3)) {
        let budget = Budget::default();
        let g = builtin(["S3", "D4", "Q8", "A4"][which]).unwrap();
        let gen = |v: &[usize]| {
            let picked: Vec<usize> = v.iter().map(|p| p % g.size()).collect();
            Subuniverse::generate(&g, &picked, &budget).unwrap()
        };
        let (ks, ls) = (gen(&k), gen(&l));
        let kl = higgins(&g, &ks, &ls, &budget).unwrap();
        prop_assert_eq!(&kl, &higgins(&g, &ls, &ks, &budget).unwrap());
        prop_assert!(kl.is_subset(&ks.join(&ls, &budget).unwrap()));
        prop_assert!(kl.is_subset(&huq(&g, &ks, &ls, &budget).unwrap()));
    }

    #[test]
    fn smith_matches_its_oracle_and_lies_below_the_meet(which in 0usize..5, i in 0usize..64, j in 0usize..64) {
        let budget = Budget::default();
        let g = builtin(["S3", "D4", "Q8", "Z2xZ2", "A4"][which]).unwrap();
        let p = group_malcev("mul", "inv");
        let lattice = all_congruences(&g, &budget).unwrap();
        let (r, s) = (&lattice[i % lattice.len()], &lattice[j % lattice.len()]);
        let t = smith(&g, r, s, &p, &budget).unwrap();
        prop_assert_eq!(&t, &smith_oracle(&g, r, s, &p, &budget).unwrap());
        prop_assert_eq!(&t, &smith(&g, s, r, &p, &budget).unwrap());
        prop_assert!(t.le(&congruence_meet(r, s).unwrap()));
    }

    #[test]
    fn serialization_round_trips_arbitrary_ring_tables(n in 1usize..5, seed in any::<u64>()) {
        let mut s = seed;
        let mut next = |m: usize| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 33) as usize % m
        };
        let tables = vec![
            vec![0],
            (0..n * n).map(|_| next(n)).collect(),
            (0..n).map(|_| next(n)).collect(),
            (0..n * n).map(|_| next(n)).collect(),
        ];
        let a = FiniteAlgebra::new("R", ring_signature(), n, tables).unwrap();
        let text = serialize_algebra(&AlgebraRecord::new(Arc::new(a.clone())));
        let back = parse_algebra_file(&text).unwrap();
        prop_assert_eq!(back.algebras[0].algebra.tables(), a.tables());
        prop_assert_eq!(serialize_algebra(&back.algebras[0]), text);
    }
}
