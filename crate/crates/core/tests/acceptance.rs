//! One line per acceptance criterion, run in order with wall-clock limits.
//! The test fails if any criterion fails.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use commcalc::algebra::{eval_term, AlgRef, Homomorphism, Subuniverse};
use commcalc::cli::{library_file, parse_algebra_file, run_with, serialize_file};
use commcalc::commutator::{commutator_word_oracle, higgins, huq, smith, smith_normalised, smith_oracle};
use commcalc::conditions::{
    centre, commutator_law_report, condition_suite, grun_check, is_central_extension, is_perfect, law_suite,
    LawConfig,
};
use commcalc::congruence::{all_congruences, all_ideals, is_ideal, normal_closure};
use commcalc::library::{
    all_subuniverses, build_paper_c, builtin, c_product, digroups, groups, library, loops, malcev_for, na_rings,
    paper_suite, pixley_term, pixley_triples, printed_pixley_term, triple,
};
use commcalc::report::Verdict;
use commcalc::search::{enumerate_models, find_witness, fingerprint_classes, validate_witness, EnumOptions, GoalKind, SearchGoal};
use commcalc::Budget;

type Check = Result<String, String>;

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn alg(name: &str) -> AlgRef {
    builtin(name).unwrap_or_else(|| panic!("library algebra {name}"))
}

fn worked_example() -> Check {
    let budget = Budget::default();
    let d = build_paper_c().map_err(err)?;
    ensure(c_product(triple(1, 0, 0), triple(1, 1, 1)) == triple(1, 1, 0), || "(1,0,0)(1,1,1) != (1,1,0)".into())?;
    ensure(d.c.apply_named("mul", &[4, 7]).map_err(err)? == 6, || "table of C disagrees with the product".into())?;
    // Both rows are points, u is a morphism of points, and the kernel
    // square commutes.
    let same = |a: &Homomorphism, b: &Homomorphism| a.map() == b.map();
    let id_x = Homomorphism::identity(&d.x);
    let zero = Homomorphism::zero(&d.xx, &d.x).map_err(err)?;
    ensure(same(&d.pi2.after(&d.incl2).map_err(err)?, &id_x), || "pi2 <0,1> != id".into())?;
    ensure(same(&d.p.after(&d.s).map_err(err)?, &id_x), || "p s != id".into())?;
    ensure(same(&d.p.after(&d.u).map_err(err)?, &d.pi2), || "p u != pi2".into())?;
    ensure(same(&d.u.after(&d.incl2).map_err(err)?, &d.s), || "u <0,1> != s".into())?;
    ensure(same(&d.p.after(&d.k).map_err(err)?, &zero), || "p k != 0".into())?;
    ensure(same(&d.k.after(&d.incl1).map_err(err)?, &d.u.after(&d.incl1).map_err(err)?), || "k<1,0> != u<1,0>".into())?;
    let image = d.u.after(&d.incl1).map_err(err)?.image();
    ensure(!is_ideal(&d.c, &image).map_err(err)?, || "image of u<1,0> is an ideal".into())?;
    let closure = normal_closure(&d.c, image.members()).map_err(err)?;
    ensure(closure.contains(triple(1, 1, 0)), || "(1,1,0) not in the normal closure".into())?;
    let report = paper_suite(&budget).map_err(err)?;
    ensure(report.passed(), || format!("suite failures: {:?}", report.failures().map(|r| &r.id).collect::<Vec<_>>()))?;
    Ok(format!("image {:?}, normal closure {:?}", image.members(), closure.members()))
}

fn pixley_errata() -> Check {
    let d = build_paper_c().map_err(err)?;
    // p(x, y, x) = x at (x, y) = (0, 1).
    let printed = eval_term(&d.x, &printed_pixley_term(), &[0, 1, 0]).map_err(err)?;
    ensure(printed != 0, || "printed term satisfies p(0,1,0) = 0".into())?;
    let (on_x, fx) = pixley_triples(&d.x, &pixley_term()).map_err(err)?;
    let (on_c, fc) = pixley_triples(&d.c, &pixley_term()).map_err(err)?;
    ensure(on_x == 8 && on_c == 512 && fx.is_none() && fc.is_none(), || format!("corrected term: X {on_x} {fx:?}, C {on_c} {fc:?}"))?;
    Ok(format!("printed term gives p(0,1,0) = {printed}; corrected term holds on {on_x} + {on_c} triples"))
}

const SMALL_GROUPS: [&str; 7] = ["Z2", "Z4", "Z2xZ2", "S3", "D4", "Q8", "A4"];

fn identity_suite() -> Check {
    let budget = Budget::default();
    let mut count = 0;
    for name in SMALL_GROUPS {
        let x = alg(name);
        let p = malcev_for(&x, &budget).ok_or("no Mal'cev term")?;
        let all = Subuniverse::full(&x);
        for k in all_ideals(&x, &budget).map_err(err)? {
            let s = smith_normalised(&x, &k, &all, &p, &budget).map_err(err)?;
            let q = huq(&x, &k, &all, &budget).map_err(err)?;
            let h = higgins(&x, &k, &all, &budget).map_err(err)?;
            ensure(s == q && q == h, || format!("{name} K={:?}: smith {:?} huq {:?} higgins {:?}", k.members(), s.members(), q.members(), h.members()))?;
            count += 1;
        }
    }
    Ok(format!("{count} ideals over {} groups", SMALL_GROUPS.len()))
}

fn group_conditions() -> Check {
    let budget = Budget::default();
    let mut results = 0;
    for name in SMALL_GROUPS {
        let x = alg(name);
        let p = malcev_for(&x, &budget).ok_or("no Mal'cev term")?;
        let report = condition_suite(&x, &p, &budget).map_err(err)?;
        for prefix in ["sh:", "nh:", "wnh:", "pa-smith:", "pa-ternary:", "pa-agree:", "hvdl:"] {
            ensure(report.results.iter().any(|r| r.id.starts_with(prefix)), || format!("{name}: no {prefix} results"))?;
        }
        let failed: Vec<&str> = report.failures().map(|r| r.id.as_str()).collect();
        ensure(failed.is_empty(), || format!("{name}: {failed:?}"))?;
        results += report.results.len();
    }
    Ok(format!("{results} per-instance results, all pass"))
}

/// Every algebra of size at most six used in the tests, with a Mal'cev term.
fn small_test_algebras(budget: &Budget) -> Vec<(AlgRef, commcalc::algebra::Term)> {
    let mut out = Vec::new();
    for e in &library().entries {
        if e.algebra.size() <= 6 {
            if let Some(p) = malcev_for(&e.algebra, budget) {
                out.push((e.algebra.clone(), p));
            }
        }
    }
    for (v, max) in [(groups(), 6), (digroups(), 6), (na_rings(), 6), (loops(), 6)] {
        let p = v.malcev.clone().expect("variety has a Mal'cev term");
        for n in 1..=max {
            for m in enumerate_models(&v, n, &EnumOptions::default()).unwrap().models {
                out.push((Arc::new(m), p.clone()));
            }
        }
    }
    out
}

fn oracle_equivalence() -> Check {
    let budget = Budget::default();
    let algebras = small_test_algebras(&budget);
    let mut pairs = 0;
    for (x, p) in &algebras {
        let lattice = all_congruences(x, &budget).map_err(err)?;
        for r in &lattice {
            for s in &lattice {
                let fast = smith(x, r, s, p, &budget).map_err(err)?;
                let slow = smith_oracle(x, r, s, p, &budget).map_err(err)?;
                ensure(fast == slow, || format!("{}: smith {:?} oracle {:?}", x.name(), fast.blocks(), slow.blocks()))?;
                pairs += 1;
            }
        }
    }
    let mut words = 0;
    for e in &library().entries {
        let x = &e.algebra;
        if !x.is_group() {
            continue;
        }
        let subs = if x.size() <= 24 {
            all_subuniverses(x, 1 << 12, &budget).map_err(err)?
        } else {
            all_ideals(x, &budget).map_err(err)?
        };
        for k in &subs {
            for l in &subs {
                let h = higgins(x, k, l, &budget).map_err(err)?;
                let w = commutator_word_oracle(x, k, l, &budget).map_err(err)?;
                ensure(h == w, || format!("{}: higgins {:?} words {:?}", x.name(), h.members(), w.members()))?;
                words += 1;
            }
        }
    }
    Ok(format!("{pairs} congruence pairs on {} algebras; {words} subgroup pairs", algebras.len()))
}

fn perfect_groups() -> Check {
    let budget = Budget::default();
    let (a5, sl) = (alg("A5"), alg("SL25"));
    let p = malcev_for(&sl, &budget).ok_or("no Mal'cev term")?;
    ensure(is_perfect(&a5, &budget).map_err(err)?, || "A5 not perfect".into())?;
    ensure(is_perfect(&sl, &budget).map_err(err)?, || "SL(2,5) not perfect".into())?;
    let z = centre(&sl, &p, &budget).map_err(err)?;
    ensure(z.len() == 2, || format!("centre of SL(2,5) has {} elements", z.len()))?;
    let f = library().hom("sl25_to_a5").ok_or("no hom sl25_to_a5")?.clone();
    ensure(is_central_extension(&f, &p, &budget).map_err(err)?, || "SL(2,5) -> A5 not central".into())?;
    for g in [&sl, &a5] {
        let r = grun_check(g, &p, &budget).map_err(err)?;
        ensure(r.verdict == Verdict::Pass, || format!("{}: {:?}", g.name(), r.verdict))?;
    }
    let derived = higgins(&sl, &Subuniverse::full(&sl), &Subuniverse::full(&sl), &budget).map_err(err)?;
    let joined = f.kernel().join(&derived, &budget).map_err(err)?;
    ensure(joined.is_full(), || "Ker f v [A,A] != A".into())?;
    let laws = law_suite(&sl, &p, &LawConfig::default(), &budget).map_err(err)?;
    let failed: Vec<&str> = laws.failures().map(|r| r.id.as_str()).collect();
    ensure(failed.is_empty(), || format!("extension laws on SL(2,5): {failed:?}"))?;
    ensure(laws.results.iter().any(|r| r.id.starts_with("join-kernel-derived:")), || "no perfect quotients tested".into())?;
    Ok(format!("|Z(SL(2,5))| = {}, {} extension-law results", z.len(), laws.results.len()))
}

fn commutator_laws() -> Check {
    let budget = Budget::default();
    let pool = ["Z4", "Z2xZ2", "S3", "D4", "Q8", "A4", "X"];
    let per = 30;
    let mut triples = BTreeSet::new();
    let mut laws = BTreeSet::new();
    for (i, name) in pool.into_iter().enumerate() {
        let report = commutator_law_report(&alg(name), 1000 + i as u64, per, &budget).map_err(err)?;
        for r in &report.results {
            let (law, t) = r.id.split_once(':').ok_or("malformed id")?;
            ensure(r.verdict != Verdict::Fail, || format!("{name}: construction falsifier {} {:?}", r.id, r.witness))?;
            triples.insert((name, t.to_string()));
            laws.insert(law.to_string());
        }
    }
    ensure(triples.len() >= 200, || format!("only {} triples", triples.len()))?;
    Ok(format!("{} triples, laws {:?}", triples.len(), laws))
}

fn search_soundness() -> Check {
    let budget = Budget::default();
    let g = find_witness(&SearchGoal::new(GoalKind::ShGap, groups(), 6), 1, &budget).map_err(err)?;
    ensure(g.witness.is_none() && !g.exhausted, || "groups up to 6 did not finish with none".into())?;
    let d = find_witness(&SearchGoal::new(GoalKind::ShGap, digroups(), 8), 1, &budget).map_err(err)?;
    ensure(!d.exhausted, || "digroup search ran out of budget".into())?;
    let found = match &d.witness {
        Some(w) => {
            let check = validate_witness(w, &budget);
            ensure(check.valid, || format!("witness fails replay: {:?}", check.details))?;
            format!("witness at size {}", w.size)
        }
        None => "no witness".into(),
    };
    let models = enumerate_models(&groups(), 4, &EnumOptions { symmetry_breaking: false, ..EnumOptions::default() })
        .map_err(err)?
        .models;
    let (classes, _) = fingerprint_classes(&models);
    ensure(classes == 2, || format!("{classes} fingerprint classes at n = 4"))?;
    let nodes: u64 = d.sizes.iter().map(|s| s.nodes).sum();
    Ok(format!("groups: none; digroups <= 8: {found}, {nodes} nodes; n = 4: 2 classes"))
}

fn cli_run(args: &[&str]) -> (i32, Vec<u8>) {
    let argv: Vec<OsString> = std::iter::once("commcalc").chain(args.iter().copied()).map(OsString::from).collect();
    let (mut out, mut sink) = (Vec::new(), Vec::new());
    let code = run_with(argv, &mut out, &mut sink);
    (code, out)
}

fn cli_stability() -> Check {
    for entry in &library().entries {
        let once = parse_algebra_file(&serialize_file(&library_file(entry))).map_err(err)?;
        let text = serialize_file(&once);
        let twice = parse_algebra_file(&text).map_err(err)?;
        ensure(serialize_file(&twice) == text, || format!("{} is not idempotent", entry.name))?;
    }
    let commands: [&[&str]; 5] = [
        &["--json", "paper-suite"],
        &["--json", "check", "--condition", "wnh", "--algebra", "builtin:paperC"],
        &["--json", "--seed", "3", "check", "--condition", "laws", "--algebra", "builtin:S3"],
        &["--json", "search", "--goal", "nh-gap", "--variety", "digroups", "--max-size", "5"],
        &["--json", "commutator", "--kind", "smith", "--algebra", "builtin:D4", "--left", "all", "--right", "all"],
    ];
    for args in commands {
        let (first, second) = (cli_run(args), cli_run(args));
        ensure(first == second, || format!("output differs for {args:?}"))?;
        ensure(first.0 == 0, || format!("exit {} for {args:?}", first.0))?;
    }
    let (code, witness) = cli_run(&["search", "--goal", "nh-gap", "--variety", "digroups", "--max-size", "8"]);
    ensure(code == 1, || format!("witness search exit {code}"))?;
    let witness = String::from_utf8(witness).map_err(err)?;
    let back = parse_algebra_file(&witness).map_err(err)?;
    ensure(serialize_file(&back) == serialize_file(&parse_algebra_file(&serialize_file(&back)).map_err(err)?), || {
        "witness file is not idempotent".into()
    })?;
    Ok(format!(
        "{} library files round-trip; {} reports byte-stable; search witness file parses",
        library().entries.len(),
        commands.len()
    ))
}

#[test]
fn acceptance() {
    let criteria: [(&str, u64, fn() -> Check); 9] = [
        ("worked example on C", 1, worked_example),
        ("Pixley term errata", 1, pixley_errata),
        ("smith = huq = higgins against X", 10, identity_suite),
        ("condition suite on groups", 60, group_conditions),
        ("oracle equivalence", 120, oracle_equivalence),
        ("perfect groups and central extensions", 300, perfect_groups),
        ("commutator laws on sampled triples", 600, commutator_laws),
        ("search soundness", 600, search_soundness),
        ("file round-trip and stable JSON", 600, cli_stability),
    ];
    let mut failed = Vec::new();
    for (i, (title, limit, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > Duration::from_secs(limit) => Err(format!("{detail}; took {elapsed:.2?}, limit {limit} s")),
            other => other,
        };
        match &outcome {
            Ok(detail) => println!("criterion {}: PASS  {title} ({elapsed:.2?}): {detail}", i + 1),
            Err(why) => {
                println!("criterion {}: FAIL  {title} ({elapsed:.2?}): {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
