//! Instance-level checks: perfectness, centres, central extensions, the
//! commutator coincidence conditions and the lemma suite for central
//! extensions of perfect algebras.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::algebra::{AlgRef, Homomorphism, Subuniverse, Term};
use crate::commutator::{
    centralizes, check_commutator_laws, higgins, higgins3, huq, join_all, smith_normalised,
};
use crate::congruence::{
    all_congruences, all_ideals, congruence_join, denormalise, is_ideal, join_via_preimage,
    kernel_pair, principal_congruences, quotient, zero_class, Congruence,
};
use crate::error::{Error, Result};
use crate::library::all_homs;
use crate::report::{CheckResult, ConditionReport, Verdict};
use crate::Budget;

/// `X / [X, X]` and its projection.
pub fn abelianise(x: &AlgRef, budget: &Budget) -> Result<(AlgRef, Homomorphism)> {
    let all = Subuniverse::full(x);
    let k = huq(x, &all, &all, budget)?;
    quotient(x, &denormalise(x, &k)?)
}

/// `[X, X] = X`.
pub fn is_perfect(x: &AlgRef, budget: &Budget) -> Result<bool> {
    let all = Subuniverse::full(x);
    Ok(higgins(x, &all, &all, budget)?.is_full())
}

/// The centre: the zero class of the join of all principal congruences that
/// centralize `∇`. The result is checked to satisfy `[X, Z] = 0`.
pub fn centre(x: &AlgRef, malcev: &Term, budget: &Budget) -> Result<Subuniverse> {
    let nabla = Congruence::nabla(x);
    let mut zeta = Congruence::delta(x);
    for c in principal_congruences(x, budget)? {
        if centralizes(x, &c, &nabla, malcev, budget)? {
            zeta = congruence_join(&zeta, &c)?;
        }
    }
    if !centralizes(x, &zeta, &nabla, malcev, budget)? {
        return Err(Error::Validation(format!(
            "join of central principal congruences of `{}` is not central",
            x.name()
        )));
    }
    let z = zero_class(&zeta);
    if !higgins(x, &Subuniverse::full(x), &z, budget)?.is_trivial() {
        return Err(Error::Validation(format!(
            "centre of `{}` fails [X, Z] = 0",
            x.name()
        )));
    }
    Ok(z)
}

/// Whether `Eq(f)` centralizes `∇`, cross-checked against
/// `[Ker f, X] = 0`; disagreement is an error.
pub fn is_central_extension(f: &Homomorphism, malcev: &Term, budget: &Budget) -> Result<bool> {
    if !f.is_surjective() {
        return Err(Error::NotSurjective);
    }
    let x = f.source();
    let by_smith = centralizes(x, &kernel_pair(f), &Congruence::nabla(x), malcev, budget)?;
    let by_higgins = higgins(x, &f.kernel(), &Subuniverse::full(x), budget)?.is_trivial();
    if by_smith != by_higgins {
        return Err(Error::Validation(format!(
            "centrality criteria disagree on `{}`: Eq(f) central = {by_smith}, [Ker f, X] = 0 is {by_higgins}",
            x.name()
        )));
    }
    Ok(by_smith)
}

fn set_json(s: &Subuniverse) -> serde_json::Value {
    json!(s.members())
}

/// NH, WNH, SH, both forms of PA, and `[K,K]^S = [K,K] ∨ [K,K,X]`, for every
/// ideal (pair) of `x`. Ideals are numbered as in [`all_ideals`].
pub fn condition_suite(x: &AlgRef, malcev: &Term, budget: &Budget) -> Result<ConditionReport> {
    condition_families(x, malcev, &Family::ALL, budget)
}

/// The condition families of [`condition_suite`]. `Pa` also covers the
/// join identity for the Smith commutator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Sh,
    Nh,
    Wnh,
    Pa,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Sh, Family::Nh, Family::Wnh, Family::Pa];
}

/// The part of [`condition_suite`] for the chosen families, computing only
/// the commutators they need.
pub fn condition_families(x: &AlgRef, malcev: &Term, families: &[Family], budget: &Budget) -> Result<ConditionReport> {
    let want = |f: Family| families.contains(&f);
    let ideals = all_ideals(x, budget)?;
    let all = Subuniverse::full(x);
    let mut report = ConditionReport::new(x.name(), "conditions");
    let mut kk = Vec::with_capacity(ideals.len());
    for k in &ideals {
        kk.push(higgins(x, k, k, budget)?);
    }

    for (i, k) in ideals.iter().enumerate() {
        let h = &kk[i];
        if want(Family::Wnh) {
            let q = huq(x, k, k, budget)?;
            let ideal = is_ideal(x, h)?;
            report.push(
                CheckResult::new(format!("wnh:K{i}"), "[K,K] is normal for K normal", Verdict::from_bool(ideal))
                    .with_witness(json!({"K": set_json(k), "higgins": set_json(h), "huq": set_json(&q)})),
            );
        }
        if !want(Family::Pa) {
            continue;
        }
        let s = smith_normalised(x, k, k, malcev, budget)?;
        let t = higgins3(x, k, k, &all, budget)?;
        let vi = *h == s;
        let vii = t.is_subset(h);
        report.push(
            CheckResult::new(format!("pa-smith:K{i}"), "[K,K] = [K,K]^S", Verdict::from_bool(vi))
                .with_witness(json!({"K": set_json(k), "higgins": set_json(h), "smith": set_json(&s)})),
        );
        report.push(
            CheckResult::new(format!("pa-ternary:K{i}"), "[K,K,X] <= [K,K]", Verdict::from_bool(vii))
                .with_witness(json!({"K": set_json(k), "higgins": set_json(h), "ternary": set_json(&t)})),
        );
        report.push(CheckResult::new(
            format!("pa-agree:K{i}"),
            "both peri-abelian formulations agree",
            Verdict::from_bool(vi == vii),
        ));
        let joined = join_all(x, &[h, &t], budget)?;
        report.push(
            CheckResult::new(format!("hvdl:K{i}"), "[K,K]^S = [K,K] v [K,K,X]", Verdict::from_bool(joined == s))
                .with_witness(json!({"smith": set_json(&s), "join": set_json(&joined)})),
        );
    }

    if !(want(Family::Nh) || want(Family::Sh)) {
        return Ok(report);
    }
    for (i, k) in ideals.iter().enumerate() {
        for (j, l) in ideals.iter().enumerate() {
            let q = huq(x, k, l, budget)?;
            if want(Family::Nh) {
                let h = if i == j { kk[i].clone() } else { higgins(x, k, l, budget)? };
                report.push(
                    CheckResult::new(format!("nh:K{i},K{j}"), "[K,L] = [K,L]_X", Verdict::from_bool(h == q))
                        .with_witness(json!({"higgins": set_json(&h), "huq": set_json(&q)})),
                );
            }
            if !want(Family::Sh) {
                continue;
            }
            let verdict = if q.is_trivial() {
                let s = smith_normalised(x, k, l, malcev, budget)?;
                let r = CheckResult::new(format!("sh:K{i},K{j}"), "[K,L]_X = 0 implies [K,L]^S = 0", Verdict::from_bool(s.is_trivial()));
                r.with_witness(json!({"smith": set_json(&s)}))
            } else {
                CheckResult::new(format!("sh:K{i},K{j}"), "[K,L]_X = 0 implies [K,L]^S = 0", Verdict::Pass)
            };
            report.push(verdict);
        }
    }
    Ok(report)
}

/// Composable surjections `f: A → B`, `g: B → C` and the four facts that
/// decide whether the pair is a gap for composing central extensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UceRecord {
    pub middle_perfect: bool,
    pub f_central: bool,
    pub g_central: bool,
    pub composite_central: bool,
}

impl UceRecord {
    pub fn gap(&self) -> bool {
        self.middle_perfect && self.f_central && self.g_central && !self.composite_central
    }

    pub fn to_result(&self, id: &str) -> CheckResult {
        CheckResult::new(id, "perfect middle: composite of central extensions is central", Verdict::from_bool(!self.gap()))
            .with_witness(json!({
                "middle_perfect": self.middle_perfect,
                "f_central": self.f_central,
                "g_central": self.g_central,
                "composite_central": self.composite_central,
            }))
    }
}

pub fn check_uce_instance(f: &Homomorphism, g: &Homomorphism, malcev: &Term, budget: &Budget) -> Result<UceRecord> {
    let gf = g.after(f).map_err(|_| Error::NotComposable)?;
    if !f.is_surjective() || !g.is_surjective() {
        return Err(Error::NotSurjective);
    }
    Ok(UceRecord {
        middle_perfect: is_perfect(f.target(), budget)?,
        f_central: is_central_extension(f, malcev, budget)?,
        g_central: is_central_extension(g, malcev, budget)?,
        composite_central: is_central_extension(&gf, malcev, budget)?,
    })
}

/// For perfect `p`: the centre of `p / Z(p)` is trivial. Skipped otherwise.
pub fn grun_check(p: &AlgRef, malcev: &Term, budget: &Budget) -> Result<CheckResult> {
    let id = format!("grun:{}", p.name());
    let reference = "centre of P/Z(P) is trivial for perfect P";
    if !is_perfect(p, budget)? {
        return Ok(CheckResult::new(id, reference, Verdict::Skipped));
    }
    let z = centre(p, malcev, budget)?;
    let (q, _) = quotient(p, &denormalise(p, &z)?)?;
    let zq = centre(&q, malcev, budget)?;
    Ok(CheckResult::new(id, reference, Verdict::from_bool(zq.is_trivial())).with_witness(json!({
        "centre": set_json(&z),
        "quotient_size": q.size(),
        "quotient_centre_size": zq.len(),
    })))
}

/// Sampling parameters for [`law_suite`].
#[derive(Debug, Clone)]
pub struct LawConfig {
    pub seed: u64,
    pub samples: usize,
    /// Largest source carrier for the exhaustive homomorphism comparison.
    pub max_hom_source: usize,
    /// Largest number of image assignments tried per homomorphism search.
    pub max_assignments: u64,
}

impl Default for LawConfig {
    fn default() -> Self {
        LawConfig {
            seed: 0,
            samples: 8,
            max_hom_source: 120,
            max_assignments: 20_000,
        }
    }
}

fn random_subuniverse(x: &AlgRef, pool: &[usize], rng: &mut ChaCha8Rng, budget: &Budget) -> Result<Subuniverse> {
    let count = rng.gen_range(0..=2usize);
    let gens: Vec<usize> = (0..count)
        .filter_map(|_| pool.choose(rng).copied())
        .collect();
    Subuniverse::generate(x, &gens, budget)
}

/// The lemma suite on surjections out of `a`, enumerated from its
/// congruence lattice, plus sampled instances.
pub fn law_suite(a: &AlgRef, malcev: &Term, config: &LawConfig, budget: &Budget) -> Result<ConditionReport> {
    let mut report = ConditionReport::new(a.name(), "laws");
    let all = Subuniverse::full(a);
    let aa = higgins(a, &all, &all, budget)?;
    let congruences = all_congruences(a, budget)?;
    let nabla = Congruence::nabla(a);

    let mut central_surjections = Vec::new();
    for (i, c) in congruences.iter().enumerate() {
        let (b, f) = quotient(a, c)?;
        let kernel = zero_class(c);
        let central = centralizes(a, c, &nabla, malcev, budget)?;
        if central {
            central_surjections.push(f.clone());
        }
        if !is_perfect(&b, budget)? {
            continue;
        }
        let joined = join_all(a, &[&kernel, &aa], budget)?;
        report.push(
            CheckResult::new(format!("join-kernel-derived:Q{i}"), "perfect quotient: A = Ker f v [A,A]", Verdict::from_bool(joined.is_full()))
                .with_witness(json!({"kernel": set_json(&kernel), "derived": set_json(&aa), "quotient_size": b.size()})),
        );
        if central {
            let (sub, incl) = aa.to_algebra(format!("[{0},{0}]", a.name()))?;
            let perfect = is_perfect(&sub, budget)?;
            let composite = f.after(&incl)?;
            let ok = perfect && composite.is_surjective() && is_central_extension(&composite, malcev, budget)?;
            report.push(
                CheckResult::new(format!("derived-central:Q{i}"), "central extension of a perfect algebra restricts to a perfect central cover", Verdict::from_bool(ok))
                    .with_witness(json!({"derived_perfect": perfect, "quotient_size": b.size()})),
            );
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let elements: Vec<usize> = (0..a.size()).collect();
    let z = centre(a, malcev, budget)?;
    let central_pool = z.members().to_vec();
    for t in 0..config.samples {
        let xs = if t == 0 { z.clone() } else { random_subuniverse(a, &central_pool, &mut rng, budget)? };
        let mut ys = random_subuniverse(a, &elements, &mut rng, budget)?;
        if !join_all(a, &[&xs, &ys], budget)?.is_full() {
            ys = all.clone();
        }
        let zs = random_subuniverse(a, &elements, &mut rng, budget)?;
        if !higgins(a, &xs, &all, budget)?.is_trivial() {
            return Err(Error::Validation("sampled subuniverse of the centre is not central".into()));
        }
        let left = higgins(a, &all, &zs, budget)?;
        let right = higgins(a, &ys, &zs, budget)?;
        report.push(
            CheckResult::new(format!("central-complement:S{t}"), "X v Y = A and [X,A] = 0 imply [A,Z] = [Y,Z]", Verdict::from_bool(left == right))
                .with_witness(json!({"X": set_json(&xs), "Y": set_json(&ys), "Z": set_json(&zs)})),
        );
    }

    let ideals = all_ideals(a, budget)?;
    for t in 0..config.samples {
        let k = ideals.choose(&mut rng).expect("{0} is an ideal").clone();
        let s = random_subuniverse(a, &elements, &mut rng, budget)?;
        let direct = k.join(&s, budget)?;
        let via = join_via_preimage(a, &k, &s)?;
        report.push(
            CheckResult::new(format!("join-preimage:S{t}"), "K v S is the preimage of the image of S in X/K", Verdict::from_bool(direct == via))
                .with_witness(json!({"K": set_json(&k), "S": set_json(&s), "join": set_json(&direct)})),
        );
    }

    if a.size() <= config.max_hom_source {
        let subs = crate::library::all_subuniverses(a, 4096, budget)?;
        for (pi, p) in subs.iter().enumerate() {
            if p.is_trivial() || !is_perfect_subuniverse(p, budget)? {
                continue;
            }
            let (pa, _) = p.to_algebra(format!("P{pi}"))?;
            let homs = match all_homs(&pa, a, config.max_assignments, budget) {
                Ok(h) => h,
                Err(Error::BudgetExceeded { .. }) => {
                    report.push(CheckResult::new(format!("lift-unique:P{pi}"), "maps from a perfect algebra agreeing after a central extension are equal", Verdict::Skipped));
                    continue;
                }
                Err(e) => return Err(e),
            };
            for (fi, f) in central_surjections.iter().enumerate() {
                let mut clash = None;
                for (i, p1) in homs.iter().enumerate() {
                    for p2 in &homs[i + 1..] {
                        if f.after(p1)?.map() == f.after(p2)?.map() {
                            clash = Some((p1.map().to_vec(), p2.map().to_vec()));
                        }
                    }
                }
                let r = CheckResult::new(
                    format!("lift-unique:P{pi},F{fi}"),
                    "maps from a perfect algebra agreeing after a central extension are equal",
                    Verdict::from_bool(clash.is_none()),
                );
                report.push(match clash {
                    Some((p1, p2)) => r.with_witness(json!({"p1": p1, "p2": p2})),
                    None => r.with_witness(json!({"homs": homs.len(), "kernel_size": f.kernel().len()})),
                });
            }
        }
    }
    Ok(report)
}

fn is_perfect_subuniverse(p: &Subuniverse, budget: &Budget) -> Result<bool> {
    let x = p.parent();
    Ok(higgins(x, p, p, budget)? == *p)
}

fn law_slug(law: &str) -> String {
    law.chars()
        .filter(|c| *c != '(' && *c != ')')
        .map(|c| if c == ' ' { '-' } else { c })
        .collect()
}

/// The commutator laws on `triples` seeded random triples of subuniverses
/// (each generated by at most two elements), one result per law and triple.
/// A failed law about the ternary commutator carries `"ternary": true`.
pub fn commutator_law_report(x: &AlgRef, seed: u64, triples: usize, budget: &Budget) -> Result<ConditionReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let elements: Vec<usize> = (0..x.size()).collect();
    let mut report = ConditionReport::new(x.name(), "commutator-laws");
    for t in 0..triples {
        let a = random_subuniverse(x, &elements, &mut rng, budget)?;
        let b = random_subuniverse(x, &elements, &mut rng, budget)?;
        let c = random_subuniverse(x, &elements, &mut rng, budget)?;
        let m = random_subuniverse(x, a.members(), &mut rng, budget)?;
        let outcomes = check_commutator_laws(x, &a, &b, &c, &m, budget)?;
        let mut laws: Vec<&'static str> = outcomes.iter().map(|o| o.law).collect();
        laws.dedup();
        for law in laws {
            let mine: Vec<_> = outcomes.iter().filter(|o| o.law == law).collect();
            let failed = mine.iter().find(|o| !o.holds);
            let mut r = CheckResult::new(format!("{}:T{t}", law_slug(law)), law, Verdict::from_bool(failed.is_none()));
            r = match failed {
                Some(o) => r.with_witness(json!({
                    "A": set_json(&a), "B": set_json(&b), "C": set_json(&c), "M": set_json(&m),
                    "left": o.left, "right": o.right, "ternary": o.ternary,
                })),
                None => r.with_witness(json!({"A": set_json(&a), "B": set_json(&b), "C": set_json(&c), "M": set_json(&m)})),
            };
            report.push(r);
        }
    }
    Ok(report)
}
