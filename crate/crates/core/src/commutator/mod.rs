//! Higgins, Huq and Smith commutators.
//!
//! Higgins commutators are read off subuniverses of powers of `X`: a word in
//! the generators is tracked together with its images under the maps that
//! kill one family of generators, and the commutator is the fibre over
//! `(0, .., 0)` in the tracking coordinates. Smith commutators come from the
//! Δ-construction and are always re-validated by the centrality predicate.

mod laws;
mod oracle;

pub use laws::{check_commutator_laws, join_all, LawOutcome};
pub use oracle::{commutator_word_oracle, ternary_word_oracle};

use crate::algebra::tuples::{SubPower, TupleSet, TupleSpace};
use crate::algebra::{AlgRef, CompiledTerm, FiniteAlgebra, Subuniverse, Term};
use crate::congruence::{
    all_congruences, congruence_join, congruence_meet, denormalise, generate_blocks,
    normal_closure, push_forward, quotient, zero_class, Congruence, UnionFind,
};
use crate::error::{Error, Result};
use crate::Budget;

fn fibre_over_zero(x: &AlgRef, space: &TupleSpace<'_>, d: &TupleSet) -> Subuniverse {
    let mut coords = vec![0; space.arity()];
    let mask = (0..x.size())
        .map(|e| {
            coords[0] = e;
            d.contains(space.encode(&coords))
        })
        .collect();
    Subuniverse::from_mask_unchecked(x.clone(), mask)
}

/// Binary Higgins commutator `[K, L]`.
///
/// `D ≤ X × K × L` is generated by `(k, k, 0)` and `(l, 0, l)`; an element
/// `(x, 0, 0)` of `D` is the value in `X` of a word vanishing in `K × L`.
pub fn higgins(x: &AlgRef, k: &Subuniverse, l: &Subuniverse, budget: &Budget) -> Result<Subuniverse> {
    k.check_parent(x)?;
    l.check_parent(x)?;
    if k.is_trivial() || l.is_trivial() {
        return Ok(Subuniverse::zero(x));
    }
    let space = TupleSpace::power(x, 3)?;
    let mut gens = Vec::new();
    for g in k.generators(budget)? {
        gens.push(space.encode(&[g, g, 0]));
    }
    for g in l.generators(budget)? {
        gens.push(space.encode(&[g, 0, g]));
    }
    let d = space.generate(&gens, budget)?;
    Ok(fibre_over_zero(x, &space, &d))
}

/// Ternary Higgins commutator `[K, L, M]`.
///
/// A word in generators of `K`, `L`, `M` is tracked through every proper
/// substitution of families by 0: its value, its values with one family
/// killed, and its values with two families killed. `D ≤ X⁷` is generated by
/// the tracked generators and the commutator is the fibre over zero. Each
/// tracked coordinate is the image of a homomorphism out of the relevant
/// coproduct, so the result contains the categorical commutator.
pub fn higgins3(
    x: &AlgRef,
    k: &Subuniverse,
    l: &Subuniverse,
    m: &Subuniverse,
    budget: &Budget,
) -> Result<Subuniverse> {
    // Coordinates: full, M=0, L=0, K=0, L=M=0, K=M=0, K=L=0.
    const K: [bool; 7] = [true, true, true, false, true, false, false];
    const L: [bool; 7] = [true, true, false, true, false, true, false];
    const M: [bool; 7] = [true, false, true, true, false, false, true];
    ternary_fibre(x, [k, l, m], [&K[..], &L[..], &M[..]], budget)
}

/// The coarser ternary construction that only evaluates each single
/// substitution in `X`: `D ≤ X⁴` generated by `(k,k,k,0)`, `(l,l,0,l)`,
/// `(m,0,m,m)`. It can be strictly larger than [`higgins3`]; on `S3` it
/// returns the whole group for `[S3, S3, S3]`.
pub fn higgins3_substitution(
    x: &AlgRef,
    k: &Subuniverse,
    l: &Subuniverse,
    m: &Subuniverse,
    budget: &Budget,
) -> Result<Subuniverse> {
    const K: [bool; 4] = [true, true, true, false];
    const L: [bool; 4] = [true, true, false, true];
    const M: [bool; 4] = [true, false, true, true];
    ternary_fibre(x, [k, l, m], [&K[..], &L[..], &M[..]], budget)
}

fn ternary_fibre(
    x: &AlgRef,
    parts: [&Subuniverse; 3],
    patterns: [&[bool]; 3],
    budget: &Budget,
) -> Result<Subuniverse> {
    for p in parts {
        p.check_parent(x)?;
    }
    if parts.iter().any(|p| p.is_trivial()) {
        return Ok(Subuniverse::zero(x));
    }
    let space = TupleSpace::power(x, patterns[0].len())?;
    let mut gens = Vec::new();
    let mut coords = vec![0; patterns[0].len()];
    for (part, pattern) in parts.iter().zip(patterns) {
        for g in part.generators(budget)? {
            for (c, &keep) in coords.iter_mut().zip(pattern) {
                *c = if keep { g } else { 0 };
            }
            gens.push(space.encode(&coords));
        }
    }
    let d = space.generate(&gens, budget)?;
    Ok(fibre_over_zero(x, &space, &d))
}

/// Huq commutator `[K, L]_X`: the normal closure of `[K, L]`.
pub fn huq(x: &AlgRef, k: &Subuniverse, l: &Subuniverse, budget: &Budget) -> Result<Subuniverse> {
    let h = higgins(x, k, l, budget)?;
    normal_closure(x, h.members())
}

/// Checks `p(x, y, y) = x` and `p(x, x, y) = y` on `x` and compiles `p`.
pub fn validate_malcev(x: &FiniteAlgebra, malcev: &Term) -> Result<CompiledTerm> {
    let p = malcev.compile(x.signature())?;
    if p.var_count() > 3 {
        return Err(Error::Validation(format!(
            "Mal'cev term `{malcev}` uses more than three variables"
        )));
    }
    let n = x.size();
    let mut stack = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if p.eval(x, &[a, b, b], &mut stack) != a {
                return Err(Error::NotMalcev {
                    algebra: x.name().to_string(),
                    identity: "p(x,y,y) = x",
                    valuation: vec![a, b],
                });
            }
            if p.eval(x, &[a, a, b], &mut stack) != b {
                return Err(Error::NotMalcev {
                    algebra: x.name().to_string(),
                    identity: "p(x,x,y) = y",
                    valuation: vec![a, b],
                });
            }
        }
    }
    Ok(p)
}

/// Whether `R` and `S` centralize: the Mal'cev polynomial restricted to
/// `{(x, y, z) : x R y S z}` is a homomorphism into `X`.
pub fn centralizes(
    x: &AlgRef,
    r: &Congruence,
    s: &Congruence,
    malcev: &Term,
    budget: &Budget,
) -> Result<bool> {
    r.check_parent(x)?;
    s.check_parent(x)?;
    let p = validate_malcev(x, malcev)?;
    if r.is_delta() || s.is_delta() {
        return Ok(true);
    }
    let space = TupleSpace::power(x, 3)?;
    let n = x.size();
    let r_classes = class_lists(r);
    let s_classes = class_lists(s);
    let size: usize = (0..n)
        .map(|y| r_classes[r.block_of(y)].len() * s_classes[s.block_of(y)].len())
        .sum();
    if size > budget.max_closure {
        return Err(Error::BudgetExceeded {
            what: "centralizer domain",
            needed: size as u128,
            limit: budget.max_closure as u128,
        });
    }
    let mut domain = TupleSet::with_capacity(space.total());
    for y in 0..n {
        for &a in &r_classes[r.block_of(y)] {
            for &c in &s_classes[s.block_of(y)] {
                domain.insert(space.encode(&[a, y, c]));
            }
        }
    }
    budget.charge(domain.len() as u64);
    let domain = SubPower::new(space, domain);
    let mut stack = Vec::new();
    let theta: Vec<usize> = (0..domain.set.len())
        .map(|i| p.eval(x, domain.coords(i), &mut stack))
        .collect();
    match x.group_ops() {
        Some(g) => centralizes_group(x, &domain, &theta, g.mul, budget),
        None => centralizes_general(x, &domain, &theta, &p, budget),
    }
}

fn class_lists(c: &Congruence) -> Vec<Vec<usize>> {
    let mut lists = vec![Vec::new(); c.blocks().len()];
    for (e, &b) in c.blocks().iter().enumerate() {
        lists[b].push(e);
    }
    lists
}

// For a subgroup of X³ it suffices to test multiplicativity against a
// generating set: every element is a positive word in the generators.
fn centralizes_group(
    x: &FiniteAlgebra,
    domain: &SubPower<'_>,
    theta: &[usize],
    mul: usize,
    budget: &Budget,
) -> Result<bool> {
    let space = &domain.space;
    let mut gens: Vec<u64> = Vec::new();
    let mut span = space.generate(&gens, budget)?;
    for &code in domain.set.members() {
        if !span.contains(code) {
            gens.push(code);
            span = space.generate(&gens, budget)?;
            if span.len() == domain.set.len() {
                break;
            }
        }
    }
    let gen_pos: Vec<usize> = gens
        .iter()
        .map(|&c| domain.set.position(c).expect("generator lies in the domain"))
        .collect();
    let mut prod = [0usize; 3];
    for i in 0..domain.set.len() {
        let a = domain.coords(i);
        for &j in &gen_pos {
            let b = domain.coords(j);
            for k in 0..3 {
                prod[k] = x.apply2(mul, a[k], b[k]);
            }
            let pos = domain
                .position_of(&prod)
                .expect("domain is a subgroup of X³");
            if theta[pos] != x.apply2(mul, theta[i], theta[j]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn centralizes_general(
    x: &FiniteAlgebra,
    domain: &SubPower<'_>,
    theta: &[usize],
    p: &CompiledTerm,
    budget: &Budget,
) -> Result<bool> {
    let sig = x.signature();
    let size = domain.set.len() as u128;
    let work: u128 = (0..sig.len())
        .map(|op| size.saturating_pow(sig.arity(op) as u32))
        .sum();
    if work > budget.max_hom_checks as u128 {
        return Err(Error::BudgetExceeded {
            what: "centralizer homomorphism check",
            needed: work,
            limit: budget.max_hom_checks as u128,
        });
    }
    let mut stack = Vec::new();
    let mut idx = Vec::new();
    let mut triple = [0usize; 3];
    let mut args = Vec::new();
    let mut thetas = Vec::new();
    for op in 0..sig.len() {
        let arity = sig.arity(op);
        idx.clear();
        idx.resize(arity, 0);
        loop {
            for (k, t) in triple.iter_mut().enumerate() {
                args.clear();
                args.extend(idx.iter().map(|&i| domain.coords(i)[k]));
                *t = x.apply(op, &args);
            }
            thetas.clear();
            thetas.extend(idx.iter().map(|&i| theta[i]));
            if p.eval(x, &triple, &mut stack) != x.apply(op, &thetas) {
                return Ok(false);
            }
            if !crate::algebra::advance(&mut idx, domain.set.len()) {
                break;
            }
        }
    }
    Ok(true)
}

/// Whether the images of `R` and `S` in `X/T` centralize.
pub fn centralizes_modulo(
    x: &AlgRef,
    r: &Congruence,
    s: &Congruence,
    t: &Congruence,
    malcev: &Term,
    budget: &Budget,
) -> Result<bool> {
    t.check_parent(x)?;
    if t.is_delta() {
        return centralizes(x, r, s, malcev, budget);
    }
    let (q, proj) = quotient(x, t)?;
    let r_image = push_forward(&congruence_join(r, t)?, &proj)?;
    let s_image = push_forward(&congruence_join(s, t)?, &proj)?;
    centralizes(&q, &r_image, &s_image, malcev, budget)
}

/// Smith commutator `[R, S]` by the Δ-construction, validated before return.
pub fn smith(
    x: &AlgRef,
    r: &Congruence,
    s: &Congruence,
    malcev: &Term,
    budget: &Budget,
) -> Result<Congruence> {
    r.check_parent(x)?;
    s.check_parent(x)?;
    validate_malcev(x, malcev)?;
    if r.is_delta() || s.is_delta() {
        return Ok(Congruence::delta(x));
    }
    let n = x.size();
    let space = TupleSpace::power(x, 2)?;
    let s_classes = class_lists(s);
    let mut pairs = TupleSet::with_capacity(space.total());
    for a in 0..n {
        for &b in &s_classes[s.block_of(a)] {
            pairs.insert(space.encode(&[a, b]));
        }
    }
    budget.charge(pairs.len() as u64);
    let algebra_s = SubPower::new(space, pairs);
    let diagonal = |a: usize| algebra_s.position_of(&[a, a]).expect("S is reflexive");
    let seeds: Vec<(usize, usize)> = (0..n)
        .filter(|&a| r.block_of(a) != a)
        .map(|a| (diagonal(a), diagonal(r.block_of(a))))
        .collect();
    let delta = generate_blocks(&algebra_s, seeds);

    let mut uf = UnionFind::new(n);
    let mut related = 0usize;
    for a in 0..n {
        let da = delta[diagonal(a)];
        for &b in &s_classes[s.block_of(a)] {
            let ab = algebra_s.position_of(&[a, b]).expect("pair of S");
            if delta[ab] == da {
                related += 1;
                uf.union(a, b);
            }
        }
    }
    let blocks = uf.canonical();
    let equivalence_pairs: usize = class_lists(&Congruence::from_blocks_unchecked(x, blocks.clone()))
        .iter()
        .map(|c| c.len() * c.len())
        .sum();
    if equivalence_pairs != related {
        return Err(Error::Validation(format!(
            "Δ-construction candidate is not an equivalence relation on `{}`",
            x.name()
        )));
    }
    let t = Congruence::from_partition(x, &blocks).map_err(|e| {
        Error::Validation(format!("Δ-construction candidate is not a congruence: {e}"))
    })?;
    if !t.le(&congruence_meet(r, s)?) {
        return Err(Error::Validation(
            "Δ-construction candidate is not below R ∧ S".into(),
        ));
    }
    if !centralizes_modulo(x, r, s, &t, malcev, budget)? {
        return Err(Error::Validation(format!(
            "R and S do not centralize modulo the Δ-construction candidate on `{}`",
            x.name()
        )));
    }
    Ok(t)
}

/// Independent Smith commutator: the meet of all congruences modulo which
/// `R` and `S` centralize.
pub fn smith_oracle(
    x: &AlgRef,
    r: &Congruence,
    s: &Congruence,
    malcev: &Term,
    budget: &Budget,
) -> Result<Congruence> {
    validate_malcev(x, malcev)?;
    let mut meet = Congruence::nabla(x);
    for t in all_congruences(x, budget)? {
        if centralizes_modulo(x, r, s, &t, malcev, budget)? {
            meet = congruence_meet(&meet, &t)?;
        }
    }
    if !centralizes_modulo(x, r, s, &meet, malcev, budget)? {
        return Err(Error::Validation(format!(
            "meet of centralizing congruences on `{}` does not centralize",
            x.name()
        )));
    }
    Ok(meet)
}

/// Normalised Smith commutator `[K, L]^S` of two ideals.
pub fn smith_normalised(
    x: &AlgRef,
    k: &Subuniverse,
    l: &Subuniverse,
    malcev: &Term,
    budget: &Budget,
) -> Result<Subuniverse> {
    let r = denormalise(x, k)?;
    let s = denormalise(x, l)?;
    Ok(zero_class(&smith(x, &r, &s, malcev, budget)?))
}

#[cfg(test)]
mod tests;
