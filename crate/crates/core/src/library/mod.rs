//! Built-in algebras: small groups closed from standard generators, the
//! two-element Boolean ring and the eight-element algebra `C` with its
//! diagram of points, plus the equational varieties they live in.

mod cayley;
mod paper;
mod varieties;

pub use cayley::{cayley_closure, compose, mat_mul, parity, perm, quaternion_mul, Perm};
pub use paper::{build_paper_c, c_product, paper_suite, pixley_equations, pixley_triples, triple, PaperDiagram};
pub use varieties::{
    abelian_groups, all_varieties, boolean_pixley, digroup_signature, digroups, group_malcev,
    group_signature, groups, loop_signature, loops, na_rings, pixley_term, printed_pixley_term,
    ring_signature, variety, Equation, VarietySpec,
};

use std::sync::{Arc, OnceLock};

use crate::algebra::tuples::TupleSpace;
use crate::algebra::{AlgRef, FiniteAlgebra, Homomorphism, Subuniverse, Term};
use crate::error::{Error, Result};
use crate::Budget;

/// A library algebra with its variety and some named subuniverses.
#[derive(Debug, Clone)]
pub struct LibraryEntry {
    pub name: String,
    pub algebra: AlgRef,
    pub variety: VarietySpec,
    pub subsets: Vec<(String, Subuniverse)>,
}

#[derive(Debug, Clone)]
pub struct Library {
    pub entries: Vec<LibraryEntry>,
    pub homs: Vec<(String, Homomorphism)>,
    pub diagram: PaperDiagram,
}

impl Library {
    pub fn get(&self, name: &str) -> Option<&LibraryEntry> {
        self.entries
            .iter()
            .find(|e| e.name.eq_ignore_ascii_case(name))
    }

    pub fn hom(&self, name: &str) -> Option<&Homomorphism> {
        self.homs
            .iter()
            .find(|(n, _)| n.eq_ignore_ascii_case(name))
            .map(|(_, h)| h)
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.name.as_str()).collect()
    }

    /// The library groups, in library order.
    pub fn groups(&self) -> impl Iterator<Item = &LibraryEntry> {
        self.entries.iter().filter(|e| e.algebra.is_group())
    }
}

/// The shared library, built once.
pub fn library() -> &'static Library {
    static LIB: OnceLock<Library> = OnceLock::new();
    LIB.get_or_init(|| build_library().expect("built-in library is internally consistent"))
}

/// Looks up a built-in algebra by (case-insensitive) name.
pub fn builtin(name: &str) -> Option<AlgRef> {
    library().get(name).map(|e| e.algebra.clone())
}

fn group_from_perms(name: &str, points: usize, gens: &[Perm]) -> (AlgRef, Vec<Perm>) {
    let identity: Perm = (0..points as u8).collect();
    let (alg, elems) = cayley_closure(name, group_signature(), identity, gens, compose);
    (Arc::new(alg), elems)
}

/// Cyclic group of order `n` (additive, generator 1).
pub fn cyclic(n: usize) -> AlgRef {
    let (alg, _) = cayley_closure(
        &format!("Z{n}"),
        group_signature(),
        0usize,
        &[1 % n.max(1)],
        |a, b| (a + b) % n.max(1),
    );
    Arc::new(alg)
}

pub fn symmetric3() -> AlgRef {
    builtin("S3").expect("S3 is built in")
}

/// First element of the given order in a group.
pub fn find_element_of_order(g: &FiniteAlgebra, order: usize) -> Option<usize> {
    (0..g.size()).find(|&a| element_order(g, a) == Some(order))
}

pub fn element_order(g: &FiniteAlgebra, a: usize) -> Option<usize> {
    let ops = g.group_ops()?;
    let mut x = a;
    let mut k = 1;
    while x != 0 {
        x = g.apply2(ops.mul, x, a);
        k += 1;
        if k > g.size() {
            return None;
        }
    }
    Some(k)
}

/// Extends generator images to a homomorphism if one exists: the subuniverse
/// of `src × dst` generated by the pairs `(g, image)` must be the graph of a
/// total function.
pub fn extend_to_hom(
    src: &AlgRef,
    gens: &[usize],
    images: &[usize],
    dst: &AlgRef,
    budget: &Budget,
) -> Result<Option<Homomorphism>> {
    let space = TupleSpace::new(vec![src.as_ref(), dst.as_ref()])?;
    let codes: Vec<u64> = gens
        .iter()
        .zip(images)
        .map(|(&g, &h)| space.encode(&[g, h]))
        .collect();
    let mut limited = budget.clone();
    limited.max_closure = src.size();
    let graph = match space.generate(&codes, &limited) {
        Ok(g) => g,
        Err(Error::BudgetExceeded { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let mut map = vec![usize::MAX; src.size()];
    let mut pair = [0usize; 2];
    for &code in graph.members() {
        space.decode(code, &mut pair);
        if map[pair[0]] != usize::MAX {
            return Ok(None);
        }
        map[pair[0]] = pair[1];
    }
    if map.contains(&usize::MAX) {
        return Ok(None);
    }
    Homomorphism::new(src.clone(), dst.clone(), map).map(Some)
}

/// All homomorphisms `src → dst`, found by trying every assignment of images
/// to a generating set of `src`; `limit` caps the number of assignments.
pub fn all_homs(src: &AlgRef, dst: &AlgRef, limit: u64, budget: &Budget) -> Result<Vec<Homomorphism>> {
    let gens = Subuniverse::full(src).generators(budget)?;
    let m = dst.size() as u128;
    let count = m.saturating_pow(gens.len() as u32);
    if count > limit as u128 {
        return Err(Error::BudgetExceeded {
            what: "homomorphism search",
            needed: count,
            limit: limit as u128,
        });
    }
    let mut images = vec![0usize; gens.len()];
    let mut out = Vec::new();
    loop {
        if let Some(h) = extend_to_hom(src, &gens, &images, dst, budget)? {
            if !out.contains(&h) {
                out.push(h);
            }
        }
        if !crate::algebra::advance(&mut images, dst.size()) {
            break;
        }
    }
    Ok(out)
}

fn first_surjection(src: &AlgRef, dst: &AlgRef, budget: &Budget) -> Result<Homomorphism> {
    let gens = Subuniverse::full(src).generators(budget)?;
    let mut images = vec![0usize; gens.len()];
    loop {
        if let Some(h) = extend_to_hom(src, &gens, &images, dst, budget)? {
            if h.is_surjective() {
                return Ok(h);
            }
        }
        if !crate::algebra::advance(&mut images, dst.size()) {
            return Err(Error::NotSurjective);
        }
    }
}

fn subset(alg: &AlgRef, name: &str, members: Vec<usize>) -> (String, Subuniverse) {
    (
        name.to_string(),
        Subuniverse::from_members(alg, &members).expect("named subset is a subuniverse"),
    )
}

fn generated(alg: &AlgRef, name: &str, gens: &[usize], budget: &Budget) -> (String, Subuniverse) {
    (
        name.to_string(),
        Subuniverse::generate(alg, gens, budget).expect("small closure"),
    )
}

/// Builds every built-in algebra and homomorphism and checks each algebra
/// against the equations of its variety.
pub fn build_library() -> Result<Library> {
    let budget = Budget::default();
    let mut entries = Vec::new();
    let mut homs = Vec::new();
    let group_entry = |name: &str, alg: AlgRef, subsets: Vec<(String, Subuniverse)>| LibraryEntry {
        name: name.to_string(),
        algebra: Arc::new(alg.renamed(name)),
        variety: groups(),
        subsets,
    };

    let z1 = cyclic(1);
    entries.push(group_entry("Z1", z1, Vec::new()));
    let z2 = cyclic(2);
    entries.push(group_entry("Z2", z2, Vec::new()));
    let z4 = cyclic(4);
    let z4_sub = vec![subset(&z4, "2z4", vec![0, 2])];
    entries.push(group_entry("Z4", z4, z4_sub));

    let (klein, _) = cayley_closure(
        "Z2xZ2",
        group_signature(),
        (0u8, 0u8),
        &[(1, 0), (0, 1)],
        |a, b| (a.0 ^ b.0, a.1 ^ b.1),
    );
    let klein = Arc::new(klein);
    let klein_sub = vec![subset(&klein, "first", vec![0, 1])];
    entries.push(group_entry("Z2xZ2", klein, klein_sub));

    let (s3, s3_elems) = group_from_perms("S3", 3, &[perm(3, &[&[0, 1]]), perm(3, &[&[0, 1, 2]])]);
    let even: Vec<usize> = (0..s3.size()).filter(|&i| parity(&s3_elems[i]) == 0).collect();
    let s3_sub = vec![subset(&s3, "a3", even), generated(&s3, "t", &[1], &budget)];
    entries.push(group_entry("S3", s3.clone(), s3_sub));

    let (d4, d4_elems) = group_from_perms(
        "D4",
        4,
        &[perm(4, &[&[0, 1, 2, 3]]), perm(4, &[&[1, 3]])],
    );
    let rotations: Vec<usize> = (0..d4.size())
        .filter(|&i| d4_elems[i].iter().enumerate().all(|(p, &q)| (q as usize + 4 - p) % 4 == (d4_elems[i][0] as usize) % 4))
        .collect();
    let d4_sub = vec![subset(&d4, "rotations", rotations)];
    entries.push(group_entry("D4", d4, d4_sub));

    let (q8, q8_elems) = cayley_closure(
        "Q8",
        group_signature(),
        (false, 0u8),
        &[(false, 1), (false, 2)],
        quaternion_mul,
    );
    let q8 = Arc::new(q8);
    let minus_one = q8_elems.iter().position(|&q| q == (true, 0)).expect("-1 in Q8");
    let q8_sub = vec![subset(&q8, "pm1", vec![0, minus_one])];
    entries.push(group_entry("Q8", q8, q8_sub));

    let (a4, a4_elems) = group_from_perms(
        "A4",
        4,
        &[perm(4, &[&[0, 1, 2]]), perm(4, &[&[0, 1], &[2, 3]])],
    );
    let v4: Vec<usize> = (0..a4.size())
        .filter(|&i| a4_elems[i].iter().enumerate().all(|(p, &q)| a4_elems[i][q as usize] as usize == p))
        .collect();
    let a4_sub = vec![subset(&a4, "v4", v4)];
    entries.push(group_entry("A4", a4, a4_sub));

    let (a5, _) = group_from_perms(
        "A5",
        5,
        &[perm(5, &[&[0, 1, 2, 3, 4]]), perm(5, &[&[0, 1, 2]])],
    );
    entries.push(group_entry("A5", a5, Vec::new()));

    let (sl25, sl_elems) = cayley_closure(
        "SL25",
        group_signature(),
        [1u8, 0, 0, 1],
        &[[1, 1, 0, 1], [0, 4, 1, 0]],
        |a, b| mat_mul(5, a, b),
    );
    let sl25 = Arc::new(sl25);
    let minus_identity = sl_elems
        .iter()
        .position(|m| *m == [4, 0, 0, 4])
        .expect("-I in SL(2,5)");
    let sl_sub = vec![subset(&sl25, "pm1", vec![0, minus_identity])];
    entries.push(group_entry("SL25", sl25, sl_sub));

    let diagram = build_paper_c()?;
    entries.push(LibraryEntry {
        name: "X".into(),
        algebra: diagram.x.clone(),
        variety: boolean_pixley(),
        subsets: Vec::new(),
    });
    entries.push(LibraryEntry {
        name: "paperC".into(),
        algebra: diagram.c.clone(),
        variety: boolean_pixley(),
        subsets: vec![
            ("u_image".into(), diagram.incl_first_image()?),
            ("k_image".into(), diagram.k.image()),
        ],
    });

    for e in &entries {
        if let Some((eq, val)) = e.variety.first_failure(&e.algebra, &budget)? {
            return Err(Error::InvalidAlgebra {
                name: e.name.clone(),
                reason: format!("fails `{eq}` at {val:?}"),
            });
        }
    }

    let find = |name: &str| -> AlgRef {
        entries
            .iter()
            .find(|e| e.name == name)
            .map(|e| e.algebra.clone())
            .expect("library entry")
    };
    let (z2, z4, s3, a5, sl25) = (find("Z2"), find("Z4"), find("S3"), find("A5"), find("SL25"));
    homs.push((
        "z4_to_z2".to_string(),
        Homomorphism::new(z4.clone(), z2.clone(), (0..4).map(|i| i % 2).collect())?,
    ));
    homs.push((
        "s3_sign".to_string(),
        Homomorphism::new(s3.clone(), z2.clone(), s3_elems.iter().map(parity).collect())?,
    ));
    homs.push(("sl25_to_a5".to_string(), first_surjection(&sl25, &a5, &budget)?));
    for e in &entries {
        homs.push((format!("id_{}", e.name), Homomorphism::identity(&e.algebra)));
    }
    for (name, base) in [("z4_to_z1", &z4), ("a5_to_z1", &a5)] {
        homs.push((name.to_string(), Homomorphism::zero(base, &find("Z1"))?));
    }

    Ok(Library {
        entries,
        homs,
        diagram,
    })
}

/// Every subuniverse, found by adjoining one element at a time starting from
/// `{0}`; sorted by size, then members. `limit` caps how many are kept.
pub fn all_subuniverses(alg: &AlgRef, limit: usize, budget: &Budget) -> Result<Vec<Subuniverse>> {
    let mut found = vec![Subuniverse::zero(alg)];
    let mut seen: std::collections::HashSet<Vec<usize>> =
        std::collections::HashSet::from([found[0].members().to_vec()]);
    let mut i = 0;
    while i < found.len() {
        let base = found[i].clone();
        for e in 0..alg.size() {
            if base.contains(e) {
                continue;
            }
            let mut gens = base.members().to_vec();
            gens.push(e);
            let next = Subuniverse::generate(alg, &gens, budget)?;
            if seen.insert(next.members().to_vec()) {
                if found.len() >= limit {
                    return Err(Error::BudgetExceeded {
                        what: "subuniverse enumeration",
                        needed: found.len() as u128 + 1,
                        limit: limit as u128,
                    });
                }
                found.push(next);
            }
        }
        i += 1;
    }
    found.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.members().cmp(b.members())));
    Ok(found)
}

/// The Mal'cev term of the first known variety that `alg` belongs to.
pub fn malcev_for(alg: &FiniteAlgebra, budget: &Budget) -> Option<Term> {
    if let Some(e) = library().entries.iter().find(|e| *e.algebra == *alg) {
        return e.variety.malcev.clone();
    }
    all_varieties()
        .into_iter()
        .filter(|v| v.signature.as_ref() == alg.signature().as_ref())
        .filter(|v| v.contains(alg, budget).unwrap_or(false))
        .find_map(|v| v.malcev)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn library_sizes() {
        let lib = library();
        let size = |n: &str| lib.get(n).unwrap().algebra.size();
        assert_eq!(size("Z2xZ2"), 4);
        assert_eq!(size("S3"), 6);
        assert_eq!(size("D4"), 8);
        assert_eq!(size("Q8"), 8);
        assert_eq!(size("A4"), 12);
        assert_eq!(size("A5"), 60);
        assert_eq!(size("SL25"), 120);
        assert_eq!(size("paperC"), 8);
        assert!(lib.groups().all(|g| g.algebra.is_group()));
    }

    #[test]
    fn named_subsets_have_expected_sizes() {
        let lib = library();
        let sub = |a: &str, s: &str| {
            lib.get(a)
                .unwrap()
                .subsets
                .iter()
                .find(|(n, _)| n == s)
                .unwrap()
                .1
                .len()
        };
        assert_eq!(sub("S3", "a3"), 3);
        assert_eq!(sub("S3", "t"), 2);
        assert_eq!(sub("D4", "rotations"), 4);
        assert_eq!(sub("A4", "v4"), 4);
        assert_eq!(sub("Q8", "pm1"), 2);
    }

    #[test]
    fn builtin_homs_are_surjective() {
        let lib = library();
        for name in ["z4_to_z2", "s3_sign", "sl25_to_a5"] {
            assert!(lib.hom(name).unwrap().is_surjective(), "{name}");
        }
        assert_eq!(lib.hom("s3_sign").unwrap().kernel().len(), 3);
        assert_eq!(lib.hom("sl25_to_a5").unwrap().kernel().len(), 2);
    }

    #[test]
    fn cayley_numbering_is_bfs_from_generators() {
        let z4 = cyclic(4);
        assert_eq!(z4.apply2(1, 1, 1), 2);
        assert_eq!(z4.apply2(1, 3, 1), 0);
        let (again, _) = cayley_closure("S3", group_signature(), vec![0u8, 1, 2], &[perm(3, &[&[0, 1]]), perm(3, &[&[0, 1, 2]])], compose);
        assert_eq!(again.tables(), symmetric3().tables());
    }

    #[test]
    fn hom_search_counts() {
        let b = Budget::default();
        let z4 = cyclic(4);
        let z2 = cyclic(2);
        assert_eq!(all_homs(&z4, &z2, 100, &b).unwrap().len(), 2);
        assert_eq!(all_homs(&z4, &z4, 100, &b).unwrap().len(), 4);
        assert_eq!(all_homs(&symmetric3(), &z2, 100, &b).unwrap().len(), 2);
    }
}
