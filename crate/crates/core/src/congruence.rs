//! Congruences: generation, lattice operations, normalisation and quotients.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::algebra::{advance, AlgRef, FiniteAlgebra, Homomorphism, Operations, Subuniverse};
use crate::error::{Error, Result};
use crate::Budget;

/// A congruence stored as a block-id array; each id is the least member of
/// its block, so equal congruences have equal arrays.
#[derive(Clone)]
pub struct Congruence {
    parent: AlgRef,
    blocks: Vec<usize>,
}

impl PartialEq for Congruence {
    fn eq(&self, other: &Self) -> bool {
        self.blocks == other.blocks && same_parent(&self.parent, &other.parent)
    }
}

impl Eq for Congruence {}

impl fmt::Debug for Congruence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Congruence({}: {:?})", self.parent.name(), self.classes())
    }
}

fn same_parent(a: &AlgRef, b: &AlgRef) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        // Smaller root wins so canonical ids fall out directly.
        if ra < rb {
            self.parent[rb] = ra;
        } else {
            self.parent[ra] = rb;
        }
        true
    }

    pub fn canonical(mut self) -> Vec<usize> {
        let n = self.parent.len();
        let mut least = vec![usize::MAX; n];
        let mut out = vec![0; n];
        for x in 0..n {
            let r = self.find(x);
            if least[r] == usize::MAX {
                least[r] = x;
            }
            out[x] = least[r];
        }
        out
    }
}

/// Least congruence containing `pairs` on any table-backed carrier.
///
/// Each pair that merges two classes is pushed through every basic
/// translation `ω(c_1, .., _, .., c_r)`; pairs that merge nothing lie in the
/// equivalence closure of merging pairs and need no propagation.
pub(crate) fn generate_blocks<O: Operations>(
    ops: &O,
    pairs: impl IntoIterator<Item = (usize, usize)>,
) -> Vec<usize> {
    let n = ops.carrier_size();
    let sig = ops.signature();
    let mut uf = UnionFind::new(n);
    let mut pending: Vec<(usize, usize)> = pairs.into_iter().filter(|(a, b)| a != b).collect();
    let operations: Vec<(usize, usize)> = (0..sig.len())
        .map(|op| (op, sig.arity(op)))
        .filter(|&(_, a)| a > 0)
        .collect();
    let mut rest = Vec::new();
    let mut args_a = Vec::new();
    let mut args_b = Vec::new();
    while let Some((a, b)) = pending.pop() {
        if !uf.union(a, b) {
            continue;
        }
        for &(op, arity) in &operations {
            for pos in 0..arity {
                rest.clear();
                rest.resize(arity - 1, 0);
                loop {
                    args_a.clear();
                    args_a.extend_from_slice(&rest[..pos]);
                    args_a.push(a);
                    args_a.extend_from_slice(&rest[pos..]);
                    args_b.clone_from(&args_a);
                    args_b[pos] = b;
                    let u = ops.apply_op(op, &args_a);
                    let v = ops.apply_op(op, &args_b);
                    if uf.find(u) != uf.find(v) {
                        pending.push((u, v));
                    }
                    if !advance(&mut rest, n) {
                        break;
                    }
                }
            }
        }
    }
    uf.canonical()
}

/// Spanning-edge compatibility check for a canonical block array: the
/// relation is the equivalence closure of the edges `(x, block(x))`, so it
/// suffices to push those edges through the basic translations.
fn first_incompatibility<O: Operations>(ops: &O, blocks: &[usize]) -> Option<String> {
    let n = ops.carrier_size();
    let sig = ops.signature();
    let mut rest = Vec::new();
    let mut args = Vec::new();
    for x in 0..n {
        let r = blocks[x];
        if r == x {
            continue;
        }
        for op in 0..sig.len() {
            let arity = sig.arity(op);
            for pos in 0..arity {
                rest.clear();
                rest.resize(arity - 1, 0);
                loop {
                    args.clear();
                    args.extend_from_slice(&rest[..pos]);
                    args.push(x);
                    args.extend_from_slice(&rest[pos..]);
                    let u = ops.apply_op(op, &args);
                    args[pos] = r;
                    let v = ops.apply_op(op, &args);
                    if blocks[u] != blocks[v] {
                        return Some(format!(
                            "`{}` separates {} ~ {} in position {}",
                            sig.name(op),
                            x,
                            r,
                            pos
                        ));
                    }
                    if !advance(&mut rest, n) {
                        break;
                    }
                }
            }
        }
    }
    None
}

fn canonicalize(labels: &[usize]) -> Vec<usize> {
    let mut first = std::collections::HashMap::new();
    labels
        .iter()
        .enumerate()
        .map(|(i, l)| *first.entry(*l).or_insert(i))
        .collect()
}

impl Congruence {
    pub fn delta(alg: &AlgRef) -> Congruence {
        Congruence {
            parent: alg.clone(),
            blocks: (0..alg.size()).collect(),
        }
    }

    pub fn nabla(alg: &AlgRef) -> Congruence {
        Congruence {
            parent: alg.clone(),
            blocks: vec![0; alg.size()],
        }
    }

    /// Builds a congruence from arbitrary block labels, validating
    /// compatibility with every operation.
    pub fn from_partition(alg: &AlgRef, labels: &[usize]) -> Result<Congruence> {
        if labels.len() != alg.size() {
            return Err(Error::NotCongruence(format!(
                "{} labels for {} elements",
                labels.len(),
                alg.size()
            )));
        }
        let blocks = canonicalize(labels);
        if let Some(why) = first_incompatibility(alg.as_ref(), &blocks) {
            return Err(Error::NotCongruence(why));
        }
        Ok(Congruence {
            parent: alg.clone(),
            blocks,
        })
    }

    pub(crate) fn from_blocks_unchecked(alg: &AlgRef, blocks: Vec<usize>) -> Congruence {
        debug_assert_eq!(blocks, canonicalize(&blocks));
        Congruence {
            parent: alg.clone(),
            blocks,
        }
    }

    pub fn parent(&self) -> &AlgRef {
        &self.parent
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn block_of(&self, x: usize) -> usize {
        self.blocks[x]
    }

    pub fn related(&self, a: usize, b: usize) -> bool {
        self.blocks[a] == self.blocks[b]
    }

    pub fn num_classes(&self) -> usize {
        self.blocks.iter().enumerate().filter(|(i, &b)| *i == b).count()
    }

    pub fn is_delta(&self) -> bool {
        self.blocks.iter().enumerate().all(|(i, &b)| i == b)
    }

    pub fn is_nabla(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    /// Classes in order of their least members, each sorted.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let n = self.blocks.len();
        let mut slot = vec![usize::MAX; n];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for x in 0..n {
            let b = self.blocks[x];
            if slot[b] == usize::MAX {
                slot[b] = out.len();
                out.push(Vec::new());
            }
            out[slot[b]].push(x);
        }
        out
    }

    /// Members of the class of `x`.
    pub fn class_of(&self, x: usize) -> Vec<usize> {
        let b = self.blocks[x];
        (0..self.blocks.len()).filter(|&y| self.blocks[y] == b).collect()
    }

    /// Refinement order: `self ⊆ other`.
    pub fn le(&self, other: &Congruence) -> bool {
        (0..self.blocks.len()).all(|x| other.blocks[x] == other.blocks[self.blocks[x]])
    }

    pub(crate) fn check_parent(&self, alg: &AlgRef) -> Result<()> {
        if same_parent(&self.parent, alg) {
            Ok(())
        } else {
            Err(Error::ParentMismatch)
        }
    }

    /// Number of related ordered pairs.
    pub fn pair_count(&self) -> usize {
        self.classes().iter().map(|c| c.len() * c.len()).sum()
    }
}

/// Least congruence containing the given pairs.
pub fn congruence_generate(alg: &AlgRef, pairs: &[(usize, usize)]) -> Result<Congruence> {
    if let Some(&(a, b)) = pairs.iter().find(|(a, b)| *a >= alg.size() || *b >= alg.size()) {
        return Err(Error::ElementOutOfRange {
            element: a.max(b),
            size: alg.size(),
        });
    }
    let blocks = generate_blocks(alg.as_ref(), pairs.iter().copied());
    Ok(Congruence::from_blocks_unchecked(alg, blocks))
}

pub fn kernel_pair(h: &Homomorphism) -> Congruence {
    let labels = h.map().to_vec();
    Congruence::from_blocks_unchecked(h.source(), canonicalize(&labels))
}

/// Join in the congruence lattice. The transitive closure of the union is
/// already compatible, so no translation propagation is needed.
pub fn congruence_join(a: &Congruence, b: &Congruence) -> Result<Congruence> {
    b.check_parent(&a.parent)?;
    let mut uf = UnionFind::new(a.blocks.len());
    for x in 0..a.blocks.len() {
        uf.union(x, a.blocks[x]);
        uf.union(x, b.blocks[x]);
    }
    Ok(Congruence::from_blocks_unchecked(&a.parent, uf.canonical()))
}

pub fn congruence_meet(a: &Congruence, b: &Congruence) -> Result<Congruence> {
    b.check_parent(&a.parent)?;
    let labels: Vec<(usize, usize)> = (0..a.blocks.len())
        .map(|x| (a.blocks[x], b.blocks[x]))
        .collect();
    let mut first = std::collections::HashMap::new();
    let blocks = labels
        .iter()
        .enumerate()
        .map(|(i, l)| *first.entry(*l).or_insert(i))
        .collect();
    Ok(Congruence::from_blocks_unchecked(&a.parent, blocks))
}

fn lattice_guard(alg: &FiniteAlgebra, budget: &Budget) -> Result<()> {
    let limit = if alg.is_group() {
        budget.max_lattice_carrier_group
    } else {
        budget.max_lattice_carrier
    };
    if alg.size() > limit {
        return Err(Error::BudgetExceeded {
            what: "congruence lattice carrier",
            needed: alg.size() as u128,
            limit: limit as u128,
        });
    }
    Ok(())
}

/// Every principal congruence `Cg(a, b)`, deduplicated, in a canonical order.
pub fn principal_congruences(alg: &AlgRef, budget: &Budget) -> Result<Vec<Congruence>> {
    lattice_guard(alg, budget)?;
    let n = alg.size();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    // In a group Cg(a, b) = Cg(0, a·b⁻¹), so the pairs (0, c) suffice.
    let firsts = if alg.is_group() { 0..1 } else { 0..n };
    for a in firsts {
        for b in a + 1..n {
            let blocks = generate_blocks(alg.as_ref(), [(a, b)]);
            if seen.insert(blocks.clone()) {
                out.push(Congruence::from_blocks_unchecked(alg, blocks));
            }
        }
    }
    sort_lattice(&mut out);
    Ok(out)
}

fn sort_lattice(list: &mut [Congruence]) {
    list.sort_by(|x, y| {
        y.num_classes()
            .cmp(&x.num_classes())
            .then_with(|| x.blocks.cmp(&y.blocks))
    });
}

/// The full congruence lattice: Δ, the principal congruences and all joins,
/// sorted by decreasing number of classes then block array.
pub fn all_congruences(alg: &AlgRef, budget: &Budget) -> Result<Vec<Congruence>> {
    let principal = principal_congruences(alg, budget)?;
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut list = Vec::new();
    for c in std::iter::once(Congruence::delta(alg)).chain(principal) {
        if seen.insert(c.blocks.clone()) {
            list.push(c);
        }
    }
    let mut i = 0;
    while i < list.len() {
        for j in 0..i {
            let joined = congruence_join(&list[i], &list[j])?;
            if seen.insert(joined.blocks.clone()) {
                list.push(joined);
                if list.len() > budget.max_lattice_size {
                    return Err(Error::BudgetExceeded {
                        what: "congruence lattice size",
                        needed: list.len() as u128,
                        limit: budget.max_lattice_size as u128,
                    });
                }
            }
        }
        i += 1;
    }
    sort_lattice(&mut list);
    Ok(list)
}

/// The class of 0.
pub fn zero_class(c: &Congruence) -> Subuniverse {
    let mask = c.blocks.iter().map(|&b| b == 0).collect();
    Subuniverse::from_mask_unchecked(c.parent.clone(), mask)
}

/// Least ideal containing `set`.
pub fn normal_closure(alg: &AlgRef, set: &[usize]) -> Result<Subuniverse> {
    let pairs: Vec<(usize, usize)> = set.iter().map(|&x| (x, 0)).collect();
    Ok(zero_class(&congruence_generate(alg, &pairs)?))
}

fn ideal_congruence(alg: &AlgRef, k: &Subuniverse) -> Result<Congruence> {
    k.check_parent(alg)?;
    let pairs: Vec<(usize, usize)> = k.members().iter().map(|&x| (x, 0)).collect();
    congruence_generate(alg, &pairs)
}

/// Whether `k` is the zero class of the congruence it generates.
pub fn is_ideal(alg: &AlgRef, k: &Subuniverse) -> Result<bool> {
    let c = ideal_congruence(alg, k)?;
    Ok(zero_class(&c).len() == k.len())
}

/// The congruence whose zero class is the ideal `k`.
pub fn denormalise(alg: &AlgRef, k: &Subuniverse) -> Result<Congruence> {
    let c = ideal_congruence(alg, k)?;
    let closure = zero_class(&c).len();
    if closure != k.len() {
        return Err(Error::NotIdeal {
            members: k.len(),
            closure,
        });
    }
    Ok(c)
}

/// Ideals of `alg`, as the distinct zero classes of its congruence lattice.
pub fn all_ideals(alg: &AlgRef, budget: &Budget) -> Result<Vec<Subuniverse>> {
    let mut out: Vec<Subuniverse> = Vec::new();
    for c in all_congruences(alg, budget)? {
        let z = zero_class(&c);
        if !out.contains(&z) {
            out.push(z);
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.members().cmp(b.members())));
    Ok(out)
}

/// The quotient algebra (classes numbered by least member, so the class of
/// 0 is element 0) and the projection onto it.
pub fn quotient(alg: &AlgRef, c: &Congruence) -> Result<(AlgRef, Homomorphism)> {
    c.check_parent(alg)?;
    if let Some(why) = first_incompatibility(alg.as_ref(), &c.blocks) {
        return Err(Error::NotCongruence(why));
    }
    let n = alg.size();
    let mut index = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for x in 0..n {
        if c.blocks[x] == x {
            index[x] = reps.len();
            reps.push(x);
        }
    }
    let q = reps.len();
    let projection: Vec<usize> = (0..n).map(|x| index[c.blocks[x]]).collect();
    let sig = alg.signature().clone();
    let mut tables = Vec::with_capacity(sig.len());
    let mut idx = Vec::new();
    let mut args = Vec::new();
    for op in 0..sig.len() {
        let arity = sig.arity(op);
        let mut table = Vec::with_capacity(q.pow(arity as u32));
        idx.clear();
        idx.resize(arity, 0);
        loop {
            args.clear();
            args.extend(idx.iter().map(|&i| reps[i]));
            table.push(projection[alg.apply(op, &args)]);
            if !advance(&mut idx, q) {
                break;
            }
        }
        tables.push(table);
    }
    let name = format!("{}/~{}", alg.name(), q);
    let target = Arc::new(FiniteAlgebra::with_group(
        name,
        sig,
        q,
        tables,
        alg.group_ops(),
    )?);
    let proj = Homomorphism::new_unchecked(alg.clone(), target.clone(), projection);
    Ok((target, proj))
}

/// Image `{(f a, f b) : a c b}` of a congruence containing `Eq(f)` along
/// the surjection `f`.
pub fn push_forward(c: &Congruence, f: &Homomorphism) -> Result<Congruence> {
    c.check_parent(f.source())?;
    let kernel = kernel_pair(f);
    if !kernel.le(c) {
        return Err(Error::NotCongruence(
            "pushed-forward congruence must contain the kernel pair".into(),
        ));
    }
    let mut uf = UnionFind::new(f.target().size());
    for x in 0..c.blocks.len() {
        uf.union(f.apply(x), f.apply(c.blocks[x]));
    }
    Ok(Congruence::from_blocks_unchecked(f.target(), uf.canonical()))
}

/// `K ∨ S` built as the preimage of the image of `S` along `X → X/K`.
pub fn join_via_preimage(alg: &AlgRef, k: &Subuniverse, s: &Subuniverse) -> Result<Subuniverse> {
    s.check_parent(alg)?;
    let (_, proj) = quotient(alg, &denormalise(alg, k)?)?;
    let image = proj.image_of(s)?;
    proj.preimage(&image)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library;

    fn classes(c: &Congruence) -> Vec<Vec<usize>> {
        c.classes()
    }

    #[test]
    fn generation_examples() {
        let z4 = library::cyclic(4);
        let c = congruence_generate(&z4, &[(0, 2)]).unwrap();
        assert_eq!(classes(&c), vec![vec![0, 2], vec![1, 3]]);
        assert!(congruence_generate(&z4, &[]).unwrap().is_delta());
        let s3 = library::symmetric3();
        let t = library::find_element_of_order(&s3, 2).unwrap();
        assert!(congruence_generate(&s3, &[(0, t)]).unwrap().is_nabla());
    }

    #[test]
    fn lattice_examples() {
        let b = Budget::default();
        assert_eq!(all_congruences(&library::cyclic(4), &b).unwrap().len(), 3);
        assert_eq!(all_congruences(&library::symmetric3(), &b).unwrap().len(), 3);
        assert_eq!(all_congruences(&library::cyclic(1), &b).unwrap().len(), 1);
        let z4 = library::cyclic(4);
        let m2 = congruence_generate(&z4, &[(0, 2)]).unwrap();
        let d = Congruence::delta(&z4);
        let n = Congruence::nabla(&z4);
        assert_eq!(congruence_join(&d, &m2).unwrap(), m2);
        assert_eq!(congruence_meet(&n, &m2).unwrap(), m2);
    }

    #[test]
    fn ideals_and_normal_closure() {
        let s3 = library::symmetric3();
        let c = library::find_element_of_order(&s3, 3).unwrap();
        let t = library::find_element_of_order(&s3, 2).unwrap();
        assert_eq!(normal_closure(&s3, &[c]).unwrap().len(), 3);
        assert!(normal_closure(&s3, &[t]).unwrap().is_full());
        assert!(normal_closure(&s3, &[0]).unwrap().is_trivial());
        let b = Budget::default();
        let sub = Subuniverse::generate(&s3, &[t], &b).unwrap();
        assert!(!is_ideal(&s3, &sub).unwrap());
        assert!(matches!(denormalise(&s3, &sub), Err(Error::NotIdeal { .. })));
        let z4 = library::cyclic(4);
        let k = Subuniverse::from_members(&z4, &[0, 2]).unwrap();
        let d = denormalise(&z4, &k).unwrap();
        assert_eq!(zero_class(&d), k);
    }

    #[test]
    fn quotient_examples() {
        let z4 = library::cyclic(4);
        let m2 = congruence_generate(&z4, &[(0, 2)]).unwrap();
        let (q, p) = quotient(&z4, &m2).unwrap();
        assert_eq!(q.size(), 2);
        assert_eq!(p.map(), &[0, 1, 0, 1]);
        let (q, p) = quotient(&z4, &Congruence::delta(&z4)).unwrap();
        assert_eq!(q.size(), 4);
        assert_eq!(p.map(), &[0, 1, 2, 3]);
        assert_eq!(p.kernel().members(), &[0]);
    }

    #[test]
    fn from_partition_validates() {
        let z4 = library::cyclic(4);
        assert!(Congruence::from_partition(&z4, &[5, 7, 5, 7]).is_ok());
        assert!(Congruence::from_partition(&z4, &[0, 0, 1, 1]).is_err());
    }
}
