use std::fmt;
use std::sync::Arc;

use super::tuples::TupleSpace;
use super::{advance, AlgRef, FiniteAlgebra, Homomorphism};
use crate::error::{Error, Result};
use crate::Budget;

/// A subset of a carrier containing 0 and closed under every operation.
#[derive(Clone)]
pub struct Subuniverse {
    parent: AlgRef,
    members: Vec<usize>,
    mask: Vec<bool>,
}

impl PartialEq for Subuniverse {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members && same_parent(&self.parent, &other.parent)
    }
}

impl Eq for Subuniverse {}

impl fmt::Debug for Subuniverse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subuniverse({}: {:?})", self.parent.name(), self.members)
    }
}

pub(crate) fn same_parent(a: &AlgRef, b: &AlgRef) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl Subuniverse {
    /// The least subuniverse containing `gens`.
    pub fn generate(alg: &AlgRef, gens: &[usize], budget: &Budget) -> Result<Subuniverse> {
        if let Some(&g) = gens.iter().find(|&&g| g >= alg.size()) {
            return Err(Error::ElementOutOfRange {
                element: g,
                size: alg.size(),
            });
        }
        let space = TupleSpace::power(alg, 1)?;
        let codes: Vec<u64> = gens.iter().map(|&g| g as u64).collect();
        let set = space.generate(&codes, budget)?;
        let mut members: Vec<usize> = set.members().iter().map(|&c| c as usize).collect();
        members.sort_unstable();
        Ok(Self::from_sorted_unchecked(alg.clone(), members))
    }

    /// Validates closure exhaustively.
    pub fn from_members(alg: &AlgRef, members: &[usize]) -> Result<Subuniverse> {
        let mut sorted = members.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if let Some(&e) = sorted.iter().find(|&&e| e >= alg.size()) {
            return Err(Error::ElementOutOfRange {
                element: e,
                size: alg.size(),
            });
        }
        let s = Self::from_sorted_unchecked(alg.clone(), sorted);
        if !s.contains(0) {
            return Err(Error::NotSubuniverse("does not contain 0".into()));
        }
        let sig = alg.signature();
        let mut idx = Vec::new();
        let mut args = Vec::new();
        for op in 0..sig.len() {
            let arity = sig.arity(op);
            idx.clear();
            idx.resize(arity, 0);
            loop {
                args.clear();
                args.extend(idx.iter().map(|&i| s.members[i]));
                let v = alg.apply(op, &args);
                if !s.contains(v) {
                    return Err(Error::NotSubuniverse(format!(
                        "`{}`{:?} = {} escapes",
                        sig.name(op),
                        args,
                        v
                    )));
                }
                if !advance(&mut idx, s.members.len()) {
                    break;
                }
            }
        }
        Ok(s)
    }

    pub(crate) fn from_sorted_unchecked(parent: AlgRef, members: Vec<usize>) -> Subuniverse {
        let mut mask = vec![false; parent.size()];
        for &m in &members {
            mask[m] = true;
        }
        Subuniverse {
            parent,
            members,
            mask,
        }
    }

    pub(crate) fn from_mask_unchecked(parent: AlgRef, mask: Vec<bool>) -> Subuniverse {
        let members = (0..mask.len()).filter(|&i| mask[i]).collect();
        Subuniverse {
            parent,
            members,
            mask,
        }
    }

    pub fn full(alg: &AlgRef) -> Subuniverse {
        Self::from_sorted_unchecked(alg.clone(), (0..alg.size()).collect())
    }

    /// The subuniverse generated by the constants; `{0}` in a pointed signature
    /// whose only constant is the zero.
    pub fn zero(alg: &AlgRef) -> Subuniverse {
        Subuniverse::generate(alg, &[], &Budget::default()).expect("constants close within any carrier")
    }

    pub fn parent(&self) -> &AlgRef {
        &self.parent
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.mask.get(x).copied().unwrap_or(false)
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    pub fn is_full(&self) -> bool {
        self.members.len() == self.parent.size()
    }

    pub fn is_subset(&self, other: &Subuniverse) -> bool {
        self.members.iter().all(|&m| other.contains(m))
    }

    pub(crate) fn check_parent(&self, alg: &AlgRef) -> Result<()> {
        if same_parent(&self.parent, alg) {
            Ok(())
        } else {
            Err(Error::ParentMismatch)
        }
    }

    /// The subuniverse generated by the union.
    pub fn join(&self, other: &Subuniverse, budget: &Budget) -> Result<Subuniverse> {
        other.check_parent(&self.parent)?;
        let gens: Vec<usize> = self
            .members
            .iter()
            .chain(other.members.iter())
            .copied()
            .collect();
        Subuniverse::generate(&self.parent, &gens, budget)
    }

    pub fn meet(&self, other: &Subuniverse) -> Result<Subuniverse> {
        other.check_parent(&self.parent)?;
        let members = self
            .members
            .iter()
            .copied()
            .filter(|&m| other.contains(m))
            .collect();
        Ok(Self::from_sorted_unchecked(self.parent.clone(), members))
    }

    /// A small generating set, chosen greedily in increasing element order.
    pub fn generators(&self, budget: &Budget) -> Result<Vec<usize>> {
        let mut gens = Vec::new();
        let mut span = Subuniverse::generate(&self.parent, &[], budget)?;
        for &m in &self.members {
            if !span.contains(m) {
                gens.push(m);
                span = Subuniverse::generate(&self.parent, &gens, budget)?;
                if span.len() == self.len() {
                    break;
                }
            }
        }
        Ok(gens)
    }

    /// The subalgebra on these members (renumbered in increasing order)
    /// and its inclusion into the parent.
    pub fn to_algebra(&self, name: impl Into<String>) -> Result<(AlgRef, Homomorphism)> {
        let parent = &self.parent;
        let mut position = vec![usize::MAX; parent.size()];
        for (i, &m) in self.members.iter().enumerate() {
            position[m] = i;
        }
        let k = self.members.len();
        let sig = parent.signature().clone();
        let mut tables = Vec::with_capacity(sig.len());
        let mut idx = Vec::new();
        let mut args = Vec::new();
        for op in 0..sig.len() {
            let arity = sig.arity(op);
            let mut table = Vec::with_capacity(k.pow(arity as u32));
            idx.clear();
            idx.resize(arity, 0);
            loop {
                args.clear();
                args.extend(idx.iter().map(|&i| self.members[i]));
                table.push(position[parent.apply(op, &args)]);
                if !advance(&mut idx, k) {
                    break;
                }
            }
            tables.push(table);
        }
        let group = parent.group_ops();
        let sub = Arc::new(FiniteAlgebra::with_group(name.into(), sig, k, tables, group)?);
        let inclusion = Homomorphism::new_unchecked(sub.clone(), parent.clone(), self.members.clone());
        Ok((sub, inclusion))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library;

    #[test]
    fn generation_examples() {
        let b = Budget::default();
        let z4 = library::cyclic(4);
        assert_eq!(Subuniverse::generate(&z4, &[2], &b).unwrap().members(), &[0, 2]);
        assert_eq!(Subuniverse::generate(&z4, &[], &b).unwrap().members(), &[0]);
        let s3 = library::symmetric3();
        let three_cycle = library::find_element_of_order(&s3, 3).unwrap();
        assert_eq!(Subuniverse::generate(&s3, &[three_cycle], &b).unwrap().len(), 3);
    }

    #[test]
    fn from_members_rejects_unclosed_sets() {
        let z4 = library::cyclic(4);
        assert!(Subuniverse::from_members(&z4, &[0, 1]).is_err());
        assert!(Subuniverse::from_members(&z4, &[1, 3]).is_err());
        assert!(Subuniverse::from_members(&z4, &[0, 2]).is_ok());
    }

    #[test]
    fn to_algebra_gives_inclusion() {
        let b = Budget::default();
        let z4 = library::cyclic(4);
        let s = Subuniverse::generate(&z4, &[2], &b).unwrap();
        let (sub, inc) = s.to_algebra("2Z4").unwrap();
        assert_eq!(sub.size(), 2);
        assert!(sub.is_group());
        assert_eq!(inc.image(), s);
        assert_eq!(s.generators(&b).unwrap(), vec![2]);
    }
}
