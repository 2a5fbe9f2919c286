//! Subuniverses of finite products held as sets of mixed-radix codes.
//!
//! The closure routine is the workhorse behind subuniverse generation and
//! the product-tracking commutator constructions.

use std::collections::HashMap;

use rayon::prelude::*;

use super::{FiniteAlgebra, GroupOps, LinearOps, Operations, Signature};
use crate::error::{Error, Result};
use crate::Budget;

const DENSE_INDEX_LIMIT: u64 = 1 << 23;
/// Closure rows longer than this are evaluated on the rayon pool.
const PARALLEL_ROWS: usize = 4096;

/// The product `factors[0] × .. × factors[m-1]`, coordinate 0 most significant.
pub(crate) struct TupleSpace<'a> {
    factors: Vec<&'a FiniteAlgebra>,
    weights: Vec<u64>,
    total: u64,
    group: Option<GroupOps>,
    linear: Option<LinearOps>,
}

impl<'a> TupleSpace<'a> {
    pub fn new(factors: Vec<&'a FiniteAlgebra>) -> Result<Self> {
        assert!(!factors.is_empty());
        if factors.iter().any(|f| !f.same_signature(factors[0])) {
            return Err(Error::SignatureMismatch);
        }
        let mut weights = vec![0u64; factors.len()];
        let mut total: u64 = 1;
        for (i, f) in factors.iter().enumerate().rev() {
            weights[i] = total;
            total = total
                .checked_mul(f.size() as u64)
                .ok_or(Error::BudgetExceeded {
                    what: "product carrier",
                    needed: u128::MAX,
                    limit: u64::MAX as u128,
                })?;
        }
        let group = match factors[0].group_ops() {
            Some(g) if factors.iter().all(|f| f.group_ops() == Some(g)) => Some(g),
            _ => None,
        };
        let linear = match (group, factors[0].linear_ops()) {
            (None, Some(l)) if factors.iter().all(|f| f.linear_ops() == Some(l)) => Some(l.clone()),
            _ => None,
        };
        Ok(TupleSpace {
            factors,
            weights,
            total,
            group,
            linear,
        })
    }

    pub fn power(alg: &'a FiniteAlgebra, m: usize) -> Result<Self> {
        Self::new(vec![alg; m])
    }

    pub fn arity(&self) -> usize {
        self.factors.len()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn signature(&self) -> &Signature {
        self.factors[0].signature()
    }

    pub fn encode(&self, coords: &[usize]) -> u64 {
        coords
            .iter()
            .zip(&self.weights)
            .map(|(&c, &w)| c as u64 * w)
            .sum()
    }

    pub fn decode(&self, code: u64, out: &mut [usize]) {
        let mut rest = code;
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = (rest / self.weights[i]) as usize;
            rest %= self.weights[i];
        }
    }

    /// Componentwise application on decoded arguments (`args[j]` is the
    /// coordinate vector of argument `j`).
    pub fn apply_decoded(&self, op: usize, args: &[&[usize]], scratch: &mut Vec<usize>) -> u64 {
        let mut code = 0;
        for (i, f) in self.factors.iter().enumerate() {
            scratch.clear();
            scratch.extend(args.iter().map(|a| a[i]));
            code += f.apply(op, scratch) as u64 * self.weights[i];
        }
        code
    }

    pub fn constants(&self) -> Vec<u64> {
        let sig = self.signature();
        (0..sig.len())
            .filter(|&op| sig.arity(op) == 0)
            .map(|op| {
                self.factors
                    .iter()
                    .zip(&self.weights)
                    .map(|(f, &w)| f.table(op)[0] as u64 * w)
                    .sum()
            })
            .collect()
    }

    /// Least subuniverse containing `gens` and the constants.
    pub fn generate(&self, gens: &[u64], budget: &Budget) -> Result<TupleSet> {
        let mut set = TupleSet::with_capacity(self.total);
        set.insert(0);
        for c in self.constants() {
            set.insert(c);
        }
        for &g in gens {
            debug_assert!(g < self.total);
            set.insert(g);
        }
        let result = match (self.group, &self.linear) {
            (Some(g), _) => self.close_group(set, gens, g, budget.max_closure),
            (None, Some(l)) => self.close_linear(set, gens, l, budget.max_closure),
            (None, None) => self.close_general(set, budget.max_closure),
        };
        if let Ok(s) = &result {
            budget.charge(s.len() as u64);
        }
        result
    }

    fn over_limit(&self, len: usize, limit: usize) -> Result<()> {
        if len > limit {
            Err(Error::BudgetExceeded {
                what: "closure size",
                needed: len as u128,
                limit: limit as u128,
            })
        } else {
            Ok(())
        }
    }

    // In a finite group the submonoid generated by `gens` is the subgroup, so
    // right multiplication by generators reaches every element.
    fn close_group(&self, mut set: TupleSet, gens: &[u64], g: GroupOps, limit: usize) -> Result<TupleSet> {
        let m = self.arity();
        let decoded: Vec<Vec<usize>> = gens
            .iter()
            .map(|&c| {
                let mut v = vec![0; m];
                self.decode(c, &mut v);
                v
            })
            .collect();
        let mut cur = vec![0usize; m];
        let mut i = 0;
        while i < set.len() {
            self.decode(set.members[i], &mut cur);
            for gen in &decoded {
                let mut code = 0;
                for k in 0..m {
                    code += self.factors[k].apply2(g.mul, cur[k], gen[k]) as u64 * self.weights[k];
                }
                if set.insert(code) {
                    self.over_limit(set.len(), limit)?;
                }
            }
            i += 1;
        }
        Ok(set)
    }

    // The subgroup for `add` spanned by a generator list is closed under a
    // multilinear operation as soon as it contains the operation's values on
    // generators, so grow the list until those values lie in the span. Each
    // new generator at least doubles the span.
    fn close_linear(&self, set: TupleSet, gens: &[u64], l: &LinearOps, limit: usize) -> Result<TupleSet> {
        let m = self.arity();
        let mut list: Vec<u64> = set.members().iter().copied().filter(|&c| c != 0).collect();
        list.extend(gens.iter().copied().filter(|&c| c != 0));
        list.sort_unstable();
        list.dedup();
        let mut span = TupleSet::with_capacity(self.total);
        span.insert(0);
        let mut decoded: Vec<Vec<usize>> = Vec::new();
        let mut cur = vec![0usize; m];
        let mut spanned = 0;
        let mut checked = 0;
        loop {
            // Extend the span by the generators added since the last pass.
            let old_len = span.len();
            for c in &list[decoded.len()..] {
                let mut v = vec![0; m];
                self.decode(*c, &mut v);
                decoded.push(v);
            }
            let mut i = 0;
            while i < span.len() {
                self.decode(span.members[i], &mut cur);
                let from = if i < old_len { spanned } else { 0 };
                for gen in &decoded[from..] {
                    let mut code = 0;
                    for k in 0..m {
                        code += self.factors[k].apply2(l.add, cur[k], gen[k]) as u64 * self.weights[k];
                    }
                    if span.insert(code) {
                        self.over_limit(span.len(), limit)?;
                    }
                }
                i += 1;
            }
            spanned = decoded.len();
            // Values of each multilinear operation on generator tuples that
            // involve a generator not yet checked.
            let mut fresh = Vec::new();
            let mut scratch = Vec::new();
            for &op in l.multilinear.iter().filter(|_| !decoded.is_empty()) {
                let arity = self.signature().arity(op);
                let mut idx = vec![0usize; arity];
                loop {
                    if idx.iter().any(|&j| j >= checked) {
                        let args: Vec<&[usize]> = idx.iter().map(|&j| decoded[j].as_slice()).collect();
                        let code = self.apply_decoded(op, &args, &mut scratch);
                        if !span.contains(code) && !fresh.contains(&code) {
                            fresh.push(code);
                        }
                    }
                    if !super::advance(&mut idx, decoded.len()) {
                        break;
                    }
                }
            }
            checked = decoded.len();
            match fresh.first() {
                // Only the first value is certainly outside the span once
                // the span grows; the others are rechecked next pass.
                Some(&code) => list.push(code),
                None => return Ok(span),
            }
            if fresh.len() > 1 {
                checked = 0;
            }
        }
    }

    // Semi-naive closure: element `i` is combined with every tuple of earlier
    // elements in which it occurs at least once.
    fn close_general(&self, mut set: TupleSet, limit: usize) -> Result<TupleSet> {
        let m = self.arity();
        let sig = self.signature();
        let ops: Vec<(usize, usize)> = (0..sig.len())
            .map(|op| (op, sig.arity(op)))
            .filter(|&(_, a)| a > 0)
            .collect();
        let mut coords: Vec<usize> = Vec::new();
        let mut scratch = Vec::new();
        let mut idx = Vec::new();
        let mut codes = Vec::new();
        let mut i = 0;
        while i < set.len() {
            while coords.len() < set.len() * m {
                let k = coords.len() / m;
                let start = coords.len();
                coords.resize(start + m, 0);
                self.decode(set.members[k], &mut coords[start..]);
            }
            for &(op, arity) in &ops {
                if arity == 2 {
                    self.combine_binary(op, i, &coords, &set, &mut codes);
                    for &code in &codes {
                        if set.insert(code) {
                            self.over_limit(set.len(), limit)?;
                        }
                    }
                    continue;
                }
                // Tuples whose first occurrence of `i` is at position `p`:
                // earlier positions range below `i`, later ones up to `i`.
                for p in 0..arity {
                    if p > 0 && i == 0 {
                        break;
                    }
                    let bound = |q: usize| if q < p { i } else { i + 1 };
                    idx.clear();
                    idx.resize(arity, 0);
                    idx[p] = i;
                    loop {
                        let mut code = 0;
                        for (k, f) in self.factors.iter().enumerate() {
                            scratch.clear();
                            scratch.extend(idx.iter().map(|&j| coords[j * m + k]));
                            code += f.apply(op, &scratch) as u64 * self.weights[k];
                        }
                        if set.insert(code) {
                            self.over_limit(set.len(), limit)?;
                        }
                        let mut q = arity;
                        let more = loop {
                            if q == 0 {
                                break false;
                            }
                            q -= 1;
                            if q == p {
                                continue;
                            }
                            idx[q] += 1;
                            if idx[q] < bound(q) {
                                break true;
                            }
                            idx[q] = 0;
                        };
                        if !more {
                            break;
                        }
                    }
                }
            }
            i += 1;
        }
        Ok(set)
    }
}

impl TupleSpace<'_> {
    /// Codes of `op(i, j)` for `j <= i` and `op(j, i)` for `j < i` that are
    /// not yet in `set`, where `coords` holds the decoded members in order.
    fn combine_binary(&self, op: usize, i: usize, coords: &[usize], set: &TupleSet, out: &mut Vec<u64>) {
        let m = self.arity();
        let ci = &coords[i * m..(i + 1) * m];
        // Per coordinate, the weighted table row and column of `ci[k]`.
        let mut left: Vec<Vec<u64>> = Vec::with_capacity(m);
        let mut right: Vec<Vec<u64>> = Vec::with_capacity(m);
        for (k, f) in self.factors.iter().enumerate() {
            let n = f.size();
            let t = f.table(op);
            let w = self.weights[k];
            left.push((0..n).map(|v| t[ci[k] * n + v] as u64 * w).collect());
            right.push((0..n).map(|v| t[v * n + ci[k]] as u64 * w).collect());
        }
        let eval = |rows: &[Vec<u64>], j: usize| -> u64 {
            let cj = &coords[j * m..(j + 1) * m];
            rows.iter().zip(cj).map(|(r, &v)| r[v]).sum()
        };
        out.clear();
        if i < PARALLEL_ROWS {
            out.extend((0..=i).map(|j| eval(&left, j)).filter(|&c| !set.contains(c)));
            out.extend((0..i).map(|j| eval(&right, j)).filter(|&c| !set.contains(c)));
        } else {
            let fresh = |rows: &[Vec<u64>], end: usize| -> Vec<u64> {
                (0..end).into_par_iter().map(|j| eval(rows, j)).filter(|&c| !set.contains(c)).collect()
            };
            out.extend(fresh(&left, i + 1));
            out.extend(fresh(&right, i));
        }
    }
}

enum Index {
    Dense(Vec<u32>),
    Sparse(HashMap<u64, u32>),
}

/// A set of tuple codes in discovery order with constant-time lookup.
pub(crate) struct TupleSet {
    members: Vec<u64>,
    index: Index,
}

impl TupleSet {
    pub fn with_capacity(total: u64) -> Self {
        let index = if total <= DENSE_INDEX_LIMIT {
            Index::Dense(vec![u32::MAX; total as usize])
        } else {
            Index::Sparse(HashMap::new())
        };
        TupleSet {
            members: Vec::new(),
            index,
        }
    }

    /// Returns true if the code was new.
    pub fn insert(&mut self, code: u64) -> bool {
        let pos = self.members.len() as u32;
        let fresh = match &mut self.index {
            Index::Dense(v) => {
                let slot = &mut v[code as usize];
                if *slot == u32::MAX {
                    *slot = pos;
                    true
                } else {
                    false
                }
            }
            Index::Sparse(h) => {
                if let std::collections::hash_map::Entry::Vacant(e) = h.entry(code) {
                    e.insert(pos);
                    true
                } else {
                    false
                }
            }
        };
        if fresh {
            self.members.push(code);
        }
        fresh
    }

    pub fn position(&self, code: u64) -> Option<usize> {
        match &self.index {
            Index::Dense(v) => v
                .get(code as usize)
                .copied()
                .filter(|&p| p != u32::MAX)
                .map(|p| p as usize),
            Index::Sparse(h) => h.get(&code).map(|&p| p as usize),
        }
    }

    pub fn contains(&self, code: u64) -> bool {
        self.position(code).is_some()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }
}

/// A subuniverse of a power, addressed by position in its member list.
pub(crate) struct SubPower<'a> {
    pub space: TupleSpace<'a>,
    pub set: TupleSet,
    coords: Vec<usize>,
}

impl<'a> SubPower<'a> {
    /// `set` must be closed under the operations of `space`.
    pub fn new(space: TupleSpace<'a>, set: TupleSet) -> Self {
        let m = space.arity();
        let mut coords = vec![0; set.len() * m];
        for (k, &code) in set.members().iter().enumerate() {
            space.decode(code, &mut coords[k * m..(k + 1) * m]);
        }
        SubPower { space, set, coords }
    }

    pub fn coords(&self, i: usize) -> &[usize] {
        let m = self.space.arity();
        &self.coords[i * m..(i + 1) * m]
    }

    pub fn position_of(&self, coords: &[usize]) -> Option<usize> {
        self.set.position(self.space.encode(coords))
    }
}

impl Operations for SubPower<'_> {
    fn carrier_size(&self) -> usize {
        self.set.len()
    }

    fn signature(&self) -> &Signature {
        self.space.signature()
    }

    fn apply_op(&self, op: usize, args: &[usize]) -> usize {
        let decoded: Vec<&[usize]> = args.iter().map(|&a| self.coords(a)).collect();
        let code = self.space.apply_decoded(op, &decoded, &mut Vec::new());
        self.set
            .position(code)
            .expect("subpower is closed under the operations")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::direct_product;
    use crate::library::{builtin, na_rings};
    use crate::search::{enumerate_models, EnumOptions};

    fn agree(a: &FiniteAlgebra, m: usize, gen_sets: &[Vec<Vec<usize>>]) {
        let space = TupleSpace::power(a, m).unwrap();
        let l = space.linear.clone().expect("linear structure detected");
        for gens in gen_sets {
            let codes: Vec<u64> = gens.iter().map(|g| space.encode(g)).collect();
            let seed = || {
                let mut s = TupleSet::with_capacity(space.total());
                s.insert(0);
                for &c in &codes {
                    s.insert(c);
                }
                s
            };
            let fast = space.close_linear(seed(), &codes, &l, 1 << 20).unwrap();
            let slow = space.close_general(seed(), 1 << 20).unwrap();
            let mut f = fast.members().to_vec();
            let mut g = slow.members().to_vec();
            f.sort_unstable();
            g.sort_unstable();
            assert_eq!(f, g, "{} power {m}, generators {gens:?}", a.name());
        }
    }

    #[test]
    fn linear_closure_matches_general_closure() {
        let budget = Budget::default();
        let x = builtin("X").unwrap();
        let (x2, _) = direct_product(&[x.clone(), x], &budget).unwrap();
        agree(&x2, 2, &[vec![], vec![vec![1, 2]], vec![vec![1, 3], vec![2, 2]], vec![vec![3, 1], vec![1, 0], vec![0, 2]]]);
        for ring in enumerate_models(&na_rings(), 4, &EnumOptions::default()).unwrap().models {
            assert!(ring.linear_ops().is_some());
            agree(&ring, 2, &[vec![vec![1, 2]], vec![vec![1, 0], vec![0, 3]], vec![vec![2, 3]]]);
        }
    }

    #[test]
    fn non_distributive_products_are_not_linear() {
        let c = builtin("paperC").unwrap();
        assert!(c.linear_ops().is_none());
        assert!(builtin("X").unwrap().linear_ops().is_some());
    }
}
