use std::sync::{Arc, OnceLock};

use super::signature::Signature;
use crate::error::{Error, Result};

/// Largest carrier for which group structure is detected by brute force.
const GROUP_DETECTION_LIMIT: usize = 256;

/// Work allowed when testing operations for multilinearity.
const LINEAR_DETECTION_WORK: u64 = 1 << 26;

/// A group operation `add` (with identity 0) such that every other
/// operation of positive arity is either its inverse or additive in each
/// argument separately.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearOps {
    pub add: usize,
    pub inverse: Option<usize>,
    pub multilinear: Vec<usize>,
}

/// Operation indices of a group structure `(zero, mul, inv)` on an algebra
/// whose signature has no other symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupOps {
    pub mul: usize,
    pub inv: usize,
}

/// A finite algebra on `{0, .., n-1}` with element 0 the zero constant.
///
/// Tables are row-major with the first argument most significant.
#[derive(Debug, Clone)]
pub struct FiniteAlgebra {
    name: String,
    signature: Arc<Signature>,
    size: usize,
    tables: Vec<Vec<usize>>,
    group: Option<GroupOps>,
    linear: OnceLock<Option<LinearOps>>,
}

impl PartialEq for FiniteAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size
            && self.signature == other.signature
            && self.tables == other.tables
            && self.name == other.name
    }
}

impl Eq for FiniteAlgebra {}

pub type AlgRef = Arc<FiniteAlgebra>;

impl FiniteAlgebra {
    pub fn new(
        name: impl Into<String>,
        signature: Arc<Signature>,
        size: usize,
        tables: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let mut alg = Self::build(name.into(), signature, size, tables)?;
        if size <= GROUP_DETECTION_LIMIT {
            alg.group = alg.detect_group();
        }
        Ok(alg)
    }

    /// Construction for algebras whose group structure is known (products,
    /// quotients and subalgebras of groups).
    pub(crate) fn with_group(
        name: String,
        signature: Arc<Signature>,
        size: usize,
        tables: Vec<Vec<usize>>,
        group: Option<GroupOps>,
    ) -> Result<Self> {
        let mut alg = Self::build(name, signature, size, tables)?;
        alg.group = match group {
            Some(g) => Some(g),
            None if size <= GROUP_DETECTION_LIMIT => alg.detect_group(),
            None => None,
        };
        Ok(alg)
    }

    fn build(
        name: String,
        signature: Arc<Signature>,
        size: usize,
        tables: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let invalid = |reason: String| Error::InvalidAlgebra {
            name: name.clone(),
            reason,
        };
        if size == 0 {
            return Err(invalid("carrier must be nonempty".into()));
        }
        if tables.len() != signature.len() {
            return Err(invalid(format!(
                "{} tables for {} operations",
                tables.len(),
                signature.len()
            )));
        }
        for (op, table) in tables.iter().enumerate() {
            let arity = signature.arity(op) as u32;
            let expected = size
                .checked_pow(arity)
                .ok_or_else(|| invalid("table too large".into()))?;
            if table.len() != expected {
                return Err(invalid(format!(
                    "table `{}` has {} entries, expected {}",
                    signature.name(op),
                    table.len(),
                    expected
                )));
            }
            if let Some(pos) = table.iter().position(|&v| v >= size) {
                return Err(invalid(format!(
                    "table `{}` entry {} is {} (size {})",
                    signature.name(op),
                    pos,
                    table[pos],
                    size
                )));
            }
        }
        if tables[signature.zero_index()][0] != 0 {
            return Err(invalid("the zero constant must be element 0".into()));
        }
        Ok(FiniteAlgebra {
            name,
            signature,
            size,
            tables,
            group: None,
            linear: OnceLock::new(),
        })
    }

    fn detect_group(&self) -> Option<GroupOps> {
        let sig = &self.signature;
        if sig.len() != 3 {
            return None;
        }
        let mul = (0..3).find(|&i| sig.arity(i) == 2)?;
        let inv = (0..3).find(|&i| sig.arity(i) == 1)?;
        let n = self.size;
        let m = &self.tables[mul];
        let iv = &self.tables[inv];
        for a in 0..n {
            if m[a] != a || m[a * n] != a || m[a * n + iv[a]] != 0 {
                return None;
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = m[a * n + b];
                for c in 0..n {
                    if m[ab * n + c] != m[a * n + m[b * n + c]] {
                        return None;
                    }
                }
            }
        }
        Some(GroupOps { mul, inv })
    }

    /// The additive structure used by the linear closure, if any; computed
    /// once on first use.
    pub fn linear_ops(&self) -> Option<&LinearOps> {
        self.linear.get_or_init(|| self.detect_linear()).as_ref()
    }

    fn is_group_op(&self, op: usize) -> bool {
        let n = self.size;
        let m = &self.tables[op];
        if (0..n).any(|a| m[a] != a || m[a * n] != a || !(0..n).any(|b| m[a * n + b] == 0)) {
            return false;
        }
        (0..n).all(|a| {
            (0..n).all(|b| {
                let ab = m[a * n + b];
                (0..n).all(|c| m[ab * n + c] == m[a * n + m[b * n + c]])
            })
        })
    }

    fn is_additive_in(&self, op: usize, add: usize, pos: usize) -> bool {
        let n = self.size;
        let arity = self.signature.arity(op);
        let sum = |a: usize, b: usize| self.tables[add][a * n + b];
        let mut args = vec![0; arity];
        let mut left = vec![0; arity];
        let mut right = vec![0; arity];
        loop {
            for a in 0..n {
                for b in 0..n {
                    args[pos] = sum(a, b);
                    left.copy_from_slice(&args);
                    right.copy_from_slice(&args);
                    left[pos] = a;
                    right[pos] = b;
                    if self.apply(op, &args) != sum(self.apply(op, &left), self.apply(op, &right)) {
                        return false;
                    }
                }
            }
            // Advance the other positions.
            let mut i = arity;
            loop {
                if i == 0 {
                    return true;
                }
                i -= 1;
                if i == pos {
                    continue;
                }
                args[i] += 1;
                if args[i] < n {
                    break;
                }
                args[i] = 0;
            }
        }
    }

    fn detect_linear(&self) -> Option<LinearOps> {
        let sig = &self.signature;
        let n = self.size as u64;
        let work: u64 = (0..sig.len())
            .map(|op| (sig.arity(op) as u64).saturating_mul(n.saturating_pow(sig.arity(op) as u32 + 1)))
            .fold(n.saturating_pow(3), u64::saturating_add);
        if work > LINEAR_DETECTION_WORK {
            return None;
        }
        'candidates: for add in (0..sig.len()).filter(|&o| sig.arity(o) == 2) {
            if !self.is_group_op(add) {
                continue;
            }
            let m = &self.tables[add];
            let size = self.size;
            let mut inverse = None;
            let mut multilinear = Vec::new();
            for op in (0..sig.len()).filter(|&o| o != add && sig.arity(o) > 0) {
                let t = &self.tables[op];
                if inverse.is_none() && sig.arity(op) == 1 && (0..size).all(|a| m[a * size + t[a]] == 0) {
                    inverse = Some(op);
                } else if (0..sig.arity(op)).all(|pos| self.is_additive_in(op, add, pos)) {
                    multilinear.push(op);
                } else {
                    continue 'candidates;
                }
            }
            return Some(LinearOps { add, inverse, multilinear });
        }
        None
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(&self, name: impl Into<String>) -> FiniteAlgebra {
        FiniteAlgebra {
            name: name.into(),
            ..self.clone()
        }
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn tables(&self) -> &[Vec<usize>] {
        &self.tables
    }

    pub fn table(&self, op: usize) -> &[usize] {
        &self.tables[op]
    }

    pub fn group_ops(&self) -> Option<GroupOps> {
        self.group
    }

    pub fn is_group(&self) -> bool {
        self.group.is_some()
    }

    pub fn op_index(&self, name: &str) -> Result<usize> {
        self.signature
            .index_of(name)
            .ok_or_else(|| Error::UnknownOp(name.to_string()))
    }

    /// Table lookup; `args.len()` must equal the arity.
    #[inline]
    pub fn apply(&self, op: usize, args: &[usize]) -> usize {
        let mut idx = 0;
        for &a in args {
            idx = idx * self.size + a;
        }
        self.tables[op][idx]
    }

    #[inline]
    pub fn apply2(&self, op: usize, a: usize, b: usize) -> usize {
        self.tables[op][a * self.size + b]
    }

    /// Checked application by operation name.
    pub fn apply_named(&self, op: &str, args: &[usize]) -> Result<usize> {
        let i = self.op_index(op)?;
        let arity = self.signature.arity(i);
        if arity != args.len() {
            return Err(Error::ArityMismatch {
                op: op.to_string(),
                expected: arity,
                found: args.len(),
            });
        }
        if let Some(&e) = args.iter().find(|&&e| e >= self.size) {
            return Err(Error::ElementOutOfRange {
                element: e,
                size: self.size,
            });
        }
        Ok(self.apply(i, args))
    }

    pub fn same_signature(&self, other: &FiniteAlgebra) -> bool {
        Arc::ptr_eq(&self.signature, &other.signature) || self.signature == other.signature
    }

    pub fn into_ref(self) -> AlgRef {
        Arc::new(self)
    }

    /// Renumbers elements along the permutation `perm` (old index -> new index).
    /// `perm[0]` must be the new position of the old zero, i.e. the caller
    /// arranges for the zero constant to land on 0.
    pub fn relabel(&self, perm: &[usize]) -> Result<FiniteAlgebra> {
        let n = self.size;
        let mut inverse = vec![usize::MAX; n];
        for (old, &new) in perm.iter().enumerate() {
            inverse[new] = old;
        }
        let mut tables = Vec::with_capacity(self.tables.len());
        for (op, table) in self.tables.iter().enumerate() {
            let arity = self.signature.arity(op);
            let mut out = vec![0; table.len()];
            let mut args = vec![0usize; arity];
            let mut old_args = vec![0usize; arity];
            for (idx, slot) in out.iter_mut().enumerate() {
                let mut rest = idx;
                for a in args.iter_mut().rev() {
                    *a = rest % n;
                    rest /= n;
                }
                for (o, &a) in old_args.iter_mut().zip(&args) {
                    *o = inverse[a];
                }
                *slot = perm[self.apply(op, &old_args)];
            }
            tables.push(out);
        }
        FiniteAlgebra::with_group(
            self.name.clone(),
            self.signature.clone(),
            n,
            tables,
            self.group,
        )
    }
}

/// Decodes a row-major table index into its argument tuple.
pub(crate) fn decode_args(mut idx: usize, n: usize, args: &mut [usize]) {
    for a in args.iter_mut().rev() {
        *a = idx % n;
        idx /= n;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z3() -> FiniteAlgebra {
        let sig = Arc::new(Signature::new([("zero", 0), ("mul", 2), ("inv", 1)]).unwrap());
        let mul = (0..9).map(|i| (i / 3 + i % 3) % 3).collect();
        FiniteAlgebra::new("Z3", sig, 3, vec![vec![0], mul, vec![0, 2, 1]]).unwrap()
    }

    #[test]
    fn detects_groups() {
        let g = z3();
        assert_eq!(g.group_ops(), Some(GroupOps { mul: 1, inv: 2 }));
        assert_eq!(g.apply2(1, 2, 2), 1);
        assert_eq!(g.apply_named("inv", &[1]).unwrap(), 2);
    }

    #[test]
    fn rejects_bad_tables() {
        let sig = Arc::new(Signature::new([("zero", 0), ("mul", 2)]).unwrap());
        assert!(FiniteAlgebra::new("a", sig.clone(), 2, vec![vec![0], vec![0, 1, 1]]).is_err());
        assert!(FiniteAlgebra::new("a", sig.clone(), 2, vec![vec![0], vec![0, 1, 1, 2]]).is_err());
        assert!(FiniteAlgebra::new("a", sig, 2, vec![vec![1], vec![0, 1, 1, 0]]).is_err());
    }

    #[test]
    fn relabel_preserves_structure() {
        let g = z3();
        let h = g.relabel(&[0, 2, 1]).unwrap();
        assert_eq!(h.apply2(1, 1, 1), 2);
        assert!(h.is_group());
    }
}
