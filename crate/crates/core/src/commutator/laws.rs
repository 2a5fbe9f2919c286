use std::collections::HashMap;

use super::{higgins, higgins3};
use crate::algebra::{AlgRef, Subuniverse};
use crate::error::Result;
use crate::Budget;

/// One instance of a commutator law.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawOutcome {
    pub law: &'static str,
    pub holds: bool,
    /// Ternary-commutator laws; a failure there falsifies the construction.
    pub ternary: bool,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

/// Subuniverse generated by a union.
pub fn join_all(x: &AlgRef, parts: &[&Subuniverse], budget: &Budget) -> Result<Subuniverse> {
    let gens: Vec<usize> = parts.iter().flat_map(|p| p.members().iter().copied()).collect();
    Subuniverse::generate(x, &gens, budget)
}

#[derive(Default)]
struct Cache {
    binary: HashMap<(Vec<usize>, Vec<usize>), Subuniverse>,
    ternary: HashMap<[Vec<usize>; 3], Subuniverse>,
}

impl Cache {
    fn h2(&mut self, x: &AlgRef, a: &Subuniverse, b: &Subuniverse, budget: &Budget) -> Result<Subuniverse> {
        let key = (a.members().to_vec(), b.members().to_vec());
        if let Some(v) = self.binary.get(&key) {
            return Ok(v.clone());
        }
        let v = higgins(x, a, b, budget)?;
        self.binary.insert(key, v.clone());
        Ok(v)
    }

    fn h3(
        &mut self,
        x: &AlgRef,
        a: &Subuniverse,
        b: &Subuniverse,
        c: &Subuniverse,
        budget: &Budget,
    ) -> Result<Subuniverse> {
        let key = [a.members().to_vec(), b.members().to_vec(), c.members().to_vec()];
        if let Some(v) = self.ternary.get(&key) {
            return Ok(v.clone());
        }
        let v = higgins3(x, a, b, c, budget)?;
        self.ternary.insert(key, v.clone());
        Ok(v)
    }
}

/// Evaluates symmetry, monotonicity (with `m ≤ a`), join decomposition,
/// removal of brackets and removal of duplicates on one triple.
pub fn check_commutator_laws(
    x: &AlgRef,
    a: &Subuniverse,
    b: &Subuniverse,
    c: &Subuniverse,
    m: &Subuniverse,
    budget: &Budget,
) -> Result<Vec<LawOutcome>> {
    let mut cache = Cache::default();
    let mut out = Vec::new();
    let mut record = |law, ternary, left: &Subuniverse, right: &Subuniverse, holds: bool| {
        out.push(LawOutcome {
            law,
            holds,
            ternary,
            left: left.members().to_vec(),
            right: right.members().to_vec(),
        })
    };

    let ab = cache.h2(x, a, b, budget)?;
    let ba = cache.h2(x, b, a, budget)?;
    record("symmetry (binary)", false, &ab, &ba, ab == ba);

    let abc = cache.h3(x, a, b, c, budget)?;
    let perms = [
        cache.h3(x, a, c, b, budget)?,
        cache.h3(x, b, a, c, budget)?,
        cache.h3(x, b, c, a, budget)?,
        cache.h3(x, c, a, b, budget)?,
        cache.h3(x, c, b, a, budget)?,
    ];
    for p in &perms {
        record("symmetry (ternary)", true, &abc, p, *p == abc);
    }

    if m.is_subset(a) {
        let mb = cache.h2(x, m, b, budget)?;
        record("monotonicity (binary)", false, &mb, &ab, mb.is_subset(&ab));
        let mbc = cache.h3(x, m, b, c, budget)?;
        record("monotonicity (ternary)", true, &mbc, &abc, mbc.is_subset(&abc));
    }

    let bc = b.join(c, budget)?;
    let lhs = cache.h2(x, a, &bc, budget)?;
    let ac = cache.h2(x, a, c, budget)?;
    let rhs = join_all(x, &[&ab, &ac, &abc], budget)?;
    record("join decomposition", true, &lhs, &rhs, lhs == rhs);

    let nested = cache.h2(x, &ab, c, budget)?;
    record("removal of brackets", true, &nested, &abc, nested.is_subset(&abc));

    let abb = cache.h3(x, a, b, b, budget)?;
    record("removal of duplicates", true, &abb, &ab, abb.is_subset(&ab));

    Ok(out)
}
