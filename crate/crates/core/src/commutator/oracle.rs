use crate::algebra::{AlgRef, Subuniverse};
use crate::error::{Error, Result};
use crate::Budget;

/// For a group: the subgroup generated by all `k l k⁻¹ l⁻¹`.
pub fn commutator_word_oracle(
    x: &AlgRef,
    k: &Subuniverse,
    l: &Subuniverse,
    budget: &Budget,
) -> Result<Subuniverse> {
    let g = x
        .group_ops()
        .ok_or_else(|| Error::Usage(format!("`{}` is not a group", x.name())))?;
    k.check_parent(x)?;
    l.check_parent(x)?;
    let mul = |a, b| x.apply2(g.mul, a, b);
    let inv = |a| x.apply(g.inv, &[a]);
    let mut words = Vec::new();
    for &a in k.members() {
        for &b in l.members() {
            words.push(mul(mul(a, b), mul(inv(a), inv(b))));
        }
    }
    words.sort_unstable();
    words.dedup();
    Subuniverse::generate(x, &words, budget)
}

/// For a group: the join of `[[K, L], M]`, `[[L, M], K]` and `[[M, K], L]`,
/// each computed by [`commutator_word_oracle`].
pub fn ternary_word_oracle(
    x: &AlgRef,
    k: &Subuniverse,
    l: &Subuniverse,
    m: &Subuniverse,
    budget: &Budget,
) -> Result<Subuniverse> {
    let kl = commutator_word_oracle(x, k, l, budget)?;
    let lm = commutator_word_oracle(x, l, m, budget)?;
    let mk = commutator_word_oracle(x, m, k, budget)?;
    let mut gens: Vec<usize> = Vec::new();
    for (inner, outer) in [(&kl, m), (&lm, k), (&mk, l)] {
        gens.extend_from_slice(commutator_word_oracle(x, inner, outer, budget)?.members());
    }
    Subuniverse::generate(x, &gens, budget)
}
