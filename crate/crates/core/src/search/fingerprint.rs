//! Isomorphism invariants by colour refinement, and a canonical form for
//! small algebras whose refined colour classes are small.

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};

use crate::algebra::FiniteAlgebra;

fn hash_of<T: Hash>(t: &T) -> u64 {
    let mut h = DefaultHasher::new();
    t.hash(&mut h);
    h.finish()
}

/// Stable element colours: start from "is zero" and refine by the colours
/// seen around each element in every table, until the partition is stable.
pub fn element_colours(alg: &FiniteAlgebra) -> Vec<u64> {
    let n = alg.size();
    let sig = alg.signature();
    let mut colours: Vec<u64> = (0..n).map(|x| u64::from(x == 0)).collect();
    let mut classes = count_distinct(&colours);
    let mut args = Vec::new();
    loop {
        let mut views: Vec<Vec<(usize, u64, Vec<u64>)>> = vec![Vec::new(); n];
        for op in 0..sig.len() {
            let arity = sig.arity(op);
            if arity == 0 {
                continue;
            }
            args.clear();
            args.resize(arity, 0);
            loop {
                let out = alg.apply(op, &args);
                let mut row: Vec<u64> = args.iter().map(|&a| colours[a]).collect();
                row.push(colours[out]);
                // Each element sees the row once, tagged with the set of
                // positions it occupies.
                let mut entries: Vec<usize> = args.clone();
                entries.push(out);
                for (pos, &x) in entries.iter().enumerate() {
                    if entries[..pos].contains(&x) {
                        continue;
                    }
                    let mask = entries
                        .iter()
                        .enumerate()
                        .filter(|&(_, &y)| y == x)
                        .fold(0u64, |m, (i, _)| m | 1 << i);
                    views[x].push((op, mask, row.clone()));
                }
                if !crate::algebra::advance(&mut args, n) {
                    break;
                }
            }
        }
        let next: Vec<u64> = views
            .into_iter()
            .enumerate()
            .map(|(x, mut v)| {
                v.sort_unstable();
                hash_of(&(colours[x], v))
            })
            .collect();
        let next_classes = count_distinct(&next);
        colours = next;
        if next_classes == classes {
            return colours;
        }
        classes = next_classes;
    }
}

fn count_distinct(v: &[u64]) -> usize {
    let mut s = v.to_vec();
    s.sort_unstable();
    s.dedup();
    s.len()
}

/// Invariant that agrees on isomorphic algebras: the size and the sorted
/// multiset of refined colours.
pub fn fingerprint(alg: &FiniteAlgebra) -> Vec<u64> {
    let mut c = element_colours(alg);
    c.sort_unstable();
    let mut out = vec![alg.size() as u64];
    out.extend(c);
    out
}

/// Least relabelled table list over all colour-preserving permutations
/// fixing 0, when there are at most `limit` of them.
pub fn canonical_form(alg: &FiniteAlgebra, limit: u64) -> Option<Vec<Vec<usize>>> {
    let colours = element_colours(alg);
    let mut classes: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (x, &c) in colours.iter().enumerate().skip(1) {
        classes.entry(c).or_default().push(x);
    }
    let mut count: u64 = 1;
    for members in classes.values() {
        for k in 1..=members.len() as u64 {
            count = count.checked_mul(k)?;
        }
        if count > limit {
            return None;
        }
    }
    // Target slots: class by class in colour order, so relabelled algebras
    // with equal colours compare like for like.
    let groups: Vec<Vec<usize>> = classes.into_values().collect();
    let mut slots = Vec::new();
    let mut next = 1;
    for g in &groups {
        slots.push((next..next + g.len()).collect::<Vec<_>>());
        next += g.len();
    }
    let mut best: Option<Vec<Vec<usize>>> = None;
    let mut perm = vec![0usize; alg.size()];
    let mut orders: Vec<Vec<usize>> = groups.clone();
    search_perms(alg, &mut orders, &slots, 0, &mut perm, &mut best);
    best
}

fn search_perms(
    alg: &FiniteAlgebra,
    orders: &mut [Vec<usize>],
    slots: &[Vec<usize>],
    g: usize,
    perm: &mut Vec<usize>,
    best: &mut Option<Vec<Vec<usize>>>,
) {
    if g == orders.len() {
        let relabelled = alg.relabel(perm).expect("colour classes give a permutation fixing 0");
        let tables = relabelled.tables().to_vec();
        if best.as_ref().map_or(true, |b| tables < *b) {
            *best = Some(tables);
        }
        return;
    }
    let k = orders[g].len();
    heap_permutations(&mut orders[g].clone(), k, &mut |order| {
        for (i, &x) in order.iter().enumerate() {
            perm[x] = slots[g][i];
        }
        let mut rest = orders.to_vec();
        search_perms(alg, &mut rest, slots, g + 1, perm, best);
    });
}

fn heap_permutations(items: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k <= 1 {
        f(items);
        return;
    }
    for i in 0..k - 1 {
        heap_permutations(items, k - 1, f);
        let j = if k % 2 == 0 { i } else { 0 };
        items.swap(j, k - 1);
    }
    heap_permutations(items, k - 1, f);
}
