//! Varieties whose equations fall into independent blocks of operations,
//! sharing only the zero constant, are enumerated block by block: the first
//! block up to isomorphism, every other block as all of its labelled models.
//! Each model of the whole variety is isomorphic to one of these pairings.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::Arc;

use rayon::prelude::*;

use super::enumerate::{visit_models_plain, EnumOptions, Visit};
use super::fingerprint::canonical_form;
use crate::algebra::{FiniteAlgebra, Signature, Term};
use crate::error::{Error, Result};
use crate::library::VarietySpec;

/// Largest number of relabellings tried when expanding one block.
const RELABEL_LIMIT: u64 = 5_000_000;
const CANONICAL_LIMIT: u64 = 40_320;
const WAVE: usize = 4096;

pub(super) struct Blocks {
    parts: Vec<VarietySpec>,
    /// For each operation of the full signature, its block and index there.
    place: Vec<Option<(usize, usize)>>,
}

fn collect_ops(t: &Term, sig: &Signature, out: &mut Vec<usize>) {
    if let Term::App(name, children) = t {
        if let Some(i) = sig.index_of(name) {
            out.push(i);
        }
        for c in children {
            collect_ops(c, sig, out);
        }
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// The blocks of `v`, when there are at least two and every non-zero
/// operation occurs in some equation.
pub(super) fn blocks(v: &VarietySpec) -> Option<Blocks> {
    let sig = &v.signature;
    let zero = sig.zero_index();
    let mut parent: Vec<usize> = (0..sig.len()).collect();
    let mut used = vec![false; sig.len()];
    let mut eq_ops = Vec::with_capacity(v.equations.len());
    for e in &v.equations {
        let mut ops = Vec::new();
        collect_ops(&e.lhs, sig, &mut ops);
        collect_ops(&e.rhs, sig, &mut ops);
        ops.retain(|&o| o != zero);
        for &o in &ops {
            used[o] = true;
        }
        for w in ops.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a] = b;
        }
        eq_ops.push(ops);
    }
    if (0..sig.len()).any(|o| o != zero && !used[o]) {
        return None;
    }
    let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for o in (0..sig.len()).filter(|&o| o != zero) {
        let r = find(&mut parent, o);
        by_root.entry(r).or_default().push(o);
    }
    if by_root.len() < 2 {
        return None;
    }
    let mut groups: Vec<Vec<usize>> = by_root.into_values().collect();
    groups.sort();
    let mut place = vec![None; sig.len()];
    let mut parts = Vec::with_capacity(groups.len());
    for (b, ops_of_block) in groups.iter().enumerate() {
        let keep: Vec<usize> = (0..sig.len()).filter(|o| *o == zero || ops_of_block.contains(o)).collect();
        for (i, &o) in keep.iter().enumerate() {
            if o != zero {
                place[o] = Some((b, i));
            }
        }
        let sub = Signature::new(keep.iter().map(|&o| (sig.name(o).to_string(), sig.arity(o)))).ok()?;
        let equations = v
            .equations
            .iter()
            .zip(&eq_ops)
            .filter(|(_, ops)| ops.first().map_or(b == 0, |o| ops_of_block.contains(o)))
            .map(|(e, _)| e.clone())
            .collect();
        parts.push(VarietySpec {
            name: format!("{}/{b}", v.name),
            signature: Arc::new(sub),
            equations,
            malcev: None,
        });
    }
    Some(Blocks { parts, place })
}

/// Next permutation in lexicographic order; false after the last one.
fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("a larger element exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn factorial(k: usize) -> u64 {
    (1..=k as u64).try_fold(1u64, |a, b| a.checked_mul(b)).unwrap_or(u64::MAX)
}

/// Every labelled table list isomorphic to one of `models`, sorted.
fn labelled(models: &[FiniteAlgebra], n: usize) -> Result<Vec<Vec<Vec<usize>>>> {
    let mut out = BTreeSet::new();
    for m in models {
        let mut tail: Vec<usize> = (1..n).collect();
        loop {
            let mut perm = vec![0];
            perm.extend_from_slice(&tail);
            out.insert(m.relabel(&perm)?.tables().to_vec());
            if !next_permutation(&mut tail) {
                break;
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// Models of `part` on `n` elements up to isomorphism, as far as canonical
/// forms can tell.
fn representatives(part: &VarietySpec, n: usize, opts: &EnumOptions) -> Result<(Vec<FiniteAlgebra>, u64, bool)> {
    let visit = visit_models_plain(part, n, opts, false, |alg| Some(alg.clone()))?;
    let mut seen = HashSet::new();
    let reps = visit
        .found
        .into_iter()
        .map(|(_, m)| m)
        .filter(|m| canonical_form(m, CANONICAL_LIMIT).map_or(true, |k| seen.insert(k)))
        .collect();
    Ok((reps, visit.nodes, visit.complete))
}

/// Walks the models of the whole variety built from its blocks. `None` when
/// a block is too large to expand, so the caller falls back to the plain walk.
pub(super) fn visit_split<T, F>(
    v: &VarietySpec,
    blocks: &Blocks,
    n: usize,
    opts: &EnumOptions,
    first_only: bool,
    visit: &F,
) -> Result<Option<Visit<T>>>
where
    T: Send,
    F: Fn(&FiniteAlgebra) -> Option<T> + Sync,
{
    let mut nodes = 0u64;
    let mut lists: Vec<Vec<Vec<Vec<usize>>>> = Vec::with_capacity(blocks.parts.len());
    for (b, part) in blocks.parts.iter().enumerate() {
        let sub_opts = EnumOptions {
            max_nodes: opts.max_nodes.saturating_sub(nodes),
            ..opts.clone()
        };
        let (reps, used, complete) = representatives(part, n, &sub_opts)?;
        nodes += used;
        if !complete {
            return Ok(Some(Visit { nodes: opts.max_nodes, complete: false, models: 0, found: Vec::new() }));
        }
        if b == 0 {
            lists.push(reps.iter().map(|m| m.tables().to_vec()).collect());
        } else {
            let work = factorial(n.saturating_sub(1)).saturating_mul(reps.len() as u64);
            if work > RELABEL_LIMIT {
                return Ok(None);
            }
            nodes = nodes.saturating_add(work);
            lists.push(labelled(&reps, n)?);
        }
    }
    let total = lists
        .iter()
        .try_fold(1u64, |a, l| a.checked_mul(l.len() as u64))
        .unwrap_or(u64::MAX);
    let sig = v.signature.clone();
    let zero = sig.zero_index();
    let build = |index: u64| -> FiniteAlgebra {
        let mut picks = vec![0usize; lists.len()];
        let mut rest = index;
        for (b, l) in lists.iter().enumerate().rev() {
            picks[b] = (rest % l.len() as u64) as usize;
            rest /= l.len() as u64;
        }
        let tables = (0..sig.len())
            .map(|op| match blocks.place[op] {
                _ if op == zero => vec![0],
                Some((b, i)) => lists[b][picks[b]][i].clone(),
                None => unreachable!("every operation belongs to a block"),
            })
            .collect();
        FiniteAlgebra::new(format!("{}-{n}", v.name), sig.clone(), n, tables).expect("blocks combine to a model")
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.max(1))
        .build()
        .map_err(|e| Error::Usage(format!("cannot start worker pool: {e}")))?;
    let mut found = Vec::new();
    let mut start = 0u64;
    while start < total {
        let allowed = opts.max_nodes.saturating_sub(nodes);
        if allowed == 0 {
            return Ok(Some(Visit { nodes, complete: false, models: start, found }));
        }
        let end = total.min(start + WAVE as u64).min(start + allowed);
        let hits: Vec<Option<T>> = pool.install(|| (start..end).into_par_iter().map(|i| visit(&build(i))).collect());
        nodes += end - start;
        for (offset, hit) in hits.into_iter().enumerate() {
            if let Some(t) = hit {
                found.push((start + offset as u64, t));
                if first_only {
                    return Ok(Some(Visit { nodes, complete: true, models: start + offset as u64 + 1, found }));
                }
            }
        }
        start = end;
    }
    Ok(Some(Visit { nodes, complete: true, models: total, found }))
}
