use std::sync::Arc;

use super::tuples::TupleSpace;
use super::{advance, AlgRef, FiniteAlgebra, Homomorphism};
use crate::error::{Error, Result};
use crate::Budget;

/// Direct product with mixed-radix encoding (coordinate 0 most significant),
/// together with the coordinate projections.
pub fn direct_product(algs: &[AlgRef], budget: &Budget) -> Result<(AlgRef, Vec<Homomorphism>)> {
    if algs.is_empty() {
        return Err(Error::Usage("direct product of an empty list".into()));
    }
    let factors: Vec<&FiniteAlgebra> = algs.iter().map(|a| a.as_ref()).collect();
    let space = TupleSpace::new(factors)?;
    let total = space.total();
    if total > budget.max_carrier as u64 {
        return Err(Error::BudgetExceeded {
            what: "product carrier",
            needed: total as u128,
            limit: budget.max_carrier as u128,
        });
    }
    let n = total as usize;
    let m = algs.len();
    let coords: Vec<Vec<usize>> = (0..n)
        .map(|c| {
            let mut v = vec![0; m];
            space.decode(c as u64, &mut v);
            v
        })
        .collect();
    let sig = algs[0].signature().clone();
    let mut tables = Vec::with_capacity(sig.len());
    let mut idx = Vec::new();
    let mut scratch = Vec::new();
    for op in 0..sig.len() {
        let arity = sig.arity(op);
        let mut table = Vec::with_capacity(n.pow(arity as u32));
        idx.clear();
        idx.resize(arity, 0);
        loop {
            let args: Vec<&[usize]> = idx.iter().map(|&i| coords[i].as_slice()).collect();
            table.push(space.apply_decoded(op, &args, &mut scratch) as usize);
            if !advance(&mut idx, n) {
                break;
            }
        }
        tables.push(table);
    }
    let name = algs
        .iter()
        .map(|a| a.name())
        .collect::<Vec<_>>()
        .join("x");
    let group = match algs[0].group_ops() {
        Some(g) if algs.iter().all(|a| a.group_ops() == Some(g)) => Some(g),
        _ => None,
    };
    let product = Arc::new(FiniteAlgebra::with_group(name, sig, n, tables, group)?);
    let projections = (0..m)
        .map(|k| {
            let map = coords.iter().map(|c| c[k]).collect();
            Homomorphism::new(product.clone(), algs[k].clone(), map)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((product, projections))
}
