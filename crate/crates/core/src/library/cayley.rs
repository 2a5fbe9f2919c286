//! Cayley tables of groups closed from generators.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::Arc;

use crate::algebra::{FiniteAlgebra, Signature};

/// Closes `gens` under right multiplication, numbering elements in BFS order
/// from the identity (element 0), generators tried in the given order.
pub fn cayley_closure<T, F>(
    name: &str,
    signature: Arc<Signature>,
    identity: T,
    gens: &[T],
    mul: F,
) -> (FiniteAlgebra, Vec<T>)
where
    T: Clone + Eq + Hash,
    F: Fn(&T, &T) -> T,
{
    let mut elements = vec![identity.clone()];
    let mut index: HashMap<T, usize> = HashMap::from([(identity, 0)]);
    let mut i = 0;
    while i < elements.len() {
        for g in gens {
            let next = mul(&elements[i], g);
            if !index.contains_key(&next) {
                index.insert(next.clone(), elements.len());
                elements.push(next);
            }
        }
        i += 1;
    }
    let n = elements.len();
    let mut table = vec![0; n * n];
    for a in 0..n {
        for b in 0..n {
            table[a * n + b] = index[&mul(&elements[a], &elements[b])];
        }
    }
    let inverse: Vec<usize> = (0..n)
        .map(|a| (0..n).find(|&b| table[a * n + b] == 0).expect("finite group"))
        .collect();
    let mul_op = signature.index_of("mul").expect("group signature");
    let inv_op = signature.index_of("inv").expect("group signature");
    let mut tables = vec![Vec::new(); signature.len()];
    tables[signature.zero_index()] = vec![0];
    tables[mul_op] = table;
    tables[inv_op] = inverse;
    let alg = FiniteAlgebra::new(name, signature, n, tables).expect("closure yields valid tables");
    (alg, elements)
}

/// A permutation of `0..k` as its image list; composition applies `a` first.
pub type Perm = Vec<u8>;

pub fn compose(a: &Perm, b: &Perm) -> Perm {
    a.iter().map(|&i| b[i as usize]).collect()
}

/// Permutation from cycles on `k` points.
pub fn perm(k: usize, cycles: &[&[u8]]) -> Perm {
    let mut p: Perm = (0..k as u8).collect();
    for c in cycles {
        for (i, &from) in c.iter().enumerate() {
            p[from as usize] = c[(i + 1) % c.len()];
        }
    }
    p
}

pub fn parity(p: &Perm) -> usize {
    let mut seen = vec![false; p.len()];
    let mut transpositions = 0;
    for start in 0..p.len() {
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = p[i] as usize;
            len += 1;
        }
        if len > 0 {
            transpositions += len - 1;
        }
    }
    transpositions % 2
}

/// 2×2 matrices over GF(q), row-major.
pub type Mat2 = [u8; 4];

pub fn mat_mul(q: u8, a: &Mat2, b: &Mat2) -> Mat2 {
    let q = q as u16;
    let m = |x: u8, y: u8, z: u8, w: u8| ((x as u16 * y as u16 + z as u16 * w as u16) % q) as u8;
    [
        m(a[0], b[0], a[1], b[2]),
        m(a[0], b[1], a[1], b[3]),
        m(a[2], b[0], a[3], b[2]),
        m(a[2], b[1], a[3], b[3]),
    ]
}

/// Unit quaternions ±1, ±i, ±j, ±k as (negative, unit) with unit 0..4 = 1, i, j, k.
pub type Quaternion = (bool, u8);

pub fn quaternion_mul(a: &Quaternion, b: &Quaternion) -> Quaternion {
    // (sign, unit) of unit products, rows/columns ordered 1, i, j, k.
    const TABLE: [[(bool, u8); 4]; 4] = [
        [(false, 0), (false, 1), (false, 2), (false, 3)],
        [(false, 1), (true, 0), (false, 3), (true, 2)],
        [(false, 2), (true, 3), (true, 0), (false, 1)],
        [(false, 3), (false, 2), (true, 1), (true, 0)],
    ];
    let (neg, unit) = TABLE[a.1 as usize][b.1 as usize];
    (neg ^ a.0 ^ b.0, unit)
}
