use std::sync::Arc;

use super::{decode_args, AlgRef, FiniteAlgebra, Subuniverse};
use crate::error::{Error, Result};

/// A validated structure-preserving map between algebras of one signature.
#[derive(Debug, Clone)]
pub struct Homomorphism {
    source: AlgRef,
    target: AlgRef,
    map: Vec<usize>,
}

impl PartialEq for Homomorphism {
    fn eq(&self, other: &Self) -> bool {
        self.map == other.map && *self.source == *other.source && *self.target == *other.target
    }
}

impl Eq for Homomorphism {}

impl Homomorphism {
    /// Validates the map exhaustively against every operation table.
    pub fn new(source: AlgRef, target: AlgRef, map: Vec<usize>) -> Result<Self> {
        if !source.same_signature(&target) {
            return Err(Error::SignatureMismatch);
        }
        if map.len() != source.size() {
            return Err(Error::NotHomomorphism(format!(
                "map has {} entries, source has {} elements",
                map.len(),
                source.size()
            )));
        }
        if let Some(&e) = map.iter().find(|&&e| e >= target.size()) {
            return Err(Error::ElementOutOfRange {
                element: e,
                size: target.size(),
            });
        }
        if let Some((op, args)) = first_violation(&source, &target, &map) {
            return Err(Error::NotHomomorphism(format!(
                "`{}` not preserved at {:?}",
                source.signature().name(op),
                args
            )));
        }
        Ok(Homomorphism {
            source,
            target,
            map,
        })
    }

    pub(crate) fn new_unchecked(source: AlgRef, target: AlgRef, map: Vec<usize>) -> Self {
        debug_assert!(first_violation(&source, &target, &map).is_none());
        Homomorphism {
            source,
            target,
            map,
        }
    }

    pub fn identity(alg: &AlgRef) -> Homomorphism {
        Homomorphism {
            source: alg.clone(),
            target: alg.clone(),
            map: (0..alg.size()).collect(),
        }
    }

    pub fn zero(source: &AlgRef, target: &AlgRef) -> Result<Homomorphism> {
        Homomorphism::new(source.clone(), target.clone(), vec![0; source.size()])
    }

    pub fn source(&self) -> &AlgRef {
        &self.source
    }

    pub fn target(&self) -> &AlgRef {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &Homomorphism) -> Result<Homomorphism> {
        if *first.target != *self.source {
            return Err(Error::NotComposable);
        }
        let map = first.map.iter().map(|&x| self.map[x]).collect();
        Ok(Homomorphism {
            source: first.source.clone(),
            target: self.target.clone(),
            map,
        })
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.target.size()];
        for &y in &self.map {
            hit[y] = true;
        }
        hit.into_iter().all(|h| h)
    }

    pub fn is_injective(&self) -> bool {
        let mut hit = vec![false; self.target.size()];
        self.map.iter().all(|&y| !std::mem::replace(&mut hit[y], true))
    }

    /// The image, a subuniverse of the target.
    pub fn image(&self) -> Subuniverse {
        let mut members = self.map.clone();
        members.sort_unstable();
        members.dedup();
        Subuniverse::from_sorted_unchecked(self.target.clone(), members)
    }

    /// Preimage of 0, a subuniverse of the source.
    pub fn kernel(&self) -> Subuniverse {
        let members = (0..self.source.size())
            .filter(|&x| self.map[x] == 0)
            .collect();
        Subuniverse::from_sorted_unchecked(self.source.clone(), members)
    }

    /// Preimage of a subuniverse of the target.
    pub fn preimage(&self, s: &Subuniverse) -> Result<Subuniverse> {
        if !Arc::ptr_eq(s.parent(), &self.target) && **s.parent() != *self.target {
            return Err(Error::ParentMismatch);
        }
        let members = (0..self.source.size())
            .filter(|&x| s.contains(self.map[x]))
            .collect();
        Ok(Subuniverse::from_sorted_unchecked(self.source.clone(), members))
    }

    /// Image of a subuniverse of the source.
    pub fn image_of(&self, s: &Subuniverse) -> Result<Subuniverse> {
        if **s.parent() != *self.source {
            return Err(Error::ParentMismatch);
        }
        let mut members: Vec<usize> = s.members().iter().map(|&x| self.map[x]).collect();
        members.sort_unstable();
        members.dedup();
        Ok(Subuniverse::from_sorted_unchecked(self.target.clone(), members))
    }
}

fn first_violation(
    source: &FiniteAlgebra,
    target: &FiniteAlgebra,
    map: &[usize],
) -> Option<(usize, Vec<usize>)> {
    let n = source.size();
    let sig = source.signature();
    let mut args = Vec::new();
    let mut image = Vec::new();
    for op in 0..sig.len() {
        let arity = sig.arity(op);
        args.resize(arity, 0);
        image.resize(arity, 0);
        for (idx, &value) in source.table(op).iter().enumerate() {
            decode_args(idx, n, &mut args);
            for (m, &a) in image.iter_mut().zip(&args) {
                *m = map[a];
            }
            if map[value] != target.apply(op, &image) {
                return Some((op, args.clone()));
            }
        }
    }
    None
}

/// A split epimorphism `f` with section `s` and the kernel of `f`.
#[derive(Debug, Clone)]
pub struct ChosenKernelPoint {
    pub f: Homomorphism,
    pub s: Homomorphism,
    pub kernel: Subuniverse,
}

/// Confirms `f ∘ s = 1_Y` and that `f` is onto.
pub fn validate_point(f: &Homomorphism, s: &Homomorphism) -> Result<ChosenKernelPoint> {
    if *s.target != *f.source || *s.source != *f.target {
        return Err(Error::NotComposable);
    }
    for y in 0..f.target.size() {
        let back = f.map[s.map[y]];
        if back != y {
            return Err(Error::RetractionFails { y, found: back });
        }
    }
    if !f.is_surjective() {
        return Err(Error::NotSurjective);
    }
    Ok(ChosenKernelPoint {
        f: f.clone(),
        s: s.clone(),
        kernel: f.kernel(),
    })
}
