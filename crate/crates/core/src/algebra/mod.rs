//! Finite algebras, terms, homomorphisms, products and subuniverses.

mod finite;
mod hom;
mod product;
mod signature;
mod subuniverse;
mod term;
pub(crate) mod tuples;

pub use finite::{AlgRef, FiniteAlgebra, GroupOps, LinearOps};
pub use hom::{validate_point, ChosenKernelPoint, Homomorphism};
pub use product::direct_product;
pub use signature::{OpSymbol, Signature, ZERO};
pub use subuniverse::Subuniverse;
pub use term::{check_equation, eval_term, CompiledTerm, EquationCheck, Term};

pub(crate) use finite::decode_args;
pub(crate) use term::advance;

/// Anything with operation tables addressed by element index: a finite
/// algebra, or a subuniverse of a power held implicitly.
pub(crate) trait Operations {
    fn carrier_size(&self) -> usize;
    fn signature(&self) -> &Signature;
    fn apply_op(&self, op: usize, args: &[usize]) -> usize;
}

impl Operations for FiniteAlgebra {
    fn carrier_size(&self) -> usize {
        self.size()
    }

    fn signature(&self) -> &Signature {
        FiniteAlgebra::signature(self)
    }

    fn apply_op(&self, op: usize, args: &[usize]) -> usize {
        self.apply(op, args)
    }
}
