//! Commutator calculus for finite pointed algebras.
//!
//! Algebras are operation tables on `{0, .., n-1}` with `0` the zero
//! constant. On top of them the crate computes congruence lattices, ideals,
//! Higgins, Huq and Smith commutators, checks commutator conditions on
//! concrete instances, and searches small model spaces for gaps between the
//! commutators.

pub mod algebra;
mod budget;
pub mod cli;
pub mod commutator;
pub mod conditions;
pub mod congruence;
pub mod error;
pub mod library;
pub mod report;
pub mod search;

pub use budget::Budget;
pub use error::{Error, Result};
