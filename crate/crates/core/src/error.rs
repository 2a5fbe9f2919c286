use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid signature: {0}")]
    InvalidSignature(String),
    #[error("invalid algebra `{name}`: {reason}")]
    InvalidAlgebra { name: String, reason: String },
    #[error("unknown operation `{0}`")]
    UnknownOp(String),
    #[error("operation `{op}` has arity {expected} but was applied to {found} arguments")]
    ArityMismatch {
        op: String,
        expected: usize,
        found: usize,
    },
    #[error("valuation has {found} entries but the term uses {needed} variables")]
    ValuationTooShort { needed: usize, found: usize },
    #[error("element {element} is outside the carrier of size {size}")]
    ElementOutOfRange { element: usize, size: usize },
    #[error("{what} exceeds budget: {needed} > {limit}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        limit: u128,
    },
    #[error("objects live over different algebras")]
    ParentMismatch,
    #[error("signatures differ")]
    SignatureMismatch,
    #[error("not a homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("not a subuniverse: {0}")]
    NotSubuniverse(String),
    #[error("not a congruence: {0}")]
    NotCongruence(String),
    #[error("not an ideal: zero class of the generated congruence has {closure} elements, subuniverse has {members}")]
    NotIdeal { members: usize, closure: usize },
    #[error("homomorphism is not surjective")]
    NotSurjective,
    #[error("section is not a right inverse (f(s(y)) = {found} for y = {y})")]
    RetractionFails { y: usize, found: usize },
    #[error("homomorphisms are not composable")]
    NotComposable,
    #[error("term is not a Mal'cev term on `{algebra}`: {identity} fails at {valuation:?}")]
    NotMalcev {
        algebra: String,
        identity: &'static str,
        valuation: Vec<usize>,
    },
    #[error("commutator validation failed: {0}")]
    Validation(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
