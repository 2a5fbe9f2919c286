use std::fmt;

use crate::error::{Error, Result};

/// Name of the distinguished nullary symbol.
pub const ZERO: &str = "zero";

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OpSymbol {
    pub name: String,
    pub arity: usize,
}

/// An ordered list of operation symbols containing exactly one `zero/0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    ops: Vec<OpSymbol>,
    zero: usize,
}

impl Signature {
    pub fn new<S: Into<String>>(ops: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let ops: Vec<OpSymbol> = ops
            .into_iter()
            .map(|(name, arity)| OpSymbol {
                name: name.into(),
                arity,
            })
            .collect();
        for (i, op) in ops.iter().enumerate() {
            if op.name.is_empty() {
                return Err(Error::InvalidSignature("empty operation name".into()));
            }
            if ops[..i].iter().any(|o| o.name == op.name) {
                return Err(Error::InvalidSignature(format!(
                    "duplicate operation `{}`",
                    op.name
                )));
            }
        }
        let zeros: Vec<usize> = ops
            .iter()
            .enumerate()
            .filter(|(_, o)| o.name == ZERO)
            .map(|(i, _)| i)
            .collect();
        match zeros.as_slice() {
            [z] if ops[*z].arity == 0 => Ok(Signature { ops, zero: *z }),
            [_] => Err(Error::InvalidSignature("`zero` must be nullary".into())),
            _ => Err(Error::InvalidSignature(
                "exactly one `zero` symbol is required".into(),
            )),
        }
    }

    pub fn ops(&self) -> &[OpSymbol] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn zero_index(&self) -> usize {
        self.zero
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.ops.iter().position(|o| o.name == name)
    }

    pub fn arity(&self, op: usize) -> usize {
        self.ops[op].arity
    }

    pub fn name(&self, op: usize) -> &str {
        &self.ops[op].name
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .ops
            .iter()
            .map(|o| format!("{}/{}", o.name, o.arity))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn requires_single_nullary_zero() {
        assert!(Signature::new([("mul", 2)]).is_err());
        assert!(Signature::new([("zero", 1)]).is_err());
        assert!(Signature::new([("zero", 0), ("zero", 0)]).is_err());
        assert!(Signature::new([("zero", 0), ("mul", 2), ("mul", 1)]).is_err());
        let sig = Signature::new([("zero", 0), ("mul", 2)]).unwrap();
        assert_eq!(sig.zero_index(), 0);
        assert_eq!(sig.index_of("mul"), Some(1));
    }
}
