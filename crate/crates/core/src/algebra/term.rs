use std::fmt;

use super::finite::FiniteAlgebra;
use super::signature::Signature;
use crate::error::{Error, Result};

/// A term over a signature; variables are numbered from 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(usize),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(i: usize) -> Term {
        Term::Var(i)
    }

    pub fn constant(op: &str) -> Term {
        Term::App(op.to_string(), Vec::new())
    }

    pub fn zero() -> Term {
        Term::constant(super::signature::ZERO)
    }

    pub fn unary(op: &str, a: Term) -> Term {
        Term::App(op.to_string(), vec![a])
    }

    pub fn binary(op: &str, a: Term, b: Term) -> Term {
        Term::App(op.to_string(), vec![a, b])
    }

    /// Number of variables, i.e. one more than the largest index used.
    pub fn var_count(&self) -> usize {
        match self {
            Term::Var(i) => i + 1,
            Term::App(_, children) => children.iter().map(Term::var_count).max().unwrap_or(0),
        }
    }

    /// Substitutes `args[i]` for variable `i`.
    pub fn substitute(&self, args: &[Term]) -> Term {
        match self {
            Term::Var(i) => args.get(*i).cloned().unwrap_or(Term::Var(*i)),
            Term::App(op, children) => Term::App(
                op.clone(),
                children.iter().map(|c| c.substitute(args)).collect(),
            ),
        }
    }

    pub fn compile(&self, sig: &Signature) -> Result<CompiledTerm> {
        let mut code = Vec::new();
        self.emit(sig, &mut code)?;
        Ok(CompiledTerm {
            code,
            vars: self.var_count(),
        })
    }

    fn emit(&self, sig: &Signature, code: &mut Vec<Instr>) -> Result<()> {
        match self {
            Term::Var(i) => code.push(Instr::Var(*i)),
            Term::App(name, children) => {
                let op = sig
                    .index_of(name)
                    .ok_or_else(|| Error::UnknownOp(name.clone()))?;
                if sig.arity(op) != children.len() {
                    return Err(Error::ArityMismatch {
                        op: name.clone(),
                        expected: sig.arity(op),
                        found: children.len(),
                    });
                }
                for c in children {
                    c.emit(sig, code)?;
                }
                code.push(Instr::Op(op, children.len()));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const NAMES: [&str; 6] = ["x", "y", "z", "u", "v", "w"];
        match self {
            Term::Var(i) if *i < NAMES.len() => write!(f, "{}", NAMES[*i]),
            Term::Var(i) => write!(f, "x{i}"),
            Term::App(op, children) if children.is_empty() => write!(f, "{op}"),
            Term::App(op, children) => {
                write!(f, "{op}(")?;
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Instr {
    Var(usize),
    Op(usize, usize),
}

/// A term resolved against a signature, evaluated with a small stack machine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledTerm {
    code: Vec<Instr>,
    vars: usize,
}

impl CompiledTerm {
    pub fn var_count(&self) -> usize {
        self.vars
    }

    /// Evaluates with a caller-supplied operation lookup; `None` from the
    /// lookup aborts the evaluation (used by partial tables during search).
    pub fn eval_with<F>(&self, valuation: &[usize], stack: &mut Vec<usize>, mut apply: F) -> Option<usize>
    where
        F: FnMut(usize, &[usize]) -> Option<usize>,
    {
        stack.clear();
        for ins in &self.code {
            match *ins {
                Instr::Var(i) => stack.push(valuation[i]),
                Instr::Op(op, arity) => {
                    let base = stack.len() - arity;
                    let v = apply(op, &stack[base..])?;
                    stack.truncate(base);
                    stack.push(v);
                }
            }
        }
        stack.pop()
    }

    /// Like [`CompiledTerm::eval_with`], but on abort reports whether the
    /// failing lookup was the outermost application.
    pub(crate) fn eval_tracking<F>(
        &self,
        valuation: &[usize],
        stack: &mut Vec<usize>,
        mut apply: F,
    ) -> std::result::Result<usize, bool>
    where
        F: FnMut(usize, &[usize]) -> Option<usize>,
    {
        stack.clear();
        let last = self.code.len() - 1;
        for (pc, ins) in self.code.iter().enumerate() {
            match *ins {
                Instr::Var(i) => stack.push(valuation[i]),
                Instr::Op(op, arity) => {
                    let base = stack.len() - arity;
                    let v = apply(op, &stack[base..]).ok_or(pc == last)?;
                    stack.truncate(base);
                    stack.push(v);
                }
            }
        }
        Ok(stack.pop().expect("well-formed code"))
    }

    /// Table evaluation on a finite algebra; the valuation must be long enough.
    pub fn eval(&self, alg: &FiniteAlgebra, valuation: &[usize], stack: &mut Vec<usize>) -> usize {
        self.eval_with(valuation, stack, |op, args| Some(alg.apply(op, args)))
            .expect("total tables never abort evaluation")
    }
}

/// Evaluates `t` on `alg` under `valuation`.
pub fn eval_term(alg: &FiniteAlgebra, t: &Term, valuation: &[usize]) -> Result<usize> {
    let compiled = t.compile(alg.signature())?;
    if valuation.len() < compiled.var_count() {
        return Err(Error::ValuationTooShort {
            needed: compiled.var_count(),
            found: valuation.len(),
        });
    }
    if let Some(&e) = valuation.iter().find(|&&e| e >= alg.size()) {
        return Err(Error::ElementOutOfRange {
            element: e,
            size: alg.size(),
        });
    }
    Ok(compiled.eval(alg, valuation, &mut Vec::new()))
}

/// Outcome of an exhaustive equation check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationCheck {
    pub holds: bool,
    /// Lexicographically least failing valuation.
    pub counterexample: Option<Vec<usize>>,
}

/// Checks `lhs = rhs` under every valuation, in lexicographic order.
pub fn check_equation(
    alg: &FiniteAlgebra,
    lhs: &Term,
    rhs: &Term,
    budget: &crate::Budget,
) -> Result<EquationCheck> {
    let l = lhs.compile(alg.signature())?;
    let r = rhs.compile(alg.signature())?;
    let vars = l.var_count().max(r.var_count());
    let n = alg.size() as u128;
    let total = n.checked_pow(vars as u32).unwrap_or(u128::MAX);
    if total > budget.max_valuations as u128 {
        return Err(Error::BudgetExceeded {
            what: "equation valuations",
            needed: total,
            limit: budget.max_valuations as u128,
        });
    }
    let mut val = vec![0usize; vars];
    let mut stack = Vec::new();
    loop {
        if l.eval(alg, &val, &mut stack) != r.eval(alg, &val, &mut stack) {
            return Ok(EquationCheck {
                holds: false,
                counterexample: Some(val),
            });
        }
        if !advance(&mut val, alg.size()) {
            return Ok(EquationCheck {
                holds: true,
                counterexample: None,
            });
        }
    }
}

/// Steps a mixed-radix counter (last coordinate fastest); false on wrap-around.
pub(crate) fn advance(val: &mut [usize], n: usize) -> bool {
    for slot in val.iter_mut().rev() {
        *slot += 1;
        if *slot < n {
            return true;
        }
        *slot = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_var_count() {
        let t = Term::binary("mul", Term::var(0), Term::unary("inv", Term::var(2)));
        assert_eq!(t.to_string(), "mul(x, inv(z))");
        assert_eq!(t.var_count(), 3);
        assert_eq!(Term::zero().var_count(), 0);
    }

    #[test]
    fn advance_is_lexicographic() {
        let mut v = vec![0, 1];
        assert!(advance(&mut v, 2));
        assert_eq!(v, vec![1, 0]);
        assert!(advance(&mut v, 2));
        assert!(!advance(&mut v, 2));
        assert_eq!(v, vec![0, 0]);
    }
}
