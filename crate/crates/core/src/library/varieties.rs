//! Equational specifications of the varieties used by the library and the
//! model search.

use std::sync::{Arc, OnceLock};

use crate::algebra::{check_equation, FiniteAlgebra, Signature, Term};
use crate::error::Result;
use crate::Budget;

/// A named equation `lhs = rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub name: String,
    pub lhs: Term,
    pub rhs: Term,
}

/// Signature, defining equations and (optionally) a Mal'cev term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarietySpec {
    pub name: String,
    pub signature: Arc<Signature>,
    pub equations: Vec<Equation>,
    pub malcev: Option<Term>,
}

impl VarietySpec {
    /// First failing equation, with its least counter-valuation.
    pub fn first_failure(&self, alg: &FiniteAlgebra, budget: &Budget) -> Result<Option<(String, Vec<usize>)>> {
        for eq in &self.equations {
            let check = check_equation(alg, &eq.lhs, &eq.rhs, budget)?;
            if !check.holds {
                return Ok(Some((eq.name.clone(), check.counterexample.unwrap_or_default())));
            }
        }
        Ok(None)
    }

    pub fn contains(&self, alg: &FiniteAlgebra, budget: &Budget) -> Result<bool> {
        Ok(alg.signature().as_ref() == self.signature.as_ref()
            && self.first_failure(alg, budget)?.is_none())
    }
}

fn eq(name: &str, lhs: Term, rhs: Term) -> Equation {
    Equation {
        name: name.to_string(),
        lhs,
        rhs,
    }
}

fn x() -> Term {
    Term::var(0)
}
fn y() -> Term {
    Term::var(1)
}
fn z() -> Term {
    Term::var(2)
}

fn group_laws(mul: &str, inv: &str, prefix: &str) -> Vec<Equation> {
    let m = |a, b| Term::binary(mul, a, b);
    let i = |a| Term::unary(inv, a);
    vec![
        eq(
            &format!("{prefix}associativity"),
            m(m(x(), y()), z()),
            m(x(), m(y(), z())),
        ),
        eq(&format!("{prefix}left unit"), m(Term::zero(), x()), x()),
        eq(&format!("{prefix}right unit"), m(x(), Term::zero()), x()),
        eq(&format!("{prefix}right inverse"), m(x(), i(x())), Term::zero()),
        eq(&format!("{prefix}left inverse"), m(i(x()), x()), Term::zero()),
    ]
}

/// `x · y⁻¹ · z` in the given operation names.
pub fn group_malcev(mul: &str, inv: &str) -> Term {
    Term::binary(mul, Term::binary(mul, x(), Term::unary(inv, y())), z())
}

pub fn group_signature() -> Arc<Signature> {
    static SIG: OnceLock<Arc<Signature>> = OnceLock::new();
    SIG.get_or_init(|| Arc::new(Signature::new([("zero", 0), ("mul", 2), ("inv", 1)]).unwrap()))
        .clone()
}

/// `{zero, add, neg, mul}`, shared by rings and the Boolean-Pixley variety.
pub fn ring_signature() -> Arc<Signature> {
    static SIG: OnceLock<Arc<Signature>> = OnceLock::new();
    SIG.get_or_init(|| {
        Arc::new(Signature::new([("zero", 0), ("add", 2), ("neg", 1), ("mul", 2)]).unwrap())
    })
    .clone()
}

pub fn digroup_signature() -> Arc<Signature> {
    static SIG: OnceLock<Arc<Signature>> = OnceLock::new();
    SIG.get_or_init(|| {
        Arc::new(
            Signature::new([("zero", 0), ("mul", 2), ("inv", 1), ("circ", 2), ("cinv", 1)])
                .unwrap(),
        )
    })
    .clone()
}

pub fn loop_signature() -> Arc<Signature> {
    static SIG: OnceLock<Arc<Signature>> = OnceLock::new();
    SIG.get_or_init(|| {
        Arc::new(Signature::new([("zero", 0), ("mul", 2), ("ldiv", 2), ("rdiv", 2)]).unwrap())
    })
    .clone()
}

pub fn groups() -> VarietySpec {
    VarietySpec {
        name: "groups".into(),
        signature: group_signature(),
        equations: group_laws("mul", "inv", ""),
        malcev: Some(group_malcev("mul", "inv")),
    }
}

pub fn abelian_groups() -> VarietySpec {
    let mut v = groups();
    v.name = "abelian-groups".into();
    v.equations.push(eq(
        "commutativity",
        Term::binary("mul", x(), y()),
        Term::binary("mul", y(), x()),
    ));
    v
}

/// Two group structures on one carrier sharing the unit, with no law
/// linking them.
pub fn digroups() -> VarietySpec {
    let mut equations = group_laws("mul", "inv", "");
    equations.extend(group_laws("circ", "cinv", "circ "));
    VarietySpec {
        name: "digroups".into(),
        signature: digroup_signature(),
        equations,
        malcev: Some(group_malcev("mul", "inv")),
    }
}

fn abelian_additive() -> Vec<Equation> {
    let a = |p, q| Term::binary("add", p, q);
    let mut laws = group_laws("add", "neg", "additive ");
    laws.push(eq("additive commutativity", a(x(), y()), a(y(), x())));
    laws
}

/// Non-associative rings: an abelian group with a biadditive product.
pub fn na_rings() -> VarietySpec {
    let a = |p, q| Term::binary("add", p, q);
    let m = |p, q| Term::binary("mul", p, q);
    let mut equations = abelian_additive();
    equations.push(eq(
        "left distributivity",
        m(x(), a(y(), z())),
        a(m(x(), y()), m(x(), z())),
    ));
    equations.push(eq(
        "right distributivity",
        m(a(x(), y()), z()),
        a(m(x(), z()), m(y(), z())),
    ));
    VarietySpec {
        name: "na-rings".into(),
        signature: ring_signature(),
        equations,
        malcev: Some(Term::binary(
            "add",
            Term::binary("add", x(), Term::unary("neg", y())),
            z(),
        )),
    }
}

/// `x + z + x·y + x·z + y·z`, a Pixley term for the Boolean-Pixley variety.
pub fn pixley_term() -> Term {
    let a = |p, q| Term::binary("add", p, q);
    let m = |p, q| Term::binary("mul", p, q);
    a(a(a(a(x(), z()), m(x(), y())), m(x(), z())), m(y(), z()))
}

/// `x + y + x·y + x·z + y·z`, which fails `p(x, x, y) = y` and
/// `p(x, y, x) = x`; kept for the errata check.
pub fn printed_pixley_term() -> Term {
    let a = |p, q| Term::binary("add", p, q);
    let m = |p, q| Term::binary("mul", p, q);
    a(a(a(a(x(), y()), m(x(), y())), m(x(), z())), m(y(), z()))
}

/// Abelian groups of exponent 2 with an idempotent commutative product
/// absorbing 0; arithmetical, with [`pixley_term`] as Pixley term.
pub fn boolean_pixley() -> VarietySpec {
    let a = |p, q| Term::binary("add", p, q);
    let m = |p, q| Term::binary("mul", p, q);
    let mut equations = abelian_additive();
    equations.push(eq("x+x=0", a(x(), x()), Term::zero()));
    equations.push(eq("x.x=x", m(x(), x()), x()));
    equations.push(eq("x.y=y.x", m(x(), y()), m(y(), x())));
    equations.push(eq("x.0=0", m(x(), Term::zero()), Term::zero()));
    VarietySpec {
        name: "boolean-pixley".into(),
        signature: ring_signature(),
        equations,
        malcev: Some(pixley_term()),
    }
}

pub fn loops() -> VarietySpec {
    let m = |p, q| Term::binary("mul", p, q);
    let l = |p, q| Term::binary("ldiv", p, q);
    let r = |p, q| Term::binary("rdiv", p, q);
    VarietySpec {
        name: "loops".into(),
        signature: loop_signature(),
        equations: vec![
            eq("x*(x\\y)=y", m(x(), l(x(), y())), y()),
            eq("x\\(x*y)=y", l(x(), m(x(), y())), y()),
            eq("(y/x)*x=y", m(r(y(), x()), x()), y()),
            eq("(y*x)/x=y", r(m(y(), x()), x()), y()),
            eq("left unit", m(Term::zero(), x()), x()),
            eq("right unit", m(x(), Term::zero()), x()),
        ],
        malcev: Some(m(r(x(), l(y(), y())), l(y(), z()))),
    }
}

pub fn all_varieties() -> Vec<VarietySpec> {
    vec![
        groups(),
        abelian_groups(),
        digroups(),
        na_rings(),
        boolean_pixley(),
        loops(),
    ]
}

pub fn variety(name: &str) -> Option<VarietySpec> {
    all_varieties()
        .into_iter()
        .find(|v| v.name.eq_ignore_ascii_case(name))
}
