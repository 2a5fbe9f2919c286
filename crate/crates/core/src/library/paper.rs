//! The eight-element algebra `C` on `X × X × X` and its diagram of points.

use std::sync::Arc;

use serde_json::json;

use super::varieties::{boolean_pixley, pixley_term, printed_pixley_term, ring_signature};
use crate::algebra::{
    check_equation, direct_product, validate_point, AlgRef, FiniteAlgebra, Homomorphism,
    Subuniverse, Term,
};
use crate::commutator::{higgins, huq};
use crate::congruence::{all_ideals, is_ideal, normal_closure};
use crate::error::{Error, Result};
use crate::report::{CheckResult, ConditionReport, Verdict};
use crate::Budget;

/// `X`, `X × X`, `C` and the maps of the two-row diagram
///
/// ```text
///   X --<1,0>--> X×X  <=π2 / <0,1>=>  X
///   |<1,0>        |u                  | =
///   X×X ---k----> C   <=p  /  s ==>   X
/// ```
#[derive(Debug, Clone)]
pub struct PaperDiagram {
    pub x: AlgRef,
    pub xx: AlgRef,
    pub c: AlgRef,
    pub incl1: Homomorphism,
    pub incl2: Homomorphism,
    pub pi2: Homomorphism,
    pub u: Homomorphism,
    pub k: Homomorphism,
    pub p: Homomorphism,
    pub s: Homomorphism,
}

/// `(x, y, z) ↦ 4x + 2y + z`.
pub fn triple(x: usize, y: usize, z: usize) -> usize {
    4 * x + 2 * y + z
}

fn bits(v: usize) -> (usize, usize, usize) {
    (v >> 2 & 1, v >> 1 & 1, v & 1)
}

/// The product of `C`: componentwise when the factors are equal, when both
/// middle or both last coordinates vanish, or when a factor is zero;
/// `(1, 1, zc)` otherwise.
pub fn c_product(v: usize, w: usize) -> usize {
    let (x, y, z) = bits(v);
    let (a, b, c) = bits(w);
    if v == w || (y == 0 && b == 0) || (z == 0 && c == 0) || v == 0 || w == 0 {
        triple(x & a, y & b, z & c)
    } else {
        triple(1, 1, z & c)
    }
}

fn boolean_ring() -> Result<FiniteAlgebra> {
    FiniteAlgebra::new(
        "X",
        ring_signature(),
        2,
        vec![vec![0], vec![0, 1, 1, 0], vec![0, 1], vec![0, 0, 0, 1]],
    )
}

fn hom(src: &AlgRef, dst: &AlgRef, what: &str, f: impl Fn(usize) -> usize) -> Result<Homomorphism> {
    Homomorphism::new(src.clone(), dst.clone(), (0..src.size()).map(f).collect()).map_err(|e| {
        Error::Validation(format!("{what}: {e}"))
    })
}

fn same_map(a: &Homomorphism, b: &Homomorphism, what: &str) -> Result<()> {
    if a.map() == b.map() {
        Ok(())
    } else {
        let at = (0..a.source().size()).find(|&i| a.apply(i) != b.apply(i)).unwrap_or(0);
        Err(Error::Validation(format!(
            "{what} fails at {at}: {} vs {}",
            a.apply(at),
            b.apply(at)
        )))
    }
}

/// Builds `X`, `C` and the diagram, validating every map and every displayed
/// equality.
pub fn build_paper_c() -> Result<PaperDiagram> {
    let budget = Budget::default();
    let x = Arc::new(boolean_ring()?);
    let (xx, _) = direct_product(&[x.clone(), x.clone()], &budget)?;
    let xx = Arc::new(xx.renamed("XxX"));
    let n = 8;
    let tables = vec![
        vec![0],
        (0..n * n).map(|i| (i / n) ^ (i % n)).collect(),
        (0..n).collect(),
        (0..n * n).map(|i| c_product(i / n, i % n)).collect(),
    ];
    let c = Arc::new(FiniteAlgebra::new("paperC", ring_signature(), n, tables)?);

    let incl1 = hom(&x, &xx, "<1,0>", |a| 2 * a)?;
    let incl2 = hom(&x, &xx, "<0,1>", |a| a)?;
    let pi2 = hom(&xx, &x, "pi2", |a| a & 1)?;
    let u = hom(&xx, &c, "u", |a| triple(a >> 1, 0, a & 1))?;
    let k = hom(&xx, &c, "k", |a| triple(a >> 1, a & 1, 0))?;
    let p = hom(&c, &x, "p", |a| a & 1)?;
    let s = hom(&x, &c, "s", |a| triple(0, 0, a))?;

    let d = PaperDiagram {
        x,
        xx,
        c,
        incl1,
        incl2,
        pi2,
        u,
        k,
        p,
        s,
    };
    d.validate()?;
    Ok(d)
}

impl PaperDiagram {
    /// Both rows are points with chosen kernels and the squares commute.
    pub fn validate(&self) -> Result<()> {
        let top = validate_point(&self.pi2, &self.incl2)?;
        let bottom = validate_point(&self.p, &self.s)?;
        if top.kernel != self.incl1.image() {
            return Err(Error::Validation("<1,0> is not the kernel of pi2".into()));
        }
        if bottom.kernel != self.k.image() {
            return Err(Error::Validation("k is not the kernel of p".into()));
        }
        same_map(&self.u.after(&self.incl1)?, &self.k.after(&self.incl1)?, "u<1,0> = k<1,0>")?;
        same_map(&self.p.after(&self.u)?, &self.pi2, "p u = pi2")?;
        same_map(&self.u.after(&self.incl2)?, &self.s, "u<0,1> = s")?;
        Ok(())
    }

    /// The image of `u ∘ ⟨1, 0⟩` in `C`.
    pub fn incl_first_image(&self) -> Result<Subuniverse> {
        Ok(self.u.after(&self.incl1)?.image())
    }
}

/// The three Pixley identities for a ternary term `p`, as equations in `x, y`.
pub fn pixley_equations(p: &Term) -> Vec<(&'static str, Term, Term)> {
    let v = Term::var;
    vec![
        ("p(x,y,y)=x", p.substitute(&[v(0), v(1), v(1)]), v(0)),
        ("p(x,x,y)=y", p.substitute(&[v(0), v(0), v(1)]), v(1)),
        ("p(x,y,x)=x", p.substitute(&[v(0), v(1), v(0)]), v(0)),
    ]
}

/// Evaluates `p` on every triple and checks each Pixley identity that the
/// triple instantiates. Returns the number of triples evaluated and the first
/// failing (identity, triple), if any.
pub fn pixley_triples(alg: &FiniteAlgebra, p: &Term) -> Result<(usize, Option<(&'static str, Vec<usize>)>)> {
    let code = p.compile(alg.signature())?;
    let mut stack = Vec::new();
    let mut seen = 0;
    let mut first = None;
    let mut val = [0usize; 3];
    loop {
        let [a, b, c] = val;
        let value = code.eval(alg, &val, &mut stack);
        seen += 1;
        for (name, applies, want) in [
            ("p(x,y,y)=x", b == c, a),
            ("p(x,x,y)=y", a == b, c),
            ("p(x,y,x)=x", a == c, a),
        ] {
            if applies && value != want && first.is_none() {
                first = Some((name, val.to_vec()));
            }
        }
        if !crate::algebra::advance(&mut val, alg.size()) {
            break;
        }
    }
    Ok((seen, first))
}

/// Replays the computations around `C`: the Pixley term and its misprint,
/// the variety equations, the non-normal image of `u ∘ ⟨1, 0⟩`, and
/// `huq(K, K) = K` for every ideal of `C`.
pub fn paper_suite(budget: &Budget) -> Result<ConditionReport> {
    let d = build_paper_c()?;
    let mut report = ConditionReport::new("paperC", "paper-suite");

    report.push(CheckResult::new("diagram", "morphism of points with chosen kernels", Verdict::Pass).with_witness(json!({
        "u": d.u.map(), "k": d.k.map(), "p": d.p.map(), "s": d.s.map(),
        "product_100_111": c_product(triple(1, 0, 0), triple(1, 1, 1)),
    })));

    let mut all_ok = true;
    let mut counts = Vec::new();
    for alg in [&d.x, &d.c] {
        let mut ok = true;
        for (_, lhs, rhs) in pixley_equations(&pixley_term()) {
            ok &= check_equation(alg, &lhs, &rhs, budget)?.holds;
        }
        let (triples, failure) = pixley_triples(alg, &pixley_term())?;
        let total = alg.size().pow(3);
        ok &= triples == total && failure.is_none();
        counts.push(json!({"algebra": alg.name(), "triples": triples, "of": total}));
        all_ok &= ok;
    }
    report.push(
        CheckResult::new("pixley-corrected", "x+z+xy+xz+yz is a Pixley term", Verdict::from_bool(all_ok))
            .with_witness(json!({ "term": pixley_term().to_string(), "checked": counts })),
    );

    let printed = printed_pixley_term();
    let mut failures = Vec::new();
    for (name, lhs, rhs) in pixley_equations(&printed) {
        let check = check_equation(&d.x, &lhs, &rhs, budget)?;
        if !check.holds {
            failures.push(json!({"identity": name, "valuation": check.counterexample}));
        }
    }
    report.push(
        CheckResult::new(
            "pixley-printed-errata",
            "printed term x+y+xy+xz+yz fails on X",
            Verdict::from_bool(!failures.is_empty()),
        )
        .with_witness(json!({ "term": printed.to_string(), "failures": failures })),
    );

    let variety = boolean_pixley();
    let failure = variety.first_failure(&d.c, budget)?;
    report.push(
        CheckResult::new("c-variety", "C satisfies the variety equations", Verdict::from_bool(failure.is_none()))
            .with_witness(json!({ "failure": failure })),
    );

    let image = d.incl_first_image()?;
    let closure = normal_closure(&d.c, image.members())?;
    let not_ideal = !is_ideal(&d.c, &image)? && closure.contains(triple(1, 1, 0));
    report.push(
        CheckResult::new("u-image-not-ideal", "image of u<1,0> is not normal", Verdict::from_bool(not_ideal))
            .with_witness(json!({
                "outcome": if not_ideal { "NotIdeal" } else { "Ideal" },
                "members": image.members(),
                "closure": closure.members(),
                "exhibited": triple(1, 1, 0),
            })),
    );

    let mut rows = Vec::new();
    let mut wnh = true;
    for k in all_ideals(&d.c, budget)? {
        let h = higgins(&d.c, &k, &k, budget)?;
        let q = huq(&d.c, &k, &k, budget)?;
        let ok = q == k && h == q && is_ideal(&d.c, &h)?;
        wnh &= ok;
        rows.push(json!({"ideal": k.members(), "higgins": h.members(), "huq": q.members()}));
    }
    report.push(
        CheckResult::new("c-wnh", "[K,K]_X = K for every ideal K", Verdict::from_bool(wnh))
            .with_witness(json!({ "ideals": rows })),
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_product_value() {
        assert_eq!(c_product(triple(1, 0, 0), triple(1, 1, 1)), triple(1, 1, 0));
        assert_eq!(c_product(triple(1, 0, 1), triple(1, 0, 0)), triple(1, 0, 0));
        for v in 0..8 {
            assert_eq!(c_product(v, 0), 0);
        }
    }

    #[test]
    fn the_diagram_validates() {
        let d = build_paper_c().unwrap();
        assert_eq!(d.incl_first_image().unwrap().members(), &[0, 4]);
    }

    #[test]
    fn other_readings_break_u_or_the_equations() {
        // Reading the listed conditions as a conjunction leaves almost every
        // product in the "(1,1,zc)" branch.
        let conj = |v: usize, w: usize| {
            let (x, y, z) = bits(v);
            let (a, b, c) = bits(w);
            if v == 0 || w == 0 || (v == w && y == 0 && b == 0 && z == 0 && c == 0) {
                triple(x & a, y & b, z & c)
            } else {
                triple(1, 1, z & c)
            }
        };
        let n = 8;
        let tables = vec![
            vec![0],
            (0..n * n).map(|i| (i / n) ^ (i % n)).collect(),
            (0..n).collect(),
            (0..n * n).map(|i| conj(i / n, i % n)).collect(),
        ];
        let c = Arc::new(FiniteAlgebra::new("conj", ring_signature(), n, tables).unwrap());
        let b = Budget::default();
        let broken = !boolean_pixley().contains(&c, &b).unwrap();
        assert!(broken);
    }
}
