//! Bounded model search for gaps between the commutators.
//!
//! Models of a variety are enumerated size by size; each is tested for the
//! requested gap and the first hit becomes a [`Witness`] whose replay script
//! is re-run, slow oracles included, before it is returned.

mod enumerate;
mod fingerprint;
mod split;

pub use enumerate::{enumerate_models, visit_models, EnumOptions, Enumeration, Visit};
pub use fingerprint::{canonical_form, element_colours, fingerprint};

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgRef, FiniteAlgebra, Subuniverse, Term};
use crate::commutator::{
    centralizes, commutator_word_oracle, higgins, higgins3, huq, smith_normalised, smith_oracle,
    ternary_word_oracle,
};
use crate::conditions::is_perfect;
use crate::congruence::{
    all_congruences, all_ideals, denormalise, is_ideal, push_forward, quotient, zero_class,
    Congruence,
};
use crate::error::{Error, Result};
use crate::library::{variety, VarietySpec};
use crate::Budget;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GoalKind {
    ShGap,
    NhGap,
    WnhGap,
    PaGap,
    UceGap,
}

impl GoalKind {
    pub const ALL: [GoalKind; 5] = [
        GoalKind::ShGap,
        GoalKind::NhGap,
        GoalKind::WnhGap,
        GoalKind::PaGap,
        GoalKind::UceGap,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GoalKind::ShGap => "sh-gap",
            GoalKind::NhGap => "nh-gap",
            GoalKind::WnhGap => "wnh-gap",
            GoalKind::PaGap => "pa-gap",
            GoalKind::UceGap => "uce-gap",
        }
    }

    fn needs_malcev(self) -> bool {
        matches!(self, GoalKind::ShGap | GoalKind::PaGap | GoalKind::UceGap)
    }
}

impl fmt::Display for GoalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GoalKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        GoalKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Usage(format!("unknown goal `{s}`")))
    }
}

#[derive(Debug, Clone)]
pub struct SearchGoal {
    pub kind: GoalKind,
    pub variety: VarietySpec,
    pub min_size: usize,
    pub max_size: usize,
    /// Node budget shared by all sizes.
    pub max_nodes: u64,
}

impl SearchGoal {
    pub fn new(kind: GoalKind, variety: VarietySpec, max_size: usize) -> Self {
        SearchGoal {
            kind,
            variety,
            min_size: 1,
            max_size,
            max_nodes: 50_000_000,
        }
    }
}

/// One engine call of a replay script with its recorded result. Sets are
/// member lists, congruences block arrays.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "call", rename_all = "kebab-case")]
pub enum ReplayStep {
    Higgins { k: Vec<usize>, l: Vec<usize>, result: Vec<usize> },
    Huq { k: Vec<usize>, l: Vec<usize>, result: Vec<usize> },
    Higgins3 { k: Vec<usize>, l: Vec<usize>, m: Vec<usize>, result: Vec<usize> },
    IsIdeal { set: Vec<usize>, result: bool },
    SmithNormalised { k: Vec<usize>, l: Vec<usize>, result: Vec<usize> },
    Centralizes { r: Vec<usize>, s: Vec<usize>, result: bool },
    QuotientPerfect { theta: Vec<usize>, result: bool },
    /// Whether `theta2 / theta1` centralizes `∇` in `X / theta1`.
    QuotientCentral { theta1: Vec<usize>, theta2: Vec<usize>, result: bool },
}

/// A model exhibiting a gap, with the calls that exhibit it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub kind: GoalKind,
    pub variety: String,
    pub size: usize,
    pub tables: Vec<Vec<usize>>,
    pub replay: Vec<ReplayStep>,
}

impl Witness {
    pub fn algebra(&self) -> Result<AlgRef> {
        let v = variety(&self.variety)
            .ok_or_else(|| Error::Validation(format!("unknown variety `{}`", self.variety)))?;
        let alg = FiniteAlgebra::new(
            format!("{}-witness", self.kind),
            v.signature.clone(),
            self.size,
            self.tables.clone(),
        )?;
        Ok(Arc::new(alg))
    }
}

fn members(s: &Subuniverse) -> Vec<usize> {
    s.members().to_vec()
}

fn set(x: &AlgRef, m: &[usize]) -> Result<Subuniverse> {
    Subuniverse::from_members(x, m)
}

/// Tests one model for the gap; returns the replay script of a witness.
pub fn gap_in(kind: GoalKind, x: &AlgRef, malcev: Option<&Term>, budget: &Budget) -> Result<Option<Vec<ReplayStep>>> {
    let need = || {
        malcev.ok_or_else(|| Error::Usage(format!("goal `{kind}` needs a variety with a Mal'cev term")))
    };
    if kind.needs_malcev() {
        need()?;
    }
    if kind == GoalKind::UceGap {
        return uce_gap(x, need()?, budget);
    }
    let ideals = all_ideals(x, budget)?;
    let all = Subuniverse::full(x);
    for (i, k) in ideals.iter().enumerate() {
        match kind {
            GoalKind::WnhGap => {
                let h = higgins(x, k, k, budget)?;
                if !is_ideal(x, &h)? {
                    return Ok(Some(vec![
                        ReplayStep::Higgins { k: members(k), l: members(k), result: members(&h) },
                        ReplayStep::IsIdeal { set: members(&h), result: false },
                    ]));
                }
            }
            GoalKind::PaGap => {
                let h = higgins(x, k, k, budget)?;
                let s = smith_normalised(x, k, k, need()?, budget)?;
                let t = higgins3(x, k, k, &all, budget)?;
                if h != s || !t.is_subset(&h) {
                    return Ok(Some(vec![
                        ReplayStep::Higgins { k: members(k), l: members(k), result: members(&h) },
                        ReplayStep::SmithNormalised { k: members(k), l: members(k), result: members(&s) },
                        ReplayStep::Higgins3 { k: members(k), l: members(k), m: members(&all), result: members(&t) },
                    ]));
                }
            }
            GoalKind::ShGap | GoalKind::NhGap => {
                for l in &ideals[i..] {
                    if k.is_trivial() || l.is_trivial() {
                        continue;
                    }
                    let q = huq(x, k, l, budget)?;
                    if kind == GoalKind::NhGap {
                        let h = higgins(x, k, l, budget)?;
                        if h != q {
                            return Ok(Some(vec![
                                ReplayStep::Higgins { k: members(k), l: members(l), result: members(&h) },
                                ReplayStep::Huq { k: members(k), l: members(l), result: members(&q) },
                            ]));
                        }
                    } else if q.is_trivial() {
                        let s = smith_normalised(x, k, l, need()?, budget)?;
                        if !s.is_trivial() {
                            return Ok(Some(vec![
                                ReplayStep::Huq { k: members(k), l: members(l), result: members(&q) },
                                ReplayStep::SmithNormalised { k: members(k), l: members(l), result: members(&s) },
                            ]));
                        }
                    }
                }
            }
            GoalKind::UceGap => unreachable!(),
        }
    }
    Ok(None)
}

fn quotient_central(x: &AlgRef, t1: &Congruence, t2: &Congruence, malcev: &Term, budget: &Budget) -> Result<bool> {
    let (q, proj) = quotient(x, t1)?;
    let image = push_forward(t2, &proj)?;
    centralizes(&q, &image, &Congruence::nabla(&q), malcev, budget)
}

fn uce_gap(x: &AlgRef, malcev: &Term, budget: &Budget) -> Result<Option<Vec<ReplayStep>>> {
    let lattice = all_congruences(x, budget)?;
    let nabla = Congruence::nabla(x);
    let mut central = Vec::with_capacity(lattice.len());
    for c in &lattice {
        central.push(centralizes(x, c, &nabla, malcev, budget)?);
    }
    for (i, t1) in lattice.iter().enumerate() {
        if !central[i] {
            continue;
        }
        let (b, _) = quotient(x, t1)?;
        if !is_perfect(&b, budget)? {
            continue;
        }
        for (j, t2) in lattice.iter().enumerate() {
            if central[j] || !t1.le(t2) {
                continue;
            }
            if quotient_central(x, t1, t2, malcev, budget)? {
                return Ok(Some(vec![
                    ReplayStep::Centralizes { r: t1.blocks().to_vec(), s: nabla.blocks().to_vec(), result: true },
                    ReplayStep::QuotientPerfect { theta: t1.blocks().to_vec(), result: true },
                    ReplayStep::QuotientCentral { theta1: t1.blocks().to_vec(), theta2: t2.blocks().to_vec(), result: true },
                    ReplayStep::Centralizes { r: t2.blocks().to_vec(), s: nabla.blocks().to_vec(), result: false },
                ]));
            }
        }
    }
    Ok(None)
}

/// Outcome of re-running a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessCheck {
    pub valid: bool,
    pub details: Vec<String>,
}

/// Rebuilds the witness algebra, checks it lies in its variety, and re-runs
/// every replay step together with the independent oracles that apply
/// (lattice-meet Smith oracle, commutator words in groups).
pub fn validate_witness(w: &Witness, budget: &Budget) -> WitnessCheck {
    let mut details = Vec::new();
    let valid = match replay(w, budget, &mut details) {
        Ok(ok) => ok,
        Err(Error::BudgetExceeded { what, .. }) => {
            details.push(format!("oracle unavailable: {what} over budget"));
            false
        }
        Err(e) => {
            details.push(format!("replay error: {e}"));
            false
        }
    };
    WitnessCheck { valid, details }
}

fn replay(w: &Witness, budget: &Budget, details: &mut Vec<String>) -> Result<bool> {
    let v = variety(&w.variety)
        .ok_or_else(|| Error::Validation(format!("unknown variety `{}`", w.variety)))?;
    let x = w.algebra()?;
    if let Some((eq, val)) = v.first_failure(&x, budget)? {
        details.push(format!("algebra fails `{eq}` at {val:?}"));
        return Ok(false);
    }
    let malcev = v.malcev.clone();
    let need = || {
        malcev
            .clone()
            .ok_or_else(|| Error::Validation("variety has no Mal'cev term".into()))
    };
    let cong = |b: &[usize]| Congruence::from_partition(&x, b);
    let mut ok = true;
    let mut expect = |what: String, holds: bool| {
        if !holds {
            details.push(format!("mismatch: {what}"));
            ok = false;
        }
    };
    for step in &w.replay {
        match step {
            ReplayStep::Higgins { k, l, result } => {
                let got = higgins(&x, &set(&x, k)?, &set(&x, l)?, budget)?;
                expect(format!("higgins({k:?}, {l:?})"), got.members() == result.as_slice());
                if x.is_group() {
                    let word = commutator_word_oracle(&x, &set(&x, k)?, &set(&x, l)?, budget)?;
                    expect(format!("word oracle for ({k:?}, {l:?})"), word.members() == result.as_slice());
                }
            }
            ReplayStep::Huq { k, l, result } => {
                let got = huq(&x, &set(&x, k)?, &set(&x, l)?, budget)?;
                expect(format!("huq({k:?}, {l:?})"), got.members() == result.as_slice());
            }
            ReplayStep::Higgins3 { k, l, m, result } => {
                let got = higgins3(&x, &set(&x, k)?, &set(&x, l)?, &set(&x, m)?, budget)?;
                expect(format!("higgins3({k:?}, {l:?}, {m:?})"), got.members() == result.as_slice());
                if x.is_group() {
                    let word = ternary_word_oracle(&x, &set(&x, k)?, &set(&x, l)?, &set(&x, m)?, budget)?;
                    expect(format!("ternary word oracle for ({k:?}, {l:?}, {m:?})"), word.members() == result.as_slice());
                }
            }
            ReplayStep::IsIdeal { set: s, result } => {
                let got = is_ideal(&x, &set(&x, s)?)?;
                expect(format!("is_ideal({s:?})"), got == *result);
            }
            ReplayStep::SmithNormalised { k, l, result } => {
                let (ks, ls) = (set(&x, k)?, set(&x, l)?);
                let p = need()?;
                let got = smith_normalised(&x, &ks, &ls, &p, budget)?;
                expect(format!("smith_normalised({k:?}, {l:?})"), got.members() == result.as_slice());
                let oracle = smith_oracle(&x, &denormalise(&x, &ks)?, &denormalise(&x, &ls)?, &p, budget)?;
                expect(format!("smith oracle for ({k:?}, {l:?})"), zero_class(&oracle).members() == result.as_slice());
            }
            ReplayStep::Centralizes { r, s, result } => {
                let got = centralizes(&x, &cong(r)?, &cong(s)?, &need()?, budget)?;
                expect(format!("centralizes({r:?}, {s:?})"), got == *result);
            }
            ReplayStep::QuotientPerfect { theta, result } => {
                let (q, _) = quotient(&x, &cong(theta)?)?;
                expect(format!("perfect quotient by {theta:?}"), is_perfect(&q, budget)? == *result);
            }
            ReplayStep::QuotientCentral { theta1, theta2, result } => {
                let got = quotient_central(&x, &cong(theta1)?, &cong(theta2)?, &need()?, budget)?;
                expect(format!("central image of {theta2:?} modulo {theta1:?}"), got == *result);
            }
        }
    }
    Ok(ok)
}

/// Per-size summary of a search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SizeSummary {
    pub size: usize,
    pub models: u64,
    pub nodes: u64,
    pub complete: bool,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub witness: Option<Witness>,
    pub sizes: Vec<SizeSummary>,
    /// The node budget ran out before the bound was covered.
    pub exhausted: bool,
    pub nodes: u64,
}

/// Searches sizes `min_size..=max_size` in order and returns the first
/// validated witness. A witness that fails validation is an error: the
/// search never reports unvalidated findings.
pub fn find_witness(goal: &SearchGoal, jobs: usize, budget: &Budget) -> Result<SearchOutcome> {
    let malcev = goal.variety.malcev.clone();
    if goal.kind.needs_malcev() && malcev.is_none() {
        return Err(Error::Usage(format!(
            "goal `{}` needs a variety with a Mal'cev term",
            goal.kind
        )));
    }
    let mut sizes = Vec::new();
    let mut used = 0u64;
    let cache: Mutex<HashMap<Vec<Vec<usize>>, bool>> = Mutex::new(HashMap::new());
    for n in goal.min_size.max(1)..=goal.max_size {
        let opts = EnumOptions {
            max_nodes: goal.max_nodes.saturating_sub(used),
            jobs,
            symmetry_breaking: true,
        };
        let errors: Mutex<Option<Error>> = Mutex::new(None);
        let visit = visit_models(&goal.variety, n, &opts, true, |alg| {
            let key = canonical_form(alg, 5040);
            if let Some(k) = &key {
                if cache.lock().expect("cache").get(k) == Some(&false) {
                    return None;
                }
            }
            let x: AlgRef = Arc::new(alg.clone());
            match gap_in(goal.kind, &x, malcev.as_ref(), budget) {
                Ok(found) => {
                    if let Some(k) = key {
                        cache.lock().expect("cache").insert(k, found.is_some());
                    }
                    found.map(|replay| (alg.tables().to_vec(), replay))
                }
                Err(e) => {
                    errors.lock().expect("errors").get_or_insert(e);
                    None
                }
            }
        })?;
        if let Some(e) = errors.into_inner().expect("errors") {
            return Err(e);
        }
        used += visit.nodes;
        sizes.push(SizeSummary {
            size: n,
            models: visit.models,
            nodes: visit.nodes,
            complete: visit.complete,
        });
        if let Some((_, (tables, replay))) = visit.found.into_iter().next() {
            let w = Witness {
                kind: goal.kind,
                variety: goal.variety.name.clone(),
                size: n,
                tables,
                replay,
            };
            let check = validate_witness(&w, budget);
            if !check.valid {
                return Err(Error::Validation(format!(
                    "search produced a witness that fails replay: {}",
                    check.details.join("; ")
                )));
            }
            return Ok(SearchOutcome { witness: Some(w), sizes, exhausted: false, nodes: used });
        }
        if !visit.complete {
            return Ok(SearchOutcome { witness: None, sizes, exhausted: true, nodes: used });
        }
    }
    Ok(SearchOutcome { witness: None, sizes, exhausted: false, nodes: used })
}

/// Number of distinct fingerprints among `models`, and per model whether an
/// earlier model had the same fingerprint.
pub fn fingerprint_classes(models: &[FiniteAlgebra]) -> (usize, Vec<bool>) {
    let mut seen = std::collections::HashSet::new();
    let flags: Vec<bool> = models.iter().map(|m| !seen.insert(fingerprint(m))).collect();
    (seen.len(), flags)
}
