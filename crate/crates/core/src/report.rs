//! Check results and reports, serialized into the CLI's JSON schema.

use serde::Serialize;
use serde_json::Value;

use crate::algebra::Subuniverse;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// One checked statement. `reference` names the identity being checked.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: String,
    #[serde(rename = "paper_ref")]
    pub reference: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl CheckResult {
    pub fn new(id: impl Into<String>, reference: impl Into<String>, verdict: Verdict) -> Self {
        CheckResult {
            id: id.into(),
            reference: reference.into(),
            verdict,
            witness: None,
        }
    }

    pub fn with_witness(mut self, witness: Value) -> Self {
        self.witness = Some(witness);
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }
}

/// A named subuniverse inside a witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NamedSet {
    pub name: String,
    pub members: Vec<usize>,
}

impl NamedSet {
    pub fn new(name: impl Into<String>, s: &Subuniverse) -> Self {
        NamedSet {
            name: name.into(),
            members: s.members().to_vec(),
        }
    }
}

pub fn sets_json(sets: &[NamedSet]) -> Value {
    serde_json::to_value(sets).expect("plain data serializes")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub algebra: String,
    pub condition: String,
    pub results: Vec<CheckResult>,
}

impl ConditionReport {
    pub fn new(algebra: impl Into<String>, condition: impl Into<String>) -> Self {
        ConditionReport {
            algebra: algebra.into(),
            condition: condition.into(),
            results: Vec::new(),
        }
    }

    pub fn push(&mut self, r: CheckResult) {
        self.results.push(r);
    }

    pub fn passed(&self) -> bool {
        self.results.iter().all(CheckResult::passed)
    }

    pub fn verdict(&self) -> Verdict {
        if !self.passed() {
            Verdict::Fail
        } else if !self.results.is_empty() && self.results.iter().all(|r| r.verdict == Verdict::Skipped) {
            Verdict::Skipped
        } else {
            Verdict::Pass
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.results.iter().filter(|r| r.verdict == Verdict::Fail)
    }

    pub fn find(&self, id: &str) -> Option<&CheckResult> {
        self.results.iter().find(|r| r.id == id)
    }
}
