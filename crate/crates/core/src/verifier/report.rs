use crate::group_ring::AugOrder;
use serde::Serialize;
use std::collections::BTreeMap;

pub const REPORT_SCHEMA: &str = "mtlab.report.v1";

/// pass / not-applicable / inconsistency. A failed hypothesis only ever
/// yields NotApplicable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    NotApplicable,
    Inconsistency,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct Hypothesis {
    pub name: String,
    pub status: HypothesisStatus,
    pub witness: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct PrimeResult {
    /// Membership in Z_(p) tensor I^ord_required; None when unchecked.
    pub member: Option<bool>,
    pub ord: Option<AugOrder>,
    /// "direct", "sylow", "augmentation" or "unchecked".
    pub route: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// A statement implied by a theorem whose hypotheses were verified but which
/// the tool cannot check independently.
#[derive(Clone, Debug, Serialize)]
pub struct Prediction {
    pub statement: String,
    pub trigger: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub schema: String,
    pub curve: String,
    #[serde(rename = "S")]
    pub s: u64,
    pub theorem: String,
    pub verdict: Verdict,
    pub ord_found: Option<usize>,
    pub ord_required: usize,
    pub augmentation: Option<String>,
    /// Membership of d theta in I^ord_required over Z, d the denominator.
    pub exact_member: Option<bool>,
    pub hypotheses: Vec<Hypothesis>,
    pub per_prime: BTreeMap<u64, PrimeResult>,
    pub unchecked_primes: Vec<u64>,
    pub predictions: Vec<Prediction>,
    pub witnesses: Vec<String>,
}

impl VerificationReport {
    pub fn new(curve: &str, s: u64, theorem: &str, ord_required: usize) -> Self {
        VerificationReport {
            schema: REPORT_SCHEMA.into(),
            curve: curve.into(),
            s,
            theorem: theorem.into(),
            verdict: Verdict::Pass,
            ord_found: None,
            ord_required,
            augmentation: None,
            exact_member: None,
            hypotheses: Vec::new(),
            per_prime: BTreeMap::new(),
            unchecked_primes: Vec::new(),
            predictions: Vec::new(),
            witnesses: Vec::new(),
        }
    }

    pub fn hypothesis(&mut self, name: &str, status: HypothesisStatus, witness: impl Into<String>) {
        self.hypotheses.push(Hypothesis { name: name.into(), status, witness: witness.into() });
        if status == HypothesisStatus::Fail {
            self.verdict = Verdict::NotApplicable;
        }
    }

    pub fn hypotheses_hold(&self) -> bool {
        self.hypotheses.iter().all(|h| h.status != HypothesisStatus::Fail)
    }

    pub fn inconsistency(&mut self, why: impl Into<String>) {
        self.verdict = Verdict::Inconsistency;
        self.witnesses.push(format!("INCONSISTENCY: {}", why.into()));
    }

    pub fn has_extra_zero(&self) -> bool {
        self.ord_found.is_some_and(|o| o > self.ord_required)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
