use super::checks::{check_rank_part, check_trivial_zeros, leading_coefficient_report};
use super::report::{Verdict, VerificationReport};
use super::CurveContext;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    RankPart,
    TrivialZeros,
    Leading { p: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanEntry {
    pub curve: String,
    #[serde(rename = "S")]
    pub s: u64,
    pub report: Option<VerificationReport>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ScanSummary {
    pub total: usize,
    pub pass: usize,
    pub not_applicable: usize,
    pub inconsistency: usize,
    pub errors: usize,
    pub extra_zeros: usize,
    pub duplicates: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanOutput {
    pub entries: Vec<ScanEntry>,
    pub summary: ScanSummary,
    pub warnings: Vec<String>,
}

fn run_one(ctx: &CurveContext, s: u64, kind: CheckKind) -> crate::Result<VerificationReport> {
    match kind {
        CheckKind::RankPart => check_rank_part(ctx, s),
        CheckKind::TrivialZeros => check_trivial_zeros(ctx, s),
        CheckKind::Leading { p } => leading_coefficient_report(ctx, s, p),
    }
}

/// Runs one check over (curve, S) items in parallel; entries keep input order,
/// duplicates are dropped with a warning and errors never abort the scan.
pub fn scan(contexts: &BTreeMap<String, CurveContext>, items: &[(String, u64)], kind: CheckKind) -> ScanOutput {
    let mut seen = BTreeSet::new();
    let mut warnings = Vec::new();
    let mut unique = Vec::with_capacity(items.len());
    for (c, s) in items {
        if seen.insert((c.clone(), *s)) {
            unique.push((c.clone(), *s));
        } else {
            let w = format!("duplicate item ({c}, {s}) skipped");
            log::warn!("{w}");
            warnings.push(w);
        }
    }
    let entries: Vec<ScanEntry> = unique
        .into_par_iter()
        .map(|(curve, s)| {
            let res = match contexts.get(&curve) {
                Some(ctx) => run_one(ctx, s, kind).map_err(|e| e.to_string()),
                None => Err(format!("unknown curve {curve}")),
            };
            match res {
                Ok(r) => ScanEntry { curve, s, report: Some(r), error: None },
                Err(e) => ScanEntry { curve, s, report: None, error: Some(e) },
            }
        })
        .collect();
    let mut summary = ScanSummary { total: entries.len(), duplicates: warnings.len(), ..Default::default() };
    for e in &entries {
        match &e.report {
            None => summary.errors += 1,
            Some(r) => {
                match r.verdict {
                    Verdict::Pass => summary.pass += 1,
                    Verdict::NotApplicable => summary.not_applicable += 1,
                    Verdict::Inconsistency => summary.inconsistency += 1,
                }
                if r.has_extra_zero() {
                    summary.extra_zeros += 1;
                }
            }
        }
    }
    ScanOutput { entries, summary, warnings }
}
