//! Whole-domain verification of the propositions and failure detection.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::search::{wire, AgrEngine, ClosedForm, Diagnostic, RecoveryResult, RecoveryStatus, SearchTrace, WirePoint};
use super::{AgrQuery, CaseId, StepWindow};
use crate::error::Result;
use crate::exactnum::{FpElem, PFp, Prime, Rational};
use crate::maps::{validate_params_over, MapFamily, ResiduePoint, ValidationReport};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ViolationKind {
    WrongM { expected: u32, found: Option<u32> },
    WrongValue { expected: WirePoint, found: Option<WirePoint> },
    LiftDependent,
    NotRecovered,
    Unsampleable,
    CrossOracleMismatch,
    Inconclusive,
    ClosedFormError { message: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub n: i64,
    pub point: WirePoint,
    pub case: Option<CaseId>,
    #[serde(flatten)]
    pub kind: ViolationKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessKind {
    /// The reduced composite is undefined at every `m <= m_max`.
    NoDefinedIterate,
    /// The reduced composite was defined at some `m`, but lifts disagreed there.
    LiftDependent,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftTrail {
    pub start: (Rational, Rational),
    /// Reductions of the iterates `0..=m`; `null` where p-adic precision ran out.
    pub reductions: Vec<Option<WirePoint>>,
    pub padic: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureWitness {
    pub point: WirePoint,
    pub n: i64,
    #[serde(flatten)]
    pub kind: WitnessKind,
    /// Steps at which the reduced composite was defined and lifts disagreed.
    pub candidate_ms: Vec<u32>,
    /// Steps at which the lifts' own reductions differ from each other.
    pub lift_disagreement_ms: Vec<u32>,
    pub lift_trails: Vec<LiftTrail>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropositionReport {
    pub family: MapFamily,
    pub prime: Prime,
    pub n_window: StepWindow,
    pub m_max: u32,
    pub validation: ValidationReport,
    /// `false` when validation failed and no point was scanned.
    pub scanned: bool,
    pub points_scanned: u64,
    pub case_counts: BTreeMap<CaseId, u64>,
    /// Minimal recovery step to count; unrecovered points are not counted.
    pub m_histogram: BTreeMap<u32, u64>,
    pub not_recovered: u64,
    pub violations: Vec<Violation>,
    pub singular_results: Vec<RecoveryResult>,
    pub failure_witnesses: Vec<FailureWitness>,
}

impl PropositionReport {
    pub fn passed(&self) -> bool {
        self.validation.passed() && self.violations.is_empty() && self.failure_witnesses.is_empty()
    }
}

/// Reductions of the domain: every finite residue point has lifts in the
/// domain, since its conditions exclude only finitely many exact values.
pub fn domain_residues(p: Prime) -> Vec<ResiduePoint> {
    let mut out = Vec::with_capacity((p.get() * p.get()) as usize);
    for x in 0..p.get() {
        for y in 0..p.get() {
            out.push((PFp::Finite(FpElem::new(p, x as i64)), PFp::Finite(FpElem::new(p, y as i64))));
        }
    }
    out
}

/// Searches every domain residue for every scanned step index, in order.
fn scan<T: Send>(
    engine: &AgrEngine,
    f: impl Fn(SearchTrace) -> T + Sync + Send,
) -> Result<Vec<(i64, Vec<T>)>> {
    let q = engine.query();
    let mut out = Vec::new();
    for n in q.step_indices() {
        let pts = domain_residues(q.prime);
        let res: Result<Vec<T>> = pts.par_iter().map(|&pt| engine.search(pt, n).map(&f)).collect();
        out.push((n, res?));
    }
    Ok(out)
}

fn witness_of(trace: &SearchTrace) -> Option<FailureWitness> {
    let r = &trace.result;
    if r.status != RecoveryStatus::NotRecovered {
        return None;
    }
    let kind = if trace.candidate_ms.is_empty() { WitnessKind::NoDefinedIterate } else { WitnessKind::LiftDependent };
    let len = trace.lifts.iter().map(|l| l.len()).min().unwrap_or(0);
    let lift_disagreement_ms = (1..=len)
        .filter(|&m| trace.lifts.iter().any(|l| l.reduction(m) != trace.lifts[0].reduction(m)))
        .map(|m| m as u32)
        .collect();
    Some(FailureWitness {
        point: r.residue_point,
        n: r.step_index,
        kind,
        candidate_ms: trace.candidate_ms.clone(),
        lift_disagreement_ms,
        lift_trails: trace
            .lifts
            .iter()
            .map(|l| LiftTrail {
                start: l.start().clone(),
                reductions: l.reductions().iter().map(|r| r.map(wire)).collect(),
                padic: l.uses_padic(),
            })
            .collect(),
    })
}

fn check_result(r: &RecoveryResult, out: &mut Vec<Violation>) {
    let mut push = |kind| out.push(Violation { n: r.step_index, point: r.residue_point, case: r.matched_case, kind });
    match r.status {
        RecoveryStatus::Unsampleable => {
            push(ViolationKind::Unsampleable);
            return;
        }
        RecoveryStatus::NotRecovered => push(ViolationKind::NotRecovered),
        RecoveryStatus::Recovered => {}
    }
    if let Some(msg) = &r.closed_form_error {
        push(ViolationKind::ClosedFormError { message: msg.clone() });
    }
    let expected_m = match (r.matched_case, r.closed_form) {
        (Some(CaseId::Generic), _) => Some(1),
        (_, Some(ClosedForm { expected_m, .. })) => Some(expected_m),
        _ => None,
    };
    if r.status == RecoveryStatus::Recovered {
        if let Some(e) = expected_m {
            if r.minimal_m != Some(e) {
                push(ViolationKind::WrongM { expected: e, found: r.minimal_m });
            }
        }
        if let Some(cf) = r.closed_form {
            if r.recovered_value != Some(cf.value) {
                push(ViolationKind::WrongValue { expected: cf.value, found: r.recovered_value });
            }
        }
        if !r.lift_independent {
            push(ViolationKind::LiftDependent);
        }
    }
    if r.diagnostics.iter().any(|d| matches!(d, Diagnostic::CrossOracleMismatch { .. })) {
        push(ViolationKind::CrossOracleMismatch);
    }
    if r.status != RecoveryStatus::Recovered && r.diagnostics.iter().any(|d| matches!(d, Diagnostic::Inconclusive { .. })) {
        push(ViolationKind::Inconclusive);
    }
}

/// Scans every residue of the domain for every step index of the window and
/// checks recovery against the proof cases.
pub fn verify_proposition(query: &AgrQuery) -> Result<PropositionReport> {
    let engine = AgrEngine::new(query.clone())?;
    let validation = validate_params_over(&query.family, query.prime, query.n_window.iter());
    let mut report = PropositionReport {
        family: query.family.clone(),
        prime: query.prime,
        n_window: query.n_window,
        m_max: query.m_max,
        validation,
        scanned: false,
        points_scanned: 0,
        case_counts: BTreeMap::new(),
        m_histogram: BTreeMap::new(),
        not_recovered: 0,
        violations: Vec::new(),
        singular_results: Vec::new(),
        failure_witnesses: Vec::new(),
    };
    if !report.validation.passed() {
        return Ok(report);
    }
    report.scanned = true;
    let runs = scan(&engine, |t| {
        let w = witness_of(&t);
        (t.result, w)
    })?;
    for (_, results) in runs {
        for (r, w) in results {
            report.points_scanned += 1;
            if let Some(c) = r.matched_case {
                *report.case_counts.entry(c).or_default() += 1;
            }
            match r.minimal_m {
                Some(m) => *report.m_histogram.entry(m).or_default() += 1,
                None => report.not_recovered += 1,
            }
            check_result(&r, &mut report.violations);
            report.failure_witnesses.extend(w);
            if r.matched_case != Some(CaseId::Generic) || r.minimal_m != Some(1) {
                report.singular_results.push(r);
            }
        }
    }
    Ok(report)
}

/// Residue points where no single recovery step works for all lifts.
pub fn detect_agr_failure(query: &AgrQuery) -> Result<Vec<FailureWitness>> {
    let engine = AgrEngine::new(query.clone())?;
    let runs = scan(&engine, |t| witness_of(&t))?;
    Ok(runs.into_iter().flat_map(|(_, ws)| ws.into_iter().flatten()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agr::find_recovery_step;
    use crate::exactnum::Coord;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn pt(p: Prime, x: i64, y: i64) -> ResiduePoint {
        (PFp::Finite(FpElem::new(p, x)), PFp::Finite(FpElem::new(p, y)))
    }

    #[test]
    fn hv_recovery_at_zero_line() {
        let p = Prime::new(7).unwrap();
        let query = AgrQuery::new(MapFamily::Hv { a: q("1") }, p);
        let r = find_recovery_step(&query, pt(p, 0, 3), 0).unwrap();
        assert_eq!(r.minimal_m, Some(4));
        assert_eq!(r.recovered_value, Some((Coord::Finite(3), Coord::Finite(0))));
        assert!(r.lift_independent);
        assert_eq!(r.matched_case, Some(CaseId::HvSing));
        let g = find_recovery_step(&query, pt(p, 2, 5), 0).unwrap();
        assert_eq!(g.minimal_m, Some(1));
    }

    #[test]
    fn qp3_origin_recovers_at_four() {
        let p = Prime::new(11).unwrap();
        let fam = MapFamily::Qp3 { a: q("1"), b: q("2"), c: q("3"), d: q("4"), q: q("5") };
        let r = find_recovery_step(&AgrQuery::new(fam, p), pt(p, 0, 0), 0).unwrap();
        assert_eq!(r.minimal_m, Some(4));
        assert_eq!(r.recovered_value, Some((Coord::Finite(0), Coord::Finite(0))));
    }

    #[test]
    fn hv_verify_small() {
        let p = Prime::new(7).unwrap();
        let rep = verify_proposition(&AgrQuery::new(MapFamily::Hv { a: q("1") }, p)).unwrap();
        assert!(rep.passed(), "{:?}", rep.violations);
        assert_eq!(rep.case_counts.get(&CaseId::HvSing), Some(&7));
        assert_eq!(rep.points_scanned, 49);
    }
}
