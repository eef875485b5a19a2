//! Per-point search for the minimal recovery step.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use super::cases::{classify_case, closed_form_value, CaseId};
use super::lifts::{hash_words, sample_orbit, LiftOrbit};
use super::AgrQuery;
use crate::error::{Error, Result};
use crate::exactnum::{Coord, FpElem, PFp, Prime};
use crate::maps::{ReducedSystem, ResiduePoint};
use crate::polyfield::{
    evaluate_pair, reduce_map_component, Direction, PerturbationOutcome, ProbeBundle, RationalFunction, StepPair, Q,
};

pub type WirePoint = (Coord, Coord);

pub fn wire(pt: ResiduePoint) -> WirePoint {
    (pt.0.to_wire(), pt.1.to_wire())
}

fn finite_pair(v: ResiduePoint) -> bool {
    !v.0.is_infinite() && !v.1.is_infinite()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecoveryStatus {
    Recovered,
    NotRecovered,
    /// Every sampled lift hit an exact singularity.
    Unsampleable,
}

/// Fast-path verdict in wire form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum FastValue {
    Value(WirePoint),
    Disagree,
    Inconclusive,
}

impl From<PerturbationOutcome> for FastValue {
    fn from(o: PerturbationOutcome) -> Self {
        match o {
            PerturbationOutcome::Value(v) => FastValue::Value(wire(v)),
            PerturbationOutcome::Disagree => FastValue::Disagree,
            PerturbationOutcome::Inconclusive => FastValue::Inconclusive,
        }
    }
}

/// Value of the reduced composite map evaluated directly on `P^1 x P^1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum BivariateValue {
    Value(WirePoint),
    Indeterminate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedForm {
    pub value: WirePoint,
    pub expected_m: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    /// The reduced composite is defined at `m` but some lift reduces elsewhere.
    LiftMismatch { m: u32, candidate: WirePoint, lift_values: Vec<Option<WirePoint>> },
    CrossOracleMismatch { m: u32, fast: FastValue, bivariate: BivariateValue },
    Inconclusive { m: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecoveryResult {
    pub residue_point: WirePoint,
    pub step_index: i64,
    pub status: RecoveryStatus,
    pub minimal_m: Option<u32>,
    pub recovered_value: Option<WirePoint>,
    pub lift_independent: bool,
    pub matched_case: Option<CaseId>,
    pub closed_form: Option<ClosedForm>,
    pub closed_form_error: Option<String>,
    pub fast_path_value: Option<FastValue>,
    pub bivariate_value: Option<BivariateValue>,
    pub lifts_used: u32,
    pub diagnostics: Vec<Diagnostic>,
}

/// Lift orbits kept alongside a result, for failure witnesses.
#[derive(Clone, Debug)]
pub struct SearchTrace {
    pub result: RecoveryResult,
    pub lifts: Vec<LiftOrbit>,
    /// Steps at which the reduced composite was defined but lifts disagreed.
    pub candidate_ms: Vec<u32>,
}

type CompositeQ = (RationalFunction<Q>, RationalFunction<Q>);

/// Shared state for many searches under one query.
#[derive(Debug)]
pub struct AgrEngine {
    query: AgrQuery,
    sys: ReducedSystem,
    /// Composites over `Q` and their reductions, keyed by `(n, m)`.
    composites: Mutex<HashMap<(i64, u32), Arc<(CompositeQ, Option<StepPair>)>>>,
}

impl AgrEngine {
    pub fn new(query: AgrQuery) -> Result<Self> {
        query.check()?;
        let sys = ReducedSystem::new(query.family.clone(), query.prime);
        Ok(AgrEngine { query, sys, composites: Mutex::new(HashMap::new()) })
    }

    pub fn query(&self) -> &AgrQuery {
        &self.query
    }

    pub fn system(&self) -> &ReducedSystem {
        &self.sys
    }

    fn key_n(&self, n: i64) -> i64 {
        if self.query.family.is_autonomous() {
            0
        } else {
            n
        }
    }

    fn composite(&self, n: i64, m: u32) -> Result<Arc<(CompositeQ, Option<StepPair>)>> {
        let key = (self.key_n(n), m);
        if let Some(c) = self.composites.lock().expect("cache lock").get(&key) {
            return Ok(c.clone());
        }
        let prev: CompositeQ = if m == 1 {
            (RationalFunction::x(Q), RationalFunction::y(Q))
        } else {
            self.composite(n, m - 1)?.0.clone()
        };
        let next = self.query.family.step_symbolic(key.0 + i64::from(m) - 1, &prev)?;
        let reduced = match (
            reduce_map_component(&next.0, self.query.prime),
            reduce_map_component(&next.1, self.query.prime),
        ) {
            (Some(a), Some(b)) => Some((a, b)),
            _ => None,
        };
        let entry = Arc::new((next, reduced));
        self.composites.lock().expect("cache lock").insert(key, entry.clone());
        Ok(entry)
    }

    /// Reduced composite of `m` steps from index `n`, evaluated at `pt`.
    pub fn bivariate_eval(&self, n: i64, m: u32, pt: ResiduePoint) -> Result<Option<BivariateValue>> {
        let c = self.composite(n, m)?;
        Ok(c.1.as_ref().map(|map| match evaluate_pair(map, pt) {
            Some(v) => BivariateValue::Value(wire(v)),
            None => BivariateValue::Indeterminate,
        }))
    }

    fn directions(&self, base: (FpElem, FpElem), n: i64) -> Vec<Direction> {
        let p = self.query.prime;
        let pm1 = p.get() - 1;
        let mut dirs = vec![Direction::Slope(FpElem::zero(p)), Direction::Vertical];
        if pm1 <= 6 {
            dirs.extend((1..=pm1).map(|l| Direction::Slope(FpElem::new(p, l as i64))));
        } else {
            let mut s = hash_words(&[self.query.rng_seed, base.0.residue(), base.1.residue(), n as u64, 0xd1]);
            let mut chosen: Vec<u64> = Vec::new();
            while chosen.len() < 6 {
                s = super::lifts::mix64(s);
                let l = 1 + s % pm1;
                if !chosen.contains(&l) {
                    chosen.push(l);
                }
            }
            dirs.extend(chosen.into_iter().map(|l| Direction::Slope(FpElem::new(p, l as i64))));
        }
        dirs
    }

    /// Searches the minimal recovery step at `pt` from step index `n`.
    pub fn find_recovery_step(&self, pt: ResiduePoint, n: i64) -> Result<RecoveryResult> {
        Ok(self.search(pt, n)?.result)
    }

    pub fn search(&self, pt: ResiduePoint, n: i64) -> Result<SearchTrace> {
        let q = &self.query;
        let p = q.prime;
        let base = match pt {
            (PFp::Finite(x), PFp::Finite(y)) => (x, y),
            _ => return Err(Error::InvalidParameter("residue point must be finite".into())),
        };
        let matched_case = Some(classify_case(&q.family, pt, n, p)?);
        let (closed_form, closed_form_error) = match matched_case {
            Some(CaseId::Generic) | Some(CaseId::QrtSing) | None => (None, None),
            Some(c) => match closed_form_value(c, pt, &q.family, n, p) {
                Ok((v, em)) => (Some(ClosedForm { value: wire(v), expected_m: em }), None),
                Err(e) => (None, Some(e.to_string())),
            },
        };

        let mut result = RecoveryResult {
            residue_point: wire(pt),
            step_index: n,
            status: RecoveryStatus::NotRecovered,
            minimal_m: None,
            recovered_value: None,
            lift_independent: false,
            matched_case,
            closed_form,
            closed_form_error,
            fast_path_value: None,
            bivariate_value: None,
            lifts_used: q.lifts_per_residue,
            diagnostics: Vec::new(),
        };

        let mut lifts: Vec<(LiftOrbit, u64)> = Vec::new();
        for i in 0..q.lifts_per_residue as usize {
            match sample_orbit(&q.family, p, n, base, q.rng_seed, i, 0, 0) {
                Some(l) => lifts.push(l),
                None => {
                    result.status = RecoveryStatus::Unsampleable;
                    return Ok(SearchTrace { result, lifts: Vec::new(), candidate_ms: Vec::new() });
                }
            }
        }

        let mut seq = Some(base);
        let mut bundle: Option<ProbeBundle> = None;
        let mut candidate_ms = Vec::new();
        let mut any_agreement = false;
        for m in 1..=q.m_max {
            let step = self.sys.step(n + i64::from(m) - 1)?;
            let fast = match seq {
                Some(cur) => match evaluate_pair(&step, (PFp::Finite(cur.0), PFp::Finite(cur.1))) {
                    Some((PFp::Finite(a), PFp::Finite(b))) => {
                        seq = Some((a, b));
                        PerturbationOutcome::Value((PFp::Finite(a), PFp::Finite(b)))
                    }
                    _ => {
                        seq = None;
                        let dirs = self.directions(base, n);
                        let mut b = ProbeBundle::new(base, &dirs);
                        for j in 0..m {
                            b.advance(&self.sys.step(n + i64::from(j))?);
                        }
                        let v = b.verdict();
                        bundle = Some(b);
                        v
                    }
                },
                None => {
                    let b = bundle.as_mut().expect("bundle exists once the direct orbit fails");
                    b.advance(&step);
                    b.verdict()
                }
            };
            let biv = if m <= q.cross_check_max_m { self.bivariate_eval(n, m, pt)? } else { None };
            if let Some(bv) = biv {
                let agree = match (fast, bv) {
                    (PerturbationOutcome::Inconclusive, _) => true,
                    (PerturbationOutcome::Value(v), BivariateValue::Value(w)) => wire(v) == w,
                    (PerturbationOutcome::Disagree, BivariateValue::Indeterminate) => true,
                    _ => false,
                };
                if !agree {
                    result.diagnostics.push(Diagnostic::CrossOracleMismatch { m, fast: fast.into(), bivariate: bv });
                }
            }
            let candidate = match (fast, biv) {
                (PerturbationOutcome::Value(v), _) => Some(v),
                (PerturbationOutcome::Inconclusive, Some(BivariateValue::Value(w))) => {
                    Some((w.0.to_pfp(p)?, w.1.to_pfp(p)?))
                }
                _ => None,
            }
            .filter(|v| finite_pair(*v));
            if fast == PerturbationOutcome::Inconclusive {
                result.diagnostics.push(Diagnostic::Inconclusive { m });
            }

            for (i, (orbit, attempt)) in lifts.iter_mut().enumerate() {
                if orbit.extend_to(m as usize).is_err() {
                    match sample_orbit(&q.family, p, n, base, q.rng_seed, i, *attempt + 1, m as usize) {
                        Some(l) => (*orbit, *attempt) = l,
                        None => {
                            result.status = RecoveryStatus::Unsampleable;
                            result.fast_path_value = Some(fast.into());
                            result.bivariate_value = biv;
                            let lifts = lifts.into_iter().map(|l| l.0).collect();
                            return Ok(SearchTrace { result, lifts, candidate_ms });
                        }
                    }
                }
            }
            let reds: Vec<Option<ResiduePoint>> = lifts.iter().map(|l| l.0.reduction(m as usize)).collect();
            if reds[0].is_some_and(finite_pair) && reds.iter().all(|r| *r == reds[0]) {
                any_agreement = true;
            }
            result.fast_path_value = Some(fast.into());
            result.bivariate_value = biv;
            if let Some(v) = candidate {
                if reds.iter().all(|r| *r == Some(v)) {
                    result.status = RecoveryStatus::Recovered;
                    result.minimal_m = Some(m);
                    result.recovered_value = Some(wire(v));
                    result.lift_independent = true;
                    break;
                }
                candidate_ms.push(m);
                result.diagnostics.push(Diagnostic::LiftMismatch {
                    m,
                    candidate: wire(v),
                    lift_values: reds.iter().map(|r| r.map(wire)).collect(),
                });
            }
        }
        if result.status == RecoveryStatus::NotRecovered {
            result.lift_independent = any_agreement;
        }
        let lifts = lifts.into_iter().map(|l| l.0).collect();
        Ok(SearchTrace { result, lifts, candidate_ms })
    }
}

/// One-shot search for a single residue point.
pub fn find_recovery_step(query: &AgrQuery, pt: ResiduePoint, n: i64) -> Result<RecoveryResult> {
    AgrEngine::new(query.clone())?.find_recovery_step(pt, n)
}

/// Parses a wire point into residues modulo `p`.
pub fn unwire(pt: WirePoint, p: Prime) -> Result<ResiduePoint> {
    Ok((pt.0.to_pfp(p)?, pt.1.to_pfp(p)?))
}
