//! Almost good reduction: per-point recovery search, proof-case
//! classification, and whole-domain verification.

mod cases;
mod lifts;
mod search;
mod verify;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::Prime;
use crate::maps::MapFamily;

pub use cases::{classify_case, closed_form_value, CaseId};
pub use lifts::{hash_words, sample_lift, sample_orbit, LiftOrbit, HEIGHT_CAP_BITS};
pub use search::{
    find_recovery_step, unwire, wire, AgrEngine, BivariateValue, ClosedForm, Diagnostic, FastValue, RecoveryResult,
    RecoveryStatus, SearchTrace, WirePoint,
};
pub use verify::{
    detect_agr_failure, domain_residues, verify_proposition, FailureWitness, LiftTrail, PropositionReport, Violation, ViolationKind,
    WitnessKind,
};

/// Inclusive range of step indices, written `a..b` on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepWindow {
    pub start: i64,
    pub end: i64,
}

impl StepWindow {
    pub fn new(start: i64, end: i64) -> Result<Self> {
        if start > end {
            return Err(Error::InvalidParameter(format!("empty step window {start}..{end}")));
        }
        Ok(StepWindow { start, end })
    }

    pub fn single(n: i64) -> Self {
        StepWindow { start: n, end: n }
    }

    pub fn iter(self) -> std::ops::RangeInclusive<i64> {
        self.start..=self.end
    }
}

impl FromStr for StepWindow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("malformed step window {s:?}, expected a..b or n"));
        match s.split_once("..") {
            Some((a, b)) => {
                let b = b.strip_prefix('=').unwrap_or(b);
                StepWindow::new(a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)
            }
            None => Ok(StepWindow::single(s.parse().map_err(|_| bad())?)),
        }
    }
}

impl fmt::Display for StepWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

pub const DEFAULT_M_MAX: u32 = 8;
pub const FAILURE_M_MAX: u32 = 12;
pub const DEFAULT_LIFTS: u32 = 3;
pub const DEFAULT_CROSS_CHECK_M: u32 = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgrQuery {
    pub family: MapFamily,
    pub prime: Prime,
    pub n_window: StepWindow,
    pub m_max: u32,
    pub lifts_per_residue: u32,
    pub rng_seed: u64,
    /// Largest `m` at which the bivariate oracle is also evaluated.
    pub cross_check_max_m: u32,
}

impl AgrQuery {
    pub fn new(family: MapFamily, prime: Prime) -> Self {
        AgrQuery {
            family,
            prime,
            n_window: StepWindow::single(0),
            m_max: DEFAULT_M_MAX,
            lifts_per_residue: DEFAULT_LIFTS,
            rng_seed: 0,
            cross_check_max_m: DEFAULT_CROSS_CHECK_M,
        }
    }

    pub fn with_window(mut self, w: StepWindow) -> Self {
        self.n_window = w;
        self
    }

    pub fn with_m_max(mut self, m: u32) -> Self {
        self.m_max = m;
        self
    }

    pub fn with_lifts(mut self, l: u32) -> Self {
        self.lifts_per_residue = l;
        self
    }

    pub fn with_seed(mut self, s: u64) -> Self {
        self.rng_seed = s;
        self
    }

    pub fn check(&self) -> Result<()> {
        if self.m_max == 0 {
            return Err(Error::InvalidParameter("m_max must be at least 1".into()));
        }
        if self.lifts_per_residue < 3 {
            return Err(Error::InvalidParameter("lifts_per_residue must be at least 3".into()));
        }
        if self.n_window.start > self.n_window.end {
            return Err(Error::InvalidParameter("empty step window".into()));
        }
        self.family.check_structure()
    }

    /// Step indices scanned: the window, or its first index for autonomous maps.
    pub fn step_indices(&self) -> Vec<i64> {
        if self.family.is_autonomous() {
            vec![self.n_window.start]
        } else {
            self.n_window.iter().collect()
        }
    }
}
