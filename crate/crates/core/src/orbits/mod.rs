//! Reduced dynamics over `F_p^2`, extended through singular points by
//! recovery jumps: at a point where the reduced step is undefined, the orbit
//! moves to the recovered value and the step index advances by `m`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agr::{domain_residues, unwire, wire, AgrEngine, AgrQuery, RecoveryStatus, StepWindow, WirePoint};
use crate::error::Result;
use crate::exactnum::{PFp, Prime};
use crate::maps::{MapFamily, ResiduePoint};

pub const EXTENSION_NOTE: &str = "extended dynamics: singular points jump to their recovered value and advance n by m";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepKind {
    Plain,
    RecoveryJump { m: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrailEntry {
    pub point: WirePoint,
    /// Step index on arrival.
    pub n: i64,
    #[serde(flatten)]
    pub step: StepKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Terminal {
    /// The orbit closed a cycle of this many trail entries.
    Cycle { length: u64 },
    HitUnrecoverable,
    LeftDomain,
    /// The step budget ran out first.
    Truncated,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub start: WirePoint,
    pub n0: i64,
    /// Entries are pairwise distinct, except that the last one closes the
    /// cycle when the terminal is `Cycle`.
    pub trail: Vec<TrailEntry>,
    pub terminal: Terminal,
}

/// One move of the extended dynamics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Move {
    To(ResiduePoint, StepKind),
    Unrecoverable,
    Left,
}

/// Extended reduced dynamics for one family and prime, with recovery
/// searches memoized.
pub struct Explorer {
    engine: AgrEngine,
    jumps: Mutex<HashMap<(WirePoint, i64), Option<(ResiduePoint, u32)>>>,
}

impl Explorer {
    pub fn new(family: MapFamily, p: Prime, n0: i64, m_max: u32, seed: u64) -> Result<Self> {
        let query = AgrQuery::new(family, p).with_window(StepWindow::single(n0)).with_m_max(m_max).with_seed(seed);
        Ok(Explorer { engine: AgrEngine::new(query)?, jumps: Mutex::new(HashMap::new()) })
    }

    pub fn family(&self) -> &MapFamily {
        &self.engine.query().family
    }

    pub fn prime(&self) -> Prime {
        self.engine.query().prime
    }

    fn autonomous(&self) -> bool {
        self.family().is_autonomous()
    }

    fn jump(&self, pt: ResiduePoint, n: i64) -> Result<Option<(ResiduePoint, u32)>> {
        let key = (wire(pt), if self.autonomous() { 0 } else { n });
        if let Some(j) = self.jumps.lock().expect("jump cache").get(&key) {
            return Ok(*j);
        }
        let r = self.engine.find_recovery_step(pt, n)?;
        let j = match (r.status, r.minimal_m, r.recovered_value) {
            (RecoveryStatus::Recovered, Some(m), Some(v)) => Some((unwire(v, self.prime())?, m)),
            _ => None,
        };
        self.jumps.lock().expect("jump cache").insert(key, j);
        Ok(j)
    }

    fn next(&self, pt: ResiduePoint, n: i64) -> Result<Move> {
        if pt.0.is_infinite() || pt.1.is_infinite() {
            return Ok(Move::Left);
        }
        if let Ok(v) = self.engine.system().step_reduced(n, pt)? {
            return Ok(Move::To(v, StepKind::Plain));
        }
        Ok(match self.jump(pt, n)? {
            Some((v, m)) => Move::To(v, StepKind::RecoveryJump { m }),
            None => Move::Unrecoverable,
        })
    }

    /// Follows the extended dynamics from `start` at index `n0`. Cycles are
    /// detected only for autonomous families.
    pub fn trace(&self, n0: i64, start: ResiduePoint, max_steps: usize) -> Result<OrbitRecord> {
        let mut trail = Vec::new();
        let mut seen = HashMap::from([(start, 0usize)]);
        let (mut pt, mut n) = (start, n0);
        let terminal = loop {
            if trail.len() >= max_steps {
                break Terminal::Truncated;
            }
            match self.next(pt, n)? {
                Move::Left => break Terminal::LeftDomain,
                Move::Unrecoverable => break Terminal::HitUnrecoverable,
                Move::To(v, step) => {
                    n += match step {
                        StepKind::Plain => 1,
                        StepKind::RecoveryJump { m } => i64::from(m),
                    };
                    pt = v;
                    trail.push(TrailEntry { point: wire(v), n, step });
                    if self.autonomous() {
                        if let Some(&i) = seen.get(&v) {
                            break Terminal::Cycle { length: (trail.len() - i) as u64 };
                        }
                        seen.insert(v, trail.len());
                    }
                }
            }
        };
        Ok(OrbitRecord { start: wire(start), n0, trail, terminal })
    }
}

/// Traces one orbit of the extended reduced dynamics.
pub fn trace_orbit(family: &MapFamily, p: Prime, n0: i64, start: ResiduePoint, max_steps: usize) -> Result<OrbitRecord> {
    Explorer::new(family.clone(), p, n0, crate::agr::DEFAULT_M_MAX, 0)?.trace(n0, start, max_steps)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhasePortrait {
    pub prime: Prime,
    pub family: MapFamily,
    pub n0: i64,
    pub max_steps: u64,
    pub note: String,
    pub points: u64,
    /// Cycle length to number of cycles; autonomous families only.
    pub cycle_length_histogram: Option<BTreeMap<u64, u64>>,
    /// Distance to the cycle to number of points; autonomous families only.
    pub transient_length_histogram: Option<BTreeMap<u64, u64>>,
    pub cycle_points: u64,
    pub transient_points: u64,
    /// Trail length to number of starts; non-autonomous families only.
    pub trail_length_histogram: Option<BTreeMap<u64, u64>>,
    pub truncated: u64,
    /// Residue points at which the reduced step is singular.
    pub singular_entries: u64,
    pub recovery_m_histogram: BTreeMap<u32, u64>,
    /// Points whose orbit reaches a singular point that does not recover.
    pub unrecoverable: u64,
    pub left_domain: u64,
}

impl PhasePortrait {
    /// Every scanned point lies in exactly one terminal category.
    pub fn accounted(&self) -> u64 {
        self.cycle_points + self.transient_points + self.truncated + self.unrecoverable + self.left_domain
    }
}

fn index(pt: ResiduePoint, p: u64) -> Option<usize> {
    match pt {
        (PFp::Finite(x), PFp::Finite(y)) => Some((x.residue() * p + y.residue()) as usize),
        _ => None,
    }
}

/// Decomposes the extended reduced phase space over all `p^2` residues.
pub fn phase_portrait(family: &MapFamily, p: Prime, n0: i64, max_steps: usize) -> Result<PhasePortrait> {
    portrait_with(&Explorer::new(family.clone(), p, n0, crate::agr::DEFAULT_M_MAX, 0)?, n0, max_steps)
}

pub fn portrait_with(ex: &Explorer, n0: i64, max_steps: usize) -> Result<PhasePortrait> {
    let p = ex.prime();
    let pts = domain_residues(p);
    let moves: Vec<Move> = pts.par_iter().map(|&pt| ex.next(pt, n0)).collect::<Result<_>>()?;
    let mut portrait = PhasePortrait {
        prime: p,
        family: ex.family().clone(),
        n0,
        max_steps: max_steps as u64,
        note: EXTENSION_NOTE.into(),
        points: pts.len() as u64,
        cycle_length_histogram: None,
        transient_length_histogram: None,
        cycle_points: 0,
        transient_points: 0,
        trail_length_histogram: None,
        truncated: 0,
        singular_entries: 0,
        recovery_m_histogram: BTreeMap::new(),
        unrecoverable: 0,
        left_domain: 0,
    };
    for mv in &moves {
        match mv {
            Move::To(_, StepKind::RecoveryJump { m }) => {
                portrait.singular_entries += 1;
                *portrait.recovery_m_histogram.entry(*m).or_default() += 1;
            }
            Move::Unrecoverable => portrait.singular_entries += 1,
            _ => {}
        }
    }
    if ex.autonomous() {
        functional_graph(&moves, p.get(), &mut portrait);
    } else {
        let records: Vec<OrbitRecord> = pts.par_iter().map(|&pt| ex.trace(n0, pt, max_steps)).collect::<Result<_>>()?;
        let mut hist = BTreeMap::new();
        for r in records {
            *hist.entry(r.trail.len() as u64).or_default() += 1;
            match r.terminal {
                Terminal::HitUnrecoverable => portrait.unrecoverable += 1,
                Terminal::LeftDomain => portrait.left_domain += 1,
                Terminal::Truncated | Terminal::Cycle { .. } => portrait.truncated += 1,
            }
        }
        portrait.trail_length_histogram = Some(hist);
    }
    Ok(portrait)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Fate {
    Unknown,
    OnCycle,
    Transient(u64),
    Unrecoverable,
    Left,
}

/// Cycles and transients of the extended map as a functional graph on
/// `F_p^2` plus two sinks.
fn functional_graph(moves: &[Move], p: u64, out: &mut PhasePortrait) {
    let succ = |i: usize| match moves[i] {
        Move::To(v, _) => index(v, p).map_or(Fate::Left, |j| Fate::Transient(j as u64)),
        Move::Unrecoverable => Fate::Unrecoverable,
        Move::Left => Fate::Left,
    };
    let mut fate = vec![Fate::Unknown; moves.len()];
    let mut cycles = BTreeMap::new();
    let mut transients = BTreeMap::new();
    for s in 0..moves.len() {
        if fate[s] != Fate::Unknown {
            continue;
        }
        let mut path = Vec::new();
        let mut pos = HashMap::new();
        let mut cur = s;
        let end = loop {
            if fate[cur] != Fate::Unknown {
                break fate[cur];
            }
            if let Some(&i) = pos.get(&cur) {
                let cyc: Vec<usize> = path.split_off(i);
                *cycles.entry(cyc.len() as u64).or_default() += 1;
                for c in cyc {
                    fate[c] = Fate::OnCycle;
                }
                break Fate::OnCycle;
            }
            pos.insert(cur, path.len());
            path.push(cur);
            match succ(cur) {
                Fate::Transient(j) => cur = j as usize,
                sink => {
                    path.pop();
                    fate[cur] = sink;
                    break sink;
                }
            }
        };
        let mut d = match end {
            Fate::OnCycle => 0,
            Fate::Transient(d) => d,
            other => {
                for &q in &path {
                    fate[q] = other;
                }
                continue;
            }
        };
        for &q in path.iter().rev() {
            d += 1;
            fate[q] = Fate::Transient(d);
        }
    }
    for f in &fate {
        match f {
            Fate::OnCycle => out.cycle_points += 1,
            Fate::Transient(d) => {
                out.transient_points += 1;
                *transients.entry(*d).or_default() += 1;
            }
            Fate::Unrecoverable => out.unrecoverable += 1,
            Fate::Left => out.left_domain += 1,
            Fate::Unknown => unreachable!("every point is classified"),
        }
    }
    out.cycle_length_histogram = Some(cycles);
    out.transient_length_histogram = Some(transients);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{Coord, FpElem, Rational};

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn pt(p: Prime, x: i64, y: i64) -> ResiduePoint {
        (PFp::Finite(FpElem::new(p, x)), PFp::Finite(FpElem::new(p, y)))
    }

    #[test]
    fn hv_fixed_point_mod_3() {
        let p = Prime::new(3).unwrap();
        let r = trace_orbit(&MapFamily::Hv { a: q("1") }, p, 0, pt(p, 1, 1), 20).unwrap();
        assert_eq!(r.terminal, Terminal::Cycle { length: 1 });
        assert_eq!(r.trail.len(), 1);
        assert_eq!(r.trail[0].point, (Coord::Finite(1), Coord::Finite(1)));
    }

    #[test]
    fn hv_singular_start_jumps() {
        let p = Prime::new(7).unwrap();
        let r = trace_orbit(&MapFamily::Hv { a: q("1") }, p, 0, pt(p, 0, 5), 20).unwrap();
        assert_eq!(r.trail[0].step, StepKind::RecoveryJump { m: 4 });
        assert_eq!(r.trail[0].point, (Coord::Finite(5), Coord::Finite(0)));
        assert_eq!(r.trail[0].n, 4);
    }

    #[test]
    fn infinite_start_leaves() {
        let p = Prime::new(7).unwrap();
        let r = trace_orbit(&MapFamily::Hv { a: q("1") }, p, 0, (PFp::Infinity, PFp::Finite(FpElem::new(p, 1))), 5).unwrap();
        assert_eq!(r.terminal, Terminal::LeftDomain);
        assert!(r.trail.is_empty());
    }

    #[test]
    fn hv_portrait_conserves() {
        let p = Prime::new(7).unwrap();
        let ph = phase_portrait(&MapFamily::Hv { a: q("1") }, p, 0, 100).unwrap();
        assert_eq!(ph.singular_entries, 7);
        assert_eq!(ph.accounted(), 49);
        let cyc: u64 = ph.cycle_length_histogram.as_ref().unwrap().iter().map(|(l, c)| l * c).sum();
        assert_eq!(cyc, ph.cycle_points);
        assert_eq!(ph.unrecoverable, 0);
    }

    #[test]
    fn qp3_portrait_has_trail_stats_only() {
        let p = Prime::new(11).unwrap();
        let fam = MapFamily::Qp3 { a: q("1"), b: q("3"), c: q("2"), d: q("6"), q: q("4") };
        let ph = phase_portrait(&fam, p, 0, 6).unwrap();
        assert!(ph.cycle_length_histogram.is_none());
        assert_eq!(ph.trail_length_histogram.as_ref().unwrap().values().sum::<u64>(), 121);
        assert_eq!(ph.accounted(), 121);
    }
}
