use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::{MapFamily, ResiduePoint};
use crate::error::{Error, Result};
use crate::exactnum::{PFp, Prime};
use crate::polyfield::{evaluate_pair, reduce_map_component, StepPair};

/// The reduced step is not finite at the point: either indeterminate or a
/// coordinate is infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReducedSingularity;

/// A family with its step maps reduced modulo `p`, memoized per step index.
#[derive(Debug)]
pub struct ReducedSystem {
    family: MapFamily,
    prime: Prime,
    cache: Mutex<HashMap<i64, Arc<StepPair>>>,
}

impl ReducedSystem {
    pub fn new(family: MapFamily, prime: Prime) -> Self {
        ReducedSystem { family, prime, cache: Mutex::new(HashMap::new()) }
    }

    pub fn family(&self) -> &MapFamily {
        &self.family
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    /// The reduced step map at index `n` (minimal form, then reduction).
    pub fn step(&self, n: i64) -> Result<Arc<StepPair>> {
        let key = if self.family.is_autonomous() { 0 } else { n };
        if let Some(s) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(s.clone());
        }
        let (f, g) = self.family.step_map(key);
        let undefined = || Error::InvalidParameter(format!("reduced step undefined modulo {} at n={n}", self.prime));
        let rf = reduce_map_component(&f, self.prime).ok_or_else(undefined)?;
        let rg = reduce_map_component(&g, self.prime).ok_or_else(undefined)?;
        let step = Arc::new((rf, rg));
        self.cache.lock().expect("cache lock").insert(key, step.clone());
        Ok(step)
    }

    /// Evaluates the reduced step; singular unless the image is finite.
    pub fn step_reduced(&self, n: i64, pt: ResiduePoint) -> Result<std::result::Result<ResiduePoint, ReducedSingularity>> {
        let step = self.step(n)?;
        Ok(match evaluate_pair(&step, pt) {
            Some(v @ (PFp::Finite(_), PFp::Finite(_))) => Ok(v),
            _ => Err(ReducedSingularity),
        })
    }
}

/// One reduced step of `family` at a residue point.
pub fn step_reduced(
    family: &MapFamily,
    n: i64,
    pt: ResiduePoint,
    p: Prime,
) -> Result<std::result::Result<ResiduePoint, ReducedSingularity>> {
    ReducedSystem::new(family.clone(), p).step_reduced(n, pt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{FpElem, Rational};

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn reduced_step_examples() {
        let p7 = Prime::new(7).unwrap();
        let f = |n: i64| PFp::Finite(FpElem::new(p7, n));
        let hv = MapFamily::Hv { a: q("1") };
        assert_eq!(step_reduced(&hv, 0, (f(3), f(2)), p7).unwrap(), Ok((f(5), f(3))));
        assert_eq!(step_reduced(&hv, 0, (f(0), f(4)), p7).unwrap(), Err(ReducedSingularity));
        let qp3 = MapFamily::Qp3 { a: q("1"), b: q("2"), c: q("3"), d: q("4"), q: q("5") };
        assert_eq!(step_reduced(&qp3, 0, (f(1), f(3)), p7).unwrap(), Err(ReducedSingularity));
    }

    #[test]
    fn singular_set_matches_domain_complement() {
        let p7 = Prime::new(7).unwrap();
        let fams = [
            MapFamily::Qrt { a: q("2"), gamma: 0 },
            MapFamily::Qrt { a: q("3"), gamma: 2 },
            MapFamily::Qp3 { a: q("1"), b: q("2"), c: q("3"), d: q("5"), q: q("2") },
            MapFamily::Qp4 { a: q("2"), b: q("3"), q: q("3"), tau0: q("5") },
            MapFamily::Hv { a: q("3") },
        ];
        for fam in &fams {
            let sys = ReducedSystem::new(fam.clone(), p7);
            for n in 0..3 {
                for x in 0..7 {
                    for y in 0..7 {
                        let pt = (PFp::Finite(FpElem::new(p7, x)), PFp::Finite(FpElem::new(p7, y)));
                        let singular = sys.step_reduced(n, pt).unwrap().is_err();
                        let outside = !fam.in_domain_residue(n, pt, p7).unwrap();
                        assert_eq!(singular, outside, "{fam} n={n} ({x},{y})");
                    }
                }
            }
        }
    }
}
