use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use super::MapFamily;
use crate::error::{Error, Result};
use crate::exactnum::{to_fp, valuation, FpElem, Prime, Rational, Valuation};

/// Parameters of a family reduced modulo `p` at step index `n`, with the
/// n-dependent products precomputed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReducedParams {
    Qrt { a: FpElem, gamma: u32 },
    Qp3 { a: FpElem, b: FpElem, c: FpElem, d: FpElem, q: FpElem, cn: FpElem, dn: FpElem },
    Qp4 { a: FpElem, b: FpElem, q: FpElem, tau0: FpElem, tau: FpElem },
    Hv { a: FpElem },
}

fn red(x: &Rational, name: &str, p: Prime) -> Result<FpElem> {
    to_fp(x, p).ok_or_else(|| Error::InvalidParameter(format!("{name} is not p-integral for p={p}")))
}

fn unit_pow(q: FpElem, n: i64) -> Result<FpElem> {
    q.pow(n).map_err(|_| Error::InvalidParameter("q reduces to 0".into()))
}

impl ReducedParams {
    pub fn new(fam: &MapFamily, p: Prime, n: i64) -> Result<Self> {
        Ok(match fam {
            MapFamily::Qrt { a, gamma } => ReducedParams::Qrt { a: red(a, "a", p)?, gamma: *gamma },
            MapFamily::Qp3 { a, b, c, d, q } => {
                let (a, b, c, d, q) = (red(a, "a", p)?, red(b, "b", p)?, red(c, "c", p)?, red(d, "d", p)?, red(q, "q", p)?);
                let qn = unit_pow(q, n)?;
                ReducedParams::Qp3 { a, b, c, d, q, cn: c.mul(qn), dn: d.mul(qn) }
            }
            MapFamily::Qp4 { a, b, q, tau0 } => {
                let (a, b, q, tau0) = (red(a, "a", p)?, red(b, "b", p)?, red(q, "q", p)?, red(tau0, "tau0", p)?);
                ReducedParams::Qp4 { a, b, q, tau0, tau: tau0.mul(unit_pow(q, n)?) }
            }
            MapFamily::Hv { a } => ReducedParams::Hv { a: red(a, "a", p)? },
        })
    }
}

/// Outcome of checking a family's hypotheses for a prime. Violations break
/// a stated hypothesis; warnings flag parameter coincidences mod `p` under
/// which the reduced step loses a factor and the recovery pattern changes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub prime: Prime,
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn unit_check(out: &mut Vec<String>, name: &str, x: &Rational, p: Prime) {
    match valuation(x, p) {
        Valuation::Finite(0) => {}
        Valuation::Finite(v) => out.push(format!("valuation({name}) = {v}, expected 0")),
        Valuation::PlusInfinity => out.push(format!("{name} = 0, expected a unit")),
    }
}

/// Literal hypotheses of the family's proposition.
pub fn validate_params(fam: &MapFamily, p: Prime) -> ValidationReport {
    let mut v = Vec::new();
    match fam {
        MapFamily::Qrt { a, .. } => {
            if let Valuation::Finite(k) = valuation(a, p) {
                if k < 0 {
                    v.push(format!("valuation(a) = {k} < 0"));
                }
            }
        }
        MapFamily::Qp3 { a, b, c, d, q } => {
            for (name, x) in [("a", a), ("b", b), ("c", c), ("d", d), ("q", q)] {
                unit_check(&mut v, name, x, p);
            }
            let named = [("a", a), ("b", b), ("c", c), ("d", d), ("q", q)];
            for i in 0..named.len() {
                for j in i + 1..named.len() {
                    if named[i].1 == named[j].1 {
                        v.push(format!("{} = {} (parameters must be distinct)", named[i].0, named[j].0));
                    }
                }
            }
            if v.is_empty() {
                let rp = ReducedParams::new(fam, p, 0).expect("units reduce");
                let ReducedParams::Qp3 { a, b, c, d, q, .. } = rp else { unreachable!() };
                if a == b {
                    v.push("a = b mod p".into());
                }
                if a.add(b) == c.add(d).mul(q.pow(3).expect("unit")) {
                    v.push("a + b = (c + d) q^3 mod p".into());
                }
            }
        }
        MapFamily::Qp4 { a, b, q, tau0 } => {
            for (name, x) in [("a", a), ("b", b), ("q", q), ("tau0", tau0)] {
                unit_check(&mut v, name, x, p);
            }
            if v.is_empty() {
                let ReducedParams::Qp4 { a, q, tau0, .. } = ReducedParams::new(fam, p, 0).expect("units reduce") else {
                    unreachable!()
                };
                let one = FpElem::one(p);
                if a.mul(q.pow(2).expect("unit")).mul(tau0) == one {
                    v.push("a q^2 tau0 = 1 mod p".into());
                }
                if a.mul(q.pow(4).expect("unit")).mul(tau0) == one {
                    v.push("a q^4 tau0 = 1 mod p".into());
                }
            }
        }
        MapFamily::Hv { a } => unit_check(&mut v, "a", a, p),
    }
    ValidationReport { prime: p, violations: v, warnings: Vec::new() }
}

/// Literal hypotheses plus their n-dependent forms over a window of step
/// indices, and warnings for residue coincidences of the step map.
pub fn validate_params_over(fam: &MapFamily, p: Prime, window: RangeInclusive<i64>) -> ValidationReport {
    let mut report = validate_params(fam, p);
    if !report.passed() {
        return report;
    }
    match ReducedParams::new(fam, p, 0) {
        Ok(ReducedParams::Qp3 { .. }) => {
            report.warnings.push("(c q^n, 0) and (d q^n, 0) are base points of the reduced step for every n".into());
        }
        Ok(ReducedParams::Qp4 { a, b, .. }) => {
            let disc = b.mul(b).sub(a.mul(a).mul(FpElem::new(p, 4)));
            let half = ((p.get() - 1) / 2) as i64;
            if p.get() == 2 || disc.is_zero() || disc.pow(half).expect("unit") == FpElem::one(p) {
                report.warnings.push("a x^2 + b x + a has roots mod p: base points on x y = 1".into());
            }
        }
        _ => {}
    }
    for n in window {
        let Ok(rp) = ReducedParams::new(fam, p, n) else {
            report.violations.push(format!("parameters do not reduce at n={n}"));
            continue;
        };
        match rp {
            ReducedParams::Qp3 { a, b, c, d, q, cn, dn } => {
                let q3 = q.pow(3).expect("unit");
                if n != 0 && a.add(b) == c.add(d).mul(q3).mul(q.pow(n).expect("unit")) {
                    report.violations.push(format!("a + b = (c + d) q^(n+3) mod p at n={n}"));
                }
                for (ln, l) in [("a", a), ("b", b)] {
                    for (rn, r) in [("c", cn), ("d", dn)] {
                        if l == r {
                            report.warnings.push(format!("{ln} = {rn} q^n mod p at n={n}"));
                        }
                    }
                }
            }
            ReducedParams::Qp4 { a, b, q, tau, .. } => {
                let one = FpElem::one(p);
                if n != 0 {
                    if a.mul(q.pow(2).expect("unit")).mul(tau) == one {
                        report.violations.push(format!("a q^2 tau = 1 mod p at n={n}"));
                    }
                    if a.mul(q.pow(4).expect("unit")).mul(tau) == one {
                        report.violations.push(format!("a q^4 tau = 1 mod p at n={n}"));
                    }
                }
                if a.mul(tau) == one {
                    report.warnings.push(format!("a tau = 1 mod p at n={n}"));
                }
                if a.mul(tau).mul(tau).sub(b.mul(tau)).add(a).is_zero() {
                    report.warnings.push(format!("a tau^2 - b tau + a = 0 mod p at n={n}"));
                }
            }
            ReducedParams::Qrt { .. } | ReducedParams::Hv { .. } => {}
        }
    }
    report
}
