//! Singular cases of the propositions and their closed-form recovery values.
//!
//! The case conditions and formulas are stated at step index 0; at index
//! `n` they apply with `c, d` replaced by `c q^n, d q^n` (qPIII) and `tau0`
//! by `tau = q^n tau0` (qPIV).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{FpElem, PFp, Prime};
use crate::maps::{MapFamily, ReducedParams, ResiduePoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CaseId {
    #[serde(rename = "QP3_i")]
    Qp3I,
    #[serde(rename = "QP3_ii")]
    Qp3Ii,
    #[serde(rename = "QP3_iii")]
    Qp3Iii,
    #[serde(rename = "QP3_iv")]
    Qp3Iv,
    #[serde(rename = "QP3_v")]
    Qp3V,
    #[serde(rename = "QP3_vi")]
    Qp3Vi,
    #[serde(rename = "QP4_i")]
    Qp4I,
    #[serde(rename = "QP4_ii")]
    Qp4Ii,
    #[serde(rename = "QP4_iii")]
    Qp4Iii,
    #[serde(rename = "QP4_iv")]
    Qp4Iv,
    #[serde(rename = "QP4_v")]
    Qp4V,
    #[serde(rename = "HV_sing")]
    HvSing,
    /// Singular point of the QRT map; its recovery step is not fixed here.
    #[serde(rename = "QRT_sing")]
    QrtSing,
    Generic,
}

impl CaseId {
    pub const ALL: [CaseId; 14] = [
        CaseId::Qp3I,
        CaseId::Qp3Ii,
        CaseId::Qp3Iii,
        CaseId::Qp3Iv,
        CaseId::Qp3V,
        CaseId::Qp3Vi,
        CaseId::Qp4I,
        CaseId::Qp4Ii,
        CaseId::Qp4Iii,
        CaseId::Qp4Iv,
        CaseId::Qp4V,
        CaseId::HvSing,
        CaseId::QrtSing,
        CaseId::Generic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CaseId::Qp3I => "QP3_i",
            CaseId::Qp3Ii => "QP3_ii",
            CaseId::Qp3Iii => "QP3_iii",
            CaseId::Qp3Iv => "QP3_iv",
            CaseId::Qp3V => "QP3_v",
            CaseId::Qp3Vi => "QP3_vi",
            CaseId::Qp4I => "QP4_i",
            CaseId::Qp4Ii => "QP4_ii",
            CaseId::Qp4Iii => "QP4_iii",
            CaseId::Qp4Iv => "QP4_iv",
            CaseId::Qp4V => "QP4_v",
            CaseId::HvSing => "HV_sing",
            CaseId::QrtSing => "QRT_sing",
            CaseId::Generic => "Generic",
        }
    }

    /// Number of steps after which the case recovers, when known.
    pub fn expected_m(self) -> Option<u32> {
        match self {
            CaseId::Generic => Some(1),
            CaseId::Qp3I | CaseId::Qp3Iii | CaseId::Qp3V | CaseId::Qp4I | CaseId::Qp4Iii => Some(3),
            CaseId::Qp3Vi | CaseId::HvSing => Some(4),
            CaseId::Qp3Ii | CaseId::Qp3Iv | CaseId::Qp4Ii | CaseId::Qp4Iv | CaseId::Qp4V => Some(5),
            CaseId::QrtSing => None,
        }
    }

    /// The cases belonging to a family, `Generic` last.
    pub fn for_family(fam: &MapFamily) -> &'static [CaseId] {
        match fam {
            MapFamily::Qp3 { .. } => &CaseId::ALL[0..6],
            MapFamily::Qp4 { .. } => &CaseId::ALL[6..11],
            MapFamily::Hv { .. } => &CaseId::ALL[11..12],
            MapFamily::Qrt { .. } => &CaseId::ALL[12..13],
        }
    }
}

impl std::fmt::Display for CaseId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

fn finite(pt: ResiduePoint) -> Result<(FpElem, FpElem)> {
    match pt {
        (PFp::Finite(x), PFp::Finite(y)) => Ok((x, y)),
        _ => Err(Error::InvalidParameter("residue point must have finite coordinates".into())),
    }
}

fn k(p: Prime, n: i64) -> FpElem {
    FpElem::new(p, n)
}

/// `(a - b)(a + b - c q - d q)` at the current step.
fn qp3_kappa(a: FpElem, b: FpElem, cn: FpElem, dn: FpElem, q: FpElem) -> FpElem {
    a.sub(b).mul(a.add(b).sub(cn.mul(q)).sub(dn.mul(q)))
}

/// `1 + q^2(-1 + a tau - b tau^2 + q tau^2 + tau y - a tau^2 y)`.
fn qp4_sigma(a: FpElem, b: FpElem, q: FpElem, tau: FpElem, y: FpElem) -> FpElem {
    let p = a.prime();
    let t2 = tau.mul(tau);
    let inner = k(p, -1).add(a.mul(tau)).sub(b.mul(t2)).add(q.mul(t2)).add(tau.mul(y)).sub(a.mul(t2).mul(y));
    k(p, 1).add(q.mul(q).mul(inner))
}

/// Classifies a finite residue point. Overlapping conditions resolve as:
/// `x = a` or `x = b` before `y = 0` (qPIII), and `x = -tau` before
/// `xy = 1` (qPIV).
pub fn classify_case(fam: &MapFamily, pt: ResiduePoint, n: i64, p: Prime) -> Result<CaseId> {
    let (x, y) = finite(pt)?;
    let rp = ReducedParams::new(fam, p, n)?;
    Ok(match rp {
        ReducedParams::Qrt { gamma, .. } => {
            if y.is_zero() || (gamma >= 1 && x.is_zero()) {
                CaseId::QrtSing
            } else {
                CaseId::Generic
            }
        }
        ReducedParams::Qp3 { a, b, q, cn, dn, .. } => {
            let kappa = qp3_kappa(a, b, cn, dn, q);
            if x == a {
                if kappa.mul(y) == b.mul(a.sub(cn)).mul(a.sub(dn)) {
                    CaseId::Qp3Ii
                } else {
                    CaseId::Qp3I
                }
            } else if x == b {
                if kappa.mul(y) == a.mul(b.sub(cn)).mul(b.sub(dn)).neg() {
                    CaseId::Qp3Iv
                } else {
                    CaseId::Qp3Iii
                }
            } else if y.is_zero() {
                if x.is_zero() {
                    CaseId::Qp3Vi
                } else {
                    CaseId::Qp3V
                }
            } else {
                CaseId::Generic
            }
        }
        ReducedParams::Qp4 { a, b, q, tau, .. } => {
            if x == tau.neg() {
                if y.mul(tau).residue() == p.get() - 1 {
                    CaseId::Qp4Iv
                } else {
                    CaseId::Qp4Iii
                }
            } else if x.is_zero() {
                if qp4_sigma(a, b, q, tau, y).is_zero() {
                    CaseId::Qp4Ii
                } else {
                    CaseId::Qp4I
                }
            } else if x.mul(y).residue() == 1 {
                CaseId::Qp4V
            } else {
                CaseId::Generic
            }
        }
        ReducedParams::Hv { .. } => {
            if x.is_zero() {
                CaseId::HvSing
            } else {
                CaseId::Generic
            }
        }
    })
}

fn div(num: FpElem, den: FpElem, case: CaseId) -> Result<FpElem> {
    num.try_div(den).map_err(|_| Error::ZeroDenominatorInFormula(case.name().into()))
}

fn pw(x: FpElem, e: i64) -> FpElem {
    x.pow(e).expect("unit")
}

/// Closed-form recovery value of a singular case and its step count.
pub fn closed_form_value(
    case: CaseId,
    pt: ResiduePoint,
    fam: &MapFamily,
    n: i64,
    p: Prime,
) -> Result<(ResiduePoint, u32)> {
    let (x, y) = finite(pt)?;
    let rp = ReducedParams::new(fam, p, n)?;
    let expected = case.expected_m().ok_or_else(|| Error::NoClosedForm(case.name().into()))?;
    let zero = k(p, 0);
    let (vx, vy) = match (case, rp) {
        (CaseId::Generic, _) => return Err(Error::NoClosedForm(case.name().into())),
        (CaseId::Qp3I, ReducedParams::Qp3 { a, b, q, cn, dn, .. }) => {
            let q2 = pw(q, 2);
            let num = a.mul(b.sub(cn.mul(q2))).mul(b.sub(dn.mul(q2))).mul(y);
            let den = b.mul(a.sub(cn)).mul(a.sub(dn)).sub(qp3_kappa(a, b, cn, dn, q).mul(y));
            (div(num, den, case)?, b)
        }
        (CaseId::Qp3Ii, ReducedParams::Qp3 { a, b, q, cn, dn, .. }) => {
            let (q3, q4) = (pw(q, 3), pw(q, 4));
            let num = b.mul(a.sub(cn.mul(q4))).mul(a.sub(dn.mul(q4)));
            let den = a.sub(b).mul(a.add(b).sub(cn.mul(q3)).sub(dn.mul(q3)));
            (div(num, den, case)?, a)
        }
        (CaseId::Qp3Iii, ReducedParams::Qp3 { a, b, q, cn, dn, .. }) => {
            let q2 = pw(q, 2);
            let num = b.mul(a.sub(cn.mul(q2))).mul(a.sub(dn.mul(q2))).mul(y);
            let den = a.mul(b.sub(cn)).mul(b.sub(dn)).add(qp3_kappa(a, b, cn, dn, q).mul(y));
            (div(num, den, case)?, a)
        }
        (CaseId::Qp3Iv, ReducedParams::Qp3 { a, b, q, cn, dn, .. }) => {
            let (q3, q4) = (pw(q, 3), pw(q, 4));
            let num = a.mul(b.sub(cn.mul(q4))).mul(b.sub(dn.mul(q4)));
            let den = a.sub(b).mul(a.add(b).sub(cn.mul(q3)).sub(dn.mul(q3)));
            (div(num, den, case)?.neg(), b)
        }
        (CaseId::Qp3V, ReducedParams::Qp3 { a, b, .. }) => (zero, div(a.mul(b), x, case)?),
        (CaseId::Qp3Vi, ReducedParams::Qp3 { .. }) => (zero, zero),
        (CaseId::Qp4I, ReducedParams::Qp4 { a, b, q, tau, .. }) => {
            let (q2, q3, q4, q6) = (pw(q, 2), pw(q, 3), pw(q, 4), pw(q, 6));
            let t2 = tau.mul(tau);
            let t3 = t2.mul(tau);
            let tail = k(p, 1).add(b.mul(t2)).sub(tau.mul(y)).add(a.mul(t2).mul(y));
            let num = k(p, -1)
                .sub(q3.mul(t2))
                .sub(b.mul(q4).mul(t2))
                .add(a.mul(q6).mul(t3))
                .add(q2.mul(tail));
            let den = q2.mul(tau).mul(qp4_sigma(a, b, q, tau, y));
            (div(num, den, case)?, q2.mul(tau).neg())
        }
        (CaseId::Qp4Ii, ReducedParams::Qp4 { a, b, q, tau, .. }) => {
            let (q2, q4, q7, q8) = (pw(q, 2), pw(q, 4), pw(q, 7), pw(q, 8));
            let t2 = tau.mul(tau);
            let num = k(p, -1).add(q2).add(a.mul(q4).mul(tau)).add(q7.mul(t2)).sub(b.mul(q8).mul(t2));
            let den = q4.mul(tau).mul(k(p, -1).add(a.mul(q4).mul(tau)));
            (div(num, den, case)?, zero)
        }
        (CaseId::Qp4Iii, ReducedParams::Qp4 { a, b, q, tau, .. }) => {
            let (q2, q3, q4) = (pw(q, 2), pw(q, 3), pw(q, 4));
            let t2 = tau.mul(tau);
            let one_ty = k(p, 1).add(tau.mul(y));
            let brace = k(p, 1).add(b.mul(t2)).add(tau.mul(y)).add(a.mul(t2).mul(tau.neg().add(y)));
            let num = k(p, -1)
                .sub(tau.mul(y))
                .add(q3.sub(b.mul(q4)).mul(t2).mul(one_ty))
                .add(q2.mul(brace));
            let den = q2.mul(tau).mul(k(p, -1).add(a.mul(q2).mul(tau))).mul(one_ty);
            (div(num, den, case)?, zero)
        }
        (CaseId::Qp4Iv, ReducedParams::Qp4 { a, q, tau, .. }) => {
            let w = a.mul(pw(q, 6)).mul(tau.mul(tau));
            (div(k(p, -1), w, case)?, w.neg())
        }
        (CaseId::Qp4V, ReducedParams::Qp4 { a, q, tau, .. }) => {
            let w = a.mul(pw(q, 6)).mul(tau.mul(tau).mul(tau)).mul(y);
            (div(k(p, 1), w, case)?, w)
        }
        (CaseId::HvSing, ReducedParams::Hv { .. }) => (y, zero),
        _ => {
            return Err(Error::InvalidParameter(format!("case {case} does not belong to {}", fam.kind())));
        }
    };
    Ok(((PFp::Finite(vx), PFp::Finite(vy)), expected))
}
