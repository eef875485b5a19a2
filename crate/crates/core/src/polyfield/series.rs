//! Truncated Laurent series over `F_p` with precision tracking.
//!
//! Used to evaluate long compositions along a line at `t = 0` when the
//! exact rational functions in `F_p(t)` grow too large. Every value records
//! how many leading terms are known, so a result is either exact at `t = 0`
//! or reported as unknown.

use super::field::Fp;
use super::field::Field;
use super::multipoly::MultiPoly;
use super::unipoly::UniPoly;
use crate::exactnum::{FpElem, PFp};

#[derive(Clone, Debug, PartialEq)]
pub enum Laurent {
    /// `t^val * (c0 + c1 t + ... + O(t^len))`, with `c0 != 0`.
    Known { val: i64, coeffs: Vec<FpElem> },
    /// Zero up to `O(t^abs_prec)`: every known term cancelled.
    Unknown { abs_prec: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionExhausted;

impl Laurent {
    pub fn from_poly(p: &UniPoly<Fp>, prec: usize) -> Laurent {
        match p.trailing() {
            None => Laurent::Unknown { abs_prec: i64::MAX / 4 },
            Some((v, _)) => {
                let coeffs: Vec<FpElem> = (v..v + prec).map(|i| p.coeff(i)).collect();
                Laurent::Known { val: v as i64, coeffs }
            }
        }
    }

    pub fn constant(c: FpElem, prec: usize) -> Laurent {
        if c.is_zero() {
            return Laurent::Unknown { abs_prec: i64::MAX / 4 };
        }
        let mut coeffs = vec![FpElem::zero(c.prime()); prec];
        coeffs[0] = c;
        Laurent::Known { val: 0, coeffs }
    }

    fn abs_prec(&self) -> i64 {
        match self {
            Laurent::Known { val, coeffs } => val + coeffs.len() as i64,
            Laurent::Unknown { abs_prec } => *abs_prec,
        }
    }

    pub fn add(&self, rhs: &Laurent, field: Fp) -> Laurent {
        let abs = self.abs_prec().min(rhs.abs_prec());
        let lo = match (self, rhs) {
            (Laurent::Known { val: a, .. }, Laurent::Known { val: b, .. }) => (*a).min(*b),
            (Laurent::Known { val, .. }, _) | (_, Laurent::Known { val, .. }) => *val,
            _ => return Laurent::Unknown { abs_prec: abs },
        };
        if lo >= abs {
            return Laurent::Unknown { abs_prec: abs };
        }
        let get = |s: &Laurent, i: i64| -> FpElem {
            match s {
                Laurent::Known { val, coeffs } if i >= *val => {
                    coeffs.get((i - val) as usize).copied().unwrap_or_else(|| field.zero())
                }
                _ => field.zero(),
            }
        };
        let sums: Vec<FpElem> = (lo..abs).map(|i| get(self, i).add(get(rhs, i))).collect();
        match sums.iter().position(|c| !c.is_zero()) {
            None => Laurent::Unknown { abs_prec: abs },
            Some(k) => Laurent::Known { val: lo + k as i64, coeffs: sums[k..].to_vec() },
        }
    }

    pub fn scale(&self, c: FpElem) -> Laurent {
        match self {
            _ if c.is_zero() => Laurent::Unknown { abs_prec: i64::MAX / 4 },
            Laurent::Known { val, coeffs } => {
                Laurent::Known { val: *val, coeffs: coeffs.iter().map(|a| a.mul(c)).collect() }
            }
            u => u.clone(),
        }
    }

    pub fn mul(&self, rhs: &Laurent, field: Fp) -> Laurent {
        match (self, rhs) {
            (Laurent::Known { val: va, coeffs: ca }, Laurent::Known { val: vb, coeffs: cb }) => {
                let n = ca.len().min(cb.len());
                let mut out = vec![field.zero(); n];
                for (i, a) in ca.iter().take(n).enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    for (j, b) in cb.iter().take(n - i).enumerate() {
                        out[i + j] = out[i + j].add(a.mul(*b));
                    }
                }
                Laurent::Known { val: va + vb, coeffs: out }
            }
            (Laurent::Known { val, .. }, Laurent::Unknown { abs_prec })
            | (Laurent::Unknown { abs_prec }, Laurent::Known { val, .. }) => {
                Laurent::Unknown { abs_prec: abs_prec.saturating_add(*val) }
            }
            (Laurent::Unknown { abs_prec: a }, Laurent::Unknown { abs_prec: b }) => {
                Laurent::Unknown { abs_prec: a.saturating_add(*b) }
            }
        }
    }

    pub fn inv(&self, field: Fp) -> Result<Laurent, PrecisionExhausted> {
        let Laurent::Known { val, coeffs } = self else {
            return Err(PrecisionExhausted);
        };
        let n = coeffs.len();
        let c0inv = coeffs[0].inv().expect("leading coefficient nonzero");
        let mut out = vec![field.zero(); n];
        out[0] = c0inv;
        for k in 1..n {
            let mut s = field.zero();
            for j in 1..=k {
                s = s.add(coeffs[j].mul(out[k - j]));
            }
            out[k] = s.neg().mul(c0inv);
        }
        Ok(Laurent::Known { val: -val, coeffs: out })
    }

    /// Value at `t = 0` on the projective line, if determined.
    pub fn value_at_zero_in(&self, field: Fp) -> Option<PFp> {
        match self {
            Laurent::Known { val, coeffs } => Some(match val.cmp(&0) {
                std::cmp::Ordering::Greater => PFp::Finite(field.zero()),
                std::cmp::Ordering::Less => PFp::Infinity,
                std::cmp::Ordering::Equal => PFp::Finite(coeffs[0]),
            }),
            Laurent::Unknown { abs_prec } if *abs_prec >= 1 => Some(PFp::Finite(field.zero())),
            Laurent::Unknown { .. } => None,
        }
    }
}

/// Evaluates `num(x, y) / den(x, y)` on series arguments.
pub fn eval_ratio(
    num: &MultiPoly<Fp>,
    den: &MultiPoly<Fp>,
    x: &Laurent,
    y: &Laurent,
    field: Fp,
) -> Result<Laurent, PrecisionExhausted> {
    let dx = num.deg_x().max(den.deg_x()) as usize;
    let dy = num.deg_y().max(den.deg_y()) as usize;
    let prec = match (x, y) {
        (Laurent::Known { coeffs, .. }, _) | (_, Laurent::Known { coeffs, .. }) => coeffs.len(),
        _ => 1,
    };
    let one = Laurent::constant(field.one(), prec);
    let mut xp = vec![one.clone()];
    for i in 0..dx {
        xp.push(xp[i].mul(x, field));
    }
    let mut yp = vec![one];
    for j in 0..dy {
        yp.push(yp[j].mul(y, field));
    }
    let eval = |p: &MultiPoly<Fp>| -> Laurent {
        let mut acc = Laurent::Unknown { abs_prec: i64::MAX / 4 };
        for (&(i, j), c) in p.terms() {
            let term = xp[i as usize].mul(&yp[j as usize], field).scale(*c);
            acc = acc.add(&term, field);
        }
        acc
    };
    let n = eval(num);
    let d = eval(den);
    Ok(n.mul(&d.inv(field)?, field))
}
